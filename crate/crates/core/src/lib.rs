//! Exact point–line incidence toolkit: rational and quadratic-field
//! arithmetic, totient machinery, additive and multiplicative energies,
//! lattice incidence counting, structural analysis of extremal line sets,
//! and generators for the classical extremal configurations.

pub mod error;
pub mod exactnum;
pub mod numtheory;
pub mod energy;
pub mod geom;
pub mod structure;
pub mod construct;
pub mod sweep;

pub use error::{Error, Result};
pub use exactnum::{Number, QuadExt, Rat};
pub use energy::NumberSet;
pub use geom::{AnalyzerConfig, GridSpec, Line, Point, ProductSet, Slope};
pub use structure::SlopeWindow;

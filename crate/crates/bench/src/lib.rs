//! Fixtures shared by the criterion benches.

use incidence_core::construct::{construct_general_alpha, Construction};
use incidence_core::{GridSpec, NumberSet, Rat, SlopeWindow};

/// General-α construction with `N` lines on the grid `w = round(N^α)`.
pub fn lattice(n: u64, alpha: f64) -> Construction {
    let w = (n as f64).powf(alpha).round() as u64;
    let h = ((n as f64 / w as f64).round() as u64).max(w);
    let g = GridSpec::new(w, h).expect("positive grid");
    construct_general_alpha(&g, &SlopeWindow::default(), 4, Some(g.n())).expect("valid construction")
}

/// Deterministic rational set with many repeated ratios.
pub fn rational_set(n: usize) -> NumberSet {
    NumberSet::from_rats((1..=n as i64).map(|i| Rat::new(i * i % 97 + 1, i % 7 + 1).expect("nonzero denominator")))
}

//! Generators for extremal incidence configurations and generalized
//! arithmetic progressions.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::energy::NumberSet;
use crate::error::{Error, Result};
use crate::exactnum::{Number, Rat};
use crate::geom::{format_lines_file, grid_line_count, incidences_fast, GridSpec, Line, Point, ProductSet, Slope};
use crate::structure::{lattice_intercept_numerators, lattice_slope_set, SlopeWindow};

/// Largest generalized progression [`gap_set`] will expand.
pub const GAP_SIZE_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

/// Lines contributed by one signed slope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeUse {
    pub s: u64,
    pub t: u64,
    pub sign: Sign,
    pub lines: usize,
    pub min_count: u64,
    pub max_count: u64,
}

/// Rank key of the last selected line; together with the selection rule it
/// pins down the line list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cutoff {
    pub count: u64,
    pub t: u64,
    pub s: u64,
    pub sign: Sign,
    pub intercept: Rat,
}

/// Replayable record of a construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructManifest {
    pub kind: String,
    pub grid: GridSpec,
    pub window: Option<SlopeWindow>,
    pub k: Option<u64>,
    pub requested_lines: Option<u64>,
    pub available_lines: u64,
    pub n_lines: usize,
    pub incidences: u64,
    pub selection_rule: String,
    pub cutoff: Option<Cutoff>,
    pub seed: Option<u64>,
    pub slopes: Vec<SlopeUse>,
    /// FNV-1a hash of the serialized line list.
    pub lines_digest: String,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub points: ProductSet,
    pub lines: Vec<Line>,
    pub manifest: ConstructManifest,
}

fn fnv1a(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn slope_uses(lines: &[Line], counts: &[u64]) -> Vec<SlopeUse> {
    let mut out: Vec<SlopeUse> = Vec::new();
    let mut keyed: Vec<((u64, u64, Sign), u64)> = lines
        .iter()
        .zip(counts)
        .filter_map(|(l, &c)| {
            let (sign, s, t) = l.slope.sign_st()?;
            let sign = if sign < 0 { Sign::Negative } else { Sign::Positive };
            Some(((t, s, sign), c))
        })
        .collect();
    keyed.sort();
    for ((t, s, sign), c) in keyed {
        match out.last_mut() {
            Some(u) if (u.t, u.s, u.sign) == (t, s, sign) => {
                u.lines += 1;
                u.min_count = u.min_count.min(c);
                u.max_count = u.max_count.max(c);
            }
            _ => out.push(SlopeUse { s, t, sign, lines: 1, min_count: c, max_count: c }),
        }
    }
    out
}

fn manifest(kind: &str, grid: GridSpec, lines: &[Line], counts: &[u64]) -> ConstructManifest {
    ConstructManifest {
        kind: kind.to_string(),
        grid,
        window: None,
        k: None,
        requested_lines: None,
        available_lines: lines.len() as u64,
        n_lines: lines.len(),
        incidences: counts.iter().sum(),
        selection_rule: "all".to_string(),
        cutoff: None,
        seed: None,
        slopes: slope_uses(lines, counts),
        lines_digest: fnv1a(&format_lines_file(lines)),
    }
}

/// `P = [r] × [2r²]` with the `r³` lines `y = a·x + b`, `a ∈ [r]`, `b ∈ [r²]`.
pub fn construct_elekes(r: u64) -> Result<Construction> {
    if r == 0 {
        return Err(Error::invalid("r must be positive"));
    }
    let grid = GridSpec::new(r, 2 * r * r)?;
    let mut lines = Vec::with_capacity((r * r * r) as usize);
    for a in 1..=r as i64 {
        for b in 1..=(r * r) as i64 {
            lines.push(Line::new(Slope::NonVertical(Rat::from(a)), Number::int(b)));
        }
    }
    let counts = vec![r; lines.len()];
    let mut m = manifest("elekes", grid, &lines, &counts);
    m.incidences = incidences_fast(&grid.product_set(), &lines);
    Ok(Construction { points: grid.product_set(), lines, manifest: m })
}

/// Lines of the extremal slope window through the leftmost columns and
/// bottom rows, ranked by incidence count.
///
/// For every window slope `±s/t`, candidates are the lines through
/// `(i, j)` with `i ∈ [t], j ∈ [J]` or `i ∈ [I], j ∈ [s]` (the boxes of
/// [`crate::structure::lattice_boxes`]; negative slopes use the mirrored
/// boxes), deduplicated and restricted to lines meeting the grid. They are
/// ranked by count descending, then `(t, s, sign, intercept)` ascending,
/// and the first `n_lines` are returned (all of them when `None`).
pub fn construct_general_alpha(
    g: &GridSpec,
    win: &SlopeWindow,
    k: u64,
    n_lines: Option<u64>,
) -> Result<Construction> {
    if k == 0 {
        return Err(Error::invalid("properness constant k must be at least 1"));
    }
    let slopes = lattice_slope_set(g, win)?;
    // (count, t, s, sign, numerator over t)
    let mut cands: Vec<(u64, u64, u64, Sign, i64)> = Vec::new();
    let top = g.h as i64 + 1;
    for &(s, t) in &slopes {
        let slope = Rat::new(s as i64, t as i64)?;
        for u in lattice_intercept_numerators(g, s, t, k) {
            let line = Line::new(Slope::NonVertical(slope.clone()), Number::Rat(Rat::new(u, t as i64)?));
            // Mirroring preserves counts.
            let c = grid_line_count(g, &line);
            if c > 0 {
                cands.push((c, t, s, Sign::Positive, u));
                cands.push((c, t, s, Sign::Negative, top * t as i64 - u));
            }
        }
    }
    cands.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| (a.1, a.2, a.3, a.4).cmp(&(b.1, b.2, b.3, b.4))));
    let available = cands.len() as u64;
    let take = match n_lines {
        Some(n) if n > available => {
            return Err(Error::invalid(format!("requested {n} lines but only {available} are available")))
        }
        Some(n) => n as usize,
        None => cands.len(),
    };
    cands.truncate(take);
    let lines: Vec<Line> = cands
        .iter()
        .map(|&(_, t, s, sign, u)| {
            let s = if sign == Sign::Positive { s as i64 } else { -(s as i64) };
            Line::new(Slope::NonVertical(Rat::new(s, t as i64).expect("t > 0")), Number::Rat(Rat::new(u, t as i64).expect("t > 0")))
        })
        .collect();
    let counts: Vec<u64> = cands.iter().map(|c| c.0).collect();
    let mut m = manifest("general", *g, &lines, &counts);
    m.window = Some(win.clone());
    m.k = Some(k);
    m.requested_lines = n_lines;
    m.available_lines = available;
    m.selection_rule = "count desc, then t, s, sign, intercept asc".to_string();
    m.cutoff = cands.last().map(|&(count, t, s, sign, u)| Cutoff {
        count,
        t,
        s,
        sign,
        intercept: Rat::new(u, t as i64).expect("t > 0"),
    });
    Ok(Construction { points: g.product_set(), lines, manifest: m })
}

/// The square-grid case `[m] × [m]`.
pub fn construct_erdos(m: u64, win: &SlopeWindow, k: u64, n_lines: Option<u64>) -> Result<Construction> {
    if m < 2 {
        return Err(Error::invalid("m must be at least 2"));
    }
    let mut c = construct_general_alpha(&GridSpec::new(m, m)?, win, k, n_lines)?;
    c.manifest.kind = "erdos".to_string();
    Ok(c)
}

/// Distinct lines through pairs of distinct random grid points.
pub fn construct_random<R: Rng>(g: &GridSpec, n_lines: u64, seed: u64, rng: &mut R) -> Result<Construction> {
    if g.n() < 2 {
        return Err(Error::invalid("random lines need at least two grid points"));
    }
    let mut seen: HashSet<Line> = HashSet::new();
    let mut lines = Vec::with_capacity(n_lines as usize);
    let mut attempts: u64 = 0;
    let budget = n_lines.saturating_mul(100).max(1000);
    while (lines.len() as u64) < n_lines {
        attempts += 1;
        if attempts > budget {
            return Err(Error::limit(format!("found only {} distinct random lines", lines.len())));
        }
        let a = (rng.gen_range(1..=g.w) as i64, rng.gen_range(1..=g.h) as i64);
        let b = (rng.gen_range(1..=g.w) as i64, rng.gen_range(1..=g.h) as i64);
        if a == b {
            continue;
        }
        let slope = if a.0 == b.0 { Slope::Vertical } else { Slope::NonVertical(Rat::new(b.1 - a.1, b.0 - a.0)?) };
        let line = Line::through(&(Number::int(a.0), Number::int(a.1)), slope)?;
        if seen.insert(line.clone()) {
            lines.push(line);
        }
    }
    let counts: Vec<u64> = lines.iter().map(|l| grid_line_count(g, l)).collect();
    let mut m = manifest("random", *g, &lines, &counts);
    m.requested_lines = Some(n_lines);
    m.selection_rule = "lines through two uniform grid points".to_string();
    m.seed = Some(seed);
    Ok(Construction { points: g.product_set(), lines, manifest: m })
}

/// One line per slope through `center`.
pub fn construct_pencil(center: &Point, slopes: &[Slope]) -> Result<Vec<Line>> {
    let mut seen = HashSet::new();
    for s in slopes {
        if !seen.insert(s) {
            return Err(Error::invalid(format!("duplicate slope {s}")));
        }
    }
    slopes.iter().map(|s| Line::through(center, s.clone())).collect()
}

/// `{a + Σ k_j·b_j : 0 ≤ k_j < n_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapSpec {
    pub a: Number,
    pub steps: Vec<Number>,
    pub lengths: Vec<u64>,
}

impl GapSpec {
    pub fn new(a: Number, steps: Vec<Number>, lengths: Vec<u64>) -> Result<GapSpec> {
        if steps.len() != lengths.len() {
            return Err(Error::invalid("one length per step required"));
        }
        if lengths.iter().any(|&n| n == 0) {
            return Err(Error::invalid("progression lengths must be positive"));
        }
        Ok(GapSpec { a, steps, lengths })
    }

    /// Arithmetic progression `a, a + b, …, a + (n−1)b`.
    pub fn ap(a: i64, b: i64, n: u64) -> GapSpec {
        GapSpec { a: Number::int(a), steps: vec![Number::int(b)], lengths: vec![n] }
    }

    pub fn dimension(&self) -> usize {
        self.steps.len()
    }

    /// `Π n_j`.
    pub fn nominal_size(&self) -> Option<u64> {
        self.lengths.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n))
    }
}

/// Expanded progression and whether it has all `Π n_j` elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapSet {
    pub set: NumberSet,
    pub proper: bool,
}

pub fn gap_set(spec: &GapSpec) -> Result<GapSet> {
    let size = spec.nominal_size().filter(|&n| n <= GAP_SIZE_CAP).ok_or_else(|| {
        Error::limit(format!("progression larger than {GAP_SIZE_CAP} elements"))
    })?;
    let mut values = vec![spec.a.clone()];
    for (b, &n) in spec.steps.iter().zip(&spec.lengths) {
        let mut next = Vec::with_capacity(values.len() * n as usize);
        for v in &values {
            let mut cur = v.clone();
            for _ in 0..n {
                next.push(cur.clone());
                cur = cur.checked_add(b)?;
            }
        }
        values = next;
    }
    let set = NumberSet::new(values)?;
    Ok(GapSet { proper: set.len() as u64 == size, set })
}

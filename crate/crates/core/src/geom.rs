//! Points, lines, Cartesian-product point sets and exact incidence counting.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::NumberSet;
use crate::error::{Error, Result};
use crate::exactnum::{Number, Rat};

/// The lattice `[w] × [h]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GridSpec {
    pub w: u64,
    pub h: u64,
}

impl GridSpec {
    pub fn new(w: u64, h: u64) -> Result<GridSpec> {
        if w == 0 || h == 0 {
            return Err(Error::invalid(format!("grid dimensions must be positive, got {w}x{h}")));
        }
        if w.checked_mul(h).is_none() {
            return Err(Error::invalid("grid too large"));
        }
        Ok(GridSpec { w, h })
    }

    /// Number of points `N = w·h`.
    pub fn n(&self) -> u64 {
        self.w * self.h
    }

    /// `log w / log N`.
    pub fn alpha(&self) -> f64 {
        (self.w as f64).ln() / (self.n() as f64).ln()
    }

    pub fn cbrt_n(&self) -> f64 {
        (self.n() as f64).cbrt()
    }

    pub fn contains(&self, x: i128, y: i128) -> bool {
        1 <= x && x <= self.w as i128 && 1 <= y && y <= self.h as i128
    }

    pub fn product_set(&self) -> ProductSet {
        ProductSet::new(NumberSet::interval(self.w), NumberSet::interval(self.h))
    }
}

/// A point with exact coordinates.
pub type Point = (Number, Number);

/// `A × B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSet {
    xs: NumberSet,
    ys: NumberSet,
    grid: Option<GridSpec>,
}

fn interval_len(s: &NumberSet) -> Option<u64> {
    let ok = s
        .elements()
        .iter()
        .enumerate()
        .all(|(i, e)| e.as_rat().and_then(Rat::to_i64) == Some(i as i64 + 1));
    (ok && !s.is_empty()).then_some(s.len() as u64)
}

impl ProductSet {
    pub fn new(xs: NumberSet, ys: NumberSet) -> ProductSet {
        let grid = match (interval_len(&xs), interval_len(&ys)) {
            (Some(w), Some(h)) => Some(GridSpec { w, h }),
            _ => None,
        };
        ProductSet { xs, ys, grid }
    }

    /// Builds the product from an explicit point list; the points must form
    /// a full Cartesian product.
    pub fn from_points(points: &[Point]) -> Result<ProductSet> {
        let distinct: HashSet<&Point> = points.iter().collect();
        let xs = NumberSet::new(points.iter().map(|p| p.0.clone()).collect())?;
        let ys = NumberSet::new(points.iter().map(|p| p.1.clone()).collect())?;
        if xs.len() * ys.len() != distinct.len() {
            return Err(Error::invalid(format!(
                "{} distinct points do not form a Cartesian product ({} x-values, {} y-values)",
                distinct.len(),
                xs.len(),
                ys.len()
            )));
        }
        Ok(ProductSet::new(xs, ys))
    }

    pub fn xs(&self) -> &NumberSet {
        &self.xs
    }

    pub fn ys(&self) -> &NumberSet {
        &self.ys
    }

    /// The lattice this set equals, if it is `[w] × [h]`.
    pub fn grid(&self) -> Option<GridSpec> {
        self.grid
    }

    pub fn len(&self) -> u64 {
        self.xs.len() as u64 * self.ys.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.xs.contains(&p.0) && self.ys.contains(&p.1)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.xs
            .elements()
            .iter()
            .flat_map(move |x| self.ys.elements().iter().map(move |y| (x.clone(), y.clone())))
    }
}

/// Direction of a line. Non-vertical slopes are rational.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    NonVertical(Rat),
    Vertical,
}

impl Slope {
    pub fn ratio(s: i64, t: i64) -> Result<Slope> {
        Ok(Slope::NonVertical(Rat::new(s, t)?))
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            Slope::NonVertical(r) => Some(r),
            Slope::Vertical => None,
        }
    }

    /// `(sign, s, t)` with `|slope| = s/t` in lowest terms; zero is `(0, 0, 1)`.
    pub fn sign_st(&self) -> Option<(i32, u64, u64)> {
        let r = self.value()?;
        if r.is_zero() {
            return Some((0, 0, 1));
        }
        let (s, t) = r.abs().st_of_u64()?;
        Some((r.signum(), s, t))
    }

    pub fn is_axis_parallel(&self) -> bool {
        match self {
            Slope::Vertical => true,
            Slope::NonVertical(r) => r.is_zero(),
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::NonVertical(r) => r.fmt(f),
            Slope::Vertical => f.write_str("vertical"),
        }
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `y = slope·x + intercept`, or `x = intercept` when vertical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub slope: Slope,
    pub intercept: Number,
}

impl Line {
    pub fn new(slope: Slope, intercept: Number) -> Line {
        Line { slope, intercept }
    }

    pub fn vertical(x: Number) -> Line {
        Line { slope: Slope::Vertical, intercept: x }
    }

    pub fn through(p: &Point, slope: Slope) -> Result<Line> {
        let intercept = match &slope {
            Slope::Vertical => p.0.clone(),
            Slope::NonVertical(m) => p.1.checked_sub(&p.0.mul_rat(m))?,
        };
        Ok(Line { slope, intercept })
    }

    /// `y` at `x` for non-vertical lines.
    pub fn y_at(&self, x: &Number) -> Option<Result<Number>> {
        let m = self.slope.value()?;
        Some(x.mul_rat(m).checked_add(&self.intercept))
    }

    /// Exact membership by substitution. Points from another quadratic field
    /// than the line's intercept are never on it.
    pub fn contains(&self, p: &Point) -> bool {
        match self.y_at(&p.0) {
            None => p.0 == self.intercept,
            Some(Ok(y)) => y == p.1,
            Some(Err(_)) => false,
        }
    }

    /// Image under the reflection `y ↦ h + 1 − y`.
    pub fn mirror(&self, h: u64) -> Line {
        match &self.slope {
            Slope::Vertical => self.clone(),
            Slope::NonVertical(m) => Line {
                slope: Slope::NonVertical(-m),
                intercept: (-&self.intercept).add_rat(&Rat::from(h + 1)),
            },
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.slope {
            Slope::Vertical => write!(f, "V {}", self.intercept),
            Slope::NonVertical(m) => write!(f, "S {m} {}", self.intercept),
        }
    }
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Line {
    type Err = Error;

    fn from_str(s: &str) -> Result<Line> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.as_slice() {
            ["V", c] => Ok(Line::vertical(c.parse()?)),
            ["S", m, c] => Ok(Line::new(Slope::NonVertical(m.parse()?), c.parse()?)),
            _ => Err(Error::parse(format!("expected \"S slope c\" or \"V c\", got {s:?}"))),
        }
    }
}

impl Serialize for Line {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_lines_file(text: &str) -> Result<Vec<Line>> {
    content_lines(text)
        .map(|(i, l)| l.parse().map_err(|e| Error::parse(format!("line {i}: {e}"))))
        .collect()
}

pub fn parse_points_file(text: &str) -> Result<Vec<Point>> {
    content_lines(text)
        .map(|(i, l)| {
            let mut it = l.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(x), Some(y), None) => Ok((x.parse()?, y.parse()?)),
                _ => Err(Error::parse(format!("line {i}: expected \"x y\", got {l:?}"))),
            }
        })
        .collect()
}

pub fn format_lines_file(lines: &[Line]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

pub fn format_points_file(p: &ProductSet) -> String {
    p.points().map(|(x, y)| format!("{x} {y}\n")).collect()
}

/// Tunables shared by the counting and analysis routines.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyzerConfig {
    /// Properness constant: proper means `count ∈ (N^{1/3}/k, k·N^{1/3}]`.
    pub k: u64,
    /// Maximum `|P|·|L|` for brute-force counting.
    pub oracle_cap: u64,
    /// Maximum number of lines for pairwise concurrency search.
    pub pairwise_cap: usize,
    /// Rich slopes carry at least `c·N^{2/3}` proper lines; `None` means one
    /// eighth of the largest proper family.
    pub rich_c: Option<Rat>,
    /// Budget of candidate-center checks in the maximum pencil search.
    pub pencil_work_cap: u64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            k: 4,
            oracle_cap: 100_000_000,
            pairwise_cap: 20_000,
            rich_c: None,
            pencil_work_cap: 2_000_000_000,
        }
    }
}

impl AnalyzerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("properness constant k must be at least 1"));
        }
        if let Some(c) = &self.rich_c {
            if c.signum() <= 0 {
                return Err(Error::invalid("rich-slope constant must be positive"));
            }
        }
        Ok(())
    }
}

/// Brute-force incidence count by substitution.
pub fn incidences_oracle(p: &ProductSet, lines: &[Line], cfg: &AnalyzerConfig) -> Result<u64> {
    let work = p.len().saturating_mul(lines.len() as u64);
    if work > cfg.oracle_cap {
        return Err(Error::limit(format!("oracle work {work} exceeds cap {}", cfg.oracle_cap)));
    }
    let points: Vec<Point> = p.points().collect();
    Ok(lines
        .iter()
        .map(|l| points.iter().filter(|q| l.contains(q)).count() as u64)
        .sum())
}

fn to_i128(r: &Rat) -> Option<(i128, i128)> {
    let (n, d) = r.as_small()?;
    Some((n as i128, d as i128))
}

fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

/// `⌈a / b⌉` for `b > 0`.
fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// Modular inverse of `a` modulo `m > 0`, with `gcd(a, m) = 1`.
fn inv_mod(a: i128, m: i128) -> i128 {
    let e = a.rem_euclid(m).extended_gcd(&m);
    e.x.rem_euclid(m)
}

/// Lattice points of `[w] × [h]` on a non-vertical line with rational
/// slope `p/q` and rational intercept, as `(x₀, y₀, dx, dy, count)`: the
/// first point and the stride. `None` when arithmetic would overflow.
fn grid_progression(g: &GridSpec, m: &Rat, c: &Rat) -> Option<Option<(i128, i128, i128, i128, u64)>> {
    let (p, q) = to_i128(m)?;
    let (u, v) = to_i128(c)?;
    let (w, h) = (g.w as i128, g.h as i128);
    // y = (p·x)/q + u/v is an integer only if v | q.
    if q % v != 0 {
        return Some(None);
    }
    let u = u * (q / v);
    // p·x + u ≡ 0 (mod q)
    let x0 = if q == 1 { 1 } else { ((-u).rem_euclid(q) * inv_mod(p, q)).rem_euclid(q) };
    let x0 = if x0 == 0 { q } else { x0 };
    let y_of = |x: i128| (p * x + u) / q;
    // x = x0 + q·k, y = y(x0) + p·k; k ranges over the box constraints.
    let y0 = y_of(x0);
    let (mut lo, mut hi) = (ceil_div(1 - x0, q), floor_div(w - x0, q));
    match p.signum() {
        0 => {
            if !(1..=h).contains(&y0) {
                return Some(None);
            }
        }
        1 => {
            lo = lo.max(ceil_div(1 - y0, p));
            hi = hi.min(floor_div(h - y0, p));
        }
        _ => {
            lo = lo.max(ceil_div(y0 - h, -p));
            hi = hi.min(floor_div(y0 - 1, -p));
        }
    }
    if lo > hi {
        return Some(None);
    }
    Some(Some((x0 + q * lo, y0 + p * lo, q, p, (hi - lo + 1) as u64)))
}

/// Exact number of points of `[w] × [h]` on `ℓ`, computed arithmetically.
pub fn grid_line_count(g: &GridSpec, line: &Line) -> u64 {
    match &line.slope {
        Slope::Vertical => match line.intercept.as_rat().and_then(Rat::to_i64) {
            Some(x) if g.contains(x as i128, 1) => g.h,
            _ => 0,
        },
        Slope::NonVertical(m) => {
            let Some(c) = line.intercept.as_rat() else { return 0 };
            match grid_progression(g, m, c) {
                Some(res) => res.map_or(0, |r| r.4),
                None => generic_line_count(&g.product_set(), line),
            }
        }
    }
}

/// Points of `P` on `ℓ`, in increasing `x`.
pub fn points_on_line(p: &ProductSet, line: &Line) -> Vec<Point> {
    if let (Some(g), Slope::NonVertical(m), Some(c)) = (p.grid(), &line.slope, line.intercept.as_rat()) {
        if let Some(res) = grid_progression(&g, m, c) {
            let Some((x0, y0, dx, dy, count)) = res else { return Vec::new() };
            return (0..count as i128)
                .map(|k| (Number::int((x0 + dx * k) as i64), Number::int((y0 + dy * k) as i64)))
                .collect();
        }
    }
    match &line.slope {
        Slope::Vertical => {
            if p.xs().contains(&line.intercept) {
                p.ys().elements().iter().map(|y| (line.intercept.clone(), y.clone())).collect()
            } else {
                Vec::new()
            }
        }
        Slope::NonVertical(_) => p
            .xs()
            .elements()
            .iter()
            .filter_map(|x| match line.y_at(x) {
                Some(Ok(y)) if p.ys().contains(&y) => Some((x.clone(), y)),
                _ => None,
            })
            .collect(),
    }
}

/// Membership-based count for arbitrary product sets: walks whichever
/// factor is smaller and tests the other by binary search.
fn generic_line_count(p: &ProductSet, line: &Line) -> u64 {
    match &line.slope {
        Slope::Vertical => {
            if p.xs().contains(&line.intercept) {
                p.ys().len() as u64
            } else {
                0
            }
        }
        Slope::NonVertical(m) if m.is_zero() => {
            if p.ys().contains(&line.intercept) {
                p.xs().len() as u64
            } else {
                0
            }
        }
        Slope::NonVertical(m) => {
            if p.xs().len() <= p.ys().len() {
                p.xs()
                    .elements()
                    .iter()
                    .filter(|x| matches!(line.y_at(x), Some(Ok(y)) if p.ys().contains(&y)))
                    .count() as u64
            } else {
                let inv = m.recip().expect("nonzero slope");
                p.ys()
                    .elements()
                    .iter()
                    .filter(|y| match y.checked_sub(&line.intercept) {
                        Ok(d) => p.xs().contains(&d.mul_rat(&inv)),
                        Err(_) => false,
                    })
                    .count() as u64
            }
        }
    }
}

/// Incidences of one line with `P`, using lattice arithmetic when possible.
pub fn line_count(p: &ProductSet, line: &Line) -> u64 {
    match p.grid() {
        Some(g) => grid_line_count(&g, line),
        None => generic_line_count(p, line),
    }
}

/// Per-line incidence counts, in input order.
pub fn line_counts(p: &ProductSet, lines: &[Line]) -> Vec<u64> {
    lines.par_iter().map(|l| line_count(p, l)).collect()
}

/// Total incidences via [`line_counts`].
pub fn incidences_fast(p: &ProductSet, lines: &[Line]) -> u64 {
    line_counts(p, lines).iter().sum()
}

/// Number of lines per incidence count.
pub fn count_histogram(counts: &[u64]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for &c in counts {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Properness {
    Underfull,
    Proper,
    Overfull,
}

/// Classifies a line with `count` points against `(N^{1/3}/k, k·N^{1/3}]`,
/// comparing cubes exactly.
pub fn properness(count: u64, n_points: u64, k: u64) -> Properness {
    let (c, n, k) = (count as u128, n_points as u128, k as u128);
    let ck = c * k;
    if ck * ck * ck <= n {
        Properness::Underfull
    } else if c * c * c > k * k * k * n {
        Properness::Overfull
    } else {
        Properness::Proper
    }
}

/// Indices of the lines in each properness class.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProperPartition {
    pub proper: Vec<usize>,
    pub underfull: Vec<usize>,
    pub overfull: Vec<usize>,
}

pub fn classify_counts(counts: &[u64], n_points: u64, k: u64) -> ProperPartition {
    let mut out = ProperPartition::default();
    for (i, &c) in counts.iter().enumerate() {
        match properness(c, n_points, k) {
            Properness::Proper => out.proper.push(i),
            Properness::Underfull => out.underfull.push(i),
            Properness::Overfull => out.overfull.push(i),
        }
    }
    out
}

pub fn classify_proper(p: &ProductSet, lines: &[Line], cfg: &AnalyzerConfig) -> Result<ProperPartition> {
    cfg.validate()?;
    Ok(classify_counts(&line_counts(p, lines), p.len(), cfg.k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Steepness {
    Steep,
    NonSteep,
}

/// Steep iff `s/t > h/w`; the boundary counts as non-steep.
pub fn steepness(g: &GridSpec, s: u64, t: u64) -> Steepness {
    if s as u128 * g.w as u128 > g.h as u128 * t as u128 {
        Steepness::Steep
    } else {
        Steepness::NonSteep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: u64, h: u64) -> GridSpec {
        GridSpec::new(w, h).unwrap()
    }

    fn pt(x: i64, y: i64) -> Point {
        (Number::int(x), Number::int(y))
    }

    fn through(x: i64, y: i64, s: i64, t: i64) -> Line {
        Line::through(&pt(x, y), Slope::ratio(s, t).unwrap()).unwrap()
    }

    fn brute(g: &GridSpec, l: &Line) -> u64 {
        g.product_set().points().filter(|p| l.contains(p)).count() as u64
    }

    #[test]
    fn oracle_examples() {
        let cfg = AnalyzerConfig::default();
        let p = grid(2, 2).product_set();
        assert_eq!(incidences_oracle(&p, &[], &cfg).unwrap(), 0);
        assert_eq!(incidences_oracle(&p, &[through(1, 1, 1, 1)], &cfg).unwrap(), 2);
        assert_eq!(incidences_fast(&p, &[through(1, 1, 1, 1)]), 2);

        let p = grid(2, 8).product_set();
        let mut lines = Vec::new();
        for a in 1..=2 {
            for b in 1..=4 {
                lines.push(Line::new(Slope::ratio(a, 1).unwrap(), Number::int(b)));
            }
        }
        assert_eq!(incidences_oracle(&p, &lines, &cfg).unwrap(), 16);
        assert_eq!(incidences_fast(&p, &lines), 16);

        let tiny = AnalyzerConfig { oracle_cap: 10, ..AnalyzerConfig::default() };
        assert!(matches!(incidences_oracle(&p, &lines, &tiny), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn small_grid_counts() {
        let g = grid(10, 11);
        assert_eq!(grid_line_count(&g, &through(1, 1, 1, 3)), 4);
        assert_eq!(grid_line_count(&g, &through(1, 1, 1, 1)), 10);
        let l = through(1, 1, 2, 1);
        assert_eq!(l.intercept, Number::int(-1));
        assert_eq!(grid_line_count(&g, &l), 6);
        assert_eq!(brute(&g, &l), 6);
        assert_eq!(incidences_fast(&g.product_set(), &[through(1, 1, 1, 3)]), 4);
    }

    #[test]
    fn line_count_matches_brute_force_on_small_grids() {
        for (w, h) in [(7, 5), (12, 12), (3, 20)] {
            let g = grid(w, h);
            for s in -6i64..=6 {
                for t in 1..=6i64 {
                    for ci in -40..=40i64 {
                        for cd in [1, 2, 3, 6] {
                            let l = Line::new(Slope::ratio(s, t).unwrap(), Number::Rat(Rat::new(ci, cd).unwrap()));
                            assert_eq!(grid_line_count(&g, &l), brute(&g, &l), "{l:?} on {w}x{h}");
                            assert_eq!(points_on_line(&g.product_set(), &l).len() as u64, brute(&g, &l));
                        }
                    }
                }
            }
            for x in -1..=(w as i64 + 1) {
                let l = Line::vertical(Number::int(x));
                assert_eq!(grid_line_count(&g, &l), brute(&g, &l));
            }
        }
    }

    #[test]
    fn irrational_intercepts_miss_the_grid() {
        let g = grid(5, 5);
        let l = Line::new(Slope::ratio(1, 1).unwrap(), "0+1*sqrt(2)".parse().unwrap());
        assert_eq!(grid_line_count(&g, &l), 0);
        assert_eq!(brute(&g, &l), 0);
    }

    #[test]
    fn properness_examples() {
        // N = 1024, N^{1/3} ≈ 10.08, k = 2 → (5.04, 20.16]
        assert_eq!(properness(12, 1024, 2), Properness::Proper);
        assert_eq!(properness(5, 1024, 2), Properness::Underfull);
        assert_eq!(properness(6, 1024, 2), Properness::Proper);
        assert_eq!(properness(20, 1024, 2), Properness::Proper);
        assert_eq!(properness(21, 1024, 2), Properness::Overfull);
        assert_eq!(properness(0, 1024, 2), Properness::Underfull);
        // N = 8: N^{1/3} = 2, k = 1 → (2, 2] is empty
        assert_eq!(properness(2, 8, 1), Properness::Underfull);
    }

    #[test]
    fn axis_parallel_lines_never_proper() {
        let g = grid(16, 64);
        let p = g.product_set();
        let lines: Vec<Line> = (1..=16)
            .map(|x| Line::vertical(Number::int(x)))
            .chain((1..=64).map(|y| Line::new(Slope::ratio(0, 1).unwrap(), Number::int(y))))
            .collect();
        let part = classify_proper(&p, &lines, &AnalyzerConfig { k: 1, ..Default::default() }).unwrap();
        assert!(part.proper.is_empty());
        let empty = Line::new(Slope::ratio(1, 1).unwrap(), Number::int(1000));
        let part = classify_proper(&p, &[empty], &AnalyzerConfig::default()).unwrap();
        assert_eq!(part.underfull, vec![0]);
    }

    #[test]
    fn steepness_examples() {
        let g = grid(10, 11);
        assert_eq!(steepness(&g, 1, 3), Steepness::NonSteep);
        assert_eq!(steepness(&g, 2, 1), Steepness::Steep);
        assert_eq!(steepness(&grid(8, 8), 1, 1), Steepness::NonSteep);
    }

    #[test]
    fn file_round_trips() {
        let lines = vec![through(1, 1, 2, 3), Line::vertical(Number::int(4))];
        let text = format_lines_file(&lines);
        assert_eq!(text, "S 2/3 1/3\nV 4\n");
        assert_eq!(parse_lines_file(&text).unwrap(), lines);
        let p = grid(2, 3).product_set();
        let pts = parse_points_file(&format_points_file(&p)).unwrap();
        assert_eq!(ProductSet::from_points(&pts).unwrap(), p);
        assert!(ProductSet::from_points(&[pt(1, 1), pt(2, 2)]).is_err());
        assert!(parse_lines_file("Q 1").is_err());
    }

    #[test]
    fn mirror_preserves_counts() {
        let g = grid(9, 13);
        for s in 1..=4 {
            for t in 1..=4 {
                for c in -20..=20 {
                    let l = Line::new(Slope::ratio(s, t).unwrap(), Number::int(c));
                    assert_eq!(grid_line_count(&g, &l), grid_line_count(&g, &l.mirror(g.h)));
                }
            }
        }
    }
}

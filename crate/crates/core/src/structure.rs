//! Structural analysis of line sets over lattices: parallel and concurrent
//! families, the extremal slope window and intercept sets, and the
//! multiplicative-energy injection behind pencils.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::energy::{add_energy, mult_energy, mult_energy_bipartite, NumberSet};
use crate::error::{Error, Result};
use crate::exactnum::{Number, Rat};
use crate::geom::{
    classify_counts, line_counts, points_on_line, AnalyzerConfig, GridSpec, Line, Point, ProductSet, Slope,
};
use crate::numtheory::coprime_pairs;

/// Lines sharing one slope.
#[derive(Clone, Debug, Serialize)]
pub struct ParallelFamily {
    pub slope: Slope,
    pub lines: Vec<Line>,
    pub sizes: Vec<u64>,
    pub intercept_set: NumberSet,
}

impl ParallelFamily {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Lines through one common point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConcurrentFamily {
    pub center: Point,
    pub lines: Vec<Line>,
}

/// Window constants for the two slope regimes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeWindow {
    pub k_t: Rat,
    pub k_s: Rat,
}

impl SlopeWindow {
    pub fn new(k_t: Rat, k_s: Rat) -> Result<SlopeWindow> {
        if k_t < Rat::one() || k_s < Rat::one() {
            return Err(Error::invalid(format!("window constants must be at least 1, got {k_t}, {k_s}")));
        }
        Ok(SlopeWindow { k_t, k_s })
    }
}

impl Default for SlopeWindow {
    fn default() -> Self {
        SlopeWindow { k_t: Rat::from(2), k_s: Rat::from(2) }
    }
}

/// Partitions `lines` by exact slope. Families are sorted by size
/// descending, then slope ascending; lines inside a family by intercept.
pub fn group_parallel(lines: &[Line], counts: &[u64]) -> Vec<ParallelFamily> {
    assert_eq!(lines.len(), counts.len(), "one count per line");
    let mut by_slope: BTreeMap<&Slope, Vec<(&Line, u64)>> = BTreeMap::new();
    for (l, &c) in lines.iter().zip(counts) {
        by_slope.entry(&l.slope).or_default().push((l, c));
    }
    let mut out: Vec<ParallelFamily> = by_slope
        .into_iter()
        .map(|(slope, mut members)| {
            members.sort_by(|a, b| a.0.intercept.cmp(&b.0.intercept));
            members.dedup_by(|a, b| a.0 == b.0);
            let intercept_set =
                NumberSet::new(members.iter().map(|(l, _)| l.intercept.clone()).collect()).expect("one field per family");
            ParallelFamily {
                slope: slope.clone(),
                lines: members.iter().map(|(l, _)| (*l).clone()).collect(),
                sizes: members.iter().map(|(_, c)| *c).collect(),
                intercept_set,
            }
        })
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.slope.cmp(&b.slope)));
    out
}

/// Exact intersection point, `None` for parallel lines.
pub fn intersection(a: &Line, b: &Line) -> Result<Option<Point>> {
    match (&a.slope, &b.slope) {
        (Slope::Vertical, Slope::Vertical) => Ok(None),
        (Slope::Vertical, Slope::NonVertical(_)) => intersection(b, a),
        (Slope::NonVertical(m), Slope::Vertical) => {
            let x = b.intercept.clone();
            let y = x.mul_rat(m).checked_add(&a.intercept)?;
            Ok(Some((x, y)))
        }
        (Slope::NonVertical(m1), Slope::NonVertical(m2)) => {
            if m1 == m2 {
                return Ok(None);
            }
            let dm = (m1 - m2).recip()?;
            let x = b.intercept.checked_sub(&a.intercept)?.mul_rat(&dm);
            let y = x.mul_rat(m1).checked_add(&a.intercept)?;
            Ok(Some((x, y)))
        }
    }
}

/// Maximal pencils of at least `min_size` lines, made disjoint greedily
/// (largest first; ties by center). Quadratic in `|L|`.
pub fn find_concurrent(lines: &[Line], min_size: usize, cap: usize) -> Result<Vec<ConcurrentFamily>> {
    if lines.len() > cap {
        return Err(Error::limit(format!("pairwise search limited to {cap} lines, got {}", lines.len())));
    }
    let min_size = min_size.max(2);
    let mut uniq: Vec<Line> = lines.to_vec();
    uniq.sort();
    uniq.dedup();
    // A pencil is discovered in full from its lowest-index line.
    let mut found: HashMap<Point, Vec<usize>> = HashMap::new();
    for i in 0..uniq.len() {
        let mut local: HashMap<Point, Vec<usize>> = HashMap::new();
        for j in i + 1..uniq.len() {
            if let Some(p) = intersection(&uniq[i], &uniq[j])? {
                local.entry(p).or_default().push(j);
            }
        }
        for (p, mut members) in local {
            if members.len() + 1 >= min_size && !found.contains_key(&p) {
                members.insert(0, i);
                found.insert(p, members);
            }
        }
    }
    let mut pencils: Vec<(Point, Vec<usize>)> = found.into_iter().collect();
    pencils.sort_by(|a, b| a.0.cmp(&b.0));
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        pencils.iter().enumerate().map(|(i, (_, m))| (m.len(), Reverse(i))).collect();
    let mut used = vec![false; uniq.len()];
    let mut out = Vec::new();
    while let Some((size, Reverse(i))) = heap.pop() {
        let live: Vec<usize> = pencils[i].1.iter().copied().filter(|&l| !used[l]).collect();
        if live.len() < size {
            if live.len() >= min_size {
                heap.push((live.len(), Reverse(i)));
            }
            continue;
        }
        for &l in &live {
            used[l] = true;
        }
        let center = pencils[i].0.clone();
        let members: Vec<Line> = live.iter().map(|&l| uniq[l].clone()).collect();
        debug_assert!(members.iter().all(|l| l.contains(&center)));
        out.push(ConcurrentFamily { center, lines: members });
    }
    Ok(out)
}

/// Intercept of the line with `slope` through `p`.
fn intercept_through(slope: &Slope, p: &Point) -> Option<Number> {
    match slope {
        Slope::Vertical => Some(p.0.clone()),
        Slope::NonVertical(m) => p.1.checked_sub(&p.0.mul_rat(m)).ok(),
    }
}

/// A largest pencil in `lines`.
///
/// Lattice centers are found by enumerating incidences. A pencil of more
/// than `M₀` lines (the best lattice degree) takes at most one line per
/// slope class, so by pigeonhole it has a line in one of the `D − M₀`
/// smallest classes; only those lines are intersected with the rest.
pub fn max_pencil(p: &ProductSet, lines: &[Line], cfg: &AnalyzerConfig) -> Result<Option<ConcurrentFamily>> {
    let mut grouped: BTreeMap<&Slope, Vec<&Number>> = BTreeMap::new();
    for l in lines {
        grouped.entry(&l.slope).or_default().push(&l.intercept);
    }
    // Sorted intercepts keep the candidate order independent of hashing.
    let classes: Vec<(&Slope, HashSet<&Number>, Vec<&Number>)> = grouped
        .into_iter()
        .map(|(slope, mut v)| {
            v.sort();
            v.dedup();
            (slope, v.iter().copied().collect(), v)
        })
        .collect();
    let d = classes.len();
    if d < 2 {
        return Ok(None);
    }

    let (mut best, mut best_center) = lattice_degree(p, lines);
    let m0 = best;
    if m0 < d {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by_key(|&i| (classes[i].1.len(), i));
        let first = &order[..d - m0];
        let class_lines: Vec<Vec<Line>> = classes
            .iter()
            .map(|(slope, _, v)| v.iter().map(|c| Line::new((*slope).clone(), (*c).clone())).collect())
            .collect();
        let q1: u64 = first.iter().map(|&c| class_lines[c].len() as u64).sum();
        let work = q1.saturating_mul(lines.len() as u64);
        if work > cfg.pencil_work_cap {
            return Err(Error::limit(format!(
                "pencil search needs about {work} intersections, cap is {}",
                cfg.pencil_work_cap
            )));
        }
        // Pencils through an earlier class of `first` were counted in full
        // when that class was processed, so later classes skip it.
        let mut rank = vec![usize::MAX; d];
        for (pos, &c) in first.iter().enumerate() {
            rank[c] = pos;
        }
        let rest_of = |pos: usize| -> Vec<usize> { (0..d).filter(|&c| rank[c] > pos).collect() };
        let int_classes: Option<Vec<Vec<IntLine>>> =
            class_lines.iter().map(|v| v.iter().map(IntLine::of).collect()).collect();
        let found: Vec<Option<(usize, Point)>> = match &int_classes {
            Some(ic) => first
                .par_iter()
                .enumerate()
                .map(|(pos, &c1)| {
                    let rest: Vec<&IntLine> = rest_of(pos).into_iter().flat_map(|c| ic[c].iter()).collect();
                    let top = ic[c1]
                        .iter()
                        .enumerate()
                        .map(|(i, l1)| densest(&rest, |l2| l1.meet(l2)).map(|(k, m)| ((i, k), m)))
                        .fold(None, keep_larger);
                    Ok(top.map(|((i, k), m)| (m + 1, ic[c1][i].point(k))))
                })
                .collect::<Result<_>>()?,
            None => first
                .par_iter()
                .enumerate()
                .map(|(pos, &c1)| {
                    let rest: Vec<&Line> = rest_of(pos).into_iter().flat_map(|c| class_lines[c].iter()).collect();
                    let mut top = None;
                    for l1 in &class_lines[c1] {
                        let mut meets = Vec::with_capacity(rest.len());
                        for l2 in &rest {
                            meets.push(intersection(l1, l2)?);
                        }
                        top = keep_larger(top, densest(&meets, |q| q.clone()));
                    }
                    Ok(top.map(|(q, m)| (m + 1, q)))
                })
                .collect::<Result<_>>()?,
        };
        // Earliest class wins ties, matching a sequential scan.
        for (size, q) in found.into_iter().flatten() {
            if size > best {
                best = size;
                best_center = Some(q);
            }
        }
    }
    if best < 2 {
        return Ok(None);
    }
    let center = best_center.expect("center recorded with degree");
    let mut members: Vec<Line> = classes
        .iter()
        .filter_map(|(slope, set, _)| {
            let c = intercept_through(slope, &center)?;
            set.contains(&c).then(|| Line::new((*slope).clone(), c))
        })
        .collect();
    members.sort();
    Ok(Some(ConcurrentFamily { center, lines: members }))
}

/// Most frequent meeting point of one line with `others`, smallest on ties.
fn densest<T, K: std::hash::Hash + Ord + Clone>(others: &[T], meet: impl Fn(&T) -> Option<K>) -> Option<(K, usize)> {
    let mut through: FxHashMap<K, usize> = FxHashMap::default();
    for o in others {
        if let Some(k) = meet(o) {
            *through.entry(k).or_insert(0) += 1;
        }
    }
    through.into_iter().max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
}

fn keep_larger<K: Ord>(acc: Option<(K, usize)>, next: Option<(K, usize)>) -> Option<(K, usize)> {
    match (acc, next) {
        (Some(a), Some(b)) if b.1 > a.1 => Some(b),
        (None, b) => b,
        (a, _) => a,
    }
}

/// `a·x + b·y = c` with coefficients small enough that Cramer's rule stays
/// inside `i128`.
#[derive(Clone, Copy)]
struct IntLine {
    a: i128,
    b: i128,
    c: i128,
}

impl IntLine {
    const LIMIT: i128 = 1 << 60;

    fn of(l: &Line) -> Option<IntLine> {
        let (u, v) = l.intercept.as_rat()?.as_small()?;
        let (u, v) = (u as i128, v as i128);
        let line = match &l.slope {
            Slope::Vertical => IntLine { a: v, b: 0, c: u },
            Slope::NonVertical(m) => {
                let (p, q) = m.as_small()?;
                let (p, q) = (p as i128, q as i128);
                let den = q / q.gcd(&v) * v;
                IntLine { a: -(den / q) * p, b: den, c: den / v * u }
            }
        };
        [line.a, line.b, line.c].iter().all(|x| x.abs() < Self::LIMIT).then_some(line)
    }

    /// Position of the crossing with `o` along `self`: its reduced `x`
    /// coordinate, or `y` when `self` is vertical.
    fn meet(&self, o: &IntLine) -> Option<(i128, i128)> {
        let det = self.a * o.b - o.a * self.b;
        if det == 0 {
            return None;
        }
        let num = if self.b != 0 { self.c * o.b - o.c * self.b } else { self.a * o.c - o.a * self.c };
        let g = match (u64::try_from(num.unsigned_abs()), u64::try_from(det.unsigned_abs())) {
            (Ok(n), Ok(d)) => n.gcd(&d) as i128,
            _ => num.gcd(&det),
        };
        let g = g * det.signum();
        Some((num / g, det / g))
    }

    /// The point of `self` at position `k`.
    fn point(&self, k: (i128, i128)) -> Point {
        let r = |n: i128, d: i128| Rat::new(n, d).expect("nonzero denominator");
        let t = r(k.0, k.1);
        let (a, b, c) = (Rat::from_bigint(self.a.into()), Rat::from_bigint(self.b.into()), Rat::from_bigint(self.c.into()));
        if self.b != 0 {
            let y = (&c - &(&a * &t)).checked_div(&b).expect("b nonzero");
            (Number::from(t), Number::from(y))
        } else {
            let x = (&c - &(&b * &t)).checked_div(&a).expect("a nonzero");
            (Number::from(x), Number::from(t))
        }
    }
}

/// Largest number of distinct lines through a single point of `P`, with the
/// smallest such point.
fn lattice_degree(p: &ProductSet, lines: &[Line]) -> (usize, Option<Point>) {
    let mut uniq: Vec<&Line> = lines.iter().collect();
    uniq.sort();
    uniq.dedup();
    if let Some(g) = p.grid() {
        let mut deg = vec![0u32; g.n() as usize];
        for l in uniq {
            for (x, y) in points_on_line(p, l) {
                let (x, y) = (x.as_rat().and_then(Rat::to_i64).unwrap(), y.as_rat().and_then(Rat::to_i64).unwrap());
                deg[((x - 1) as u64 * g.h + (y - 1) as u64) as usize] += 1;
            }
        }
        let (idx, &m) = deg.iter().enumerate().max_by_key(|(i, &v)| (v, Reverse(*i))).expect("nonempty grid");
        if m == 0 {
            return (0, None);
        }
        let (x, y) = (idx as u64 / g.h + 1, idx as u64 % g.h + 1);
        return (m as usize, Some((Number::int(x as i64), Number::int(y as i64))));
    }
    let mut deg: HashMap<Point, usize> = HashMap::new();
    for l in uniq {
        for q in points_on_line(p, l) {
            *deg.entry(q).or_insert(0) += 1;
        }
    }
    deg.into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .map_or((0, None), |(q, m)| (m, Some(q)))
}

fn alpha_in_range(g: &GridSpec) -> Result<()> {
    // 1/3 < alpha <=> w^3 > N <=> w^2 > h; alpha <= 1/2 <=> w <= h.
    if (g.w as u128).pow(2) <= g.h as u128 || g.w > g.h {
        return Err(Error::invalid(format!(
            "grid {}x{} has alpha {:.4}, outside (1/3, 1/2]",
            g.w,
            g.h,
            g.alpha()
        )));
    }
    Ok(())
}

/// Integers `v ≥ 1` with `(v·k)³·N ≥ a³` and `v³·N ≤ (k·a)³`, i.e. `v`
/// within a factor `k` of `a/N^{1/3}`.
fn window_range(a: u64, n: u64, k: &Rat) -> (u64, u64) {
    let n_r = Rat::from(n);
    let a3 = Rat::from(a).pow(3);
    let low_ok = |v: u64| &(&Rat::from(v) * k).pow(3) * &n_r >= a3;
    let high_ok = |v: u64| &Rat::from(v).pow(3) * &n_r <= &k.pow(3) * &a3;
    let center = a as f64 / (n as f64).cbrt();
    let kf = k.to_f64();
    let mut lo = ((center / kf).floor() as u64).max(1);
    while lo > 1 && low_ok(lo - 1) {
        lo -= 1;
    }
    while !low_ok(lo) {
        lo += 1;
    }
    let mut hi = ((center * kf).ceil() as u64).max(1);
    while high_ok(hi + 1) {
        hi += 1;
    }
    while hi > 0 && !high_ok(hi) {
        hi -= 1;
    }
    (lo, hi)
}

/// Positive slopes `(s, t)` of the extremal window, sorted by `(t, s)`.
///
/// Non-steep part: `t` within a factor `k_t` of `w/N^{1/3}` and
/// `s ≤ t·h/w`. Steep part: `s` within a factor `k_s` of `h/N^{1/3}` and
/// `t < s·w/h`.
pub fn lattice_slope_set(g: &GridSpec, win: &SlopeWindow) -> Result<Vec<(u64, u64)>> {
    alpha_in_range(g)?;
    let n = g.n();
    let (t_lo, t_hi) = window_range(g.w, n, &win.k_t);
    let mut out = coprime_pairs(t_lo, t_hi, |t| Rat::new(t as i64 * g.h as i64, g.w as i64).expect("w > 0"));
    let (s_lo, s_hi) = window_range(g.h, n, &win.k_s);
    let steep = coprime_pairs(s_lo, s_hi, |s| {
        // largest t with t·h < s·w
        let sw = s as i64 * g.w as i64;
        Rat::from((sw - 1) / g.h as i64)
    });
    out.extend(steep.into_iter().map(|(t, s)| (s, t)));
    out.sort_by_key(|&(s, t)| (t, s));
    out.dedup();
    Ok(out)
}

/// Largest integer `v ∈ [0, len]` with `len − v ≥ c·N^{1/3}/k`.
fn shortened(len: u64, c: u64, n: u64, k: u64) -> u64 {
    let big = |x: u64| BigInt::from(x);
    let ok = |v: u64| {
        let gap = big((len - v) * k);
        &gap * &gap * &gap >= big(c).pow(3) * big(n)
    };
    let est = len as f64 - c as f64 * (n as f64).cbrt() / k as f64;
    let mut v = est.floor().clamp(0.0, len as f64) as u64;
    while v < len && ok(v + 1) {
        v += 1;
    }
    while v > 0 && !ok(v) {
        v -= 1;
    }
    if ok(v) {
        v
    } else {
        0
    }
}

/// The two index boxes feeding [`lattice_intercept_set`]: lines through
/// `(i, j)` with `i ∈ [t], j ∈ [J]` or `i ∈ [I], j ∈ [s]`. Returns `(J, I)`.
pub fn lattice_boxes(g: &GridSpec, s: u64, t: u64, k: u64) -> (u64, u64) {
    (shortened(g.h, s, g.n(), k), shortened(g.w, t, g.n(), k))
}

/// Intercepts of slope `s/t` lines through the boxes of
/// [`lattice_boxes`], as numerators `u = j·t − i·s` over `t`, sorted.
pub fn lattice_intercept_numerators(g: &GridSpec, s: u64, t: u64, k: u64) -> Vec<i64> {
    let (jmax, imax) = lattice_boxes(g, s, t, k);
    let (s, t) = (s as i64, t as i64);
    let mut out = Vec::new();
    for i in 1..=t {
        for j in 1..=jmax as i64 {
            out.push(j * t - i * s);
        }
    }
    for i in 1..=imax as i64 {
        for j in 1..=s {
            out.push(j * t - i * s);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `{ j − i·s/t : i ∈ [t], j ∈ [h − s·N^{1/3}/k] } ∪ { j − i·s/t : i ∈ [w − t·N^{1/3}/k], j ∈ [s] }`.
pub fn lattice_intercept_set(g: &GridSpec, s: u64, t: u64, k: u64) -> Result<NumberSet> {
    if s == 0 || t == 0 {
        return Err(Error::invalid("slope must be positive"));
    }
    let st = Rat::new(s as i64, t as i64)?;
    if st.st_of_u64() != Some((s, t)) {
        return Err(Error::invalid(format!("{s}/{t} is not in lowest terms")));
    }
    Ok(NumberSet::from_rats(
        lattice_intercept_numerators(g, s, t, k).into_iter().map(|u| Rat::new(u, t as i64).expect("t > 0")),
    ))
}

/// Per-family summary row of a [`StructureReport`].
#[derive(Clone, Debug, Serialize)]
pub struct FamilySummary {
    pub slope: Slope,
    pub size: usize,
    pub min_count: u64,
    pub max_count: u64,
    pub in_slope_set: bool,
    pub intercept_coverage: Option<f64>,
    pub intercepts_within_set: Option<bool>,
    pub intercept_add_energy: u64,
}

/// Output of [`verify_lattice_structure`].
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub n_points: u64,
    pub n_lines: usize,
    pub incidences: u64,
    pub k: u64,
    pub n_proper: usize,
    pub n_families: usize,
    pub rich_threshold: u64,
    pub rich_slopes: usize,
    pub max_parallel: usize,
    pub median_family_size: usize,
    pub max_concurrent: usize,
    pub max_concurrent_center: Option<Point>,
    pub beta_hat: f64,
    pub gamma_hat: f64,
    /// Fraction of distinct proper-line slopes inside the slope window.
    pub slope_set_match: Option<f64>,
    pub slope_set_size: Option<usize>,
    /// Mean over in-window families of `|family intercepts| / |intercept set|`.
    pub intercept_coverage: Option<f64>,
    /// Fraction of in-window proper lines whose intercept lies in the
    /// intercept set of their slope.
    pub intercepts_within_set: Option<f64>,
    pub slope_mult_energy: u64,
    pub intercept_add_energy_histogram: Vec<u64>,
    pub families: Vec<FamilySummary>,
}

/// Smallest family size counted as rich.
fn rich_threshold(sizes: &[usize], n: u64, c: Option<&Rat>) -> u64 {
    match c {
        // size ≥ c·N^{2/3}  ⇔  size³ ≥ c³·N²
        Some(c) => {
            let target = &c.pow(3) * &Rat::from(n).pow(2);
            let mut v = (c.to_f64() * (n as f64).powf(2.0 / 3.0)).floor().max(0.0) as u64;
            while v > 0 && Rat::from(v - 1).pow(3) >= target {
                v -= 1;
            }
            while Rat::from(v).pow(3) < target {
                v += 1;
            }
            v
        }
        // 8·size ≥ max
        None => (sizes.iter().copied().max().unwrap_or(0) as u64).div_ceil(8),
    }
}

fn log_ratio(size: usize, n: u64) -> f64 {
    if size <= 1 || n <= 1 {
        0.0
    } else {
        ((size as f64).ln() / (n as f64).ln()).clamp(0.0, 1.0)
    }
}

/// Numerator of a rational intercept over the slope denominator `t`, when
/// that is exact.
fn numerator_over(intercept: &Number, t: u64) -> Option<i64> {
    let r = intercept.as_rat()?;
    let u = r * &Rat::from(t);
    if u.is_integer() {
        u.to_i64()
    } else {
        None
    }
}

/// Full structural report of `lines` over the grid `g`.
pub fn verify_lattice_structure(
    g: &GridSpec,
    lines: &[Line],
    cfg: &AnalyzerConfig,
    win: &SlopeWindow,
) -> Result<StructureReport> {
    cfg.validate()?;
    let p = g.product_set();
    let counts = line_counts(&p, lines);
    let incidences = counts.iter().sum();
    let part = classify_counts(&counts, g.n(), cfg.k);
    let proper: Vec<Line> = part.proper.iter().map(|&i| lines[i].clone()).collect();
    let proper_counts: Vec<u64> = part.proper.iter().map(|&i| counts[i]).collect();
    let families = group_parallel(&proper, &proper_counts);
    let sizes: Vec<usize> = families.iter().map(ParallelFamily::len).collect();
    let threshold = rich_threshold(&sizes, g.n(), cfg.rich_c.as_ref());
    let rich_slopes = sizes.iter().filter(|&&s| s as u64 >= threshold.max(1)).count();
    let max_parallel = sizes.first().copied().unwrap_or(0);
    let median_family_size = {
        let mut v = sizes.clone();
        v.sort_unstable();
        if v.is_empty() {
            0
        } else {
            v[(v.len() - 1) / 2]
        }
    };

    let pencil = max_pencil(&p, &proper, cfg)?;
    let max_concurrent = pencil.as_ref().map_or(if proper.is_empty() { 0 } else { 1 }, |f| f.lines.len());

    let window: Option<HashSet<(u64, u64)>> =
        lattice_slope_set(g, win).ok().map(|v| v.into_iter().collect());

    let summaries: Vec<FamilySummary> = families
        .par_iter()
        .map(|f| {
            let sign_st = f.slope.sign_st();
            let in_set = match (&window, sign_st) {
                (Some(w), Some((sign, s, t))) => sign != 0 && w.contains(&(s, t)),
                _ => false,
            };
            let (coverage, within) = if in_set {
                let (sign, s, t) = sign_st.expect("in-window slopes are rational");
                let base = lattice_intercept_numerators(g, s, t, cfg.k);
                let allowed: HashSet<i64> = if sign > 0 {
                    base.into_iter().collect()
                } else {
                    // y ↦ h + 1 − y sends intercept u/t to ((h+1)t − u)/t.
                    let top = (g.h as i64 + 1) * t as i64;
                    base.into_iter().map(|u| top - u).collect()
                };
                let hits = f
                    .lines
                    .iter()
                    .filter(|l| numerator_over(&l.intercept, t).is_some_and(|u| allowed.contains(&u)))
                    .count();
                let cov = if allowed.is_empty() { 0.0 } else { hits as f64 / allowed.len() as f64 };
                (Some(cov.min(1.0)), Some(hits == f.lines.len()))
            } else {
                (None, None)
            };
            FamilySummary {
                slope: f.slope.clone(),
                size: f.len(),
                min_count: f.sizes.iter().copied().min().unwrap_or(0),
                max_count: f.sizes.iter().copied().max().unwrap_or(0),
                in_slope_set: in_set,
                intercept_coverage: coverage,
                intercepts_within_set: within,
                intercept_add_energy: add_energy(&f.intercept_set),
            }
        })
        .collect();

    let (slope_set_match, intercept_coverage, intercepts_within_set) = if window.is_some() && !summaries.is_empty() {
        let inside: Vec<&FamilySummary> = summaries.iter().filter(|f| f.in_slope_set).collect();
        let matched = inside.len() as f64 / summaries.len() as f64;
        let (cov, within) = if inside.is_empty() {
            (None, None)
        } else {
            let cov = inside.iter().filter_map(|f| f.intercept_coverage).sum::<f64>() / inside.len() as f64;
            let lines_inside: usize = inside.iter().map(|f| f.size).sum();
            let lines_ok: usize = inside.iter().filter(|f| f.intercepts_within_set == Some(true)).map(|f| f.size).sum();
            (Some(cov), Some(lines_ok as f64 / lines_inside as f64))
        };
        (Some(matched), cov, within)
    } else {
        (None, None, None)
    };

    let slopes = NumberSet::from_rats(families.iter().filter_map(|f| f.slope.value().cloned()));
    Ok(StructureReport {
        n_points: g.n(),
        n_lines: lines.len(),
        incidences,
        k: cfg.k,
        n_proper: proper.len(),
        n_families: families.len(),
        rich_threshold: threshold,
        rich_slopes,
        max_parallel,
        median_family_size,
        max_concurrent,
        max_concurrent_center: pencil.map(|f| f.center),
        beta_hat: log_ratio(max_parallel, g.n()),
        gamma_hat: log_ratio(max_concurrent, g.n()),
        slope_set_match,
        slope_set_size: window.as_ref().map(|w| 2 * w.len()),
        intercept_coverage,
        intercepts_within_set,
        slope_mult_energy: mult_energy(&slopes),
        intercept_add_energy_histogram: summaries.iter().map(|f| f.intercept_add_energy).collect(),
        families: summaries,
    })
}

/// Both sides of the pencil injection `E^×(A′, B′) ≥ Σ_ℓ m_ℓ²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnergyInjection {
    pub lhs: u64,
    pub rhs: u64,
    pub pass: bool,
}

/// Translates the pencil center to the origin, drops zero coordinates and
/// axis-parallel lines, and compares `E^×(A′, B′)` with `Σ_ℓ m_ℓ²` where
/// `m_ℓ` counts the points of `A′ × B′` on `ℓ`.
pub fn concurrency_energy_check(p: &ProductSet, center: &Point, lines: &[Line]) -> Result<EnergyInjection> {
    for l in lines {
        if !l.contains(center) {
            return Err(Error::invalid(format!("line {l} does not pass through the center")));
        }
    }
    let shift = |s: &NumberSet, c: &Number| -> Result<NumberSet> {
        let v: Vec<Number> = s
            .elements()
            .iter()
            .map(|x| x.checked_sub(c))
            .filter(|x| !matches!(x, Ok(v) if v.is_zero()))
            .collect::<Result<_>>()?;
        NumberSet::new(v)
    };
    let a = shift(p.xs(), &center.0)?;
    let b = shift(p.ys(), &center.1)?;
    let mut slopes: Vec<&Rat> = lines.iter().filter(|l| !l.slope.is_axis_parallel()).filter_map(|l| l.slope.value()).collect();
    slopes.sort();
    slopes.dedup();
    let mut rhs = 0u64;
    for m in slopes {
        let on: u64 = a.elements().iter().filter(|x| b.contains(&x.mul_rat(m))).count() as u64;
        rhs += on * on;
    }
    let lhs = mult_energy_bipartite(&a, &b)?;
    Ok(EnergyInjection { lhs, rhs, pass: lhs >= rhs })
}

/// `E^×` of the family slopes and `E^+` of each family's intercepts.
pub fn family_energy_profile(families: &[ParallelFamily]) -> (u64, Vec<u64>) {
    let slopes = NumberSet::from_rats(families.iter().filter_map(|f| f.slope.value().cloned()));
    let energies = families.par_iter().map(|f| add_energy(&f.intercept_set)).collect();
    (mult_energy(&slopes), energies)
}

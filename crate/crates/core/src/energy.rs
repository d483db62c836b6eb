//! Additive and multiplicative energies, ratio representation counts, and
//! the integer normalization of real sets.
//!
//! Energies are computed by grouping pair sums (or products) under exact
//! keys and summing squared multiplicities. Rational inputs are first scaled
//! to a common denominator so keys are machine integers; anything else falls
//! back to hashing [`Number`] values directly.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{Number, QuadExt, Rat};

/// Largest set handled by the quadruple-enumeration oracles.
pub const ORACLE_SET_CAP: usize = 60;

/// Largest `m` accepted by [`r2_mm`].
pub const R2_CAP: u64 = 200;

/// Largest key span for which sums are tallied in a dense array.
const DENSE_SPAN_CAP: i64 = 1 << 26;

/// A finite set of exact numbers, sorted and deduplicated.
///
/// All irrational elements share one radicand. `shift` is recorded when the
/// set was built as `[n] + x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumberSet {
    elements: Vec<Number>,
    shift: Option<Number>,
}

impl NumberSet {
    pub fn new(mut elements: Vec<Number>) -> Result<NumberSet> {
        let mut radicand = None;
        for e in &elements {
            if let Some(d) = e.radicand() {
                match radicand {
                    Some(r) if r != d => {
                        return Err(Error::invalid(format!(
                            "set mixes radicands sqrt({r}) and sqrt({d})"
                        )))
                    }
                    _ => radicand = Some(d),
                }
            }
        }
        elements.sort();
        elements.dedup();
        Ok(NumberSet { elements, shift: None })
    }

    pub fn empty() -> NumberSet {
        NumberSet { elements: Vec::new(), shift: None }
    }

    pub fn from_ints(values: impl IntoIterator<Item = i64>) -> NumberSet {
        NumberSet::new(values.into_iter().map(Number::int).collect()).expect("integers are rational")
    }

    pub fn from_rats(values: impl IntoIterator<Item = Rat>) -> NumberSet {
        NumberSet::new(values.into_iter().map(Number::Rat).collect()).expect("rationals share no radicand")
    }

    /// `[n] = {1, …, n}`.
    pub fn interval(n: u64) -> NumberSet {
        NumberSet::from_ints(1..=n as i64)
    }

    /// `[n] + x`.
    pub fn shifted_interval(n: u64, x: &Number) -> NumberSet {
        let elements = (1..=n as i64).map(|p| x.add_rat(&Rat::from(p))).collect();
        NumberSet { elements, shift: Some(x.clone()) }
    }

    /// One serialized [`Number`] per non-empty line; `#` starts a comment.
    pub fn parse_lines(text: &str) -> Result<NumberSet> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            out.push(line.parse::<Number>().map_err(|e| Error::parse(format!("line {}: {e}", i + 1)))?);
        }
        NumberSet::new(out)
    }

    pub fn elements(&self) -> &[Number] {
        &self.elements
    }

    pub fn shift(&self) -> Option<&Number> {
        self.shift.as_ref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &Number) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Number::zero())
    }

    pub fn radicand(&self) -> Option<u64> {
        self.elements.iter().find_map(Number::radicand)
    }

    /// Integer numerators over the common denominator, when every element is
    /// a rational whose scaled value fits in an `i64`.
    fn scaled_ints(&self) -> Option<Vec<i64>> {
        let mut lcm = 1i64;
        for e in &self.elements {
            let (_, d) = e.as_rat()?.as_small()?;
            lcm = lcm.checked_mul(d / lcm.gcd(&d))?;
        }
        self.elements
            .iter()
            .map(|e| {
                let (n, d) = e.as_rat()?.as_small()?;
                n.checked_mul(lcm / d)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Hashed,
}

/// Energies of a set, or of a pair of sets in bipartite form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnergyReport {
    pub set_sizes: (usize, usize),
    pub additive: u64,
    pub multiplicative: u64,
    pub sumset_size: usize,
    pub method: Method,
}

fn square_sum<K: Eq + Hash>(keys: impl Iterator<Item = K>) -> u64 {
    let mut counts: HashMap<K, u64> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    counts.values().map(|c| c * c).sum()
}

fn dense_square_sum(xs: &[i64], ys: &[i64]) -> Option<u64> {
    let lo = xs.iter().min()?.checked_add(*ys.iter().min()?)?;
    let hi = xs.iter().max()?.checked_add(*ys.iter().max()?)?;
    let span = hi.checked_sub(lo)?;
    if span > DENSE_SPAN_CAP {
        return None;
    }
    let mut counts = vec![0u32; span as usize + 1];
    for &x in xs {
        for &y in ys {
            counts[(x + y - lo) as usize] += 1;
        }
    }
    Some(counts.iter().map(|&c| c as u64 * c as u64).sum())
}

fn mixed_fields(a: &NumberSet, b: &NumberSet) -> Result<()> {
    match (a.radicand(), b.radicand()) {
        (Some(x), Some(y)) if x != y => {
            Err(Error::invalid(format!("sets live in different fields sqrt({x}) and sqrt({y})")))
        }
        _ => Ok(()),
    }
}

/// `|{(a,b,a′,b′) ∈ A×B×A×B : a+b = a′+b′}|`.
pub fn add_energy_bipartite(a: &NumberSet, b: &NumberSet) -> Result<u64> {
    mixed_fields(a, b)?;
    // Sums are only comparable under one scale, so scale the union.
    let mut union = a.elements.clone();
    union.extend(b.elements.iter().cloned());
    let joint = NumberSet { elements: union, shift: None };
    if let Some(ints) = joint.scaled_ints() {
        let (xs, ys) = ints.split_at(a.len());
        if let Some(e) = dense_square_sum(xs, ys) {
            return Ok(e);
        }
        let keys = xs.iter().flat_map(|&x| ys.iter().map(move |&y| x as i128 + y as i128));
        return Ok(square_sum(keys));
    }
    let keys = a.elements.iter().flat_map(|x| b.elements.iter().map(move |y| x + y));
    Ok(square_sum(keys))
}

/// `E^+(A)`.
pub fn add_energy(a: &NumberSet) -> u64 {
    add_energy_bipartite(a, a).expect("a set shares its own field")
}

/// `|{(a,b,a′,b′) ∈ A×B×A×B : a·b = a′·b′}|`, zeros counted literally.
pub fn mult_energy_bipartite(a: &NumberSet, b: &NumberSet) -> Result<u64> {
    mixed_fields(a, b)?;
    // Scaling either factor by a nonzero constant preserves the relation.
    if let (Some(xs), Some(ys)) = (a.scaled_ints(), b.scaled_ints()) {
        let keys = xs.iter().flat_map(|&x| ys.iter().map(move |&y| x as i128 * y as i128));
        return Ok(square_sum(keys));
    }
    let keys = a.elements.iter().flat_map(|x| b.elements.iter().map(move |y| x * y));
    Ok(square_sum(keys))
}

/// `E^×(A)`.
pub fn mult_energy(a: &NumberSet) -> u64 {
    mult_energy_bipartite(a, a).expect("a set shares its own field")
}

fn check_oracle(sets: &[&NumberSet]) -> Result<()> {
    for s in sets {
        if s.len() > ORACLE_SET_CAP {
            return Err(Error::limit(format!(
                "oracle limited to sets of size {ORACLE_SET_CAP}, got {}",
                s.len()
            )));
        }
    }
    Ok(())
}

fn quadruple_count(a: &NumberSet, b: &NumberSet, op: impl Fn(&Number, &Number) -> Result<Number>) -> Result<u64> {
    check_oracle(&[a, b])?;
    let mut vals = Vec::with_capacity(a.len() * b.len());
    for x in &a.elements {
        for y in &b.elements {
            vals.push(op(x, y)?);
        }
    }
    let mut count = 0u64;
    for u in &vals {
        for v in &vals {
            if u == v {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Quadruple-enumeration `E^+(A, B)`.
pub fn add_energy_oracle(a: &NumberSet, b: &NumberSet) -> Result<u64> {
    quadruple_count(a, b, |x, y| x.checked_add(y))
}

/// Quadruple-enumeration `E^×(A, B)`.
pub fn mult_energy_oracle(a: &NumberSet, b: &NumberSet) -> Result<u64> {
    quadruple_count(a, b, |x, y| x.checked_mul(y))
}

/// `A + B`.
pub fn sumset_bipartite(a: &NumberSet, b: &NumberSet) -> Result<NumberSet> {
    mixed_fields(a, b)?;
    let sums = a.elements.iter().flat_map(|x| b.elements.iter().map(move |y| x + y)).collect();
    NumberSet::new(sums)
}

/// `A + A`.
pub fn sumset(a: &NumberSet) -> NumberSet {
    sumset_bipartite(a, a).expect("a set shares its own field")
}

/// Energy report for `A` alone, or for the pair `(A, B)`.
pub fn energy_report(a: &NumberSet, b: Option<&NumberSet>, oracle: bool) -> Result<EnergyReport> {
    let b = b.unwrap_or(a);
    let (additive, multiplicative) = if oracle {
        (add_energy_oracle(a, b)?, mult_energy_oracle(a, b)?)
    } else {
        (add_energy_bipartite(a, b)?, mult_energy_bipartite(a, b)?)
    };
    Ok(EnergyReport {
        set_sizes: (a.len(), b.len()),
        additive,
        multiplicative,
        sumset_size: sumset_bipartite(a, b)?.len(),
        method: if oracle { Method::Oracle } else { Method::Hashed },
    })
}

fn positive_ratio(k: &Rat) -> Result<(BigInt, BigInt)> {
    if k.signum() <= 0 {
        return Err(Error::invalid(format!("ratio must be positive, got {k}")));
    }
    k.st_of()
}

/// `|{(x, y) ∈ [m]² : x/y = k}| = ⌊m / max(s, t)⌋` for `k = s/t` in lowest terms.
pub fn r_mm(m: u64, k: &Rat) -> Result<u64> {
    if m == 0 {
        return Err(Error::invalid("m must be positive"));
    }
    let (s, t) = positive_ratio(k)?;
    let top = s.max(t);
    Ok((BigInt::from(m) / top).to_u64().expect("quotient at most m"))
}

/// Pair enumeration for [`r_mm`].
pub fn r_mm_brute(m: u64, k: &Rat) -> Result<u64> {
    let (s, t) = positive_ratio(k)?;
    let mut count = 0;
    for x in 1..=m {
        for y in 1..=m {
            // x/y = s/t  ⇔  x·t = y·s
            if BigInt::from(x) * &t == BigInt::from(y) * &s {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `|{(x, y, z, w) ∈ [m]⁴ : xy/(zw) = k}|` from the multiset of products.
pub fn r2_mm(m: u64, k: &Rat) -> Result<u64> {
    if m == 0 {
        return Err(Error::invalid("m must be positive"));
    }
    if m > R2_CAP {
        return Err(Error::limit(format!("r2 limited to m <= {R2_CAP}, got {m}")));
    }
    let (s, t) = positive_ratio(k)?;
    let top = m * m;
    let (Some(s), Some(t)) = (s.to_u64(), t.to_u64()) else {
        return Ok(0);
    };
    if s.max(t) > top {
        return Ok(0);
    }
    let mut counts = vec![0u64; top as usize + 1];
    for x in 1..=m {
        for y in 1..=m {
            counts[(x * y) as usize] += 1;
        }
    }
    // xy = s·j and zw = t·j for some j.
    let jmax = top / s.max(t);
    Ok((1..=jmax).map(|j| counts[(s * j) as usize] * counts[(t * j) as usize]).sum())
}

fn reject_zero(a: &NumberSet) -> Result<()> {
    if a.contains_zero() {
        return Err(Error::invalid("set must not contain 0"));
    }
    Ok(())
}

/// `E^×(A, [n] + x)` by product hashing.
pub fn shifted_mult_energy(a: &NumberSet, n: u64, x: &Number) -> Result<u64> {
    reject_zero(a)?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    mult_energy_bipartite(a, &NumberSet::shifted_interval(n, x))
}

/// `E^×(A, [n] + x) = Σ_{(a₁,a₂) ∈ A²} r_{x,n}(a₂/a₁)` for irrational `x`.
pub fn shifted_mult_energy_by_ratios(a: &NumberSet, n: u64, x: &QuadExt) -> Result<u64> {
    reject_zero(a)?;
    let mut total = 0;
    for a1 in &a.elements {
        for a2 in &a.elements {
            total += r_xn(x, n, &a2.checked_div(a1)?)?;
        }
    }
    Ok(total)
}

fn irrational(x: &QuadExt) -> Result<()> {
    if x.is_rational() {
        return Err(Error::invalid(format!("shift {x} is rational")));
    }
    Ok(())
}

/// `|{(p, q) ∈ [n]² : y = (p + x)/(q + x)}|` for irrational `x`.
///
/// Writing `p = y·q + (y − 1)·x` and matching the `√d` coefficients pins
/// down `q`, so each `y ≠ 1` has at most one representation.
pub fn r_xn(x: &QuadExt, n: u64, y: &Number) -> Result<u64> {
    irrational(x)?;
    if *y == Number::one() {
        return Ok(n);
    }
    let (u, v) = match y {
        Number::Rat(_) => return Ok(0),
        Number::Quad(q) if q.d() != x.d() => return Ok(0),
        Number::Quad(q) => (q.a().clone(), q.b().clone()),
    };
    // v·q + (u − 1)·b + v·a = 0
    let q = -&(&(&(&u - &Rat::one()) * x.b()) + &(&v * x.a())) / v.clone();
    if !q.is_integer() || q.signum() <= 0 || q > Rat::from(n) {
        return Ok(0);
    }
    let x_num = Number::Quad(x.clone());
    let p = y.checked_mul(&x_num.add_rat(&q))?.checked_sub(&x_num)?;
    match p {
        Number::Rat(p) if p.is_integer() && p.signum() > 0 && p <= Rat::from(n) => Ok(1),
        _ => Ok(0),
    }
}

/// Pair enumeration for [`r_xn`].
pub fn r_xn_brute(x: &QuadExt, n: u64, y: &Number) -> Result<u64> {
    irrational(x)?;
    let x = Number::Quad(x.clone());
    let mut count = 0;
    for p in 1..=n as i64 {
        for q in 1..=n as i64 {
            let r = x.add_rat(&Rat::from(p)).checked_div(&x.add_rat(&Rat::from(q)))?;
            if r == *y {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Replaces `A` by a set of nonzero integers of the same size whose energy
/// against `[n]` is at least that of `A`.
///
/// Elements are grouped into classes of positive rational multiples. Class
/// `j` (in order of first appearance) is divided by its smallest-magnitude
/// member and multiplied by `m^{10(j−1)}`, then everything is multiplied by
/// the common denominator. `m` is large enough that the scaled classes
/// occupy disjoint ranges.
pub fn normalize_to_integers(a: &NumberSet, n: u64) -> Result<NumberSet> {
    reject_zero(a)?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    // (representative, members) per class; the representative is replaced
    // by the smallest-magnitude member once grouping is done.
    let mut classes: Vec<Vec<&Number>> = Vec::new();
    'outer: for x in &a.elements {
        for class in classes.iter_mut() {
            if let Number::Rat(r) = x.checked_div(class[0])? {
                if r.signum() > 0 {
                    class.push(x);
                    continue 'outer;
                }
            }
        }
        classes.push(vec![x]);
    }
    let mut scaled_classes = Vec::with_capacity(classes.len());
    let mut spread = Rat::one();
    for class in &classes {
        let rep = class.iter().min_by(|p, q| p.abs().cmp(&q.abs())).expect("nonempty class");
        let ratios: Vec<Rat> = class
            .iter()
            .map(|x| match x.checked_div(rep) {
                Ok(Number::Rat(r)) => Ok(r),
                _ => unreachable!("class members are rational multiples"),
            })
            .collect::<Result<_>>()?;
        let top = ratios.iter().max().expect("nonempty class").clone();
        spread = spread.max(top);
        scaled_classes.push(ratios);
    }
    let max_abs = a.elements.iter().map(Number::abs).max().expect("nonempty set").ceil();
    let m = BigInt::from(10).max(max_abs).max(spread.floor() + 1);
    let step = Rat::from_bigint(num_traits::pow(m, 10));
    let mut factor = Rat::one();
    let mut c = Vec::with_capacity(a.len());
    for ratios in scaled_classes {
        c.extend(ratios.into_iter().map(|r| &r * &factor));
        factor = &factor * &step;
    }
    let den = c.iter().fold(BigInt::one(), |acc, r| acc.lcm(&r.denom()));
    let den = Rat::from_bigint(den);
    let b: Vec<Number> = c.into_iter().map(|r| Number::Rat(&r * &den)).collect();
    let out = NumberSet::new(b)?;
    debug_assert_eq!(out.len(), a.len());
    debug_assert!(out.elements.iter().all(|x| x.as_rat().is_some_and(|r| r.is_integer() && !r.is_zero())));
    Ok(out)
}

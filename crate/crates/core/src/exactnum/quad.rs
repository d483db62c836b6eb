//! Elements `a + b·√d` of a real quadratic extension of the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::Rat;
use crate::error::{Error, Result};

/// `a + b·√d` with `d` a squarefree integer greater than one.
///
/// Equality is componentwise. Because `d` is not a perfect square, `b ≠ 0`
/// means the value is irrational, so componentwise equality coincides with
/// numeric equality inside one extension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rat,
    b: Rat,
    d: u64,
}

/// Checks that `d` is squarefree and not a perfect square.
pub fn validate_radicand(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid(format!("radicand must be a squarefree integer > 1, got {d}")));
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        if d % (p * p) == 0 {
            return Err(Error::invalid(format!("radicand {d} is not squarefree")));
        }
        p += 1;
    }
    Ok(())
}

impl QuadExt {
    pub fn new(a: Rat, b: Rat, d: u64) -> Result<QuadExt> {
        validate_radicand(d)?;
        Ok(QuadExt { a, b, d })
    }

    /// `√d` itself.
    pub fn sqrt(d: u64) -> Result<QuadExt> {
        QuadExt::new(Rat::zero(), Rat::one(), d)
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn same_field(&self, other: &QuadExt) -> Result<()> {
        if self.d != other.d {
            return Err(Error::invalid(format!(
                "mixed radicands sqrt({}) and sqrt({})",
                self.d, other.d
            )));
        }
        Ok(())
    }

    fn raw(a: Rat, b: Rat, d: u64) -> QuadExt {
        QuadExt { a, b, d }
    }

    pub fn add(&self, o: &QuadExt) -> Result<QuadExt> {
        self.same_field(o)?;
        Ok(QuadExt::raw(&self.a + &o.a, &self.b + &o.b, self.d))
    }

    pub fn sub(&self, o: &QuadExt) -> Result<QuadExt> {
        self.same_field(o)?;
        Ok(QuadExt::raw(&self.a - &o.a, &self.b - &o.b, self.d))
    }

    pub fn mul(&self, o: &QuadExt) -> Result<QuadExt> {
        self.same_field(o)?;
        let d = Rat::from(self.d);
        let a = &(&self.a * &o.a) + &(&(&self.b * &o.b) * &d);
        let b = &(&self.a * &o.b) + &(&self.b * &o.a);
        Ok(QuadExt::raw(a, b, self.d))
    }

    pub fn neg(&self) -> QuadExt {
        QuadExt::raw(-&self.a, -&self.b, self.d)
    }

    pub fn conj(&self) -> QuadExt {
        QuadExt::raw(self.a.clone(), -&self.b, self.d)
    }

    /// `a² − d·b²`; zero only for the zero element.
    pub fn norm(&self) -> Rat {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Rat::from(self.d))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn recip(&self) -> Result<QuadExt> {
        if self.is_zero() {
            return Err(Error::invalid("division by zero"));
        }
        let n = self.norm();
        let c = self.conj();
        Ok(QuadExt::raw(&c.a / &n, &c.b / &n, self.d))
    }

    pub fn div(&self, o: &QuadExt) -> Result<QuadExt> {
        self.same_field(o)?;
        self.mul(&o.recip()?)
    }

    pub fn scale(&self, k: &Rat) -> QuadExt {
        QuadExt::raw(&self.a * k, &self.b * k, self.d)
    }

    pub fn add_rat(&self, k: &Rat) -> QuadExt {
        QuadExt::raw(&self.a + k, self.b.clone(), self.d)
    }

    /// Exact sign of `a + b√d`.
    pub fn signum(&self) -> i32 {
        quad_sign(&self.a, &self.b, self.d)
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * (self.d as f64).sqrt()
    }
}

/// Exact sign of `p + q·√d` for a non-square `d`.
pub(crate) fn quad_sign(p: &Rat, q: &Rat, d: u64) -> i32 {
    let sp = p.signum();
    let sq = q.signum();
    if sq == 0 {
        return sp;
    }
    if sp == 0 || sp == sq {
        return sq;
    }
    // Opposite signs: compare p² with q²·d.
    let lhs = p * p;
    let rhs = &(q * q) * &Rat::from(d);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => 0,
    }
}

/// Exact product of two elements of the same extension.
pub fn quad_mul(x: &QuadExt, y: &QuadExt) -> Result<QuadExt> {
    x.mul(y)
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*sqrt({})", self.a, self.b, self.d)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    /// Parses the canonical `a+b*sqrt(d)` form.
    fn from_str(s: &str) -> Result<QuadExt> {
        let s = s.trim();
        let bad = || Error::parse(format!("expected a+b*sqrt(d), got {s:?}"));
        let body = s.strip_suffix(')').ok_or_else(bad)?;
        let (lhs, d) = body.split_once("*sqrt(").ok_or_else(bad)?;
        let (a, b) = lhs.split_once('+').ok_or_else(bad)?;
        let d: u64 = d.parse().map_err(|_| bad())?;
        QuadExt::new(a.parse()?, b.parse()?, d)
    }
}

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;

use super::quad::quad_sign;
use super::{QuadExt, Rat};
use crate::error::{Error, Result};

/// A rational or an irrational element of `Q(√d)`.
///
/// Quadratic values with a zero `√d` coefficient are always stored as
/// `Number::Rat`, so structural equality and hashing agree with numeric
/// equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Number {
    Rat(Rat),
    Quad(QuadExt),
}

impl Number {
    pub fn zero() -> Number {
        Number::Rat(Rat::zero())
    }

    pub fn one() -> Number {
        Number::Rat(Rat::one())
    }

    pub fn int(v: i64) -> Number {
        Number::Rat(Rat::from_int(v))
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Number::Rat(r) => Some(r),
            Number::Quad(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Number::Rat(_))
    }

    /// The radicand for irrational values.
    pub fn radicand(&self) -> Option<u64> {
        match self {
            Number::Rat(_) => None,
            Number::Quad(q) => Some(q.d()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Number::Rat(r) if r.is_zero())
    }

    pub fn signum(&self) -> i32 {
        match self {
            Number::Rat(r) => r.signum(),
            Number::Quad(q) => q.signum(),
        }
    }

    pub fn abs(&self) -> Number {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Rat(r) => r.to_f64(),
            Number::Quad(q) => q.to_f64(),
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        match self {
            Number::Rat(r) => r.floor(),
            Number::Quad(_) => {
                // Start from the float estimate and correct it exactly.
                let mut f = BigInt::from(self.to_f64().floor() as i128);
                while Number::Rat(Rat::from_bigint(f.clone())) > *self {
                    f -= 1;
                }
                while Number::Rat(Rat::from_bigint(&f + 1)) <= *self {
                    f += 1;
                }
                f
            }
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    fn to_quad(&self, d: u64) -> QuadExt {
        match self {
            Number::Rat(r) => QuadExt::new(r.clone(), Rat::zero(), d).expect("validated radicand"),
            Number::Quad(q) => q.clone(),
        }
    }

    fn common_radicand(&self, other: &Number) -> Result<Option<u64>> {
        match (self.radicand(), other.radicand()) {
            (Some(a), Some(b)) if a != b => {
                Err(Error::invalid(format!("mixed radicands sqrt({a}) and sqrt({b})")))
            }
            (a, b) => Ok(a.or(b)),
        }
    }

    fn lift(
        &self,
        other: &Number,
        rat: impl Fn(&Rat, &Rat) -> Result<Rat>,
        quad: impl Fn(&QuadExt, &QuadExt) -> Result<QuadExt>,
    ) -> Result<Number> {
        match (self, other) {
            (Number::Rat(a), Number::Rat(b)) => Ok(Number::Rat(rat(a, b)?)),
            _ => {
                let d = self.common_radicand(other)?.expect("one operand is irrational");
                Ok(Number::from(quad(&self.to_quad(d), &other.to_quad(d))?))
            }
        }
    }

    pub fn checked_add(&self, o: &Number) -> Result<Number> {
        self.lift(o, |a, b| Ok(a + b), |a, b| a.add(b))
    }

    pub fn checked_sub(&self, o: &Number) -> Result<Number> {
        self.lift(o, |a, b| Ok(a - b), |a, b| a.sub(b))
    }

    pub fn checked_mul(&self, o: &Number) -> Result<Number> {
        self.lift(o, |a, b| Ok(a * b), |a, b| a.mul(b))
    }

    pub fn checked_div(&self, o: &Number) -> Result<Number> {
        self.lift(o, |a, b| a.checked_div(b), |a, b| a.div(b))
    }

    pub fn mul_rat(&self, k: &Rat) -> Number {
        match self {
            Number::Rat(r) => Number::Rat(r * k),
            Number::Quad(q) => Number::from(q.scale(k)),
        }
    }

    pub fn add_rat(&self, k: &Rat) -> Number {
        match self {
            Number::Rat(r) => Number::Rat(r + k),
            Number::Quad(q) => Number::Quad(q.add_rat(k)),
        }
    }
}

impl From<QuadExt> for Number {
    fn from(q: QuadExt) -> Self {
        if q.is_rational() {
            Number::Rat(q.a().clone())
        } else {
            Number::Quad(q)
        }
    }
}

impl From<Rat> for Number {
    fn from(r: Rat) -> Self {
        Number::Rat(r)
    }
}

impl From<i64> for Number {
    fn from(v: i64) -> Self {
        Number::int(v)
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        let sign = match (self, other) {
            (Number::Rat(a), Number::Rat(b)) => return a.cmp(b),
            (Number::Quad(x), Number::Rat(r)) => quad_sign(&(x.a() - r), x.b(), x.d()),
            (Number::Rat(r), Number::Quad(y)) => quad_sign(&(r - y.a()), &-y.b(), y.d()),
            (Number::Quad(x), Number::Quad(y)) if x.d() == y.d() => {
                quad_sign(&(x.a() - y.a()), &(x.b() - y.b()), x.d())
            }
            (Number::Quad(x), Number::Quad(y)) => mixed_sign(x, y),
        };
        sign.cmp(&0)
    }
}

/// Sign of `x − y` for elements of two different quadratic fields.
fn mixed_sign(x: &QuadExt, y: &QuadExt) -> i32 {
    // x − y = X − Y with X = (ax − ay) + bx√dx and Y = by√dy.
    let p = x.a() - y.a();
    let sx = quad_sign(&p, x.b(), x.d());
    let sy = y.b().signum();
    if sx != sy {
        return (sx - sy).signum();
    }
    // Same sign: compare squares. X² = p² + bx²dx + 2·p·bx·√dx.
    let dx = Rat::from(x.d());
    let x2_rat = &(&p * &p) + &(&(x.b() * x.b()) * &dx);
    let x2_irr = &(&p * x.b()) * &Rat::from(2);
    let y2 = &(y.b() * y.b()) * &Rat::from(y.d());
    let s = quad_sign(&(&x2_rat - &y2), &x2_irr, x.d());
    s * sx
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rat(r) => r.fmt(f),
            Number::Quad(q) => q.fmt(f),
        }
    }
}

impl fmt::Debug for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Number {
    type Err = Error;

    fn from_str(s: &str) -> Result<Number> {
        if s.contains("sqrt(") {
            Ok(Number::from(s.parse::<QuadExt>()?))
        } else {
            Ok(Number::Rat(s.parse()?))
        }
    }
}

impl serde::Serialize for Number {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Number {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Neg for &Number {
    type Output = Number;
    fn neg(self) -> Number {
        match self {
            Number::Rat(r) => Number::Rat(-r),
            Number::Quad(q) => Number::Quad(q.neg()),
        }
    }
}

impl Neg for Number {
    type Output = Number;
    fn neg(self) -> Number {
        -&self
    }
}

// Operator forms panic on mixed radicands or division by zero; callers that
// cannot rule those out use the `checked_*` methods.
macro_rules! number_op {
    ($($tr:ident $m:ident $checked:ident),*) => {$(
        impl $tr for &Number {
            type Output = Number;
            fn $m(self, rhs: &Number) -> Number {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr for Number {
            type Output = Number;
            fn $m(self, rhs: Number) -> Number { (&self).$m(&rhs) }
        }
    )*};
}
number_op!(Add add checked_add, Sub sub checked_sub, Mul mul checked_mul, Div div checked_div);

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Number {
        s.parse().unwrap()
    }

    #[test]
    fn quad_collapses_to_rat() {
        let x = n("1+1*sqrt(2)");
        let y = n("1+-1*sqrt(2)");
        assert_eq!(&x * &y, Number::int(-1));
        assert_eq!(&x - &x, Number::zero());
        assert!((&x * &y).is_rational());
    }

    #[test]
    fn ordering_is_exact() {
        let mut v = vec![n("0+1*sqrt(2)"), n("3/2"), n("7/5"), n("1+0*sqrt(2)"), n("0+1*sqrt(3)"), n("-1+1*sqrt(5)")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        // 1 < 1.236 (√5−1) < 1.4 < 1.414 (√2) < 1.5 < 1.732 (√3)
        assert_eq!(s, ["1", "-1+1*sqrt(5)", "7/5", "0+1*sqrt(2)", "3/2", "0+1*sqrt(3)"]);
    }

    #[test]
    fn mixed_radicands_rejected() {
        assert!(n("0+1*sqrt(2)").checked_add(&n("0+1*sqrt(3)")).is_err());
        assert!(n("0+1*sqrt(2)").checked_add(&n("5")).is_ok());
    }

    #[test]
    fn floor_of_irrationals() {
        assert_eq!(n("0+1*sqrt(2)").floor(), 1.into());
        assert_eq!(n("0+-1*sqrt(2)").floor(), (-2).into());
        assert_eq!(n("0+-1*sqrt(2)").ceil(), (-1).into());
        assert_eq!(n("100+1000*sqrt(2)").floor(), 1514.into());
    }
}

//! Exact number types: canonical rationals, quadratic-extension elements,
//! and the tagged [`Number`] used for coordinates, slopes and intercepts.
//!
//! Nothing in this module (or anything built on it) decides equality or
//! counts through floating point; `to_f64` exists for reporting only.

mod number;
mod quad;
mod rat;

pub use number::Number;
pub use quad::{quad_mul, validate_radicand, QuadExt};
pub use rat::{canonical, st_of, Rat};

#[cfg(test)]
mod props {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    proptest! {
        #[test]
        fn canonical_is_scale_invariant(p in -10_000i64..10_000, q in 1i64..10_000, k in -50i64..50) {
            prop_assume!(k != 0);
            prop_assert_eq!(canonical(p, q).unwrap(), canonical(p * k, q * k).unwrap());
        }

        #[test]
        fn st_of_reconstructs(s in 1i64..100_000, t in 1i64..100_000) {
            let k = canonical(s, t).unwrap();
            let (a, b) = st_of(&k).unwrap();
            prop_assert_eq!(a.gcd(&b), BigInt::from(1));
            prop_assert_eq!(Rat::new(a, b).unwrap(), k);
        }

        // Inline i64 arithmetic must agree with the big-rational reference,
        // including near the overflow boundary.
        #[test]
        fn small_path_matches_bigrational(
            a in any::<i64>(), b in 1i64..i64::MAX, c in any::<i64>(), d in 1i64..i64::MAX,
        ) {
            let x = Rat::new(a, b).unwrap();
            let y = Rat::new(c, d).unwrap();
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            prop_assert_eq!(Rat::from_big((&bx * &by).clone()), &x * &y);
        }

        #[test]
        fn rat_text_round_trip(p in any::<i64>(), q in 1i64..i64::MAX) {
            let x = Rat::new(p, q).unwrap();
            let s = x.to_string();
            prop_assert_eq!(s.parse::<Rat>().unwrap(), x.clone());
            prop_assert_eq!(s.parse::<Rat>().unwrap().to_string(), s);
        }

        #[test]
        fn quad_matches_float(
            a in -50i64..50, b in -50i64..50, c in -50i64..50, e in -50i64..50,
            den in 1i64..9, d in prop::sample::select(vec![2u64, 3, 5, 6, 7]),
        ) {
            let x = QuadExt::new(Rat::new(a, den).unwrap(), Rat::from(b), d).unwrap();
            let y = QuadExt::new(Rat::from(c), Rat::new(e, den).unwrap(), d).unwrap();
            let (fx, fy) = (x.to_f64(), y.to_f64());
            prop_assert!((x.add(&y).unwrap().to_f64() - (fx + fy)).abs() < 1e-9);
            prop_assert!((x.mul(&y).unwrap().to_f64() - fx * fy).abs() < 1e-9 * (1.0 + (fx * fy).abs()));
            if !y.is_zero() {
                let q = x.div(&y).unwrap().to_f64();
                prop_assert!((q - fx / fy).abs() < 1e-9 * (1.0 + (fx / fy).abs()));
            }
            let (nx, ny) = (Number::from(x.clone()), Number::from(y.clone()));
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(nx.cmp(&ny), fx.partial_cmp(&fy).unwrap());
            }
            prop_assert_eq!(nx.to_string().parse::<Number>().unwrap(), nx);
        }
    }
}

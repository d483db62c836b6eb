//! Totient machinery: sieved tables of `φ`, `ω`, `μ`, point queries by
//! factorization, the restricted totient `φ_m(n)`, summatory functions, and
//! coprime pair enumeration for slope windows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Rat;

/// Largest `n` for which the exact rational `Σ φ(j)/j` is computed.
pub const EXACT_RATIO_SUM_CAP: u64 = 100_000;

/// Largest sieve this module builds on demand.
pub const SIEVE_CAP: u64 = 200_000_000;

/// Sieved arithmetic functions on `1..=limit` (index 0 unused).
#[derive(Clone, Debug)]
pub struct TotientTable {
    limit: usize,
    phi: Vec<u32>,
    omega: Vec<u8>,
    mobius: Vec<i8>,
}

impl TotientTable {
    /// Linear sieve over `1..=limit`.
    pub fn new(limit: u64) -> Result<TotientTable> {
        if limit == 0 {
            return Err(Error::invalid("totient table limit must be positive"));
        }
        if limit > SIEVE_CAP {
            return Err(Error::limit(format!("sieve limit {limit} exceeds {SIEVE_CAP}")));
        }
        let n = limit as usize;
        let mut phi = vec![0u32; n + 1];
        let mut omega = vec![0u8; n + 1];
        let mut mobius = vec![0i8; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        phi[1] = 1;
        mobius[1] = 1;
        for i in 2..=n {
            if phi[i] == 0 {
                primes.push(i as u32);
                phi[i] = i as u32 - 1;
                omega[i] = 1;
                mobius[i] = -1;
            }
            for &p in &primes {
                let p = p as usize;
                let ip = i * p;
                if ip > n {
                    break;
                }
                if i % p == 0 {
                    phi[ip] = phi[i] * p as u32;
                    omega[ip] = omega[i];
                    mobius[ip] = 0;
                    break;
                }
                phi[ip] = phi[i] * (p as u32 - 1);
                omega[ip] = omega[i] + 1;
                mobius[ip] = -mobius[i];
            }
        }
        Ok(TotientTable { limit: n, phi, omega, mobius })
    }

    pub fn limit(&self) -> u64 {
        self.limit as u64
    }

    fn index(&self, n: u64) -> usize {
        assert!(n >= 1 && n as usize <= self.limit, "{n} outside table 1..={}", self.limit);
        n as usize
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[self.index(n)] as u64
    }

    pub fn omega(&self, n: u64) -> u32 {
        self.omega[self.index(n)] as u32
    }

    pub fn mobius(&self, n: u64) -> i32 {
        self.mobius[self.index(n)] as i32
    }

    /// `Σ_{j ≤ n} φ(j)`.
    pub fn phi_sum(&self, n: u64) -> u128 {
        self.phi[1..=self.index(n)].iter().map(|&v| v as u128).sum()
    }

    /// `Σ_{j ≤ n} 2^{ω(j)}`.
    pub fn two_pow_omega_sum(&self, n: u64) -> u128 {
        self.omega[1..=self.index(n)].iter().map(|&w| 1u128 << w).sum()
    }

    /// `Σ_{j ≤ n} φ(j)/j` in floating point (for growth brackets only).
    pub fn phi_ratio_sum_f64(&self, n: u64) -> f64 {
        // Summed from the small end up; terms lie in (0, 1].
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        for j in 1..=self.index(n) {
            let y = self.phi[j] as f64 / j as f64 - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        acc
    }

    /// Prefix sums of `φ`, `prefix[j] = Σ_{i ≤ j} φ(i)`.
    pub fn phi_prefix(&self) -> Vec<u128> {
        let mut out = Vec::with_capacity(self.limit + 1);
        let mut acc = 0u128;
        out.push(0);
        for j in 1..=self.limit {
            acc += self.phi[j] as u128;
            out.push(acc);
        }
        out
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization as sorted `(prime, exponent)` pairs.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut rest = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn positive(name: &str, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(format!("{name} must be positive")));
    }
    Ok(())
}

/// Euler's totient.
pub fn phi(n: u64) -> Result<u64> {
    positive("n", n)?;
    Ok(factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1)))
}

/// Number of distinct prime divisors.
pub fn omega(n: u64) -> Result<u32> {
    positive("n", n)?;
    Ok(factorize(n).len() as u32)
}

/// Möbius function.
pub fn mobius(n: u64) -> Result<i32> {
    positive("n", n)?;
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// `φ_m(n) = |{a ∈ [m] : gcd(a, n) = 1}|` by the Möbius sum over squarefree
/// divisors of `n`.
pub fn phi_m(m: u64, n: u64) -> Result<u64> {
    positive("m", m)?;
    positive("n", n)?;
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    Ok(phi_m_with_primes(m, &primes))
}

/// `φ_m(n)` given the distinct primes of `n`.
pub fn phi_m_with_primes(m: u64, primes: &[u64]) -> u64 {
    let mut total: i128 = 0;
    for mask in 0u32..(1u32 << primes.len()) {
        let mut e: u128 = 1;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                e *= p as u128;
            }
        }
        let term = (m as u128 / e) as i128;
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u64
}

/// Direct gcd count for `φ_m(n)`.
pub fn phi_m_brute(m: u64, n: u64) -> Result<u64> {
    positive("m", m)?;
    positive("n", n)?;
    Ok((1..=m).filter(|a| a.gcd(&n) == 1).count() as u64)
}

/// `Σ_{j ≤ n} φ(j)`.
pub fn totient_sum(n: u64) -> Result<u128> {
    positive("n", n)?;
    Ok(TotientTable::new(n)?.phi_sum(n))
}

/// Exact `Σ_{j ≤ n} φ(j)/j`.
pub fn totient_ratio_sum(n: u64) -> Result<Rat> {
    positive("n", n)?;
    if n > EXACT_RATIO_SUM_CAP {
        return Err(Error::limit(format!(
            "exact ratio sum limited to n <= {EXACT_RATIO_SUM_CAP}, got {n}"
        )));
    }
    let table = TotientTable::new(n)?;
    let lcm = (1..=n).fold(BigInt::from(1), |acc, j| acc.lcm(&BigInt::from(j)));
    let mut num = BigInt::zero();
    for j in 1..=n {
        num += (&lcm / j) * table.phi(j);
    }
    Rat::new(num, lcm)
}

/// `Σ_{j ≤ n} 2^{ω(j)}`.
pub fn two_pow_omega_sum(n: u64) -> Result<u128> {
    positive("n", n)?;
    Ok(TotientTable::new(n)?.two_pow_omega_sum(n))
}

/// All coprime `(s, t)` with `t_lo ≤ t ≤ t_hi` and `1 ≤ s ≤ ⌊s_bound(t)⌋`,
/// sorted by `(t, s)`.
pub fn coprime_pairs(t_lo: u64, t_hi: u64, s_bound: impl Fn(u64) -> Rat) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for t in t_lo.max(1)..=t_hi {
        let bound = s_bound(t).floor();
        let Some(bound) = bound.to_u64() else {
            if bound > BigInt::zero() {
                panic!("s bound {bound} for t = {t} does not fit in u64");
            }
            continue;
        };
        for s in 1..=bound {
            if s.gcd(&t) == 1 {
                out.push((s, t));
            }
        }
    }
    out
}

/// Which totient property a [`totient_checks`] run exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TotientCheck {
    /// `Σ φ(j)` against `n²`.
    A,
    /// `Σ φ(j)/j` against `n`.
    B,
    /// `φ_{m·n}(n)` against `m·φ(n)` (with `m = 3`).
    C,
    /// `max_m |φ_m(n) − (m/n)φ(n)|` against `2^{ω(n)}`.
    D,
    /// `Σ 2^{ω(r)}` against `n·ln ln n`.
    E,
}

impl std::str::FromStr for TotientCheck {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "a" => TotientCheck::A,
            "b" => TotientCheck::B,
            "c" => TotientCheck::C,
            "d" => TotientCheck::D,
            "e" => TotientCheck::E,
            _ => return Err(Error::invalid(format!("unknown check {s:?}, expected a|b|c|d|e"))),
        })
    }
}

impl TotientCheck {
    pub fn label(self) -> &'static str {
        match self {
            TotientCheck::A => "a",
            TotientCheck::B => "b",
            TotientCheck::C => "c",
            TotientCheck::D => "d",
            TotientCheck::E => "e",
        }
    }
}

/// One checkpoint of a totient property.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TotientRecord {
    pub check: String,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Powers of ten up to `limit`, plus `limit` itself.
pub fn checkpoints(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = 10u64;
    while n <= limit {
        out.push(n);
        n = match n.checked_mul(10) {
            Some(v) => v,
            None => break,
        };
    }
    if out.last() != Some(&limit) {
        out.push(limit);
    }
    out
}

/// Evaluates one totient property at every checkpoint up to `limit`.
pub fn totient_checks(check: TotientCheck, limit: u64) -> Result<Vec<TotientRecord>> {
    positive("limit", limit)?;
    let table = TotientTable::new(limit)?;
    let record = |n: u64, lhs: f64, rhs: f64| TotientRecord {
        check: check.label().to_string(),
        n,
        lhs,
        rhs,
        ratio: if rhs == 0.0 { 0.0 } else { lhs / rhs },
    };
    let mut out = Vec::new();
    match check {
        TotientCheck::A => {
            let prefix = table.phi_prefix();
            for n in checkpoints(limit) {
                out.push(record(n, prefix[n as usize] as f64, (n as f64) * (n as f64)));
            }
        }
        TotientCheck::B => {
            for n in checkpoints(limit) {
                out.push(record(n, table.phi_ratio_sum_f64(n), n as f64));
            }
        }
        TotientCheck::C => {
            const M: u64 = 3;
            for n in checkpoints(limit) {
                let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
                let lhs = phi_m_with_primes(M * n, &primes);
                out.push(record(n, lhs as f64, (M * table.phi(n)) as f64));
            }
        }
        TotientCheck::D => {
            for n in checkpoints(limit) {
                let phi_n = table.phi(n) as i128;
                let mut count = 0i128;
                // Track max |n·φ_m(n) − m·φ(n)| over m ∈ [1, n], exact.
                let mut worst = 0i128;
                for m in 1..=n {
                    if m.gcd(&n) == 1 {
                        count += 1;
                    }
                    let dev = (count * n as i128 - m as i128 * phi_n).abs();
                    worst = worst.max(dev);
                }
                let lhs = worst as f64 / n as f64;
                out.push(record(n, lhs, (1u64 << table.omega(n)) as f64));
            }
        }
        TotientCheck::E => {
            let mut acc = 0u128;
            let mut next = checkpoints(limit).into_iter().peekable();
            for r in 1..=limit {
                acc += 1u128 << table.omega(r);
                if next.peek() == Some(&r) {
                    next.next();
                    let rhs = r as f64 * (r as f64).ln().ln();
                    out.push(record(r, acc as f64, rhs));
                }
            }
        }
    }
    Ok(out)
}

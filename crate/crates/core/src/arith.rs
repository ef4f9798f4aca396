//! Exact elementary arithmetic: rationals on big integers, multiplicative
//! functions, the convolution inverse phi-hat, Kronecker symbols, and CRT.
//!
//! Every formula in this crate is evaluated over [`Rat`]; no floating point
//! enters any identity that is asserted exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("argument must be positive, got {0}")]
    NonPositive(i64),
    #[error("incompatible residues: {0} mod {1} vs {2} mod {3}")]
    IncompatibleResidues(u64, u64, u64, u64),
}

// ---------------------------------------------------------------------------
// Exact rationals
// ---------------------------------------------------------------------------

/// Exact rational number; numerator and denominator are arbitrary-precision,
/// kept in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Rat(BigRational::from_integer(n))
    }

    /// n/d in lowest terms. Panics if d = 0.
    pub fn new(n: i64, d: i64) -> Rat {
        assert!(d != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn pow(&self, e: i32) -> Rat {
        Rat(self.0.pow(e))
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// The integer value, if the denominator is 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.0.is_integer() {
            Some(self.0.to_integer())
        } else {
            None
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = String;

    fn from_str(s: &str) -> Result<Rat, String> {
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.parse().map_err(|e| format!("{e}"))?;
                let d: BigInt = d.parse().map_err(|e| format!("{e}"))?;
                if d.is_zero() {
                    return Err("zero denominator".into());
                }
                Ok(Rat(BigRational::new(n, d)))
            }
            None => {
                let n: BigInt = s.parse().map_err(|e| format!("{e}"))?;
                Ok(Rat::from_bigint(n))
            }
        }
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl From<u64> for Rat {
    fn from(n: u64) -> Rat {
        Rat::from_bigint(BigInt::from(n))
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::from_bigint(n)
    }
}

macro_rules! impl_rat_op {
    ($trait:ident, $m:ident, $op:tt) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0 $op rhs.0)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat(self.0 $op &rhs.0)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(&self.0 $op rhs.0)
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat(&self.0 $op &rhs.0)
            }
        }
    };
}

impl_rat_op!(Add, add, +);
impl_rat_op!(Sub, sub, -);
impl_rat_op!(Mul, mul, *);
impl_rat_op!(Div, div, /);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

/// Shorthand for `Rat::from_int`.
pub fn rat(n: i64) -> Rat {
    Rat::from_int(n)
}

/// Shorthand for `Rat::new`.
pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

// ---------------------------------------------------------------------------
// Integer utilities
// ---------------------------------------------------------------------------

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Exact integer square root: Some(s) iff n = s^2.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let s = (n as f64).sqrt().round() as u64;
    for c in s.saturating_sub(1)..=s + 1 {
        if c.checked_mul(c) == Some(n) {
            return Some(c);
        }
    }
    None
}

pub fn pow_u64(base: u64, exp: u32) -> u64 {
    base.pow(exp)
}

/// Trial-division factorization as (prime, exponent) pairs, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of n, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for d in &prev {
                divs.push(d * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// Writes q = p^v with p prime, v >= 1; None if q is not a prime power > 1.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factorize(q);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

fn checked_positive(n: i64) -> Result<u64, ArithError> {
    if n < 1 {
        Err(ArithError::NonPositive(n))
    } else {
        Ok(n as u64)
    }
}

// ---------------------------------------------------------------------------
// Multiplicative functions
// ---------------------------------------------------------------------------

/// Sum of divisors sigma(n).
pub fn sigma(n: u64) -> u64 {
    divisors(n).iter().sum()
}

/// Euler totient phi(n).
pub fn euler_phi(n: u64) -> u64 {
    let mut r = n;
    for (p, _) in factorize(n) {
        r = r / p * (p - 1);
    }
    r
}

/// psi(n) = [SL_2(Z) : Gamma_0(n)] = n prod_{p|n} (1 + 1/p).
pub fn psi(n: u64) -> u64 {
    let mut r = n;
    for (p, _) in factorize(n) {
        r = r / p * (p + 1);
    }
    r
}

/// Moebius function.
pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of divisors.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| (e + 1) as u64).product()
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

/// (-1)^omega(n); the sign attached to full divisors in the class-number sums.
pub fn lambda_sign(n: u64) -> i64 {
    if omega(n) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// p-adic valuation of n (n >= 1, p prime).
pub fn valuation(n: u64, p: u64) -> u32 {
    assert!(n >= 1 && p >= 2);
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// phi-hat(n) = n prod_{p|n} (-phi(p)), the Dirichlet convolution inverse of
/// n -> phi(n^2).
pub fn phi_hat(n: i64) -> Result<i64, ArithError> {
    let n = checked_positive(n)?;
    let mut r = n as i64;
    for (p, _) in factorize(n) {
        r *= -((p - 1) as i64);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Kronecker symbol
// ---------------------------------------------------------------------------

fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    // Euler's criterion by modular exponentiation.
    let mut base = a % p;
    let mut exp = (p - 1) / 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if acc == 1 {
        1
    } else if acc == p - 1 {
        -1
    } else {
        0
    }
}

/// Kronecker symbol (a/n) for positive n, completely multiplicative in n;
/// the factor at 2 is 0 for even a and +-1 according to a mod 8.
pub fn kronecker(a: i64, n: u64) -> i32 {
    assert!(n >= 1);
    let mut s = 1i32;
    for (p, e) in factorize(n) {
        let f = if p == 2 {
            match a.rem_euclid(8) {
                0 | 2 | 4 | 6 => 0,
                1 | 7 => 1,
                _ => -1,
            }
        } else {
            legendre(a, p)
        };
        if f == 0 {
            return 0;
        }
        if e % 2 == 1 {
            s *= f;
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Chinese remainder theorem on possibly non-coprime moduli
// ---------------------------------------------------------------------------

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of a modulo m, if gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd((a % m) as i64, m as i64);
    if g != 1 {
        None
    } else {
        Some(x.rem_euclid(m as i64) as u64)
    }
}

/// The unique residue modulo lcm of the moduli satisfying every congruence.
/// Moduli need not be coprime; overlapping congruences must agree.
pub fn crt_unique(residues: &[(i64, u64)]) -> Result<(u64, u64), ArithError> {
    let mut x: u64 = 0;
    let mut m: u64 = 1;
    for &(r, n) in residues {
        assert!(n >= 1);
        let r = r.rem_euclid(n as i64) as u64;
        let g = gcd(m, n);
        if x % g != r % g {
            return Err(ArithError::IncompatibleResidues(x, m, r, n));
        }
        let l = m / g * n;
        // x' = x + m * t with t = (r - x)/g * inv(m/g) mod n/g
        let diff = (r as i128 - x as i128).rem_euclid(n as i128) as u64;
        let t = diff / g % (n / g);
        let inv = mod_inverse(m / g % (n / g).max(1), (n / g).max(1)).unwrap_or(0);
        let t = t as u128 * inv as u128 % (n / g).max(1) as u128;
        x = ((x as u128 + m as u128 * t) % l as u128) as u64;
        m = l;
    }
    Ok((x, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_display_round_trip() {
        assert_eq!(frac(664, 7).to_string(), "664/7");
        assert_eq!(rat(-24).to_string(), "-24");
        assert_eq!("42/6".parse::<Rat>().unwrap(), rat(7));
        assert_eq!("-3".parse::<Rat>().unwrap(), rat(-3));
    }

    #[test]
    fn basic_multiplicatives() {
        assert_eq!(psi(12), 24);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(sigma(12), 28);
        assert_eq!(lambda_sign(12), 1);
        assert_eq!(omega(12), 2);
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(valuation(48, 2), 4);
    }

    #[test]
    fn multiplicativity_spot_checks() {
        let fns: Vec<(&str, Box<dyn Fn(u64) -> i64>)> = vec![
            ("sigma", Box::new(|n| sigma(n) as i64)),
            ("phi", Box::new(|n| euler_phi(n) as i64)),
            ("psi", Box::new(|n| psi(n) as i64)),
            ("mu", Box::new(moebius)),
            ("lambda", Box::new(lambda_sign)),
            ("phi_hat", Box::new(|n| phi_hat(n as i64).unwrap())),
        ];
        for (name, f) in &fns {
            for m in 1..=100u64 {
                for n in 1..=100u64 {
                    if gcd(m, n) == 1 && m * n <= 100 {
                        assert_eq!(f(m * n), f(m) * f(n), "{name} not multiplicative at {m},{n}");
                    }
                }
            }
        }
    }

    #[test]
    fn phi_hat_values() {
        assert_eq!(phi_hat(1).unwrap(), 1);
        assert_eq!(phi_hat(2).unwrap(), -2);
        assert_eq!(phi_hat(6).unwrap(), 12);
        assert!(phi_hat(0).is_err());
    }

    #[test]
    fn phi_hat_is_convolution_inverse_of_phi_square() {
        // sum_{d|n} phi_hat(d) phi((n/d)^2) = [n = 1]
        for n in 1..=200u64 {
            let s: i64 = divisors(n)
                .iter()
                .map(|&d| phi_hat(d as i64).unwrap() * euler_phi((n / d) * (n / d)) as i64)
                .sum();
            assert_eq!(s, i64::from(n == 1), "convolution fails at n = {n}");
        }
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(2, 2), 0);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(3, 7), -1);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-3, 3), 0);
    }

    #[test]
    fn kronecker_matches_quadratic_residues_for_odd_primes() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            let squares: std::collections::HashSet<u64> =
                (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a as i64, p), expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn crt_cases() {
        assert_eq!(crt_unique(&[(1, 3), (2, 5)]).unwrap(), (7, 15));
        assert_eq!(crt_unique(&[(0, 1), (5, 9)]).unwrap(), (5, 9));
        assert_eq!(crt_unique(&[(2, 4), (0, 2)]).unwrap(), (2, 4));
        assert!(crt_unique(&[(1, 4), (0, 2)]).is_err());
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(49), Some(7));
        assert_eq!(exact_sqrt(48), None);
        assert_eq!(exact_sqrt(0), Some(0));
        assert_eq!(exact_sqrt(1), Some(1));
    }

    #[test]
    fn prime_power_recognition() {
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}

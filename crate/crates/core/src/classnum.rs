//! Class numbers of imaginary quadratic orders, Hurwitz-Kronecker class
//! numbers, and the modified class numbers H_{n1,n2}(t,q,d) and
//! H*_{n1,n2}(t,q,d) that count elliptic curves with prescribed subgroups.
//!
//! h(d) is computed by enumerating reduced positive-definite binary quadratic
//! forms, which is an O(|d|) loop and entirely adequate at the scales this
//! crate operates (|d| <= 4q with q at most a few thousand for censuses,
//! a few hundred thousand for standalone traces). Values are memoized.

use crate::arith::{self, Rat};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ClassnumError {
    #[error("{0} is not a negative discriminant (need d < 0, d = 0,1 mod 4)")]
    BadDiscriminant(i64),
    #[error("dq + d^-1 is not well-defined modulo {0}")]
    NotWellDefined(u64),
    #[error("d = {0} is not a unit modulo n1 = {1}")]
    NonUnit(u64, u64),
    #[error("t^2 - 4q = {0} must be negative")]
    ArgumentNotNegative(i64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("n2 = {0} must divide n1 = {1}")]
    BadInvariantFactors(u64, u64),
}

/// A finite abelian group of rank at most 2 given by its invariant factors,
/// n2 | n1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub n1: u64,
    pub n2: u64,
}

impl GroupSpec {
    pub fn new(n1: u64, n2: u64) -> Result<GroupSpec, ClassnumError> {
        if n1 == 0 || n2 == 0 || n1 % n2 != 0 {
            return Err(ClassnumError::BadInvariantFactors(n2, n1));
        }
        Ok(GroupSpec { n1, n2 })
    }

    pub fn trivial() -> GroupSpec {
        GroupSpec { n1: 1, n2: 1 }
    }

    pub fn order(&self) -> u64 {
        self.n1 * self.n2
    }
}

/// Either a genuine prime power (or 1), or the formal token p^{-1} at which
/// every trace-formula quantity vanishes by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QArg {
    Pos(u64),
    PInverse,
}

// ---------------------------------------------------------------------------
// Classical class numbers
// ---------------------------------------------------------------------------

fn h_memo() -> &'static Mutex<HashMap<i64, u64>> {
    static MEMO: OnceLock<Mutex<HashMap<i64, u64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Class number of the quadratic order of discriminant d < 0: the count of
/// reduced primitive positive-definite forms (a,b,c), b^2 - 4ac = d, with
/// |b| <= a <= c and b >= 0 whenever |b| = a or a = c.
pub fn h(d: i64) -> Result<u64, ClassnumError> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(ClassnumError::BadDiscriminant(d));
    }
    if let Some(&v) = h_memo().lock().unwrap().get(&d) {
        return Ok(v);
    }
    let ad = (-d) as u64;
    let mut count = 0u64;
    let mut b = ad % 2; // b has the parity of d
    while 3 * b * b <= ad {
        let n = (b * b + ad) / 4; // = (b^2 - d)/4 = a*c
        let mut a = std::cmp::max(b, 1);
        while a * a <= n {
            if n % a == 0 {
                let c = n / a;
                if arith::gcd(arith::gcd(a, b), c) == 1 {
                    count += if b == 0 || b == a || a == c { 1 } else { 2 };
                }
            }
            a += 1;
        }
        b += 2;
    }
    h_memo().lock().unwrap().insert(d, count);
    Ok(count)
}

/// h weighted by the unit group: h(-3)/3, h(-4)/2, h(d) for other valid
/// d < 0, and 0 everywhere else.
pub fn h_w(d: i64) -> Rat {
    match d {
        -3 => Rat::new(1, 3),
        -4 => Rat::new(1, 2),
        d if d < 0 && d.rem_euclid(4) <= 1 => Rat::from(h(d).expect("valid discriminant")),
        _ => Rat::zero(),
    }
}

/// Hurwitz-Kronecker class number H(D) = sum_{f^2 | D} h_w(D/f^2).
pub fn hurwitz_h(delta: i64) -> Result<Rat, ClassnumError> {
    if delta >= 0 || delta.rem_euclid(4) > 1 {
        return Err(ClassnumError::BadDiscriminant(delta));
    }
    let ad = -delta;
    let mut acc = Rat::zero();
    let mut f = 1i64;
    while f * f <= ad {
        if ad % (f * f) == 0 {
            acc = acc + h_w(delta / (f * f));
        }
        f += 1;
    }
    Ok(acc)
}

/// H(D) extended by zero to non-discriminants; used inside the modified
/// class-number sums where invalid arguments contribute nothing.
fn hurwitz_or_zero(delta: i64) -> Rat {
    if delta < 0 && delta.rem_euclid(4) <= 1 {
        hurwitz_h(delta).expect("valid discriminant")
    } else {
        Rat::zero()
    }
}

// ---------------------------------------------------------------------------
// The congruence indicator D(t;n) and its difference products
// ---------------------------------------------------------------------------

/// Evaluation context for the modified class numbers: invariant factors
/// (n1, n2) with n2 | n1, a prime power q, and a unit d mod n1.
#[derive(Debug, Clone, Copy)]
pub struct ModClassContext {
    pub n1: u64,
    pub n2: u64,
    pub q: u64,
    pub d: u64,
}

impl ModClassContext {
    pub fn new(n1: u64, n2: u64, q: u64, d: u64) -> Result<ModClassContext, ClassnumError> {
        if n1 == 0 || n2 == 0 || n1 % n2 != 0 {
            return Err(ClassnumError::BadInvariantFactors(n2, n1));
        }
        let d = d % n1.max(1);
        let d = if n1 == 1 { 1 } else { d };
        if arith::gcd(d, n1) != 1 {
            return Err(ClassnumError::NonUnit(d, n1));
        }
        Ok(ModClassContext { n1, n2, q, d })
    }
}

/// D(t;n) = delta_n(dq + d^{-1}, t). The residue dq + d^{-1} mod n is
/// computed from integer lifts of d mod n1; every lift must give the same
/// value, which is checked by evaluating all of them.
pub fn d_indicator(ctx: &ModClassContext, t: i64, n: u64) -> Result<bool, ClassnumError> {
    if arith::gcd(ctx.d, ctx.n1) != 1 {
        return Err(ClassnumError::NonUnit(ctx.d, ctx.n1));
    }
    if n == 1 {
        return Ok(true);
    }
    let g = arith::gcd(ctx.n1, n);
    let qn = ctx.q % n;
    let mut value: Option<u64> = None;
    let mut x = ctx.d % g;
    while x < n {
        let inv = match arith::mod_inverse(x, n) {
            Some(i) => i,
            None => return Err(ClassnumError::NotWellDefined(n)),
        };
        let v = ((x as u128 * qn as u128 + inv as u128) % n as u128) as u64;
        match value {
            None => value = Some(v),
            Some(v0) if v0 != v => return Err(ClassnumError::NotWellDefined(n)),
            _ => {}
        }
        x += g;
    }
    Ok(value.unwrap() == t.rem_euclid(n as i64) as u64)
}

/// All full divisors of n1: every nu whose primes appear to their full
/// multiplicity in n1, including nu = 1.
pub fn full_divisors(n1: u64) -> Vec<u64> {
    let factors = arith::factorize(n1);
    let mut out = vec![1u64];
    for (p, e) in factors {
        let pe = arith::pow_u64(p, e);
        let prev = out.clone();
        out.extend(prev.into_iter().map(|d| d * pe));
    }
    out.sort_unstable();
    out
}

/// The set of mu with the same prime support as m and
/// 1 <= v_l(mu) <= v_l(n1/n2) - 1 at every prime l | m; empty when any
/// prime of m has v_l(n1/n2) <= 1.
pub fn prec_set(m: u64, n1: u64, n2: u64) -> Vec<u64> {
    assert!(n1 % n2 == 0);
    let primes: Vec<u64> = arith::factorize(m).into_iter().map(|(p, _)| p).collect();
    let mut out = vec![1u64];
    for p in primes {
        let cap = arith::valuation(n1 / n2, p);
        if cap <= 1 {
            return Vec::new();
        }
        let prev = out;
        out = Vec::new();
        for base in prev {
            let mut pk = 1;
            for _ in 1..cap {
                pk *= p;
                out.push(base * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// The product over primes l | nu of
/// D(t; l^{v_l(n1 n2 mu) - 1}) - D(t; l^{v_l(n1 n2 mu)}); value in {-1,0,1}.
pub fn d_nu_mu(ctx: &ModClassContext, nu: u64, mu: u64, t: i64) -> Result<Rat, ClassnumError> {
    let mut prod = 1i64;
    for (l, _) in arith::factorize(nu) {
        let e = arith::valuation(ctx.n1, l) + arith::valuation(ctx.n2, l) + arith::valuation(mu, l);
        let lo = d_indicator(ctx, t, arith::pow_u64(l, e - 1))? as i64;
        let hi = d_indicator(ctx, t, arith::pow_u64(l, e))? as i64;
        prod *= lo - hi;
        if prod == 0 {
            return Ok(Rat::zero());
        }
    }
    Ok(Rat::from_int(prod))
}

/// (1/2) H((t^2-4q)/(n2 mu)^2) restricted to integral arguments that are
/// discriminants; everything else contributes zero.
fn half_h_at(delta: i64, m: u64) -> Rat {
    let m2 = (m * m) as i64;
    if delta % m2 != 0 {
        return Rat::zero();
    }
    Rat::new(1, 2) * hurwitz_or_zero(delta / m2)
}

fn delta_mod(a: u128, b: u64, m: u64) -> bool {
    // a = b (mod m)
    (a % m as u128) as u64 == b % m
}

/// The modified class number H_{n1,n2}(t,q,d).
///
/// The correction sum runs over full divisors m of n1 with m >= 2 and
/// mu in prec_set(m): each such term carries the difference factors of
/// `d_nu_mu` at the primes of m and the plain indicator
/// D(t; l^{v_l(n1 n2)}) at the remaining primes of n1, which is what the
/// per-prime inclusion-exclusion multiplies out to.
pub fn h_mod(ctx: &ModClassContext, t: i64) -> Result<Rat, ClassnumError> {
    let q = ctx.q as i64;
    let delta = t * t - 4 * q;
    if delta >= 0 {
        return Err(ClassnumError::ArgumentNotNegative(delta));
    }
    let d2q = ctx.d as u128 * ctx.d as u128 * ctx.q as u128;
    let mut acc = Rat::zero();

    // Main term: mu = 1.
    if delta_mod(d2q, 1, ctx.n2) {
        let hh = half_h_at(delta, ctx.n2);
        if !hh.is_zero() && d_indicator(ctx, t, ctx.n1 * ctx.n2)? {
            acc = acc + hh;
        }
    }

    // Correction terms over full divisors m >= 2 and mu < m.
    for m in full_divisors(ctx.n1) {
        if m < 2 {
            continue;
        }
        let sign = arith::lambda_sign(m);
        // Plain indicator modulus: primes of n1 not dividing m, at full
        // multiplicity in n1 n2.
        let mut rest = 1u64;
        for (l, _) in arith::factorize(ctx.n1) {
            if m % l != 0 {
                rest *= arith::pow_u64(l, arith::valuation(ctx.n1 * ctx.n2, l));
            }
        }
        for mu in prec_set(m, ctx.n1, ctx.n2) {
            if !delta_mod(d2q, 1, ctx.n2 * mu) {
                continue;
            }
            let hh = half_h_at(delta, ctx.n2 * mu);
            if hh.is_zero() {
                continue;
            }
            let diff = d_nu_mu(ctx, m, mu, t)?;
            if diff.is_zero() {
                continue;
            }
            if !d_indicator(ctx, t, rest)? {
                continue;
            }
            acc = acc + Rat::from_int(sign) * hh * diff;
        }
    }
    Ok(acc)
}

/// The supersingular class number H*_{n1,n2}(t,q,d); q must be a genuine
/// prime power so its characteristic and parity of the exponent are known.
pub fn h_star(ctx: &ModClassContext, t: i64) -> Result<Rat, ClassnumError> {
    let (p, v) = arith::prime_power(ctx.q).ok_or(ClassnumError::NotPrimePower(ctx.q))?;
    let q = ctx.q as i64;
    let n1 = ctx.n1;
    if ctx.n2 > 2 {
        return Ok(Rat::zero());
    }
    if ctx.n2 == 2 {
        if t != 0 {
            return Ok(Rat::zero());
        }
        let w = Rat::new(1, 2) * h_w(-(p as i64));
        if w.is_zero() {
            return Ok(Rat::zero());
        }
        return Ok(if d_indicator(ctx, t, 2 * n1)? { w } else { Rat::zero() });
    }
    // n2 = 1
    if v % 2 == 0 {
        let w = if t == 0 {
            Rat::new(1, 4) * (Rat::one() - Rat::from_int(arith::kronecker(-4, p) as i64))
        } else if t * t == q {
            Rat::new(1, 6) * (Rat::one() - Rat::from_int(arith::kronecker(-3, p) as i64))
        } else {
            return Ok(Rat::zero());
        };
        if w.is_zero() {
            return Ok(Rat::zero());
        }
        return Ok(if d_indicator(ctx, t, n1)? { w } else { Rat::zero() });
    }
    // n2 = 1, v odd
    if t == 0 {
        let mut acc = Rat::zero();
        let main = Rat::new(1, 2) * hurwitz_h(-4 * p as i64)?;
        if d_indicator(ctx, t, n1)? {
            acc = acc + main;
        }
        if n1 % 4 == 0 {
            let w = Rat::new(1, 2) * h_w(-(p as i64));
            if !w.is_zero() {
                let d1 = d_indicator(ctx, t, n1)? as i64;
                let d2 = d_indicator(ctx, t, 2 * n1)? as i64;
                acc = acc - w * Rat::from_int(d1 - d2);
            }
        }
        return Ok(acc);
    }
    if t * t == 2 * q && p == 2 {
        return Ok(if d_indicator(ctx, t, n1)? { Rat::new(1, 4) } else { Rat::zero() });
    }
    if t * t == 3 * q && p == 3 {
        return Ok(if d_indicator(ctx, t, n1)? { Rat::new(1, 6) } else { Rat::zero() });
    }
    Ok(Rat::zero())
}

// ---------------------------------------------------------------------------
// Chebyshev-weighted class number sums
// ---------------------------------------------------------------------------

fn t_range(q: u64) -> impl Iterator<Item = i64> {
    let q = q as i64;
    let tmax = (4.0 * q as f64).sqrt() as i64 + 1;
    (-tmax..=tmax).filter(move |t| t * t < 4 * q)
}

/// omega_A(q,d) = sum over t^2 < 4q with p not dividing t of
/// U_{k-2}(t,q) H_{n1,n2}(t,q,d).
pub fn omega_a(ctx: &ModClassContext, k: u32) -> Result<Rat, ClassnumError> {
    let (p, _) = arith::prime_power(ctx.q).ok_or(ClassnumError::NotPrimePower(ctx.q))?;
    let mut acc = Rat::zero();
    for t in t_range(ctx.q) {
        if t.rem_euclid(p as i64) == 0 {
            continue;
        }
        let u = Rat::from_bigint(crate::chebyshev::u_int(k - 2, t, ctx.q as i64));
        acc = acc + u * h_mod(ctx, t)?;
    }
    Ok(acc)
}

/// omega*_A(q,d) = sum over all t^2 < 4q of U_{k-2}(t,q) H*_{n1,n2}(t,q,d).
pub fn omega_star_a(ctx: &ModClassContext, k: u32) -> Result<Rat, ClassnumError> {
    let mut acc = Rat::zero();
    for t in t_range(ctx.q) {
        let u = Rat::from_bigint(crate::chebyshev::u_int(k - 2, t, ctx.q as i64));
        acc = acc + u * h_star(ctx, t)?;
    }
    Ok(acc)
}

/// Sigma_{n1,n2}(q,d) = sum over all t^2 < 4q of U_{k-2}(t,q) H_{n1,n2}(t,q,d),
/// with the convention Sigma = 0 at the token q = p^{-1}.
pub fn sigma_sum(n1: u64, n2: u64, q: QArg, d: u64, k: u32) -> Result<Rat, ClassnumError> {
    let q = match q {
        QArg::PInverse => return Ok(Rat::zero()),
        QArg::Pos(q) => q,
    };
    let ctx = ModClassContext::new(n1, n2, q, d)?;
    let mut acc = Rat::zero();
    for t in t_range(q) {
        let u = Rat::from_bigint(crate::chebyshev::u_int(k - 2, t, q as i64));
        acc = acc + u * h_mod(&ctx, t)?;
    }
    Ok(acc)
}

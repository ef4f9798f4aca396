//! The two Eichler-Selberg engines.
//!
//! `trace_gamma_nm` evaluates Tr(<d> T_q | S_k(Gamma(N,M))) exactly over the
//! rationals: an identity term supported on square q, an elliptic term that
//! is a Chebyshev-weighted sum of the modified class numbers H_{N,Lambda M},
//! a hyperbolic term over divisor pairs of q and NM, and a dual (Eisenstein)
//! term in weight 2.
//!
//! `trace_gamma0_chi` evaluates Tr(T_q | S_k(Gamma_0(N), chi)) with complex
//! floating-point character values and is used only as a cross-check oracle:
//! summing it against chi(d) over all characters mod N must reproduce the
//! exact Gamma(N,M) trace.

use crate::arith::{self, Rat};
use crate::classnum::{self, ModClassContext};
use crate::dirichlet::DirichletChar;
use num_bigint::BigInt;
use num_complex::Complex64;

pub use crate::classnum::QArg;

pub const TAU_CEILING: u64 = 60;
pub const CHI_ROUND_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace formula hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("character-summed trace {0} is {1:e} away from a twelfth-integer")]
    ToleranceExceeded(f64, f64),
    #[error("q = 1 trace gave a negative or non-integer dimension: {0}")]
    NegativeOrNonIntegerDimension(Rat),
    #[error(transparent)]
    Classnum(#[from] classnum::ClassnumError),
    #[error(transparent)]
    Dirichlet(#[from] crate::dirichlet::DirichletError),
}

/// Inputs for the exact Gamma(N,M) engine. Requires M | N, gcd(N,q) = 1,
/// gcd(d,N) = 1 and d^2 q = 1 (mod M); q is a prime power or 1.
#[derive(Debug, Clone, Copy)]
pub struct TraceRequest {
    pub q: u64,
    pub level_n: u64,
    pub level_m: u64,
    pub d: u64,
    pub k: u32,
}

/// The exact trace together with its four constituents, each already scaled
/// by phi(N): total = identity - elliptic - hyperbolic + dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceResult {
    pub total: Rat,
    pub identity_term: Rat,
    pub elliptic_term: Rat,
    pub hyperbolic_term: Rat,
    pub dual_term: Rat,
}

fn validate(req: &TraceRequest) -> Result<(), TraceError> {
    let TraceRequest { q, level_n: n, level_m: m, d, k } = *req;
    if n == 0 || m == 0 || n % m != 0 {
        return Err(TraceError::HypothesisViolated(format!("need M | N, got N={n} M={m}")));
    }
    if q == 0 || (q > 1 && arith::prime_power(q).is_none()) {
        return Err(TraceError::HypothesisViolated(format!("q = {q} is not a prime power")));
    }
    if arith::gcd(n, q) != 1 {
        return Err(TraceError::HypothesisViolated(format!("gcd(N,q) = {} != 1", arith::gcd(n, q))));
    }
    if arith::gcd(d % n.max(1), n) != 1 && n > 1 {
        return Err(TraceError::HypothesisViolated(format!("d = {d} is not a unit mod {n}")));
    }
    let d2q = (d as u128 % m as u128) * (d as u128 % m as u128) % m as u128 * (q as u128 % m as u128) % m as u128;
    if d2q != 1 % m as u128 {
        return Err(TraceError::HypothesisViolated(format!("d^2 q != 1 mod M = {m}")));
    }
    if k < 2 {
        return Err(TraceError::HypothesisViolated(format!("k = {k} < 2")));
    }
    Ok(())
}

/// delta_m(v, 1) + (-1)^k delta_m(v, -1) as an integer in {-1, 0, 1, 2}.
fn delta_pm(v: u64, m: u64, k: u32) -> i64 {
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let plus = (v % m == 1 % m) as i64;
    let minus = (v % m == (m - 1) % m) as i64;
    plus + sign * minus
}

fn t_range(q: u64) -> impl Iterator<Item = i64> {
    let q = q as i64;
    let tmax = (4.0 * q as f64).sqrt() as i64 + 1;
    (-tmax..=tmax).filter(move |t| t * t < 4 * q)
}

/// The exact Eichler-Selberg trace of <d> T_q on S_k(Gamma(N,M)).
pub fn trace_gamma_nm(req: &TraceRequest) -> Result<TraceResult, TraceError> {
    validate(req)?;
    let TraceRequest { q, level_n: n, level_m: m, d, k } = *req;
    let d = if n == 1 { 1 } else { d % n };
    let phi_n = Rat::from(arith::euler_phi(n));

    // Identity term, supported on square q.
    let identity = match arith::exact_sqrt(q) {
        None => Rat::zero(),
        Some(s) => {
            let ind = delta_pm(s % n * d % n.max(1), n, k);
            Rat::new((k - 1) as i64, 24)
                * Rat::from_bigint(BigInt::from(s).pow(k - 2))
                * Rat::from(arith::psi(n * m))
                * Rat::from_int(ind)
        }
    };

    // Elliptic term.
    let l = arith::gcd((d as u64 * d * q - 1) as u64, n); // gcd(0, n) = n at q = d = 1
    let outer = Rat::from(arith::psi(n * n)) / Rat::from(arith::psi((n / m) * (n / m)));
    let mut elliptic = Rat::zero();
    for lam in arith::divisors(l / m) {
        let coeff = Rat::from(arith::euler_phi(lam * lam))
            * Rat::from(arith::euler_phi(n / (m * lam)))
            / Rat::from(arith::euler_phi(n / m));
        let ctx = ModClassContext::new(n, lam * m, q, d)?;
        let mut tsum = Rat::zero();
        for t in t_range(q) {
            let u = Rat::from_bigint(crate::chebyshev::u_int(k - 2, t, q as i64));
            tsum = tsum + u * classnum::h_mod(&ctx, t)?;
        }
        elliptic = elliptic + coeff * tsum;
    }
    elliptic = outer * elliptic;

    // Hyperbolic term.
    let nm = n * m;
    let mut hyperbolic = Rat::zero();
    for b in arith::divisors(q) {
        let weight = Rat::from(std::cmp::min(b, q / b)).pow(k as i32 - 1);
        let diff = b as i64 - (q / b) as i64;
        let mut inner = Rat::zero();
        for tau in arith::divisors(nm) {
            let g = arith::gcd(tau, nm / tau);
            if diff != 0 && diff.rem_euclid(g as i64) != 0 {
                continue;
            }
            let (y, ymod) = arith::crt_unique(&[
                ((b % tau) as i64, tau),
                (((q / b) % (nm / tau)) as i64, nm / tau),
            ])
            .expect("g | b - q/b makes the residues compatible");
            debug_assert_eq!(ymod, nm / g);
            let modl = n * arith::gcd(m, g) / g;
            let ind = delta_pm(y % modl.max(1) * (d % modl.max(1)) % modl.max(1), modl, k);
            if ind != 0 {
                inner = inner
                    + Rat::from(arith::euler_phi(g)) * Rat::from(arith::euler_phi(modl)) / &phi_n
                        * Rat::from_int(ind);
            }
        }
        hyperbolic = hyperbolic + weight * inner;
    }
    hyperbolic = Rat::new(1, 4) * hyperbolic;

    // Dual term.
    let dual = if k == 2 { Rat::from(arith::sigma(q)) / &phi_n } else { Rat::zero() };

    let per_phi = &identity - &elliptic - &hyperbolic + &dual;
    Ok(TraceResult {
        total: &phi_n * per_phi,
        identity_term: &phi_n * identity,
        elliptic_term: &phi_n * elliptic,
        hyperbolic_term: &phi_n * hyperbolic,
        dual_term: &phi_n * dual,
    })
}

/// dim S_k(Gamma(N,M)) by taking q = 1 (T_1 is the identity operator).
pub fn dim_cusp(n: u64, m: u64, k: u32) -> Result<u64, TraceError> {
    let res = trace_gamma_nm(&TraceRequest { q: 1, level_n: n, level_m: m, d: 1, k })?;
    match res.total.to_integer() {
        Some(z) if z >= BigInt::from(0) => Ok(u64::try_from(z).unwrap()),
        _ => Err(TraceError::NegativeOrNonIntegerDimension(res.total)),
    }
}

// ---------------------------------------------------------------------------
// T_{n1,lambda}(q,d)
// ---------------------------------------------------------------------------

/// T_{n1,lambda}(q,d) = psi(n1^2/lambda^2) phi(n1/lambda) / psi(n1^2)
/// * (-T_trace + T_id - T_hyp + T_dual), assembled from the four displays;
/// T_{n1,lambda}(p^{-1},d) = 0.
pub fn t_family(n1: u64, lambda: u64, q: QArg, d: u64, k: u32) -> Result<Rat, TraceError> {
    let q = match q {
        QArg::PInverse => return Ok(Rat::zero()),
        QArg::Pos(q) => q,
    };
    let d = if n1 == 1 { 1 } else { d % n1 };
    let l = arith::gcd((d * d * q).wrapping_sub(1), n1);
    if l % lambda != 0 {
        return Err(TraceError::HypothesisViolated(format!(
            "lambda = {lambda} does not divide (d^2 q - 1, n1) = {l}"
        )));
    }
    let phi_n1 = Rat::from(arith::euler_phi(n1));

    let t_trace = trace_gamma_nm(&TraceRequest { q, level_n: n1, level_m: lambda, d, k })?.total
        / &phi_n1;

    let t_id = match arith::exact_sqrt(q) {
        None => Rat::zero(),
        Some(s) => {
            let ind = delta_pm(s % n1.max(1) * (d % n1.max(1)) % n1.max(1), n1, k);
            Rat::new((k - 1) as i64, 24)
                * Rat::from_bigint(BigInt::from(s).pow(k - 2))
                * Rat::from(arith::psi(n1 * lambda))
                * Rat::from_int(ind)
        }
    };

    let (p, v) = if q == 1 { (1u64, 0u32) } else { arith::prime_power(q).unwrap() };
    let nl = n1 * lambda;
    let mut t_hyp = Rat::zero();
    for i in 0..=v {
        let (bi, bvi) = (arith::pow_u64(p, i), arith::pow_u64(p, v - i));
        let weight = Rat::from(std::cmp::min(bi, bvi)).pow(k as i32 - 1);
        let diff = bi as i64 - bvi as i64;
        let mut inner = Rat::zero();
        for tau in arith::divisors(nl) {
            let g = arith::gcd(tau, nl / tau);
            if diff != 0 && diff.rem_euclid(g as i64) != 0 {
                continue;
            }
            let (y, _) = arith::crt_unique(&[
                ((bi % tau) as i64, tau),
                ((bvi % (nl / tau)) as i64, nl / tau),
            ])
            .expect("compatible residues");
            let modl = n1 * arith::gcd(lambda, g) / g;
            let ind = delta_pm(y % modl.max(1) * (d % modl.max(1)) % modl.max(1), modl, k);
            if ind != 0 {
                inner = inner
                    + Rat::from(arith::euler_phi(g)) * Rat::from(arith::euler_phi(modl)) / &phi_n1
                        * Rat::from_int(ind);
            }
        }
        t_hyp = t_hyp + weight * inner;
    }
    t_hyp = Rat::new(1, 4) * t_hyp;

    let t_dual = if k == 2 { Rat::from(arith::sigma(q)) / &phi_n1 } else { Rat::zero() };

    let front = Rat::from(arith::psi((n1 / lambda) * (n1 / lambda)))
        * Rat::from(arith::euler_phi(n1 / lambda))
        / Rat::from(arith::psi(n1 * n1));
    Ok(front * (-t_trace + t_id - t_hyp + t_dual))
}

// ---------------------------------------------------------------------------
// Gamma_0(N), chi engine (floating-point oracle)
// ---------------------------------------------------------------------------

/// Tr(T_q | S_k(Gamma_0(level), chi)) as a complex number; chi has modulus
/// dividing `level` and is extended to level by zero on non-units.
pub fn trace_gamma0_chi_complex(q: u64, level: u64, k: u32, chi: &DirichletChar) -> Complex64 {
    assert!(level % chi.modulus() == 0 && arith::gcd(q, level) == 1 && k >= 2);
    let sign = if k % 2 == 0 { 1 } else { -1 };
    if chi.parity() != sign {
        return Complex64::new(0.0, 0.0);
    }
    let eval = |a: u64| -> Complex64 {
        if arith::gcd(a % level.max(1), level) != 1 && level > 1 {
            Complex64::new(0.0, 0.0)
        } else {
            chi.eval(a % chi.modulus().max(1))
        }
    };

    // Identity.
    let identity = match arith::exact_sqrt(q) {
        None => Complex64::new(0.0, 0.0),
        Some(s) => {
            let scale = (k - 1) as f64 / 12.0
                * arith::psi(level) as f64
                * (s as f64).powi(k as i32 - 2);
            eval(s) * scale
        }
    };

    // Elliptic: -(1/2) sum_t U_{k-2}(t,q) sum_{m^2 | t^2-4q} h_w(..) mu_chi.
    let mut elliptic = Complex64::new(0.0, 0.0);
    for t in t_range(q) {
        let delta = t * t - 4 * q as i64;
        let u = big_to_f64(&crate::chebyshev::u_int(k - 2, t, q as i64));
        let mut msum = Complex64::new(0.0, 0.0);
        let mut m = 1i64;
        while m * m <= -delta {
            if delta % (m * m) == 0 {
                let hw = classnum::h_w(delta / (m * m));
                if !hw.is_zero() {
                    let g = arith::gcd(level, m as u64);
                    let scale = arith::psi(level) as f64 / arith::psi(level / g) as f64;
                    let mut csum = Complex64::new(0.0, 0.0);
                    for c in hecke_poly_roots(t, q, level, g) {
                        csum += eval(c);
                    }
                    msum += csum * scale * hw.to_f64();
                }
            }
            m += 1;
        }
        elliptic += msum * u;
    }
    elliptic *= 0.5;

    // Hyperbolic.
    let cond = chi.conductor();
    let mut hyperbolic = Complex64::new(0.0, 0.0);
    for b in arith::divisors(q) {
        let weight = (std::cmp::min(b, q / b) as f64).powi(k as i32 - 1);
        let diff = b as i64 - (q / b) as i64;
        let mut inner = Complex64::new(0.0, 0.0);
        for tau in arith::divisors(level) {
            let g = arith::gcd(tau, level / tau);
            if (level / cond) % g != 0 {
                continue;
            }
            if diff != 0 && diff.rem_euclid(g as i64) != 0 {
                continue;
            }
            let (y, _) = arith::crt_unique(&[
                ((b % tau) as i64, tau),
                (((q / b) % (level / tau)) as i64, level / tau),
            ])
            .expect("compatible residues");
            inner += eval(y) * arith::euler_phi(g) as f64;
        }
        hyperbolic += inner * weight;
    }
    hyperbolic *= 0.5;

    // Dual.
    let mut dual = Complex64::new(0.0, 0.0);
    if k == 2 && chi.is_trivial() {
        let mut s = 0u64;
        for c in arith::divisors(q) {
            if arith::gcd(level, q / c) == 1 {
                s += c;
            }
        }
        dual = Complex64::new(s as f64, 0.0);
    }

    identity - elliptic - hyperbolic + dual
}

/// Distinct residues c in (Z/level)^x lifting to roots of X^2 - tX + q
/// modulo level * g.
fn hecke_poly_roots(t: i64, q: u64, level: u64, g: u64) -> Vec<u64> {
    let m2 = (level * g) as i64;
    let mut out = Vec::new();
    for x in 0..m2 {
        if (x * x - t * x + q as i64).rem_euclid(m2) == 0 {
            let c = (x as u64) % level;
            if arith::gcd(c, level) == 1 || level == 1 {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

fn big_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().expect("fits in f64")
}

fn round_to_twelfths(x: f64) -> Option<Rat> {
    let r = (x * 12.0).round();
    if (x - r / 12.0).abs() < CHI_ROUND_TOL {
        Some(Rat::new(r as i64, 12))
    } else {
        None
    }
}

/// Tr(T_q | S_k(Gamma_0(level), chi)) rounded to the nearest rational with
/// denominator dividing 12; only meaningful when the trace is real (e.g.
/// real-valued chi). Errors when the value is not within tolerance of such
/// a rational.
pub fn trace_gamma0_chi(q: u64, level: u64, k: u32, chi: &DirichletChar) -> Result<Rat, TraceError> {
    let z = trace_gamma0_chi_complex(q, level, k, chi);
    if z.im.abs() > CHI_ROUND_TOL {
        return Err(TraceError::ToleranceExceeded(z.im, CHI_ROUND_TOL));
    }
    round_to_twelfths(z.re).ok_or(TraceError::ToleranceExceeded(z.re, CHI_ROUND_TOL))
}

/// Per-character traces at level N*M for all chi mod N.
pub fn gamma0_char_traces(
    q: u64,
    n: u64,
    m: u64,
    k: u32,
) -> Result<Vec<(DirichletChar, Complex64)>, TraceError> {
    let chars = crate::dirichlet::enumerate_chars(n)?;
    Ok(chars
        .into_iter()
        .map(|chi| {
            let tr = trace_gamma0_chi_complex(q, n * m, k, &chi);
            (chi, tr)
        })
        .collect())
}

/// sum_{chi mod N} chi(d) Tr(T_q | S_k(Gamma_0(NM), chi)), rounded; this is
/// the character-decomposition route to Tr(<d> T_q | S_k(Gamma(N,M))).
pub fn gamma_nm_from_chars(q: u64, n: u64, m: u64, d: u64, k: u32) -> Result<Rat, TraceError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (chi, tr) in gamma0_char_traces(q, n, m, k)? {
        acc += chi.eval(d % n.max(1)) * tr;
    }
    if acc.im.abs() > CHI_ROUND_TOL {
        return Err(TraceError::ToleranceExceeded(acc.im, CHI_ROUND_TOL));
    }
    round_to_twelfths(acc.re).ok_or(TraceError::ToleranceExceeded(acc.re, CHI_ROUND_TOL))
}

// ---------------------------------------------------------------------------
// Ramanujan tau oracle
// ---------------------------------------------------------------------------

/// tau(n) for n <= 60, read off the q-expansion of
/// Delta = q prod_{m >= 1} (1 - q^m)^24 by exact series multiplication.
pub fn ramanujan_tau(n: u64) -> i64 {
    assert!(n >= 1 && n <= TAU_CEILING, "tau oracle bounded to n <= {TAU_CEILING}");
    let len = TAU_CEILING as usize;
    // eta-without-q^{1/24}: prod (1 - q^m) truncated
    let mut eta = vec![0i128; len];
    eta[0] = 1;
    for m in 1..len {
        // multiply by (1 - q^m)
        for i in (m..len).rev() {
            let t = eta[i - m];
            eta[i] -= t;
        }
    }
    let mul = |a: &[i128], b: &[i128]| -> Vec<i128> {
        let mut out = vec![0i128; len];
        for i in 0..len {
            if a[i] == 0 {
                continue;
            }
            for j in 0..len - i {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    };
    let e2 = mul(&eta, &eta);
    let e4 = mul(&e2, &e2);
    let e8 = mul(&e4, &e4);
    let e16 = mul(&e8, &e8);
    let e24 = mul(&e16, &e8);
    i64::try_from(e24[(n - 1) as usize]).expect("tau fits in i64")
}

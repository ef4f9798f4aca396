//! Normalized Chebyshev polynomials of the second kind U_j(t,q), the
//! power-to-Chebyshev coefficients a_{R,j}, c_{R,j}, Catalan numbers,
//! and the level-1 combination rho(q,k).
//!
//! U_j(t,q) satisfies U_0 = 1, U_1 = t, U_{j+1} = t U_j - q U_{j-1}; this is
//! the integer form of q^{j/2} U_j(t / 2 sqrt(q)) and equals
//! (alpha^{j+1} - conj(alpha)^{j+1}) / (alpha - conj(alpha)) for the roots
//! alpha of X^2 - tX + q. No square roots or floats are used anywhere.

use crate::arith::{self, Rat};
use crate::traceformula::{self, QArg};
use num_bigint::BigInt;

/// U_j(t,q) over big integers by the three-term recurrence.
pub fn u_int(j: u32, t: i64, q: i64) -> BigInt {
    u_big(j, &BigInt::from(t), &BigInt::from(q))
}

/// U_j(t,q) with big-integer arguments.
pub fn u_big(j: u32, t: &BigInt, q: &BigInt) -> BigInt {
    let mut prev = BigInt::from(1);
    if j == 0 {
        return prev;
    }
    let mut cur = t.clone();
    for _ in 1..j {
        let next = t * &cur - q * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// U_j(t,q) over exact rationals.
pub fn u_rat(j: u32, t: &Rat, q: &Rat) -> Rat {
    let mut prev = Rat::one();
    if j == 0 {
        return prev;
    }
    let mut cur = t.clone();
    for _ in 1..j {
        let next = t * &cur - q * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Binomial coefficient.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::from(0);
    }
    let k = k as u64;
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// a_{R,j} = binom(2R,j) - binom(2R,j-1) = (2R-2j+1)/(2R+1) binom(2R+1,j).
pub fn a_coeff(r: u32, j: u32) -> BigInt {
    binomial(2 * r as u64, j as i64) - binomial(2 * r as u64, j as i64 - 1)
}

/// Chebyshev coefficient c_{R,j}: a_{R/2,j} for even R,
/// a_{(R-1)/2,j} + a_{(R-1)/2,j-1} for odd R.
pub fn c_coeff(r: u32, j: u32) -> BigInt {
    if r % 2 == 0 {
        a_coeff(r / 2, j)
    } else {
        let half = (r - 1) / 2;
        let upper = if j == 0 { BigInt::from(0) } else { a_coeff(half, j - 1) };
        a_coeff(half, j) + upper
    }
}

/// Catalan number C_R = a_{R,R} = binom(2R,R)/(R+1).
pub fn catalan(r: u32) -> BigInt {
    a_coeff(r, r)
}

/// The coefficient families for one R, bundled.
#[derive(Debug, Clone)]
pub struct ChebCoeffs {
    pub r: u32,
    pub a: Vec<BigInt>,
    pub c: Vec<BigInt>,
    pub catalan: BigInt,
}

impl ChebCoeffs {
    pub fn new(r: u32) -> ChebCoeffs {
        ChebCoeffs {
            r,
            a: (0..=r).map(|j| a_coeff(r, j)).collect(),
            c: (0..=r / 2).map(|j| c_coeff(r, j)).collect(),
            catalan: catalan(r),
        }
    }
}

/// Coefficients (j, c_{R,j}) such that t^R = sum_j c_{R,j} q^j U_{R-2j}(t,q).
pub fn expand_power(r: u32) -> Vec<(u32, BigInt)> {
    (0..=r / 2).map(|j| (j, c_coeff(r, j))).collect()
}

/// rho(q,k) = -Tr(T_q | S_k(SL_2(Z))) + (k-1)/12 q^{k/2-1} [q square]
///            - 1/2 sum_{0<=i<=v} min(p^i,p^{v-i})^{k-1} + sigma(q) [k=2],
/// with rho(p^{-1},k) = 0. Defined for prime powers q and q = 1.
pub fn rho(q: QArg, k: u32) -> Result<Rat, traceformula::TraceError> {
    let q = match q {
        QArg::PInverse => return Ok(Rat::zero()),
        QArg::Pos(q) => q,
    };
    let tr = traceformula::trace_gamma_nm(&traceformula::TraceRequest {
        q,
        level_n: 1,
        level_m: 1,
        d: 1,
        k,
    })?
    .total;
    let mut acc = -tr;
    if let Some(s) = arith::exact_sqrt(q) {
        // q^{k/2-1} = s^{k-2}
        acc = acc + Rat::new((k - 1) as i64, 12) * Rat::from_bigint(BigInt::from(s).pow(k - 2));
    }
    let (p, v) = if q == 1 { (1, 0) } else { arith::prime_power(q).expect("prime power") };
    let mut hyp = Rat::zero();
    for i in 0..=v {
        let m = std::cmp::min(arith::pow_u64(p, i), arith::pow_u64(p, v - i));
        hyp = hyp + Rat::from_bigint(BigInt::from(m).pow(k - 1));
    }
    acc = acc - Rat::new(1, 2) * hyp;
    if k == 2 {
        acc = acc + Rat::from(arith::sigma(q));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn base_cases() {
        assert_eq!(u_int(0, 3, 5), BigInt::from(1));
        assert_eq!(u_int(1, 3, 5), BigInt::from(3));
        // U_2 = t^2 - q
        for t in -5..=5i64 {
            for q in 1..=9i64 {
                assert_eq!(u_int(2, t, q), BigInt::from(t * t - q));
            }
        }
    }

    #[test]
    fn value_at_edge_of_hasse_interval() {
        // U_{k-2}(2 sqrt(q), q) = (k-1) q^{(k-2)/2} at square q = 9
        for k in 2..=6u32 {
            let expect = BigInt::from(k - 1) * BigInt::from(3).pow(k - 2);
            assert_eq!(u_int(k - 2, 6, 9), expect);
            let odd = BigInt::from(k as i64 - 1) * BigInt::from(-3).pow(k - 2);
            assert_eq!(u_int(k - 2, -6, 9), odd);
        }
    }

    #[test]
    fn parity() {
        for j in 0..=12u32 {
            for &(t, q) in &[(1i64, 2i64), (3, 5), (-4, 7), (5, 11), (2, 13)] {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                assert_eq!(u_int(j, -t, q), u_int(j, t, q) * sign);
            }
        }
    }

    #[test]
    fn a_coeff_closed_form_agrees() {
        // (2R-2j+1)/(2R+1) binom(2R+1,j) as an exact rational
        for r in 0..=8u32 {
            for j in 0..=r {
                let alt = Rat::from_bigint(binomial(2 * r as u64 + 1, j as i64))
                    * Rat::new(2 * (r as i64 - j as i64) + 1, 2 * r as i64 + 1);
                assert_eq!(Rat::from_bigint(a_coeff(r, j)), alt);
            }
        }
    }

    #[test]
    fn catalan_values() {
        let expect = [1i64, 1, 2, 5, 14, 42, 132];
        for (r, &c) in expect.iter().enumerate() {
            assert_eq!(catalan(r as u32), BigInt::from(c));
        }
    }

    /// Independent expansion of t^R in the U basis via t*U_j = U_{j+1} + q*U_{j-1},
    /// kept as a map from Chebyshev index to a polynomial-in-q coefficient.
    fn expand_by_recurrence(r: u32) -> Vec<(u32, BigInt)> {
        // coeffs[idx] = vector of q-coefficients; start with t^0 = U_0
        use std::collections::BTreeMap;
        let mut cur: BTreeMap<u32, Vec<BigInt>> = BTreeMap::new();
        cur.insert(0, vec![BigInt::from(1)]);
        for _ in 0..r {
            let mut next: BTreeMap<u32, Vec<BigInt>> = BTreeMap::new();
            for (idx, poly) in &cur {
                // t * U_idx = U_{idx+1} + q U_{idx-1}   (U_{-1} = 0)
                let e = next.entry(idx + 1).or_default();
                add_poly(e, poly, 0);
                if *idx > 0 {
                    let e = next.entry(idx - 1).or_default();
                    add_poly(e, poly, 1);
                }
            }
            cur = next;
        }
        // Entries must be monomials c q^j with idx = R - 2j.
        let mut out = Vec::new();
        for (idx, poly) in cur {
            let j = (r - idx) / 2;
            for (deg, c) in poly.iter().enumerate() {
                if !c.is_zero() {
                    assert_eq!(deg as u32, j);
                    out.push((j, c.clone()));
                }
            }
        }
        out.sort_by_key(|&(j, _)| j);
        out
    }

    use num_traits::Zero;

    fn add_poly(target: &mut Vec<BigInt>, src: &[BigInt], shift: usize) {
        if target.len() < src.len() + shift {
            target.resize(src.len() + shift, BigInt::zero());
        }
        for (i, c) in src.iter().enumerate() {
            target[i + shift] += c;
        }
    }

    #[test]
    fn expand_power_matches_recurrence_oracle() {
        for r in 0..=10u32 {
            assert_eq!(expand_power(r), expand_by_recurrence(r), "R = {r}");
        }
    }

    #[test]
    fn expansion_identity_at_sample_points() {
        // t^R = sum_j c_{R,j} q^j U_{R-2j}(t,q), exact at 20 pseudo-random points
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for r in 0..=10u32 {
            for _ in 0..20 {
                let t = (next() % 41) as i64 - 20;
                let q = (next() % 30) as i64 + 1;
                let lhs = rat(t).pow(r as i32);
                let rhs: Rat = expand_power(r)
                    .into_iter()
                    .map(|(j, c)| {
                        Rat::from_bigint(c)
                            * rat(q).pow(j as i32)
                            * Rat::from_bigint(u_int(r - 2 * j, t, q))
                    })
                    .sum();
                assert_eq!(lhs, rhs, "R={r} t={t} q={q}");
            }
        }
    }

    #[test]
    fn hasse_interval_bound() {
        // |U_{k-2}(t,q)| <= (k-1) q^{(k-2)/2} for t^2 <= 4q: compare squares.
        for q in [2i64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49] {
            for k in 2..=10u32 {
                let bound_sq = BigInt::from((k - 1) as i64).pow(2) * BigInt::from(q).pow(k - 2);
                let tmax = (4.0 * q as f64).sqrt() as i64;
                for t in -tmax..=tmax {
                    if t * t > 4 * q {
                        continue;
                    }
                    let u = u_int(k - 2, t, q);
                    assert!(&u * &u <= bound_sq, "k={k} t={t} q={q}");
                }
            }
        }
    }
}

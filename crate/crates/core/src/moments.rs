//! Moments of Frobenius traces over curves with a prescribed subgroup:
//! the main-theorem evaluation of E_q(U_{k-2}(t_E,q) Phi_A) from Hecke
//! traces, power moments through the Chebyshev expansion, and the
//! equidistribution gap of the corollary.

use crate::arith::{self, Rat};
use crate::census::CensusTable;
use crate::chebyshev;
use crate::classnum::GroupSpec;
use crate::traceformula::{t_family, QArg, TraceError};
use num_bigint::BigInt;

#[derive(Debug, thiserror::Error)]
pub enum MomentError {
    #[error("moment hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Evaluation route for a moment query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Census,
    Formula,
    Both,
}

/// E_q(U_{k-2}(t_E,q) Phi_A) by the main theorem: zero unless
/// q = 1 (mod n2), otherwise a phi-hat-weighted sum of T_{n1, n2 nu} at q
/// and at q/p^2, plus the supersingular square-q corner term.
pub fn moment_mt(q: u64, a: &GroupSpec, k: u32) -> Result<Rat, MomentError> {
    let (p, v) = arith::prime_power(q)
        .ok_or_else(|| MomentError::HypothesisViolated(format!("q = {q} not a prime power")))?;
    if arith::gcd(q, a.order()) != 1 {
        return Err(MomentError::HypothesisViolated(format!(
            "gcd(q, |A|) = {} != 1",
            arith::gcd(q, a.order())
        )));
    }
    if k < 2 {
        return Err(MomentError::HypothesisViolated(format!("k = {k} < 2")));
    }
    if q % a.n2 != 1 % a.n2 {
        return Ok(Rat::zero());
    }
    let l = arith::gcd(q - 1, a.n1);
    let q_down = if v >= 2 { QArg::Pos(arith::pow_u64(p, v - 2)) } else { QArg::PInverse };
    let pk1 = Rat::from_bigint(BigInt::from(p).pow(k - 1));
    let mut acc = Rat::zero();
    for nu in arith::divisors(l / a.n2) {
        let lambda = a.n2 * nu;
        let t1 = t_family(a.n1, lambda, QArg::Pos(q), 1, k)?;
        let t2 = t_family(a.n1, lambda, q_down, p, k)?;
        acc = acc + Rat::from_int(arith::phi_hat(nu as i64).unwrap()) * (t1 - &pk1 * t2);
    }
    let mut out = acc / (Rat::from(q) * Rat::from(arith::euler_phi(a.n1 / a.n2)));
    if let Some(s) = arith::exact_sqrt(q) {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let plus = (s % a.n1 == 1 % a.n1) as i64;
        let minus = (s % a.n1 == (a.n1 - 1) % a.n1) as i64;
        out = out
            + Rat::from_bigint(BigInt::from(s).pow(k - 2))
                * Rat::new((p - 1) as i64 * (k - 1) as i64, 24)
                / Rat::from(q)
                * Rat::from_int(plus + sign * minus);
    }
    Ok(out)
}

/// E_q(t^R Phi_A) by the requested route; `Both` asserts exact agreement and
/// returns the common value.
pub fn moment_power(
    q: u64,
    a: &GroupSpec,
    r: u32,
    method: Method,
    table: Option<&CensusTable>,
) -> Result<Rat, MomentError> {
    let census = |tab: &CensusTable| tab.moment_power(a, r);
    let formula = || -> Result<Rat, MomentError> {
        let mut acc = Rat::zero();
        for (j, c) in chebyshev::expand_power(r) {
            acc = acc
                + Rat::from_bigint(c)
                    * Rat::from(q).pow(j as i32)
                    * moment_mt(q, a, r - 2 * j + 2)?;
        }
        Ok(acc)
    };
    match method {
        Method::Census => {
            let tab = table.ok_or_else(|| {
                MomentError::HypothesisViolated("census method needs a census table".into())
            })?;
            Ok(census(tab))
        }
        Method::Formula => formula(),
        Method::Both => {
            let tab = table.ok_or_else(|| {
                MomentError::HypothesisViolated("census method needs a census table".into())
            })?;
            let c = census(tab);
            let f = formula()?;
            if c != f {
                return Err(MomentError::HypothesisViolated(format!(
                    "census {c} != formula {f} at q={q} A=({},{}) R={r}",
                    a.n1, a.n2
                )));
            }
            Ok(c)
        }
    }
}

/// The main-term constant v(n1,n2) of the equidistribution corollary,
/// for q = 1 (mod n2).
pub fn v_const(q: u64, a: &GroupSpec) -> Rat {
    let l = arith::gcd(q - 1, a.n1);
    let mut v = Rat::from(a.n1)
        / (Rat::from(arith::psi(a.n1)) * Rat::from(arith::euler_phi(a.n1)) * Rat::from(a.n2 * a.n2));
    for (ell, _) in arith::factorize(a.n1 / l) {
        let e = arith::valuation(l / a.n2, ell);
        v = v * (Rat::one() + Rat::one() / Rat::from(ell).pow(1 + 2 * e as i32));
    }
    v
}

/// moment_mt minus its k = 2 main term v(n1,n2); the remainder obeys
/// |gap| <= 10 k n2 n1^3 q^{(k-3)/2}.
pub fn corollary_gap(q: u64, a: &GroupSpec, k: u32) -> Result<Rat, MomentError> {
    if q % a.n2 != 1 % a.n2 {
        return Err(MomentError::HypothesisViolated(format!(
            "corollary requires q = 1 mod n2, got q = {q}, n2 = {}",
            a.n2
        )));
    }
    let mut gap = moment_mt(q, a, k)?;
    if k == 2 {
        gap = gap - v_const(q, a);
    }
    Ok(gap)
}

/// The frozen envelope constant for `corollary_gap`.
pub fn corollary_gap_bound(q: u64, a: &GroupSpec, k: u32) -> f64 {
    10.0 * k as f64 * a.n2 as f64 * (a.n1 as f64).powi(3) * (q as f64).powf((k as f64 - 3.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{frac, rat};
    use crate::census::enumerate_census;
    use crate::classnum::{h_mod, h_star, omega_a, omega_star_a, sigma_sum, ModClassContext};

    fn groups_up_to(n1max: u64) -> Vec<GroupSpec> {
        let mut out = Vec::new();
        for n1 in 1..=n1max {
            for n2 in arith::divisors(n1) {
                out.push(GroupSpec::new(n1, n2).unwrap());
            }
        }
        out
    }

    #[test]
    fn vanishing_when_q_not_one_mod_n2() {
        let a = GroupSpec::new(3, 3).unwrap();
        assert_eq!(moment_mt(5, &a, 2).unwrap(), Rat::zero());
        let table = enumerate_census(5).unwrap();
        assert_eq!(table.moment_u(&a, 2), Rat::zero());
    }

    #[test]
    fn main_theorem_matches_census_spot() {
        for q in [5u64, 7, 9] {
            let table = enumerate_census(q).unwrap();
            for a in groups_up_to(4) {
                if arith::gcd(q, a.order()) != 1 {
                    continue;
                }
                for k in 2..=5u32 {
                    assert_eq!(
                        moment_mt(q, &a, k).unwrap(),
                        table.moment_u(&a, k),
                        "q={q} A=({},{}) k={k}",
                        a.n1,
                        a.n2
                    );
                }
            }
        }
    }

    #[test]
    fn birch_moments_via_formula() {
        // p E_p(t^2) = p^2 - 1 and p E_p(t^4) = 2p^3 - 3p - 1
        let trivial = GroupSpec::trivial();
        for p in [5i64, 7, 11, 13] {
            let table = enumerate_census(p as u64).unwrap();
            let m2 = moment_power(p as u64, &trivial, 2, Method::Both, Some(&table)).unwrap();
            assert_eq!(rat(p) * m2, rat(p * p - 1));
            let m4 = moment_power(p as u64, &trivial, 4, Method::Both, Some(&table)).unwrap();
            assert_eq!(rat(p) * m4, rat(2 * p * p * p - 3 * p - 1));
        }
    }

    #[test]
    fn odd_moments_vanish_both_routes() {
        let trivial = GroupSpec::trivial();
        let table = enumerate_census(7).unwrap();
        for r in [1u32, 3, 5] {
            assert_eq!(
                moment_power(7, &trivial, r, Method::Both, Some(&table)).unwrap(),
                Rat::zero()
            );
        }
    }

    #[test]
    fn general_q_second_moment_with_square_correction() {
        // q = 9, R = 1 in the even-exponent convention: E_q(t^2)
        let trivial = GroupSpec::trivial();
        let table = enumerate_census(9).unwrap();
        let formula = moment_power(9, &trivial, 2, Method::Both, Some(&table)).unwrap();
        assert_eq!(formula, table.moment_power(&trivial, 2));
    }

    #[test]
    fn birch_ihara_reconstruction_from_rho() {
        // E_q(t^{2R}) = sum_j a_{R,j} q^{j-1} (rho(q, 2R-2j+2)
        //               - p^{2R-2j+1} rho(q/p^2, 2R-2j+2))
        //               + (p-1)/(12q) (4q)^R [v even]
        for q in [5u64, 7, 9, 11, 13, 25] {
            let (p, v) = arith::prime_power(q).unwrap();
            let table = enumerate_census(q).unwrap();
            for r in 0..=5u32 {
                let mut acc = Rat::zero();
                for j in 0..=r {
                    let k = 2 * r - 2 * j + 2;
                    let down = if v >= 2 { QArg::Pos(arith::pow_u64(p, v - 2)) } else { QArg::PInverse };
                    let term = chebyshev::rho(QArg::Pos(q), k).unwrap()
                        - Rat::from_bigint(BigInt::from(p).pow(2 * r - 2 * j + 1))
                            * chebyshev::rho(down, k).unwrap();
                    acc = acc
                        + Rat::from_bigint(chebyshev::a_coeff(r, j))
                            * Rat::from(q).pow(j as i32 - 1)
                            * term;
                }
                if v % 2 == 0 {
                    acc = acc
                        + Rat::new((p - 1) as i64, 12 * q as i64)
                            * Rat::from(4 * q).pow(r as i32);
                }
                assert_eq!(
                    acc,
                    table.moment_power(&GroupSpec::trivial(), 2 * r),
                    "q={q} R={r}"
                );
            }
        }
    }

    #[test]
    fn proposition_counting_curves_matches_class_numbers() {
        // Ordinary: q P_q(C(A,t)) = H_{n1,n2}(t,q,1) for p not dividing t;
        // supersingular: q P_q = H*_{n1,n2}(t,q,1) for t^2 < 4q and the
        // (p-1)/24 corner at t^2 = 4q.
        for q in [5u64, 7, 9, 11, 25, 8, 27] {
            let (p, _) = arith::prime_power(q).unwrap();
            let table = enumerate_census(q).unwrap();
            for a in groups_up_to(6) {
                if arith::gcd(q, a.order()) != 1 {
                    continue;
                }
                let ctx = ModClassContext::new(a.n1, a.n2, q, 1).unwrap();
                let tmax = (4.0 * q as f64).sqrt() as i64 + 1;
                for t in -tmax..=tmax {
                    if t * t > 4 * q as i64 {
                        continue;
                    }
                    let prob = table.prob(|c| c.t == t && crate::census::phi_a(c, &a));
                    if t * t == 4 * q as i64 {
                        let s = arith::exact_sqrt(q).unwrap() as i64;
                        let sgn = if t > 0 { s } else { -s };
                        let expect = if sgn.rem_euclid(a.n1 as i64) == 1 % a.n1 as i64 {
                            frac((p - 1) as i64, 24 * q as i64)
                        } else {
                            Rat::zero()
                        };
                        assert_eq!(prob, expect, "corner q={q} t={t} A=({},{})", a.n1, a.n2);
                        continue;
                    }
                    let expect = if t.rem_euclid(p as i64) == 0 {
                        h_star(&ctx, t).unwrap()
                    } else {
                        h_mod(&ctx, t).unwrap()
                    } / Rat::from(q);
                    assert_eq!(prob, expect, "q={q} t={t} A=({},{})", a.n1, a.n2);
                }
            }
        }
    }

    #[test]
    fn proposition_assembly_omega_sigma() {
        // omega_A(q,1) + omega*_A(q,1) = Sigma(q,1) - p^{k-1} Sigma(q/p^2, p)
        for q in [5u64, 7, 9, 25, 27, 8] {
            let (p, v) = arith::prime_power(q).unwrap();
            for a in groups_up_to(4) {
                if arith::gcd(q, a.order()) != 1 {
                    continue;
                }
                for k in [2u32, 3, 5] {
                    let ctx = ModClassContext::new(a.n1, a.n2, q, 1).unwrap();
                    let lhs = omega_a(&ctx, k).unwrap() + omega_star_a(&ctx, k).unwrap();
                    let down = if v >= 2 { QArg::Pos(arith::pow_u64(p, v - 2)) } else { QArg::PInverse };
                    let rhs = sigma_sum(a.n1, a.n2, QArg::Pos(q), 1, k).unwrap()
                        - Rat::from_bigint(BigInt::from(p).pow(k - 1))
                            * sigma_sum(a.n1, a.n2, down, p, k).unwrap();
                    assert_eq!(lhs, rhs, "q={q} A=({},{}) k={k}", a.n1, a.n2);
                }
            }
        }
    }

    #[test]
    fn assembly_split_identities() {
        // The two halves of the assembly: Sigma(q,1) equals the sum of
        // p-power-scaled omega terms plus an explicit square-q correction,
        // and the same with the q/p^2 shift.
        for q in [8u64, 9, 25, 27, 49] {
            let (p, v) = arith::prime_power(q).unwrap();
            for a in groups_up_to(3) {
                if arith::gcd(q, a.order()) != 1 {
                    continue;
                }
                for k in [2u32, 3, 4] {
                    let correction = |include: bool| -> Rat {
                        if !include || v % 2 == 1 || a.n2 != 1 {
                            return Rat::zero();
                        }
                        let s = arith::exact_sqrt(q).unwrap();
                        let ctx = ModClassContext::new(a.n1, a.n2, q, 1).unwrap();
                        let u0 = Rat::from_bigint(chebyshev::u_int(k - 2, 0, q as i64));
                        let up = Rat::from_bigint(chebyshev::u_int(k - 2, s as i64, q as i64));
                        let um = Rat::from_bigint(chebyshev::u_int(k - 2, -(s as i64), q as i64));
                        let d0 = crate::classnum::d_indicator(&ctx, 0, a.n1).unwrap() as i64;
                        let dp = crate::classnum::d_indicator(&ctx, s as i64, a.n1).unwrap() as i64;
                        let dm =
                            crate::classnum::d_indicator(&ctx, -(s as i64), a.n1).unwrap() as i64;
                        Rat::new(1, 2)
                            * Rat::from_bigint(BigInt::from(p).pow(v / 2))
                            * (frac(1, 2) * u0 * rat(d0)
                                + frac(1, 3) * up * rat(dp)
                                + frac(1, 3) * um * rat(dm))
                    };
                    // first identity
                    let mut rhs = correction(true);
                    let mut i = 0;
                    while 2 * i < v {
                        let qq = arith::pow_u64(p, v - 2 * i);
                        let di = arith::pow_u64(p, i) % a.n1.max(1);
                        let ctx = ModClassContext::new(a.n1, a.n2, qq, di.max(1)).unwrap();
                        let scale = Rat::from_bigint(BigInt::from(p).pow(i * (k - 1)));
                        rhs = rhs
                            + &scale * omega_a(&ctx, k).unwrap()
                            + scale * omega_star_a(&ctx, k).unwrap();
                        i += 1;
                    }
                    let lhs = sigma_sum(a.n1, a.n2, QArg::Pos(q), 1, k).unwrap();
                    assert_eq!(lhs, rhs, "first split at q={q} A=({},{}) k={k}", a.n1, a.n2);

                    // second identity
                    let down = if v >= 2 { QArg::Pos(arith::pow_u64(p, v - 2)) } else { QArg::PInverse };
                    let lhs2 = Rat::from_bigint(BigInt::from(p).pow(k - 1))
                        * sigma_sum(a.n1, a.n2, down, p, k).unwrap();
                    let mut rhs2 = correction(true);
                    let mut i = 1;
                    while 2 * i < v {
                        let qq = arith::pow_u64(p, v - 2 * i);
                        let di = arith::pow_u64(p, i) % a.n1.max(1);
                        let ctx = ModClassContext::new(a.n1, a.n2, qq, di.max(1)).unwrap();
                        let scale = Rat::from_bigint(BigInt::from(p).pow(i * (k - 1)));
                        rhs2 = rhs2
                            + &scale * omega_a(&ctx, k).unwrap()
                            + scale * omega_star_a(&ctx, k).unwrap();
                        i += 1;
                    }
                    assert_eq!(lhs2, rhs2, "second split at q={q} A=({},{}) k={k}", a.n1, a.n2);
                }
            }
        }
    }

    #[test]
    fn corollary_gap_envelope() {
        for q in [5u64, 7, 9, 13, 25] {
            for a in groups_up_to(4) {
                if arith::gcd(q, a.order()) != 1 || q % a.n2 != 1 % a.n2 {
                    continue;
                }
                for k in [2u32, 3, 4] {
                    let gap = corollary_gap(q, &a, k).unwrap();
                    let bound = corollary_gap_bound(q, &a, k);
                    assert!(
                        gap.to_f64().abs() <= bound,
                        "gap {gap} exceeds {bound} at q={q} A=({},{}) k={k}",
                        a.n1,
                        a.n2
                    );
                }
            }
        }
    }

    #[test]
    fn catalan_limit_envelope() {
        // |E_q(t^{2R})/q^R - C_R| <= 4^R * 3 / sqrt(q)
        let trivial = GroupSpec::trivial();
        for q in [5u64, 9, 13, 25] {
            let table = enumerate_census(q).unwrap();
            for r in 0..=4u32 {
                let m = table.moment_power(&trivial, 2 * r) / Rat::from(q).pow(r as i32);
                let c = Rat::from_bigint(chebyshev::catalan(r));
                let err = (m - c).to_f64().abs();
                assert!(err <= 4f64.powi(r as i32) * 3.0 / (q as f64).sqrt(), "q={q} R={r}");
            }
        }
    }

    #[test]
    fn monotone_support() {
        // Phi_A >= Phi_A' pointwise when A | A' componentwise, so k = 2
        // census moments are monotone
        let table = enumerate_census(13).unwrap();
        let pairs = [((1u64, 1u64), (2u64, 1u64)), ((2, 1), (4, 1)), ((2, 1), (2, 2)), ((3, 1), (6, 1))];
        for ((a1, a2), (b1, b2)) in pairs {
            let small = GroupSpec::new(a1, a2).unwrap();
            let big = GroupSpec::new(b1, b2).unwrap();
            assert!(table.moment_u(&small, 2) >= table.moment_u(&big, 2));
        }
    }

    #[test]
    fn trivial_bound_on_census_moments() {
        // |E_q(U_{k-2} Phi_A)|^2 <= q^{k-2}
        for q in [5u64, 8, 9] {
            let table = enumerate_census(q).unwrap();
            for a in groups_up_to(4) {
                for k in 2..=6u32 {
                    let m = table.moment_u(&a, k);
                    assert!(
                        &m * &m <= Rat::from(q).pow(k as i32 - 2),
                        "trivial bound q={q} k={k}"
                    );
                }
            }
        }
    }

    use num_bigint::BigInt;
}

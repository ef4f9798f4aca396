//! Statistical applications over a fixed F_q: averages of the invariant
//! factors n1(E), n2(E), cyclicity and fixed-n2 moments, and the local
//! probabilities for the l-primary part of E(F_q).
//!
//! Census values are exact; the theorem main terms are exact rationals; the
//! asymptotic content of each statement is certified by frozen enveloppe
//! constants, never by limits.

use crate::arith::{self, Rat};
use crate::census::CensusTable;
use crate::classnum::GroupSpec;
use crate::moments::{moment_mt, MomentError};

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("stats hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("census/formula mismatch for {0}: census {1}, formula {2}")]
    Mismatch(String, Rat, Rat),
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// One statistic: its exact census value, the theorem's main term, and the
/// difference the error term must absorb.
#[derive(Debug, Clone)]
pub struct StatReport {
    pub q: u64,
    pub statistic: String,
    pub census_value: Rat,
    pub formula_main_term: Rat,
    pub gap: Rat,
}

impl StatReport {
    fn new(q: u64, statistic: impl Into<String>, census: Rat, main: Rat) -> StatReport {
        let gap = &census - &main;
        StatReport { q, statistic: statistic.into(), census_value: census, formula_main_term: main, gap }
    }
}

/// c(q) = prod_{l^a || q-1} (1 - (1 - l^{-4a}) / (l^2 (l+1) (1 - l^{-4}))).
pub fn cq_constant(q: u64) -> Rat {
    assert!(q >= 2);
    let mut c = Rat::one();
    for (l, a) in arith::factorize(q - 1) {
        let l4 = Rat::from(l).pow(4);
        let ratio = (Rat::one() - Rat::from(l).pow(-4 * a as i32))
            / (Rat::one() - Rat::one() / l4);
        c = c * (Rat::one() - ratio / (Rat::from(l * l) * Rat::from(l + 1)));
    }
    c
}

/// b(q) = prod_{l^a || q-1} (1 + (1 - l^{-2a}) / (l (l+1) (1 - l^{-2}))).
pub fn bq_constant(q: u64) -> Rat {
    assert!(q >= 2);
    let mut b = Rat::one();
    for (l, a) in arith::factorize(q - 1) {
        let ratio = (Rat::one() - Rat::from(l).pow(-2 * a as i32))
            / (Rat::one() - Rat::from(l).pow(-2));
        b = b * (Rat::one() + ratio / (Rat::from(l) * Rat::from(l + 1)));
    }
    b
}

/// E_q(U_{k-2}(t_E,q) Phi(n2 = m)): census value against the fixed-n2 main
/// term, which is nonzero only in weight 2 and when m | q-1.
pub fn sigmrq(table: &CensusTable, m: u64, k: u32) -> StatReport {
    let q = table.q;
    let census = table.expect(|c| {
        if c.n2 == m {
            Rat::from_bigint(crate::chebyshev::u_int(k - 2, c.t, q as i64))
        } else {
            Rat::zero()
        }
    });
    let main = if k == 2 && (q - 1) % m == 0 {
        let mut prod = Rat::from(q + 1)
            / (Rat::from(q) * Rat::from(arith::psi(m * m)) * Rat::from(arith::euler_phi(m)));
        for (l, _) in arith::factorize((q - 1) / m) {
            let li = l as i64;
            if m % l == 0 {
                prod = prod * (Rat::one() - Rat::new(1, li * li * li));
            } else {
                prod = prod * (Rat::one() - Rat::new(1, li * (li * li - 1)));
            }
        }
        prod
    } else {
        Rat::zero()
    };
    StatReport::new(q, format!("sigmrq(m={m},k={k})"), census, main)
}

/// The stated admissible bound for the sigmrq gap: 5 k q^{(k-3)/2} tau(q-1) ln q.
pub fn sigmrq_gap_bound(q: u64, k: u32) -> f64 {
    5.0 * k as f64
        * (q as f64).powf((k as f64 - 3.0) / 2.0)
        * arith::divisor_count(q - 1) as f64
        * (q as f64).ln()
}

/// Census averages of n1(E) and n2(E) against the main terms c(q) q and
/// b(q) + (p/12) q^{-1/2} [q square].
pub fn invariant_averages(table: &CensusTable) -> (StatReport, StatReport) {
    let q = table.q;
    let (p, _) = arith::prime_power(q).expect("census q is a prime power");
    let e_n1 = table.expect(|c| Rat::from(c.n1));
    let e_n2 = table.expect(|c| Rat::from(c.n2));
    let main_n1 = cq_constant(q) * Rat::from(q);
    let mut main_n2 = bq_constant(q);
    if let Some(s) = arith::exact_sqrt(q) {
        main_n2 = main_n2 + Rat::from(p) / Rat::from(12 * s);
    }
    (
        StatReport::new(q, "E(n1)", e_n1, main_n1),
        StatReport::new(q, "E(n2)", e_n2, main_n2),
    )
}

/// Frozen envelopes for the invariant-factor averages.
pub fn n1_gap_bound(q: u64) -> f64 {
    10.0 * (q as f64).powf(0.6)
}

pub fn n2_gap_bound(q: u64) -> f64 {
    10.0 * (q as f64).powf(-0.2)
}

fn phi_expectation(q: u64, a: &GroupSpec) -> Result<Rat, StatsError> {
    Ok(moment_mt(q, a, 2)?)
}

/// P_q(l-part of E(F_q) is Z/l^alpha x Z/l^beta), computed both from the
/// census group structures and by inclusion-exclusion over moment_mt with
/// k = 2; the two routes must agree exactly.
pub fn gekeler_ellpart(
    table: &CensusTable,
    l: u64,
    alpha: u32,
    beta: u32,
) -> Result<Rat, StatsError> {
    let q = table.q;
    if beta > alpha || arith::gcd(l, q) != 1 || !arith::is_prime(l) {
        return Err(StatsError::HypothesisViolated(format!(
            "need beta <= alpha, l prime coprime to q; got l={l} alpha={alpha} beta={beta}"
        )));
    }
    let census = table.prob(|c| {
        arith::valuation(c.n1, l) == alpha && arith::valuation(c.n2, l) == beta
    });
    let a = |x: u32, y: u32| GroupSpec::new(arith::pow_u64(l, x), arith::pow_u64(l, y)).unwrap();
    let formula = if beta < alpha {
        phi_expectation(q, &a(alpha, beta))? - phi_expectation(q, &a(alpha + 1, beta))?
            - phi_expectation(q, &a(alpha, beta + 1))?
            + phi_expectation(q, &a(alpha + 1, beta + 1))?
    } else {
        phi_expectation(q, &a(alpha, alpha))? - phi_expectation(q, &a(alpha + 1, alpha))?
    };
    if census != formula {
        return Err(StatsError::Mismatch(
            format!("l-part({alpha},{beta}) at l={l} q={q}"),
            census,
            formula,
        ));
    }
    Ok(census)
}

/// P_q(N | #E(F_q)), from the census and by expanding the product formula
/// over the primes of N into Phi_A expectations; exact agreement is asserted.
pub fn divisibility_prob(table: &CensusTable, n: u64) -> Result<Rat, StatsError> {
    let q = table.q;
    if n == 0 || arith::gcd(n, q) != 1 {
        return Err(StatsError::HypothesisViolated(format!(
            "need N >= 1 coprime to q, got N={n}, q={q}"
        )));
    }
    let census = table.prob(|c| c.npoints % n == 0);
    // Per prime l with e = v_l(N): the condition v_l(#E) >= e is the union
    // over k <= e/2 of the embeddings Z/l^{e-k} x Z/l^k, and the union
    // telescopes as Phi_{A(e,0)} + sum_k (Phi_{A(e-k,k)} - Phi_{A(e-k+1,k)}).
    let mut terms: Vec<(u64, u64, i64)> = vec![(1, 1, 1)];
    for (l, e) in arith::factorize(n) {
        let mut local: Vec<(u32, u32, i64)> = vec![(e, 0, 1)];
        for k in 1..=e / 2 {
            local.push((e - k, k, 1));
            local.push((e - k + 1, k, -1));
        }
        let prev = terms;
        terms = Vec::new();
        for &(n1, n2, s) in &prev {
            for &(al, bl, sl) in &local {
                terms.push((
                    n1 * arith::pow_u64(l, al),
                    n2 * arith::pow_u64(l, bl),
                    s * sl,
                ));
            }
        }
    }
    let mut formula = Rat::zero();
    for (n1, n2, s) in terms {
        let a = GroupSpec::new(n1, n2).unwrap();
        formula = formula + Rat::from_int(s) * phi_expectation(q, &a)?;
    }
    if census != formula {
        return Err(StatsError::Mismatch(format!("P({n} | #E) at q={q}"), census, formula));
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;
    use crate::census::{enumerate_census, phi_a};

    #[test]
    fn constant_values() {
        assert_eq!(cq_constant(3), frac(11, 12));
        assert_eq!(bq_constant(4), frac(13, 12));
    }

    #[test]
    fn constant_ranges() {
        for q in 2..=10_000u64 {
            let c = cq_constant(q).to_f64();
            assert!(c > 0.8758 && c <= 1.0, "c({q}) = {c}");
            let b = bq_constant(q).to_f64();
            assert!((1.0..1.45004).contains(&b), "b({q}) = {b}");
        }
    }

    #[test]
    fn sigmrq_vanishes_when_m_does_not_divide() {
        let table = enumerate_census(7).unwrap();
        // 4 does not divide q - 1 = 6
        let rep = sigmrq(&table, 4, 2);
        assert_eq!(rep.census_value, Rat::zero());
        assert_eq!(rep.formula_main_term, Rat::zero());
    }

    #[test]
    fn sigmrq_main_term_value() {
        // q = 7, m = 2, k = 2: (8/7)/(psi(4) phi(2)) * (1 - 1/24) = 23/126
        let table = enumerate_census(7).unwrap();
        let rep = sigmrq(&table, 2, 2);
        assert_eq!(rep.formula_main_term, frac(23, 126));
        assert!(rep.gap.to_f64().abs() <= sigmrq_gap_bound(7, 2));
    }

    #[test]
    fn vladut_cyclicity() {
        // m = 1, k = 2 is the cyclicity proportion; check the gap envelope
        for q in [5u64, 7, 9, 11, 13, 25] {
            let table = enumerate_census(q).unwrap();
            let rep = sigmrq(&table, 1, 2);
            assert!(
                rep.gap.to_f64().abs() <= sigmrq_gap_bound(q, 2),
                "cyclicity gap at q={q}: {}",
                rep.gap
            );
        }
    }

    #[test]
    fn invariant_average_envelopes() {
        for q in [4u64, 5, 7, 8, 9, 11, 13, 25, 27] {
            let table = enumerate_census(q).unwrap();
            let (r1, r2) = invariant_averages(&table);
            assert!(
                r1.gap.to_f64().abs() <= n1_gap_bound(q),
                "n1 gap at q={q}: {} vs {}",
                r1.gap,
                n1_gap_bound(q)
            );
            assert!(
                r2.gap.to_f64().abs() <= n2_gap_bound(q),
                "n2 gap at q={q}: {} vs {}",
                r2.gap,
                n2_gap_bound(q)
            );
        }
    }

    #[test]
    fn square_q_correction_enters_n2_average() {
        let table = enumerate_census(25).unwrap();
        let (_, r2) = invariant_averages(&table);
        // main term includes p/(12 sqrt(q)) = 5/60
        assert_eq!(r2.formula_main_term, bq_constant(25) + frac(5, 60));
    }

    #[test]
    fn n2_at_most_sqrt_q_plus_one() {
        for q in [5u64, 8, 9, 13, 25, 27] {
            let table = enumerate_census(q).unwrap();
            for c in &table.classes {
                assert!(c.n2 as f64 <= (q as f64).sqrt() + 1.0);
            }
        }
    }

    #[test]
    fn gekeler_probabilities_consistent_and_total_one() {
        for (q, l) in [(5u64, 3u64), (7, 2), (9, 2), (11, 3), (13, 2)] {
            let table = enumerate_census(q).unwrap();
            let mut total = Rat::zero();
            // l^{alpha+beta} <= #E <= q + 2 sqrt(q) + 1 bounds the support
            let cap = ((q as f64 + 2.0 * (q as f64).sqrt() + 1.0).ln() / (l as f64).ln()) as u32 + 1;
            for alpha in 0..=cap {
                for beta in 0..=alpha {
                    total = total + gekeler_ellpart(&table, l, alpha, beta).unwrap();
                }
            }
            assert_eq!(total, Rat::one(), "total probability at q={q}, l={l}");
        }
    }

    #[test]
    fn lenstra_divisibility_leading_term() {
        // P_p(l | #E) has main term 1/(l-1) for p != 1 mod l: (p,l) = (5,3)
        let table = enumerate_census(5).unwrap();
        let prob = divisibility_prob(&table, 3).unwrap();
        assert!((prob.to_f64() - 0.5).abs() < 0.5 / 5f64.sqrt());
    }

    #[test]
    fn divisibility_consistency_various_n() {
        for q in [5u64, 7, 9, 11] {
            let table = enumerate_census(q).unwrap();
            for n in [2u64, 3, 4, 6, 8, 9, 12] {
                if arith::gcd(n, q) != 1 {
                    continue;
                }
                let p = divisibility_prob(&table, n).unwrap();
                assert!(p >= Rat::zero() && p <= Rat::one());
            }
        }
    }

    #[test]
    fn fixed_n2_inclusion_exclusion_on_census() {
        // Phi(n2 = m) = sum_d mu(d) Phi_{A(md,md)} exactly on census data
        for q in [5u64, 7, 9, 13] {
            let table = enumerate_census(q).unwrap();
            for m in 1..=3u64 {
                for k in [2u32, 3] {
                    let lhs = sigmrq(&table, m, k).census_value;
                    let mut rhs = Rat::zero();
                    let mut d = 1u64;
                    while (m * d) as f64 <= (q as f64).sqrt() + 1.0 {
                        let a = GroupSpec::new(m * d, m * d).unwrap();
                        rhs = rhs
                            + Rat::from_int(arith::moebius(d))
                                * table.expect(|c| {
                                    if phi_a(c, &a) {
                                        Rat::from_bigint(crate::chebyshev::u_int(
                                            k - 2,
                                            c.t,
                                            q as i64,
                                        ))
                                    } else {
                                        Rat::zero()
                                    }
                                });
                        d += 1;
                    }
                    assert_eq!(lhs, rhs, "q={q} m={m} k={k}");
                }
            }
        }
    }
}

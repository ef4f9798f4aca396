//! Dirichlet characters mod N: enumeration, conductor, parity, and the
//! orthogonality sums used to assemble Gamma(N,M) traces out of
//! Gamma_0(NM)-with-nebentype traces.
//!
//! Character values are complex doubles; membership questions (is chi(a)=1,
//! parity, conductor) are decided exactly on the exponent lattice, so only
//! final trace sums ever touch floating point.

use crate::arith::{self, Rat};
use num_complex::Complex64;
use std::sync::Arc;

pub const MODULUS_CEILING: u64 = 200;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DirichletError {
    #[error("modulus {0} exceeds ceiling {1}")]
    ModulusTooLarge(u64, u64),
    #[error("character sum off by {0:e}, tolerance {1:e}")]
    ToleranceExceeded(f64, f64),
    #[error("{0} is not coprime to the modulus {1}")]
    NotCoprime(u64, u64),
}

/// Cyclic decomposition of (Z/NZ)^x: generators with their orders, plus a
/// discrete-log table for every unit.
#[derive(Debug)]
pub struct CharacterGroup {
    pub modulus: u64,
    pub generators: Vec<(u64, u64)>,
    /// unit residue -> exponent vector with respect to `generators`
    dlog: Vec<Option<Vec<u64>>>,
}

fn unit_order(a: u64, n: u64) -> u64 {
    let mut x = a % n;
    let mut k = 1;
    while x != 1 % n {
        x = x * a % n;
        k += 1;
    }
    k
}

fn local_generators(p: u64, e: u32) -> Vec<(u64, u64)> {
    let pe = arith::pow_u64(p, e);
    if p == 2 {
        return match e {
            1 => Vec::new(),
            2 => vec![(3, 2)],
            _ => vec![(pe - 1, 2), (5, arith::pow_u64(2, e - 2))],
        };
    }
    let target = arith::euler_phi(pe);
    for g in 2..pe {
        if arith::gcd(g, pe) == 1 && unit_order(g, pe) == target {
            return vec![(g, target)];
        }
    }
    unreachable!("(Z/p^e)^x is cyclic for odd p")
}

impl CharacterGroup {
    pub fn new(n: u64) -> Result<Arc<CharacterGroup>, DirichletError> {
        if n > MODULUS_CEILING {
            return Err(DirichletError::ModulusTooLarge(n, MODULUS_CEILING));
        }
        assert!(n >= 1);
        let mut generators = Vec::new();
        for (p, e) in arith::factorize(n) {
            let pe = arith::pow_u64(p, e);
            for (g, ord) in local_generators(p, e) {
                // lift: x = g mod p^e, x = 1 mod n/p^e
                let (x, _) =
                    arith::crt_unique(&[(g as i64, pe), (1, n / pe)]).expect("coprime moduli");
                generators.push((x, ord));
            }
        }
        // exhaustive closure: walk every exponent vector
        let mut dlog: Vec<Option<Vec<u64>>> = vec![None; n as usize];
        let orders: Vec<u64> = generators.iter().map(|&(_, o)| o).collect();
        let mut exps = vec![0u64; generators.len()];
        loop {
            let mut val = 1u64 % n;
            for (i, &(g, _)) in generators.iter().enumerate() {
                for _ in 0..exps[i] {
                    val = val * g % n;
                }
            }
            let slot = &mut dlog[val as usize];
            assert!(slot.is_none(), "generators do not decompose (Z/{n})^x");
            *slot = Some(exps.clone());
            // increment mixed-radix counter
            let mut i = 0;
            loop {
                if i == exps.len() {
                    break;
                }
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
            if i == exps.len() {
                break;
            }
        }
        let group = CharacterGroup { modulus: n, generators, dlog };
        debug_assert_eq!(
            (1..=n).filter(|&a| arith::gcd(a, n) == 1).count() as u64,
            arith::euler_phi(n),
        );
        Ok(Arc::new(group))
    }

    fn dlog_of(&self, a: u64) -> Option<&Vec<u64>> {
        self.dlog[(a % self.modulus) as usize].as_ref()
    }
}

/// A Dirichlet character mod N, indexed by exponents against the group's
/// generator decomposition.
#[derive(Debug, Clone)]
pub struct DirichletChar {
    pub group: Arc<CharacterGroup>,
    pub exponents: Vec<u64>,
}

impl DirichletChar {
    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    /// Exact test of chi(a) = 1 (a must be a unit).
    fn kernel_contains(&self, a: u64) -> bool {
        self.angle_num(a).map(|(num, _)| num == 0).unwrap_or(false)
    }

    /// The angle of chi(a) as the exact fraction num/den of a full turn.
    fn angle_num(&self, a: u64) -> Option<(u64, u64)> {
        let dl = self.group.dlog_of(a)?;
        let mut den = 1u64;
        for &(_, o) in &self.group.generators {
            den = arith::lcm(den, o);
        }
        let mut num = 0u64;
        for (i, &(_, o)) in self.group.generators.iter().enumerate() {
            num = (num + self.exponents[i] * dl[i] % den * (den / o)) % den;
        }
        Some((num, den))
    }

    /// chi(a) as a complex double; 0 when gcd(a, N) > 1.
    pub fn eval(&self, a: u64) -> Complex64 {
        match self.angle_num(a) {
            None => Complex64::new(0.0, 0.0),
            Some((num, den)) => {
                let theta = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
                Complex64::new(theta.cos(), theta.sin())
            }
        }
    }

    /// chi(-1), computed exactly.
    pub fn parity(&self) -> i32 {
        let n = self.modulus();
        if n <= 2 {
            return 1;
        }
        let (num, den) = self.angle_num(n - 1).expect("-1 is a unit");
        if num == 0 {
            1
        } else {
            debug_assert_eq!(2 * num, den);
            -1
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Conductor: the smallest f | N such that chi is trivial on the kernel
    /// of (Z/NZ)^x -> (Z/fZ)^x.
    pub fn conductor(&self) -> u64 {
        let n = self.modulus();
        for f in arith::divisors(n) {
            let mut trivial_on_kernel = true;
            let mut a = 1u64;
            while a <= n {
                if arith::gcd(a, n) == 1 && a % f == 1 % f && !self.kernel_contains(a) {
                    trivial_on_kernel = false;
                    break;
                }
                a += 1;
            }
            if trivial_on_kernel {
                return f;
            }
        }
        n
    }

    /// Multiplicative order of chi in the character group.
    pub fn order(&self) -> u64 {
        let mut ord = 1u64;
        for (i, &(_, o)) in self.group.generators.iter().enumerate() {
            let e = self.exponents[i];
            ord = arith::lcm(ord, o / arith::gcd(o, e));
        }
        ord
    }
}

/// All phi(N) characters mod N, in mixed-radix order of their exponent
/// vectors (first generator fastest).
pub fn enumerate_chars(n: u64) -> Result<Vec<DirichletChar>, DirichletError> {
    let group = CharacterGroup::new(n)?;
    let orders: Vec<u64> = group.generators.iter().map(|&(_, o)| o).collect();
    let total: u64 = orders.iter().product();
    debug_assert_eq!(total, arith::euler_phi(n));
    let mut out = Vec::with_capacity(total as usize);
    let mut exps = vec![0u64; orders.len()];
    for _ in 0..total {
        out.push(DirichletChar { group: Arc::clone(&group), exponents: exps.clone() });
        let mut i = 0;
        while i < exps.len() {
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}

/// The parity-restricted orthogonality sum
/// (1/phi(N)) sum_{chi(-1) = (-1)^k} chi(d); evaluated numerically, asserted
/// against the exact indicator value (1/2)(delta_N(d,1) + (-1)^k delta_N(d,-1)),
/// which is returned.
pub fn char_orthogonality(n: u64, d: u64, k: u32) -> Result<Rat, DirichletError> {
    if arith::gcd(d, n) != 1 {
        return Err(DirichletError::NotCoprime(d, n));
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let mut sum = Complex64::new(0.0, 0.0);
    for chi in enumerate_chars(n)? {
        if chi.parity() == sign {
            sum += chi.eval(d);
        }
    }
    let phi = arith::euler_phi(n) as f64;
    let val = sum / phi;
    let half = Rat::new(1, 2);
    let mut exact = Rat::zero();
    if d % n == 1 % n {
        exact = exact + &half;
    }
    if (d + 1) % n == 0 || n == 1 {
        exact = exact + Rat::from_int(sign as i64) * &half;
    }
    let err = (val - Complex64::new(exact.to_f64(), 0.0)).norm();
    if err > 1e-9 {
        return Err(DirichletError::ToleranceExceeded(err, 1e-9));
    }
    Ok(exact)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_modulus() {
        let chars = enumerate_chars(1).unwrap();
        assert_eq!(chars.len(), 1);
        assert_eq!(chars[0].conductor(), 1);
        assert!(chars[0].is_trivial());
        assert!((chars[0].eval(1) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mod_five_characters() {
        let chars = enumerate_chars(5).unwrap();
        assert_eq!(chars.len(), 4);
        let mut orders: Vec<u64> = chars.iter().map(|c| c.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![1, 2, 4, 4]);
        let odd = chars.iter().filter(|c| c.parity() == -1).count();
        assert_eq!(odd, 2);
    }

    #[test]
    fn mod_eight_conductors() {
        let chars = enumerate_chars(8).unwrap();
        let mut conds: Vec<u64> = chars.iter().map(|c| c.conductor()).collect();
        conds.sort_unstable();
        assert_eq!(conds, vec![1, 4, 8, 8]);
    }

    #[test]
    fn full_orthogonality() {
        for n in 1..=50u64 {
            let chars = enumerate_chars(n).unwrap();
            for a in 1..=n {
                if arith::gcd(a, n) != 1 {
                    continue;
                }
                let sum: Complex64 = chars.iter().map(|c| c.eval(a)).sum();
                let expect = if a % n == 1 % n { arith::euler_phi(n) as f64 } else { 0.0 };
                assert!(
                    (sum - Complex64::new(expect, 0.0)).norm() < 1e-8,
                    "orthogonality fails at N={n} a={a}"
                );
            }
        }
    }

    #[test]
    fn character_is_multiplicative_and_respects_conductor() {
        for n in [12u64, 15, 16, 21, 24] {
            for chi in enumerate_chars(n).unwrap() {
                for a in 1..n {
                    for b in 1..n {
                        if arith::gcd(a, n) == 1 && arith::gcd(b, n) == 1 {
                            let lhs = chi.eval(a * b % n);
                            let rhs = chi.eval(a) * chi.eval(b);
                            assert!((lhs - rhs).norm() < 1e-9);
                        }
                    }
                }
                let f = chi.conductor();
                assert_eq!(n % f, 0);
                // chi equals the lift of its primitive core: agreement on
                // units congruent mod f
                for a in 1..n {
                    for b in 1..n {
                        if arith::gcd(a, n) == 1 && arith::gcd(b, n) == 1 && a % f == b % f {
                            assert!((chi.eval(a) - chi.eval(b)).norm() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn even_and_odd_split_evenly() {
        for n in 3..=40u64 {
            let chars = enumerate_chars(n).unwrap();
            let odd = chars.iter().filter(|c| c.parity() == -1).count();
            let even = chars.len() - odd;
            assert_eq!(odd, even, "N = {n}");
        }
    }

    #[test]
    fn orthogonality_indicator() {
        assert_eq!(char_orthogonality(5, 1, 2).unwrap(), Rat::new(1, 2));
        assert_eq!(char_orthogonality(5, 4, 3).unwrap(), Rat::new(-1, 2));
        assert_eq!(char_orthogonality(7, 3, 2).unwrap(), Rat::zero());
        assert_eq!(char_orthogonality(7, 3, 3).unwrap(), Rat::zero());
        assert!(char_orthogonality(6, 3, 2).is_err());
    }

    #[test]
    fn modulus_ceiling_enforced() {
        assert!(matches!(
            enumerate_chars(201),
            Err(DirichletError::ModulusTooLarge(..))
        ));
    }
}

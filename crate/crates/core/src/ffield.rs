//! Explicit models of F_{p^v} in a polynomial basis, built for exhaustive
//! enumeration rather than cryptographic speed.
//!
//! The modulus is canonical: the lexicographically smallest monic irreducible
//! of degree v over F_p, coefficients compared low degree first. This makes
//! every census and cache byte-reproducible. Degree 1 uses modulus x, so the
//! prime field runs through the same code path.

use crate::arith;
use serde::{Deserialize, Serialize};

pub const ARITH_CEILING: u64 = 100_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent must be positive")]
    ExponentZero,
    #[error("p^v = {0} exceeds ceiling {1}")]
    CeilingExceeded(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// F_{p^v} presented as F_p[x] / (modulus), modulus monic of degree v stored
/// low degree first with v+1 entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub v: u32,
    pub modulus: Vec<u64>,
}

/// Element in the polynomial basis; coeffs has length v, entries in [0, p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

fn poly_is_irreducible(coeffs: &[u64], p: u64) -> bool {
    let v = coeffs.len() - 1;
    if v == 1 {
        return true;
    }
    // Trial division by every monic polynomial of degree 1..=v/2.
    for deg in 1..=v / 2 {
        let count = arith::pow_u64(p, deg as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(deg + 1);
            let mut n = idx;
            for _ in 0..deg {
                div.push(n % p);
                n /= p;
            }
            div.push(1);
            if poly_rem_is_zero(coeffs, &div, p) {
                return false;
            }
        }
    }
    true
}

/// True iff divisor (monic) divides the polynomial exactly over F_p.
fn poly_rem_is_zero(poly: &[u64], divisor: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = poly.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap() % p;
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            for i in 0..=dd {
                let sub = lead * divisor[i] % p;
                rem[shift + i] = (rem[shift + i] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

/// Construct the canonical F_{p^v}.
pub fn make_field(p: u64, v: u32) -> Result<FieldSpec, FieldError> {
    if v == 0 {
        return Err(FieldError::ExponentZero);
    }
    if !arith::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let q = (p as u128).pow(v);
    if q > ARITH_CEILING as u128 {
        return Err(FieldError::CeilingExceeded(q.min(u64::MAX as u128) as u64, ARITH_CEILING));
    }
    // Scan monic degree-v polynomials so that (c_0, ..., c_{v-1}) increases
    // lexicographically with c_0 compared first, and take the first irreducible.
    let count = arith::pow_u64(p, v);
    for idx in 0..count {
        let mut coeffs = vec![0u64; v as usize + 1];
        let mut n = idx;
        for i in (0..v as usize).rev() {
            coeffs[i] = n % p;
            n /= p;
        }
        coeffs[v as usize] = 1;
        if poly_is_irreducible(&coeffs, p) {
            return Ok(FieldSpec { p, v, modulus: coeffs });
        }
    }
    unreachable!("an irreducible polynomial of degree v always exists")
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        arith::pow_u64(self.p, self.v)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.v as usize] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The image of an integer under Z -> F_q.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let mut coeffs = vec![0; self.v as usize];
        coeffs[0] = n.rem_euclid(self.p as i64) as u64;
        FieldElement { coeffs }
    }

    /// Element at position `idx` in enumeration order: base-p digits of idx,
    /// least significant digit = constant coefficient.
    pub fn element(&self, mut idx: u64) -> FieldElement {
        let mut coeffs = Vec::with_capacity(self.v as usize);
        for _ in 0..self.v {
            coeffs.push(idx % self.p);
            idx /= self.p;
        }
        FieldElement { coeffs }
    }

    /// Position of an element in enumeration order.
    pub fn index_of(&self, a: &FieldElement) -> u64 {
        let mut idx = 0u64;
        for &c in a.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    /// All q elements in enumeration order; 0 first, 1 second.
    pub fn enumerate_elements(&self) -> Vec<FieldElement> {
        (0..self.q()).map(|i| self.element(i)).collect()
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let v = self.v as usize;
        let mut prod = vec![0u64; 2 * v - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // Reduce by the monic modulus: x^v = -(m_0 + m_1 x + ... + m_{v-1} x^{v-1})
        for deg in (v..2 * v - 1).rev() {
            let lead = prod[deg];
            if lead == 0 {
                continue;
            }
            prod[deg] = 0;
            for i in 0..v {
                let sub = lead * self.modulus[i] % self.p;
                prod[deg - v + i] = (prod[deg - v + i] + self.p - sub) % self.p;
            }
        }
        prod.truncate(v);
        FieldElement { coeffs: prod }
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat: a^(q-2).
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.q() - 2))
    }

    /// Quadratic-character test: for odd p, a^((q-1)/2) in {0, 1};
    /// in characteristic 2 every element is a square.
    pub fn is_square(&self, a: &FieldElement) -> bool {
        if self.p == 2 {
            return true;
        }
        if self.is_zero(a) {
            return true;
        }
        let e = self.pow(a, (self.q() - 1) / 2);
        e == self.one()
    }

    /// A square root when one exists: the smallest in enumeration order.
    pub fn sqrt(&self, a: &FieldElement) -> Option<FieldElement> {
        for i in 0..self.q() {
            let s = self.element(i);
            if self.mul(&s, &s) == *a {
                return Some(s);
            }
        }
        None
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.p)
    }
}

/// Index-based operation tables for the hot census loops: all binary
/// operations become flat array lookups on element indices.
pub struct FieldTable {
    pub spec: FieldSpec,
    pub q: u64,
    pub add: Vec<u32>,
    pub mul: Vec<u32>,
    pub neg: Vec<u32>,
    pub inv: Vec<u32>,
    /// Quadratic character: 1 for nonzero squares, -1 for nonsquares, 0 at 0.
    pub chi: Vec<i8>,
    /// Absolute trace to F_p (as an integer in [0,p)).
    pub trace: Vec<u8>,
}

impl FieldTable {
    pub fn new(spec: &FieldSpec) -> FieldTable {
        let q = spec.q() as usize;
        let elems: Vec<FieldElement> = spec.enumerate_elements();
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        let mut neg = vec![0u32; q];
        let mut inv = vec![0u32; q];
        let mut chi = vec![-1i8; q];
        let mut trace = vec![0u8; q];
        for i in 0..q {
            neg[i] = spec.index_of(&spec.neg(&elems[i])) as u32;
            if i != 0 {
                inv[i] = spec.index_of(&spec.inv(&elems[i]).unwrap()) as u32;
            }
            let mut fr = elems[i].clone();
            let mut tr = elems[i].clone();
            for _ in 1..spec.v {
                fr = spec.frobenius(&fr);
                tr = spec.add(&tr, &fr);
            }
            trace[i] = tr.coeffs[0] as u8; // trace lands in the prime subfield
            for j in 0..q {
                add[i * q + j] = spec.index_of(&spec.add(&elems[i], &elems[j])) as u32;
                mul[i * q + j] = spec.index_of(&spec.mul(&elems[i], &elems[j])) as u32;
            }
        }
        chi[0] = 0;
        for i in 1..q {
            let sq = mul[i * q + i] as usize;
            chi[sq] = 1;
        }
        FieldTable {
            spec: spec.clone(),
            q: q as u64,
            add,
            mul,
            neg,
            inv,
            chi,
            trace,
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a as u64 * self.q + b as u64) as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a as u64 * self.q + b as u64) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// The image of a small integer constant.
    pub fn cst(&self, n: i64) -> u32 {
        self.spec.index_of(&self.spec.from_int(n)) as u32
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut acc = self.cst(1);
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

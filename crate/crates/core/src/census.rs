//! Exhaustive census of F_q-isomorphism classes of elliptic curves.
//!
//! For p > 3 we enumerate short Weierstrass pairs (a,b) with 4a^3+27b^2 != 0
//! and group them under (a,b) ~ (u^4 a, u^6 b). For p in {2,3} we enumerate
//! long Weierstrass models and group them under the full substitution group
//! (u,r,s,t) with u != 0; orbits are produced by applying every group element
//! to the scan-least representative, so the canonical representative is
//! always the enumeration-least model of its orbit.
//!
//! Each class records #E(F_q), the Frobenius trace, #Aut, and the invariant
//! factors (n1, n2) of E(F_q), computed as the lcm of point orders.

use crate::arith::{self, Rat};
use crate::classnum::GroupSpec;
use crate::ffield::{make_field, FieldElement, FieldSpec, FieldTable};
use serde::{Deserialize, Serialize};

pub const CENSUS_CEILING_DEFAULT: u64 = 1024;

#[derive(Debug, thiserror::Error)]
pub enum CensusError {
    #[error("q = {0} exceeds census ceiling {1}")]
    CeilingExceeded(u64, u64),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("singular model")]
    SingularModel,
    #[error("field error: {0}")]
    Field(#[from] crate::ffield::FieldError),
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache parse: {0}")]
    Json(#[from] serde_json::Error),
}

/// A long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
/// Short models are stored with a1 = a2 = a3 = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    pub field: FieldSpec,
    pub a1: FieldElement,
    pub a2: FieldElement,
    pub a3: FieldElement,
    pub a4: FieldElement,
    pub a6: FieldElement,
}

/// One F_q-isomorphism class.
#[derive(Debug, Clone)]
pub struct IsoClass {
    pub rep: CurveModel,
    pub aut_count: u64,
    pub npoints: u64,
    pub t: i64,
    pub n1: u64,
    pub n2: u64,
}

/// All classes over one F_q, sorted by (t, n1, n2, rep).
#[derive(Debug, Clone)]
pub struct CensusTable {
    pub q: u64,
    pub field: FieldSpec,
    pub classes: Vec<IsoClass>,
}

impl CurveModel {
    /// The standard discriminant of the long model.
    pub fn discriminant(&self) -> FieldElement {
        let f = &self.field;
        let b2 = f.add(
            &f.mul(&self.a1, &self.a1),
            &f.mul(&f.from_int(4), &self.a2),
        );
        let b4 = f.add(
            &f.mul(&f.from_int(2), &self.a4),
            &f.mul(&self.a1, &self.a3),
        );
        let b6 = f.add(
            &f.mul(&self.a3, &self.a3),
            &f.mul(&f.from_int(4), &self.a6),
        );
        let b8 = {
            let t1 = f.mul(&f.mul(&self.a1, &self.a1), &self.a6);
            let t2 = f.mul(&f.from_int(4), &f.mul(&self.a2, &self.a6));
            let t3 = f.mul(&self.a1, &f.mul(&self.a3, &self.a4));
            let t4 = f.mul(&self.a2, &f.mul(&self.a3, &self.a3));
            let t5 = f.mul(&self.a4, &self.a4);
            f.sub(&f.add(&f.add(&t1, &t2), &t4), &f.add(&t3, &t5))
        };
        // -b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6
        let p1 = f.mul(&f.mul(&b2, &b2), &b8);
        let p2 = f.mul(&f.from_int(8), &f.mul(&b4, &f.mul(&b4, &b4)));
        let p3 = f.mul(&f.from_int(27), &f.mul(&b6, &b6));
        let p4 = f.mul(&f.from_int(9), &f.mul(&b2, &f.mul(&b4, &b6)));
        f.sub(&p4, &f.add(&f.add(&p1, &p2), &p3))
    }

    pub fn is_singular(&self) -> bool {
        self.field.is_zero(&self.discriminant())
    }
}

// ---------------------------------------------------------------------------
// Point counting
// ---------------------------------------------------------------------------

/// #E(F_q): affine solutions plus the point at infinity. Odd characteristic
/// goes through the quadratic character of the completed square; p = 2
/// solves the Artin-Schreier quadratic per x.
pub fn point_count(model: &CurveModel) -> Result<u64, CensusError> {
    if model.is_singular() {
        return Err(CensusError::SingularModel);
    }
    let f = &model.field;
    let q = f.q();
    let mut count = 1u64; // infinity
    if f.p == 2 {
        for xi in 0..q {
            let x = f.element(xi);
            let h = f.add(&f.mul(&model.a1, &x), &model.a3);
            let fx = rhs_cubic(model, &x);
            if f.is_zero(&h) {
                count += 1; // squaring is bijective: unique y
            } else {
                let hinv = f.inv(&h).unwrap();
                let c = f.mul(&fx, &f.mul(&hinv, &hinv));
                if abs_trace(f, &c) == 0 {
                    count += 2;
                }
            }
        }
    } else {
        // chi table: 1 on nonzero squares, -1 on nonsquares, 0 at 0
        let chi = chi_table(f);
        let inv4 = f.inv(&f.from_int(4)).unwrap();
        for xi in 0..q {
            let x = f.element(xi);
            let h = f.add(&f.mul(&model.a1, &x), &model.a3);
            let rhs = f.add(&rhs_cubic(model, &x), &f.mul(&f.mul(&h, &h), &inv4));
            count = (count as i64 + 1 + chi[f.index_of(&rhs) as usize] as i64) as u64;
        }
    }
    Ok(count)
}

fn rhs_cubic(model: &CurveModel, x: &FieldElement) -> FieldElement {
    let f = &model.field;
    let x2 = f.mul(x, x);
    let x3 = f.mul(&x2, x);
    f.add(
        &f.add(&x3, &f.mul(&model.a2, &x2)),
        &f.add(&f.mul(&model.a4, x), &model.a6),
    )
}

fn chi_table(f: &FieldSpec) -> Vec<i8> {
    let q = f.q() as usize;
    let mut chi = vec![-1i8; q];
    chi[0] = 0;
    for i in 1..q as u64 {
        let e = f.element(i);
        chi[f.index_of(&f.mul(&e, &e)) as usize] = 1;
    }
    chi
}

/// Absolute trace F_q -> F_p as an integer in [0, p).
fn abs_trace(f: &FieldSpec, a: &FieldElement) -> u64 {
    let mut acc = a.clone();
    let mut fr = a.clone();
    for _ in 1..f.v {
        fr = f.frobenius(&fr);
        acc = f.add(&acc, &fr);
    }
    acc.coeffs[0]
}

// ---------------------------------------------------------------------------
// Group structure via point orders
// ---------------------------------------------------------------------------

type Point = Option<(FieldElement, FieldElement)>;

fn point_neg(model: &CurveModel, p: &Point) -> Point {
    let f = &model.field;
    p.as_ref().map(|(x, y)| {
        let ny = f.neg(&f.add(y, &f.add(&f.mul(&model.a1, x), &model.a3)));
        (x.clone(), ny)
    })
}

fn point_add(model: &CurveModel, p: &Point, q: &Point) -> Point {
    let f = &model.field;
    let (x1, y1) = match p {
        None => return q.clone(),
        Some(v) => v,
    };
    let (x2, y2) = match q {
        None => return p.clone(),
        Some(v) => v,
    };
    if x1 == x2 {
        let neg_y1 = match point_neg(model, p) {
            Some((_, y)) => y,
            None => unreachable!(),
        };
        if *y2 == neg_y1 {
            return None;
        }
    }
    let (lambda, nu) = if x1 != x2 {
        let den = f.inv(&f.sub(x2, x1)).unwrap();
        let lambda = f.mul(&f.sub(y2, y1), &den);
        let nu = f.mul(&f.sub(&f.mul(y1, x2), &f.mul(y2, x1)), &den);
        (lambda, nu)
    } else {
        let den = f.add(
            &f.mul(&f.from_int(2), y1),
            &f.add(&f.mul(&model.a1, x1), &model.a3),
        );
        let den = f.inv(&den).unwrap();
        let x1sq = f.mul(x1, x1);
        let num_l = f.add(
            &f.add(&f.mul(&f.from_int(3), &x1sq), &f.mul(&f.from_int(2), &f.mul(&model.a2, x1))),
            &f.sub(&model.a4, &f.mul(&model.a1, y1)),
        );
        let num_n = f.add(
            &f.sub(&f.mul(&model.a4, x1), &f.mul(&x1sq, x1)),
            &f.sub(
                &f.mul(&f.from_int(2), &model.a6),
                &f.mul(&model.a3, y1),
            ),
        );
        (f.mul(&num_l, &den), f.mul(&num_n, &den))
    };
    let x3 = f.sub(
        &f.sub(&f.add(&f.mul(&lambda, &lambda), &f.mul(&model.a1, &lambda)), &model.a2),
        &f.add(x1, x2),
    );
    let y3 = f.sub(
        &f.neg(&f.mul(&f.add(&lambda, &model.a1), &x3)),
        &f.add(&nu, &model.a3),
    );
    Some((x3, y3))
}

fn scalar_mul(model: &CurveModel, mut n: u64, p: &Point) -> Point {
    let mut acc: Point = None;
    let mut base = p.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = point_add(model, &acc, &base);
        }
        base = point_add(model, &base, &base);
        n >>= 1;
    }
    acc
}

/// All affine points, by brute force scan of (x, y).
pub fn enumerate_points(model: &CurveModel) -> Vec<(FieldElement, FieldElement)> {
    let f = &model.field;
    let q = f.q();
    let mut pts = Vec::new();
    for xi in 0..q {
        let x = f.element(xi);
        let h = f.add(&f.mul(&model.a1, &x), &model.a3);
        let fx = rhs_cubic(model, &x);
        for yi in 0..q {
            let y = f.element(yi);
            // y^2 + h y = f(x)
            if f.add(&f.mul(&y, &y), &f.mul(&h, &y)) == fx {
                pts.push((x.clone(), y));
            }
        }
    }
    pts
}

fn point_order(model: &CurveModel, p: &Point, n: u64) -> u64 {
    let mut ord = n;
    for (l, e) in arith::factorize(n) {
        for _ in 0..e {
            if scalar_mul(model, ord / l, p).is_none() {
                ord /= l;
            } else {
                break;
            }
        }
    }
    ord
}

/// Invariant factors (n1, n2) of E(F_q): n1 is the group exponent, computed
/// as the lcm of the orders of all points; n2 = #E / n1.
pub fn group_structure(model: &CurveModel, npoints: u64) -> (u64, u64) {
    let mut n1 = 1u64;
    for (x, y) in enumerate_points(model) {
        let p = Some((x, y));
        n1 = arith::lcm(n1, point_order(model, &p, npoints));
        if n1 == npoints {
            break; // cyclic, cannot grow further
        }
    }
    (n1, npoints / n1)
}

/// Phi_A(E): 1 iff A embeds into Z/n1(E) x Z/n2(E), i.e. componentwise
/// divisibility of invariant factors.
pub fn phi_a(cls: &IsoClass, a: &GroupSpec) -> bool {
    cls.n1 % a.n1 == 0 && cls.n2 % a.n2 == 0
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Build the full census for q with the default ceiling.
pub fn enumerate_census(q: u64) -> Result<CensusTable, CensusError> {
    enumerate_census_with_ceiling(q, CENSUS_CEILING_DEFAULT)
}

pub fn enumerate_census_with_ceiling(q: u64, ceiling: u64) -> Result<CensusTable, CensusError> {
    let (p, v) = arith::prime_power(q).ok_or(CensusError::NotPrimePower(q))?;
    if q > ceiling {
        return Err(CensusError::CeilingExceeded(q, ceiling));
    }
    let spec = make_field(p, v).map_err(|e| match e {
        crate::ffield::FieldError::CeilingExceeded(a, b) => CensusError::CeilingExceeded(a, b),
        other => CensusError::Field(other),
    })?;
    let table = FieldTable::new(&spec);
    let mut classes = if p >= 5 {
        census_short(&table)
    } else {
        census_long(&table)
    };
    for cls in &mut classes {
        let npoints = point_count(&cls.rep)?;
        let t = q as i64 + 1 - npoints as i64;
        debug_assert!(t * t <= 4 * q as i64);
        let (n1, n2) = group_structure(&cls.rep, npoints);
        cls.npoints = npoints;
        cls.t = t;
        cls.n1 = n1;
        cls.n2 = n2;
    }
    classes.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    Ok(CensusTable { q, field: spec, classes })
}

fn sort_key(c: &IsoClass) -> (i64, u64, u64, Vec<u64>) {
    let mut rep = Vec::new();
    for a in [&c.rep.a1, &c.rep.a2, &c.rep.a3, &c.rep.a4, &c.rep.a6] {
        rep.extend_from_slice(&a.coeffs);
    }
    (c.t, c.n1, c.n2, rep)
}

fn model_from_indices(spec: &FieldSpec, a: [u64; 5]) -> CurveModel {
    CurveModel {
        field: spec.clone(),
        a1: spec.element(a[0]),
        a2: spec.element(a[1]),
        a3: spec.element(a[2]),
        a4: spec.element(a[3]),
        a6: spec.element(a[4]),
    }
}

/// p > 3: short Weierstrass pairs under the u-action.
fn census_short(t: &FieldTable) -> Vec<IsoClass> {
    let q = t.q;
    let c4 = t.cst(4);
    let c27 = t.cst(27);
    let mut u4 = vec![0u32; q as usize];
    let mut u6 = vec![0u32; q as usize];
    for u in 1..q {
        u4[u as usize] = t.pow(u as u32, 4);
        u6[u as usize] = t.pow(u as u32, 6);
    }
    let mut visited = vec![false; (q * q) as usize];
    let mut classes = Vec::new();
    for a in 0..q as u32 {
        for b in 0..q as u32 {
            let idx = (a as u64 * q + b as u64) as usize;
            if visited[idx] {
                continue;
            }
            // 4a^3 + 27b^2
            let disc = t.add(
                t.mul(c4, t.mul(a, t.mul(a, a))),
                t.mul(c27, t.mul(b, b)),
            );
            if disc == 0 {
                continue;
            }
            let mut orbit = 0u64;
            for u in 1..q as usize {
                let na = t.mul(u4[u], a);
                let nb = t.mul(u6[u], b);
                let j = (na as u64 * q + nb as u64) as usize;
                if !visited[j] {
                    visited[j] = true;
                    orbit += 1;
                }
            }
            classes.push(IsoClass {
                rep: model_from_indices(&t.spec, [0, 0, 0, a as u64, b as u64]),
                aut_count: (q - 1) / orbit,
                npoints: 0,
                t: 0,
                n1: 0,
                n2: 0,
            });
        }
    }
    classes
}

struct Bitmap(Vec<u64>);

impl Bitmap {
    fn new(n: usize) -> Bitmap {
        Bitmap(vec![0; (n + 63) / 64])
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Sets bit i, returning true if it was previously clear.
    #[inline]
    fn set(&mut self, i: usize) -> bool {
        let w = &mut self.0[i >> 6];
        let m = 1u64 << (i & 63);
        let fresh = *w & m == 0;
        *w |= m;
        fresh
    }
}

/// p <= 3: long models under the full substitution group
/// x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
fn census_long(ft: &FieldTable) -> Vec<IsoClass> {
    let q = ft.q;
    let qu = q as usize;
    let total = qu * qu * qu * qu * qu;
    let mut visited = Bitmap::new(total);
    let mut classes = Vec::new();
    let group_order = (q - 1) * q * q * q;
    let two = ft.cst(2);
    let three = ft.cst(3);

    let coeffs_of = |idx: usize| -> [u64; 5] {
        let mut n = idx as u64;
        let mut a = [0u64; 5];
        for i in (0..5).rev() {
            a[i] = n % q;
            n /= q;
        }
        a
    };

    for idx in 0..total {
        if visited.get(idx) {
            continue;
        }
        let a = coeffs_of(idx);
        let model = model_from_indices(&ft.spec, a);
        if model.is_singular() {
            continue;
        }
        let (a1, a2, a3, a4, a6) = (
            a[0] as u32,
            a[1] as u32,
            a[2] as u32,
            a[3] as u32,
            a[4] as u32,
        );
        let mut orbit = 0u64;
        for u in 1..q as u32 {
            let ui = ft.inv(u);
            let ui2 = ft.mul(ui, ui);
            let ui3 = ft.mul(ui2, ui);
            let ui4 = ft.mul(ui2, ui2);
            let ui6 = ft.mul(ui3, ui3);
            for r in 0..q as u32 {
                let r2 = ft.mul(r, r);
                let ra1 = ft.mul(r, a1);
                // r-only parts
                let base3_r = ft.add(a3, ra1); // a3 + r a1
                let b4_r = ft.add(a4, ft.add(ft.mul(two, ft.mul(r, a2)), ft.mul(three, r2)));
                let b6_r = ft.add(
                    a6,
                    ft.add(ft.mul(r, a4), ft.add(ft.mul(r2, a2), ft.mul(r2, r))),
                );
                for s in 0..q as u32 {
                    let c = ft.add(a1, ft.mul(two, s)); // a1 + 2s
                    let na1 = ft.mul(ui, c);
                    let na2 = {
                        let v = ft.sub(
                            ft.add(a2, ft.mul(three, r)),
                            ft.add(ft.mul(s, a1), ft.mul(s, s)),
                        );
                        ft.mul(ui2, v)
                    };
                    // t-independent part of a4': a4 - s a3 + 2 r a2 + 3 r^2 - r s a1
                    let base4 = ft.sub(b4_r, ft.add(ft.mul(s, a3), ft.mul(s, ra1)));
                    for tt in 0..q as u32 {
                        let w = ft.add(base3_r, tt); // a3 + r a1 + t
                        let na3 = ft.mul(ui3, ft.add(w, tt));
                        // a4' pre-scale: base4 - t(a1 + 2s)
                        let na4 = ft.mul(ui4, ft.sub(base4, ft.mul(tt, c)));
                        // a6' pre-scale: b6_r - t(a3 + r a1 + t)
                        let na6 = ft.mul(ui6, ft.sub(b6_r, ft.mul(tt, w)));
                        let j = ((((na1 as u64 * q + na2 as u64) * q + na3 as u64) * q
                            + na4 as u64)
                            * q
                            + na6 as u64) as usize;
                        if visited.set(j) {
                            orbit += 1;
                        }
                    }
                }
            }
        }
        classes.push(IsoClass {
            rep: model,
            aut_count: group_order / orbit,
            npoints: 0,
            t: 0,
            n1: 0,
            n2: 0,
        });
    }
    classes
}

// ---------------------------------------------------------------------------
// Expectations
// ---------------------------------------------------------------------------

impl CensusTable {
    /// E_q(f) = (1/q) sum_E f(E) / #Aut(E), exact.
    pub fn expect<F: Fn(&IsoClass) -> Rat>(&self, f: F) -> Rat {
        let mut acc = Rat::zero();
        for cls in &self.classes {
            acc = acc + f(cls) / Rat::from(cls.aut_count);
        }
        acc / Rat::from(self.q)
    }

    /// Weighted probability of a subset.
    pub fn prob<F: Fn(&IsoClass) -> bool>(&self, pred: F) -> Rat {
        self.expect(|c| if pred(c) { Rat::one() } else { Rat::zero() })
    }

    /// E_q(#E(F_{q^r}) Phi_A) computed from the base-field census via
    /// alpha^r + conj(alpha)^r = U_r(t,q) - q U_{r-2}(t,q).
    pub fn extension_expect(&self, a: &GroupSpec, r: u32) -> Rat {
        assert!(r >= 1);
        let q = self.q as i64;
        self.expect(|cls| {
            if !phi_a(cls, a) {
                return Rat::zero();
            }
            let s = if r == 1 {
                Rat::from_int(cls.t)
            } else {
                Rat::from_bigint(
                    crate::chebyshev::u_int(r, cls.t, q)
                        - num_bigint::BigInt::from(q) * crate::chebyshev::u_int(r - 2, cls.t, q),
                )
            };
            Rat::from_bigint(num_bigint::BigInt::from(q).pow(r) + 1) - s
        })
    }

    /// E_q(U_{k-2}(t_E, q) Phi_A), the census side of the main theorem.
    pub fn moment_u(&self, a: &GroupSpec, k: u32) -> Rat {
        let q = self.q as i64;
        self.expect(|cls| {
            if phi_a(cls, a) {
                Rat::from_bigint(crate::chebyshev::u_int(k - 2, cls.t, q))
            } else {
                Rat::zero()
            }
        })
    }

    /// E_q(t^R Phi_A).
    pub fn moment_power(&self, a: &GroupSpec, r: u32) -> Rat {
        self.expect(|cls| {
            if phi_a(cls, a) {
                Rat::from_int(cls.t).pow(r as i32)
            } else {
                Rat::zero()
            }
        })
    }
}

// ---------------------------------------------------------------------------
// JSON cache
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct WireClass {
    rep: Vec<Vec<u64>>,
    aut: u64,
    npoints: u64,
    t: i64,
    n1: u64,
    n2: u64,
}

#[derive(Serialize, Deserialize)]
struct WireTable {
    q: u64,
    field: FieldSpec,
    classes: Vec<WireClass>,
}

impl CensusTable {
    pub fn to_json(&self) -> String {
        let wire = WireTable {
            q: self.q,
            field: self.field.clone(),
            classes: self
                .classes
                .iter()
                .map(|c| WireClass {
                    rep: vec![
                        c.rep.a1.coeffs.clone(),
                        c.rep.a2.coeffs.clone(),
                        c.rep.a3.coeffs.clone(),
                        c.rep.a4.coeffs.clone(),
                        c.rep.a6.coeffs.clone(),
                    ],
                    aut: c.aut_count,
                    npoints: c.npoints,
                    t: c.t,
                    n1: c.n1,
                    n2: c.n2,
                })
                .collect(),
        };
        serde_json::to_string(&wire).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<CensusTable, CensusError> {
        let wire: WireTable = serde_json::from_str(s)?;
        let field = wire.field;
        let classes = wire
            .classes
            .into_iter()
            .map(|w| IsoClass {
                rep: CurveModel {
                    field: field.clone(),
                    a1: FieldElement { coeffs: w.rep[0].clone() },
                    a2: FieldElement { coeffs: w.rep[1].clone() },
                    a3: FieldElement { coeffs: w.rep[2].clone() },
                    a4: FieldElement { coeffs: w.rep[3].clone() },
                    a6: FieldElement { coeffs: w.rep[4].clone() },
                },
                aut_count: w.aut,
                npoints: w.npoints,
                t: w.t,
                n1: w.n1,
                n2: w.n2,
            })
            .collect();
        Ok(CensusTable { q: wire.q, field, classes })
    }

    /// Load from the cache directory, or build and cache. Cache files are
    /// keyed by (p, v, modulus) through the canonical field construction.
    pub fn load_or_build(q: u64, cache_dir: Option<&std::path::Path>) -> Result<CensusTable, CensusError> {
        let path = cache_dir.map(|d| d.join(format!("census_q{q}.json")));
        if let Some(p) = &path {
            if p.exists() {
                return CensusTable::from_json(&std::fs::read_to_string(p)?);
            }
        }
        let table = enumerate_census(q)?;
        if let Some(p) = &path {
            if let Some(parent) = p.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(p, table.to_json())?;
        }
        Ok(table)
    }
}

//! Traces of Hecke operators on cusp-form spaces S_k(Gamma(N,M)) and
//! arithmetic statistics of elliptic curves over small finite fields.
//!
//! The crate has two independent computational routes to the same numbers:
//!
//! - an exact Eichler-Selberg trace engine for the groups Gamma(N,M)
//!   (with Gamma(N,1) = Gamma_1(N) and Gamma(N,N) isomorphic to Gamma(N)),
//!   built on Hurwitz-Kronecker class numbers and exact rationals; and
//! - an exhaustive census of elliptic curves over F_q, enumerated model by
//!   model and grouped into isomorphism classes.
//!
//! Moments of Frobenius traces over curves with a prescribed subgroup,
//! invariant-factor statistics, cyclicity proportions and local group
//! structure probabilities are computed both ways and must agree exactly.

pub mod arith;
pub mod census;
pub mod chebyshev;
pub mod classnum;
pub mod dirichlet;
pub mod ffield;
pub mod moments;
pub mod stats;
pub mod traceformula;
pub mod verify;

pub use arith::Rat;
pub use census::CensusTable;
pub use classnum::{GroupSpec, QArg};
pub use traceformula::{TraceRequest, TraceResult};

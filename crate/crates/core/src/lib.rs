//! Exact arithmetic for p^s-approximation polynomials of hypergeometric and
//! KZ periods, and machine checks of the Dwork-type congruences they satisfy.
//!
//! The crate is organised bottom-up:
//!
//! - [`laurent`] and [`poly`]: sparse multivariate Laurent polynomials and
//!   dense univariate polynomials over arbitrary-precision integers.
//! - [`polytope`]: t-Newton polytopes and the admissibility test for tuples.
//! - [`ghost`]: ghost terms, indecomposable index tuples, `I_λ`, and the tuple
//!   congruence for constant terms.
//! - [`hyperg`]: master and approximation polynomials of the one-variable
//!   families and their congruences.
//! - [`padic`]: fixed-precision p-adic integers, Teichmüller lifts, unit roots
//!   and elliptic-curve cross-checks.
//! - [`kz`]: the three-point KZ system and its polynomial solutions mod p^s.
//! - [`conjecture`]: the symmetrised binomial differences and their scans.
//!
//! Every check returns a [`report::CongruenceReport`].

pub mod arith;
pub mod conjecture;
pub mod ghost;
pub mod hyperg;
pub mod kz;
pub mod laurent;
pub mod padic;
pub mod poly;
pub mod polytope;
pub mod report;
pub mod suites;

pub use laurent::{Context, ExpVector, LaurentPoly, ModulusContext, PolyError};
pub use poly::UniPoly;
pub use report::{CongruenceReport, Modulus, Witness};

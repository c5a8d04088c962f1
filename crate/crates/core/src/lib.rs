//! Sheet-weighted local products of real vectors.
//!
//! The k-th local product of `a` and `b` over a sheet `f` is
//!
//! ```text
//! G(a; b) = f(<a, b>) * ∫_{|a_n|}^{|b_n|} … ∫_{|a_1|}^{|b_1|} f(e(i^k * ||x||_k / (||a||^(k+1) + ||b||^(k+1)))) dx
//! ```
//!
//! with `e(q) = exp(2πiq)`. This crate evaluates it by direct tensor-product
//! quadrature and by closed-form reductions for the special sheets, and uses
//! it to test two box-integral inequalities for the ℓ^{4s} and reciprocal
//! ℓ^{4s+3} norms, including a seeded counterexample search.
//!
//! Module map:
//!
//! * [`space`]: vectors, pairings, norms, oriented boxes, the unit phase.
//! * [`sheet`]: sheet functions and the composed phase kernel.
//! * [`quadrature`]: Gauss–Legendre and Monte Carlo box integration.
//! * [`local_product`]: direct and closed-form evaluation.
//! * [`theorems`]: inequality reports, the swap identity and the modulus bound.
//! * [`falsify`]: constrained random search for violations.
//! * [`document`]: JSON documents shared by the CLI and the web demo.
//! * [`selftest`]: the acceptance suite, runnable from the CLI.

pub mod document;
pub mod error;
pub mod falsify;
pub mod local_product;
pub mod quadrature;
pub mod selftest;
pub mod sheet;
pub mod space;
pub mod theorems;

#[cfg(feature = "cli")]
pub mod cli;

mod exec;

pub use error::{Error, Result};
pub use local_product::{LocalProductInstance, LocalProductValue};
pub use quadrature::{IntegrationResult, Kernel, QuadratureConfig, QuadratureMethod};
pub use sheet::Sheet;
pub use space::{BoxDomain, ComplexScalar, Pairing, RealVector};
pub use theorems::{TheoremId, TheoremReport, Verdict};


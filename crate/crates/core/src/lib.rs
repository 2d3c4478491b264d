//! Solvers for discrete ill-posed inverse problems with Tikhonov-type
//! regularization in general form, built on dense factorization kernels,
//! a standard-form transformation, and randomized sketching of the GSVD.

pub mod error;
pub mod gsvdreg;
pub mod matcore;
pub mod paramsel;
pub mod problems;
pub mod randn;
pub mod rsvd;
pub mod transform;

pub use error::{Error, Result};

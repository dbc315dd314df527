//! Exact analysis of arithmetic differences `K − λK′` of middle and homogeneous
//! Cantor sets: generating contraction systems, full-interval decisions,
//! membership, recurrent regions, finite-type dimension and nonlinear
//! interval certificates.

pub mod cantor;
pub mod dimension;
pub mod error;
pub mod full_interval;
pub mod ifs;
pub mod interval;
pub mod lattice;
pub mod nonlinear;
pub mod render;
pub mod renorm;
pub mod scalar;
pub mod verdict;

pub use error::{Error, Result};
pub use scalar::{FieldSpec, Rational, Scalar};

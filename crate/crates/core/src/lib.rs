//! Differential geometry and entropy-equivalence engine for the
//! Gibbs–Helmholtz entropy hypersurface `S(x¹, x², x³) = x¹x³ − x²`.

// Index loops mirror the tensor notation; `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod entropy;
pub mod error;
pub mod geodesic;
pub mod ghsurface;
pub mod monge;
pub mod numerics;

pub use error::{Error, Result};
pub use monge::{CurvatureReport, Orientation, ScalarField, StatePoint};

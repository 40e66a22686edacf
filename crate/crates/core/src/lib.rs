//! Segal–Bargmann transforms, heat kernels and Toeplitz operators on SU(2) and SL(2,ℂ).
//!
//! Everything works on band-limited functions (finite sums of Wigner matrix
//! entries), where heat flow and the transforms act exactly on coefficients.
//! Integrals over `SL(2,ℂ)` use polar-coordinate product rules; integrals
//! against the subelliptic heat kernel are sampled through the complex Itô map.

// Domain checks are written `!(t > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod diffop;
pub mod error;
pub mod euclid;
pub mod gauss;
pub mod heat;
pub mod montecarlo;
pub mod repr;
pub mod sde;
pub mod spin;
pub mod toeplitz;
pub mod transform;

pub use error::{Error, Result};
pub use spin::Spin;

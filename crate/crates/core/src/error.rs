use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically singular (|det| = {0:e})")]
    NonInvertible(f64),

    #[error("index ({m}, {mp}) out of range for spin {j}")]
    IndexOutOfRange { j: f64, m: usize, mp: usize },

    #[error(
        "spin {0} exceeds the cutoff 12: analytically continued matrix entries grow like \
         e^(2j|Y|) off K and backward heat flow amplifies them by e^(t j(j+1)/2)"
    )]
    SpinTooLarge(f64),

    #[error("heat series tail bound {tail:e} exceeds tolerance {tol:e} at 2*jmax = {twice_jmax}")]
    Truncation { tail: f64, tol: f64, twice_jmax: u32 },

    #[error("backward heat flow amplification {0:e} exceeds the guard 1e6")]
    IllConditioned(f64),

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("radial cutoff {cutoff} leaves tail mass fraction {tail:e} (limit 1e-10)")]
    CutoffTooSmall { cutoff: f64, tail: f64 },

    #[error("finite-difference step {step:e} is below the floor {floor:e}")]
    StepUnderflow { step: f64, floor: f64 },

    #[error("operator degree {0} exceeds the cap of 4")]
    DegreeTooLarge(usize),

    #[error("Hermite degree {0} exceeds the cap {1}")]
    DegreeCap(usize, usize),

    #[error("driving paths have different lengths ({0} vs {1})")]
    PathMismatch(usize, usize),

    #[error("statistical failure: {0}")]
    StatisticalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Construction and verification of a smooth orthonormal wavelet whose
//! Fourier-side decay is controlled through the Lambert W function.
//!
//! The pipeline runs bottom-up:
//!
//! * [`lambert`] evaluates the principal branch of the Lambert W function
//!   and its derivatives.
//! * [`scale`] builds the scale functions `omega`, `g`, and `f` together
//!   with the weight sequence `M_p = p^(tau * p^sigma)` and its associated
//!   (Legendre-type) function.
//! * [`filter`] assembles the 2π-periodic low-pass filter `m0` from a
//!   normalized cumulative bump integral; the quadrature-mirror identity
//!   holds by construction.
//! * [`transform`] evaluates the scaling function `phi_hat` as a finite
//!   product, the wavelet `psi_hat`, and synthesizes the time-domain
//!   wavelet by FFT.
//! * [`cycles`] does exact rational arithmetic for the doubling map
//!   `xi -> 2 xi (mod 2π)` and its invariant cycles.
//! * [`decay`] quantifies the spectral decay of `phi_hat` against the
//!   `exp(-rho * g_sigma)` envelope family.
//! * [`report`] bundles every identity check into a machine-readable
//!   verification report; [`cli`] exposes all of it as subcommands.

// Guards are written as `!(x > a)` on purpose: the negation rejects NaN
// along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cycles;
pub mod decay;
pub mod filter;
pub mod lambert;
pub mod quad;
pub mod report;
pub mod scale;
pub mod svg;
pub mod transform;

/// Errors surfaced by the library's checked entry points.
///
/// Pure evaluation paths (the filter, the products, the scale functions on
/// their natural domains) are infallible and return plain floats.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument left the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A configuration value violated a structural invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error(
        "quadrature on [{a}, {b}] stalled at estimated error {err:.3e} \
         (tolerance {tol:.3e}, {depth} refinements)"
    )]
    Quadrature {
        a: f64,
        b: f64,
        tol: f64,
        err: f64,
        depth: u32,
    },

    /// The spectral tail beyond `xi_max` is too large for synthesis.
    #[error(
        "spectral tail beyond xi_max = {xi_max:.6} is {observed:.3e}, above \
         the tolerance {tol:.3e}; increase xi_max"
    )]
    Tail { xi_max: f64, tol: f64, observed: f64 },

    /// The local envelope check around 2π/3 failed.
    #[error("envelope check failed: {0}")]
    Envelope(String),

    /// Exact integer arithmetic overflowed.
    #[error("integer overflow in {op} at n = {n}")]
    Overflow { op: &'static str, n: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operator or vector dimensions do not match.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Fock space or time grid would exceed its configured size limit.
    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    CapacityExceeded {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The integrator state norm exceeded the configured bound.
    #[error("solver unstable at t = {t}: state norm {norm} exceeds bound {bound}")]
    SolverUnstable { t: f64, norm: f64, bound: f64 },

    /// Doubling the quadrature resolution moved the result beyond tolerance.
    #[error("quadrature not converged: relative change {change} exceeds {tol}")]
    QuadratureNotConverged { change: f64, tol: f64 },

    /// A state handed to the parity syndrome is not a parity eigenstate.
    #[error("ambiguous syndrome: state is not a parity eigenstate (residual {0})")]
    AmbiguousSyndrome(f64),

    /// The error-state support touches a (near-)zero eigenvalue of x.
    #[error("singular inverse: support eigenvalue {0} below floor")]
    SingularInverse(f64),

    /// A 2x2 matrix handed to the fidelity is not a density matrix.
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    /// Two series that must share a time grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

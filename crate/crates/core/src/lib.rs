// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and verification toolkit for identical-particle qubits (IPQs).
//!
//! An IPQ stores one logical qubit in two bosonic modes occupied by a single
//! particle, |0⟩ = c₀†|vac⟩ and |1⟩ = c₁†|vac⟩. This crate implements, in one
//! place:
//!
//! - truncated Fock-space operator algebra for the encoding, its su(2) gate
//!   generators, parity stabilizer, and C-phase gate ([`fock`]);
//! - Lorentzian bath spectral densities and their memory kernels ([`bath`]);
//! - leakage-elimination (bang-bang) pulse trains ([`pulse`]);
//! - a linear Volterra integro-differential engine with a fast
//!   exponential-kernel path and a generic product-integration fallback
//!   ([`volterra`]);
//! - the exact coefficient dynamics for collective and individual
//!   decoherence, including driven bath-response coefficients and thermal
//!   contributions ([`collective`], [`individual`]);
//! - Bloch-vector observables, effective states, and infidelity
//!   ([`observables`]);
//! - parity detection, the ancilla-assisted non-unitary recovery protocol,
//!   the Knill-Laflamme checker, and the binomial-code reference ([`qec`]);
//! - an independent discretized-bath matrix-exponential oracle used to
//!   cross-validate the Volterra engine ([`oracle`]).
//!
//! All quantities are expressed in the gate-strength unit system (G = 1)
//! unless a scenario states otherwise.

pub mod bath;
pub mod collective;
pub mod error;
pub mod fock;
pub mod individual;
pub mod linalg;
pub mod observables;
pub mod oracle;
pub mod pulse;
pub mod qec;
pub mod volterra;

pub use error::{Error, Result};

/// Shorthand for the complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Frequently used constant: the imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-space operators for the identical-particle qubit, its
//! bath toy models, and the ancilla: mode operators, su(2) gate generators,
//! parity stabilizer, collective modes, the leakage-elimination reflection,
//! and the C-phase gate.
//!
//! Mode ordering is fixed: mode 0 is the least-significant index, i.e. the
//! basis state with occupations (n_{M-1}, ..., n_1, n_0) has linear index
//! Σ_k n_k (cutoff+1)^k.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::{C64, I};

/// Dense operator on a truncated Fock space.
pub type Operator = CMat;

/// Geometry of a truncated multi-mode Fock space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpec {
    pub mode_count: usize,
    /// Maximum occupation per mode; local dimension is `cutoff + 1`.
    pub cutoff: usize,
    /// Guard against accidentally huge tensor products.
    pub max_dim: usize,
}

pub const DEFAULT_MAX_DIM: usize = 1 << 16;

impl FockSpec {
    pub fn new(mode_count: usize, cutoff: usize) -> Result<Self> {
        Self::with_max_dim(mode_count, cutoff, DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim(mode_count: usize, cutoff: usize, max_dim: usize) -> Result<Self> {
        if mode_count == 0 || cutoff == 0 {
            return Err(Error::InvalidParameter(
                "FockSpec needs mode_count >= 1 and cutoff >= 1".into(),
            ));
        }
        let spec = FockSpec {
            mode_count,
            cutoff,
            max_dim,
        };
        let dim = spec.checked_dim()?;
        if dim > max_dim {
            return Err(Error::CapacityExceeded {
                what: "Fock space",
                needed: dim,
                limit: max_dim,
            });
        }
        Ok(spec)
    }

    fn checked_dim(&self) -> Result<usize> {
        let local = self.cutoff + 1;
        let mut dim = 1usize;
        for _ in 0..self.mode_count {
            dim = dim.checked_mul(local).ok_or(Error::CapacityExceeded {
                what: "Fock space",
                needed: usize::MAX,
                limit: self.max_dim,
            })?;
        }
        Ok(dim)
    }

    /// Total dimension `(cutoff + 1)^mode_count`.
    pub fn dim(&self) -> usize {
        (self.cutoff + 1).pow(self.mode_count as u32)
    }

    /// Basis state with the given occupation per mode (mode 0 first).
    pub fn basis_state(&self, occupations: &[usize]) -> Result<CVec> {
        if occupations.len() != self.mode_count {
            return Err(Error::DimensionMismatch(format!(
                "{} occupations for {} modes",
                occupations.len(),
                self.mode_count
            )));
        }
        let local = self.cutoff + 1;
        let mut idx = 0usize;
        for (k, &n) in occupations.iter().enumerate() {
            if n > self.cutoff {
                return Err(Error::InvalidParameter(format!(
                    "occupation {n} exceeds cutoff {}",
                    self.cutoff
                )));
            }
            idx += n * local.pow(k as u32);
        }
        let mut v = CVec::zeros(self.dim());
        v[idx] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = C64::new(1.0, 0.0);
        v
    }
}

/// Single-mode annihilation matrix, a|n⟩ = √n |n−1⟩, truncated at `cutoff`.
fn single_mode_annihilator(cutoff: usize) -> Operator {
    let d = cutoff + 1;
    let mut a = CMat::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// One annihilation operator per mode, embedded in the full space.
///
/// Operators of distinct modes commute exactly; within one mode the
/// truncated relation [a, a†] = I − (cutoff+1)·P_top holds, where P_top
/// projects onto the top occupation level.
pub fn build_mode_ops(spec: &FockSpec) -> Result<Vec<Operator>> {
    let dim = spec.checked_dim()?;
    if dim > spec.max_dim {
        return Err(Error::CapacityExceeded {
            what: "Fock space",
            needed: dim,
            limit: spec.max_dim,
        });
    }
    let local = spec.cutoff + 1;
    let a = single_mode_annihilator(spec.cutoff);
    let mut ops = Vec::with_capacity(spec.mode_count);
    for k in 0..spec.mode_count {
        let left = linalg::identity(local.pow((spec.mode_count - 1 - k) as u32));
        let right = linalg::identity(local.pow(k as u32));
        let op = linalg::kron(&left, &linalg::kron(&a, &right));
        ops.push(op);
    }
    Ok(ops)
}

pub fn number_op(a: &Operator) -> Operator {
    linalg::matmul(&linalg::dagger(a), a)
}

/// Logical kets |0⟩ = c₀†|vac⟩ and |1⟩ = c₁†|vac⟩.
#[derive(Debug, Clone)]
pub struct LogicalBasis {
    pub ket0: CVec,
    pub ket1: CVec,
}

impl LogicalBasis {
    pub fn new(spec: &FockSpec) -> Result<Self> {
        if spec.mode_count < 2 {
            return Err(Error::InvalidParameter(
                "logical basis needs at least two modes".into(),
            ));
        }
        let mut occ0 = vec![0usize; spec.mode_count];
        occ0[0] = 1;
        let mut occ1 = vec![0usize; spec.mode_count];
        occ1[1] = 1;
        Ok(LogicalBasis {
            ket0: spec.basis_state(&occ0)?,
            ket1: spec.basis_state(&occ1)?,
        })
    }
}

fn check_same_dim(a: &Operator, b: &Operator) -> Result<()> {
    if a.dim() != b.dim() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Gate generators J_x = c₀†c₁ + c₁†c₀, J_y = i(c₀†c₁ − c₀c₁†),
/// J_z = c₁†c₁ − c₀†c₀.
///
/// Sign convention: J_z|1⟩ = +|1⟩, so ⟨J_z⟩ = ⟨n₁⟩ − ⟨n₀⟩ and the
/// one-particle restriction reproduces the Pauli matrices in the
/// {|1⟩, |0⟩} basis ordering. The opposite J_z sign also circulates in the
/// literature; this convention is the one consistent with
/// [J_x, J_z] = −2i J_y and [J_x, J_y] = 2i J_z.
pub fn su2_generators(c0: &Operator, c1: &Operator) -> Result<(Operator, Operator, Operator)> {
    check_same_dim(c0, c1)?;
    let c0d = linalg::dagger(c0);
    let c1d = linalg::dagger(c1);
    let c0d_c1 = linalg::matmul(&c0d, c1);
    let c1d_c0 = linalg::matmul(&c1d, c0);
    let jx = &c0d_c1 + &c1d_c0;
    // c0 c1† = (c1 c0†)† and modes commute, so c0 c1† = c1† c0 works too;
    // keep the explicit product for clarity.
    let c0_c1d = linalg::matmul(c0, &c1d);
    let jy = (&c0d_c1 - &c0_c1d).mapv(|z| I * z);
    let jz = linalg::matmul(&c1d, c1) - linalg::matmul(&c0d, c0);
    Ok((jx, jy, jz))
}

/// Collective modes a₁ = (c₁+c₀)/√2 (bath-coupled) and a₀ = (c₁−c₀)/√2
/// (decoupled), returned as (a0, a1).
pub fn collective_modes(c0: &Operator, c1: &Operator) -> Result<(Operator, Operator)> {
    check_same_dim(c0, c1)?;
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let a1 = (c1 + c0).mapv(|z| s * z);
    let a0 = (c1 - c0).mapv(|z| s * z);
    Ok((a0, a1))
}

/// Exponentiate a diagonal integer-valued operator entrywise, with the
/// phase computed from the rounded integer so that occupation phases come
/// out exactly ±1/±i (products like (√n)² carry rounding dust otherwise).
///
/// Falls back to the dense matrix exponential for non-diagonal or
/// non-integer input (never produced by the constructors here).
fn exp_of_integer_diagonal(m: &Operator, scale: C64) -> Operator {
    let n = m.nrows();
    let mut diagonal_integers = true;
    'scan: for i in 0..n {
        for j in 0..n {
            if i != j && m[[i, j]].norm() > 1e-12 {
                diagonal_integers = false;
                break 'scan;
            }
        }
        let d = m[[i, i]];
        if d.im.abs() > 1e-12 || (d.re - d.re.round()).abs() > 1e-9 {
            diagonal_integers = false;
            break;
        }
    }
    if !diagonal_integers {
        return linalg::expm(&m.mapv(|z| scale * z));
    }
    let mut out = CMat::zeros((n, n));
    for i in 0..n {
        out[[i, i]] = (scale * m[[i, i]].re.round()).exp();
    }
    out
}

/// Parity stabilizer (−1)^(n₀+n₁+1): +1 on odd total occupation (the
/// error-free sector), −1 on even. Entries are exactly ±1.
pub fn parity_operator(c0: &Operator, c1: &Operator) -> Result<Operator> {
    check_same_dim(c0, c1)?;
    let n_tot = number_op(c0) + number_op(c1);
    let arg = &n_tot + &linalg::identity(n_tot.nrows());
    Ok(exp_of_integer_diagonal(&arg, I * std::f64::consts::PI))
}

/// Leakage-elimination reflection R_L = exp(−iπ(n₀+n₁)).
///
/// Hermitian, unitary, R_L² = I; conjugation flips the sign of anything
/// linear in c_i or c_i† and leaves bilinears invariant. Entries are
/// exactly ±1.
pub fn leo_reflection(c0: &Operator, c1: &Operator) -> Result<Operator> {
    check_same_dim(c0, c1)?;
    let n_tot = number_op(c0) + number_op(c1);
    Ok(exp_of_integer_diagonal(&n_tot, -I * std::f64::consts::PI))
}

/// C-phase evolution exp(−i α n₀^α n₀^β).
///
/// At α = π this is diag(1,1,1,−1) on the two-logical-qubit basis up to a
/// global phase: the −1 lands on |0⟩_α|0⟩_β, the only state both number
/// operators act on.
pub fn cphase_unitary(n0_alpha: &Operator, n0_beta: &Operator, alpha_cp: f64) -> Result<Operator> {
    check_same_dim(n0_alpha, n0_beta)?;
    let prod = linalg::matmul(n0_alpha, n0_beta);
    Ok(exp_of_integer_diagonal(&prod, -I * alpha_cp))
}

/// ⟨ψ|O|ψ⟩ for a normalized state.
pub fn expectation(op: &Operator, psi: &CVec) -> C64 {
    let opsi = linalg::matvec(op, psi);
    psi.iter().zip(opsi.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Restrict an operator to the span of the given orthonormal states,
/// returning the matrix ⟨basis_i|O|basis_j⟩.
pub fn restrict(op: &Operator, basis: &[CVec]) -> Array2<C64> {
    let k = basis.len();
    let mut out = Array2::zeros((k, k));
    for (j, bj) in basis.iter().enumerate() {
        let obj = linalg::matvec(op, bj);
        for (i, bi) in basis.iter().enumerate() {
            out[[i, j]] = bi.iter().zip(obj.iter()).map(|(a, b)| a.conj() * b).sum();
        }
    }
    out
}

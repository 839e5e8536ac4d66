// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Expectation values and effective-qubit observables.
//!
//! Everything funnels through the 2x2 mode-correlation matrix
//! G[a][b] = ⟨m_a†(t) m_b(t)⟩ built from coefficient trajectories
//! contracted against the initial-state expectations, plus the bath's
//! thermal contribution. Bloch components, occupations, the effective
//! density matrix ρ_eff = ½(I + Σ⟨J_k⟩σ_k), and the Uhlmann infidelity
//! all derive from G.
//!
//! Pauli correspondence uses the {|1⟩, |0⟩} basis ordering, so
//! ⟨J_z⟩ = ⟨n₁⟩ − ⟨n₀⟩.

use crate::error::{Error, Result};
use crate::C64;

pub type TwoByTwo = [[C64; 2]; 2];

/// Which mode pair a coefficient set refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Physical modes c₀, c₁.
    CModes,
    /// Collective modes a₀ = (c₁−c₀)/√2, a₁ = (c₁+c₀)/√2.
    AModes,
}

/// Initial one-particle system state.
#[derive(Debug, Clone, Copy)]
pub enum InitialState {
    /// α₀ c₀†|vac⟩ + α₁ c₁†|vac⟩ with |α₀|² + |α₁|² = 1.
    Pure { alpha0: C64, alpha1: C64 },
    /// One-particle density matrix ρ_kl (Hermitian, unit trace, PSD).
    Mixed { rho: TwoByTwo },
}

impl InitialState {
    pub fn pure(alpha0: C64, alpha1: C64) -> Result<Self> {
        let n = alpha0.norm_sqr() + alpha1.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "pure state not normalized: |α₀|²+|α₁|² = {n}"
            )));
        }
        Ok(InitialState::Pure { alpha0, alpha1 })
    }

    pub fn mixed(rho: TwoByTwo) -> Result<Self> {
        let tr = rho[0][0] + rho[1][1];
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        if (rho[0][1] - rho[1][0].conj()).norm() > 1e-10 {
            return Err(Error::NotDensityMatrix("not Hermitian".into()));
        }
        let det = (rho[0][0] * rho[1][1] - rho[0][1] * rho[1][0]).re;
        if det < -1e-10 || rho[0][0].re < -1e-12 || rho[1][1].re < -1e-12 {
            return Err(Error::NotDensityMatrix(format!("negative: det {det}")));
        }
        Ok(InitialState::Mixed { rho })
    }
}

/// Basis change a_i = Σ_j T[i][j] c_j (self-inverse).
const A_FROM_C: [[f64; 2]; 2] = [
    [-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
];

/// Transform a correlation matrix G[a][b] = ⟨m_a†m_b⟩ between the two
/// representations (the transform is its own inverse).
pub fn convert_correlations(g: &TwoByTwo) -> TwoByTwo {
    let t = &A_FROM_C;
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..2 {
                for l in 0..2 {
                    acc += t[i][k] * g[k][l] * t[j][l];
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// ⟨m_i† m_j⟩ of the initial state in the requested representation.
pub fn initial_expectations(state: &InitialState, rep: Representation) -> TwoByTwo {
    let g_c: TwoByTwo = match state {
        InitialState::Pure { alpha0, alpha1 } => {
            let a = [*alpha0, *alpha1];
            let mut g = [[C64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    g[i][j] = a[i].conj() * a[j];
                }
            }
            g
        }
        InitialState::Mixed { rho } => {
            // ⟨c_i†c_j⟩ = ρ_ji
            let mut g = [[C64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    g[i][j] = rho[j][i];
                }
            }
            g
        }
    };
    match rep {
        Representation::CModes => g_c,
        Representation::AModes => convert_correlations(&g_c),
    }
}

/// Coefficient 4-vector ordered [X₁¹, X₀¹, X₁⁰, X₀⁰]: superscript is the
/// evolving mode, subscript the initial mode.
pub type Coeff4 = [C64; 4];

pub fn coeff_index(evolving: usize, initial: usize) -> usize {
    (1 - evolving) * 2 + (1 - initial)
}

/// System part of G[a][b] = ⟨m_a†(t) m_b(t)⟩:
/// Σ_{ij} conj(X_i^a) X_j^b ⟨m_i†m_j⟩₀.
pub fn system_correlations(coeffs: &Coeff4, init: &TwoByTwo) -> TwoByTwo {
    let mut g = [[C64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    acc += coeffs[coeff_index(a, i)].conj()
                        * coeffs[coeff_index(b, j)]
                        * init[i][j];
                }
            }
            g[a][b] = acc;
        }
    }
    g
}

/// Bloch components and occupations extracted from a correlation matrix.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlochPoint {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub n0: f64,
    pub n1: f64,
}

/// Read out (J_x, J_y, J_z, n₀, n₁) from G given its representation.
pub fn bloch_from_correlations(g: &TwoByTwo, rep: Representation) -> BlochPoint {
    let g_c = match rep {
        Representation::CModes => *g,
        Representation::AModes => convert_correlations(g),
    };
    BlochPoint {
        jx: (g_c[0][1] + g_c[1][0]).re,
        jy: (crate::I * (g_c[0][1] - g_c[1][0])).re,
        jz: (g_c[1][1] - g_c[0][0]).re,
        n0: g_c[0][0].re,
        n1: g_c[1][1].re,
    }
}

/// Thermal bath contribution to G on a time grid, in a fixed
/// representation. Produced by the dynamics modules, consumed here.
#[derive(Debug, Clone)]
pub struct ThermalSeries {
    pub times: Vec<f64>,
    pub g_bath: Vec<TwoByTwo>,
    pub rep: Representation,
}

impl ThermalSeries {
    pub fn zero(times: &[f64], rep: Representation) -> Self {
        ThermalSeries {
            times: times.to_vec(),
            g_bath: vec![[[C64::new(0.0, 0.0); 2]; 2]; times.len()],
            rep,
        }
    }
}

/// Time series of Bloch points.
#[derive(Debug, Clone)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<BlochPoint>,
}

fn grids_match(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12)
}

/// Contract coefficient and thermal series into Bloch observables.
///
/// `coeffs` and `thermal` must share the time grid and representation.
pub fn bloch_series(
    times: &[f64],
    coeffs: &[Coeff4],
    rep: Representation,
    init: &InitialState,
    thermal: Option<&ThermalSeries>,
) -> Result<BlochTrajectory> {
    if coeffs.len() != times.len() {
        return Err(Error::GridMismatch(format!(
            "{} coefficient sets on {} times",
            coeffs.len(),
            times.len()
        )));
    }
    if let Some(th) = thermal {
        if th.rep != rep {
            return Err(Error::GridMismatch(
                "thermal series in a different representation".into(),
            ));
        }
        if !grids_match(&th.times, times) {
            return Err(Error::GridMismatch(
                "thermal series on a different time grid".into(),
            ));
        }
    }
    let e0 = initial_expectations(init, rep);
    let mut points = Vec::with_capacity(times.len());
    for (k, c) in coeffs.iter().enumerate() {
        let mut g = system_correlations(c, &e0);
        if let Some(th) = thermal {
            for a in 0..2 {
                for b in 0..2 {
                    g[a][b] += th.g_bath[k][a][b];
                }
            }
        }
        points.push(bloch_from_correlations(&g, rep));
    }
    Ok(BlochTrajectory {
        times: times.to_vec(),
        points,
    })
}

/// Occupation series ⟨n₀(t)⟩, ⟨n₁(t)⟩ (full bilinear contraction,
/// including initial-state coherences).
pub fn excitation_series(
    times: &[f64],
    coeffs: &[Coeff4],
    rep: Representation,
    init: &InitialState,
    thermal: Option<&ThermalSeries>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let traj = bloch_series(times, coeffs, rep, init, thermal)?;
    Ok((
        traj.points.iter().map(|p| p.n0).collect(),
        traj.points.iter().map(|p| p.n1).collect(),
    ))
}

/// Effective single-qubit state ρ_eff = ½(I + Σ⟨J_k⟩σ_k) in the
/// {|1⟩, |0⟩} ordering, with out-of-ball Bloch vectors rescaled and
/// flagged (a leakage indicator at high temperature, not an error).
#[derive(Debug, Clone, Copy)]
pub struct EffectiveState {
    pub bloch: [f64; 3],
    pub rho: TwoByTwo,
    pub clamped: bool,
}

pub fn effective_state(bloch: [f64; 3]) -> EffectiveState {
    let norm = (bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]).sqrt();
    let (r, clamped) = if norm > 1.0 {
        ([bloch[0] / norm, bloch[1] / norm, bloch[2] / norm], true)
    } else {
        (bloch, false)
    };
    let half = 0.5;
    let rho = [
        [
            C64::new(half * (1.0 + r[2]), 0.0),
            C64::new(half * r[0], -half * r[1]),
        ],
        [
            C64::new(half * r[0], half * r[1]),
            C64::new(half * (1.0 - r[2]), 0.0),
        ],
    ];
    EffectiveState {
        bloch: r,
        rho,
        clamped,
    }
}

impl EffectiveState {
    pub fn from_point(p: &BlochPoint) -> Self {
        effective_state([p.jx, p.jy, p.jz])
    }

    fn bloch_norm(&self) -> f64 {
        (self.bloch[0] * self.bloch[0] + self.bloch[1] * self.bloch[1]
            + self.bloch[2] * self.bloch[2])
            .sqrt()
    }
}

fn check_state(s: &EffectiveState) -> Result<()> {
    if s.bloch_norm() > 1.0 + 1e-9 {
        return Err(Error::NotDensityMatrix(format!(
            "Bloch norm {} > 1",
            s.bloch_norm()
        )));
    }
    Ok(())
}

/// Uhlmann fidelity for qubit states via the Bloch closed form,
/// F = ½(1 + r·s + √((1−|r|²)(1−|s|²))).
pub fn fidelity(a: &EffectiveState, b: &EffectiveState) -> Result<f64> {
    check_state(a)?;
    check_state(b)?;
    let dot: f64 = a.bloch.iter().zip(b.bloch.iter()).map(|(x, y)| x * y).sum();
    let ra = (1.0 - a.bloch_norm().powi(2)).max(0.0);
    let rb = (1.0 - b.bloch_norm().powi(2)).max(0.0);
    Ok((0.5 * (1.0 + dot + (ra * rb).sqrt())).clamp(0.0, 1.0))
}

/// 1 − F.
pub fn infidelity(a: &EffectiveState, b: &EffectiveState) -> Result<f64> {
    Ok(1.0 - fidelity(a, b)?)
}

/// Trace distance ½‖ρ−σ‖₁ = ½|r−s| for qubit states.
pub fn trace_distance(a: &EffectiveState, b: &EffectiveState) -> f64 {
    let d: f64 = a
        .bloch
        .iter()
        .zip(b.bloch.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    0.5 * d.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn a_mode_expectations_symmetric_state() {
        let st = InitialState::pure(re(S), re(S)).unwrap();
        let e = initial_expectations(&st, Representation::AModes);
        assert!((e[1][1] - re(1.0)).norm() < 1e-14, "⟨a₁†a₁⟩ = 1");
        assert!(e[0][0].norm() < 1e-14, "⟨a₀†a₀⟩ = 0");
    }

    #[test]
    fn a_mode_expectations_dfs_state() {
        let st = InitialState::pure(re(-S), re(S)).unwrap();
        let e = initial_expectations(&st, Representation::AModes);
        assert!((e[0][0] - re(1.0)).norm() < 1e-14, "⟨a₀†a₀⟩ = 1");
        assert!(e[1][1].norm() < 1e-14);
    }

    #[test]
    fn a_mode_expectations_maximally_mixed() {
        let rho = [[re(0.5), re(0.0)], [re(0.0), re(0.5)]];
        let st = InitialState::mixed(rho).unwrap();
        let e = initial_expectations(&st, Representation::AModes);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((e[i][j] - re(expect)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn closed_form_matches_expansion() {
        // ½(α₁*α₁ − (−1)^i α₀*α₁ − (−1)^j α₁*α₀ + (−1)^{i+j} α₀*α₀)
        let a0 = C64::new(0.3, 0.4);
        let a1 = C64::new(0.5, -(1.0_f64 - 0.25 - 0.25).sqrt());
        let st = InitialState::pure(a0, a1).unwrap();
        let e = initial_expectations(&st, Representation::AModes);
        for i in 0..2 {
            for j in 0..2 {
                let si = if i == 0 { 1.0 } else { -1.0 };
                let sj = if j == 0 { 1.0 } else { -1.0 };
                let expect = 0.5
                    * (a1.conj() * a1 - si * a0.conj() * a1 - sj * a1.conj() * a0
                        + si * sj * a0.conj() * a0);
                assert!((e[i][j] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn bloch_at_t0_is_standard() {
        let a0 = C64::new(0.6, 0.0);
        let a1 = C64::new(0.0, 0.8);
        let st = InitialState::pure(a0, a1).unwrap();
        let ident: Coeff4 = [re(1.0), re(0.0), re(0.0), re(1.0)];
        let traj = bloch_series(&[0.0], &[ident], Representation::CModes, &st, None).unwrap();
        let p = traj.points[0];
        // standard qubit Bloch of α₀|0⟩ + α₁|1⟩ with J_z = n₁ − n₀
        let expect_x = 2.0 * (a0.conj() * a1).re;
        let expect_y = (crate::I * (a0.conj() * a1 - a1.conj() * a0)).re;
        let expect_z = a1.norm_sqr() - a0.norm_sqr();
        assert!((p.jx - expect_x).abs() < 1e-14);
        assert!((p.jy - expect_y).abs() < 1e-14);
        assert!((p.jz - expect_z).abs() < 1e-14);
        assert!((p.n0 - 0.36).abs() < 1e-14 && (p.n1 - 0.64).abs() < 1e-14);
    }

    #[test]
    fn representation_conversion_is_involution() {
        let g: TwoByTwo = [
            [re(0.7), C64::new(0.1, 0.2)],
            [C64::new(0.1, -0.2), re(0.3)],
        ];
        let twice = convert_correlations(&convert_correlations(&g));
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[i][j] - twice[i][j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn effective_state_poles() {
        let up = effective_state([0.0, 0.0, 1.0]);
        assert!((up.rho[0][0] - re(1.0)).norm() < 1e-15); // |1⟩⟨1|
        assert!(up.rho[1][1].norm() < 1e-15);
        assert!(!up.clamped);
        let mixed = effective_state([0.0, 0.0, 0.0]);
        assert!((mixed.rho[0][0] - re(0.5)).norm() < 1e-15);
    }

    #[test]
    fn clamping_flagged() {
        let s = effective_state([1.2, 0.0, 0.0]);
        assert!(s.clamped);
        assert!((s.bloch[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn infidelity_reference_values() {
        let a = effective_state([0.0, 0.0, 1.0]);
        let b = effective_state([0.0, 0.0, 1.0]);
        assert!(infidelity(&a, &b).unwrap().abs() < 1e-15);
        let c = effective_state([0.0, 0.0, -1.0]);
        assert!((infidelity(&a, &c).unwrap() - 1.0).abs() < 1e-15);
        let m = effective_state([0.0, 0.0, 0.0]);
        assert!((infidelity(&a, &m).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let st = InitialState::pure(re(1.0), re(0.0)).unwrap();
        let ident: Coeff4 = [re(1.0), re(0.0), re(0.0), re(1.0)];
        let th = ThermalSeries::zero(&[0.0, 1.0], Representation::CModes);
        let r = bloch_series(&[0.0], &[ident], Representation::CModes, &st, Some(&th));
        assert!(matches!(r, Err(Error::GridMismatch(_))));
    }

    proptest! {
        #[test]
        fn infidelity_symmetric_and_bounded(
            x1 in -1.0f64..1.0, y1 in -1.0f64..1.0, z1 in -1.0f64..1.0,
            x2 in -1.0f64..1.0, y2 in -1.0f64..1.0, z2 in -1.0f64..1.0,
        ) {
            let a = effective_state([x1, y1, z1]);
            let b = effective_state([x2, y2, z2]);
            let iab = infidelity(&a, &b).unwrap();
            let iba = infidelity(&b, &a).unwrap();
            prop_assert!((iab - iba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&iab));
        }

        #[test]
        fn infidelity_zero_iff_equal(x in -0.99f64..0.99, y in -0.5f64..0.5) {
            let a = effective_state([x, y, 0.1]);
            prop_assert!(infidelity(&a, &a).unwrap() < 1e-12);
        }

        #[test]
        fn mixing_toward_common_state_contracts(lam in 0.05f64..0.95) {
            // moving both states toward a common target cannot increase infidelity
            let a = effective_state([0.9, 0.0, 0.0]);
            let b = effective_state([-0.3, 0.5, 0.2]);
            let target = [0.0, 0.0, 0.3];
            let mix = |s: &EffectiveState| {
                effective_state([
                    (1.0 - lam) * s.bloch[0] + lam * target[0],
                    (1.0 - lam) * s.bloch[1] + lam * target[1],
                    (1.0 - lam) * s.bloch[2] + lam * target[2],
                ])
            };
            let before = infidelity(&a, &b).unwrap();
            let after = infidelity(&mix(&a), &mix(&b)).unwrap();
            prop_assert!(after <= before + 1e-10);
        }
    }
}

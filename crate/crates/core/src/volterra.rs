// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Integrator for linear systems with memory,
//!
//!   ẋ(t) = A(t)·x(t) + Σ_p ∫₀ᵗ K_p(t−s)·M_p·x(s) ds + d(t),
//!
//! where each K_p is a scalar [`MemoryKernel`] and M_p a constant mask
//! matrix selecting which components feel that kernel.
//!
//! Two paths:
//! - [`integrate_exponential`]: for exponential-sum kernels, each kernel
//!   term is replaced by an auxiliary pseudo-mode z (ż = −λz + M_p x), and
//!   the enlarged ordinary system is stepped with classical RK4. The drift
//!   is sampled at step midpoints, so piecewise-constant pulse drifts are
//!   treated exactly as long as the grid contains every pulse edge
//!   ([`crate::pulse::build_grid`] guarantees that).
//! - [`integrate_generic`]: second-order product-integration trapezoidal
//!   rule for arbitrary (including sampled) kernels; O(N²·dim²) cost.

use ndarray::Array2;

use crate::bath::MemoryKernel;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::C64;

/// One memory contribution: a scalar kernel acting through a mask matrix.
pub struct MemoryTerm {
    pub kernel: MemoryKernel,
    pub mask: CMat,
}

type DriftFn = dyn Fn(f64) -> CMat + Sync + Send;
type DriveFn = dyn Fn(f64) -> CVec + Sync + Send;

/// Linear system with memory. `drift` must be safe to evaluate at any
/// t in the integration window; `drive` defaults to zero.
pub struct LinearMemorySystem {
    pub dim: usize,
    pub drift: Box<DriftFn>,
    pub memory: Vec<MemoryTerm>,
    pub drive: Option<Box<DriveFn>>,
    /// Abort threshold for the state norm (blow-up diagnostic).
    pub norm_bound: f64,
}

impl LinearMemorySystem {
    pub fn new(dim: usize, drift: Box<DriftFn>) -> Self {
        LinearMemorySystem {
            dim,
            drift,
            memory: Vec::new(),
            drive: None,
            norm_bound: 1e9,
        }
    }

    pub fn with_memory(mut self, kernel: MemoryKernel, mask: CMat) -> Self {
        assert_eq!(mask.nrows(), self.dim, "memory mask dimension");
        assert_eq!(mask.ncols(), self.dim, "memory mask dimension");
        self.memory.push(MemoryTerm { kernel, mask });
        self
    }

    pub fn with_drive(mut self, drive: Box<DriveFn>) -> Self {
        self.drive = Some(drive);
        self
    }

    fn validate(&self, x0: &CVec, grid: &[f64]) -> Result<()> {
        if x0.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "x0 has length {}, system dimension is {}",
                x0.len(),
                self.dim
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidParameter(
                "grid needs at least two points".into(),
            ));
        }
        if !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Time series of state vectors on a grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVec>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &CVec {
        self.states.last().expect("trajectory is never empty")
    }
}

fn norm(x: &CVec) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Pseudo-mode augmentation plus RK4. Falls back to [`integrate_generic`]
/// when any kernel lacks the exponential-sum form.
pub fn integrate_exponential(
    sys: &LinearMemorySystem,
    x0: &CVec,
    grid: &[f64],
) -> Result<Trajectory> {
    sys.validate(x0, grid)?;
    if sys.memory.iter().any(|t| !t.kernel.is_exponential()) {
        return integrate_generic(sys, x0, grid);
    }

    let dim = sys.dim;
    // one auxiliary block per exponential term of each memory contribution
    let mut aux: Vec<(C64, C64, &CMat)> = Vec::new();
    for term in &sys.memory {
        for &(amp, rate) in &term.kernel.terms {
            aux.push((amp, rate, &term.mask));
        }
    }
    let nblocks = aux.len();
    let total = dim * (1 + nblocks);

    let mut y = CVec::zeros(total);
    y.slice_mut(ndarray::s![0..dim]).assign(x0);

    let mut states = Vec::with_capacity(grid.len());
    states.push(x0.clone());

    // augmented generator, rebuilt per step at the midpoint
    let mut gen: CMat = Array2::zeros((total, total));
    let stage = |gen: &CMat, t: f64, y: &CVec, out: &mut CVec| {
        *out = linalg::matvec(gen, y);
        if let Some(d) = &sys.drive {
            let dv = d(t);
            for i in 0..dim {
                out[i] += dv[i];
            }
        }
    };

    let (mut k1, mut k2, mut k3, mut k4) =
        (CVec::zeros(total), CVec::zeros(total), CVec::zeros(total), CVec::zeros(total));

    for w in grid.windows(2) {
        let (t, tn) = (w[0], w[1]);
        let h = tn - t;
        let a_mid = (sys.drift)(0.5 * (t + tn));

        gen.fill(C64::new(0.0, 0.0));
        for i in 0..dim {
            for j in 0..dim {
                gen[[i, j]] = a_mid[[i, j]];
            }
        }
        for (b, (amp, rate, mask)) in aux.iter().enumerate() {
            let off = dim * (1 + b);
            for i in 0..dim {
                gen[[i, off + i]] = *amp;
                gen[[off + i, off + i]] = -rate;
                for j in 0..dim {
                    gen[[off + i, j]] = mask[[i, j]];
                }
            }
        }

        stage(&gen, t, &y, &mut k1);
        let y2 = &y + &k1.mapv(|z| z * 0.5 * h);
        stage(&gen, t + 0.5 * h, &y2, &mut k2);
        let y3 = &y + &k2.mapv(|z| z * 0.5 * h);
        stage(&gen, t + 0.5 * h, &y3, &mut k3);
        let y4 = &y + &k3.mapv(|z| z * h);
        stage(&gen, tn, &y4, &mut k4);

        for i in 0..total {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let x_now = y.slice(ndarray::s![0..dim]).to_owned();
        let n = norm(&x_now);
        if !n.is_finite() || n > sys.norm_bound {
            return Err(Error::SolverUnstable {
                t: tn,
                norm: n,
                bound: sys.norm_bound,
            });
        }
        states.push(x_now);
    }

    Ok(Trajectory {
        times: grid.to_vec(),
        states,
    })
}

/// Product-integration trapezoidal scheme (second order). Handles any
/// kernel evaluable at arbitrary τ; cost grows as O(N²·dim²).
pub fn integrate_generic(
    sys: &LinearMemorySystem,
    x0: &CVec,
    grid: &[f64],
) -> Result<Trajectory> {
    sys.validate(x0, grid)?;
    let dim = sys.dim;
    let n_steps = grid.len();
    let id = linalg::identity(dim);

    // mask·x products cached per node for the history sums
    let mut mx: Vec<Vec<CVec>> = vec![Vec::with_capacity(n_steps); sys.memory.len()];
    let mut states: Vec<CVec> = Vec::with_capacity(n_steps);
    states.push(x0.clone());
    for (p, term) in sys.memory.iter().enumerate() {
        mx[p].push(linalg::matvec(&term.mask, x0));
    }

    let drive_at = |t: f64| -> CVec {
        match &sys.drive {
            Some(d) => d(t),
            None => CVec::zeros(dim),
        }
    };

    // trapezoidal history weight of node j on the grid prefix 0..=n
    let weight = |grid: &[f64], n: usize, j: usize| -> f64 {
        if n == 0 {
            return 0.0;
        }
        if j == 0 {
            0.5 * (grid[1] - grid[0])
        } else if j == n {
            0.5 * (grid[n] - grid[n - 1])
        } else {
            0.5 * (grid[j + 1] - grid[j - 1])
        }
    };

    // memory sum Σ_p Σ_{j=0..n} w_j K_p(t_n - t_j) (M_p x_j), optionally
    // excluding the j = n self-term (handled implicitly)
    let history = |mx: &[Vec<CVec>], n: usize, include_self: bool| -> CVec {
        let mut acc = CVec::zeros(dim);
        for (p, term) in sys.memory.iter().enumerate() {
            let hi = if include_self { n } else { n.saturating_sub(1) };
            for j in 0..=hi {
                if n == 0 {
                    break;
                }
                let w = weight(grid, n, j);
                let k = term.kernel.eval(grid[n] - grid[j]);
                let kw = k * w;
                for i in 0..dim {
                    acc[i] += kw * mx[p][j][i];
                }
            }
        }
        acc
    };

    for n in 0..n_steps - 1 {
        let (t, tn) = (grid[n], grid[n + 1]);
        let h = tn - t;
        let a_mid = (sys.drift)(0.5 * (t + tn));

        // explicit side: F_n with full history at t_n
        let mut f_n = linalg::matvec(&a_mid, &states[n]);
        let hist_n = history(&mx, n, true);
        let d_n = drive_at(t);
        for i in 0..dim {
            f_n[i] += hist_n[i] + d_n[i];
        }

        // implicit side: history at t_{n+1} over the known nodes j <= n;
        // the j = n+1 self-term moves into the linear solve
        let hist_np1_known = history(&mx, n + 1, false);

        let d_np1 = drive_at(tn);
        let mut rhs = states[n].clone();
        for i in 0..dim {
            rhs[i] += 0.5 * h * (f_n[i] + hist_np1_known[i] + d_np1[i]);
        }

        // lhs = I - h/2 (A_mid + Σ_p (h/2) K_p(0) M_p)
        let w_self = 0.5 * h;
        let mut implicit = a_mid.clone();
        for term in &sys.memory {
            let k0 = term.kernel.eval(0.0);
            implicit = implicit + term.mask.mapv(|m| m * k0 * w_self);
        }
        let lhs = &id - &implicit.mapv(|z| z * 0.5 * h);
        let x_guess = linalg::solve_vec(&lhs, &rhs);

        let nn = norm(&x_guess);
        if !nn.is_finite() || nn > sys.norm_bound {
            return Err(Error::SolverUnstable {
                t: tn,
                norm: nn,
                bound: sys.norm_bound,
            });
        }
        for (p, term) in sys.memory.iter().enumerate() {
            mx[p].push(linalg::matvec(&term.mask, &x_guess));
        }
        states.push(x_guess);
    }

    Ok(Trajectory {
        times: grid.to_vec(),
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, matvec};
    use crate::I;

    fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
    }

    fn scalar_exp_kernel_system(gamma: f64) -> LinearMemorySystem {
        // ẋ = -∫ e^{-γ(t-s)} x(s) ds
        let kernel = MemoryKernel::from_terms(vec![(C64::new(1.0, 0.0), C64::new(gamma, 0.0))])
            .unwrap();
        let mask = CMat::from_elem((1, 1), C64::new(-1.0, 0.0));
        LinearMemorySystem::new(1, Box::new(|_| CMat::zeros((1, 1)))).with_memory(kernel, mask)
    }

    /// Analytic solution of ẋ = -z, ż = -γz + x, x(0)=1, z(0)=0.
    fn scalar_exp_kernel_exact(gamma: f64, t: f64) -> C64 {
        let a = CMat::from_shape_vec(
            (2, 2),
            vec![
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(-gamma, 0.0),
            ],
        )
        .unwrap();
        let e = expm(&a.mapv(|z| z * t));
        e[[0, 0]]
    }

    #[test]
    fn closed_phase_rotation_exact() {
        // zero kernel, A = -iG (σz-like 1-dim): phase rotation
        let g = 2.0;
        let sys = LinearMemorySystem::new(
            1,
            Box::new(move |_| CMat::from_elem((1, 1), -I * g)),
        );
        let grid = uniform_grid(std::f64::consts::PI / g, 600);
        let traj = integrate_exponential(&sys, &CVec::from(vec![C64::new(1.0, 0.0)]), &grid)
            .unwrap();
        for (t, x) in traj.times.iter().zip(traj.states.iter()) {
            let expect = (-I * g * *t).exp();
            assert!((x[0] - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn scalar_memory_matches_companion_solution() {
        let gamma = 0.8;
        let sys = scalar_exp_kernel_system(gamma);
        let grid = uniform_grid(5.0, 2500);
        let traj =
            integrate_exponential(&sys, &CVec::from(vec![C64::new(1.0, 0.0)]), &grid).unwrap();
        let mut worst = 0.0_f64;
        for (t, x) in traj.times.iter().zip(traj.states.iter()) {
            worst = worst.max((x[0] - scalar_exp_kernel_exact(gamma, *t)).norm());
        }
        assert!(worst < 1e-8, "max deviation {worst}");
    }

    #[test]
    fn generic_second_order_convergence() {
        let gamma = 0.8;
        let sys = scalar_exp_kernel_system(gamma);
        let t_end = 3.0;
        let exact = scalar_exp_kernel_exact(gamma, t_end);
        let err_of = |n: usize| {
            let traj =
                integrate_generic(&sys, &CVec::from(vec![C64::new(1.0, 0.0)]), &uniform_grid(t_end, n))
                    .unwrap();
            (traj.last_state()[0] - exact).norm()
        };
        let e1 = err_of(200);
        let e2 = err_of(400);
        let ratio = e1 / e2;
        assert!(
            (3.0..5.5).contains(&ratio),
            "convergence ratio {ratio} (errors {e1}, {e2})"
        );
    }

    #[test]
    fn generic_drive_only_exact() {
        let d = C64::new(0.4, -0.2);
        let sys = LinearMemorySystem::new(1, Box::new(|_| CMat::zeros((1, 1))))
            .with_drive(Box::new(move |_| CVec::from(vec![d])));
        let grid = uniform_grid(2.0, 40);
        let traj = integrate_generic(&sys, &CVec::from(vec![C64::new(1.0, 0.0)]), &grid).unwrap();
        for (t, x) in traj.times.iter().zip(traj.states.iter()) {
            assert!((x[0] - (C64::new(1.0, 0.0) + d * *t)).norm() < 1e-13);
        }
    }

    #[test]
    fn generic_zero_kernel_matches_expm() {
        let mut a = CMat::zeros((2, 2));
        a[[0, 1]] = C64::new(0.0, -1.3);
        a[[1, 0]] = C64::new(0.0, -1.3);
        let ac = a.clone();
        let sys = LinearMemorySystem::new(2, Box::new(move |_| ac.clone()));
        let grid = uniform_grid(1.0, 400);
        let x0 = CVec::from(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let traj = integrate_generic(&sys, &x0, &grid).unwrap();
        let exact = matvec(&expm(&a), &x0);
        let err = (traj.last_state()[0] - exact[0]).norm();
        assert!(err < 5e-6, "error vs expm {err}");
    }

    fn random_4dim_system(seed: u64) -> LinearMemorySystem {
        let mut state = seed;
        let mut rnd = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = CMat::zeros((4, 4));
        let mut m = CMat::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                a[[i, j]] = C64::new(0.0, rnd()); // anti-Hermitian-ish drift
                m[[i, j]] = C64::new(0.3 * rnd(), 0.3 * rnd());
            }
        }
        let kernel =
            MemoryKernel::from_terms(vec![(C64::new(0.5, 0.1), C64::new(1.0, 0.4))]).unwrap();
        LinearMemorySystem::new(4, Box::new(move |_| a.clone())).with_memory(kernel, m)
    }

    #[test]
    fn exponential_and_generic_agree() {
        let sys = random_4dim_system(7);
        let grid = uniform_grid(5.0, 4000);
        let x0 = CVec::from(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.5),
            C64::new(-0.5, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let te = integrate_exponential(&sys, &x0, &grid).unwrap();
        let tg = integrate_generic(&sys, &x0, &grid).unwrap();
        let mut worst = 0.0_f64;
        for (xe, xg) in te.states.iter().zip(tg.states.iter()) {
            for i in 0..4 {
                worst = worst.max((xe[i] - xg[i]).norm());
            }
        }
        assert!(worst < 1e-6, "methods disagree by {worst}");
    }

    #[test]
    fn linearity() {
        let sys = random_4dim_system(13);
        let grid = uniform_grid(2.0, 800);
        let e1 = CVec::from(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let e2 = CVec::from(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let alpha = C64::new(0.3, -0.7);
        let beta = C64::new(-1.1, 0.2);
        let combo: CVec = e1
            .iter()
            .zip(e2.iter())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let t1 = integrate_exponential(&sys, &e1, &grid).unwrap();
        let t2 = integrate_exponential(&sys, &e2, &grid).unwrap();
        let tc = integrate_exponential(&sys, &combo, &grid).unwrap();
        let mut worst = 0.0_f64;
        for k in 0..grid.len() {
            for i in 0..4 {
                let lin = alpha * t1.states[k][i] + beta * t2.states[k][i];
                worst = worst.max((tc.states[k][i] - lin).norm());
            }
        }
        assert!(worst < 1e-9, "linearity violated by {worst}");
    }

    #[test]
    fn sampled_kernel_routes_to_generic() {
        // same scalar test, kernel supplied as samples
        let gamma = 0.8;
        let dt = 0.002;
        let values: Vec<C64> = (0..4000)
            .map(|k| C64::new((-gamma * dt * k as f64).exp(), 0.0))
            .collect();
        let kernel = MemoryKernel::from_samples(dt, values).unwrap();
        let mask = CMat::from_elem((1, 1), C64::new(-1.0, 0.0));
        let sys = LinearMemorySystem::new(1, Box::new(|_| CMat::zeros((1, 1))))
            .with_memory(kernel, mask);
        let grid = uniform_grid(3.0, 1500);
        let traj =
            integrate_exponential(&sys, &CVec::from(vec![C64::new(1.0, 0.0)]), &grid).unwrap();
        let exact = scalar_exp_kernel_exact(gamma, 3.0);
        assert!((traj.last_state()[0] - exact).norm() < 1e-4);
    }

    #[test]
    fn norm_blowup_aborts() {
        // ẋ = +5x explodes past the bound
        let mut sys = LinearMemorySystem::new(
            1,
            Box::new(|_| CMat::from_elem((1, 1), C64::new(5.0, 0.0))),
        );
        sys.norm_bound = 1e3;
        let grid = uniform_grid(10.0, 2000);
        let res = integrate_exponential(&sys, &CVec::from(vec![C64::new(1.0, 0.0)]), &grid);
        assert!(matches!(res, Err(Error::SolverUnstable { .. })));
    }
}

// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lorentzian spectral densities, their memory kernels in closed form and
//! by quadrature, thermal occupancy, and bath discretization for the
//! matrix-exponential oracle.
//!
//! The Lorentzian J(ω) = Γγ²/2π / ((ω−Ω)² + γ²) yields exponential
//! kernels when the frequency integral is extended over the whole real
//! line; with Ω ≫ γ the negative-frequency mass is a ~(γ/Ω)/π correction
//! that the quadrature oracle quantifies.

use crate::error::{Error, Result};
use crate::C64;

/// Lorentzian spectral density parameters.
///
/// `coupling` is the global dissipation rate Γ, `width` the spectral
/// width γ, `center` the central frequency Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianSpectrum {
    pub coupling: f64,
    pub width: f64,
    pub center: f64,
}

impl LorentzianSpectrum {
    pub fn new(coupling: f64, width: f64, center: f64) -> Result<Self> {
        if coupling <= 0.0 || width <= 0.0 {
            return Err(Error::InvalidParameter(
                "Lorentzian spectrum needs coupling > 0 and width > 0".into(),
            ));
        }
        Ok(LorentzianSpectrum {
            coupling,
            width,
            center,
        })
    }

    /// J(ω) = Γγ²/2π / ((ω−Ω)² + γ²).
    pub fn density(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        self.coupling * self.width * self.width
            / (2.0 * std::f64::consts::PI)
            / (d * d + self.width * self.width)
    }

    /// Total full-line weight ∫J dω = Γγ/2.
    pub fn total_weight(&self) -> f64 {
        0.5 * self.coupling * self.width
    }
}

pub fn spectral_density(spec: &LorentzianSpectrum, omega: f64) -> f64 {
    spec.density(omega)
}

/// Bath correlation kernel as a sum of complex exponentials,
/// f(τ) = Σ_m amp_m · exp(−rate_m τ), with optional sampled fallback.
#[derive(Debug, Clone, Default)]
pub struct MemoryKernel {
    /// (amplitude, decay rate); every rate has positive real part.
    pub terms: Vec<(C64, C64)>,
    /// Uniformly sampled kernel for spectra without a closed form.
    pub samples: Option<SampledKernel>,
}

#[derive(Debug, Clone)]
pub struct SampledKernel {
    pub dt: f64,
    pub values: Vec<C64>,
}

impl MemoryKernel {
    pub fn from_terms(terms: Vec<(C64, C64)>) -> Result<Self> {
        for (_, rate) in &terms {
            if rate.re <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "kernel decay rate {rate} must have positive real part"
                )));
            }
        }
        Ok(MemoryKernel {
            terms,
            samples: None,
        })
    }

    pub fn from_samples(dt: f64, values: Vec<C64>) -> Result<Self> {
        if dt <= 0.0 || values.len() < 2 {
            return Err(Error::InvalidParameter(
                "sampled kernel needs dt > 0 and at least two samples".into(),
            ));
        }
        Ok(MemoryKernel {
            terms: Vec::new(),
            samples: Some(SampledKernel { dt, values }),
        })
    }

    pub fn is_exponential(&self) -> bool {
        self.samples.is_none()
    }

    /// Evaluate f(τ) for τ ≥ 0 (linear interpolation on the sampled path).
    pub fn eval(&self, tau: f64) -> C64 {
        if let Some(s) = &self.samples {
            let pos = tau / s.dt;
            let i = pos.floor() as usize;
            if i + 1 >= s.values.len() {
                return *s.values.last().unwrap();
            }
            let w = pos - i as f64;
            return s.values[i] * (1.0 - w) + s.values[i + 1] * w;
        }
        self.terms
            .iter()
            .map(|(amp, rate)| amp * (-rate * tau).exp())
            .sum()
    }

    /// f(0), which equals the sum of amplitudes on the exponential path.
    pub fn at_zero(&self) -> C64 {
        self.eval(0.0)
    }

    /// Complex-conjugate kernel f*(τ).
    pub fn conjugate(&self) -> MemoryKernel {
        MemoryKernel {
            terms: self
                .terms
                .iter()
                .map(|(a, r)| (a.conj(), r.conj()))
                .collect(),
            samples: self.samples.as_ref().map(|s| SampledKernel {
                dt: s.dt,
                values: s.values.iter().map(|v| v.conj()).collect(),
            }),
        }
    }

    /// Kernel scaled by -1 (sign-sensitivity hook used by `verify`).
    pub fn negated(&self) -> MemoryKernel {
        MemoryKernel {
            terms: self.terms.iter().map(|(a, r)| (-a, *r)).collect(),
            samples: self.samples.as_ref().map(|s| SampledKernel {
                dt: s.dt,
                values: s.values.iter().map(|v| -v).collect(),
            }),
        }
    }
}

/// Excitation-exchange kernel in a frame rotating at `omega0`:
/// f(τ) = ∫J(ω)e^{−i(ω−ω₀)τ}dω = (Γγ/2)·exp(−(γ + i(Ω−ω₀))τ).
pub fn rwa_kernel(spec: &LorentzianSpectrum, omega0: f64) -> Result<MemoryKernel> {
    let amp = C64::new(spec.total_weight(), 0.0);
    let rate = C64::new(spec.width, spec.center - omega0);
    MemoryKernel::from_terms(vec![(amp, rate)])
}

/// Position-coupling kernel f(τ) = −2i ∫J(ω) sin(ωτ) dω
/// = (Γγ/2)·(e^{−(γ+iΩ)τ} − e^{−(γ−iΩ)τ}) = −iΓγ e^{−γτ} sin(Ωτ).
pub fn nonrwa_kernel(spec: &LorentzianSpectrum) -> Result<MemoryKernel> {
    if spec.center <= 0.0 {
        return Err(Error::InvalidParameter(
            "nonrwa_kernel needs a positive central frequency".into(),
        ));
    }
    let amp = C64::new(spec.total_weight(), 0.0);
    MemoryKernel::from_terms(vec![
        (amp, C64::new(spec.width, spec.center)),
        (-amp, C64::new(spec.width, -spec.center)),
    ])
}

/// Bose-Einstein occupancy 1/(e^{βω} − 1); zero at β = +∞.
pub fn thermal_occupancy(omega: f64, beta: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "thermal occupancy diverges for omega = {omega} <= 0"
        )));
    }
    if beta.is_infinite() {
        return Ok(0.0);
    }
    if beta <= 0.0 {
        return Err(Error::InvalidParameter(
            "inverse temperature must be positive or +inf".into(),
        ));
    }
    Ok(1.0 / (beta * omega).exp_m1())
}

/// Uniformly discretized bath with couplings g_k = √(J(ω_k)Δω).
#[derive(Debug, Clone)]
pub struct BathDiscretization {
    pub frequencies: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl BathDiscretization {
    pub fn mode_count(&self) -> usize {
        self.frequencies.len()
    }

    pub fn coupling_weight(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }
}

/// Midpoint discretization of [Ω−kγ, Ω+kγ], clipped below at ω > 0.
pub fn discretize(
    spec: &LorentzianSpectrum,
    mode_count: usize,
    coverage: f64,
) -> Result<BathDiscretization> {
    if mode_count < 2 {
        return Err(Error::InvalidParameter(
            "discretize needs at least two modes".into(),
        ));
    }
    let lo = (spec.center - coverage * spec.width).max(f64::MIN_POSITIVE);
    let hi = spec.center + coverage * spec.width;
    if hi <= lo {
        return Err(Error::InvalidParameter(
            "discretization window is empty after clipping".into(),
        ));
    }
    let dw = (hi - lo) / mode_count as f64;
    let mut frequencies = Vec::with_capacity(mode_count);
    let mut couplings = Vec::with_capacity(mode_count);
    for k in 0..mode_count {
        let w = lo + (k as f64 + 0.5) * dw;
        frequencies.push(w);
        couplings.push((spec.density(w) * dw).sqrt());
    }
    Ok(BathDiscretization {
        frequencies,
        couplings,
    })
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gl_on_interval(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&t| half * t).collect(),
    )
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `per` nodes.
pub fn composite_gl(a: f64, b: f64, panels: usize, per: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(panels * per);
    let mut ws = Vec::with_capacity(panels * per);
    for p in 0..panels {
        let lo = a + (b - a) * p as f64 / panels as f64;
        let hi = a + (b - a) * (p + 1) as f64 / panels as f64;
        let (x, w) = gl_on_interval(lo, hi, per);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Quadrature reference for full-line kernel integrals ∫J(ω)·phase(ω,τ)·dω
/// at relative accuracy 1e-9 of the total weight Γγ/2. Deliberately
/// independent of the closed-form kernel path: this is the validation
/// route. See [`kernel_quadrature_tol`] for a faster, looser variant.
pub fn kernel_quadrature<F>(spec: &LorentzianSpectrum, tau: f64, phase: F) -> C64
where
    F: Fn(f64, f64) -> C64,
{
    kernel_quadrature_tol(spec, tau, phase, 1e-9)
}

/// Graded-panel Gauss-Legendre over the full line: panel widths follow the
/// local Lorentzian smoothness scale (growing geometrically away from the
/// peak) but never exceed a quarter period of the oscillatory factor, and
/// integration stops once the analytic tail bound — the smaller of the
/// remaining spectral mass (Γγ²/2π)/d and the integration-by-parts bound
/// (Γγ²/π)/(τd²) per side — drops below `rel_tol · Γγ/2`.
pub fn kernel_quadrature_tol<F>(
    spec: &LorentzianSpectrum,
    tau: f64,
    phase: F,
    rel_tol: f64,
) -> C64
where
    F: Fn(f64, f64) -> C64,
{
    let gamma = spec.width;
    let abs_tol = rel_tol * spec.total_weight();
    let quarter = if tau > 0.0 {
        std::f64::consts::FRAC_PI_2 / tau
    } else {
        f64::INFINITY
    };
    let prefac = spec.coupling * gamma * gamma / (2.0 * std::f64::consts::PI);
    let mut total = C64::new(0.0, 0.0);
    for side in [-1.0_f64, 1.0] {
        let mut offset = 0.0_f64;
        loop {
            let width = (0.3 * gamma.max(0.5 * offset)).min(quarter);
            let (lo, hi) = if side < 0.0 {
                (spec.center - offset - width, spec.center - offset)
            } else {
                (spec.center + offset, spec.center + offset + width)
            };
            let (x, w) = gl_on_interval(lo, hi, 8);
            for (xi, wi) in x.iter().zip(w.iter()) {
                total += spec.density(*xi) * phase(*xi, tau) * *wi;
            }
            offset += width;
            let mass_tail = prefac / offset;
            let osc_tail = if tau > 0.0 {
                2.0 * prefac / (tau * offset * offset)
            } else {
                f64::INFINITY
            };
            if mass_tail.min(osc_tail) < 0.25 * abs_tol || offset > 1e10 * gamma {
                break;
            }
        }
    }
    total
}

// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Rectangular leakage-elimination pulse trains μ(t), their accumulated
//! phase Φ(t) = ∫₀ᵗ μ, and integration grids that resolve every pulse edge.
//!
//! Pulses are ideal rectangles of strength c₀ and width Δτ separated by
//! gaps δτ; the phase per complete pulse is exactly c₀Δτ. A pulse is
//! closed on the left and open on the right: μ(t_edge) at a rising edge
//! already has the pulse value.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain {
    /// Pulse strength c₀ (frequency units). Zero disables the train.
    pub strength: f64,
    /// Pulse width Δτ.
    pub width: f64,
    /// Gap δτ between consecutive pulses.
    pub spacing: f64,
    /// Start time of the first pulse.
    pub start_offset: f64,
    /// Length of the window on which the train is defined.
    pub total_duration: f64,
}

impl PulseTrain {
    pub fn new(strength: f64, width: f64, spacing: f64, duration: f64) -> Result<Self> {
        Self::with_offset(strength, width, spacing, 0.0, duration)
    }

    pub fn with_offset(
        strength: f64,
        width: f64,
        spacing: f64,
        start_offset: f64,
        duration: f64,
    ) -> Result<Self> {
        if strength < 0.0 || width <= 0.0 || spacing < 0.0 || start_offset < 0.0 {
            return Err(Error::InvalidParameter(
                "pulse train needs strength >= 0, width > 0, spacing >= 0, offset >= 0".into(),
            ));
        }
        if duration <= 0.0 {
            return Err(Error::InvalidParameter("duration must be positive".into()));
        }
        Ok(PulseTrain {
            strength,
            width,
            spacing,
            start_offset,
            total_duration: duration,
        })
    }

    /// A train with the pulses switched off.
    pub fn off(duration: f64) -> Result<Self> {
        Self::with_offset(0.0, 1.0, 0.0, 0.0, duration)
    }

    pub fn is_active(&self) -> bool {
        self.strength > 0.0
    }

    pub fn period(&self) -> f64 {
        self.width + self.spacing
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < 0.0 || t > self.total_duration * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "t = {t} outside [0, {}]",
                self.total_duration
            )));
        }
        Ok(())
    }

    /// μ(t): c₀ inside a pulse, 0 in gaps.
    pub fn mu_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        if !self.is_active() {
            return Ok(0.0);
        }
        let u = t - self.start_offset;
        if u < 0.0 {
            return Ok(0.0);
        }
        let r = u - (u / self.period()).floor() * self.period();
        Ok(if r < self.width { self.strength } else { 0.0 })
    }

    /// Φ(t) = ∫₀ᵗ μ(τ)dτ, exact piecewise-linear evaluation.
    pub fn phase_integral(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        if !self.is_active() || t <= self.start_offset {
            return Ok(0.0);
        }
        let u = t - self.start_offset;
        let per = self.period();
        let n = (u / per).floor();
        let r = u - n * per;
        Ok(self.strength * (n * self.width + r.min(self.width)))
    }

    /// Times of every pulse edge (rising and falling) inside (0, T).
    pub fn edge_times(&self) -> Vec<f64> {
        let mut edges = Vec::new();
        if !self.is_active() {
            return edges;
        }
        let per = self.period();
        let mut t = self.start_offset;
        while t < self.total_duration {
            if t > 0.0 {
                edges.push(t);
            }
            let fall = t + self.width;
            if fall < self.total_duration {
                edges.push(fall);
            }
            t += per;
        }
        edges
    }
}

pub const DEFAULT_GRID_CAP: usize = 4_000_000;

/// Uniform grid of step ≤ `base_step`, refined so every pulse edge is a
/// grid point and each pulse interior carries at least 8 steps.
pub fn build_grid(train: &PulseTrain, base_step: f64) -> Result<Vec<f64>> {
    build_grid_capped(train, base_step, DEFAULT_GRID_CAP)
}

pub fn build_grid_capped(train: &PulseTrain, base_step: f64, cap: usize) -> Result<Vec<f64>> {
    if base_step <= 0.0 {
        return Err(Error::InvalidParameter("base_step must be positive".into()));
    }
    let t_end = train.total_duration;
    let mut anchors = vec![0.0, t_end];
    anchors.extend(train.edge_times());
    anchors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    anchors.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    let pulse_step = if train.is_active() {
        (train.width / 8.0).min(base_step)
    } else {
        base_step
    };

    let mut grid = Vec::new();
    for win in anchors.windows(2) {
        let (a, b) = (win[0], win[1]);
        let span = b - a;
        if span <= 1e-15 {
            continue;
        }
        // step choice per segment: finer inside pulses
        let inside_pulse = train.is_active() && train.mu_at(0.5 * (a + b)).unwrap_or(0.0) > 0.0;
        let step = if inside_pulse { pulse_step } else { base_step };
        let n = (span / step).ceil().max(1.0) as usize;
        let estimated = grid.len() + n;
        if estimated > cap {
            return Err(Error::CapacityExceeded {
                what: "time grid",
                needed: estimated,
                limit: cap,
            });
        }
        for k in 0..n {
            grid.push(a + span * k as f64 / n as f64);
        }
    }
    grid.push(t_end);
    Ok(grid)
}

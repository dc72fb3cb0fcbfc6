use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Mass, angular frequency and reduced Planck constant of the oscillator
/// `H = p²/2μ + μω²x²/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub mu: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { mu: 1.0, omega: 1.0, hbar: 1.0 }
    }
}

impl Units {
    pub fn new(mu: f64, omega: f64, hbar: f64) -> Result<Self> {
        let u = Self { mu, omega, hbar };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("omega", self.omega), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Oscillator length `√(ħ/μω)`.
    pub fn length_scale(&self) -> f64 {
        (self.hbar / (self.mu * self.omega)).sqrt()
    }

    /// Oscillator momentum `√(μωħ)`.
    pub fn momentum_scale(&self) -> f64 {
        (self.mu * self.omega * self.hbar).sqrt()
    }

    /// `μω`.
    pub fn mu_omega(&self) -> f64 {
        self.mu * self.omega
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Physical size of a dimensionless `x̃^k p̃^l` moment.
    pub fn moment_scale(&self, k: usize, l: usize) -> f64 {
        self.length_scale().powi(k as i32) * self.momentum_scale().powi(l as i32)
    }
}

/// `n_samples` uniform instants over `periods` oscillator periods, excluding the
/// end point so the samples tile the window exactly.
pub fn uniform_times(u: &Units, periods: f64, n_samples: usize) -> Vec<f64> {
    let span = periods * u.period();
    (0..n_samples).map(|j| span * j as f64 / n_samples as f64).collect()
}

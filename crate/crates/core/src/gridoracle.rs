//! Position-grid representation of a packet, split-operator propagation and
//! quadrature moments.
//!
//! Nothing here touches the ladder algebra: the wave function is built from
//! Hermite functions, evolved with Fourier transforms and integrated on the
//! grid, so the results give an independent check of the spectral engine.

use crate::error::{Error, Result};
use crate::packet::PacketSpec;
use crate::units::Units;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Largest momentum power [`GridState::quadrature_moment`] accepts.
pub const MAX_MOMENTUM_ORDER: usize = 4;
/// Fewest split-operator steps per oscillator period.
pub const MIN_STEPS_PER_PERIOD: usize = 512;
pub const BOUNDARY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Periodic box `[x_min, x_max)` sampled at `n_points` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridParams {
    /// Box `[−h, h)` with `h = half_width · √(ħ/μω)`.
    pub fn symmetric(half_width: f64, n_points: usize, u: &Units) -> Self {
        let h = half_width * u.length_scale();
        Self { x_min: -h, x_max: h, n_points }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + self.dx() * j as f64
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        (0..n)
            .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < 16 {
            return Err(Error::Invalid(format!("n_points = {} must be a power of two ≥ 16", self.n_points)));
        }
        if !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::Invalid("grid needs finite x_min < x_max".into()));
        }
        Ok(())
    }
}

/// Samples of `ψ(x)` on a periodic grid.
#[derive(Clone, Debug)]
pub struct GridState {
    pub params: GridParams,
    pub units: Units,
    pub values: Vec<Complex64>,
}

struct Transforms {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transforms {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    /// `f(−i d/dx) ψ` for a multiplier `f(k)` given per wavenumber.
    fn apply_multiplier(&self, psi: &[Complex64], mult: &[Complex64]) -> Vec<Complex64> {
        let mut buf = psi.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().zip(mult).for_each(|(b, m)| *b *= m * scale);
        self.inverse.process(&mut buf);
        buf
    }
}

/// Normalized Hermite functions `h_0(ξ) … h_nmax(ξ)`.
pub fn hermite_functions(xi: f64, n_max: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if n_max >= 1 {
        h.push(std::f64::consts::SQRT_2 * xi * h[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = xi * (2.0 / (nf + 1.0)).sqrt() * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// Grid samples of `ψ₀(x) = φ(x − x₀) e^{i p₀ x/ħ}`.
pub fn synthesize(spec: &PacketSpec, u: &Units, params: GridParams) -> Result<GridState> {
    params.validate()?;
    let ell = u.length_scale();
    let n_max = spec.phi.n_max();
    let reach = (2.0 * ((2 * n_max + 1) as f64).sqrt() + 6.0) * ell;

    // the displacement sweeps an ellipse; its largest excursion bounds both boxes
    let x_amp = spec.x0.hypot(spec.p0 / u.mu_omega());
    let room = params.x_max.min(-params.x_min);
    if room < x_amp + reach {
        return Err(Error::GridTooSmall {
            reason: format!("box reaches {room:.4}, packet needs {:.4}", x_amp + reach),
        });
    }
    let k_nyquist = PI / params.dx();
    let k_needed = u.mu_omega() * x_amp / u.hbar + reach / (ell * ell);
    if k_nyquist < k_needed {
        return Err(Error::GridTooSmall {
            reason: format!("spacing resolves |k| ≤ {k_nyquist:.4}, packet needs {k_needed:.4}"),
        });
    }

    let coeffs = spec.phi.coeffs();
    let amp = ell.powf(-0.5);
    let values: Vec<Complex64> = (0..params.n_points)
        .map(|j| {
            let x = params.x(j);
            let h = hermite_functions((x - spec.x0) / ell, n_max);
            let phi: Complex64 = h.iter().zip(coeffs).map(|(h, c)| c * h).sum();
            phi * amp * Complex64::from_polar(1.0, spec.p0 * x / u.hbar)
        })
        .collect();
    let g = GridState { params, units: *u, values };
    g.check_boundary()?;
    let norm = g.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::GridTooSmall { reason: format!("grid norm {norm} deviates from 1") });
    }
    Ok(g)
}

impl GridState {
    fn check_boundary(&self) -> Result<()> {
        let scale = self.units.length_scale().powf(-0.5);
        let first = self.values[0].norm() / scale;
        let last = self.values[self.values.len() - 1].norm() / scale;
        if first > BOUNDARY_TOL || last > BOUNDARY_TOL {
            return Err(Error::GridTooSmall {
                reason: format!("boundary amplitude {:.3e} exceeds {BOUNDARY_TOL:e}", first.max(last)),
            });
        }
        Ok(())
    }

    /// Trapezoid rule on the periodic grid (the plain sum times `dx`).
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.params.dx()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &GridState) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.params.dx()
    }

    pub fn fidelity(&self, other: &GridState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn mirrored_density_gap(&self) -> f64 {
        // x_j ↔ −x_j pairs j ↔ n − j on a symmetric box
        let n = self.values.len();
        let scale = 1.0 / self.units.length_scale();
        (1..n).map(|j| (self.values[j].norm_sqr() - self.values[n - j].norm_sqr()).abs() / scale).fold(0.0, f64::max)
    }

    fn momenta(&self) -> Vec<f64> {
        self.params.wavenumbers().into_iter().map(|k| self.units.hbar * k).collect()
    }

    /// `(x̄, p̄)` by quadrature.
    pub fn center(&self) -> (f64, f64) {
        let transforms = Transforms::new(self.values.len());
        self.center_with(&transforms)
    }

    fn center_with(&self, transforms: &Transforms) -> (f64, f64) {
        let dx = self.params.dx();
        let xbar = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| self.params.x(j) * v.norm_sqr())
            .sum::<f64>()
            * dx;
        let mult: Vec<Complex64> = self.momenta().into_iter().map(|p| Complex64::new(p, 0.0)).collect();
        let p_psi = transforms.apply_multiplier(&self.values, &mult);
        let pbar = self.values.iter().zip(&p_psi).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * dx;
        (xbar, pbar)
    }

    /// `⟨(x − x̄)^k (p − p̄)^l⟩`, with `p` applied spectrally.
    pub fn quadrature_moment(&self, k: usize, l: usize) -> Result<Complex64> {
        if l > MAX_MOMENTUM_ORDER {
            return Err(Error::MomentumOrderTooHigh { l, max: MAX_MOMENTUM_ORDER });
        }
        let transforms = Transforms::new(self.values.len());
        let (xbar, pbar) = self.center_with(&transforms);
        let mult: Vec<Complex64> = self
            .momenta()
            .into_iter()
            .map(|p| Complex64::new((p - pbar).powi(l as i32), 0.0))
            .collect();
        let right = transforms.apply_multiplier(&self.values, &mult);
        let dx = self.params.dx();
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&right)
            .enumerate()
            .map(|(j, (a, b))| a.conj() * b * (self.params.x(j) - xbar).powi(k as i32))
            .sum();
        Ok(sum * dx)
    }

    /// `⟨bra| x^k p^l |self⟩` about the origin.
    pub fn raw_element(&self, bra: &GridState, k: usize, l: usize) -> Result<Complex64> {
        if l > MAX_MOMENTUM_ORDER {
            return Err(Error::MomentumOrderTooHigh { l, max: MAX_MOMENTUM_ORDER });
        }
        let transforms = Transforms::new(self.values.len());
        let mult: Vec<Complex64> = self.momenta().into_iter().map(|p| Complex64::new(p.powi(l as i32), 0.0)).collect();
        let right = transforms.apply_multiplier(&self.values, &mult);
        let sum: Complex64 = bra
            .values
            .iter()
            .zip(&right)
            .enumerate()
            .map(|(j, (a, b))| a.conj() * b * self.params.x(j).powi(k as i32))
            .sum();
        Ok(sum * self.params.dx())
    }

    /// `(x, ψ(x))` pairs for plotting.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(j, v)| (self.params.x(j), *v))
    }
}

/// Strang splitting: half potential kick, kinetic drift in Fourier space, half
/// potential kick. Consecutive half kicks are merged.
pub fn propagate(g: &GridState, t: f64, n_steps: usize) -> Result<GridState> {
    if t == 0.0 {
        return Ok(g.clone());
    }
    let u = g.units;
    if n_steps == 0 {
        return Err(Error::StepTooLarge { reason: "zero steps for nonzero time".into() });
    }
    let dt = t / n_steps as f64;
    let per_period = u.period() / dt.abs();
    if per_period < MIN_STEPS_PER_PERIOD as f64 * (1.0 - 1e-12) {
        return Err(Error::StepTooLarge {
            reason: format!("{per_period:.1} steps per period, need {MIN_STEPS_PER_PERIOD}"),
        });
    }
    let n = g.values.len();
    let transforms = Transforms::new(n);
    let mw2 = u.mu * u.omega * u.omega;
    let kick = |frac: f64| -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let x = g.params.x(j);
                Complex64::from_polar(1.0, -0.5 * mw2 * x * x * dt * frac / u.hbar)
            })
            .collect()
    };
    let half_kick = kick(0.5);
    let full_kick = kick(1.0);
    let scale = 1.0 / n as f64;
    let drift: Vec<Complex64> = g
        .params
        .wavenumbers()
        .into_iter()
        .map(|k| Complex64::from_polar(scale, -u.hbar * k * k * dt / (2.0 * u.mu)))
        .collect();

    let mut psi = g.values.clone();
    let mut scratch = vec![ZERO; transforms.forward.get_inplace_scratch_len()];
    psi.iter_mut().zip(&half_kick).for_each(|(p, v)| *p *= v);
    for step in 0..n_steps {
        transforms.forward.process_with_scratch(&mut psi, &mut scratch);
        psi.iter_mut().zip(&drift).for_each(|(p, d)| *p *= d);
        transforms.inverse.process_with_scratch(&mut psi, &mut scratch);
        let kick = if step + 1 == n_steps { &half_kick } else { &full_kick };
        psi.iter_mut().zip(kick).for_each(|(p, v)| *p *= v);
    }
    Ok(GridState { params: g.params, units: u, values: psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::FockState;

    fn grid(u: &Units) -> GridParams {
        GridParams::symmetric(16.0, 1024, u)
    }

    #[test]
    fn ground_state_is_a_gaussian() {
        let u = Units::default();
        let spec = PacketSpec::centered(FockState::number(0).unwrap());
        let g = synthesize(&spec, &u, grid(&u)).unwrap();
        for (x, v) in g.samples().step_by(37) {
            let expected = PI.powf(-0.25) * (-0.5 * x * x).exp();
            assert!((v.re - expected).abs() < 1e-15 && v.im == 0.0);
        }
    }

    #[test]
    fn first_excited_state_is_odd() {
        let u = Units::default();
        let spec = PacketSpec::centered(FockState::number(1).unwrap());
        let g = synthesize(&spec, &u, grid(&u)).unwrap();
        assert_eq!(g.values[512].norm(), 0.0);
        assert!((g.values[500] + g.values[524]).norm() < 1e-14);
    }

    #[test]
    fn box_too_small() {
        let u = Units::default();
        let spec = PacketSpec::centered(FockState::number(20).unwrap());
        let params = GridParams::symmetric(8.0, 256, &u);
        assert!(matches!(synthesize(&spec, &u, params), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn spacing_too_coarse() {
        let u = Units::default();
        let spec = PacketSpec::centered(FockState::number(12).unwrap());
        let params = GridParams::symmetric(24.0, 32, &u);
        assert!(matches!(synthesize(&spec, &u, params), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let n = 4000;
        let (a, b) = (-20.0, 20.0);
        let dx = (b - a) / n as f64;
        let table: Vec<Vec<f64>> = (0..n).map(|j| hermite_functions(a + dx * j as f64, 30)).collect();
        for m in [0, 3, 17, 30] {
            for k in [0, 3, 16, 30] {
                let s: f64 = table.iter().map(|h| h[m] * h[k]).sum::<f64>() * dx;
                let expected = if m == k { 1.0 } else { 0.0 };
                assert!((s - expected).abs() < 1e-12, "m={m} k={k}: {s}");
            }
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let u = Units::default();
        let spec = PacketSpec::new(1.0, 0.5, FockState::number(2).unwrap());
        let g = synthesize(&spec, &u, grid(&u)).unwrap();
        let h = propagate(&g, 0.0, 0).unwrap();
        assert_eq!(g.values, h.values);
    }

    #[test]
    fn step_limit() {
        let u = Units::default();
        let spec = PacketSpec::centered(FockState::number(0).unwrap());
        let g = synthesize(&spec, &u, grid(&u)).unwrap();
        assert!(matches!(propagate(&g, u.period(), 256), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn ground_state_returns_after_one_period() {
        let u = Units::new(1.3, 0.8, 1.1).unwrap();
        let spec = PacketSpec::centered(FockState::number(0).unwrap());
        let g = synthesize(&spec, &u, grid(&u)).unwrap();
        let h = propagate(&g, u.period(), 1024).unwrap();
        assert!((h.norm_sqr() - g.norm_sqr()).abs() < 1e-12);
        assert!(g.fidelity(&h) >= 1.0 - 1e-8, "fidelity {}", g.fidelity(&h));
    }

    #[test]
    fn ground_state_quadratures() {
        let u = Units::new(2.0, 0.5, 0.7).unwrap();
        let spec = PacketSpec::centered(FockState::number(0).unwrap());
        let g = synthesize(&spec, &u, grid(&u)).unwrap();
        let q2 = g.quadrature_moment(2, 0).unwrap();
        assert!((q2.re - u.hbar / (2.0 * u.mu_omega())).abs() < 1e-9);
        let w11 = g.quadrature_moment(1, 1).unwrap();
        assert!((w11.im - u.hbar / 2.0).abs() < 1e-8);
        assert!(matches!(g.quadrature_moment(1, 5), Err(Error::MomentumOrderTooHigh { l: 5, .. })));
    }
}

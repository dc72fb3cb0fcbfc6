//! Wave packets in the number basis and their exact (spectral) evolution.
//!
//! A packet is `ψ₀(x) = φ(x − x₀) e^{i p₀ x/ħ}` with `φ` given by number-basis
//! coefficients. Evolution multiplies each coefficient by `e^{−i(n+½)ωt}`,
//! and the centered moments
//! `W_kl(t) = ⟨(x − x̄_t)^k (p − p̄_t)^l⟩ = R_kl(t) + i S_kl(t)` follow from
//! closed-form ladder matrix elements.

use crate::error::{Error, Result};
use crate::ladder::{xp_polynomial, LadderPolynomial};
use crate::units::Units;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

/// Highest `k + l` the moment engines accept.
pub const MAX_MOMENT_ORDER: usize = 12;
pub const DEFAULT_BASIS_CAP: usize = 256;
/// Coefficient magnitude below which a coefficient counts as absent when
/// detecting parity.
pub const PARITY_TOL: f64 = 1e-12;
/// Largest tolerated norm leaking past the cap in [`displace_to_fock`].
pub const TAIL_LIMIT: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Basis cap, overridable through `RIGIDPACK_BASIS_CAP`.
pub fn basis_cap() -> usize {
    std::env::var("RIGIDPACK_BASIS_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BASIS_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    #[serde(rename = "none")]
    Indefinite,
}

impl Parity {
    pub fn is_definite(self) -> bool {
        self != Parity::Indefinite
    }
}

/// Normalized number-basis coefficients `c_0 … c_nmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    coeffs: Vec<Complex64>,
}

impl FockState {
    /// Normalizes `coeffs`. Fails on a zero vector or when `nmax` exceeds the
    /// basis cap.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_cap(coeffs, basis_cap())
    }

    pub fn with_cap(mut coeffs: Vec<Complex64>, cap: usize) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Invalid("empty coefficient vector".into()));
        }
        if coeffs.len() > cap + 1 {
            return Err(Error::BasisOverflow { index: coeffs.len() - 1, cap });
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Invalid("zero state cannot be normalized".into()));
        }
        coeffs.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { coeffs })
    }

    /// The number state `|n⟩`.
    pub fn number(n: usize) -> Result<Self> {
        let mut c = vec![ZERO; n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    /// `Σ a_i |n_i⟩`, normalized.
    pub fn superposition(terms: &[(usize, Complex64)]) -> Result<Self> {
        let n_max = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut c = vec![ZERO; n_max + 1];
        for &(n, a) in terms {
            c[n] += a;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest occupied level.
    pub fn n_max(&self) -> usize {
        self.coeffs.iter().rposition(|c| c.norm() > PARITY_TOL).unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn parity(&self) -> Parity {
        let occupied = |odd: bool| {
            self.coeffs
                .iter()
                .enumerate()
                .any(|(n, c)| (n % 2 == 1) == odd && c.norm() > PARITY_TOL)
        };
        match (occupied(false), occupied(true)) {
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Indefinite,
        }
    }

    /// `Some(n)` when exactly one coefficient is nonzero.
    pub fn single_level(&self) -> Option<usize> {
        let mut occupied = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > PARITY_TOL)
            .map(|(n, _)| n);
        let first = occupied.next()?;
        occupied.next().is_none().then_some(first)
    }

    /// Coefficients after evolving through phase `θ = ωt`, dropping the
    /// global factor `e^{−iθ/2}`.
    pub fn evolved(&self, theta: f64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * theta))
            .collect()
    }

    /// `⟨φ| poly |φ⟩` in dimensionless units.
    pub fn expect<C: crate::ladder::Coefficient>(&self, poly: &LadderPolynomial<C>) -> Complex64 {
        poly.expectation(&self.coeffs)
    }
}

/// Displaced-packet description `φ(x − x₀) e^{i p₀ x/ħ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PacketSpec {
    pub x0: f64,
    pub p0: f64,
    pub phi: FockState,
    parity: Parity,
}

impl PacketSpec {
    pub fn new(x0: f64, p0: f64, phi: FockState) -> Self {
        let parity = phi.parity();
        Self { x0, p0, phi, parity }
    }

    pub fn centered(phi: FockState) -> Self {
        Self::new(0.0, 0.0, phi)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Dimensionless displacement `α = (x̃₀ + i p̃₀)/√2`.
    pub fn alpha(&self, u: &Units) -> Complex64 {
        Complex64::new(self.x0 / u.length_scale(), self.p0 / u.momentum_scale())
            / std::f64::consts::SQRT_2
    }
}

/// Which route [`SpectralPacket::moment_w`] takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EvalPath {
    /// Parity route when the profile has definite parity, general otherwise.
    #[default]
    Auto,
    /// `⟨φ| x_θ^k p_θ^l |φ⟩` with Heisenberg-rotated operators.
    Parity,
    /// Evolve the displaced state, then shift by the instantaneous center.
    General,
}

/// Which moment a series tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MomentKind {
    Q(usize),
    P(usize),
    R(usize, usize),
    S(usize, usize),
}

impl MomentKind {
    pub fn indices(self) -> (usize, usize) {
        match self {
            MomentKind::Q(k) => (k, 0),
            MomentKind::P(l) => (0, l),
            MomentKind::R(k, l) | MomentKind::S(k, l) => (k, l),
        }
    }

    pub fn order(self) -> usize {
        let (k, l) = self.indices();
        k + l
    }

    pub fn pick(self, w: Complex64) -> f64 {
        match self {
            MomentKind::S(..) => w.im,
            _ => w.re,
        }
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentKind::Q(k) => write!(f, "Q{k}"),
            MomentKind::P(l) => write!(f, "P{l}"),
            MomentKind::R(k, l) => write!(f, "R{k},{l}"),
            MomentKind::S(k, l) => write!(f, "S{k},{l}"),
        }
    }
}

impl FromStr for MomentKind {
    type Err = Error;

    /// Accepts `Q4`, `P2`, `R1,3`, `S3,1` (also `R13` for single digits).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unrecognised moment '{s}'"));
        let s = s.trim();
        let (head, rest) = s.split_at(s.char_indices().nth(1).map(|(i, _)| i).ok_or_else(bad)?);
        let pair = |rest: &str| -> Result<(usize, usize)> {
            if let Some((a, b)) = rest.split_once(',') {
                Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
            } else if rest.len() == 2 && rest.chars().all(|c| c.is_ascii_digit()) {
                let d: Vec<usize> = rest.chars().map(|c| c as usize - '0' as usize).collect();
                Ok((d[0], d[1]))
            } else {
                Err(bad())
            }
        };
        match head.to_ascii_uppercase().as_str() {
            "Q" => Ok(MomentKind::Q(rest.parse().map_err(|_| bad())?)),
            "P" => Ok(MomentKind::P(rest.parse().map_err(|_| bad())?)),
            "R" => pair(rest).map(|(k, l)| MomentKind::R(k, l)),
            "S" => pair(rest).map(|(k, l)| MomentKind::S(k, l)),
            _ => Err(bad()),
        }
    }
}

/// Length and momentum exponents of a moment's physical dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub length: u32,
    pub momentum: u32,
}

/// A sampled moment time series.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSeries {
    pub kind: MomentKind,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub dims: Dimension,
}

impl MomentSeries {
    pub fn new(kind: MomentKind, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_time_grid(&times)?;
        if times.len() != values.len() {
            return Err(Error::Invalid("times and values differ in length".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite value in {kind} series")));
        }
        let (k, l) = kind.indices();
        let dims = Dimension { length: k as u32, momentum: l as u32 };
        Ok(Self { kind, times, values, dims })
    }

    pub fn peak_to_peak(&self) -> f64 {
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_time_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Invalid("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Spectral evaluator bound to one packet and one set of units.
#[derive(Debug)]
pub struct SpectralPacket {
    spec: PacketSpec,
    units: Units,
    displaced: OnceLock<Result<FockState>>,
}

impl SpectralPacket {
    pub fn new(spec: PacketSpec, units: Units) -> Self {
        Self { spec, units, displaced: OnceLock::new() }
    }

    pub fn spec(&self) -> &PacketSpec {
        &self.spec
    }

    pub fn units(&self) -> &Units {
        &self.units
    }

    /// Number-basis coefficients of `ψ₀` including the displacement.
    pub fn initial_state(&self) -> Result<&FockState> {
        self.displaced
            .get_or_init(|| {
                let cap = auto_cap(&self.spec, &self.units).min(basis_cap());
                displace_to_fock(&self.spec, &self.units, cap)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn center(&self, t: f64) -> (f64, f64) {
        center(&self.spec, &self.units, t)
    }

    /// `W_kl(t)` in physical units.
    pub fn moment_w(&self, k: usize, l: usize, t: f64, path: EvalPath) -> Result<Complex64> {
        check_order(k + l)?;
        let theta = self.units.omega * t;
        let path = match path {
            EvalPath::Auto if self.spec.parity.is_definite() => EvalPath::Parity,
            EvalPath::Auto => EvalPath::General,
            p => p,
        };
        let w = match path {
            EvalPath::Parity => {
                if !self.spec.parity.is_definite() {
                    return Err(Error::ParityPathInvalid);
                }
                self.spec.phi.expect(&xp_polynomial(k, l)?.rotate(theta))
            }
            _ => self.general_dimensionless(k, l, theta)?,
        };
        Ok(w * self.units.moment_scale(k, l))
    }

    fn general_dimensionless(&self, k: usize, l: usize, theta: f64) -> Result<Complex64> {
        let psi = self.initial_state()?.evolved(theta);
        let xbar = xp_polynomial(1, 0)?.expectation(&psi).re;
        let pbar = xp_polynomial(0, 1)?.expectation(&psi).re;
        let mut w = ZERO;
        for i in 0..=k {
            let cx = binomial(k, i) * (-xbar).powi((k - i) as i32);
            if cx == 0.0 {
                continue;
            }
            for j in 0..=l {
                let cp = binomial(l, j) * (-pbar).powi((l - j) as i32);
                if cp == 0.0 {
                    continue;
                }
                w += xp_polynomial(i, j)?.expectation(&psi) * (cx * cp);
            }
        }
        Ok(w)
    }

    pub fn series(&self, kind: MomentKind, times: &[f64]) -> Result<MomentSeries> {
        check_time_grid(times)?;
        check_order(kind.order())?;
        // resolve the displaced state once before fanning out
        if !self.spec.parity.is_definite() {
            self.initial_state()?;
        }
        let (k, l) = kind.indices();
        let values = times
            .par_iter()
            .map(|&t| self.moment_w(k, l, t, EvalPath::Auto).map(|w| kind.pick(w)))
            .collect::<Result<Vec<_>>>()?;
        MomentSeries::new(kind, times.to_vec(), values)
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_MOMENT_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_MOMENT_ORDER });
    }
    Ok(())
}

/// Center `(x̄_t, p̄_t)`: classical motion from the initial means.
pub fn center(spec: &PacketSpec, u: &Units, t: f64) -> (f64, f64) {
    let (x_phi, p_phi) = if spec.parity.is_definite() {
        (0.0, 0.0)
    } else {
        let x = spec.phi.expect(&*xp_polynomial(1, 0).expect("order 1")).re;
        let p = spec.phi.expect(&*xp_polynomial(0, 1).expect("order 1")).re;
        (x * u.length_scale(), p * u.momentum_scale())
    };
    let x0 = spec.x0 + x_phi;
    let p0 = spec.p0 + p_phi;
    let (s, c) = (u.omega * t).sin_cos();
    (x0 * c + p0 / u.mu_omega() * s, p0 * c - u.mu_omega() * x0 * s)
}

/// `W_kl(t)` for a packet; see [`SpectralPacket::moment_w`].
pub fn moment_w(
    spec: &PacketSpec,
    u: &Units,
    k: usize,
    l: usize,
    t: f64,
    path: EvalPath,
) -> Result<Complex64> {
    SpectralPacket::new(spec.clone(), *u).moment_w(k, l, t, path)
}

/// `Q_K`, `P_K`, `R_kl` or `S_kl` sampled on `times`.
pub fn moment_series(spec: &PacketSpec, u: &Units, kind: MomentKind, times: &[f64]) -> Result<MomentSeries> {
    SpectralPacket::new(spec.clone(), *u).series(kind, times)
}

/// Cap large enough that displacing `φ` by `α` leaves a negligible tail.
pub fn auto_cap(spec: &PacketSpec, u: &Units) -> usize {
    let a = spec.alpha(u).norm();
    if a == 0.0 {
        return spec.phi.coeffs().len() - 1;
    }
    let n = spec.phi.n_max() as f64;
    (n + a * a + 12.0 * a * (n + 1.0).sqrt() + 24.0).ceil() as usize
}

/// Number-basis coefficients of `e^{i p₀ x/ħ} φ(x − x₀)` truncated at `cap`.
///
/// Applies `exp(α a† − α* a)` on a padded basis of `cap + 1 + ⌈4|α|²⌉ + 16`
/// levels, as `(exp(G/2^s))^{2^s}` with each factor a Taylor series. The
/// norm falling above `cap` must stay below [`TAIL_LIMIT`].
pub fn displace_to_fock(spec: &PacketSpec, u: &Units, cap: usize) -> Result<FockState> {
    let limit = basis_cap();
    if cap > limit {
        return Err(Error::BasisOverflow { index: cap, cap: limit });
    }
    let alpha = spec.alpha(u);
    let phi = spec.phi.coeffs();
    if alpha.norm() == 0.0 {
        return FockState::with_cap(phi.to_vec(), cap.max(phi.len() - 1));
    }
    let padding = (4.0 * alpha.norm_sqr()).ceil() as usize + 16;
    let dim = (cap + 1).max(phi.len()) + padding;
    let mut v = vec![ZERO; dim];
    v[..phi.len()].copy_from_slice(phi);

    let bound = 2.0 * alpha.norm() * (dim as f64).sqrt();
    let squarings = (bound / 0.5).log2().ceil().max(0.0) as u32;
    let steps = 1usize << squarings;
    let h = 1.0 / steps as f64;
    let generator = |x: &[Complex64], out: &mut [Complex64]| {
        for n in 0..dim {
            let mut acc = ZERO;
            if n > 0 {
                acc += alpha * (n as f64).sqrt() * x[n - 1];
            }
            if n + 1 < dim {
                acc -= alpha.conj() * ((n + 1) as f64).sqrt() * x[n + 1];
            }
            out[n] = acc * h;
        }
    };
    let mut term = vec![ZERO; dim];
    let mut next = vec![ZERO; dim];
    for _ in 0..steps {
        term.copy_from_slice(&v);
        for j in 1..=60 {
            generator(&term, &mut next);
            let inv_j = 1.0 / j as f64;
            let mut term_norm = 0.0;
            for (t, nx) in term.iter_mut().zip(&next) {
                *t = nx * inv_j;
                term_norm += t.norm_sqr();
            }
            v.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
            if term_norm < 1e-36 {
                break;
            }
        }
    }
    // e^{ip₀x/ħ} e^{−ix₀p/ħ} = D(α) e^{i x̃₀ p̃₀ / 2}
    let (xt, pt) = (spec.x0 / u.length_scale(), spec.p0 / u.momentum_scale());
    let phase = Complex64::from_polar(1.0, 0.5 * xt * pt);
    v.iter_mut().for_each(|c| *c *= phase);

    let total: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let tail: f64 = v[cap + 1..].iter().map(|c| c.norm_sqr()).sum::<f64>() / total;
    if tail > TAIL_LIMIT {
        return Err(Error::TruncationError { cap, tail, limit: TAIL_LIMIT });
    }
    v.truncate(cap + 1);
    FockState::with_cap(v, cap)
}

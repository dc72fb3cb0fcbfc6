//! Degree of rigidity: packets whose moments `Q_2 … Q_2N` are time
//! independent while `Q_{2N+2}` is not.
//!
//! Superpositions `Σ a_i φ_{2n_i}` (or `Σ b_i φ_{2n_i+1}`) with
//! `n_{i+1} − n_i ≥ N + 1` have degree at least `N`; a single displaced number
//! state is perfectly rigid.

use crate::error::{Error, Result};
use crate::packet::{basis_cap, FockState, MomentKind, MomentSeries, PacketSpec, SpectralPacket, MAX_MOMENT_ORDER};
use crate::units::{uniform_times, Units};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::ser::{Serialize, SerializeMap, Serializer};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Default relative flatness tolerance for spectral classification.
pub const DEFAULT_TOL_REL: f64 = 1e-8;

/// Parity of the generated profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileParity {
    Even,
    Odd,
}

impl ProfileParity {
    /// Number-basis level used for index `n`: `2n` or `2n + 1`.
    pub fn level(self, n: usize) -> usize {
        match self {
            ProfileParity::Even => 2 * n,
            ProfileParity::Odd => 2 * n + 1,
        }
    }
}

impl std::str::FromStr for ProfileParity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(ProfileParity::Even),
            "odd" => Ok(ProfileParity::Odd),
            _ => Err(Error::Invalid(format!("parity must be 'even' or 'odd', got '{s}'"))),
        }
    }
}

/// Recipe for a packet of prescribed degree of rigidity.
#[derive(Clone, Debug, PartialEq)]
pub struct RigiditySpec {
    pub target_n: usize,
    pub parity: ProfileParity,
    pub indices: Vec<usize>,
    pub amplitudes: Vec<Complex64>,
    pub x0: f64,
    pub p0: f64,
}

impl RigiditySpec {
    /// Checks ordering and spacing and normalizes the amplitudes.
    pub fn new(
        target_n: usize,
        parity: ProfileParity,
        indices: Vec<usize>,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        if target_n == 0 {
            return Err(Error::Invalid("target degree must be positive".into()));
        }
        if indices.is_empty() || indices.len() != amplitudes.len() {
            return Err(Error::Invalid("need one amplitude per index, at least one index".into()));
        }
        let required = target_n + 1;
        for w in indices.windows(2) {
            if w[1] <= w[0] || w[1] - w[0] < required {
                return Err(Error::SpacingViolation { lower: w[0], upper: w[1], required });
            }
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Invalid("amplitudes must be finite and not all zero".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { target_n, parity, indices, amplitudes, x0: 0.0, p0: 0.0 })
    }

    /// Amplitudes with magnitudes drawn from `[0.3, 0.7]` and uniform phases.
    pub fn with_random_amplitudes(
        target_n: usize,
        parity: ProfileParity,
        indices: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amplitudes = indices
            .iter()
            .map(|_| Complex64::from_polar(rng.gen_range(0.3..=0.7), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        Self::new(target_n, parity, indices, amplitudes)
    }

    /// `terms` indices starting at 0, each gap `N + 1` or `N + 2`, with random
    /// amplitudes as in [`RigiditySpec::with_random_amplitudes`].
    pub fn random(target_n: usize, parity: ProfileParity, terms: usize, seed: u64) -> Result<Self> {
        if terms == 0 {
            return Err(Error::Invalid("need at least one term".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut indices = vec![0];
        for _ in 1..terms {
            let last = indices[indices.len() - 1];
            indices.push(last + target_n + 1 + rng.gen_range(0..=1));
        }
        Self::with_random_amplitudes(target_n, parity, indices, rng.gen())
    }

    pub fn displaced(mut self, x0: f64, p0: f64) -> Self {
        self.x0 = x0;
        self.p0 = p0;
        self
    }
}

/// Packet `φ = Σ a_i φ_{2n_i}` (even) or `Σ a_i φ_{2n_i+1}` (odd), displaced to
/// `(x0, p0)`.
pub fn generate(spec: &RigiditySpec) -> Result<PacketSpec> {
    let cap = basis_cap();
    let top = spec.parity.level(*spec.indices.last().expect("validated non-empty"));
    if top > cap {
        return Err(Error::BasisOverflow { index: top, cap });
    }
    let terms: Vec<(usize, Complex64)> = spec
        .indices
        .iter()
        .zip(&spec.amplitudes)
        .map(|(&n, &a)| (spec.parity.level(n), a))
        .collect();
    Ok(PacketSpec::new(spec.x0, spec.p0, FockState::superposition(&terms)?))
}

/// Classified degree of rigidity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    /// `Q_2 … Q_2N` flat, `Q_{2N+2}` (or an odd moment below it) varies.
    Finite(usize),
    /// Everything sampled up to the highest order was flat.
    AtLeast(usize),
    /// A single displaced number state.
    Infinite,
}

impl Degree {
    /// Numeric lower bound (`usize::MAX` for infinity).
    pub fn at_least(self) -> usize {
        match self {
            Degree::Finite(n) | Degree::AtLeast(n) => n,
            Degree::Infinite => usize::MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MomentFlatness {
    pub flat: bool,
    pub ptp: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    pub degree: Degree,
    pub per_k: BTreeMap<usize, MomentFlatness>,
    pub tolerance_used: f64,
}

impl Serialize for RigidityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        match self.degree {
            Degree::Infinite => map.serialize_entry("degree", "inf")?,
            Degree::Finite(n) | Degree::AtLeast(n) => map.serialize_entry("degree", &n)?,
        }
        map.serialize_entry("lower_bound_only", &matches!(self.degree, Degree::AtLeast(_)))?;
        map.serialize_entry("per_K", &self.per_k)?;
        map.serialize_entry("tol", &self.tolerance_used)?;
        map.end()
    }
}

/// Classify by sampling `Q_2 … Q_{k_max}` at `samples` points over one period.
///
/// `Q_K` counts as flat when its peak-to-peak variation is at most
/// `tol_rel · max(max|Q_K|, (√(ħ/μω))^K) + 1e−12`. The degree is the largest `N`
/// with `Q_2 … Q_2N` flat; `Q_{2N+1}` does not enter.
pub fn classify(spec: &PacketSpec, u: &Units, k_max: usize, samples: usize, tol_rel: f64) -> Result<RigidityReport> {
    if k_max > MAX_MOMENT_ORDER {
        return Err(Error::OrderTooHigh { order: k_max, max: MAX_MOMENT_ORDER });
    }
    if k_max < 4 || k_max % 2 == 1 {
        return Err(Error::Invalid(format!("k_max must be even and at least 4, got {k_max}")));
    }
    if samples < 64 {
        return Err(Error::Invalid(format!("need at least 64 samples, got {samples}")));
    }
    let packet = SpectralPacket::new(spec.clone(), *u);
    let times = uniform_times(u, 1.0, samples);
    let mut per_k = BTreeMap::new();
    for order in 2..=k_max {
        let series = packet.series(MomentKind::Q(order), &times)?;
        let ptp = series.peak_to_peak();
        let scale = series.max_abs().max(u.length_scale().powi(order as i32));
        per_k.insert(order, MomentFlatness { flat: ptp <= tol_rel * scale + 1e-12, ptp });
    }

    let flat = |k: usize| per_k[&k].flat;
    let mut degree = 0;
    for n in 1..=k_max / 2 {
        let odd_ok = n < 2 || flat(2 * n - 1);
        if flat(2 * n) && odd_ok {
            degree = n;
        } else {
            break;
        }
    }
    let degree = if spec.phi.single_level().is_some() {
        Degree::Infinite
    } else if degree == k_max / 2 {
        Degree::AtLeast(degree)
    } else {
        Degree::Finite(degree)
    };
    Ok(RigidityReport { degree, per_k, tolerance_used: tol_rel })
}

/// Fraction of spectral power outside the harmonics `allowed` (multiples of the
/// window frequency, both signs).
///
/// The series must be sampled uniformly over exactly one period with a
/// power-of-two number of samples, so bin `j` is the `j`-th harmonic.
pub fn harmonic_content(series: &MomentSeries, allowed: &[usize]) -> Result<f64> {
    let n = series.values.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NonUniformSampling);
    }
    let dt = series.times[1] - series.times[0];
    let uniform = series
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(f64::MIN_POSITIVE));
    if !uniform || dt <= 0.0 {
        return Err(Error::NonUniformSampling);
    }
    let mut buf: Vec<Complex64> = series.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut total = 0.0;
    let mut off = 0.0;
    for (j, b) in buf.iter().enumerate() {
        let p = b.norm_sqr();
        total += p;
        if !allowed.contains(&j.min(n - j)) {
            off += p;
        }
    }
    Ok(if total == 0.0 { 0.0 } else { off / total })
}

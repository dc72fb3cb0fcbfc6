//! The coupled equations of motion for the centered moments `R_kl`, `S_kl`.
//!
//! For each order `K = k + l` the `R` block evolves under itself plus the
//! `S` block of order `K − 2`, and the `S` block under itself plus the `R`
//! block of order `K − 2`. Orders 0 and 1 are constant (`R00 = 1`, the rest
//! zero), so a chain of orders `0..=K` closes.

use crate::error::{Error, Result};
use crate::packet::{EvalPath, MomentKind, MomentSeries, SpectralPacket, MAX_MOMENT_ORDER};
use crate::units::Units;

/// All `R_kl` and `S_kl` of one order, indexed by `k` (`l = order − k`).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    order: usize,
    r: Vec<f64>,
    s: Vec<f64>,
}

impl MomentVector {
    pub fn zeros(order: usize) -> Self {
        Self { order, r: vec![0.0; order + 1], s: vec![0.0; order + 1] }
    }

    pub fn new(order: usize, r: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if r.len() != order + 1 || s.len() != order + 1 {
            return Err(Error::Invalid(format!("order {order} needs {} entries per sector", order + 1)));
        }
        if r.iter().chain(&s).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite moment".into()));
        }
        Ok(Self { order, r, s })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn r(&self, k: usize, l: usize) -> f64 {
        self.lookup(&self.r, k, l)
    }

    pub fn s(&self, k: usize, l: usize) -> f64 {
        self.lookup(&self.s, k, l)
    }

    fn lookup(&self, v: &[f64], k: usize, l: usize) -> f64 {
        assert_eq!(k + l, self.order, "({k},{l}) is not in the order-{} block", self.order);
        v[k]
    }

    /// Entries of order `order`, `R_kl + i S_kl`, sampled from a packet at `t`.
    pub fn from_packet(packet: &SpectralPacket, order: usize, t: f64) -> Result<Self> {
        let mut mv = Self::zeros(order);
        for k in 0..=order {
            let w = packet.moment_w(k, order - k, t, EvalPath::Auto)?;
            mv.r[k] = w.re;
            mv.s[k] = w.im;
        }
        Ok(mv)
    }

    fn axpy(&self, a: f64, other: &Self) -> Self {
        let zip = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(x, y)| x + a * y).collect();
        Self { order: self.order, r: zip(&self.r, &other.r), s: zip(&self.s, &other.s) }
    }
}

/// Time derivative of the order-`K` block. `lower` is the order `K − 2` block
/// and is required for `K ≥ 2`.
pub fn rhs(mv: &MomentVector, lower: Option<&MomentVector>, u: &Units) -> Result<MomentVector> {
    let order = mv.order;
    if order < 2 {
        return Ok(MomentVector::zeros(order));
    }
    let lower = match lower {
        Some(b) if b.order + 2 == order => b,
        _ => return Err(Error::MissingLowerOrder { order: order - 2 }),
    };
    let (mu, hbar) = (u.mu, u.hbar);
    let mw2 = u.mu * u.omega * u.omega;
    let mut d = MomentVector::zeros(order);
    for k in 0..=order {
        let l = order - k;
        let (kf, lf) = (k as f64, l as f64);
        // neighbours within the block: (k−1, l+1) and (k+1, l−1)
        let (mut dr, mut ds) = (0.0, 0.0);
        if k > 0 {
            dr += kf / mu * mv.r[k - 1];
            ds += kf / mu * mv.s[k - 1];
        }
        if l > 0 {
            dr -= lf * mw2 * mv.r[k + 1];
            ds -= lf * mw2 * mv.s[k + 1];
        }
        // couplings to order K − 2: (k−2, l) and (k, l−2)
        if k >= 2 {
            let c = hbar / (2.0 * mu) * kf * (kf - 1.0);
            dr += c * lower.s[k - 2];
            ds -= c * lower.r[k - 2];
        }
        if l >= 2 {
            let c = hbar * mw2 / 2.0 * lf * (lf - 1.0);
            dr -= c * lower.s[k];
            ds += c * lower.r[k];
        }
        d.r[k] = dr;
        d.s[k] = ds;
    }
    Ok(d)
}

/// Blocks of orders `0..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentChain {
    blocks: Vec<MomentVector>,
}

impl MomentChain {
    /// Chain with the fixed orders 0 and 1 and the given blocks for `2..=K`.
    pub fn new(higher: Vec<MomentVector>) -> Result<Self> {
        let mut base = MomentVector::zeros(0);
        base.r[0] = 1.0;
        let mut blocks = vec![base, MomentVector::zeros(1)];
        for (i, b) in higher.into_iter().enumerate() {
            if b.order != i + 2 {
                return Err(Error::Invalid(format!("expected order {}, got {}", i + 2, b.order)));
            }
            blocks.push(b);
        }
        Ok(Self { blocks })
    }

    /// Initial data for orders `2..=K` read off the spectral engine at `t`.
    pub fn from_packet(packet: &SpectralPacket, max_order: usize, t: f64) -> Result<Self> {
        if max_order > MAX_MOMENT_ORDER {
            return Err(Error::OrderTooHigh { order: max_order, max: MAX_MOMENT_ORDER });
        }
        let higher = (2..=max_order).map(|k| MomentVector::from_packet(packet, k, t)).collect::<Result<_>>()?;
        Self::new(higher)
    }

    pub fn max_order(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, order: usize) -> &MomentVector {
        &self.blocks[order]
    }

    pub fn value(&self, kind: MomentKind) -> f64 {
        let (k, l) = kind.indices();
        let b = &self.blocks[k + l];
        match kind {
            MomentKind::S(..) => b.s(k, l),
            _ => b.r(k, l),
        }
    }

    fn derivative(&self, u: &Units) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let lower = b.order.checked_sub(2).map(|j| &self.blocks[j]);
                rhs(b, lower, u)
            })
            .collect::<Result<_>>()?;
        Ok(Self { blocks })
    }

    fn axpy(&self, a: f64, other: &Self) -> Self {
        Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(x, y)| x.axpy(a, y)).collect() }
    }
}

/// Chain sampled at every integration step.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MomentChain>,
}

impl Trajectory {
    pub fn series(&self, kind: MomentKind) -> Result<MomentSeries> {
        let max = self.states.first().map_or(0, MomentChain::max_order);
        if kind.order() > max {
            return Err(Error::OrderTooHigh { order: kind.order(), max });
        }
        MomentSeries::new(kind, self.times.clone(), self.states.iter().map(|s| s.value(kind)).collect())
    }

    pub fn last(&self) -> &MomentChain {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Largest `ω Δt` accepted by [`integrate`].
pub const MAX_PHASE_STEP: f64 = 0.2;

/// Classical fourth-order Runge–Kutta over `[t0, t1]` in `n_steps` equal
/// steps, all orders advanced together.
pub fn integrate(init: &MomentChain, u: &Units, t_span: (f64, f64), n_steps: usize) -> Result<Trajectory> {
    let (t0, t1) = t_span;
    if n_steps == 0 || !(t1 > t0) {
        return Err(Error::Invalid("need n_steps > 0 and t1 > t0".into()));
    }
    let dt = (t1 - t0) / n_steps as f64;
    if dt * u.omega > MAX_PHASE_STEP {
        return Err(Error::StepTooLarge {
            reason: format!("omega*dt = {:.4} exceeds {MAX_PHASE_STEP}", dt * u.omega),
        });
    }
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut y = init.clone();
    times.push(t0);
    states.push(y.clone());
    for step in 1..=n_steps {
        let k1 = y.derivative(u)?;
        let k2 = y.axpy(dt / 2.0, &k1).derivative(u)?;
        let k3 = y.axpy(dt / 2.0, &k2).derivative(u)?;
        let k4 = y.axpy(dt, &k3).derivative(u)?;
        y = y
            .axpy(dt / 6.0, &k1)
            .axpy(dt / 3.0, &k2)
            .axpy(dt / 3.0, &k3)
            .axpy(dt / 6.0, &k4);
        times.push(t0 + dt * step as f64);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

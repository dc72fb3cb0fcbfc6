//! One entry point for sampling a moment series with any of the four engines.

use crate::closedform::{predict_q2p2r11, predict_q4, FourthMomentInit, SecondMomentInit};
use crate::error::{Error, Result};
use crate::gridoracle::{propagate, synthesize, GridParams};
use crate::hierarchy::{integrate, MomentChain};
use crate::packet::{MomentKind, MomentSeries, SpectralPacket};
use crate::units::uniform_times;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Spectral,
    Ode,
    Grid,
    ClosedForm,
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(Engine::Spectral),
            "ode" => Ok(Engine::Ode),
            "grid" => Ok(Engine::Grid),
            "closedform" => Ok(Engine::ClosedForm),
            _ => Err(Error::Invalid(format!("unknown engine '{s}' (spectral, ode, grid, closedform)"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Spectral => "spectral",
            Engine::Ode => "ode",
            Engine::Grid => "grid",
            Engine::ClosedForm => "closedform",
        })
    }
}

/// Resolution of the numerical engines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineOptions {
    pub ode_steps_per_period: usize,
    pub grid_points: usize,
    pub grid_steps_per_period: usize,
    /// Box half-width in units of `√(ħ/μω)`.
    pub grid_half_width: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { ode_steps_per_period: 4096, grid_points: 4096, grid_steps_per_period: 4096, grid_half_width: 16.0 }
    }
}

/// `kind` at `samples` uniform times over `periods` oscillator periods.
pub fn engine_series(
    engine: Engine,
    packet: &SpectralPacket,
    kind: MomentKind,
    periods: f64,
    samples: usize,
    opts: &EngineOptions,
) -> Result<MomentSeries> {
    if samples < 2 || !(periods > 0.0 && periods.is_finite()) {
        return Err(Error::Invalid("need at least 2 samples over a positive number of periods".into()));
    }
    let u = packet.units();
    let times = uniform_times(u, periods, samples);
    // steps between consecutive samples
    let substeps = |per_period: usize| ((per_period as f64 * periods / samples as f64).ceil() as usize).max(1);
    let values = match engine {
        Engine::Spectral => return packet.series(kind, &times),
        Engine::ClosedForm => closed_form_values(packet, kind, &times)?,
        Engine::Ode => {
            let chain = MomentChain::from_packet(packet, kind.order().max(2), 0.0)?;
            let sub = substeps(opts.ode_steps_per_period);
            let t_end = times[samples - 1];
            let traj = integrate(&chain, u, (0.0, t_end), sub * (samples - 1))?;
            (0..samples).map(|j| traj.states[j * sub].value(kind)).collect()
        }
        Engine::Grid => {
            let params = GridParams::symmetric(opts.grid_half_width, opts.grid_points, u);
            let mut g = synthesize(packet.spec(), u, params)?;
            let sub = substeps(opts.grid_steps_per_period);
            let (k, l) = kind.indices();
            let mut out = Vec::with_capacity(samples);
            for j in 0..samples {
                if j > 0 {
                    g = propagate(&g, times[j] - times[j - 1], sub)?;
                }
                out.push(kind.pick(g.quadrature_moment(k, l)?));
            }
            out
        }
    };
    MomentSeries::new(kind, times, values)
}

fn closed_form_values(packet: &SpectralPacket, kind: MomentKind, times: &[f64]) -> Result<Vec<f64>> {
    let u = packet.units();
    let second = |pick: fn((f64, f64, f64)) -> f64| -> Result<Vec<f64>> {
        let init = SecondMomentInit::from_packet(packet)?;
        Ok(times.iter().map(|&t| pick(predict_q2p2r11(&init, u, t))).collect())
    };
    match (kind, kind.indices()) {
        (MomentKind::S(..), _) => {}
        (_, (2, 0)) => return second(|v| v.0),
        (_, (0, 2)) => return second(|v| v.1),
        (_, (1, 1)) => return second(|v| v.2),
        (_, (4, 0)) => {
            let init = FourthMomentInit::from_packet(packet)?;
            return Ok(times.iter().map(|&t| predict_q4(&init, u, t)).collect());
        }
        _ => {}
    }
    Err(Error::Unsupported { engine: Engine::ClosedForm.to_string(), quantity: kind.to_string() })
}

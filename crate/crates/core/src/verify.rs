//! Self-checks run by `rigidpack verify`: each compares one engine against an
//! identity or another engine over a packet ensemble.

use crate::closedform::{
    conservation_residual, predict_q2p2r11, predict_q4, special_s_identities_for, FourthMomentInit,
    SecondMomentInit,
};
use crate::error::{Error, Result};
use crate::gridoracle::{propagate, synthesize, GridParams};
use crate::hierarchy::{integrate, MomentChain};
use crate::packet::{EvalPath, FockState, MomentKind, PacketSpec, Parity, SpectralPacket};
use crate::rigidity::{classify, generate, ProfileParity, RigiditySpec, DEFAULT_TOL_REL};
use crate::units::{uniform_times, Units};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Grid box half-width (in `√(ħ/μω)`) used by the oracle check.
pub const ORACLE_HALF_WIDTH: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Conservation,
    Parity,
    SIdentities,
    ClosedForm,
    Rigidity,
    Oracle,
    Hierarchy,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Conservation,
        Check::Parity,
        Check::SIdentities,
        Check::ClosedForm,
        Check::Rigidity,
        Check::Oracle,
        Check::Hierarchy,
    ];

    pub fn tolerance(self) -> f64 {
        match self {
            Check::Conservation | Check::Parity | Check::SIdentities | Check::ClosedForm => 1e-10,
            Check::Rigidity => 0.0,
            Check::Oracle => 1e-6,
            Check::Hierarchy => 1e-9,
        }
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Invalid(format!("unknown check '{s}'")))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Conservation => "conservation",
            Check::Parity => "parity",
            Check::SIdentities => "s-identities",
            Check::ClosedForm => "closedform",
            Check::Rigidity => "rigidity",
            Check::Oracle => "oracle",
            Check::Hierarchy => "hierarchy",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing in the ensemble the check applies to.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub residual: f64,
    pub tolerance: f64,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        write!(f, "{:<13} residual={:.3e} tol={:.0e} {status}", self.check.to_string(), self.residual, self.tolerance)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Size of the random ensemble when no packet is given.
    pub ensemble: usize,
    pub packet: Option<PacketSpec>,
    pub units: Units,
    pub samples: usize,
    /// Grid points, also used as split-operator steps per period.
    pub grid_points: usize,
    /// Ensemble members propagated on the grid.
    pub oracle_packets: usize,
    pub ode_steps_per_period: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            ensemble: 8,
            packet: None,
            units: Units::default(),
            samples: 32,
            grid_points: 8192,
            oracle_packets: 2,
            ode_steps_per_period: 4096,
        }
    }
}

/// Random profile on levels `0..=n_max` (`n_max ≤ max_level`) of the given
/// parity. The top level always carries weight.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, max_level: usize, parity: Parity) -> FockState {
    let offset = match parity {
        Parity::Odd => 1,
        _ => 0,
    };
    let step = if parity.is_definite() { 2 } else { 1 };
    let top = offset + step * rng.gen_range(0..=(max_level.saturating_sub(offset)) / step);
    let mut terms: Vec<(usize, Complex64)> = (offset..=top)
        .step_by(step)
        .map(|n| (n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let last = terms.last_mut().expect("at least one level");
    last.1 = Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..2.0 * PI));
    FockState::superposition(&terms).expect("nonzero top coefficient")
}

/// `(x0, p0)` uniform in the disk of radius `radius` in the reduced phase plane.
pub fn random_shift<R: Rng + ?Sized>(rng: &mut R, radius: f64, u: &Units) -> (f64, f64) {
    let (r, a) = (radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
    (r * a.cos() * u.length_scale(), r * a.sin() * u.momentum_scale())
}

/// Random profile shifted as far as the oracle box allows.
pub fn random_packet<R: Rng + ?Sized>(rng: &mut R, max_level: usize, parity: Parity, u: &Units) -> PacketSpec {
    let phi = random_profile(rng, max_level, parity);
    let (x0, p0) = random_shift(rng, 0.9 * shift_budget(phi.n_max(), ORACLE_HALF_WIDTH), u);
    PacketSpec::new(x0, p0, phi)
}

/// Largest displacement (in oscillator lengths) that keeps a profile with
/// levels up to `n_max` inside a box of the given half-width.
pub fn shift_budget(n_max: usize, half_width: f64) -> f64 {
    (half_width - (2.0 * ((2 * n_max + 1) as f64).sqrt() + 6.0)).max(0.0)
}

fn ensemble(config: &VerifyConfig) -> Vec<PacketSpec> {
    if let Some(p) = &config.packet {
        return vec![p.clone()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.ensemble)
        .map(|i| {
            let parity = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
            random_packet(&mut rng, 12, parity, &config.units)
        })
        .collect()
}

fn outcome(check: Check, residual: f64, detail: String) -> CheckOutcome {
    let tolerance = check.tolerance();
    let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
    CheckOutcome { check, residual, tolerance, status, detail }
}

/// Runs the requested checks in order.
pub fn run(config: &VerifyConfig, checks: &[Check]) -> Result<Vec<CheckOutcome>> {
    config.units.validate()?;
    if config.samples < 2 {
        return Err(Error::Invalid("need at least 2 samples".into()));
    }
    let packets: Vec<SpectralPacket> =
        ensemble(config).into_iter().map(|s| SpectralPacket::new(s, config.units)).collect();
    let times = uniform_times(&config.units, 1.0, config.samples);
    checks
        .iter()
        .map(|&c| match c {
            Check::Conservation => conservation(&packets, &times),
            Check::Parity => parity(&packets, &times),
            Check::SIdentities => s_identities(&packets, &times),
            Check::ClosedForm => closed_form(&packets, &times),
            Check::Rigidity => rigidity(config),
            Check::Oracle => oracle(&packets, config),
            Check::Hierarchy => hierarchy(&packets, config),
        })
        .collect()
}

fn conservation(packets: &[SpectralPacket], times: &[f64]) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for p in packets {
        let u = p.units();
        let init = SecondMomentInit::from_packet(p)?;
        let scale = u.mu_omega().powi(2) * init.q2_0 + init.p2_0;
        for &t in times {
            let q2 = p.moment_w(2, 0, t, EvalPath::Auto)?.re;
            let p2 = p.moment_w(0, 2, t, EvalPath::Auto)?.re;
            worst = worst.max(conservation_residual(q2, p2, &init, u).abs() / scale);
        }
    }
    Ok(outcome(Check::Conservation, worst, format!("{} packets", packets.len())))
}

fn parity(packets: &[SpectralPacket], times: &[f64]) -> Result<CheckOutcome> {
    let definite: Vec<_> = packets.iter().filter(|p| p.spec().parity().is_definite()).collect();
    if definite.is_empty() {
        return Ok(CheckOutcome {
            check: Check::Parity,
            residual: 0.0,
            tolerance: Check::Parity.tolerance(),
            status: Status::Skipped,
            detail: "no definite-parity packet".into(),
        });
    }
    let mut worst: f64 = 0.0;
    for p in &definite {
        for k in [1, 3, 5, 7] {
            let s = p.series(MomentKind::Q(k), times)?;
            worst = worst.max(s.max_abs() / p.units().length_scale().powi(k as i32));
        }
    }
    Ok(outcome(Check::Parity, worst, format!("odd Q_K up to K=7, {} packets", definite.len())))
}

fn s_identities(packets: &[SpectralPacket], times: &[f64]) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for p in packets {
        for &t in times {
            let rep = special_s_identities_for(p, t)?;
            worst = worst.max(rep.max_residual() / rep.scale);
        }
    }
    Ok(outcome(Check::SIdentities, worst, format!("{} packets", packets.len())))
}

fn closed_form(packets: &[SpectralPacket], times: &[f64]) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for p in packets {
        let u = p.units();
        let second = SecondMomentInit::from_packet(p)?;
        let fourth = FourthMomentInit::from_packet(p)?;
        let series = |kind| p.series(kind, times);
        let (q2, p2, r11, q4) =
            (series(MomentKind::Q(2))?, series(MomentKind::P(2))?, series(MomentKind::R(1, 1))?, series(MomentKind::Q(4))?);
        let cross_scale = (q2.max_abs() * p2.max_abs()).sqrt();
        for (j, &t) in times.iter().enumerate() {
            let (eq2, ep2, er11) = predict_q2p2r11(&second, u, t);
            let eq4 = predict_q4(&fourth, u, t);
            worst = worst
                .max((q2.values[j] - eq2).abs() / q2.max_abs())
                .max((p2.values[j] - ep2).abs() / p2.max_abs())
                .max((r11.values[j] - er11).abs() / cross_scale)
                .max((q4.values[j] - eq4).abs() / q4.max_abs());
        }
    }
    Ok(outcome(Check::ClosedForm, worst, "Q2, P2, R11, Q4".into()))
}

fn rigidity(config: &VerifyConfig) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let trials = 12;
    let mut failures = 0;
    for _ in 0..trials {
        let n = rng.gen_range(1..=4);
        let terms = rng.gen_range(2..=3);
        let mut indices = vec![rng.gen_range(0..=2)];
        for _ in 1..terms {
            let last = *indices.last().unwrap();
            indices.push(last + n + 1 + rng.gen_range(0..=1));
        }
        let parity = if rng.gen() { ProfileParity::Even } else { ProfileParity::Odd };
        let spec = RigiditySpec::with_random_amplitudes(n, parity, indices, rng.gen())?
            .displaced(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let rep = classify(&generate(&spec)?, &config.units, 10, 64, DEFAULT_TOL_REL)?;
        if rep.degree.at_least() < n {
            failures += 1;
        }
    }
    Ok(outcome(Check::Rigidity, failures as f64, format!("{failures} of {trials} specs below their designed degree")))
}

fn oracle(packets: &[SpectralPacket], config: &VerifyConfig) -> Result<CheckOutcome> {
    let n = config.grid_points;
    let mut worst: f64 = 0.0;
    let mut center_worst: f64 = 0.0;
    let count = config.oracle_packets.min(packets.len()).max(1);
    for p in packets.iter().take(count) {
        let u = *p.units();
        let mut g = synthesize(p.spec(), &u, GridParams::symmetric(ORACLE_HALF_WIDTH, n, &u))?;
        let dt = u.period() / 8.0;
        let mut diffs: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 0..8 {
            if j > 0 {
                g = propagate(&g, dt, n / 8)?;
            }
            let t = dt * j as f64;
            for order in 2..=4 {
                for k in 0..=order {
                    let l = order - k;
                    let unit = u.moment_scale(k, l);
                    let exact = p.moment_w(k, l, t, EvalPath::Auto)? / unit;
                    let grid = g.quadrature_moment(k, l)? / unit;
                    diffs = diffs.max((exact - grid).norm());
                    scale = scale.max(exact.norm());
                }
            }
            let (xe, pe) = p.center(t);
            let (xg, pg) = g.center();
            center_worst = center_worst.max(((xe - xg) / u.length_scale()).abs()).max(((pe - pg) / u.momentum_scale()).abs());
        }
        worst = worst.max(diffs / scale);
    }
    let residual = worst.max(center_worst);
    Ok(outcome(
        Check::Oracle,
        residual,
        format!("{n} points, {n} steps/period, {count} packets, moments {worst:.2e}, center {center_worst:.2e}"),
    ))
}

fn hierarchy(packets: &[SpectralPacket], config: &VerifyConfig) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for p in packets {
        let u = p.units();
        let chain = MomentChain::from_packet(p, 4, 0.0)?;
        let traj = integrate(&chain, u, (0.0, u.period()), config.ode_steps_per_period)?;
        let end = traj.last();
        let exact = MomentChain::from_packet(p, 4, u.period())?;
        for order in 2..=4 {
            let (a, b) = (end.block(order), exact.block(order));
            let mut scale: f64 = 0.0;
            let mut diff: f64 = 0.0;
            for k in 0..=order {
                let l = order - k;
                let unit = u.moment_scale(k, l);
                scale = scale.max(b.r(k, l).abs() / unit).max(b.s(k, l).abs() / unit);
                diff = diff.max((a.r(k, l) - b.r(k, l)).abs() / unit).max((a.s(k, l) - b.s(k, l)).abs() / unit);
            }
            worst = worst.max(diff / scale);
        }
    }
    Ok(outcome(Check::Hierarchy, worst, format!("orders 2..4, {} steps/period", config.ode_steps_per_period)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.to_string().parse::<Check>().unwrap(), c);
        }
        assert!("bogus".parse::<Check>().is_err());
    }

    #[test]
    fn random_packets_respect_parity_and_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = Units::default();
        for parity in [Parity::Even, Parity::Odd, Parity::Indefinite] {
            for _ in 0..20 {
                let p = random_packet(&mut rng, 12, parity, &u);
                assert!(p.phi.n_max() <= 12);
                if parity.is_definite() {
                    assert_eq!(p.parity(), parity);
                }
                assert!(p.x0.hypot(p.p0) <= shift_budget(p.phi.n_max(), ORACLE_HALF_WIDTH));
            }
        }
    }

    #[test]
    fn cheap_checks_pass_on_default_ensemble() {
        let config = VerifyConfig { ensemble: 4, ..Default::default() };
        let checks = [Check::Conservation, Check::Parity, Check::SIdentities, Check::ClosedForm, Check::Hierarchy];
        for o in run(&config, &checks).unwrap() {
            assert_eq!(o.status, Status::Pass, "{o}");
        }
    }

    #[test]
    fn parity_skipped_without_definite_profile() {
        let phi = FockState::superposition(&[(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))]).unwrap();
        let config = VerifyConfig { packet: Some(PacketSpec::centered(phi)), ..Default::default() };
        let o = &run(&config, &[Check::Parity]).unwrap()[0];
        assert_eq!(o.status, Status::Skipped);
    }

    #[test]
    #[ignore = "slow: full default suite"]
    fn default_suite_passes() {
        let t = std::time::Instant::now();
        for o in run(&VerifyConfig::default(), &Check::ALL).unwrap() {
            println!("{o}");
            assert_eq!(o.status, Status::Pass, "{o}");
        }
        println!("{:?}", t.elapsed());
    }

    #[test]
    fn coarse_grid_fails_oracle() {
        let config = VerifyConfig { ensemble: 1, grid_points: 512, oracle_packets: 1, ..Default::default() };
        let o = &run(&config, &[Check::Oracle]).unwrap()[0];
        assert_eq!(o.status, Status::Fail, "{o}");
    }
}

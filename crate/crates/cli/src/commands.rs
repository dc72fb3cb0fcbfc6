use crate::{ClassifyArgs, GenerateArgs, MomentsArgs, OracleDumpArgs, UnitArgs, VerifyArgs};
use rigidpack::engine::{engine_series, Engine, EngineOptions};
use rigidpack::gridoracle::{propagate, synthesize, GridParams, MIN_STEPS_PER_PERIOD};
use rigidpack::io;
use rigidpack::rigidity::{classify as classify_packet, generate as generate_packet, ProfileParity, RigiditySpec};
use rigidpack::verify::{self, Check, Status, VerifyConfig};
use rigidpack::{Error, MomentKind, PacketSpec, SpectralPacket, Units};
use std::path::Path;

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_SPEC: u8 = 2;
pub const EXIT_REQUEST: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn spec_error(e: impl ToString) -> Failure {
    Failure { code: EXIT_SPEC, message: e.to_string() }
}

fn request_error(e: impl ToString) -> Failure {
    Failure { code: EXIT_REQUEST, message: e.to_string() }
}

type CmdResult = Result<u8, Failure>;

fn units_with(base: Units, flags: UnitArgs) -> Result<Units, Failure> {
    let u = Units {
        mu: flags.mu.unwrap_or(base.mu),
        omega: flags.omega.unwrap_or(base.omega),
        hbar: flags.hbar.unwrap_or(base.hbar),
    };
    u.validate().map_err(request_error)?;
    Ok(u)
}

fn load_spec(path: &Path, flags: UnitArgs) -> Result<(PacketSpec, Units), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| spec_error(format!("{}: {e}", path.display())))?;
    let (spec, u) = io::spec_from_json(&text).map_err(spec_error)?;
    Ok((spec, units_with(u, flags)?))
}

/// Writes to `out` or stdout. Returns whether stdout was used.
fn emit(out: Option<&Path>, text: &str) -> Result<bool, Failure> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| request_error(format!("{}: {e}", p.display())))?;
            Ok(false)
        }
        None => {
            print!("{text}");
            Ok(true)
        }
    }
}

pub fn generate(a: GenerateArgs, flags: UnitArgs) -> CmdResult {
    let u = units_with(Units::default(), flags)?;
    let parity: ProfileParity = a.parity.parse().map_err(request_error)?;
    let spec = if a.random && a.indices.is_empty() {
        RigiditySpec::random(a.degree, parity, a.terms, a.seed)
    } else if a.random {
        RigiditySpec::with_random_amplitudes(a.degree, parity, a.indices, a.seed)
    } else {
        let amps = if a.amplitudes.is_empty() { vec![1.0; a.indices.len()] } else { a.amplitudes };
        RigiditySpec::new(a.degree, parity, a.indices, amps.into_iter().map(|x| x.into()).collect())
    }
    .map_err(spec_error)?;
    let spec = spec.displaced(a.x0 * u.length_scale(), a.p0 * u.momentum_scale());
    let packet = generate_packet(&spec).map_err(spec_error)?;
    let json = io::spec_to_json(&packet, &u) + "\n";
    let to_stdout = emit(a.out.as_deref(), &json)?;
    let msg = format!("spacing ok: indices {:?}, required gap {}", spec.indices, spec.target_n + 1);
    if to_stdout {
        eprintln!("{msg}");
    } else {
        println!("{msg}");
    }
    Ok(0)
}

fn parse_pair(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || request_error(format!("expected 'k,l', got '{s}'"));
    let (k, l) = s.split_once(',').ok_or_else(bad)?;
    Ok((k.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?))
}

fn requested_kind(a: &MomentsArgs) -> Result<MomentKind, Failure> {
    if let Some(k) = a.q {
        return Ok(MomentKind::Q(k));
    }
    if let Some(l) = a.p {
        return Ok(MomentKind::P(l));
    }
    if let Some(r) = &a.r {
        let (k, l) = parse_pair(r)?;
        return Ok(MomentKind::R(k, l));
    }
    if let Some(s) = &a.s {
        let (k, l) = parse_pair(s)?;
        return Ok(MomentKind::S(k, l));
    }
    let name = a.moment.as_deref().unwrap_or_default();
    name.parse().map_err(request_error)
}

pub fn moments(a: MomentsArgs, flags: UnitArgs) -> CmdResult {
    let (spec, u) = load_spec(&a.spec, flags)?;
    let kind = requested_kind(&a)?;
    let packet = SpectralPacket::new(spec, u);
    let opts = EngineOptions {
        ode_steps_per_period: a.ode_steps,
        grid_points: a.grid_points,
        grid_steps_per_period: a.grid_steps,
        ..EngineOptions::default()
    };
    let series = |name: &str| -> Result<_, Failure> {
        let engine: Engine = name.trim().parse().map_err(request_error)?;
        engine_series(engine, &packet, kind, a.periods, a.samples, &opts).map_err(|e| match e {
            Error::TruncationError { .. } | Error::BasisOverflow { .. } => spec_error(e),
            _ => request_error(e),
        })
    };
    match &a.compare {
        None => {
            let s = series(&a.engine)?;
            emit(a.out.as_deref(), &io::series_to_csv(&s))?;
        }
        Some(pair) => {
            let (e1, e2) = pair
                .split_once(',')
                .ok_or_else(|| request_error(format!("--compare expects 'engine1,engine2', got '{pair}'")))?;
            let (s1, s2) = (series(e1)?, series(e2)?);
            let (csv, max_diff) = io::comparison_to_csv(&s1, &s2).map_err(request_error)?;
            let to_stdout = emit(a.out.as_deref(), &csv)?;
            let msg = format!("max abs difference: {max_diff:.16e}");
            if to_stdout {
                eprintln!("{msg}");
            } else {
                println!("{msg}");
            }
        }
    }
    Ok(0)
}

pub fn classify(a: ClassifyArgs, flags: UnitArgs) -> CmdResult {
    let (spec, u) = load_spec(&a.spec, flags)?;
    let report = classify_packet(&spec, &u, a.k_max, a.samples, a.tol).map_err(request_error)?;
    let json = serde_json::to_string_pretty(&report).map_err(request_error)? + "\n";
    emit(a.out.as_deref(), &json)?;
    Ok(0)
}

pub fn verify(a: VerifyArgs, flags: UnitArgs) -> CmdResult {
    let (packet, u) = match &a.spec {
        Some(p) => {
            let (s, u) = load_spec(p, flags)?;
            (Some(s), u)
        }
        None => (None, units_with(Units::default(), flags)?),
    };
    let checks: Vec<Check> = if a.checks.is_empty() {
        Check::ALL.to_vec()
    } else {
        a.checks.iter().map(|c| c.trim().parse()).collect::<Result<_, _>>().map_err(request_error)?
    };
    let config = VerifyConfig {
        seed: a.seed,
        ensemble: a.ensemble,
        packet,
        units: u,
        samples: a.samples,
        grid_points: a.grid_points,
        ..VerifyConfig::default()
    };
    let outcomes = verify::run(&config, &checks).map_err(|e| match e {
        Error::GridTooSmall { .. } | Error::TruncationError { .. } => spec_error(e),
        _ => request_error(e),
    })?;
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| o.status == Status::Fail).count();
    if failed == 0 {
        println!("PASS");
        Ok(0)
    } else {
        println!("FAIL ({failed} of {} checks)", outcomes.len());
        Ok(EXIT_VERIFY)
    }
}

pub fn oracle_dump(a: OracleDumpArgs, flags: UnitArgs) -> CmdResult {
    let (spec, u) = load_spec(&a.spec, flags)?;
    let params = GridParams::symmetric(a.half_width, a.grid_points, &u);
    let g = synthesize(&spec, &u, params).map_err(request_error)?;
    let steps = ((a.steps_per_period as f64 * a.periods.abs()).ceil() as usize).max(MIN_STEPS_PER_PERIOD);
    let g = propagate(&g, a.periods * u.period(), steps).map_err(request_error)?;
    emit(a.out.as_deref(), &io::grid_to_csv(&g))?;
    Ok(0)
}

//! File formats: packet specs as JSON, moment series and grid snapshots as CSV.
//!
//! CSV floats are written with 17 significant digits so they round-trip.

use crate::error::{Error, Result};
use crate::gridoracle::GridState;
use crate::packet::{FockState, MomentSeries, PacketSpec};
use crate::units::Units;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// On-disk form of a packet: `{"coeffs": [[re, im], …], "x0", "p0", "units"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketDocument {
    pub coeffs: Vec<[f64; 2]>,
    pub x0: f64,
    pub p0: f64,
    #[serde(default)]
    pub units: Units,
}

impl PacketDocument {
    pub fn from_spec(spec: &PacketSpec, units: &Units) -> Self {
        Self {
            coeffs: spec.phi.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            x0: spec.x0,
            p0: spec.p0,
            units: *units,
        }
    }

    /// Validated spec and units. Coefficients are renormalized.
    pub fn to_spec(&self) -> Result<(PacketSpec, Units)> {
        self.units.validate()?;
        if !(self.x0.is_finite() && self.p0.is_finite()) {
            return Err(Error::Invalid("x0 and p0 must be finite".into()));
        }
        let coeffs = self.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok((PacketSpec::new(self.x0, self.p0, FockState::new(coeffs)?), self.units))
    }
}

pub fn spec_to_json(spec: &PacketSpec, units: &Units) -> String {
    serde_json::to_string_pretty(&PacketDocument::from_spec(spec, units)).expect("plain data serializes")
}

pub fn spec_from_json(text: &str) -> Result<(PacketSpec, Units)> {
    let doc: PacketDocument =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("packet spec: {e}")))?;
    doc.to_spec()
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `t,value` rows.
pub fn series_to_csv(series: &MomentSeries) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in series.times.iter().zip(&series.values) {
        let _ = writeln!(out, "{},{}", fmt_f64(*t), fmt_f64(*v));
    }
    out
}

/// `t,value,diff` rows with `value = a` and `diff = a − b`, plus the largest
/// `|diff|`.
pub fn comparison_to_csv(a: &MomentSeries, b: &MomentSeries) -> Result<(String, f64)> {
    if a.times != b.times {
        return Err(Error::Invalid("compared series must share their sample times".into()));
    }
    let mut out = String::from("t,value,diff\n");
    let mut max_diff = 0.0f64;
    for ((t, x), y) in a.times.iter().zip(&a.values).zip(&b.values) {
        let d = x - y;
        max_diff = max_diff.max(d.abs());
        let _ = writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*x), fmt_f64(d));
    }
    Ok((out, max_diff))
}

/// Reads back the first two columns of a series CSV.
pub fn series_from_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.starts_with("t,") => {}
        _ => return Err(Error::Invalid("missing 't,…' header".into())),
    }
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let mut cols = line.split(',').map(str::parse::<f64>);
        match (cols.next(), cols.next()) {
            (Some(Ok(t)), Some(Ok(v))) => {
                ts.push(t);
                vs.push(v);
            }
            _ => return Err(Error::Invalid(format!("bad CSV row {}", i + 2))),
        }
    }
    Ok((ts, vs))
}

/// `x,re,im,abs2` rows.
pub fn grid_to_csv(g: &GridState) -> String {
    let mut out = String::from("x,re,im,abs2\n");
    for (x, v) in g.samples() {
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(x), fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm_sqr()));
    }
    out
}

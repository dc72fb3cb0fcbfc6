//! Analytic second- and fourth-moment dynamics and the identities that hold
//! for every packet.

use crate::error::Result;
use crate::ladder::xp_polynomial;
use crate::packet::{EvalPath, FockState, PacketSpec, SpectralPacket};
use crate::units::Units;
use serde::Serialize;

/// `Q2(0)`, `P2(0)`, `R11(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondMomentInit {
    pub q2_0: f64,
    pub p2_0: f64,
    pub r11_0: f64,
}

impl SecondMomentInit {
    pub fn from_packet(packet: &SpectralPacket) -> Result<Self> {
        let w = |k, l| packet.moment_w(k, l, 0.0, EvalPath::Auto).map(|w| w.re);
        Ok(Self { q2_0: w(2, 0)?, p2_0: w(0, 2)?, r11_0: w(1, 1)? })
    }

    /// Positivity and the Schrödinger–Robertson bound
    /// `Q2·P2 ≥ (ħ/2)² + R11²`, up to rounding.
    pub fn is_physical(&self, u: &Units) -> bool {
        let bound = (u.hbar / 2.0).powi(2) + self.r11_0.powi(2);
        self.q2_0 > 0.0 && self.p2_0 > 0.0 && self.q2_0 * self.p2_0 >= bound * (1.0 - 1e-12)
    }
}

/// `Q4(0)`, `P4(0)`, `R22(0)`, `R13(0)`, `R31(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourthMomentInit {
    pub q4_0: f64,
    pub p4_0: f64,
    pub r22_0: f64,
    pub r13_0: f64,
    pub r31_0: f64,
}

impl FourthMomentInit {
    pub fn from_packet(packet: &SpectralPacket) -> Result<Self> {
        let w = |k, l| packet.moment_w(k, l, 0.0, EvalPath::Auto).map(|w| w.re);
        Ok(Self {
            q4_0: w(4, 0)?,
            p4_0: w(0, 4)?,
            r22_0: w(2, 2)?,
            r13_0: w(1, 3)?,
            r31_0: w(3, 1)?,
        })
    }
}

/// `(Q2(t), P2(t), R11(t))`.
pub fn predict_q2p2r11(init: &SecondMomentInit, u: &Units, t: f64) -> (f64, f64, f64) {
    let mw = u.mu_omega();
    let mw2 = mw * mw;
    let (s2, c2) = (2.0 * u.omega * t).sin_cos();
    let sum = mw2 * init.q2_0 + init.p2_0;
    let diff = mw2 * init.q2_0 - init.p2_0;
    let q2 = sum / (2.0 * mw2) + diff / (2.0 * mw2) * c2 + init.r11_0 / mw * s2;
    let p2 = sum / 2.0 - diff / 2.0 * c2 - mw * init.r11_0 * s2;
    let r11 = init.r11_0 * c2 - diff / (2.0 * mw) * s2;
    (q2, p2, r11)
}

/// `μ²ω²Q2(t) + P2(t) − μ²ω²Q2(0) − P2(0)`.
pub fn conservation_residual(q2_t: f64, p2_t: f64, init: &SecondMomentInit, u: &Units) -> f64 {
    let mw2 = u.mu_omega().powi(2);
    (mw2 * q2_t + p2_t) - (mw2 * init.q2_0 + init.p2_0)
}

/// `Q4(t)`: a constant plus harmonics at `2ω` and `4ω`.
pub fn predict_q4(init: &FourthMomentInit, u: &Units, t: f64) -> f64 {
    let mw = u.mu_omega();
    let (mw2, mw3, mw4) = (mw.powi(2), mw.powi(3), mw.powi(4));
    let h2 = u.hbar * u.hbar;
    let FourthMomentInit { q4_0, p4_0, r22_0, r13_0, r31_0 } = *init;
    let (s2, c2) = (2.0 * u.omega * t).sin_cos();
    let (s4, c4) = (4.0 * u.omega * t).sin_cos();

    let constant = (3.0 * mw4 * q4_0 + 3.0 * p4_0 + 6.0 * mw2 * r22_0 + 3.0 * h2 * mw2) / (8.0 * mw4);
    let cos2 = (mw4 * q4_0 - p4_0) / (2.0 * mw4);
    let sin2 = (r13_0 + mw2 * r31_0) / mw3;
    let cos4 = (mw4 * q4_0 + p4_0 - 6.0 * mw2 * r22_0 - 3.0 * h2 * mw2) / (8.0 * mw4);
    let sin4 = -(r13_0 - mw2 * r31_0) / (2.0 * mw3);
    constant + cos2 * c2 + sin2 * s2 + cos4 * c4 + sin4 * s4
}

/// One identity among the `S_kl` and its measured residual.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub identity: &'static str,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SIdentityReport {
    pub t: f64,
    pub residuals: Vec<IdentityResidual>,
    /// Largest `|W_kl|` with `k + l ≤ 4` at `t`, for relative thresholds.
    pub scale: f64,
}

impl SIdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.residual))
    }
}

/// Residuals of the universal `S_kl` identities at time `t`:
/// `S11 = ħ/2`, `S20 = S02 = S40 = S04 = 0`, `S31 = 3ħQ2/2`, `S13 = 3ħP2/2`,
/// `S22 = 2ħR11` and `S_kl = 0` for `k + l = 3`.
pub fn special_s_identities(spec: &PacketSpec, u: &Units, t: f64) -> Result<SIdentityReport> {
    let packet = SpectralPacket::new(spec.clone(), *u);
    special_s_identities_for(&packet, t)
}

pub fn special_s_identities_for(packet: &SpectralPacket, t: f64) -> Result<SIdentityReport> {
    let hbar = packet.units().hbar;
    let mut w = std::collections::HashMap::new();
    let mut scale: f64 = 0.0;
    for order in 2..=4 {
        for k in 0..=order {
            let v = packet.moment_w(k, order - k, t, EvalPath::Auto)?;
            scale = scale.max(v.norm());
            w.insert((k, order - k), v);
        }
    }
    let s = |k, l| w[&(k, l)].im;
    let r = |k, l| w[&(k, l)].re;
    let residuals = vec![
        ("S11 = hbar/2", s(1, 1) - hbar / 2.0),
        ("S20 = 0", s(2, 0)),
        ("S02 = 0", s(0, 2)),
        ("S40 = 0", s(4, 0)),
        ("S04 = 0", s(0, 4)),
        ("S31 = 3 hbar Q2 / 2", s(3, 1) - 1.5 * hbar * r(2, 0)),
        ("S13 = 3 hbar P2 / 2", s(1, 3) - 1.5 * hbar * r(0, 2)),
        ("S22 = 2 hbar R11", s(2, 2) - 2.0 * hbar * r(1, 1)),
        ("S30 = 0", s(3, 0)),
        ("S21 = 0", s(2, 1)),
        ("S12 = 0", s(1, 2)),
        ("S03 = 0", s(0, 3)),
    ]
    .into_iter()
    .map(|(identity, res)| IdentityResidual { identity, residual: f64::abs(res) })
    .collect();
    Ok(SIdentityReport { t, residuals, scale })
}

/// `⟨φ| x^k p^l |φ⟩` in oscillator units (`x` in `√(ħ/μω)`, `p` in `√(μωħ)`).
/// The physical conditions below divide through by the same unit factor on
/// every term, so they are compared in these units.
fn reduced_moment(phi: &FockState, k: usize, l: usize) -> f64 {
    let poly = xp_polynomial(k, l).expect("order within ladder cap");
    phi.expect(&poly).re
}

/// `⟨φ|{x,p}|φ⟩ = 0` and `μ²ω²⟨φ|x²|φ⟩ = ⟨φ|p²|φ⟩`: the width stays constant.
pub fn constant_width_conditions(phi: &FockState, u: &Units) -> bool {
    u.validate().expect("valid units");
    // ⟨xp + px⟩ = 2 Re⟨xp⟩
    let anti = 2.0 * reduced_moment(phi, 1, 1);
    let x2 = reduced_moment(phi, 2, 0);
    let p2 = reduced_moment(phi, 0, 2);
    let scale = x2.abs().max(p2.abs()).max(1.0);
    anti.abs() <= 1e-10 * scale && (x2 - p2).abs() <= 1e-10 * scale
}

/// `R13(0) = R31(0) = 0`, `μ⁴ω⁴Q4(0) = P4(0)` and `2μ²ω²Q4(0) − 6R22(0) = 3ħ²`:
/// the fourth moment stays constant.
pub fn constant_q4_conditions(phi: &FockState, u: &Units) -> bool {
    u.validate().expect("valid units");
    let q4 = reduced_moment(phi, 4, 0);
    let p4 = reduced_moment(phi, 0, 4);
    let r22 = reduced_moment(phi, 2, 2);
    let r13 = reduced_moment(phi, 1, 3);
    let r31 = reduced_moment(phi, 3, 1);
    let tol = 1e-9 * q4.abs().max(p4.abs()).max(r22.abs()).max(1.0);
    r13.abs() <= tol && r31.abs() <= tol && (q4 - p4).abs() <= tol && (2.0 * q4 - 6.0 * r22 - 3.0).abs() <= tol
}

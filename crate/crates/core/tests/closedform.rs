use num_complex::Complex64;
use proptest::prelude::*;
use rigidpack::closedform::{
    conservation_residual, constant_q4_conditions, constant_width_conditions, predict_q2p2r11, predict_q4,
    special_s_identities, FourthMomentInit, SecondMomentInit,
};
use rigidpack::{FockState, MomentKind, PacketSpec, SpectralPacket, Units};
use std::f64::consts::PI;

mod common;
use common::{profile, units};

fn times(u: &Units, n: usize) -> Vec<f64> {
    (0..n).map(|j| u.period() * j as f64 / n as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn second_and_fourth_moments_match_spectral(
        phi in (0u8..3).prop_flat_map(|p| profile(p, false)),
        shift in (-2.0f64..2.0, -2.0f64..2.0),
        u in units(),
    ) {
        let spec = PacketSpec::new(shift.0 * u.length_scale(), shift.1 * u.momentum_scale(), phi);
        let packet = SpectralPacket::new(spec, u);
        let ts = times(&u, 32);
        let second = SecondMomentInit::from_packet(&packet).unwrap();
        let fourth = FourthMomentInit::from_packet(&packet).unwrap();
        let q2 = packet.series(MomentKind::Q(2), &ts).unwrap();
        let p2 = packet.series(MomentKind::P(2), &ts).unwrap();
        let r11 = packet.series(MomentKind::R(1, 1), &ts).unwrap();
        let q4 = packet.series(MomentKind::Q(4), &ts).unwrap();
        let cross = (q2.max_abs() * p2.max_abs()).sqrt();
        for (j, &t) in ts.iter().enumerate() {
            let (eq2, ep2, er11) = predict_q2p2r11(&second, &u, t);
            prop_assert!((q2.values[j] - eq2).abs() <= 1e-10 * q2.max_abs());
            prop_assert!((p2.values[j] - ep2).abs() <= 1e-10 * p2.max_abs());
            prop_assert!((r11.values[j] - er11).abs() <= 1e-10 * cross);
            prop_assert!((q4.values[j] - predict_q4(&fourth, &u, t)).abs() <= 1e-10 * q4.max_abs());
        }
    }

    #[test]
    fn widths_stay_positive_and_uncertain(
        phi in (0u8..3).prop_flat_map(|p| profile(p, false)),
        u in units(),
    ) {
        let packet = SpectralPacket::new(PacketSpec::centered(phi), u);
        let init = SecondMomentInit::from_packet(&packet).unwrap();
        prop_assert!(init.is_physical(&u));
        for t in times(&u, 64) {
            let (q2, p2, r11) = predict_q2p2r11(&init, &u, t);
            prop_assert!(q2 > 0.0 && p2 > 0.0);
            let bound = (u.hbar / 2.0).powi(2) + r11 * r11;
            prop_assert!(q2 * p2 >= bound * (1.0 - 1e-10));
            let residual = conservation_residual(q2, p2, &init, &u);
            prop_assert!(residual.abs() <= 1e-12 * (u.mu_omega().powi(2) * init.q2_0 + init.p2_0));
        }
    }

    #[test]
    fn s_identities_hold(
        phi in (0u8..3).prop_flat_map(|p| profile(p, false)),
        shift in (-2.0f64..2.0, -2.0f64..2.0),
        u in units(),
        theta in 0.0f64..(2.0 * PI),
    ) {
        let spec = PacketSpec::new(shift.0 * u.length_scale(), shift.1 * u.momentum_scale(), phi);
        let rep = special_s_identities(&spec, &u, theta / u.omega).unwrap();
        prop_assert_eq!(rep.residuals.len(), 12);
        prop_assert!(rep.max_residual() <= 1e-10 * rep.scale.max(1.0), "{:?}", rep);
    }
}

/// Levels `2n` and `2(n + gap)` with the given amplitudes.
fn pair(n: usize, gap: usize, a: Complex64, b: Complex64) -> FockState {
    FockState::superposition(&[(2 * n, a), (2 * (n + gap), b)]).unwrap()
}

fn flat(packet: &SpectralPacket, kind: MomentKind) -> bool {
    let s = packet.series(kind, &times(packet.units(), 64)).unwrap();
    s.peak_to_peak() <= 1e-9 * s.max_abs()
}

#[test]
fn predicates_agree_with_measured_flatness() {
    let amps = [
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.7)),
    ];
    for u in [Units::default(), Units::new(2.0, 0.7, 1.4).unwrap()] {
        for gap in 1..=3 {
            for n in 0..3 {
                for (a, b) in amps {
                    for odd in [false, true] {
                        let phi = if odd {
                            FockState::superposition(&[(2 * n + 1, a), (2 * (n + gap) + 1, b)]).unwrap()
                        } else {
                            pair(n, gap, a, b)
                        };
                        let packet = SpectralPacket::new(PacketSpec::new(0.4, -0.2, phi.clone()), u);
                        assert_eq!(constant_width_conditions(&phi, &u), flat(&packet, MomentKind::Q(2)), "gap {gap}");
                        assert_eq!(constant_q4_conditions(&phi, &u), flat(&packet, MomentKind::Q(4)), "gap {gap}");
                        assert_eq!(constant_width_conditions(&phi, &u), gap >= 2);
                        assert_eq!(constant_q4_conditions(&phi, &u), gap >= 3);
                    }
                }
            }
        }
        for n in 0..=12 {
            let phi = FockState::number(n).unwrap();
            assert!(constant_width_conditions(&phi, &u) && constant_q4_conditions(&phi, &u));
            let packet = SpectralPacket::new(PacketSpec::new(1.0, 1.0, phi), u);
            assert!(flat(&packet, MomentKind::Q(2)) && flat(&packet, MomentKind::Q(4)));
        }
    }
}

#[test]
fn sine_terms_vanish_for_real_profiles() {
    let u = Units::default();
    let phi = FockState::new(vec![0.5.into(), 0.0.into(), (-0.7).into(), 0.0.into(), 0.4.into()]).unwrap();
    let packet = SpectralPacket::new(PacketSpec::new(0.3, 0.9, phi), u);
    let s = SecondMomentInit::from_packet(&packet).unwrap();
    let f = FourthMomentInit::from_packet(&packet).unwrap();
    assert!(s.r11_0.abs() < 1e-14);
    assert!(f.r13_0.abs() < 1e-13 && f.r31_0.abs() < 1e-13);
    // Q2 symmetric about t = 0
    for t in [0.3, 1.1, 2.0] {
        let (a, ..) = predict_q2p2r11(&s, &u, t);
        let (b, ..) = predict_q2p2r11(&s, &u, -t);
        assert!((a - b).abs() < 1e-14);
        assert!((predict_q4(&f, &u, t) - predict_q4(&f, &u, -t)).abs() < 1e-13);
    }
}

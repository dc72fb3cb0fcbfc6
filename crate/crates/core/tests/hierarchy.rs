use num_complex::Complex64;
use rigidpack::hierarchy::{integrate, rhs, MomentChain, MomentVector};
use rigidpack::rigidity::harmonic_content;
use rigidpack::units::uniform_times;
use rigidpack::{FockState, MomentKind, PacketSpec, SpectralPacket, Units};

fn packets() -> Vec<SpectralPacket> {
    let u = Units::new(1.4, 0.8, 0.9).unwrap();
    let c = Complex64::new;
    vec![
        SpectralPacket::new(
            PacketSpec::new(0.5, -0.3, FockState::superposition(&[(0, c(0.6, 0.1)), (2, c(-0.3, 0.5)), (4, c(0.2, 0.0))]).unwrap()),
            u,
        ),
        SpectralPacket::new(
            PacketSpec::new(-0.2, 0.9, FockState::superposition(&[(0, c(0.5, 0.0)), (1, c(0.1, 0.6)), (3, c(-0.4, 0.2))]).unwrap()),
            u,
        ),
    ]
}

/// Largest error over orders 2..4 after one period, relative to each block.
fn error_after_period(packet: &SpectralPacket, steps: usize) -> f64 {
    let u = packet.units();
    let init = MomentChain::from_packet(packet, 4, 0.0).unwrap();
    let traj = integrate(&init, u, (0.0, u.period()), steps).unwrap();
    let exact = MomentChain::from_packet(packet, 4, u.period()).unwrap();
    let mut worst: f64 = 0.0;
    for order in 2..=4 {
        let (a, b) = (traj.last().block(order), exact.block(order));
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 0..=order {
            let l = order - k;
            let unit = u.moment_scale(k, l);
            scale = scale.max(b.r(k, l).abs() / unit);
            diff = diff.max((a.r(k, l) - b.r(k, l)).abs() / unit).max((a.s(k, l) - b.s(k, l)).abs() / unit);
        }
        worst = worst.max(diff / scale);
    }
    worst
}

#[test]
fn rk4_converges_at_fourth_order() {
    for p in packets() {
        let errs: Vec<f64> = [256, 512, 1024].iter().map(|&n| error_after_period(&p, n)).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 3.7, "errors {errs:?}");
        }
        assert!(error_after_period(&p, 4096) < 1e-10);
    }
}

#[test]
fn integrated_series_tracks_spectral_values() {
    for p in packets() {
        let u = p.units();
        let init = MomentChain::from_packet(&p, 4, 0.0).unwrap();
        let traj = integrate(&init, u, (0.0, u.period()), 4096).unwrap();
        for kind in [MomentKind::Q(2), MomentKind::R(1, 1), MomentKind::Q(3), MomentKind::R(2, 2), MomentKind::S(3, 1)] {
            let ode = traj.series(kind).unwrap();
            let exact = p.series(kind, &ode.times).unwrap();
            let scale = exact.max_abs().max(u.moment_scale(kind.indices().0, kind.indices().1));
            for (a, b) in ode.values.iter().zip(&exact.values) {
                assert!((a - b).abs() < 1e-10 * scale, "{kind}: {a} vs {b}");
            }
        }
        assert!(traj.series(MomentKind::Q(6)).is_err());
    }
}

#[test]
fn right_hand_side_matches_spectral_derivative() {
    for p in packets() {
        let u = p.units();
        let t = 0.37;
        let h = 1e-4;
        for order in 2..=6 {
            let here = MomentVector::from_packet(&p, order, t).unwrap();
            let lower = MomentVector::from_packet(&p, order - 2, t).unwrap();
            let d = rhs(&here, Some(&lower), u).unwrap();
            let plus = MomentVector::from_packet(&p, order, t + h).unwrap();
            let minus = MomentVector::from_packet(&p, order, t - h).unwrap();
            for k in 0..=order {
                let l = order - k;
                let unit = u.moment_scale(k, l) * u.omega;
                let fd_r = (plus.r(k, l) - minus.r(k, l)) / (2.0 * h);
                let fd_s = (plus.s(k, l) - minus.s(k, l)) / (2.0 * h);
                assert!((fd_r - d.r(k, l)).abs() / unit < 1e-5, "dR{k}{l}");
                assert!((fd_s - d.s(k, l)).abs() / unit < 1e-5, "dS{k}{l}");
            }
        }
    }
}

#[test]
fn harmonic_content_of_low_moments() {
    for p in packets() {
        let times = uniform_times(p.units(), 1.0, 256);
        let q2 = p.series(MomentKind::Q(2), &times).unwrap();
        let q4 = p.series(MomentKind::Q(4), &times).unwrap();
        assert!(harmonic_content(&q2, &[0, 2]).unwrap() <= 1e-14);
        assert!(harmonic_content(&q4, &[0, 2, 4]).unwrap() <= 1e-14);
        let q3 = p.series(MomentKind::Q(3), &times).unwrap();
        if !p.spec().parity().is_definite() {
            assert!(q3.max_abs() > 1e-3);
            assert!(harmonic_content(&q3, &[1, 3]).unwrap() <= 1e-14);
        }
    }
}

#[test]
fn energy_like_combination_is_conserved() {
    for p in packets() {
        let u = p.units();
        let init = MomentChain::from_packet(&p, 2, 0.0).unwrap();
        let traj = integrate(&init, u, (0.0, u.period()), 4096).unwrap();
        let e = |c: &MomentChain| u.mu_omega().powi(2) * c.value(MomentKind::Q(2)) + c.value(MomentKind::P(2));
        let e0 = e(&init);
        for st in &traj.states {
            assert!((e(st) - e0).abs() <= 1e-12 * e0);
        }
    }
}

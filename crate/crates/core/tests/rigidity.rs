use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidpack::rigidity::{classify, generate, Degree, ProfileParity, RigiditySpec, DEFAULT_TOL_REL};
use rigidpack::units::uniform_times;
use rigidpack::{EvalPath, FockState, PacketSpec, SpectralPacket, Units};

fn random_spec(rng: &mut ChaCha8Rng, n: usize, exact_gap: bool) -> RigiditySpec {
    let terms = if exact_gap { 2 } else { rng.gen_range(2..=4) };
    let mut indices = vec![rng.gen_range(0..=3)];
    for _ in 1..terms {
        let extra = if exact_gap { 0 } else { rng.gen_range(0..=2) };
        indices.push(indices[indices.len() - 1] + n + 1 + extra);
    }
    let parity = if rng.gen() { ProfileParity::Even } else { ProfileParity::Odd };
    RigiditySpec::with_random_amplitudes(n, parity, indices, rng.gen())
        .unwrap()
        .displaced(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

#[test]
fn spacing_guarantees_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = Units::default();
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let spec = random_spec(&mut rng, n, false);
        let rep = classify(&generate(&spec).unwrap(), &u, 10, 64, DEFAULT_TOL_REL).unwrap();
        assert!(rep.degree.at_least() >= n, "{spec:?} -> {:?}", rep.degree);
    }
}

#[test]
fn exact_spacing_is_generically_tight() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let u = Units::default();
    let trials = 100;
    let mut tight = 0;
    for _ in 0..trials {
        let n = rng.gen_range(1..=4);
        let spec = random_spec(&mut rng, n, true);
        let rep = classify(&generate(&spec).unwrap(), &u, 10, 64, DEFAULT_TOL_REL).unwrap();
        if rep.degree == Degree::Finite(n) {
            tight += 1;
        }
    }
    assert!(tight * 100 >= 95 * trials, "{tight} of {trials}");
}

#[test]
fn all_low_order_moments_are_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let u = Units::new(0.8, 1.7, 1.2).unwrap();
    let times = uniform_times(&u, 1.0, 24);
    for _ in 0..12 {
        let n = rng.gen_range(1..=3);
        let packet = SpectralPacket::new(generate(&random_spec(&mut rng, n, false)).unwrap(), u);
        for order in 2..=2 * n {
            for k in 0..=order {
                let l = order - k;
                let unit = u.moment_scale(k, l);
                let w0 = packet.moment_w(k, l, 0.0, EvalPath::Auto).unwrap() / unit;
                for &t in &times {
                    let w = packet.moment_w(k, l, t, EvalPath::Auto).unwrap() / unit;
                    assert!((w - w0).norm() <= 1e-9 * (1.0 + w0.norm()), "N={n} W{k}{l}");
                }
            }
        }
    }
}

#[test]
fn displaced_number_states_are_perfectly_rigid() {
    let u = Units::new(1.5, 0.6, 0.8).unwrap();
    for n in [0, 1, 3, 7] {
        let spec = PacketSpec::new(1.3 * u.length_scale(), -0.8 * u.momentum_scale(), FockState::number(n).unwrap());
        let rep = classify(&spec, &u, 10, 64, DEFAULT_TOL_REL).unwrap();
        assert_eq!(rep.degree, Degree::Infinite);
        for (k, f) in &rep.per_k {
            assert!(f.flat, "Q{k} of |{n}>");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn classification_ignores_displacement(seed in any::<u64>(), x0 in -3.0f64..3.0, p0 in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let exact_gap = rng.gen();
        let spec = random_spec(&mut rng, n, exact_gap);
        let u = Units::default();
        let moved = generate(&spec.clone().displaced(x0, p0)).unwrap();
        let still = generate(&spec.displaced(0.0, 0.0)).unwrap();
        let a = classify(&moved, &u, 10, 64, DEFAULT_TOL_REL).unwrap();
        let b = classify(&still, &u, 10, 64, DEFAULT_TOL_REL).unwrap();
        prop_assert_eq!(a.degree, b.degree);
        for (k, fa) in &a.per_k {
            prop_assert_eq!(fa.flat, b.per_k[k].flat);
        }
    }
}

#[test]
fn mixed_parity_profile_classifies_through_general_path() {
    // |0> + |3>: Q2 constant, odd moments oscillate
    let phi = FockState::superposition(&[(0, 0.6.into()), (3, 0.8.into())]).unwrap();
    let rep = classify(&PacketSpec::new(0.5, 0.5, phi), &Units::default(), 6, 64, DEFAULT_TOL_REL).unwrap();
    assert!(rep.per_k[&2].flat);
    assert!(!rep.per_k[&3].flat);
    assert_eq!(rep.degree, Degree::Finite(1));
}

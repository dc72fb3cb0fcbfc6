#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use rigidpack::{FockState, Units};

/// Profiles on levels up to 12; `parity` 0 even, 1 odd, 2 mixed.
pub fn profile(parity: u8, real: bool) -> impl Strategy<Value = FockState> {
    (0usize..=6, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 13)).prop_map(move |(half, raw)| {
        let (offset, step) = match parity {
            0 => (0, 2),
            1 => (1, 2),
            _ => (0, 1),
        };
        let top = (offset + step * half).min(12);
        let mut terms: Vec<(usize, Complex64)> = (offset..=top)
            .step_by(step)
            .map(|n| (n, Complex64::new(raw[n].0, if real { 0.0 } else { raw[n].1 })))
            .collect();
        let last = terms.last_mut().unwrap();
        last.1 = Complex64::new(0.5 + last.1.re.abs(), 0.0);
        FockState::superposition(&terms).unwrap()
    })
}

pub fn units() -> impl Strategy<Value = Units> {
    (0.3f64..3.0, 0.3f64..3.0, 0.3f64..3.0).prop_map(|(m, w, h)| Units::new(m, w, h).unwrap())
}

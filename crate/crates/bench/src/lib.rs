//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use rigidpack::{FockState, PacketSpec};

/// A displaced even packet on levels 0, 4, 8, 12.
pub fn even_packet() -> PacketSpec {
    let c = Complex64::new;
    let phi = FockState::superposition(&[(0, c(0.5, 0.1)), (4, c(-0.3, 0.4)), (8, c(0.2, -0.2)), (12, c(0.1, 0.3))]).unwrap();
    PacketSpec::new(0.7, -0.4, phi)
}

/// Levels 0 to 7 with no definite parity.
pub fn mixed_packet() -> PacketSpec {
    let amps: Vec<Complex64> = (0..8).map(|n| Complex64::from_polar(1.0 / (1.0 + n as f64), 0.9 * n as f64)).collect();
    PacketSpec::new(-0.5, 0.8, FockState::new(amps).unwrap())
}

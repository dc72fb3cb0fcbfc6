//! Wave packets of the one-dimensional harmonic oscillator.
//!
//! The crate evolves packets exactly in the number basis, computes moments
//! about the packet center, integrates the coupled moment hierarchy, checks
//! the analytic second- and fourth-moment solutions, and generates and
//! classifies packets by their degree of rigidity. A position-grid
//! split-operator propagator serves as an independent oracle.

pub mod closedform;
pub mod engine;
pub mod error;
pub mod gridoracle;
pub mod hierarchy;
pub mod io;
pub mod ladder;
pub mod packet;
pub mod rigidity;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use packet::{
    center, displace_to_fock, moment_series, moment_w, EvalPath, FockState, MomentKind,
    MomentSeries, PacketSpec, Parity, SpectralPacket,
};
pub use units::Units;

//! Dark-state strong coupling in a highly dissipative cavity-QED system.
//!
//! A single two-level emitter couples at rate `g` to a lossy cavity mode
//! `a1`, which in turn couples at rate `J` to an auxiliary high-Q mode `a2`.
//! Eliminating the far-detuned lossy mode leaves an effective Jaynes-Cummings
//! interaction between the emitter and `a2` with coupling `g_eff = beta * g`.
//!
//! The crate is organized by task:
//!
//! * [`hilbert`]: truncated Fock space, operators, Hamiltonians, Liouvillian.
//! * [`effective`]: closed-form effective parameters and the effective model.
//! * [`eigen`]: non-Hermitian diagonalization of the one- and two-excitation
//!   manifolds (dark-state doublets, avoided crossings).
//! * [`dynamics`]: master-equation time evolution and a matrix-exponential
//!   oracle.
//! * [`probe`]: weakly driven steady states, excitation spectra and `g2(0)`.
//! * [`config`] and [`scenario`]: the command-line scenarios.
//!
//! All rates and detunings are in units of `g`; times in units of `1/g`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod effective;
pub mod eigen;
mod error;
pub mod hilbert;
pub mod linalg;
pub mod params;
pub mod probe;
pub mod scan;
pub mod scenario;

pub use error::{Error, Result};
pub use params::{Preset, ProbeDrive, SystemParams};
pub use scan::ScanResult;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Crate version, recorded in every CSV header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

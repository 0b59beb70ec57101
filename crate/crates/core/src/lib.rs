//! Sample-accurate simulation of smoothed phase-coded FMCW (SPC-FMCW) radar.
//!
//! The crate models the full complex-baseband transceiver: binary phase codes
//! with BPSK, Gaussian or GMSK phase synthesis, quadratic phase-lag
//! compensation at the transmitter, point-target propagation, dechirp,
//! brick-wall low-pass filtering and ADC decimation, the group-delay filter,
//! decoding, and range / range-Doppler processing. The [`metrics`] module
//! measures PSL, PAPR, cross-isolation, spectral nulls and residual phase.
//!
//! All filtering happens in the frequency domain over one full chirp record,
//! so every filter is circular. See [`signal::bin_frequency`] for the
//! frequency-axis convention.

pub mod channel;
pub mod coding;
pub mod error;
pub mod metrics;
pub mod receiver;
pub mod signal;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

//! Chaos-based 64-QAM: a complete baseband transceiver where the modulator
//! is a chaotic dynamical system driven by the data.
//!
//! Each I/Q rail backward-iterates the inverse branches of an 8-region
//! piecewise-linear map: every 3 data bits pick a branch, and the resulting
//! amplitude sequence is simultaneously a chaotic orbit of the map and a
//! sequence of points inside the symbol regions. A control parameter
//! `p ∈ [0, 1]` trades region width against guard gap; at `p = 1` the
//! scheme collapses to conventional Gray-coded 64-QAM, giving every result
//! an independent ground truth to check against. The receiver runs an
//! 8-state per-survivor Viterbi trellis over each rail.
//!
//! ```
//! use chaos_qam::channel::{apply_awgn, ChannelConfig};
//! use chaos_qam::map::MapParams;
//! use chaos_qam::modem::modulate;
//! use chaos_qam::receiver::demodulate;
//!
//! let map = MapParams::new(0.8)?;
//! let bits = [1, 0, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0];
//! let tx = modulate(&bits, 0.0, &map)?;
//! let rx = apply_awgn(&tx, &ChannelConfig { ebn0_db: 18.0, seed: 7, map_p: 0.8 })?;
//! let decoded = demodulate(&rx, &map)?;
//! assert_eq!(decoded.bits, bits);
//! # Ok::<(), chaos_qam::error::Error>(())
//! ```
//!
//! Module map:
//!
//! * [`map`] — the piecewise-linear map: regions, inverse/forward branches,
//!   invariant bound.
//! * [`modem`] — Gray bit packing and the backward-iteration modulator.
//! * [`channel`] — Eb/N0-calibrated AWGN with replayable noise.
//! * [`receiver`] — per-survivor Viterbi decoding and a brute-force ML
//!   oracle for short frames.
//! * [`analysis`] — analytic BER models, `erfc`, and the waveform-distance
//!   parameter `w_min`.
//! * [`harness`] — seeded Monte Carlo BER sweeps, constellation dumps, CSV.
//! * [`plot`] — standalone SVG rendering of BER sweeps.
//! * [`streams`] — derivation of independent, schedule-proof RNG streams.
//! * [`error`] — the crate-wide error type.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod harness;
pub mod map;
pub mod modem;
pub mod plot;
pub mod receiver;
pub mod streams;

pub use error::Error;

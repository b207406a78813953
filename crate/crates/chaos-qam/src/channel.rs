//! Calibrated additive white Gaussian noise.
//!
//! The only channel model here: `e[k] = x[k] + w[k]` with `w[k]` complex
//! white Gaussian noise of per-dimension variance `N0/2`. The calibration
//! fixes energy per information bit against the *analytic* steady-state
//! transmit power (not per-frame empirical power, which would fluctuate
//! with the data):
//!
//! ```text
//! Es = 2 * rail_power(map)      energy per complex sample
//! Eb = Es / 6                   6 bits per sample
//! N0 = Eb / 10^(ebn0_db / 10)
//! sigma = sqrt(N0 / 2)          per-dimension standard deviation
//! ```
//!
//! Noise is fully determined by the config seed, so a frame can be replayed
//! bit-for-bit; concurrent frames get independent streams by deriving one
//! seed per frame (see [`crate::streams`]).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::map::MapParams;
use crate::modem::{rail_power, IqFrame, IqSample};
use crate::streams;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Channel parameters: target Eb/N0 in dB, the seed that fully determines
/// the noise, and the map parameter the energy calibration is computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub seed: u64,
    pub map_p: f64,
}

/// A noisy frame: the received samples plus the config that produced them
/// and the pilot carried through for the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    pub samples: Vec<IqSample>,
    pub config: ChannelConfig,
    pub x0: f64,
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Per-dimension noise standard deviation for a config and the map whose
/// power it is calibrated against: `sqrt(N0/2)` with `N0 = Eb / 10^(dB/10)`
/// and `Eb = 2 * rail_power / 6`.
pub fn noise_sigma(config: &ChannelConfig, map: &MapParams) -> f64 {
    let es = 2.0 * rail_power(map);
    let eb = es / 6.0;
    let n0 = eb / 10f64.powf(config.ebn0_db / 10.0);
    (n0 / 2.0).sqrt()
}

/// Adds independent zero-mean Gaussian noise of standard deviation
/// [`noise_sigma`] to every I and Q component. One draw per dimension, I
/// before Q, in sample order — the output is a pure function of the seed.
///
/// Fails when `ebn0_db` is not finite, `map_p` is invalid, or the frame was
/// modulated with a different `p` than the config calibrates for.
pub fn apply_awgn(frame: &IqFrame, config: &ChannelConfig) -> Result<ReceivedFrame, Error> {
    if !config.ebn0_db.is_finite() {
        return Err(Error::Parameter {
            name: "ebn0_db",
            detail: format!("ebn0_db = {} is not finite", config.ebn0_db),
        });
    }
    let map = MapParams::new(config.map_p)?;
    if frame.map_p != config.map_p {
        return Err(Error::Parameter {
            name: "map_p",
            detail: format!(
                "frame was modulated with p = {} but the channel is calibrated for p = {}",
                frame.map_p, config.map_p
            ),
        });
    }
    let sigma = noise_sigma(config, &map);
    let mut rng = streams::stream(config.seed);
    let samples = frame
        .samples
        .iter()
        .map(|s| {
            let ni: f64 = rng.sample(StandardNormal);
            let nq: f64 = rng.sample(StandardNormal);
            IqSample { i: s.i + sigma * ni, q: s.q + sigma * nq }
        })
        .collect();
    Ok(ReceivedFrame { samples, config: *config, x0: frame.x0 })
}

//! Built-in health checks: fast, fully seeded, one verdict line per check.
//!
//! These are smoke tests for an installed binary, not the test suite — they
//! verify the map algebra, the noiseless loop, trellis/exhaustive-search
//! agreement in regimes where exact agreement is guaranteed, and the noise
//! calibration, in about a second of wall time.

use chaos_qam::channel::{apply_awgn, ChannelConfig, ReceivedFrame};
use chaos_qam::map::MapParams;
use chaos_qam::modem::modulate;
use chaos_qam::receiver::{brute_force_ml, demodulate, viterbi_decode_rail};
use chaos_qam::streams::{derive_seed, stream};
use rand::Rng;

use crate::CliError;

/// Seed domain for the selftest's own streams, distinct from the harness
/// roles so a selftest never replays experiment data.
const SELFTEST_SEED: u64 = 99;

/// Runs every check, printing one `selftest <name>: PASS/FAIL — detail`
/// line; returns an error (nonzero exit) if any check failed.
pub fn run() -> Result<(), CliError> {
    let mut all = true;
    all &= report("map algebra", map_algebra());
    all &= report("noiseless end-to-end", noiseless_end_to_end());
    all &= report("trellis vs exhaustive ML", trellis_vs_exhaustive());
    all &= report("channel calibration", channel_calibration());
    if all {
        Ok(())
    } else {
        Err(CliError::Invalid {
            name: "selftest".to_string(),
            detail: "one or more checks failed".to_string(),
        })
    }
}

fn report(name: &str, outcome: (bool, String)) -> bool {
    let (pass, detail) = outcome;
    println!("selftest {name}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Round trip, region membership, and the contraction identity over 10^4
/// random triples with x in [-1, 1] and p in [0, 0.99).
fn map_algebra() -> (bool, String) {
    let mut rng = stream(derive_seed(SELFTEST_SEED, &[1]));
    let mut max_err: f64 = 0.0;
    let mut regions_ok = true;
    for _ in 0..10_000 {
        let p = rng.gen_range(0.0..0.99);
        let map = MapParams::new(p).expect("p is in range by construction");
        let x = rng.gen_range(-1.0..1.0);
        let s = rng.gen_range(0..8u8);
        let y = map.inverse(x, s);
        regions_ok &= map.region_of(y) == Some(s);
        let round_trip = map.forward(y).expect("inverse output is in a region");
        max_err = max_err.max((round_trip - x).abs());
        let x2 = rng.gen_range(-1.0..1.0);
        let contraction =
            ((map.inverse(x2, s) - y).abs() - map.contraction() * (x2 - x).abs()).abs();
        max_err = max_err.max(contraction);
    }
    (
        max_err <= 1e-12 && regions_ok,
        format!("10000 triples: max algebra error {max_err:.2e} (tol 1e-12), regions consistent: {regions_ok}"),
    )
}

/// Modulate/demodulate must be the identity on bits without noise.
fn noiseless_end_to_end() -> (bool, String) {
    let mut rng = stream(derive_seed(SELFTEST_SEED, &[2]));
    let mut errors = 0u64;
    let mut bits_total = 0u64;
    for p in [0.0, 0.4, 0.8, 1.0] {
        let map = MapParams::new(p).expect("fixed in-range p");
        let bits: Vec<u8> = (0..60_000).map(|_| rng.gen_range(0..2u8)).collect();
        let tx = modulate(&bits, 0.0, &map).expect("valid bits and pilot");
        let rx = ReceivedFrame {
            samples: tx.samples.clone(),
            config: ChannelConfig { ebn0_db: 0.0, seed: 0, map_p: p },
            x0: tx.x0,
        };
        let decoded = demodulate(&rx, &map).expect("matching map");
        errors += bits.iter().zip(&decoded.bits).filter(|(a, b)| a != b).count() as u64;
        bits_total += bits.len() as u64;
    }
    (errors == 0, format!("{errors} errors over {bits_total} noiseless bits"))
}

/// Trellis decisions against exhaustive search over all 8^6 sequences, in
/// the two regimes where exact agreement is guaranteed: p = 1 (the trellis
/// states collapse, any noise level) and high SNR at p = 0.9.
fn trellis_vs_exhaustive() -> (bool, String) {
    let mut agree = 0u32;
    let mut total = 0u32;
    for (p, ebn0_db) in [(1.0, 10.0), (0.9, 16.0)] {
        let map = MapParams::new(p).expect("fixed in-range p");
        let mut rng = stream(derive_seed(SELFTEST_SEED, &[3, p.to_bits()]));
        for trial in 0..200u64 {
            let bits: Vec<u8> = (0..36).map(|_| rng.gen_range(0..2u8)).collect();
            let tx = modulate(&bits, 0.0, &map).expect("valid bits and pilot");
            let config = ChannelConfig {
                ebn0_db,
                seed: derive_seed(SELFTEST_SEED, &[3, p.to_bits(), trial]),
                map_p: p,
            };
            let rx = apply_awgn(&tx, &config).expect("valid channel config");
            for rail in [
                rx.samples.iter().map(|s| s.i).collect::<Vec<f64>>(),
                rx.samples.iter().map(|s| s.q).collect::<Vec<f64>>(),
            ] {
                let trellis = viterbi_decode_rail(&rail, 0.0, &map).expect("non-empty rail");
                let exhaustive = brute_force_ml(&rail, 0.0, &map).expect("within size limit");
                agree += u32::from(trellis == exhaustive);
                total += 1;
            }
        }
    }
    (agree == total, format!("{agree}/{total} rails identical to exhaustive search"))
}

/// The realized Eb/N0 (clean power vs injected noise) must match the
/// configured value within 0.1 dB.
fn channel_calibration() -> (bool, String) {
    let p = 0.5;
    let map = MapParams::new(p).expect("fixed in-range p");
    let mut rng = stream(derive_seed(SELFTEST_SEED, &[4]));
    let bits: Vec<u8> = (0..600_000).map(|_| rng.gen_range(0..2u8)).collect();
    let tx = modulate(&bits, 0.0, &map).expect("valid bits and pilot");
    let config = ChannelConfig { ebn0_db: 10.0, seed: derive_seed(SELFTEST_SEED, &[4, 1]), map_p: p };
    let rx = apply_awgn(&tx, &config).expect("valid channel config");

    let n = tx.samples.len() as f64;
    let es = tx.samples.iter().map(|s| s.i * s.i + s.q * s.q).sum::<f64>() / n;
    // Mean squared noise per complex symbol is 2 * sigma^2 = N0.
    let n0 = tx
        .samples
        .iter()
        .zip(&rx.samples)
        .map(|(a, b)| (b.i - a.i).powi(2) + (b.q - a.q).powi(2))
        .sum::<f64>()
        / n;
    let measured_db = 10.0 * (es / 6.0 / n0).log10();
    (
        (measured_db - 10.0).abs() <= 0.1,
        format!("configured 10 dB, realized {measured_db:.3} dB over {} symbols", tx.samples.len()),
    )
}

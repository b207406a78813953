//! Monte Carlo BER experiments: sweep `(p, Eb/N0)`, push random bits
//! through modulate → AWGN → demodulate, count errors, and attach the three
//! analytic curves to every point.
//!
//! Reproducibility is the organizing principle. Every frame's data bits and
//! noise come from streams derived from `(master_seed, role, p, ebn0_db,
//! frame index)` — see [`crate::streams`] — so no work unit shares generator
//! state with any other. Frames are simulated in fixed-size batches whose
//! sizes depend only on already-accumulated totals, and batch results are
//! merged by integer sums, so any parallel schedule produces byte-identical
//! CSV output to the sequential one.
//!
//! A point stops once `min_bits` bits are simulated **and** either
//! `min_errors` errors were seen or the `max_bits` cap is hit. The 95%
//! interval uses the binomial normal approximation; points that stopped on
//! the bit cap with few errors carry visibly wide intervals rather than
//! being silently dropped.

use rayon::prelude::*;

use crate::analysis::{
    ber_chaos_theory, ber_qam_textbook, ber_qam_theory, w_min_closed_form, M_QAM,
    N_BITS_PER_RAIL,
};
use crate::channel::{apply_awgn, ChannelConfig};
use crate::error::Error;
use crate::map::MapParams;
use crate::modem::{modulate, modulate_rail, IqSample};
use crate::receiver::demodulate;
use crate::streams::{derive_seed, stream};
use rand::Rng;

/// Stream-role tags keeping data bits, channel noise, and constellation
/// sampling on unrelated substreams of one master seed.
const DATA_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const CONSTELLATION_STREAM: u64 = 3;

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

/// Inclusive dB grid `start, start+step, ..` up to `stop` (the stop value is
/// included when it lands on the grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbnoGrid {
    pub start_db: f64,
    pub step_db: f64,
    pub stop_db: f64,
}

impl EbnoGrid {
    pub fn new(start_db: f64, step_db: f64, stop_db: f64) -> Result<Self, Error> {
        let grid = EbnoGrid { start_db, step_db, stop_db };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<(), Error> {
        let finite =
            self.start_db.is_finite() && self.step_db.is_finite() && self.stop_db.is_finite();
        if !finite || self.stop_db < self.start_db || self.step_db <= 0.0 {
            return Err(Error::Parameter {
                name: "ebn0",
                detail: format!(
                    "grid {}:{}:{} is not of the form start:step:stop with step > 0 and \
                     stop >= start",
                    self.start_db, self.step_db, self.stop_db
                ),
            });
        }
        Ok(())
    }

    /// The grid points. A slack of half a billionth of a step absorbs dB
    /// values that are not exactly representable.
    pub fn points(&self) -> Vec<f64> {
        let span = (self.stop_db - self.start_db) / self.step_db;
        let count = (span + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.start_db + k as f64 * self.step_db).collect()
    }
}

/// A full BER sweep: which `(p, Eb/N0)` cells to run and how hard to push
/// each one.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub p_values: Vec<f64>,
    pub ebn0_grid_db: EbnoGrid,
    /// Minimum bits per point, regardless of error count.
    pub min_bits: u64,
    /// Stop early once this many errors accumulate (after `min_bits`).
    pub min_errors: u64,
    /// Hard ceiling on bits per point for low-BER cells.
    pub max_bits: u64,
    /// Symbols per rail per frame.
    pub frame_symbols: usize,
    pub master_seed: u64,
    /// Pilot amplitude shared by modulator and receiver.
    pub x0: f64,
}

impl Default for Experiment {
    fn default() -> Self {
        Experiment {
            p_values: vec![0.1, 0.5, 1.0],
            ebn0_grid_db: EbnoGrid { start_db: 0.0, step_db: 2.0, stop_db: 16.0 },
            min_bits: 100_000,
            min_errors: 100,
            max_bits: 10_000_000,
            frame_symbols: 1000,
            master_seed: 42,
            x0: 0.0,
        }
    }
}

impl Experiment {
    /// Checks every invariant the runners assume. Called by the runners
    /// themselves, so a hand-built experiment cannot start half-valid.
    pub fn validate(&self) -> Result<(), Error> {
        if self.p_values.is_empty() {
            return Err(Error::Parameter {
                name: "p",
                detail: "at least one p value is required".into(),
            });
        }
        for &p in &self.p_values {
            let map = MapParams::new(p)?;
            let b = map.invariant_bound();
            if !(-b..=b).contains(&self.x0) {
                return Err(Error::Parameter {
                    name: "x0",
                    detail: format!(
                        "x0 = {} outside the invariant interval [-{b}, {b}] for p = {p}",
                        self.x0,
                    ),
                });
            }
        }
        self.ebn0_grid_db.validate()?;
        if self.frame_symbols == 0 {
            return Err(Error::Parameter {
                name: "frame",
                detail: "frame_symbols must be at least 1".into(),
            });
        }
        let bits_per_frame = 6 * self.frame_symbols as u64;
        if self.min_bits < bits_per_frame {
            return Err(Error::Parameter {
                name: "bits",
                detail: format!(
                    "min_bits = {} is less than one frame of 6 * {} = {bits_per_frame} bits",
                    self.min_bits, self.frame_symbols
                ),
            });
        }
        if self.max_bits < self.min_bits {
            return Err(Error::Parameter {
                name: "max-bits",
                detail: format!(
                    "max_bits = {} is less than min_bits = {}",
                    self.max_bits, self.min_bits
                ),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// One Monte Carlo point with its attached theory values (clamped to [0, 1]
/// for reporting; the analysis functions themselves never clamp).
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub p: f64,
    pub ebn0_db: f64,
    pub bits_simulated: u64,
    pub bit_errors: u64,
    pub ber_estimate: f64,
    pub ci95_halfwidth: f64,
    pub theory_eq12: f64,
    pub theory_eq13: f64,
    pub theory_textbook: f64,
}

/// Exact column set of the BER CSV.
pub const BER_CSV_HEADER: &str =
    "p,ebn0_db,bits,errors,ber,ci95,theory_eq12,theory_eq13,theory_textbook";

/// Renders records as CSV (header + one line per record, `{}` float
/// formatting = shortest round-trip decimal).
pub fn ber_csv(records: &[BerRecord]) -> String {
    let mut out = String::from(BER_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.p,
            r.ebn0_db,
            r.bits_simulated,
            r.bit_errors,
            r.ber_estimate,
            r.ci95_halfwidth,
            r.theory_eq12,
            r.theory_eq13,
            r.theory_textbook
        ));
    }
    out
}

/// Renders constellation points as CSV with the exact header `i,q`.
pub fn constellation_csv(points: &[IqSample]) -> String {
    let mut out = String::from("i,q\n");
    for pt in points {
        out.push_str(&format!("{},{}\n", pt.i, pt.q));
    }
    out
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

/// Simulates one frame end to end; returns (bits, bit errors).
fn simulate_frame(
    map: &MapParams,
    ebn0_db: f64,
    exp: &Experiment,
    frame_index: u64,
) -> Result<(u64, u64), Error> {
    let p_bits = map.p().to_bits();
    let e_bits = ebn0_db.to_bits();
    let mut data_rng =
        stream(derive_seed(exp.master_seed, &[DATA_STREAM, p_bits, e_bits, frame_index]));
    let bits: Vec<u8> =
        (0..6 * exp.frame_symbols).map(|_| data_rng.gen_range(0..2u8)).collect();

    let tx = modulate(&bits, exp.x0, map)?;
    let config = ChannelConfig {
        ebn0_db,
        seed: derive_seed(exp.master_seed, &[NOISE_STREAM, p_bits, e_bits, frame_index]),
        map_p: map.p(),
    };
    let rx = apply_awgn(&tx, &config)?;
    let decoded = demodulate(&rx, map)?;

    let errors = bits.iter().zip(&decoded.bits).filter(|(a, b)| a != b).count() as u64;
    Ok((bits.len() as u64, errors))
}

/// Runs one `(p, Eb/N0)` cell to the experiment's stopping rule.
///
/// Frames are numbered from zero and batched; batch boundaries depend only
/// on accumulated integer totals, so the result is a pure function of the
/// experiment regardless of thread schedule.
pub fn run_ber_point(p: f64, ebn0_db: f64, exp: &Experiment) -> Result<BerRecord, Error> {
    exp.validate()?;
    let map = MapParams::new(p)?;
    if !ebn0_db.is_finite() {
        return Err(Error::Parameter {
            name: "ebn0",
            detail: format!("ebn0_db = {ebn0_db} is not finite"),
        });
    }

    let bits_per_frame = 6 * exp.frame_symbols as u64;
    let mut bits = 0u64;
    let mut errors = 0u64;
    let mut next_frame = 0u64;
    while !(bits >= exp.min_bits && (errors >= exp.min_errors || bits >= exp.max_bits)) {
        let frames = if bits < exp.min_bits {
            (exp.min_bits - bits).div_ceil(bits_per_frame)
        } else {
            // Hunting remaining errors: modest batches up to the cap.
            (exp.max_bits - bits).div_ceil(bits_per_frame).min(16)
        }
        .max(1);
        let (batch_bits, batch_errors) = (next_frame..next_frame + frames)
            .into_par_iter()
            .map(|f| simulate_frame(&map, ebn0_db, exp, f))
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
        bits += batch_bits;
        errors += batch_errors;
        next_frame += frames;
    }

    let ber = errors as f64 / bits as f64;
    let ci95 = 1.96 * (ber * (1.0 - ber) / bits as f64).sqrt();
    let w_min = w_min_closed_form(p);
    Ok(BerRecord {
        p,
        ebn0_db,
        bits_simulated: bits,
        bit_errors: errors,
        ber_estimate: ber,
        ci95_halfwidth: ci95,
        theory_eq12: ber_qam_theory(ebn0_db, M_QAM, N_BITS_PER_RAIL).clamp(0.0, 1.0),
        theory_eq13: ber_chaos_theory(ebn0_db, M_QAM, N_BITS_PER_RAIL, w_min)?.clamp(0.0, 1.0),
        theory_textbook: ber_qam_textbook(ebn0_db, M_QAM).clamp(0.0, 1.0),
    })
}

/// Runs the Cartesian product `p_values x grid`, sorted by `(p, ebn0_db)`.
pub fn run_experiment(exp: &Experiment) -> Result<Vec<BerRecord>, Error> {
    exp.validate()?;
    let mut records = Vec::new();
    for &p in &exp.p_values {
        for ebn0_db in exp.ebn0_grid_db.points() {
            records.push(run_ber_point(p, ebn0_db, exp)?);
        }
    }
    records.sort_by(|a, b| {
        (a.p, a.ebn0_db)
            .partial_cmp(&(b.p, b.ebn0_db))
            .expect("validated records never hold NaN coordinates")
    });
    Ok(records)
}

/// Modulates `num_symbols` uniform random symbols per rail (pilot 0) and
/// returns the complex samples — the scatter data behind the constellation
/// figures.
pub fn dump_constellation(p: f64, num_symbols: usize, seed: u64) -> Result<Vec<IqSample>, Error> {
    if num_symbols == 0 {
        return Err(Error::Parameter {
            name: "symbols",
            detail: "num_symbols must be at least 1".into(),
        });
    }
    let map = MapParams::new(p)?;
    let mut rng = stream(derive_seed(seed, &[CONSTELLATION_STREAM]));
    let rail_i: Vec<u8> = (0..num_symbols).map(|_| rng.gen_range(0..8u8)).collect();
    let rail_q: Vec<u8> = (0..num_symbols).map(|_| rng.gen_range(0..8u8)).collect();
    let i = modulate_rail(&rail_i, 0.0, &map)?;
    let q = modulate_rail(&rail_q, 0.0, &map)?;
    Ok(i.into_iter().zip(q).map(|(i, q)| IqSample { i, q }).collect())
}

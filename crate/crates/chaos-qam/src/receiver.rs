//! Sequence detection: an 8-state per-survivor Viterbi decoder and a
//! brute-force maximum-likelihood oracle.
//!
//! The true transmitter state is the continuous amplitude `x[k]`, so an
//! exact finite trellis does not exist. The decoder uses the standard
//! per-survivor reduction: state `j` means "last emitted symbol was `j`"
//! and carries the survivor-path estimate `x~_j[k]` of the amplitude. Branch
//! `j -> i` at step `k+1` hypothesizes symbol `i` emitted from the survivor
//! of `j`:
//!
//! ```text
//! candidate_ji = f_i^-1(x~_j[k])
//! C_i[k+1]     = min_j ( C_j[k] + (r[k+1] - candidate_ji)^2 )
//! ```
//!
//! with ties broken toward the smallest predecessor index, the smallest
//! final state, and full-frame traceback. On a noiseless frame the true
//! path accumulates exactly zero cost (the decoder evaluates the same
//! inverse-map expression the modulator did), and the guard gap makes every
//! wrong branch strictly positive, so noiseless decoding is exact.
//!
//! [`brute_force_ml`] searches all `8^K` sequences with the matching
//! lexicographic tie rule. Per-survivor processing is a *reduction*: merging
//! paths by last-symbol state can discard a path whose inferior cost at the
//! merge would have won later (the discarded survivor's amplitude estimate
//! differs), so the trellis decision may deviate from the exhaustive optimum
//! on noisy near-tie frames. The oracle exists to measure exactly that.

use crate::channel::ReceivedFrame;
use crate::error::Error;
use crate::map::{MapParams, NUM_REGIONS};
use crate::modem::rails_to_bits;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// One trellis cell: accumulated path cost, the per-survivor amplitude
/// estimate, and the predecessor state the survivor came through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrellisNode {
    pub cost: f64,
    pub survivor_sample: f64,
    pub backpointer: u8,
}

/// Decoded frame: per-rail symbol decisions, the unpacked bits, and the
/// total winning path cost (sum of both rails).
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub rail_i: Vec<u8>,
    pub rail_q: Vec<u8>,
    pub bits: Vec<u8>,
    pub final_cost: f64,
}

// ---------------------------------------------------------------------------
// Branch metric
// ---------------------------------------------------------------------------

/// Squared Euclidean distance `(received - candidate)^2` between a received
/// sample and the amplitude a hypothesized transition would have produced.
/// Both arguments must be finite.
#[inline]
pub fn branch_metric(received: f64, candidate: f64) -> f64 {
    let d = received - candidate;
    d * d
}

// ---------------------------------------------------------------------------
// Trellis
// ---------------------------------------------------------------------------

/// Trellis state for one rail: one column of 8 nodes per received sample.
/// Kept as a standalone struct so tests can drive it step by step (and
/// perturb survivors mid-frame to measure memory decay).
struct RailTrellis<'a> {
    map: &'a MapParams,
    columns: Vec<[TrellisNode; NUM_REGIONS]>,
}

impl<'a> RailTrellis<'a> {
    /// Initializes column 0 from the shared pilot: state `j` hypothesizes
    /// first symbol `j`, so its survivor sample is `f_j^-1(x0)`.
    fn new(map: &'a MapParams, x0: f64, r0: f64) -> Self {
        let mut first = [TrellisNode { cost: 0.0, survivor_sample: 0.0, backpointer: 0 };
            NUM_REGIONS];
        for (j, node) in first.iter_mut().enumerate() {
            let sample = map.inverse(x0, j as u8);
            *node = TrellisNode {
                cost: branch_metric(r0, sample),
                survivor_sample: sample,
                // Column 0 has no predecessor; the field is never read there.
                backpointer: j as u8,
            };
        }
        RailTrellis { map, columns: vec![first] }
    }

    /// Extends the trellis by one received sample.
    fn step(&mut self, r: f64) {
        let prev = self.columns.last().expect("trellis always has a column");
        let mut next = [TrellisNode { cost: 0.0, survivor_sample: 0.0, backpointer: 0 };
            NUM_REGIONS];
        for (i, node) in next.iter_mut().enumerate() {
            let mut best_cost = f64::INFINITY;
            let mut best_j = 0u8;
            let mut best_sample = 0.0;
            for (j, p) in prev.iter().enumerate() {
                let candidate = self.map.inverse(p.survivor_sample, i as u8);
                let cost = p.cost + branch_metric(r, candidate);
                // Strict < keeps the smallest predecessor index on ties.
                if cost < best_cost {
                    best_cost = cost;
                    best_j = j as u8;
                    best_sample = candidate;
                }
            }
            *node = TrellisNode {
                cost: best_cost,
                survivor_sample: best_sample,
                backpointer: best_j,
            };
        }
        self.columns.push(next);
    }

    /// Traces the minimum-cost terminal state (smallest index on ties) back
    /// to the first column. The state index at column `k` is the symbol
    /// decision for step `k`.
    fn traceback(&self) -> (Vec<u8>, f64) {
        let last = self.columns.last().expect("trellis always has a column");
        let mut state = 0u8;
        let mut best = f64::INFINITY;
        for (i, node) in last.iter().enumerate() {
            if node.cost < best {
                best = node.cost;
                state = i as u8;
            }
        }
        let mut symbols = vec![0u8; self.columns.len()];
        for (k, column) in self.columns.iter().enumerate().rev() {
            symbols[k] = state;
            state = column[state as usize].backpointer;
        }
        (symbols, best)
    }
}

// ---------------------------------------------------------------------------
// Decoders
// ---------------------------------------------------------------------------

fn check_rail_inputs(received: &[f64], x0: f64, map: &MapParams) -> Result<(), Error> {
    if received.is_empty() {
        return Err(Error::Framing { detail: "cannot decode an empty rail".into() });
    }
    let b = map.invariant_bound();
    if !(-b..=b).contains(&x0) {
        return Err(Error::Parameter {
            name: "x0",
            detail: format!("x0 = {x0} outside the invariant interval [-{b}, {b}]"),
        });
    }
    Ok(())
}

/// Decodes one rail and also returns the winning path cost.
pub(crate) fn viterbi_decode_rail_with_cost(
    received: &[f64],
    x0: f64,
    map: &MapParams,
) -> Result<(Vec<u8>, f64), Error> {
    check_rail_inputs(received, x0, map)?;
    let mut trellis = RailTrellis::new(map, x0, received[0]);
    for &r in &received[1..] {
        trellis.step(r);
    }
    Ok(trellis.traceback())
}

/// Decodes one rail with the 8-state per-survivor trellis described in the
/// module docs. Returns one symbol per received sample.
pub fn viterbi_decode_rail(received: &[f64], x0: f64, map: &MapParams) -> Result<Vec<u8>, Error> {
    viterbi_decode_rail_with_cost(received, x0, map).map(|(symbols, _)| symbols)
}

/// Exhaustive maximum-likelihood reference: enumerates all `8^K` symbol
/// sequences in lexicographic order, regenerates each candidate waveform
/// from `x0`, and keeps the strictly smallest total squared distance —
/// so cost ties resolve to the lexicographically smallest sequence,
/// matching the trellis tie rule.
///
/// Only for short frames: `K <= 8`, else a resource error.
pub fn brute_force_ml(received: &[f64], x0: f64, map: &MapParams) -> Result<Vec<u8>, Error> {
    check_rail_inputs(received, x0, map)?;
    if received.len() > 8 {
        return Err(Error::Resource {
            detail: format!(
                "brute-force search over 8^K sequences requires K <= 8, got K = {}",
                received.len()
            ),
        });
    }
    let mut best_cost = f64::INFINITY;
    let mut best = Vec::new();
    let mut current = vec![0u8; received.len()];
    search(map, received, 0, x0, 0.0, &mut current, &mut best_cost, &mut best);
    Ok(best)
}

/// Depth-first walk in symbol order 0..7 at every level, accumulating the
/// amplitude chain and cost incrementally (the same left-to-right floating
/// point evaluation order the trellis uses, so agreeing paths carry
/// bit-identical costs).
#[allow(clippy::too_many_arguments)]
fn search(
    map: &MapParams,
    received: &[f64],
    depth: usize,
    x: f64,
    cost: f64,
    current: &mut Vec<u8>,
    best_cost: &mut f64,
    best: &mut Vec<u8>,
) {
    if depth == received.len() {
        if cost < *best_cost {
            *best_cost = cost;
            best.clone_from(current);
        }
        return;
    }
    for s in 0..NUM_REGIONS as u8 {
        let next = map.inverse(x, s);
        let c = cost + branch_metric(received[depth], next);
        current[depth] = s;
        search(map, received, depth + 1, next, c, current, best_cost, best);
    }
}

/// Decodes a received frame: both rails independently through the trellis,
/// Gray labels unpacked back to bits, costs summed.
///
/// The `map` must match the parameter the frame's channel was calibrated
/// for (the receiver is assumed to know `p` and `x0`).
pub fn demodulate(received: &ReceivedFrame, map: &MapParams) -> Result<DecodeResult, Error> {
    if map.p() != received.config.map_p {
        return Err(Error::Parameter {
            name: "map_p",
            detail: format!(
                "decoding with p = {} but the frame was produced with p = {}",
                map.p(),
                received.config.map_p
            ),
        });
    }
    let rail_i: Vec<f64> = received.samples.iter().map(|s| s.i).collect();
    let rail_q: Vec<f64> = received.samples.iter().map(|s| s.q).collect();
    let (symbols_i, cost_i) = viterbi_decode_rail_with_cost(&rail_i, received.x0, map)?;
    let (symbols_q, cost_q) = viterbi_decode_rail_with_cost(&rail_q, received.x0, map)?;
    let bits = rails_to_bits(&symbols_i, &symbols_q);
    Ok(DecodeResult { rail_i: symbols_i, rail_q: symbols_q, bits, final_cost: cost_i + cost_q })
}

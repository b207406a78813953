//! Bit framing and the chaotic modulator.
//!
//! Each complex symbol carries 6 bits: the first three select the in-phase
//! rail symbol, the last three the quadrature rail symbol, MSB first, through
//! a reflected Gray labelling (adjacent amplitude regions differ in one bit):
//!
//! ```text
//! bits   000 001 011 010 110 111 101 100
//! symbol  0   1   2   3   4   5   6   7
//! ```
//!
//! Each rail is generated by backward iteration of the map's contracting
//! inverse branches, seeded with a pilot amplitude `x0` known to the
//! receiver:
//!
//! ```text
//! x[0] = f_{s[0]}^-1(x0),   x[k] = f_{s[k]}^-1(x[k-1])
//! ```
//!
//! The two rails run independently (same pilot) and form the I/Q components
//! of the transmitted frame. With symbols i.i.d. uniform the per-rail
//! average power converges to [`rail_power`], which downstream noise
//! calibration treats as the transmit power. The contraction forgets the
//! pilot geometrically fast (`a^k`), so its exact value is immaterial after
//! a few tens of samples.

use crate::error::Error;
use crate::map::MapParams;

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// Per-rail symbol streams plus the bits they were packed from.
///
/// Invariants: `rail_i.len() == rail_q.len()` and
/// `source_bits.len() == 6 * rail_i.len()`; every symbol decodes back to
/// exactly the three bits that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolFrame {
    pub rail_i: Vec<u8>,
    pub rail_q: Vec<u8>,
    pub source_bits: Vec<u8>,
}

impl SymbolFrame {
    /// Number of complex symbols (both rails always have equal length).
    pub fn num_symbols(&self) -> usize {
        self.rail_i.len()
    }
}

/// One complex baseband sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqSample {
    pub i: f64,
    pub q: f64,
}

/// A modulated frame: one complex sample per symbol, plus the pilot and the
/// map parameter that produced it (carried so the receiver side can check
/// it decodes with the same map it was modulated with).
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub samples: Vec<IqSample>,
    pub x0: f64,
    pub map_p: f64,
}

impl IqFrame {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Gray labelling
// ---------------------------------------------------------------------------

/// Reflected Gray label of symbol `s`: `s ^ (s >> 1)`.
pub(crate) fn gray_label(s: u8) -> u8 {
    s ^ (s >> 1)
}

/// Symbol whose Gray label is `label` (inverse of [`gray_label`] on `0..8`).
pub(crate) fn gray_symbol(label: u8) -> u8 {
    label ^ (label >> 1) ^ (label >> 2)
}

/// Unpacks two decoded symbol rails into the interleaved bit stream
/// (3 I bits then 3 Q bits per symbol, MSB first).
pub(crate) fn rails_to_bits(rail_i: &[u8], rail_q: &[u8]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(rail_i.len() * 6);
    for (&si, &sq) in rail_i.iter().zip(rail_q) {
        for s in [si, sq] {
            let label = gray_label(s);
            bits.push(label >> 2 & 1);
            bits.push(label >> 1 & 1);
            bits.push(label & 1);
        }
    }
    bits
}

// ---------------------------------------------------------------------------
// Bit framing
// ---------------------------------------------------------------------------

/// Packs a bit stream into per-rail symbols: 6 bits per complex symbol,
/// `[b5 b4 b3 | b2 b1 b0]` = I label then Q label, MSB first, each 3-bit
/// label Gray-decoded to its symbol.
///
/// Fails with a framing error when the length is not a multiple of 6 or any
/// entry is not a bit.
pub fn bits_to_symbols(bits: &[u8]) -> Result<SymbolFrame, Error> {
    if !bits.len().is_multiple_of(6) {
        return Err(Error::Framing {
            detail: format!("bit count {} is not a multiple of 6", bits.len()),
        });
    }
    if let Some(k) = bits.iter().position(|&b| b > 1) {
        return Err(Error::Framing {
            detail: format!("entry {} at index {k} is not a bit", bits[k]),
        });
    }
    let n = bits.len() / 6;
    let mut rail_i = Vec::with_capacity(n);
    let mut rail_q = Vec::with_capacity(n);
    for group in bits.chunks_exact(6) {
        let label_i = group[0] << 2 | group[1] << 1 | group[2];
        let label_q = group[3] << 2 | group[4] << 1 | group[5];
        rail_i.push(gray_symbol(label_i));
        rail_q.push(gray_symbol(label_q));
    }
    Ok(SymbolFrame { rail_i, rail_q, source_bits: bits.to_vec() })
}

/// Unpacks per-rail symbols back into the bit stream: the exact inverse of
/// [`bits_to_symbols`], computed from the symbols (not copied from
/// `source_bits`).
pub fn symbols_to_bits(frame: &SymbolFrame) -> Vec<u8> {
    rails_to_bits(&frame.rail_i, &frame.rail_q)
}

// ---------------------------------------------------------------------------
// Modulation
// ---------------------------------------------------------------------------

/// Backward-iterates one rail: `x[k] = f_{s[k]}^-1(x[k-1])` with
/// `x[-1] = x0`. The pilot `x0` itself is not transmitted; the output has
/// one sample per symbol.
///
/// Fails when `|x0|` exceeds the map's invariant bound (the orbit would not
/// be confined) or any symbol is out of `0..8`.
pub fn modulate_rail(symbols: &[u8], x0: f64, map: &MapParams) -> Result<Vec<f64>, Error> {
    let b = map.invariant_bound();
    if !(-b..=b).contains(&x0) {
        return Err(Error::Parameter {
            name: "x0",
            detail: format!("x0 = {x0} outside the invariant interval [-{b}, {b}]"),
        });
    }
    if let Some(k) = symbols.iter().position(|&s| s >= 8) {
        return Err(Error::Framing {
            detail: format!("symbol {} at index {k} out of range 0..8", symbols[k]),
        });
    }
    let mut out = Vec::with_capacity(symbols.len());
    let mut x = x0;
    for &s in symbols {
        x = map.inverse(x, s);
        out.push(x);
    }
    Ok(out)
}

/// Full modulator: packs `bits` with [`bits_to_symbols`], backward-iterates
/// each rail independently from the common pilot `x0`, and pairs the rails
/// into complex samples.
pub fn modulate(bits: &[u8], x0: f64, map: &MapParams) -> Result<IqFrame, Error> {
    let frame = bits_to_symbols(bits)?;
    let rail_i = modulate_rail(&frame.rail_i, x0, map)?;
    let rail_q = modulate_rail(&frame.rail_q, x0, map)?;
    let samples = rail_i
        .into_iter()
        .zip(rail_q)
        .map(|(i, q)| IqSample { i, q })
        .collect();
    Ok(IqFrame { samples, x0, map_p: map.p() })
}

/// Stationary per-rail average power `E[x^2] = 21 / (1 - a^2)` of a rail
/// driven by i.i.d. uniform symbols, where `a` is the map contraction.
///
/// The recursion `x' = a x + c(s)/2` has `E[c(s)/2] = 0` by symmetry and
/// `E[(c(s)/2)^2] = mean{1, 9, 25, 49} = 21`, so the second-moment fixed
/// point is `21/(1 - a^2)`. Ranges from 21 (`p = 1`, plain 8-level
/// amplitude modulation) to 28 (`p = 0`).
pub fn rail_power(map: &MapParams) -> f64 {
    let a = map.contraction();
    21.0 / (1.0 - a * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.gen_range(0..2u8)).collect()
    }

    #[test]
    fn gray_labels_match_the_reflected_code_table() {
        let labels: Vec<u8> = (0..8u8).map(gray_label).collect();
        assert_eq!(labels, [0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100]);
        for s in 0..8u8 {
            assert_eq!(gray_symbol(gray_label(s)), s);
        }
    }

    #[test]
    fn adjacent_symbols_differ_in_exactly_one_bit() {
        for s in 0..7u8 {
            let diff = gray_label(s) ^ gray_label(s + 1);
            assert_eq!(diff.count_ones(), 1, "symbols {s} and {}", s + 1);
        }
    }

    #[test]
    fn bits_pack_msb_first_i_rail_then_q_rail() {
        let frame = bits_to_symbols(&[0, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(frame.rail_i, [0]);
        assert_eq!(frame.rail_q, [0]);

        let frame = bits_to_symbols(&[1, 0, 0, 1, 1, 0]).unwrap();
        assert_eq!(frame.rail_i, [7]);
        assert_eq!(frame.rail_q, [4]);
        assert_eq!(frame.source_bits, [1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn symbols_unpack_to_the_bits_that_made_them() {
        let zero = SymbolFrame { rail_i: vec![0], rail_q: vec![0], source_bits: vec![0; 6] };
        assert_eq!(symbols_to_bits(&zero), [0, 0, 0, 0, 0, 0]);
        let frame = SymbolFrame {
            rail_i: vec![7],
            rail_q: vec![4],
            source_bits: vec![1, 0, 0, 1, 1, 0],
        };
        assert_eq!(symbols_to_bits(&frame), [1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn bit_round_trip_is_exact_over_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10_000 {
            let n = 6 * rng.gen_range(1..20);
            let bits = random_bits(&mut rng, n);
            let frame = bits_to_symbols(&bits).unwrap();
            assert_eq!(symbols_to_bits(&frame), bits);
            assert_eq!(frame.source_bits, bits);
            assert_eq!(frame.source_bits.len(), 6 * frame.num_symbols());
        }
    }

    #[test]
    fn ragged_or_non_binary_bits_are_rejected() {
        match bits_to_symbols(&[0, 1, 0]) {
            Err(Error::Framing { detail }) => assert!(detail.contains("multiple of 6")),
            other => panic!("{other:?}"),
        }
        match bits_to_symbols(&[0, 1, 0, 0, 2, 0]) {
            Err(Error::Framing { detail }) => {
                assert!(detail.contains("index 4"), "detail: {detail}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn modulated_samples_follow_backward_iteration() {
        let map = MapParams::new(0.0).unwrap();
        assert_eq!(modulate_rail(&[7], 0.0, &map).unwrap(), [7.0]);
        // Second step (7 + 14)/2 = 10.5: the orbit climbs toward the
        // invariant bound 14 when the outermost symbol repeats.
        assert_eq!(modulate_rail(&[7, 7], 0.0, &map).unwrap(), [7.0, 10.5]);

        let map = MapParams::new(1.0).unwrap();
        assert_eq!(modulate_rail(&[4, 0, 6], 0.0, &map).unwrap(), [1.0, -7.0, 5.0]);
    }

    #[test]
    fn samples_cluster_around_their_symbol_level() {
        // The previous amplitude ranges over the whole invariant interval,
        // so a sample lands within a * bound of its branch centre 2s - 7 —
        // the per-symbol "cloud" whose radius shrinks to 0 as p -> 1.
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for p in [0.0, 0.4, 0.8, 0.99] {
            let map = MapParams::new(p).unwrap();
            let radius = map.contraction() * map.invariant_bound();
            let symbols: Vec<u8> = (0..500).map(|_| rng.gen_range(0..8u8)).collect();
            let rail = modulate_rail(&symbols, 0.0, &map).unwrap();
            for (k, (&x, &s)) in rail.iter().zip(&symbols).enumerate() {
                let center = 2.0 * s as f64 - 7.0;
                assert!(
                    (x - center).abs() <= radius + 1e-12,
                    "p={p} k={k}: sample {x} strays {} from level {center}, cloud radius {radius}",
                    (x - center).abs()
                );
            }
        }
    }

    #[test]
    fn pilot_outside_invariant_interval_is_rejected() {
        let map = MapParams::new(0.0).unwrap();
        match modulate_rail(&[0], 14.5, &map) {
            Err(Error::Parameter { name: "x0", .. }) => {}
            other => panic!("{other:?}"),
        }
        match modulate_rail(&[0], f64::NAN, &map) {
            Err(Error::Parameter { name: "x0", .. }) => {}
            other => panic!("{other:?}"),
        }
        // The bound itself is admissible.
        assert!(modulate_rail(&[0], 14.0, &map).is_ok());
    }

    #[test]
    fn out_of_range_symbol_is_rejected_with_its_index() {
        let map = MapParams::new(0.5).unwrap();
        match modulate_rail(&[3, 8, 0], 0.0, &map) {
            Err(Error::Framing { detail }) => assert!(detail.contains("index 1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn modulate_pairs_independent_rails_and_records_its_inputs() {
        let map = MapParams::new(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let bits = random_bits(&mut rng, 60);
        let sf = bits_to_symbols(&bits).unwrap();
        let frame = modulate(&bits, 0.25, &map).unwrap();
        assert_eq!(frame.len(), 10);
        assert_eq!(frame.x0, 0.25);
        assert_eq!(frame.map_p, 0.3);
        let rail_i = modulate_rail(&sf.rail_i, 0.25, &map).unwrap();
        let rail_q = modulate_rail(&sf.rail_q, 0.25, &map).unwrap();
        for (k, s) in frame.samples.iter().enumerate() {
            assert_eq!(s.i, rail_i[k]);
            assert_eq!(s.q, rail_q[k]);
        }
    }

    #[test]
    fn rail_i_samples_ignore_rail_q_bits() {
        let map = MapParams::new(0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut bits = random_bits(&mut rng, 120);
        let before = modulate(&bits, 0.0, &map).unwrap();
        // Flip every Q bit (positions 3..6 of each 6-bit group).
        for g in 0..bits.len() / 6 {
            for b in 3..6 {
                bits[6 * g + b] ^= 1;
            }
        }
        let after = modulate(&bits, 0.0, &map).unwrap();
        for (x, y) in before.samples.iter().zip(&after.samples) {
            assert_eq!(x.i, y.i, "I rail changed with Q bits");
            assert_ne!(x.q, y.q);
        }
    }

    #[test]
    fn six_zero_bits_at_p1_give_the_corner_point() {
        let map = MapParams::new(1.0).unwrap();
        let frame = modulate(&[0; 6], 0.0, &map).unwrap();
        assert_eq!(frame.samples, [IqSample { i: -7.0, q: -7.0 }]);
    }

    #[test]
    fn p1_frames_sit_exactly_on_the_64_point_lattice() {
        let map = MapParams::new(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..200 {
            let bits = random_bits(&mut rng, 120);
            let frame = modulate(&bits, 0.0, &map).unwrap();
            for s in &frame.samples {
                for v in [s.i, s.q] {
                    assert!(
                        v.abs() <= 7.0 && (v - v.round()).abs() == 0.0 && v.rem_euclid(2.0) == 1.0,
                        "off-lattice amplitude {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn p04_frames_stay_within_the_invariant_bound() {
        let map = MapParams::new(0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let bits = random_bits(&mut rng, 6 * 20_000);
        let frame = modulate(&bits, 0.0, &map).unwrap();
        for s in &frame.samples {
            assert!(s.i.abs() <= 10.0 && s.q.abs() <= 10.0, "{s:?}");
        }
    }

    #[test]
    fn replaying_the_recursion_reproduces_the_frame() {
        let map = MapParams::new(0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let bits = random_bits(&mut rng, 600);
        let sf = bits_to_symbols(&bits).unwrap();
        let frame = modulate(&bits, 0.5, &map).unwrap();
        let mut xi = frame.x0;
        let mut xq = frame.x0;
        for (k, s) in frame.samples.iter().enumerate() {
            xi = map.inverse(xi, sf.rail_i[k]);
            xq = map.inverse(xq, sf.rail_q[k]);
            assert_eq!(s.i, xi, "sample {k}");
            assert_eq!(s.q, xq, "sample {k}");
        }
    }

    #[test]
    fn rail_power_closed_form_values() {
        assert_eq!(rail_power(&MapParams::new(0.0).unwrap()), 28.0);
        assert_eq!(rail_power(&MapParams::new(1.0).unwrap()), 21.0);
        let got = rail_power(&MapParams::new(0.4).unwrap());
        assert!((got - 21.0 / 0.91).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn rail_power_matches_a_long_modulated_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for p in [0.1, 0.5, 1.0] {
            let map = MapParams::new(p).unwrap();
            let symbols: Vec<u8> = (0..200_000).map(|_| rng.gen_range(0..8u8)).collect();
            let rail = modulate_rail(&symbols, 0.0, &map).unwrap();
            let mean = rail.iter().sum::<f64>() / rail.len() as f64;
            let power = rail.iter().map(|x| x * x).sum::<f64>() / rail.len() as f64;
            let want = rail_power(&map);
            assert!(mean.abs() < 0.05, "p={p}: mean {mean}");
            assert!(
                (power / want - 1.0).abs() < 0.01,
                "p={p}: measured {power}, closed form {want}"
            );
        }
    }

    #[test]
    fn pilot_is_forgotten_geometrically() {
        for p in [0.0, 0.3, 0.7, 0.95] {
            let map = MapParams::new(p).unwrap();
            let a = map.contraction();
            let symbols: Vec<u8> = (0..60).map(|k| (k % 8) as u8).collect();
            let from_zero = modulate_rail(&symbols, 0.0, &map).unwrap();
            let bound = map.invariant_bound();
            let from_bound = modulate_rail(&symbols, bound, &map).unwrap();
            for (k, (x, y)) in from_zero.iter().zip(&from_bound).enumerate() {
                let want = a.powi(k as i32 + 1) * bound;
                let got = (x - y).abs();
                assert!(
                    (got - want).abs() <= 1e-12 * want.max(1e-300) + 1e-15,
                    "p={p} k={k}: got {got}, want {want}"
                );
            }
            assert!((from_zero[50] - from_bound[50]).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn modulation_is_deterministic() {
        let map = MapParams::new(0.7).unwrap();
        let bits = [1, 0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0];
        assert_eq!(modulate(&bits, 0.0, &map).unwrap(), modulate(&bits, 0.0, &map).unwrap());
    }
}

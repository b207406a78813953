//! Analytic bit-error-rate models and the waveform-distance parameter
//! `w_min`.
//!
//! Three curves are computed, and the experiment harness emits all of them
//! side by side rather than adjudicating:
//!
//! * [`ber_qam_theory`] — the design's own square-QAM approximation
//!   `2(1 - 1/sqrt(M)) * erfc( sqrt( 3 n Eb / (2 (M-1) N0) ) )`,
//!   parameterized by the per-rail bit count `n` (3 here, not
//!   `log2 M = 6`) and carrying no `1/log2(M)` prefactor. It does not
//!   reduce to the standard bit-error approximation; it is evaluated
//!   verbatim so its gap to simulation stays visible.
//! * [`ber_chaos_theory`] — the same expression with `Eb` scaled by
//!   `w_min`, the minimum waveform distance of the chaotic signal set. The
//!   guard gap between map regions shrinks the worst-case distance between
//!   competing waveforms by `w_min = sqrt((1 + p)/2)` relative to `p = 1`,
//!   acting like a fixed fade.
//! * [`ber_qam_textbook`] — the standard Gray-coded square-QAM bit-error
//!   approximation `(2/log2 M)(1 - 1/sqrt(M)) erfc( sqrt( 3 log2(M) Eb /
//!   (2 (M-1) N0) ) )`, which has independent ground truth: at `p = 1` the
//!   modulator is conventional 64-QAM and simulation must land on this
//!   curve.
//!
//! None of these functions clamp: a low-Eb/N0 evaluation of the first model
//! exceeds 1 by design, and the reporting layer is the place to clamp.

use crate::error::Error;

/// Constellation size: 8 amplitude levels per rail, squared.
pub const M_QAM: u32 = 64;

/// The bits-per-rail-symbol parameter `n` the analytic model is stated
/// with (3 bits select one of 8 regions on each rail).
pub const N_BITS_PER_RAIL: u32 = 3;

// ---------------------------------------------------------------------------
// erfc
// ---------------------------------------------------------------------------

/// Complementary error function, relative error well under 1e-10 across
/// `|x| <= 6` (verified in tests against an independent series/continued-
/// fraction evaluation and high-precision reference values).
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

// ---------------------------------------------------------------------------
// BER models
// ---------------------------------------------------------------------------

fn ebn0_linear(ebn0_db: f64) -> f64 {
    10f64.powf(ebn0_db / 10.0)
}

/// The design's square-QAM approximation, evaluated verbatim and unclamped:
/// `2 (1 - 1/sqrt(M)) erfc( sqrt( 3 n / (2 (M-1)) * Eb/N0 ) )`.
///
/// `M` must be a square power of two and `n >= 1`; with `M = 64`, `n = 3`
/// the zero-SNR limit is 1.75, i.e. deliberately not a probability.
pub fn ber_qam_theory(ebn0_db: f64, m: u32, n: u32) -> f64 {
    let m = m as f64;
    let arg = (3.0 * n as f64 * ebn0_linear(ebn0_db) / (2.0 * (m - 1.0))).sqrt();
    2.0 * (1.0 - 1.0 / m.sqrt()) * erfc(arg)
}

/// [`ber_qam_theory`] with the bit energy scaled by the minimum waveform
/// distance: `Eb -> w_min * Eb` inside the erfc argument. `w_min = 1`
/// reduces it to the unscaled model exactly.
///
/// Fails unless `0 < w_min <= 1`.
pub fn ber_chaos_theory(ebn0_db: f64, m: u32, n: u32, w_min: f64) -> Result<f64, Error> {
    if !(w_min > 0.0 && w_min <= 1.0) {
        return Err(Error::Parameter {
            name: "w_min",
            detail: format!("w_min = {w_min} violates 0 < w_min <= 1"),
        });
    }
    // ebn0_db + 10*log10(w_min) scales Eb by w_min in linear units.
    Ok(ber_qam_theory(ebn0_db + 10.0 * w_min.log10(), m, n))
}

/// Standard Gray-coded square-QAM bit-error approximation:
/// `(2/log2 M)(1 - 1/sqrt(M)) erfc( sqrt( 3 log2(M) / (2 (M-1)) * Eb/N0 ) )`.
///
/// This is the independent reference the `p = 1` simulation must match.
pub fn ber_qam_textbook(ebn0_db: f64, m: u32) -> f64 {
    let bits = (m as f64).log2();
    let m = m as f64;
    let arg = (3.0 * bits * ebn0_linear(ebn0_db) / (2.0 * (m - 1.0))).sqrt();
    (2.0 / bits) * (1.0 - 1.0 / m.sqrt()) * erfc(arg)
}

// ---------------------------------------------------------------------------
// w_min
// ---------------------------------------------------------------------------

/// Closed form of the minimum waveform distance parameter:
/// `w_min = sqrt((1 + p)/2)`. Monotone in the guard gap; exactly 1 at
/// `p = 1` (no distance loss relative to conventional QAM) and
/// `sqrt(1/2)` at `p = 0`.
pub fn w_min_closed_form(p: f64) -> f64 {
    ((1.0 + p) / 2.0).sqrt()
}

/// Maximum-likelihood estimate of `w_min` from observed per-step waveform
/// distances: `sqrt( (1/(2K)) * sum d[k]^2 )`.
///
/// Fails on an empty sequence or any negative/non-finite distance.
pub fn w_min_ml_estimate(distances: &[f64]) -> Result<f64, Error> {
    if distances.is_empty() {
        return Err(Error::Parameter {
            name: "distances",
            detail: "cannot estimate w_min from an empty distance sequence".into(),
        });
    }
    if let Some(k) = distances.iter().position(|d| *d < 0.0 || !d.is_finite()) {
        return Err(Error::Parameter {
            name: "distances",
            detail: format!("distance {} at index {k} is not a nonnegative real", distances[k]),
        });
    }
    let sum_sq: f64 = distances.iter().map(|d| d * d).sum();
    Ok((sum_sq / (2.0 * distances.len() as f64)).sqrt())
}

// ---------------------------------------------------------------------------
// TheoryPoint
// ---------------------------------------------------------------------------

/// All three analytic values at one `(Eb/N0, p)` coordinate, with the
/// parameters that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryPoint {
    pub ebn0_db: f64,
    pub m: u32,
    pub n: u32,
    pub p: f64,
    pub w_min: f64,
    pub ber_qam: f64,
    pub ber_chaos: f64,
    pub ber_textbook: f64,
}

impl TheoryPoint {
    /// Evaluates the `M = 64`, `n = 3` system at one grid coordinate, with
    /// `w_min` from its closed form.
    pub fn evaluate(ebn0_db: f64, p: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter {
                name: "p",
                detail: format!("p = {p} violates 0 <= p <= 1"),
            });
        }
        let w_min = w_min_closed_form(p);
        Ok(TheoryPoint {
            ebn0_db,
            m: M_QAM,
            n: N_BITS_PER_RAIL,
            p,
            w_min,
            ber_qam: ber_qam_theory(ebn0_db, M_QAM, N_BITS_PER_RAIL),
            ber_chaos: ber_chaos_theory(ebn0_db, M_QAM, N_BITS_PER_RAIL, w_min)?,
            ber_textbook: ber_qam_textbook(ebn0_db, M_QAM),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // -- An independent erfc oracle: Maclaurin series for small arguments,
    //    Lentz-evaluated continued fraction for large, reflection for
    //    negative. Shares no code or method with the implementation above.

    fn oracle_erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            let nf = n as f64;
            term *= -x * x / nf;
            let add = term / (2.0 * nf + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    fn oracle_erfc_cf(x: f64) -> f64 {
        // erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + (2/2)/(x + ...))),
        // evaluated bottom-up from a deep truncation.
        let mut f = x;
        for n in (1..=200u32).rev() {
            f = x + (n as f64 / 2.0) / f;
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / f
    }

    fn oracle_erfc(x: f64) -> f64 {
        if x < 0.0 {
            2.0 - oracle_erfc(-x)
        } else if x < 2.0 {
            1.0 - oracle_erf_series(x)
        } else {
            oracle_erfc_cf(x)
        }
    }

    #[test]
    fn erfc_matches_the_independent_oracle_to_1e10() {
        let mut x = -6.0;
        while x <= 6.0 {
            let got = erfc(x);
            let want = oracle_erfc(x);
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-10, "x = {x}: got {got}, oracle {want}, rel {rel}");
            x += 0.03125;
        }
    }

    #[test]
    fn erfc_reference_values() {
        assert_eq!(erfc(0.0), 1.0);
        let cases = [
            (0.5, 0.4795001221869535),
            (1.0, 0.15729920705028516),
            (2.0, 0.004677734981047266),
            (3.0, 2.2090496998585445e-05),
            (4.5, 1.9661604415428878e-10),
            (6.0, 2.1519736712498913e-17),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!(((got - want) / want).abs() < 1e-12, "erfc({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn erfc_reflection_identity() {
        let mut x: f64 = 0.0;
        while x <= 6.0 {
            assert!((erfc(-x) - (2.0 - erfc(x))).abs() < 1e-13, "x = {x}");
            x += 0.17;
        }
    }

    #[test]
    fn qam_model_reference_values() {
        // 10 dB, M = 64, n = 3: argument sqrt(90/126).
        let want_arg = (90.0f64 / 126.0).sqrt();
        assert!((want_arg - 0.8451542547285166).abs() < 1e-15);
        let got = ber_qam_theory(10.0, 64, 3);
        let want = 0.4059960163502846;
        assert!(((got - want) / want).abs() < 1e-12, "got {got}");
        assert!((got - 1.75 * erfc(want_arg)).abs() < 1e-15);
    }

    #[test]
    fn qam_model_zero_snr_limit_exceeds_one() {
        let got = ber_qam_theory(-400.0, 64, 3);
        assert!((got - 1.75).abs() < 1e-9, "limit is 2(1 - 1/8) = 1.75, got {got}");
    }

    #[test]
    fn qam_model_is_monotone_decreasing() {
        // Stop at 30 dB: beyond that erfc underflows to exactly 0.0 in f64,
        // where strict decrease is no longer meaningful.
        let mut prev = f64::INFINITY;
        for k in 0..=40 {
            let ber = ber_qam_theory(-10.0 + k as f64, 64, 3);
            assert!(ber > 0.0, "model underflowed at {} dB", -10.0 + k as f64);
            assert!(ber < prev, "not decreasing at {} dB", -10.0 + k as f64);
            prev = ber;
        }
    }

    #[test]
    fn chaos_model_reduces_to_qam_model_at_w1() {
        for db in [0.0, 4.0, 8.0, 12.0, 16.0] {
            let a = ber_chaos_theory(db, 64, 3, 1.0).unwrap();
            let b = ber_qam_theory(db, 64, 3);
            assert!((a - b).abs() <= 1e-15, "db = {db}: {a} vs {b}");
        }
    }

    #[test]
    fn chaos_model_reference_value() {
        let got = ber_chaos_theory(12.0, 64, 3, 0.55).unwrap();
        let want = 0.4628000827611082;
        assert!(((got - want) / want).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn smaller_w_min_means_higher_ber() {
        let mut prev = 0.0;
        for w in [1.0, 0.9, 0.8, 0.7, 0.6] {
            let ber = ber_chaos_theory(12.0, 64, 3, w).unwrap();
            assert!(ber > prev, "w = {w}");
            prev = ber;
        }
    }

    #[test]
    fn w_min_bounds_are_enforced() {
        for bad in [0.0, -0.5, 1.01, f64::NAN] {
            match ber_chaos_theory(10.0, 64, 3, bad) {
                Err(Error::Parameter { name: "w_min", .. }) => {}
                other => panic!("w_min = {bad} accepted: {other:?}"),
            }
        }
    }

    #[test]
    fn textbook_reference_values() {
        let cases = [
            (10.0, 0.02653260982614602),
            (12.0, 0.009723985039970602),
            (14.0, 0.0021540037571798924),
            (16.0, 0.0002171739591594197),
        ];
        for (db, want) in cases {
            let got = ber_qam_textbook(db, 64);
            assert!(((got - want) / want).abs() < 1e-12, "{db} dB: got {got}");
        }
    }

    #[test]
    fn textbook_curve_sits_far_below_the_n3_model() {
        for db in [6.0, 10.0, 14.0] {
            assert!(ber_qam_textbook(db, 64) < ber_qam_theory(db, 64, 3) / 5.0);
        }
    }

    #[test]
    fn w_min_closed_form_values() {
        assert_eq!(w_min_closed_form(1.0), 1.0);
        assert!((w_min_closed_form(0.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((w_min_closed_form(0.5) - 0.8660254037844386).abs() < 1e-15);
    }

    #[test]
    fn ml_estimate_examples() {
        assert_eq!(w_min_ml_estimate(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((w_min_ml_estimate(&[2.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ml_estimate_on_constant_distances_recovers_the_closed_form() {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let d = (1.0 + p).sqrt();
            let distances = vec![d; 10_000];
            let got = w_min_ml_estimate(&distances).unwrap();
            let want = w_min_closed_form(p);
            assert!((got - want).abs() < 1e-12, "p = {p}: {got} vs {want}");
        }
    }

    #[test]
    fn ml_estimate_rejects_bad_inputs() {
        assert!(matches!(
            w_min_ml_estimate(&[]),
            Err(Error::Parameter { name: "distances", .. })
        ));
        assert!(matches!(
            w_min_ml_estimate(&[1.0, -0.1]),
            Err(Error::Parameter { name: "distances", .. })
        ));
        assert!(matches!(
            w_min_ml_estimate(&[f64::NAN]),
            Err(Error::Parameter { name: "distances", .. })
        ));
    }

    #[test]
    fn theory_point_bundles_consistent_values() {
        let pt = TheoryPoint::evaluate(12.0, 0.1).unwrap();
        assert_eq!(pt.m, 64);
        assert_eq!(pt.n, 3);
        assert_eq!(pt.w_min, w_min_closed_form(0.1));
        assert_eq!(pt.ber_qam, ber_qam_theory(12.0, 64, 3));
        assert_eq!(pt.ber_textbook, ber_qam_textbook(12.0, 64));
        // With w_min < 1 the distance-scaled curve is the worse one.
        assert!(pt.ber_chaos > pt.ber_qam);
        assert!(matches!(
            TheoryPoint::evaluate(12.0, 1.2),
            Err(Error::Parameter { name: "p", .. })
        ));
    }
}

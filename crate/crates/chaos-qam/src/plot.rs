//! Self-contained SVG rendering of BER sweeps: simulated points with 95%
//! error bars per `p`, the distance-scaled model per `p`, and the two
//! `p`-independent reference curves, on a log BER axis.
//!
//! No external assets, scripts, or fonts — the output is one standalone
//! vector file suitable for embedding or opening directly.

use std::fmt::Write as _;

use crate::analysis::{
    ber_chaos_theory, ber_qam_textbook, ber_qam_theory, w_min_closed_form, M_QAM,
    N_BITS_PER_RAIL,
};
use crate::error::Error;
use crate::harness::BerRecord;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 230.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 64.0;

/// Axis mapping shared by every drawing helper.
struct Axes {
    db_min: f64,
    db_max: f64,
    /// Decade exponents: y spans `10^log_min ..= 10^log_max`.
    log_min: i32,
    log_max: i32,
}

impl Axes {
    fn x(&self, db: f64) -> f64 {
        let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + (db - self.db_min) / (self.db_max - self.db_min) * w
    }

    fn y(&self, ber: f64) -> f64 {
        let h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let span = (self.log_max - self.log_min) as f64;
        let clamped = ber.max(10f64.powi(self.log_min));
        MARGIN_TOP + (self.log_max as f64 - clamped.log10()) / span * h
    }

    fn floor(&self) -> f64 {
        10f64.powi(self.log_min)
    }
}

/// Renders a full experiment as one SVG document.
///
/// Zero-error points cannot be placed on a log axis and are omitted from
/// the scatter (their curve segment is skipped, not drawn at the floor).
pub fn ber_plot_svg(records: &[BerRecord]) -> Result<String, Error> {
    if records.is_empty() {
        return Err(Error::Parameter {
            name: "records",
            detail: "cannot plot an empty record set".into(),
        });
    }

    // Distinct p values in ascending order drive colors and legend rows.
    let mut p_values: Vec<f64> = records.iter().map(|r| r.p).collect();
    p_values.sort_by(|a, b| a.partial_cmp(b).expect("record p is never NaN"));
    p_values.dedup();

    let db_min = records.iter().map(|r| r.ebn0_db).fold(f64::INFINITY, f64::min);
    let db_max = records.iter().map(|r| r.ebn0_db).fold(f64::NEG_INFINITY, f64::max);
    let (db_min, db_max) =
        if db_min == db_max { (db_min - 1.0, db_max + 1.0) } else { (db_min, db_max) };

    // Lowest positive value on display fixes the bottom decade.
    let mut min_pos = f64::INFINITY;
    for r in records {
        for v in [
            r.ber_estimate,
            r.ber_estimate - r.ci95_halfwidth,
            r.theory_eq12,
            r.theory_eq13,
            r.theory_textbook,
        ] {
            if v > 0.0 {
                min_pos = min_pos.min(v);
            }
        }
    }
    let log_min = if min_pos.is_finite() {
        (min_pos.log10().floor() as i32).clamp(-8, -1)
    } else {
        -4
    };
    let axes = Axes { db_min, db_max, log_min, log_max: 0 };

    let mut svg = String::new();
    let _ = write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"##
    );
    let _ = write!(svg, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"##);
    let _ = write!(
        svg,
        r##"<text x="{}" y="24" font-size="17" text-anchor="middle">Bit error rate vs Eb/N0</text>"##,
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0
    );

    draw_grid(&mut svg, &axes, records);

    // p-independent reference curves, drawn once.
    draw_curve(&mut svg, &axes, "#888888", "6 3", &|db| ber_qam_theory(db, M_QAM, N_BITS_PER_RAIL));
    draw_curve(&mut svg, &axes, "#111111", "2 3", &|db| ber_qam_textbook(db, M_QAM));

    // Per-p: distance-scaled model plus the simulated points.
    for (idx, &p) in p_values.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let w = w_min_closed_form(p);
        draw_curve(&mut svg, &axes, color, "9 4", &|db| {
            ber_chaos_theory(db, M_QAM, N_BITS_PER_RAIL, w)
                .expect("closed-form w_min is always in (0, 1]")
        });
        draw_simulation(&mut svg, &axes, color, p, records);
    }

    draw_legend(&mut svg, &p_values);
    svg.push_str("</svg>");
    Ok(svg)
}

fn draw_grid(svg: &mut String, axes: &Axes, records: &[BerRecord]) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = MARGIN_TOP;
    let y1 = HEIGHT - MARGIN_BOTTOM;

    // Decade lines and labels.
    for e in axes.log_min..=axes.log_max {
        let y = axes.y(10f64.powi(e));
        let _ = write!(
            svg,
            r##"<line x1="{x0}" y1="{y:.1}" x2="{x1}" y2="{y:.1}" stroke="#dddddd"/>"##
        );
        let _ = write!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">1e{e}</text>"##,
            x0 - 8.0,
            y + 4.0
        );
    }
    // One x tick per distinct grid coordinate.
    let mut dbs: Vec<f64> = records.iter().map(|r| r.ebn0_db).collect();
    dbs.sort_by(|a, b| a.partial_cmp(b).expect("record ebn0 is never NaN"));
    dbs.dedup();
    for &db in &dbs {
        let x = axes.x(db);
        let _ = write!(
            svg,
            r##"<line x1="{x:.1}" y1="{y1}" x2="{x:.1}" y2="{}" stroke="#dddddd"/>"##,
            y0
        );
        let _ = write!(
            svg,
            r##"<text x="{x:.1}" y="{:.1}" font-size="12" text-anchor="middle">{db}</text>"##,
            y1 + 18.0
        );
    }
    // Axis frame and titles.
    let _ = write!(
        svg,
        r##"<rect x="{x0}" y="{y0}" width="{:.1}" height="{:.1}" fill="none" stroke="#333333"/>"##,
        x1 - x0,
        y1 - y0
    );
    let _ = write!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">Eb/N0 (dB)</text>"##,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0
    );
    let _ = write!(
        svg,
        r##"<text x="22" y="{:.1}" font-size="14" text-anchor="middle" transform="rotate(-90 22 {:.1})">BER</text>"##,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

/// Samples an analytic curve densely across the x range, clamped like the
/// reported columns, clipped at the bottom decade.
fn draw_curve(svg: &mut String, axes: &Axes, color: &str, dash: &str, f: &dyn Fn(f64) -> f64) {
    let mut points = String::new();
    let steps = 160;
    for k in 0..=steps {
        let db = axes.db_min + (axes.db_max - axes.db_min) * k as f64 / steps as f64;
        let v = f(db).clamp(0.0, 1.0);
        if v < axes.floor() {
            continue;
        }
        let _ = write!(points, "{:.1},{:.1} ", axes.x(db), axes.y(v));
    }
    let _ = write!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.3" stroke-dasharray="{dash}"/>"##,
        points.trim_end()
    );
}

/// Simulated estimates for one p: connecting line, circular markers, and
/// 95% error bars, all clipped to the positive plot area.
fn draw_simulation(svg: &mut String, axes: &Axes, color: &str, p: f64, records: &[BerRecord]) {
    let mut line = String::new();
    for r in records.iter().filter(|r| r.p == p) {
        if r.ber_estimate <= 0.0 {
            continue; // zero errors: nothing to place on a log axis
        }
        let x = axes.x(r.ebn0_db);
        let y = axes.y(r.ber_estimate);
        let _ = write!(line, "{x:.1},{y:.1} ");

        let lo = (r.ber_estimate - r.ci95_halfwidth).max(axes.floor());
        let hi = (r.ber_estimate + r.ci95_halfwidth).min(1.0);
        let (y_lo, y_hi) = (axes.y(lo), axes.y(hi));
        let _ = write!(
            svg,
            r##"<line x1="{x:.1}" y1="{y_lo:.1}" x2="{x:.1}" y2="{y_hi:.1}" stroke="{color}" stroke-width="1"/>"##
        );
        for cap in [y_lo, y_hi] {
            let _ = write!(
                svg,
                r##"<line x1="{:.1}" y1="{cap:.1}" x2="{:.1}" y2="{cap:.1}" stroke="{color}" stroke-width="1"/>"##,
                x - 3.5,
                x + 3.5
            );
        }
        let _ = write!(svg, r##"<circle cx="{x:.1}" cy="{y:.1}" r="3.2" fill="{color}"/>"##);
    }
    let _ = write!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"##,
        line.trim_end()
    );
}

fn draw_legend(svg: &mut String, p_values: &[f64]) {
    let x = WIDTH - MARGIN_RIGHT + 16.0;
    let mut y = MARGIN_TOP + 8.0;
    let mut entry = |svg: &mut String, color: &str, dash: &str, marker: bool, label: &str| {
        let _ = write!(
            svg,
            r##"<line x1="{x}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="1.6"{}/>"##,
            x + 30.0,
            if dash.is_empty() { String::new() } else { format!(r##" stroke-dasharray="{dash}""##) }
        );
        if marker {
            let _ = write!(
                svg,
                r##"<circle cx="{:.1}" cy="{y:.1}" r="3.2" fill="{color}"/>"##,
                x + 15.0
            );
        }
        let _ = write!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="12">{label}</text>"##,
            x + 38.0,
            y + 4.0
        );
        y += 20.0;
    };
    for (idx, &p) in p_values.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        entry(svg, color, "", true, &format!("simulation, p = {p}"));
        entry(svg, color, "9 4", false, &format!("distance-scaled model, p = {p}"));
    }
    entry(svg, "#888888", "6 3", false, "square-QAM model (n = 3)");
    entry(svg, "#111111", "2 3", false, "textbook Gray 64-QAM");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_record(p: f64, db: f64, ber: f64) -> BerRecord {
        BerRecord {
            p,
            ebn0_db: db,
            bits_simulated: 1_000_000,
            bit_errors: (ber * 1e6) as u64,
            ber_estimate: ber,
            ci95_halfwidth: 1.96 * (ber * (1.0 - ber) / 1e6).sqrt(),
            theory_eq12: ber_qam_theory(db, 64, 3).clamp(0.0, 1.0),
            theory_eq13: ber_chaos_theory(db, 64, 3, w_min_closed_form(p))
                .unwrap()
                .clamp(0.0, 1.0),
            theory_textbook: ber_qam_textbook(db, 64),
        }
    }

    fn sample_records() -> Vec<BerRecord> {
        let mut out = Vec::new();
        for &p in &[0.5, 1.0] {
            for (db, ber) in [(8.0, 3e-2), (12.0, 4e-3), (16.0, 2e-4)] {
                out.push(fake_record(p, db, ber));
            }
        }
        out
    }

    #[test]
    fn renders_a_complete_document() {
        let svg = ber_plot_svg(&sample_records()).unwrap();
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>"));
        assert!(svg.contains("Eb/N0 (dB)"));
        assert!(svg.contains("BER"));
        assert!(!svg.contains("NaN"), "unmapped coordinate leaked into the SVG");
        assert!(!svg.contains("inf"));
    }

    #[test]
    fn one_marker_per_positive_simulated_point_plus_legend() {
        let records = sample_records();
        let svg = ber_plot_svg(&records).unwrap();
        let circles = svg.matches("<circle").count();
        // 6 data markers + one legend marker per p value.
        assert_eq!(circles, 6 + 2);
        assert!(svg.contains("simulation, p = 0.5"));
        assert!(svg.contains("simulation, p = 1"));
        assert!(svg.contains("textbook Gray 64-QAM"));
    }

    #[test]
    fn zero_error_points_are_omitted_not_plotted_at_the_floor() {
        let mut records = sample_records();
        records[2].ber_estimate = 0.0;
        records[2].bit_errors = 0;
        records[2].ci95_halfwidth = 0.0;
        let svg = ber_plot_svg(&records).unwrap();
        assert_eq!(svg.matches("<circle").count(), 5 + 2);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(
            ber_plot_svg(&[]),
            Err(Error::Parameter { name: "records", .. })
        ));
    }

    #[test]
    fn single_point_experiments_still_render() {
        let svg = ber_plot_svg(&[fake_record(0.1, 10.0, 1e-2)]).unwrap();
        assert!(svg.contains("<circle"));
        assert!(!svg.contains("NaN"));
    }
}

//! CSV traces, SVG convergence plots and the steady-state summary table.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{MsdCurve, SteadyStateSummary};
use crate::filter::Variant;

pub const CSV_HEADER: &str = "algorithm,sr_numerator,sr_denominator,iteration,msd";

/// Smallest MSD fed to the logarithm.
pub const DB_FLOOR: f64 = 1e-300;

/// Writes one row per (curve, iteration), ordered by algorithm, sparsity and
/// iteration. Iterations count updates, starting at 1. Values carry 17
/// significant digits so they parse back to the identical `f64`.
pub fn emit_csv(curves: &[MsdCurve], out: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    write_csv(curves, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(curves: &[MsdCurve], w: &mut W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for curve in sorted(curves) {
        let name = curve.variant.name();
        for (k, v) in curve.values.iter().enumerate() {
            writeln!(w, "{name},{},{},{},{v:.16e}", curve.sparsity, curve.n_taps, k + 1)?;
        }
    }
    Ok(())
}

fn sorted(curves: &[MsdCurve]) -> Vec<&MsdCurve> {
    let mut v: Vec<&MsdCurve> = curves.iter().collect();
    v.sort_by_key(|c| (c.variant, c.sparsity, c.n_taps));
    v
}

pub fn to_db(msd: f64) -> f64 {
    10.0 * msd.max(DB_FLOOR).log10()
}

const PANEL_W: f64 = 460.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 44.0;
const LEGEND_H: f64 = 40.0;

fn color(v: Variant) -> &'static str {
    match v {
        Variant::Lms => "#1f77b4",
        Variant::Llms => "#2ca02c",
        Variant::LpLikeLms => "#ff7f0e",
        Variant::LpLikeLlms => "#d62728",
    }
}

/// Writes a standalone SVG with one panel per sparsity level (two panels per
/// row) and one polyline per curve, one vertex per iteration.
pub fn emit_plot(curves: &[MsdCurve], out: &Path, db_scale: bool) -> Result<()> {
    let svg = render_plot(curves, db_scale)?;
    std::fs::write(out, svg)?;
    Ok(())
}

pub fn render_plot(curves: &[MsdCurve], db_scale: bool) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::Parameter("cannot plot an empty set of curves".into()));
    }
    let curves = sorted(curves);
    let levels: BTreeSet<(usize, usize)> = curves.iter().map(|c| (c.sparsity, c.n_taps)).collect();
    let variants: BTreeSet<Variant> = curves.iter().map(|c| c.variant).collect();
    let cols = if levels.len() == 1 { 1 } else { 2 };
    let rows = levels.len().div_ceil(cols);
    let width = cols as f64 * PANEL_W;
    let height = LEGEND_H + rows as f64 * PANEL_H;
    let transform = |v: f64| if db_scale { to_db(v) } else { v };
    let y_label = if db_scale { "MSD (dB)" } else { "MSD" };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, v) in variants.iter().enumerate() {
        let x = 20.0 + i as f64 * 150.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="20" x2="{}" y2="20" stroke="{}" stroke-width="2"/><text x="{}" y="24" data-algorithm="{}">{}</text>"#,
            x + 24.0,
            color(*v),
            x + 30.0,
            v.name(),
            v.label()
        );
    }
    let _ = writeln!(s, "</g>");

    for (idx, &(sparsity, n_taps)) in levels.iter().enumerate() {
        let panel: Vec<&&MsdCurve> = curves
            .iter()
            .filter(|c| c.sparsity == sparsity && c.n_taps == n_taps)
            .collect();
        let (mut lo, mut hi) = panel
            .iter()
            .flat_map(|c| c.values.iter().map(|&v| transform(v)))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi - lo <= 0.0 {
            let pad = if lo.abs() > 0.0 { lo.abs() * 0.1 } else { 1.0 };
            lo -= pad;
            hi += pad;
        } else {
            let pad = (hi - lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
        let max_len = panel.iter().map(|c| c.len()).max().unwrap_or(0);

        let ox = (idx % cols) as f64 * PANEL_W;
        let oy = LEGEND_H + (idx / cols) as f64 * PANEL_H;
        let (left, top) = (MARGIN_L, MARGIN_T);
        let (pw, ph) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);

        let _ = writeln!(
            s,
            r#"<g class="subplot" data-sr="{sparsity}/{n_taps}" data-ymin="{lo:e}" data-ymax="{hi:e}" data-plot-top="{top}" data-plot-height="{ph}" transform="translate({ox},{oy})">"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" text-anchor="middle" font-weight="bold">SR = {sparsity}/{n_taps}</text>"#,
            left + pw / 2.0
        );
        let _ = writeln!(
            s,
            r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 4.0,
            top + 4.0,
            tick(hi)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 4.0,
            top + ph,
            tick(lo)
        );
        let _ = writeln!(
            s,
            r#"<text x="{left}" y="{}" text-anchor="middle">0</text>"#,
            top + ph + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{max_len}</text>"#,
            left + pw,
            top + ph + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">iteration</text>"#,
            left + pw / 2.0,
            top + ph + 34.0
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
            top + ph / 2.0,
            top + ph / 2.0
        );

        let x_span = max_len.saturating_sub(1).max(1) as f64;
        for c in panel {
            let mut points = String::with_capacity(c.len() * 16);
            for (k, &v) in c.values.iter().enumerate() {
                let x = left + k as f64 / x_span * pw;
                let y = top + (hi - transform(v)) / (hi - lo) * ph;
                if k > 0 {
                    points.push(' ');
                }
                let _ = write!(points, "{x:.2},{y:.2}");
            }
            let _ = writeln!(
                s,
                r#"<polyline class="curve" data-algorithm="{}" fill="none" stroke="{}" stroke-width="1" points="{points}"/>"#,
                c.variant.name(),
                color(c.variant)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e-2 && v.abs() < 1e4 {
        format!("{v:.2}")
    } else {
        format!("{v:.2e}")
    }
}

/// Fixed-width table: algorithm, SR, mean MSD, its dB value and standard error.
pub fn format_summary(rows: &[SteadyStateSummary]) -> String {
    let mut s = format!(
        "{:<14} {:>7} {:>14} {:>10} {:>12}\n",
        "algorithm", "sr", "mean_msd", "mean_db", "std_error"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<14} {:>7} {:>14.6e} {:>10.3} {:>12.4e}",
            r.variant.name(),
            format!("{}/{}", r.sparsity, r.n_taps),
            r.mean,
            to_db(r.mean),
            r.std_error
        );
    }
    s
}

//! CSV, metadata and SVG rendering. Everything here is a pure function of
//! its inputs so that reruns produce identical bytes.

use std::fmt::Write;

use jsrkit_core::bounds::{BoundsReport, RateFit};
use serde_json::{json, Value};

pub const BOUNDS_HEADER: &str =
    "n,rho_plus_n,rho_minus_n,best_lower,best_upper,gap,argmax_word_plus,argmax_word_minus";

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn bounds_csv(report: &BoundsReport) -> String {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            num(r.rho_plus),
            num(r.rho_minus),
            num(r.best_lower),
            num(r.best_upper),
            num(r.gap),
            r.argmax_plus,
            r.argmax_minus
        )
        .unwrap();
    }
    out
}

/// Plain CSV from a header and pre-formatted cells.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn rate_json(fit: Option<&RateFit>) -> Value {
    match fit {
        None => Value::Null,
        Some(RateFit::ExactConvergence) => json!({ "kind": "exact" }),
        Some(RateFit::Power { r_hat, r_squared }) => {
            json!({ "kind": "power", "r_hat": r_hat, "r_squared": r_squared })
        }
    }
}

/// Non-finite values become strings so that the JSON stays valid.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// Log-log plot of gap against n. Rows with a zero gap are skipped.
pub fn gap_svg(points: &[(usize, f64)]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const PAD: f64 = 48.0;
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0 && p.1.is_finite())
        .map(|&(n, g)| ((n as f64).ln(), g.ln()))
        .collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    );
    writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>").unwrap();
    writeln!(
        svg,
        "<line x1=\"{PAD}\" y1=\"{y}\" x2=\"{x}\" y2=\"{y}\" stroke=\"black\"/>\
         <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{y}\" stroke=\"black\"/>",
        x = W - PAD,
        y = H - PAD
    )
    .unwrap();
    writeln!(svg, "<text x=\"{}\" y=\"{}\" font-size=\"12\">log n</text>", W / 2.0, H - 12.0).unwrap();
    writeln!(svg, "<text x=\"8\" y=\"{}\" font-size=\"12\">log gap</text>", PAD - 12.0).unwrap();
    if !pts.is_empty() {
        let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
        let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0).max(1e-12) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0).max(1e-12) * (H - 2.0 * PAD);
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>",
            path.join(" ")
        )
        .unwrap();
        for &(x, y) in &pts {
            writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>", sx(x), sy(y)).unwrap();
        }
    }
    svg.push_str("</svg>\n");
    svg
}

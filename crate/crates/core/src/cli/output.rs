//! CSV, JSON and SVG emission.
//!
//! `function.csv` has columns `x,y,slope_after`: the first row is the left
//! tail (`x = -inf`, `y` its limit, `slope_after` the left tail slope), then
//! one row per breakpoint with the slope on its right.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::pl::PLFunction;
use crate::scalar::{format_rational, to_f64, Rational};
use crate::solver::{GridSolution, RefinementLevel};

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

fn tail_limit(slope: &Rational, at: &Rational, toward_minus: bool) -> String {
    use num_traits::Signed;
    let grows = if toward_minus {
        slope.is_negative()
    } else {
        slope.is_positive()
    };
    let falls = if toward_minus {
        slope.is_positive()
    } else {
        slope.is_negative()
    };
    if grows {
        "+inf".into()
    } else if falls {
        "-inf".into()
    } else {
        format_rational(at)
    }
}

pub fn function_csv(f: &PLFunction) -> io::Result<Vec<u8>> {
    let pts = f.breakpoints();
    let first = vec![
        "-inf".to_string(),
        tail_limit(f.slope_left(), &pts[0].1, true),
        format_rational(f.slope_left()),
    ];
    let slopes = f.all_slopes();
    let rows = pts
        .iter()
        .zip(slopes.iter().skip(1))
        .map(|((x, y), s)| vec![format_rational(x), format_rational(y), format_rational(s)]);
    csv_bytes(
        &["x", "y", "slope_after"],
        std::iter::once(first).chain(rows),
    )
}

pub fn table_csv(header: &[&str], rows: Vec<Vec<String>>) -> io::Result<Vec<u8>> {
    csv_bytes(header, rows)
}

pub fn solution_csv(sol: &GridSolution) -> io::Result<Vec<u8>> {
    let rows = sol.frames.iter().enumerate().flat_map(|(n, frame)| {
        let t = sol.time(n);
        frame
            .iter()
            .enumerate()
            .map(move |(j, u)| vec![t.to_string(), sol.config.x(j).to_string(), u.to_string()])
    });
    csv_bytes(&["t", "x", "u"], rows)
}

pub fn refine_csv(levels: &[RefinementLevel]) -> io::Result<Vec<u8>> {
    csv_bytes(
        &["dx", "sup_diff"],
        levels
            .iter()
            .map(|l| vec![l.dx.to_string(), l.sup_diff.to_string()]),
    )
}

/// The JSON form accepted by the spec reader.
pub fn pl_json(f: &PLFunction) -> serde_json::Value {
    serde_json::json!({
        "breakpoints": f
            .breakpoints()
            .iter()
            .map(|(x, y)| [format_rational(x), format_rational(y)])
            .collect::<Vec<_>>(),
        "slope_left": format_rational(f.slope_left()),
        "slope_right": format_rational(f.slope_right()),
    })
}

/// A curve to draw: the function, its stroke colour, width and dash pattern.
pub struct Curve<'a> {
    pub label: &'a str,
    pub f: &'a PLFunction,
    pub color: &'a str,
    pub width: f64,
    pub dash: Option<&'a str>,
}

/// Overlays PL functions on a shared frame one unit wider than their breakpoints.
pub fn plot_svg(curves: &[Curve<'_>]) -> String {
    let (w, h, pad) = (640.0, 420.0, 40.0);
    let xs: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.f.abscissas().map(to_f64))
        .collect();
    let x0 = xs.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let x1 = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    // Sample at every breakpoint inside the window plus the window ends.
    let samples = |f: &PLFunction| -> Vec<(f64, f64)> {
        let fl = crate::solver::FloatPL::from(f);
        let mut pts: Vec<f64> = f
            .abscissas()
            .map(to_f64)
            .filter(|x| *x > x0 && *x < x1)
            .collect();
        pts.insert(0, x0);
        pts.push(x1);
        pts.into_iter().map(|x| (x, fl.eval(x))).collect()
    };
    let paths: Vec<Vec<(f64, f64)>> = curves.iter().map(|c| samples(c.f)).collect();
    let ys = paths.iter().flatten().map(|p| p.1);
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
        (a.min(y), b.max(y))
    });
    let (y0, y1) = if y1 > y0 {
        (y0, y1)
    } else {
        (y0 - 1.0, y1 + 1.0)
    };
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if x0 < 0.0 && x1 > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="#bbb"/>"##,
            sx(0.0),
            pad,
            h - pad
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{1}" y1="{0:.2}" x2="{2}" y2="{0:.2}" stroke="#bbb"/>"##,
            sy(0.0),
            pad,
            w - pad
        );
    }
    for (k, (c, pts)) in curves.iter().zip(&paths).enumerate() {
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, (x, y))| {
                format!(
                    "{}{:.2},{:.2}",
                    if i == 0 { "M" } else { "L" },
                    sx(*x),
                    sy(*y)
                )
            })
            .collect();
        let dash = c
            .dash
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="{}"{dash}/>"#,
            d.join(" "),
            c.color,
            c.width
        );
        let ly = pad + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
            w - pad - 120.0,
            c.color,
            c.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

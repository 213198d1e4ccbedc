//! CSV tables and static SVG plots.

use std::fmt::Write as _;

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Comma-separated table with a header row and LF line endings.
pub fn csv(columns: &[(&str, &[f64])]) -> String {
    let rows = columns.first().map_or(0, |(_, c)| c.len());
    let mut out = String::new();
    let header: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        for (k, (_, col)) in columns.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(col[i]));
        }
        out.push('\n');
    }
    out
}

pub struct Series<'a> {
    pub label: &'a str,
    pub values: Vec<f64>,
    pub color: &'a str,
    pub dashed: bool,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Line plot of several series over a common abscissa.
pub fn svg_plot(title: &str, x: &[f64], series: &[Series<'_>]) -> String {
    let (xmin, xmax) = bounds(x.iter().copied());
    let (mut ymin, mut ymax) = bounds(series.iter().flat_map(|s| s.values.iter().copied()));
    if ymax - ymin < 1e-300 {
        ymin -= 1.0;
        ymax += 1.0;
    }
    let pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    let px = |v: f64| MARGIN + (v - xmin) / (xmax - xmin) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - ymin) / (ymax - ymin) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    if ymin < 0.0 && ymax > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#bbb"/>"##,
            WIDTH - MARGIN,
            y = py(0.0)
        );
    }
    for (v, anchor, xpos) in [(xmin, "start", MARGIN), (xmax, "end", WIDTH - MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{xpos}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            HEIGHT - MARGIN + 16.0,
            short(v)
        );
    }
    for (v, y) in [(ymin, HEIGHT - MARGIN), (ymax, MARGIN + 10.0)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            short(v)
        );
    }
    // keep files small on fine grids
    let stride = (x.len() / 1000).max(1);
    for (k, ser) in series.iter().enumerate() {
        let mut points = String::new();
        for i in (0..x.len())
            .step_by(stride)
            .chain(std::iter::once(x.len() - 1))
        {
            let _ = write!(points, "{:.2},{:.2} ", px(x[i]), py(ser.values[i]));
        }
        let dash = if ser.dashed {
            r#" stroke-dasharray="5,4""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
            ser.color,
            points.trim_end()
        );
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" x2="{}" y1="{ly}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/>"#,
            WIDTH - MARGIN - 180.0,
            WIDTH - MARGIN - 155.0,
            ser.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

fn short(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

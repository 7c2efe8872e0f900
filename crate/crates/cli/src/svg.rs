//! Static SVG step plots, optionally beside a panel of the index map.

use std::fmt::Write;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;
/// Paths with more points than this are drawn as per-column min/max envelopes.
const EXACT_LIMIT: usize = 4000;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y0) / (self.y1 - self.y0) * self.height
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-2 && v.abs() < 1e4) {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn axes(out: &mut String, f: &Frame, font: f64) {
    let _ = writeln!(
        out,
        r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black" stroke-width="1"/>"#,
        f.left, f.top, f.width, f.height
    );
    for i in 0..=4 {
        let s = i as f64 / 4.0;
        let (xv, yv) = (f.x0 + s * (f.x1 - f.x0), f.y0 + s * (f.y1 - f.y0));
        let (x, y) = (f.px(xv), f.py(yv));
        let bottom = f.top + f.height;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{bottom:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            bottom + 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-size="{font}" text-anchor="middle">{}</text>"#,
            bottom + 4.0 + font,
            fmt_tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/>"#,
            f.left - 4.0,
            f.left
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="{font}" text-anchor="end">{}</text>"#,
            f.left - 6.0,
            y + font / 3.0,
            fmt_tick(yv)
        );
    }
}

/// Step-plot polyline points for `(t, value)` pairs, or a min/max envelope for long paths.
fn step_points(f: &Frame, grid: &[f64], values: &[f64]) -> String {
    let mut pts = String::new();
    if grid.len() <= EXACT_LIMIT {
        for i in 0..grid.len() {
            if i > 0 {
                let _ = write!(pts, "{:.2},{:.2} ", f.px(grid[i]), f.py(values[i - 1]));
            }
            let _ = write!(pts, "{:.2},{:.2} ", f.px(grid[i]), f.py(values[i]));
        }
        return pts;
    }
    let columns = f.width as usize;
    let mut lo = vec![f64::INFINITY; columns];
    let mut hi = vec![f64::NEG_INFINITY; columns];
    for (t, v) in grid.iter().zip(values) {
        let c = (((t - f.x0) / (f.x1 - f.x0)) * (columns - 1) as f64).round().clamp(0.0, (columns - 1) as f64) as usize;
        lo[c] = lo[c].min(*v);
        hi[c] = hi[c].max(*v);
    }
    let mut last = values[0];
    for c in 0..columns {
        let x = f.left + c as f64;
        if lo[c].is_finite() {
            let _ = write!(pts, "{x:.2},{:.2} {x:.2},{:.2} {x:.2},{:.2} ", f.py(last), f.py(lo[c]), f.py(hi[c]));
            last = hi[c];
        } else {
            let _ = write!(pts, "{x:.2},{:.2} ", f.py(last));
        }
    }
    pts
}

/// Full plot: the path with axes and a title, and to its left a panel of `alpha`
/// over the path's range when one is given.
pub fn step_plot(title: &str, grid: &[f64], values: &[f64], alpha: Option<&dyn Fn(f64) -> f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (vmin, vmax) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (y0, y1) = padded(vmin, vmax);
    let top = 40.0;
    let height = HEIGHT - top - MARGIN;
    let side = if alpha.is_some() { 240.0 } else { 0.0 };

    if let Some(alpha) = alpha {
        let panel = Frame { x0: y0, x1: y1, y0: 0.0, y1: 1.0, left: MARGIN, top, width: side - MARGIN - 10.0, height };
        axes(&mut out, &panel, 10.0);
        let pts: String = (0..=400)
            .map(|i| y0 + (y1 - y0) * i as f64 / 400.0)
            .map(|z| format!("{:.2},{:.2} ", panel.px(z), panel.py(alpha(z).clamp(0.0, 1.0))))
            .collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="firebrick" stroke-width="1.2" points="{pts}"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">z</text>"#,
            panel.left + panel.width / 2.0,
            HEIGHT - 12.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">alpha(z)</text>"#,
            panel.left + panel.width / 2.0,
            top - 4.0
        );
    }

    let main = Frame {
        x0: grid[0],
        x1: *grid.last().unwrap(),
        y0,
        y1,
        left: side + MARGIN + 20.0,
        top,
        width: WIDTH - side - 2.0 * MARGIN - 20.0,
        height,
    };
    axes(&mut out, &main, 12.0);
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#,
        step_points(&main, grid, values)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">t</text>"#,
        main.left + main.width / 2.0,
        HEIGHT - 12.0
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

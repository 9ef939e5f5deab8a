//! Self-contained SVG plots: no plotting dependency, data inlined, output
//! byte-reproducible for identical inputs.

use std::fmt::Write as _;

const WIDTH: f64 = 680.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    fn from_values(values: impl Iterator<Item = f64>) -> Axis {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = (hi - lo) * 0.05;
        Axis {
            min: lo - pad,
            max: hi + pad,
        }
    }

    fn ticks(&self, target: usize) -> Vec<f64> {
        let range = self.max - self.min;
        let raw = range / target as f64;
        let mag = 10f64.powf(raw.log10().floor());
        let norm = raw / mag;
        let step = if norm <= 1.0 {
            1.0
        } else if norm <= 2.0 {
            2.0
        } else if norm <= 5.0 {
            5.0
        } else {
            10.0
        } * mag;
        let first = (self.min / step).ceil() * step;
        let mut out = Vec::new();
        let mut t = first;
        while t <= self.max + step * 1e-9 {
            out.push(t);
            t += step;
        }
        out
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e5 || a < 1e-3 {
        format!("{v:.1e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Frame {
    svg: String,
    x: Axis,
    y: Axis,
}

impl Frame {
    fn new(title: &str, x: Axis, y: Axis, x_label: &str, y_label: &str) -> Frame {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="22" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let mut frame = Frame { svg, x, y };
        frame.draw_axes(x_label, y_label);
        frame
    }

    fn px(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x.min) / (self.x.max - self.x.min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_B
            - (v - self.y.min) / (self.y.max - self.y.min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    fn draw_axes(&mut self, x_label: &str, y_label: &str) {
        let x0 = MARGIN_L;
        let x1 = WIDTH - MARGIN_R;
        let y0 = HEIGHT - MARGIN_B;
        let y1 = MARGIN_T;
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#333" stroke-width="1"/>"#
        );
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#333" stroke-width="1"/>"#
        );
        for t in self.x.ticks(6) {
            let px = self.px(t);
            let _ = writeln!(
                self.svg,
                r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="#333" stroke-width="1"/>"#,
                y0 + 5.0
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{px:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                tick_label(t)
            );
        }
        for t in self.y.ticks(6) {
            let py = self.py(t);
            let _ = writeln!(
                self.svg,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="#333" stroke-width="1"/>"#,
                x0 - 5.0
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                x0 - 8.0,
                py + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }

    /// Vertical marker line with a label near the top.
    fn vline(&mut self, v: f64, color: &str, dashed: bool, label: &str) {
        if !v.is_finite() {
            return;
        }
        let px = self.px(v);
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            self.svg,
            r#"<line x1="{px:.2}" y1="{:.1}" x2="{px:.2}" y2="{:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
            HEIGHT - MARGIN_B,
            MARGIN_T
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.2}" y="{:.1}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            px + 4.0,
            MARGIN_T + 12.0,
            escape(label)
        );
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Histogram of the simulated null sample with the observed statistic and
/// the rejection threshold marked.
pub fn null_histogram(title: &str, null_sample: &[f64], lambda_obs: f64, threshold_c: f64) -> String {
    let values = null_sample
        .iter()
        .copied()
        .chain([lambda_obs, threshold_c]);
    let x = Axis::from_values(values);
    let bins = 40usize;
    let mut counts = vec![0usize; bins];
    let width = (x.max - x.min) / bins as f64;
    for &v in null_sample {
        let mut b = ((v - x.min) / width) as usize;
        if b >= bins {
            b = bins - 1;
        }
        counts[b] += 1;
    }
    let y = Axis {
        min: 0.0,
        max: counts.iter().copied().max().unwrap_or(1).max(1) as f64 * 1.08,
    };
    let mut f = Frame::new(title, x, y, "distance metric", "count");
    for (b, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let x0 = f.px(f.x.min + b as f64 * width);
        let x1 = f.px(f.x.min + (b + 1) as f64 * width);
        let y0 = f.py(0.0);
        let y1 = f.py(c as f64);
        let _ = writeln!(
            f.svg,
            r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="#4878a8" fill-opacity="0.85"/>"#,
            (x1 - x0).max(0.5),
            y0 - y1
        );
    }
    f.vline(threshold_c, "#c0392b", true, &format!("c = {threshold_c:.3}"));
    f.vline(lambda_obs, "#e06c00", false, &format!("observed = {lambda_obs:.3}"));
    f.finish()
}

/// Scatter of (Λ, normalized test AIC) pairs with an optional highlighted
/// observed point.
pub fn sweep_scatter(title: &str, points: &[(f64, f64)], observed: Option<(f64, f64)>) -> String {
    let xs = points.iter().map(|p| p.0).chain(observed.map(|p| p.0));
    let ys = points.iter().map(|p| p.1).chain(observed.map(|p| p.1));
    let x = Axis::from_values(xs);
    let y = Axis::from_values(ys);
    let mut f = Frame::new(title, x, y, "distance metric", "normalized AIC (test)");
    for &(px, py) in points {
        if !px.is_finite() || !py.is_finite() {
            continue;
        }
        let _ = writeln!(
            f.svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#4878a8" fill-opacity="0.5"/>"#,
            f.px(px),
            f.py(py)
        );
    }
    if let Some((ox, oy)) = observed {
        if ox.is_finite() && oy.is_finite() {
            let _ = writeln!(
                f.svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="6" fill="#e06c00" stroke="#7a3b00" stroke-width="1.5"/>"#,
                f.px(ox),
                f.py(oy)
            );
            let _ = writeln!(
                f.svg,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" fill="#7a3b00">observed</text>"#,
                f.px(ox) + 8.0,
                f.py(oy) - 6.0
            );
        }
    }
    f.finish()
}

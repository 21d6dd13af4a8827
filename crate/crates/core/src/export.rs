//! CSV tables (RFC 4180, 17 significant digits) and small SVG plots.

use std::fmt::Write as _;
use std::io::{self, Write};

/// A table of named columns.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest-free formatting with 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Table of numeric columns of equal length.
    pub fn from_columns(headers: &[&str], columns: &[&[f64]]) -> Self {
        let mut t = Self::new(headers.iter().copied());
        let len = columns.iter().map(|c| c.len()).min().unwrap_or(0);
        for i in 0..len {
            t.push(columns.iter().map(|c| Cell::Num(c[i])).collect());
        }
        t
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => format_number(*v),
                Cell::Int(v) => v.to_string(),
                Cell::Text(s) => s.clone(),
            }))?;
        }
        w.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x: [f64; 2],
    y: [f64; 2],
}

impl Frame {
    fn new(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut x = [f64::INFINITY, f64::NEG_INFINITY];
        let mut y = [f64::INFINITY, f64::NEG_INFINITY];
        for (a, b) in points.filter(|(a, b)| a.is_finite() && b.is_finite()) {
            x = [x[0].min(a), x[1].max(a)];
            y = [y[0].min(b), y[1].max(b)];
        }
        for r in [&mut x, &mut y] {
            if !r[0].is_finite() {
                *r = [0.0, 1.0];
            }
            if r[1] - r[0] <= 1e-300 {
                r[0] -= 0.5;
                r[1] += 0.5;
            }
        }
        Self { x, y }
    }

    fn px(&self, v: f64) -> f64 {
        MARGIN + (v - self.x[0]) / (self.x[1] - self.x[0]) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y[0]) / (self.y[1] - self.y[0]) * (HEIGHT - 2.0 * MARGIN)
    }

    fn axes(&self, svg: &mut String, x_label: &str, y_label: &str) {
        let (l, r) = (MARGIN, WIDTH - MARGIN);
        let (t, b) = (MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(
            svg,
            "<rect x=\"{l}\" y=\"{t}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>",
            r - l,
            b - t
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x[0] + f * (self.x[1] - self.x[0]);
            let yv = self.y[0] + f * (self.y[1] - self.y[0]);
            let (xp, yp) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                svg,
                "<line x1=\"{xp:.2}\" y1=\"{b}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>\
                 <text x=\"{xp:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                b + 5.0,
                b + 18.0,
                tick(xv)
            );
            let _ = writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{yp:.2}\" x2=\"{l}\" y2=\"{yp:.2}\" stroke=\"#333\"/>\
                 <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
                l - 5.0,
                l - 8.0,
                yp + 4.0,
                tick(yv)
            );
        }
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n\
             <text x=\"14\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
            0.5 * WIDTH,
            HEIGHT - 12.0,
            escape(x_label),
            0.5 * HEIGHT,
            0.5 * HEIGHT,
            escape(y_label)
        );
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-2 && v.abs() < 1e4) {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        0.5 * WIDTH,
        escape(title)
    )
}

/// A named curve for [`line_plot`].
pub struct Series<'a> {
    pub label: String,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

/// Overlaid polylines with axes and a legend.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let frame = Frame::new(series.iter().flat_map(|s| s.x.iter().copied().zip(s.y.iter().copied())));
    let mut svg = open(title);
    frame.axes(&mut svg, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for (&a, &b) in s.x.iter().zip(s.y) {
            if a.is_finite() && b.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", frame.px(a), frame.py(b));
            }
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.trim_end()
        );
        let ly = MARGIN + 14.0 + 16.0 * k as f64;
        let lx = WIDTH - MARGIN - 150.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{colour}\" stroke-width=\"2\"/>\
             <text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>",
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Contour lines of a field sampled on a tensor grid, by marching squares.
/// `values[j * nx + i]` sits at (xs[i], ys[j]); NaN marks missing samples.
pub fn contour_plot(title: &str, xs: &[f64], ys: &[f64], values: &[f64], levels: usize) -> String {
    let nx = xs.len();
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame {
        x: [xs[0], xs[nx - 1]],
        y: [ys[0], ys[ys.len() - 1]],
    };
    let mut svg = open(title);
    frame.axes(&mut svg, "x1", "x2");
    if finite.is_empty() || !(hi > lo) {
        svg.push_str("</svg>\n");
        return svg;
    }
    for k in 1..=levels {
        let level = lo + (hi - lo) * k as f64 / (levels + 1) as f64;
        let colour = PALETTE[k % PALETTE.len()];
        let mut path = String::new();
        for j in 0..ys.len() - 1 {
            for i in 0..nx - 1 {
                let corners = [
                    (xs[i], ys[j], values[j * nx + i]),
                    (xs[i + 1], ys[j], values[j * nx + i + 1]),
                    (xs[i + 1], ys[j + 1], values[(j + 1) * nx + i + 1]),
                    (xs[i], ys[j + 1], values[(j + 1) * nx + i]),
                ];
                if corners.iter().any(|c| !c.2.is_finite()) {
                    continue;
                }
                let mut crossings = Vec::with_capacity(4);
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    if (a.2 < level) != (b.2 < level) {
                        let t = (level - a.2) / (b.2 - a.2);
                        crossings.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
                    }
                }
                for pair in crossings.chunks_exact(2) {
                    let _ = write!(
                        path,
                        "M{:.2} {:.2}L{:.2} {:.2}",
                        frame.px(pair[0].0),
                        frame.py(pair[0].1),
                        frame.px(pair[1].0),
                        frame.py(pair[1].1)
                    );
                }
            }
        }
        if !path.is_empty() {
            let _ = writeln!(
                svg,
                "<path d=\"{path}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1\"><title>{}</title></path>",
                tick(level)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

//! Minimal static SVG emission for the experiment figures.
//!
//! Produces self-contained documents: inline attributes only, generic
//! `sans-serif` fonts, no scripts, no external references. The drawing
//! model is deliberately small — rectangles, polylines, and text are all
//! the figures need — plus an [`Axes`] helper that maps data coordinates
//! onto a panel rectangle and draws a frame with tick labels.

/// Accumulates SVG elements and renders the final document.
#[derive(Clone, Debug)]
pub struct Canvas {
    width: f64,
    height: f64,
    body: String,
}

fn esc(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

/// Canvas coordinates rendered with fixed sub-pixel precision.
fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

impl Canvas {
    pub fn new(width: f64, height: f64) -> Self {
        assert!(width > 0.0 && height > 0.0, "canvas must have positive size");
        Canvas { width, height, body: String::new() }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: Option<&str>) {
        let stroke_attr = match stroke {
            Some(s) => format!(" stroke=\"{}\" stroke-width=\"1\"", esc(s)),
            None => String::new(),
        };
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"{}/>\n",
            fmt(x),
            fmt(y),
            fmt(w),
            fmt(h),
            esc(fill),
            stroke_attr
        ));
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            fmt(x1),
            fmt(y1),
            fmt(x2),
            fmt(y2),
            esc(stroke),
            fmt(width)
        ));
    }

    /// Draws the finite runs of `points`; non-finite coordinates split the
    /// polyline so gaps stay gaps instead of becoming spurious segments.
    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, body: &mut String| {
            if run.len() >= 2 {
                let pts: Vec<String> =
                    run.iter().map(|&(x, y)| format!("{},{}", fmt(x), fmt(y))).collect();
                body.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
                    pts.join(" "),
                    esc(stroke),
                    fmt(width)
                ));
            }
            run.clear();
        };
        for &(x, y) in points {
            if x.is_finite() && y.is_finite() {
                run.push((x, y));
            } else {
                flush(&mut run, &mut self.body);
            }
        }
        flush(&mut run, &mut self.body);
    }

    /// `anchor` is the SVG text-anchor: `start`, `middle`, or `end`.
    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" \
             text-anchor=\"{}\" fill=\"#222222\">{}</text>\n",
            fmt(x),
            fmt(y),
            fmt(size),
            esc(anchor),
            esc(content)
        ));
    }

    pub fn render(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\">\n<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" \
             fill=\"white\"/>\n{body}</svg>\n",
            w = fmt(self.width),
            h = fmt(self.height),
            body = self.body
        )
    }
}

/// Tick positions with a step of 1, 2, or 5 times a power of ten, chosen so
/// roughly `target` ticks cover `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    assert!(hi > lo && target >= 2, "degenerate tick request");
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm <= 1.5 {
        mag
    } else if norm <= 3.5 {
        2.0 * mag
    } else if norm <= 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let mut ticks = Vec::new();
    let mut k = (lo / step).ceil();
    // Snap -0.0 and accumulated dust to exact multiples.
    while k * step <= hi + 1e-9 * step {
        let t = k * step;
        ticks.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        k += 1.0;
    }
    ticks
}

/// Shortest decimal form that distinguishes the tick values.
pub fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    format!("{v:.decimals$}")
}

/// A panel rectangle with data-coordinate ranges. `y` grows upward in data
/// space and downward in canvas space; `map` handles the flip.
#[derive(Clone, Copy, Debug)]
pub struct Axes {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Axes {
    pub fn new(
        left: f64,
        top: f64,
        width: f64,
        height: f64,
        x_range: (f64, f64),
        y_range: (f64, f64),
    ) -> Self {
        assert!(width > 0.0 && height > 0.0, "panel must have positive size");
        assert!(x_range.1 > x_range.0 && y_range.1 > y_range.0, "ranges must be increasing");
        Axes { left, top, width, height, x_range, y_range }
    }

    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let fx = (x - self.x_range.0) / (self.x_range.1 - self.x_range.0);
        let fy = (y - self.y_range.0) / (self.y_range.1 - self.y_range.0);
        (self.left + fx * self.width, self.top + (1.0 - fy) * self.height)
    }

    /// Border, tick marks, tick labels, and a centered title line.
    pub fn frame(&self, canvas: &mut Canvas, title: &str) {
        canvas.rect(self.left, self.top, self.width, self.height, "none", Some("#444444"));
        let x_ticks = nice_ticks(self.x_range.0, self.x_range.1, 5);
        let x_step = if x_ticks.len() >= 2 { x_ticks[1] - x_ticks[0] } else { 1.0 };
        for &t in &x_ticks {
            let (cx, cy) = self.map(t, self.y_range.0);
            canvas.line(cx, cy, cx, cy + 4.0, "#444444", 1.0);
            canvas.text(cx, cy + 15.0, 10.0, "middle", &fmt_tick(t, x_step));
        }
        let y_ticks = nice_ticks(self.y_range.0, self.y_range.1, 4);
        let y_step = if y_ticks.len() >= 2 { y_ticks[1] - y_ticks[0] } else { 1.0 };
        for &t in &y_ticks {
            let (cx, cy) = self.map(self.x_range.0, t);
            canvas.line(cx - 4.0, cy, cx, cy, "#444444", 1.0);
            canvas.text(cx - 6.0, cy + 3.5, 10.0, "end", &fmt_tick(t, y_step));
        }
        if !title.is_empty() {
            canvas.text(self.left + self.width / 2.0, self.top - 6.0, 12.0, "middle", title);
        }
    }

    /// Histogram bars from bin edges and densities, clipped to the ranges.
    pub fn draw_bars(&self, canvas: &mut Canvas, edges: &[f64], densities: &[f64], fill: &str) {
        assert_eq!(edges.len(), densities.len() + 1, "edges must bracket densities");
        for (i, &d) in densities.iter().enumerate() {
            if d <= 0.0 {
                continue;
            }
            let lo = edges[i].max(self.x_range.0);
            let hi = edges[i + 1].min(self.x_range.1);
            if hi <= lo {
                continue;
            }
            let top = d.min(self.y_range.1);
            let (x0, y1) = self.map(lo, self.y_range.0.max(0.0));
            let (x1, y0) = self.map(hi, top);
            canvas.rect(x0, y0, x1 - x0, y1 - y0, fill, Some("#7a7a7a"));
        }
    }

    /// Samples `f` on an even grid across the x-range and draws the curve,
    /// leaving gaps where the value escapes the y-range.
    pub fn draw_curve(
        &self,
        canvas: &mut Canvas,
        f: impl Fn(f64) -> f64,
        samples: usize,
        stroke: &str,
        width: f64,
    ) {
        assert!(samples >= 2, "a curve needs at least two samples");
        let pts: Vec<(f64, f64)> = (0..samples)
            .map(|i| {
                let x = self.x_range.0
                    + (self.x_range.1 - self.x_range.0) * i as f64 / (samples - 1) as f64;
                let y = f(x);
                if y.is_finite() && y >= self.y_range.0 && y <= self.y_range.1 {
                    let (cx, cy) = self.map(x, y);
                    (cx, cy)
                } else {
                    (f64::NAN, f64::NAN)
                }
            })
            .collect();
        canvas.polyline(&pts, stroke, width);
    }

    /// Data polyline in data coordinates, with non-finite points as gaps.
    pub fn draw_series(&self, canvas: &mut Canvas, pts: &[(f64, f64)], stroke: &str, width: f64) {
        let mapped: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(x, y)| {
                if x.is_finite() && y.is_finite() {
                    self.map(x, y)
                } else {
                    (f64::NAN, f64::NAN)
                }
            })
            .collect();
        canvas.polyline(&mapped, stroke, width);
    }
}

/// Panel rectangles `(left, top, width, height)` for a `rows x cols` grid
/// with outer margins sized for tick labels and a title strip.
pub fn grid_panels(
    canvas_width: f64,
    canvas_height: f64,
    rows: usize,
    cols: usize,
) -> Vec<(f64, f64, f64, f64)> {
    assert!(rows >= 1 && cols >= 1);
    let margin_left = 52.0;
    let margin_right = 16.0;
    let margin_top = 30.0;
    let margin_bottom = 34.0;
    let gap_x = 46.0;
    let gap_y = 42.0;
    let panel_w =
        (canvas_width - margin_left - margin_right - gap_x * (cols as f64 - 1.0)) / cols as f64;
    let panel_h =
        (canvas_height - margin_top - margin_bottom - gap_y * (rows as f64 - 1.0)) / rows as f64;
    assert!(panel_w > 10.0 && panel_h > 10.0, "canvas too small for the grid");
    let mut rects = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            rects.push((
                margin_left + c as f64 * (panel_w + gap_x),
                margin_top + r as f64 * (panel_h + gap_y),
                panel_w,
                panel_h,
            ));
        }
    }
    rects
}

//! Hand-rolled SVG and CSV emission for planar figures: measure
//! supports, splitting lines, central-sphere curves.

use crate::auxiliary::CurveSample;
use crate::geom::{Hyperplane, Vector};
use crate::measure::{Measure, MeasureSpec};

/// World-to-viewport mapping for a square canvas.
#[derive(Debug, Clone, Copy)]
pub struct Viewport {
    cx: f64,
    cy: f64,
    scale: f64,
    size: f64,
}

impl Viewport {
    /// Fits the ball `(center, radius)` into a `size`-pixel canvas with
    /// a small margin.
    pub fn fit(center: &Vector, radius: f64, size: f64) -> Viewport {
        Viewport {
            cx: center.0[0],
            cy: center.0[1],
            scale: size / (2.3 * radius.max(1e-9)),
            size,
        }
    }

    fn map(&self, p: &Vector) -> (f64, f64) {
        (
            self.size / 2.0 + (p.0[0] - self.cx) * self.scale,
            self.size / 2.0 - (p.0[1] - self.cy) * self.scale,
        )
    }
}

/// A growing SVG document.
pub struct SvgCanvas {
    view: Viewport,
    body: String,
}

impl SvgCanvas {
    pub fn new(view: Viewport) -> Self {
        SvgCanvas { view, body: String::new() }
    }

    pub fn circle(&mut self, center: &Vector, radius: f64, stroke: &str, fill: &str) {
        let (x, y) = self.view.map(center);
        self.body.push_str(&format!(
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.2}\" stroke=\"{stroke}\" fill=\"{fill}\" stroke-width=\"1\"/>\n",
            radius * self.view.scale
        ));
    }

    pub fn polygon(&mut self, pts: &[Vector], stroke: &str, fill: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = self.view.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        self.body.push_str(&format!(
            "  <polygon points=\"{}\" stroke=\"{stroke}\" fill=\"{fill}\" stroke-width=\"1\"/>\n",
            coords.join(" ")
        ));
    }

    pub fn polyline(&mut self, pts: &[Vector], stroke: &str) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = self.view.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        self.body.push_str(&format!(
            "  <polyline points=\"{}\" stroke=\"{stroke}\" fill=\"none\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
    }

    /// Draws the trace of a hyperplane clipped to the viewport.
    pub fn hyperplane(&mut self, h: &Hyperplane, stroke: &str) {
        let v = h.normal();
        let dir = Vector::new(vec![-v.0[1], v.0[0]]);
        let anchor = v.scale(h.offset());
        let reach = 1.5 * self.view.size / self.view.scale;
        let a = anchor.axpy(-reach, &dir);
        let b = anchor.axpy(reach, &dir);
        let (x1, y1) = self.view.map(&a);
        let (x2, y2) = self.view.map(&b);
        self.body.push_str(&format!(
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>\n"
        ));
    }

    /// Outlines a measure's support (dashed for smooth densities).
    pub fn measure_support(&mut self, m: &Measure, stroke: &str) {
        match m.spec() {
            MeasureSpec::UniformBall { center, radius } => {
                self.circle(&Vector::new(center), radius, stroke, "none");
            }
            MeasureSpec::SmoothCap { center, radius, .. } => {
                let (x, y) = self.view.map(&Vector::new(center));
                self.body.push_str(&format!(
                    "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.2}\" stroke=\"{stroke}\" fill=\"none\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n",
                    radius * self.view.scale
                ));
            }
            MeasureSpec::UniformPolytope { vertices } => {
                let pts: Vec<Vector> = vertices.into_iter().map(Vector::new).collect();
                self.polygon(&pts, stroke, "none");
            }
            MeasureSpec::Mixture { components } => {
                for c in components {
                    if let Ok(sub) = Measure::from_spec(c.measure) {
                        self.measure_support(&sub, stroke);
                    }
                }
            }
            MeasureSpec::KernelCloud { points, bandwidth } => {
                for p in points {
                    self.circle(&Vector::new(p), bandwidth, stroke, "none");
                }
            }
            MeasureSpec::Conditional { base, .. } => {
                if let Ok(sub) = Measure::from_spec(*base) {
                    self.measure_support(&sub, stroke);
                }
            }
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n{}</svg>\n",
            self.body,
            s = self.view.size
        )
    }
}

/// CSV rows `angle,x,y,fallback` for a sampled anchor curve.
pub fn curve_to_csv(sample: &CurveSample) -> String {
    let mut out = String::from("angle,x,y,fallback\n");
    for ((theta, p), fb) in sample.angles.iter().zip(&sample.points).zip(&sample.fallback) {
        out.push_str(&format!(
            "{theta:.10},{:.12},{:.12},{}\n",
            p.0[0],
            p.0[1],
            i32::from(*fb)
        ));
    }
    out
}

/// A ready-made figure: supports, optional lines, optional curve.
pub fn render_figure(
    measures: &[Measure],
    lines: &[&Hyperplane],
    curves: &[&CurveSample],
    size: f64,
) -> String {
    let mut c = Vector::zeros(2);
    let mut r = 1.0_f64;
    if !measures.is_empty() {
        for m in measures {
            c = c.add(&m.bounding_ball().0);
        }
        c = c.scale(1.0 / measures.len() as f64);
        r = measures
            .iter()
            .map(|m| {
                let (mc, mr) = m.bounding_ball();
                mc.dist(&c) + mr
            })
            .fold(0.0, f64::max);
    }
    let mut canvas = SvgCanvas::new(Viewport::fit(&c, r, size));
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
    for (i, m) in measures.iter().enumerate() {
        canvas.measure_support(m, palette[i % palette.len()]);
    }
    for (i, h) in lines.iter().enumerate() {
        canvas.hyperplane(h, if i == 0 { "#000000" } else { "#555555" });
    }
    for (i, s) in curves.iter().enumerate() {
        canvas.polyline(&s.points, palette[(2 + i) % palette.len()]);
    }
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_contains_expected_elements() {
        let m = Measure::uniform_ball(Vector::new(vec![0.0, 0.0]), 1.0).unwrap();
        let h = Hyperplane::new(Vector::new(vec![1.0, 0.0]), 0.2).unwrap();
        let svg = render_figure(&[m], &[&h], &[], 400.0);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("<line"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let sample = CurveSample {
            angles: vec![0.0, 1.0],
            points: vec![Vector::new(vec![1.0, 2.0]), Vector::new(vec![3.0, 4.0])],
            fallback: vec![false, true],
        };
        let csv = curve_to_csv(&sample);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "angle,x,y,fallback");
        assert!(lines[2].ends_with(",1"));
    }
}

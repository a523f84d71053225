//! SVG output for planar packings.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::orbit::Packing;

#[derive(Debug, Clone, PartialEq)]
pub struct Viewport {
    pub center: [f64; 2],
    pub half_width: f64,
    pub size_px: u32,
    pub min_radius_px: f64,
}

impl Viewport {
    pub fn new(center: [f64; 2], half_width: f64, size_px: u32, min_radius_px: f64) -> Result<Self> {
        if !(half_width > 0.0) || size_px == 0 {
            return Err(Error::Format("viewport needs a positive half width and size".into()));
        }
        Ok(Viewport { center, half_width, size_px, min_radius_px })
    }

    /// A square around the bounding circle if there is one (negative
    /// radius), otherwise around all circles.
    pub fn fit(p: &Packing, size_px: u32) -> Viewport {
        let circles: Vec<(Vec<f64>, f64)> = p.spheres.iter().filter_map(|s| s.center_radius_f64()).collect();
        let (center, hw) = if let Some((c, r)) = circles.iter().find(|(_, r)| *r < 0.0) {
            ([c[0], c[1]], r.abs() * 1.02)
        } else if circles.is_empty() {
            ([0.0, 0.0], 1.0)
        } else {
            let lo = |k: usize| circles.iter().map(|(c, r)| c[k] - r.abs()).fold(f64::INFINITY, f64::min);
            let hi = |k: usize| circles.iter().map(|(c, r)| c[k] + r.abs()).fold(f64::NEG_INFINITY, f64::max);
            let (x0, x1, y0, y1) = (lo(0), hi(0), lo(1), hi(1));
            ([(x0 + x1) / 2.0, (y0 + y1) / 2.0], ((x1 - x0).max(y1 - y0) / 2.0 * 1.02).max(1e-9))
        };
        Viewport { center, half_width: hw, size_px, min_radius_px: 0.5 }
    }

    fn scale(&self) -> f64 {
        self.size_px as f64 / (2.0 * self.half_width)
    }

    fn to_px(&self, x: f64, y: f64) -> (f64, f64) {
        let s = self.scale();
        ((x - self.center[0] + self.half_width) * s, (self.center[1] + self.half_width - y) * s)
    }
}

/// Whether the circle's boundary passes through the viewport square.
pub fn circle_visible(center: &[f64], radius: f64, vp: &Viewport) -> bool {
    let r = radius.abs();
    let (lo, hi) = ([vp.center[0] - vp.half_width, vp.center[1] - vp.half_width], [vp.center[0] + vp.half_width, vp.center[1] + vp.half_width]);
    let near: f64 = (0..2).map(|k| (center[k].clamp(lo[k], hi[k]) - center[k]).powi(2)).sum::<f64>().sqrt();
    let far: f64 = (0..2).map(|k| (center[k] - lo[k]).abs().max((center[k] - hi[k]).abs()).powi(2)).sum::<f64>().sqrt();
    near <= r && far >= r
}

/// The part of the line `{x : n·x = c}` inside the viewport.
fn clip_line(normal: [f64; 2], c: f64, vp: &Viewport) -> Option<[[f64; 2]; 2]> {
    let p0 = [normal[0] * c, normal[1] * c];
    let dir = [-normal[1], normal[0]];
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..2 {
        let (lo, hi) = (vp.center[k] - vp.half_width, vp.center[k] + vp.half_width);
        if dir[k].abs() < 1e-15 {
            if p0[k] < lo || p0[k] > hi {
                return None;
            }
        } else {
            let (a, b) = ((lo - p0[k]) / dir[k], (hi - p0[k]) / dir[k]);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 <= t1).then(|| [[p0[0] + t0 * dir[0], p0[1] + t0 * dir[1]], [p0[0] + t1 * dir[0], p0[1] + t1 * dir[1]]])
}

/// Number of circles (not lines) that [`render_svg`] draws.
pub fn drawn_circle_count(p: &Packing, vp: &Viewport) -> usize {
    p.spheres
        .iter()
        .filter_map(|s| s.center_radius_f64())
        .filter(|(c, r)| circle_visible(c, *r, vp) && r.abs() * vp.scale() >= vp.min_radius_px)
        .count()
}

pub fn render_svg(p: &Packing, vp: &Viewport, labels: bool) -> Result<String> {
    if p.dim != 2 {
        return Err(Error::UnsupportedDimension(p.dim));
    }
    let n = vp.size_px;
    let mut shapes = String::new();
    let mut texts = String::new();
    for s in &p.spheres {
        match s.center_radius_f64() {
            Some((c, r)) => {
                let rpx = r.abs() * vp.scale();
                if !circle_visible(&c, r, vp) || rpx < vp.min_radius_px {
                    continue;
                }
                let (x, y) = vp.to_px(c[0], c[1]);
                writeln!(shapes, r#"<circle cx="{x:.6}" cy="{y:.6}" r="{rpx:.6}"/>"#).expect("string write");
                if labels {
                    let text = s.bend().to_string();
                    let font = rpx * 1.2 / (text.chars().count() as f64).max(1.5);
                    writeln!(texts, r#"<text x="{x:.6}" y="{y:.6}" font-size="{font:.6}">{text}</text>"#).expect("string write");
                }
            }
            None => {
                let bz = s.bz();
                let normal = [bz[0].to_f64(), bz[1].to_f64()];
                let c = s.cobend().to_f64() / 2.0;
                if let Some([a, b]) = clip_line(normal, c, vp) {
                    let (x1, y1) = vp.to_px(a[0], a[1]);
                    let (x2, y2) = vp.to_px(b[0], b[1]);
                    writeln!(shapes, r#"<line x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}"/>"#).expect("string write");
                }
            }
        }
    }
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{n}" height="{n}" viewBox="0 0 {n} {n}">"#).expect("string write");
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str("<g fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n");
    out.push_str(&shapes);
    out.push_str("</g>\n");
    if labels {
        out.push_str("<g font-family=\"sans-serif\" text-anchor=\"middle\" dominant-baseline=\"central\">\n");
        out.push_str(&texts);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

//! Poincaré disk pictures of planar realizations.
//!
//! Each hyperplane `(s, u)` is first drawn in the upper half-plane
//! `{x₂ + i x₁ : x₁ > 0}` where the reference point is `i`: a ray
//! `x₁ = m(x₂ − sinh(s−Δ))` for `λ < 1` (vertical when `λ = 0`) or the
//! horizontal line `x₁ = e^{−s}` for `λ = 1`. The Cayley map sends `i` to the
//! disk centre, and the picture is then rotated by the angle of `u`.

use std::f64::consts::PI;
use std::fmt::Write;

use lhp_core::sampling::ProcessSample;
use lhp_core::{Error, Result};

/// Vertices per curve.
pub const VERTICES: usize = 256;

/// Beyond this radius the disk image of `B_R` is within `1e-8` of the boundary.
pub const MAX_RENDER_RADIUS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveClass {
    Geodesic,
    Equidistant,
    Horocycle,
}

impl CurveClass {
    fn of(lambda: f64) -> Self {
        if lambda == 0.0 {
            CurveClass::Geodesic
        } else if lambda == 1.0 {
            CurveClass::Horocycle
        } else {
            CurveClass::Equidistant
        }
    }

    fn stroke(self) -> &'static str {
        match self {
            CurveClass::Geodesic => "#1f4e79",
            CurveClass::Equidistant => "#b5542b",
            CurveClass::Horocycle => "#2e7d32",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub class: CurveClass,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskScene {
    pub radius: f64,
    pub curves: Vec<Curve>,
}

impl DiskScene {
    /// Euclidean radius of the disk image of `B_R`.
    pub fn ball_image_radius(&self) -> f64 {
        (0.5 * self.radius).tanh()
    }
}

/// `(z − i)/(z + i)` for `z = x₂ + i x₁`, rotated by `angle`.
fn to_disk(x1: f64, x2: f64, angle: f64) -> [f64; 2] {
    // (x₂ + i(x₁−1)) / (x₂ + i(x₁+1))
    let den = x2 * x2 + (x1 + 1.0) * (x1 + 1.0);
    let re = (x2 * x2 + x1 * x1 - 1.0) / den;
    let im = -2.0 * x2 / den;
    let (sin, cos) = angle.sin_cos();
    [re * cos - im * sin, re * sin + im * cos]
}

/// Canonical curve clipped to `B_R`, in half-plane coordinates `(x₁, x₂)`.
///
/// A point is in `B_R` iff `x₂² + x₁² + 1 ≤ 2 x₁ cosh R`.
fn half_plane_curve(lambda: f64, s: f64, radius: f64) -> Option<Vec<(f64, f64)>> {
    let big_c = radius.cosh();
    if lambda == 1.0 {
        let h = (-s).exp();
        let w2 = 2.0 * big_c * h - h * h - 1.0;
        if w2 <= 0.0 {
            return None;
        }
        let w = w2.sqrt();
        let pts = (0..VERTICES)
            .map(|i| {
                let t = i as f64 / (VERTICES - 1) as f64;
                (h, -w + 2.0 * w * t)
            })
            .collect();
        return Some(pts);
    }
    let mu = (1.0 - lambda * lambda).sqrt();
    let delta = lambda.atanh();
    let c = lambda / mu;
    let a = (s - delta).sinh();
    // (1+c²)x₁² + 2(ac − C)x₁ + (a²+1) ≤ 0
    let qa = 1.0 + c * c;
    let qb = a * c - big_c;
    let qc = a * a + 1.0;
    let disc = qb * qb - qa * qc;
    if disc <= 0.0 {
        return None;
    }
    let q = -(qb + qb.signum() * disc.sqrt());
    let (r1, r2) = (q / qa, qc / q);
    let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    let (tlo, thi) = (lo.ln(), hi.ln());
    let pts = (0..VERTICES)
        .map(|i| {
            let x1 = (tlo + (thi - tlo) * i as f64 / (VERTICES - 1) as f64).exp();
            (x1, a + c * x1)
        })
        .collect();
    Some(pts)
}

/// Builds the disk scene of a `d = 2` realization. Directions must have been sampled.
pub fn disk_scene(sample: &ProcessSample) -> Result<DiskScene> {
    let cfg = &sample.config;
    if cfg.d != 2 {
        return Err(Error::UnsupportedDimension {
            d: cfg.d,
            reason: "rendering needs d = 2",
        });
    }
    if cfg.radius > MAX_RENDER_RADIUS {
        return Err(Error::Domain {
            name: "R",
            value: cfg.radius,
            expected: "R <= 20 for rendering",
        });
    }
    let class = CurveClass::of(cfg.lambda);
    let mut curves = Vec::with_capacity(sample.coords.len());
    for coord in &sample.coords {
        if coord.u.len() != 2 {
            return Err(Error::Unsupported("rendering needs sampled directions"));
        }
        let angle = coord.u[1].atan2(coord.u[0]);
        let Some(pts) = half_plane_curve(cfg.lambda, coord.s, cfg.radius) else {
            continue;
        };
        let points = pts
            .into_iter()
            .map(|(x1, x2)| to_disk(x1, x2, angle))
            .collect();
        curves.push(Curve { class, points });
    }
    Ok(DiskScene {
        radius: cfg.radius,
        curves,
    })
}

pub fn scene_svg(scene: &DiskScene) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"-1.05 -1.05 2.1 2.1\" width=\"800\" height=\"800\">\n",
    );
    out.push_str("<rect x=\"-1.05\" y=\"-1.05\" width=\"2.1\" height=\"2.1\" fill=\"white\"/>\n");
    let _ = writeln!(
        out,
        "<circle cx=\"0\" cy=\"0\" r=\"{:.6}\" fill=\"#f4f4f4\" stroke=\"#888888\" \
         stroke-width=\"0.003\" stroke-dasharray=\"0.015 0.01\"/>",
        scene.ball_image_radius()
    );
    out.push_str(
        "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.005\"/>\n",
    );
    for c in &scene.curves {
        let _ = write!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"0.003\" points=\"",
            c.class.stroke()
        );
        for (i, p) in c.points.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            // SVG y grows downward
            let _ = write!(out, "{:.6},{:.6}", p[0], -p[1]);
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_disk(sample: &ProcessSample) -> Result<String> {
    Ok(scene_svg(&disk_scene(sample)?))
}

/// Acute angle between the polyline's last segment and the circle through its last vertex.
pub fn end_angle(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let (p, q) = (points[n - 1], points[n - 2]);
    let d = [p[0] - q[0], p[1] - q[1]];
    let norm_p = p[0].hypot(p[1]);
    let norm_d = d[0].hypot(d[1]);
    let radial = (d[0] * p[0] + d[1] * p[1]).abs() / (norm_p * norm_d);
    radial.clamp(0.0, 1.0).asin().min(PI / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lhp_core::sampling::{HyperplaneCoord, ProcessSampler};
    use lhp_core::ModelConfig;

    fn manual(lambda: f64, radius: f64, coords: &[(f64, f64)]) -> ProcessSample {
        ProcessSample {
            config: ModelConfig::new(2, lambda, radius).unwrap(),
            coords: coords
                .iter()
                .map(|&(s, phi)| HyperplaneCoord {
                    s,
                    u: vec![phi.cos(), phi.sin()],
                })
                .collect(),
            seed: 0,
            replicate_index: 0,
        }
    }

    fn circle_through(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> ([f64; 2], f64) {
        let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
        let n = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
        let ux = (n(a) * (b[1] - c[1]) + n(b) * (c[1] - a[1]) + n(c) * (a[1] - b[1])) / d;
        let uy = (n(a) * (c[0] - b[0]) + n(b) * (a[0] - c[0]) + n(c) * (b[0] - a[0])) / d;
        let r = (a[0] - ux).hypot(a[1] - uy);
        ([ux, uy], r)
    }

    fn hyperbolic_norm(p: [f64; 2]) -> f64 {
        2.0 * p[0].hypot(p[1]).atanh()
    }

    #[test]
    fn horocycles_are_internally_tangent_circles() {
        let sample = manual(1.0, 3.0, &[(-2.5, 0.3), (0.0, 2.0), (1.2, -1.0), (2.9, 4.0)]);
        let scene = disk_scene(&sample).unwrap();
        assert_eq!(scene.curves.len(), 4);
        for c in &scene.curves {
            let p = &c.points;
            let (centre, r) = circle_through(p[0], p[p.len() / 2], p[p.len() - 1]);
            let dev = p
                .iter()
                .map(|q| ((q[0] - centre[0]).hypot(q[1] - centre[1]) - r).abs())
                .fold(0.0, f64::max);
            assert!(dev < 1e-3, "radial deviation {dev}");
            let tangency = (centre[0].hypot(centre[1]) + r - 1.0).abs();
            assert!(tangency < 1e-3, "tangency {tangency}");
        }
    }

    #[test]
    fn boundary_angles() {
        for (lambda, want) in [(0.0, PI / 2.0), (0.5, PI / 3.0), (0.9, 0.9f64.acos())] {
            let sample = manual(lambda, 14.0, &[(0.3, 0.0), (-1.5, 1.0), (2.0, -2.5)]);
            let scene = disk_scene(&sample).unwrap();
            for c in &scene.curves {
                let mut rev = c.points.clone();
                rev.reverse();
                for pts in [&c.points, &rev] {
                    let got = end_angle(pts);
                    assert!((got - want).abs() < 1e-2, "λ={lambda}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn distance_from_centre_matches_s() {
        // the closest vertex of a geodesic sits at hyperbolic distance |s|
        let sample = manual(0.0, 5.0, &[(1.3, 0.7), (-0.4, 2.0)]);
        let scene = disk_scene(&sample).unwrap();
        for (c, want) in scene.curves.iter().zip([1.3, 0.4]) {
            let closest = c.points.iter().map(|&p| hyperbolic_norm(p)).fold(f64::MAX, f64::min);
            assert!((closest - want).abs() < 1e-3, "{closest} vs {want}");
        }
    }

    #[test]
    fn vertices_inside_the_ball_image() {
        for lambda in [0.0, 0.5, 1.0] {
            let cfg = ModelConfig::new(2, lambda, 3.0).unwrap();
            let sample = ProcessSampler::new(&cfg).sample(4, 0);
            let scene = disk_scene(&sample).unwrap();
            assert!(!scene.curves.is_empty());
            let bound = scene.ball_image_radius() * (1.0 + 1e-9);
            for c in &scene.curves {
                assert_eq!(c.points.len(), VERTICES);
                for p in &c.points {
                    let r = p[0].hypot(p[1]);
                    assert!(r < 1.0 && r <= bound, "{r}");
                }
            }
        }
    }

    #[test]
    fn rejects_other_dimensions_and_missing_directions() {
        let cfg = ModelConfig::new(3, 0.0, 2.0).unwrap();
        assert!(render_disk(&ProcessSampler::new(&cfg).sample(1, 0)).is_err());
        let cfg = ModelConfig::new(2, 0.0, 2.0).unwrap();
        let s = ProcessSampler::new(&cfg).with_directions(false).sample(1, 0);
        assert!(render_disk(&s).is_err());
    }

    #[test]
    fn tangent_sections_are_skipped() {
        let sample = manual(0.5, 2.0, &[(2.0, 0.0), (-2.0, 0.0)]);
        assert!(disk_scene(&sample).unwrap().curves.len() <= 2);
    }
}

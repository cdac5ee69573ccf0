//! Closed-form geometry of λ-geodesic hyperplanes and their sections with a
//! hyperbolic ball of radius `R` centred at the origin.
//!
//! A λ-geodesic hyperplane is parametrized by its signed distance `s` to the
//! origin (positive when the origin lies on the convex side). For `λ < 1` its
//! section with the ball is an intrinsic hyperbolic ball of radius `ρ(s; R)` in
//! a space of curvature `-(1-λ²)`; for `λ = 1` (horospheres) the section is a
//! Euclidean ball.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::numerics::{
    arcosh_1p_ln, arcosh_exp, ln_cosh, ln_sinh, ln_sinh_power_integral, unit_ball_volume,
    unit_sphere_area,
};

/// A value on the extended half-line `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }
}

/// Constants derived from the normal curvature `λ`.
///
/// `cos θ = λ`, `μ = sin θ`, `m = tan θ` (the slope of a linear λ-hyperplane in
/// the upper half-space model) and `Δ = artanh λ` (the distance between an
/// equidistant and its base hyperplane). The identity
/// `cosh s − λ sinh s = μ cosh(s − Δ)` is what makes the section volumes and the
/// invariant density depend on `s − Δ` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGeometry {
    pub lambda: f64,
    pub theta: f64,
    pub mu: f64,
    pub slope: Extended,
    pub delta: Extended,
}

impl LambdaGeometry {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain("lambda", lambda, "0 <= lambda <= 1"));
        }
        let theta = lambda.acos();
        // (1-λ)(1+λ) keeps precision as λ → 1
        let mu = ((1.0 - lambda) * (1.0 + lambda)).sqrt();
        let slope = if lambda == 0.0 {
            Extended::Infinite
        } else {
            Extended::Finite(mu / lambda)
        };
        let delta = if lambda == 1.0 {
            Extended::Infinite
        } else {
            Extended::Finite(lambda.atanh())
        };
        Ok(Self {
            lambda,
            theta,
            mu,
            slope,
            delta,
        })
    }

    pub fn is_horosphere(&self) -> bool {
        self.delta.is_infinite()
    }

    /// `Δ` for `λ < 1`; horospheres have no finite base hyperplane.
    pub fn finite_delta(&self) -> Result<f64> {
        self.delta
            .finite()
            .ok_or(Error::Unsupported("horospheres (lambda = 1) have no finite Δ"))
    }
}

pub fn lambda_geometry(lambda: f64) -> Result<LambdaGeometry> {
    LambdaGeometry::new(lambda)
}

/// Model parameters: dimension, curvature parameter, observation radius and
/// the multiplier applied to the invariant measure.
///
/// A multiplier of 1 is the oriented convention; 0.5 reproduces the
/// unoriented geodesic measure at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub d: usize,
    pub lambda: f64,
    pub radius: f64,
    pub intensity_multiplier: f64,
    geometry: LambdaGeometry,
}

impl ModelConfig {
    pub fn new(d: usize, lambda: f64, radius: f64) -> Result<Self> {
        Self::with_multiplier(d, lambda, radius, 1.0)
    }

    pub fn with_multiplier(
        d: usize,
        lambda: f64,
        radius: f64,
        intensity_multiplier: f64,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedDimension {
                d,
                reason: "d >= 2 required",
            });
        }
        let geometry = LambdaGeometry::new(lambda)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain("R", radius, "R > 0"));
        }
        if !(intensity_multiplier > 0.0) || !intensity_multiplier.is_finite() {
            return Err(Error::domain(
                "intensity_multiplier",
                intensity_multiplier,
                "multiplier > 0",
            ));
        }
        Ok(Self {
            d,
            lambda,
            radius,
            intensity_multiplier,
            geometry,
        })
    }

    pub fn geometry(&self) -> &LambdaGeometry {
        &self.geometry
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::with_multiplier(self.d, self.lambda, radius, self.intensity_multiplier)
    }
}

/// `κ_n` and `ω_n = n κ_n` for the Euclidean unit ball in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionConstants {
    pub kappa: f64,
    pub omega: f64,
}

impl DimensionConstants {
    pub fn new(n: usize) -> Self {
        Self {
            kappa: unit_ball_volume(n),
            omega: unit_sphere_area(n),
        }
    }
}

fn check_ball_args(d: usize, radius: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "d >= 2 required",
        });
    }
    if !(radius >= 0.0) {
        return Err(Error::domain("R", radius, "R >= 0"));
    }
    Ok(())
}

/// `ln H^d(B_R)`; `-inf` for `R = 0`.
pub fn ln_ball_volume(d: usize, radius: f64) -> Result<f64> {
    check_ball_args(d, radius)?;
    Ok(unit_sphere_area(d).ln() + ln_sinh_power_integral((d - 1) as u32, radius))
}

/// Hyperbolic volume of a ball of radius `R` in `H^d`, `ω_d ∫_0^R sinh^{d-1}`.
pub fn ball_volume(d: usize, radius: f64) -> Result<f64> {
    Ok(ln_ball_volume(d, radius)?.exp())
}

/// `ln(q - 1)` where `q = cosh ρ(s; R)`, using
/// `q - 1 = μ (cosh R − cosh s) / cosh(s − Δ)` and
/// `cosh R − cosh s = 2 sinh((R+s)/2) sinh((R−s)/2)` so that nothing cancels
/// near the rim `|s| = R`.
fn ln_q_minus_one(mu: f64, delta: f64, s: f64, radius: f64) -> f64 {
    let plus = 0.5 * (radius + s);
    let minus = 0.5 * (radius - s);
    if plus <= 0.0 || minus <= 0.0 {
        return f64::NEG_INFINITY;
    }
    mu.ln() + LN_2 + ln_sinh(plus) + ln_sinh(minus) - ln_cosh(s - delta)
}

/// Intrinsic radius of the section `H(s) ∩ B_R` for `λ < 1`.
///
/// `Ok(None)` signals an empty section (`|s| > R`). At `|s| = R` the section is
/// a single point and the radius is 0.
pub fn rho(geom: &LambdaGeometry, s: f64, radius: f64) -> Result<Option<f64>> {
    let delta = geom.finite_delta()?;
    if s.abs() > radius {
        return Ok(None);
    }
    Ok(Some(arcosh_1p_ln(ln_q_minus_one(geom.mu, delta, s, radius))))
}

/// Lower and upper bounds on `ρ(s; R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoBounds {
    pub arcosh_lo: f64,
    pub arcosh_hi: f64,
    pub linear_lo: f64,
    pub linear_hi: f64,
}

pub fn rho_bounds(geom: &LambdaGeometry, s: f64, radius: f64) -> Result<Option<RhoBounds>> {
    let delta = geom.finite_delta()?;
    if s.abs() > radius {
        return Ok(None);
    }
    let u = s - delta;
    let lc = ln_cosh(u);
    Ok(Some(RhoBounds {
        arcosh_lo: arcosh_exp(ln_cosh(radius - delta) - lc),
        arcosh_hi: arcosh_exp(ln_cosh(radius + delta) - lc),
        linear_lo: radius - delta - u.abs(),
        linear_hi: radius + delta - u.abs() + LN_2,
    }))
}

/// `ln H^{d-1}(H(s) ∩ B_R)`, `-inf` for an empty or degenerate section.
pub fn ln_intersection_volume(config: &ModelConfig, s: f64) -> f64 {
    let r = config.radius;
    if s.abs() >= r {
        return f64::NEG_INFINITY;
    }
    let d = config.d;
    let geom = config.geometry();
    match geom.delta {
        Extended::Infinite => {
            // κ_{d-1} [2 e^s (cosh R − cosh s)]^{(d-1)/2}
            let ln_diff = LN_2 + ln_sinh(0.5 * (r + s)) + ln_sinh(0.5 * (r - s));
            unit_ball_volume(d - 1).ln() + 0.5 * (d - 1) as f64 * (LN_2 + s + ln_diff)
        }
        Extended::Finite(delta) => {
            let mu = geom.mu;
            let ln_qm1 = ln_q_minus_one(mu, delta, s, r);
            match d {
                2 => (2.0 * arcosh_1p_ln(ln_qm1) / mu).ln(),
                // (2π/μ²)(cosh ρ − 1)
                3 => (2.0 * PI).ln() - 2.0 * mu.ln() + ln_qm1,
                _ => {
                    let rho = arcosh_1p_ln(ln_qm1);
                    unit_sphere_area(d - 1).ln() - (d - 1) as f64 * mu.ln()
                        + ln_sinh_power_integral((d - 2) as u32, rho)
                }
            }
        }
    }
}

/// `(d−1)`-volume of the section of `B_R` by a λ-geodesic hyperplane at signed
/// distance `s`; zero when `|s| >= R`.
pub fn intersection_volume(config: &ModelConfig, s: f64) -> f64 {
    ln_intersection_volume(config, s).exp()
}

fn bound_preconditions(config: &ModelConfig) -> Result<f64> {
    if config.d < 3 {
        return Err(Error::UnsupportedDimension {
            d: config.d,
            reason: "section volume bounds need d >= 3",
        });
    }
    config.geometry().finite_delta()
}

pub fn ln_intersection_volume_bound(config: &ModelConfig, s: f64) -> Result<f64> {
    let delta = bound_preconditions(config)?;
    let d = config.d;
    let n = (d - 2) as f64;
    Ok(unit_sphere_area(d - 1).ln() - (d - 1) as f64 * config.geometry().mu.ln() - n.ln()
        + n * (ln_cosh(config.radius + delta) - ln_cosh(s - delta)))
}

/// Upper bound `(ω_{d−1}/μ^{d−1}) (1/(d−2)) [cosh(R+Δ)/cosh(s−Δ)]^{d−2}` on the
/// section volume, valid for `|s| <= R`.
pub fn intersection_volume_bound(config: &ModelConfig, s: f64) -> Result<f64> {
    Ok(ln_intersection_volume_bound(config, s)?.exp())
}

pub fn ln_intersection_volume_asymptote(config: &ModelConfig, s: f64) -> Result<f64> {
    let delta = bound_preconditions(config)?;
    let d = config.d;
    let n = (d - 2) as f64;
    Ok(unit_sphere_area(d - 1).ln() - n.ln() - n * LN_2 - config.geometry().mu.ln()
        + n * config.radius
        - n * ln_cosh(s - delta))
}

/// Large-`R` equivalent of the section volume at fixed `s`:
/// `ω_{d−1}/((d−2)2^{d−2}) · μ^{−1} e^{(d−2)R} cosh^{−(d−2)}(s−Δ)`.
pub fn intersection_volume_asymptote(config: &ModelConfig, s: f64) -> Result<f64> {
    Ok(ln_intersection_volume_asymptote(config, s)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn lambda_constants() {
        let g = lambda_geometry(0.0).unwrap();
        assert!(close(g.theta, PI / 2.0, 1e-15));
        assert_eq!(g.mu, 1.0);
        assert_eq!(g.delta, Extended::Finite(0.0));
        assert!(g.slope.is_infinite());

        let g = lambda_geometry(1.0).unwrap();
        assert_eq!(g.mu, 0.0);
        assert!(g.delta.is_infinite());
        assert!(g.is_horosphere());
        assert!(g.finite_delta().is_err());

        let g = lambda_geometry(0.5).unwrap();
        let delta = g.delta.finite().unwrap();
        assert!(close(delta, 0.5 * 3f64.ln(), 1e-15));
        assert!(close(delta, 0.549_306_1, 1e-7));
        assert!(close(delta.cosh(), 1.0 / g.mu, 1e-14));
        assert!(close(delta.sinh(), 0.5 / g.mu, 1e-14));
        assert!(close(g.slope.finite().unwrap(), g.theta.tan(), 1e-14));

        assert!(lambda_geometry(-0.1).is_err());
        assert!(lambda_geometry(1.5).is_err());
        assert!(lambda_geometry(f64::NAN).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ModelConfig::new(1, 0.0, 1.0).is_err());
        assert!(ModelConfig::new(2, 1.2, 1.0).is_err());
        assert!(ModelConfig::new(2, 0.5, 0.0).is_err());
        assert!(ModelConfig::with_multiplier(2, 0.5, 1.0, 0.0).is_err());
        assert!(ModelConfig::with_multiplier(2, 0.5, 1.0, 0.5).is_ok());
    }

    #[test]
    fn ball_volume_examples() {
        let v = ball_volume(2, 1.0).unwrap();
        assert!(close(v, 2.0 * PI * (1f64.cosh() - 1.0), 1e-14));
        assert!(close(v, 3.412_276_265, 1e-9));
        for d in 2..8 {
            assert_eq!(ball_volume(d, 0.0).unwrap(), 0.0);
        }
        // 4π ∫_0^2 sinh² = π (sinh 4 − 4)
        let v = ball_volume(3, 2.0).unwrap();
        assert!(close(v, PI * (4f64.sinh() - 4.0), 1e-13));
        assert!(ball_volume(1, 1.0).is_err());
    }

    #[test]
    fn rho_geodesic_cases() {
        let g = lambda_geometry(0.0).unwrap();
        for &r in &[0.5, 3.0, 20.0, 300.0] {
            assert!(close(rho(&g, 0.0, r).unwrap().unwrap(), r, 1e-13));
        }
        for &(s, r) in &[(0.3, 1.0), (-2.0, 5.0), (4.9, 5.0)] {
            let expect = (f64::cosh(r) / f64::cosh(s)).acosh();
            assert!(close(rho(&g, s, r).unwrap().unwrap(), expect, 1e-9));
        }
        assert_eq!(rho(&g, 2.0, 1.0).unwrap(), None);
        assert_eq!(rho(&g, 1.0, 1.0).unwrap(), Some(0.0));
        let h = lambda_geometry(1.0).unwrap();
        assert!(rho(&h, 0.0, 1.0).is_err());
    }

    #[test]
    fn rho_is_finite_at_huge_radius() {
        let g = lambda_geometry(0.7).unwrap();
        for &s in &[-699.0, -10.0, 0.0, 0.8, 350.0, 699.9] {
            let r = rho(&g, s, 700.0).unwrap().unwrap();
            assert!(r.is_finite() && r >= 0.0);
            let b = rho_bounds(&g, s, 700.0).unwrap().unwrap();
            assert!(b.arcosh_lo.is_finite() && b.arcosh_hi.is_finite());
        }
        let cfg = ModelConfig::new(2, 0.7, 700.0).unwrap();
        assert!(intersection_volume(&cfg, 3.0).is_finite());
        assert!(ball_volume(2, 700.0).unwrap().is_finite());
        let cfg = ModelConfig::new(6, 0.3, 700.0).unwrap();
        assert!(ln_intersection_volume(&cfg, 3.0).is_finite());
        assert!(ln_intersection_volume_bound(&cfg, 3.0).unwrap().is_finite());
        assert!(ln_ball_volume(9, 700.0).unwrap().is_finite());
    }

    #[test]
    fn section_volume_examples() {
        let r = 1.5f64.acosh();
        let cfg = ModelConfig::new(2, 1.0, r).unwrap();
        assert!(close(intersection_volume(&cfg, 0.0), 2.0, 1e-13));
        assert_eq!(intersection_volume(&cfg, r + 0.1), 0.0);

        let cfg = ModelConfig::new(2, 0.0, 3.0).unwrap();
        for &s in &[-2.0, 0.0, 1.1] {
            let expect = 2.0 * (3f64.cosh() / f64::cosh(s)).acosh();
            assert!(close(intersection_volume(&cfg, s), expect, 1e-12));
        }

        // d = 3 closed form (2π/μ)(cosh R − cosh s)/cosh(s−Δ)
        let cfg = ModelConfig::new(3, 0.5, 2.0).unwrap();
        let g = cfg.geometry();
        let delta = g.delta.finite().unwrap();
        for &s in &[-1.5, 0.0, 0.4, 1.9] {
            let expect = 2.0 * PI / g.mu * (2f64.cosh() - f64::cosh(s)) / (s - delta).cosh();
            assert!(close(intersection_volume(&cfg, s), expect, 1e-12));
        }
    }

    #[test]
    fn section_volume_matches_generic_integral() {
        // every dimension against ω_{d−1}/μ^{d−1} ∫_0^ρ sinh^{d−2} by plain quadrature
        for d in 2..=7 {
            for &lambda in &[0.0, 0.35, 0.9] {
                let cfg = ModelConfig::new(d, lambda, 4.0).unwrap();
                let g = cfg.geometry();
                for &s in &[-3.5, -0.2, 1.3, 3.9] {
                    let rh = rho(g, s, 4.0).unwrap().unwrap();
                    let q = crate::numerics::gauss_kronrod(
                        |u| u.sinh().powi(d as i32 - 2),
                        &[0.0, rh],
                        crate::numerics::QuadOptions::with_rel_tol(1e-13),
                    )
                    .value;
                    let expect = unit_sphere_area(d - 1) / g.mu.powi(d as i32 - 1) * q;
                    let got = intersection_volume(&cfg, s);
                    assert!(close(got, expect, 1e-9), "d={d} λ={lambda} s={s}: {got} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn bound_and_asymptote() {
        let cfg = ModelConfig::new(2, 0.0, 3.0).unwrap();
        assert!(matches!(
            intersection_volume_bound(&cfg, 0.0),
            Err(Error::UnsupportedDimension { d: 2, .. })
        ));
        let cfg = ModelConfig::new(4, 1.0, 3.0).unwrap();
        assert!(intersection_volume_bound(&cfg, 0.0).is_err());

        let cfg = ModelConfig::new(5, 0.0, 3.0).unwrap();
        let b = intersection_volume_bound(&cfg, 0.0).unwrap();
        let expect = unit_sphere_area(4) / 3.0 * 3f64.cosh().powi(3);
        assert!(close(b, expect, 1e-12));
        assert!(b >= intersection_volume(&cfg, 0.0));

        let cfg = ModelConfig::new(3, 0.0, 2.0).unwrap();
        assert_eq!(intersection_volume(&cfg, 2.0), 0.0);
        assert!(intersection_volume_bound(&cfg, 2.0).unwrap() > 0.0);

        let cfg = ModelConfig::new(3, 0.0, 5.0).unwrap();
        assert!(close(
            intersection_volume_asymptote(&cfg, 0.0).unwrap(),
            PI * 5f64.exp(),
            1e-13
        ));

        let cfg = ModelConfig::new(4, 0.0, 10.0).unwrap();
        let ratio = intersection_volume(&cfg, 0.0) / intersection_volume_asymptote(&cfg, 0.0).unwrap();
        assert!((ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn asymptote_ratio_converges_monotonically() {
        for &lambda in &[0.0, 0.5] {
            let mut last = f64::INFINITY;
            for &r in &[4.0, 6.0, 8.0, 10.0] {
                let cfg = ModelConfig::new(4, lambda, r).unwrap();
                let ratio = intersection_volume(&cfg, 0.7)
                    / intersection_volume_asymptote(&cfg, 0.7).unwrap();
                let gap = (ratio - 1.0).abs();
                assert!(gap < last, "λ={lambda} R={r}: gap {gap} not below {last}");
                last = gap;
            }
            assert!(last < 1e-3);
        }
    }
}

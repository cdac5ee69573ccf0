//! The total surface functional `S_R`, its moments `I_{λ,k}(R)` and the
//! normalized section profile.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    ball_volume, intersection_volume, ln_ball_volume, ln_intersection_volume,
    ln_intersection_volume_asymptote, Extended, ModelConfig,
};
use crate::numerics::{
    cosh_power_full_integral, gauss_kronrod, ln_cosh, ln_sinh, unit_ball_volume,
    unit_sphere_area, CompensatedSum, QuadOptions,
};
use crate::sampling::{ProcessSample, ProcessSampler};

/// Largest moment order accepted by [`cumulant_integral`].
pub const MAX_CUMULANT_ORDER: u32 = 8;

/// Requested relative accuracy of the moment integrals.
pub const CUMULANT_REL_TOL: f64 = 1e-9;

/// Total `(d−1)`-volume inside `B_R`, split by the sign of `s` (`s = 0` counts as positive).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceResult {
    pub value: f64,
    pub positive_part: f64,
    pub negative_part: f64,
}

impl SurfaceResult {
    pub fn from_distances<I: IntoIterator<Item = f64>>(config: &ModelConfig, distances: I) -> Self {
        let mut pos = CompensatedSum::new();
        let mut neg = CompensatedSum::new();
        for s in distances {
            let v = intersection_volume(config, s);
            if s >= 0.0 {
                pos.add(v);
            } else {
                neg.add(v);
            }
        }
        let (positive_part, negative_part) = (pos.value(), neg.value());
        Self {
            value: positive_part + negative_part,
            positive_part,
            negative_part,
        }
    }
}

pub fn total_surface_area(sample: &ProcessSample) -> SurfaceResult {
    SurfaceResult::from_distances(&sample.config, sample.coords.iter().map(|c| c.s))
}

/// `S_R` for replicates `0..n` of `seed`, in replicate order. Directions are
/// not drawn.
pub fn simulate_surface_areas(config: &ModelConfig, n: usize, seed: u64) -> Vec<SurfaceResult> {
    let sampler = ProcessSampler::new(config).with_directions(false);
    (0..n as u64)
        .into_par_iter()
        .map(|i| total_surface_area(&sampler.sample(seed, i)))
        .collect()
}

/// CSV with columns `replicate,S,S_plus,S_minus`.
pub fn replicate_csv(results: &[SurfaceResult]) -> String {
    let mut out = String::from("replicate,S,S_plus,S_minus\n");
    for (i, r) in results.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{},{}", r.value, r.positive_part, r.negative_part);
    }
    out
}

/// `E S_R = multiplier · H^d(B_R)`, the same for every `λ`.
pub fn expected_surface_area(config: &ModelConfig) -> f64 {
    config.intensity_multiplier * ball_volume(config.d, config.radius).expect("validated config")
}

fn ln_density(config: &ModelConfig, s: f64) -> f64 {
    let n = (config.d - 1) as f64;
    let g = config.geometry();
    let base = match g.delta {
        Extended::Infinite => -s,
        Extended::Finite(delta) => g.mu.ln() + ln_cosh(s - delta),
    };
    config.intensity_multiplier.ln() + n * base
}

/// `Σ_{n≥2} (n−1) x^{2n+1}/(2n+1)!`, i.e. `x + (x/2) cosh x − (3/2) sinh x`.
fn ln_d3_bracket(radius: f64) -> f64 {
    let x = 2.0 * radius;
    if x < 2.0 {
        let x2 = x * x;
        let mut term = x.powi(5) / 120.0; // n = 2
        let mut sum = term;
        let mut n = 2.0;
        loop {
            // x^{2n+1}/(2n+1)! -> x^{2n+3}/(2n+3)!
            term *= x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0)) * (n / (n - 1.0));
            n += 1.0;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum.ln()
    } else if x < 40.0 {
        (x + 0.5 * x * x.cosh() - 1.5 * x.sinh()).ln()
    } else {
        x - 4f64.ln() + (x - 3.0).ln()
    }
}

/// `ln(2R cosh R − 2 sinh R)`.
fn ln_horo_d2_bracket(radius: f64) -> f64 {
    if radius < 1.0 {
        // 2 Σ_{n≥1} 2n R^{2n+1}/(2n+1)!
        let r2 = radius * radius;
        let mut fact_term = radius.powi(3) / 6.0; // R^3/3!
        let mut sum = 0.0;
        let mut n = 1.0;
        loop {
            let t = 2.0 * n * fact_term;
            sum += t;
            if t < 1e-17 * sum {
                break;
            }
            fact_term *= r2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
            n += 1.0;
        }
        (2.0 * sum).ln()
    } else if radius < 30.0 {
        (2.0 * radius * radius.cosh() - 2.0 * radius.sinh()).ln()
    } else {
        radius + (radius - 1.0).ln()
    }
}

/// Log-domain adaptive quadrature of `exp(ln_f)` on `[lo, hi]`, shifted by the
/// running maximum of `ln_f` over a probe grid.
fn ln_integrate<F: Fn(f64) -> f64>(
    ln_f: F,
    lo: f64,
    hi: f64,
    extra_breaks: &[f64],
    what: &'static str,
) -> Result<f64> {
    const PROBES: usize = 256;
    let mut shift = f64::NEG_INFINITY;
    let mut arg = 0.5 * (lo + hi);
    for j in 1..PROBES {
        let s = lo + (hi - lo) * j as f64 / PROBES as f64;
        let v = ln_f(s);
        if v > shift {
            shift = v;
            arg = s;
        }
    }
    if !shift.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    let mut breaks = vec![lo, hi, arg];
    breaks.extend(extra_breaks.iter().copied().filter(|&b| b > lo && b < hi));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let est = gauss_kronrod(
        |s| (ln_f(s) - shift).exp(),
        &breaks,
        QuadOptions {
            rel_tol: 0.1 * CUMULANT_REL_TOL,
            abs_tol: 0.0,
            max_intervals: 8000,
        },
    );
    if !(est.error <= CUMULANT_REL_TOL * est.value.abs()) || !(est.value > 0.0) {
        return Err(Error::NumericalFailure {
            what,
            achieved: est.error / est.value.abs(),
            requested: CUMULANT_REL_TOL,
        });
    }
    Ok(shift + est.value.ln())
}

fn check_order(k: u32) -> Result<()> {
    if k == 0 || k > MAX_CUMULANT_ORDER {
        return Err(Error::domain(
            "k",
            f64::from(k),
            "1 <= k <= 8 (MAX_CUMULANT_ORDER)",
        ));
    }
    Ok(())
}

/// `ln I_{λ,k}(R)`; `-inf` when `R = 0`.
pub fn ln_cumulant_integral(config: &ModelConfig, k: u32) -> Result<f64> {
    check_order(k)?;
    let r = config.radius;
    let d = config.d;
    let ln_mult = config.intensity_multiplier.ln();
    if k == 2 {
        if d == 3 {
            return Ok(ln_mult + 2.0 * (2.0 * std::f64::consts::PI).ln() + ln_d3_bracket(r));
        }
        if config.geometry().is_horosphere() {
            // 2^{d−1} κ_{d−1}² ∫ (cosh R − cosh s)^{d−1} ds
            let n = (d - 1) as f64;
            let head = ln_mult + n * std::f64::consts::LN_2 + 2.0 * unit_ball_volume(d - 1).ln();
            if d == 2 {
                return Ok(head + ln_horo_d2_bracket(r));
            }
            let ln_diff = |s: f64| {
                if s.abs() >= r {
                    return f64::NEG_INFINITY;
                }
                n * (std::f64::consts::LN_2 + ln_sinh(0.5 * (r + s)) + ln_sinh(0.5 * (r - s)))
            };
            return Ok(head + ln_integrate(ln_diff, -r, r, &[0.0], "horosphere variance integral")?);
        }
    }
    let kf = f64::from(k);
    let ln_f = |s: f64| kf * ln_intersection_volume(config, s) + ln_density(config, s);
    let breaks: Vec<f64> = match config.geometry().delta {
        Extended::Finite(delta) => vec![delta],
        Extended::Infinite => vec![],
    };
    ln_integrate(ln_f, -r, r, &breaks, "moment integral")
}

/// `I_{λ,k}(R) = multiplier ∫ V(s)^k (cosh s − λ sinh s)^{d−1} ds`, the k-th cumulant of `S_R`.
pub fn cumulant_integral(config: &ModelConfig, k: u32) -> Result<f64> {
    Ok(ln_cumulant_integral(config, k)?.exp())
}

/// `Var S_R = I_{λ,2}(R)`.
pub fn variance(config: &ModelConfig) -> Result<f64> {
    cumulant_integral(config, 2)
}

/// Logarithm of [`variance_order`].
pub fn ln_variance_order(config: &ModelConfig) -> f64 {
    let r = config.radius;
    let d = config.d as f64;
    if config.geometry().is_horosphere() {
        return r.ln() + (d - 1.0) * r;
    }
    match config.d {
        2 => r,
        3 => r.ln() + 2.0 * r,
        _ => 2.0 * (d - 2.0) * r,
    }
}

/// Growth order of the variance, without constants: `e^R` (`d = 2`),
/// `R e^{2R}` (`d = 3`), `e^{2(d−2)R}` (`d ≥ 4`) for `λ < 1`, and
/// `R e^{(d−1)R}` for horospheres.
pub fn variance_order(config: &ModelConfig) -> f64 {
    ln_variance_order(config).exp()
}

/// `(ω_{d−1}/((d−2)2^{d−2}))`, the leading constant of the section profile.
fn profile_constant(d: usize) -> f64 {
    unit_sphere_area(d - 1) / ((d - 2) as f64 * 2f64.powi(d as i32 - 2))
}

/// `lim_R I_{λ,k}(R) e^{−k(d−2)R}` for `d ≥ 4`, `λ < 1`.
pub fn normalized_cumulant_limit(d: usize, lambda: f64, k: u32, multiplier: f64) -> Result<f64> {
    if d < 4 {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "the normalized moment limit exists for d >= 4",
        });
    }
    let g = crate::geometry::LambdaGeometry::new(lambda)?;
    if g.is_horosphere() {
        return Err(Error::Unsupported("normalized moment limit needs lambda < 1"));
    }
    if k < 2 {
        return Err(Error::domain("k", f64::from(k), "k >= 2"));
    }
    let h = f64::from(k) * (d - 2) as f64 - (d - 1) as f64;
    let integral = cosh_power_full_integral(h)?;
    Ok(multiplier
        * profile_constant(d).powi(k as i32)
        * g.mu.powf((d - 1) as f64 - f64::from(k))
        * integral)
}

/// `g_R(s) = e^{−(d−2)R} V(s)`.
pub fn normalized_profile(config: &ModelConfig, s: f64) -> Result<f64> {
    profile_preconditions(config.d, config.geometry().is_horosphere())?;
    Ok((ln_intersection_volume(config, s) - (config.d - 2) as f64 * config.radius).exp())
}

/// `lim_R g_R(s) = (ω_{d−1}/((d−2)2^{d−2})) μ^{−1} cosh^{−(d−2)}(s − Δ)`.
pub fn limit_profile(d: usize, lambda: f64, s: f64) -> Result<f64> {
    let cfg = ModelConfig::new(d, lambda, 1.0)?;
    profile_preconditions(d, cfg.geometry().is_horosphere())?;
    Ok((ln_intersection_volume_asymptote(&cfg, s)? - (d - 2) as f64).exp())
}

fn profile_preconditions(d: usize, horosphere: bool) -> Result<()> {
    if d < 3 {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "the section profile needs d >= 3",
        });
    }
    if horosphere {
        return Err(Error::Unsupported("the section profile needs lambda < 1"));
    }
    Ok(())
}

/// `√I_{λ,4} / I_{λ,2}`, the quantity controlling the normal approximation error.
pub fn berry_esseen_indicator(config: &ModelConfig) -> Result<f64> {
    let l4 = ln_cumulant_integral(config, 4)?;
    let l2 = ln_cumulant_integral(config, 2)?;
    Ok((0.5 * l4 - l2).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantEntry {
    pub k: u32,
    pub radius: f64,
    pub value: f64,
}

/// `I_{λ,k}(R)` over a grid of orders and radii.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantTable {
    pub d: usize,
    pub lambda: f64,
    pub multiplier: f64,
    pub entries: Vec<CumulantEntry>,
}

impl CumulantTable {
    pub fn compute(config: &ModelConfig, ks: &[u32], radii: &[f64]) -> Result<Self> {
        let mut entries = Vec::with_capacity(ks.len() * radii.len());
        for &radius in radii {
            let cfg = config.with_radius(radius)?;
            for &k in ks {
                entries.push(CumulantEntry {
                    k,
                    radius,
                    value: cumulant_integral(&cfg, k)?,
                });
            }
        }
        Ok(Self {
            d: config.d,
            lambda: config.lambda,
            multiplier: config.intensity_multiplier,
            entries,
        })
    }

    pub fn get(&self, k: u32, radius: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.k == k && e.radius == radius)
            .map(|e| e.value)
    }

    /// CSV with columns `d,lambda,R,k,I_value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,lambda,R,k,I_value\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{},{}", self.d, self.lambda, e.radius, e.k, e.value);
        }
        out
    }
}

/// `ln E S_R`, finite for large `R`.
pub fn ln_expected_surface_area(config: &ModelConfig) -> f64 {
    config.intensity_multiplier.ln()
        + ln_ball_volume(config.d, config.radius).expect("validated config")
}

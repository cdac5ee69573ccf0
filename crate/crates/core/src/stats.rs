//! Empirical cumulants, distributional distances and regime reports.

use std::fmt::Write as _;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::functionals::{
    berry_esseen_indicator, expected_surface_area, simulate_surface_areas, variance,
};
use crate::geometry::ModelConfig;
use crate::limit::{InvertedCdf, LimitLawSpec};
use crate::numerics::CompensatedSum;

/// Asymptotic Kolmogorov critical values `c(α)`: reject when `√n · KS > c(α)`.
pub const KS_CRITICAL: [(f64, f64); 3] = [(0.10, 1.2239), (0.05, 1.3581), (0.01, 1.6276)];

/// Critical KS distance at level `alpha ∈ {0.10, 0.05, 0.01}` for sample size `n`.
pub fn ks_critical_value(alpha: f64, n: usize) -> Option<f64> {
    KS_CRITICAL
        .iter()
        .find(|(a, _)| (a - alpha).abs() < 1e-12)
        .map(|(_, c)| c / (n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KStatistics {
    pub n: usize,
    pub mean: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl KStatistics {
    /// Estimated variance of `k2`, `k4/n + 2 k2²/(n−1)`.
    pub fn k2_variance(&self) -> f64 {
        let n = self.n as f64;
        self.k4 / n + 2.0 * self.k2 * self.k2 / (n - 1.0)
    }
}

/// Unbiased cumulant estimators from central power sums.
pub fn k_statistics(samples: &[f64]) -> Result<KStatistics> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::domain("n", n as f64, "at least 4 samples"));
    }
    let nf = n as f64;
    let mean = samples.iter().copied().collect::<CompensatedSum>().value() / nf;
    let (mut s2, mut s3, mut s4) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for &x in samples {
        let c = x - mean;
        let c2 = c * c;
        s2.add(c2);
        s3.add(c2 * c);
        s4.add(c2 * c2);
    }
    let (m2, m3, m4) = (s2.value() / nf, s3.value() / nf, s4.value() / nf);
    let k2 = nf * m2 / (nf - 1.0);
    let k3 = nf * nf * m3 / ((nf - 1.0) * (nf - 2.0));
    let k4 = nf * nf * ((nf + 1.0) * m4 - 3.0 * (nf - 1.0) * m2 * m2)
        / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0));
    Ok(KStatistics {
        n,
        mean,
        k2,
        k3,
        k4,
    })
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample Kolmogorov–Smirnov distance on already sorted data.
pub fn ks_distance_sorted<F: Fn(f64) -> f64>(sorted: &[f64], reference_cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = reference_cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.abs().max(below.abs())
        })
        .fold(0.0, f64::max)
}

/// `sup_x |F_n(x) − F(x)|`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], reference_cdf: F) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    ks_distance_sorted(&sorted(samples), reference_cdf)
}

/// Two-sample KS distance `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = 0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// `(1/n) Σ |x_(i) − Q((i − ½)/n)|`.
pub fn wasserstein1<Q: Fn(f64) -> f64>(samples: &[f64], reference_quantile: Q) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let v = sorted(samples);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - reference_quantile((i as f64 + 0.5) / n)).abs())
        .collect::<CompensatedSum>()
        .value()
        / n
}

/// Normal CDF with the given mean and variance.
pub fn normal_cdf(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
    let dist = Normal::new(mean, var.sqrt()).expect("positive variance");
    move |x| dist.cdf(x)
}

/// Normal quantile function with the given mean and variance.
pub fn normal_quantile(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
    let dist = Normal::new(mean, var.sqrt()).expect("positive variance");
    move |p| dist.inverse_cdf(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub n: usize,
    pub mean: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub ks_vs_reference: f64,
    pub w1_vs_reference: f64,
    pub reference_tag: String,
}

impl EmpiricalSummary {
    pub fn new<F, Q>(samples: &[f64], reference_tag: &str, cdf: F, quantile: Q) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        Q: Fn(f64) -> f64,
    {
        let k = k_statistics(samples)?;
        let v = sorted(samples);
        Ok(Self {
            n: k.n,
            mean: k.mean,
            k2: k.k2,
            k3: k.k3,
            k4: k.k4,
            ks_vs_reference: ks_distance_sorted(&v, cdf),
            w1_vs_reference: wasserstein1(&v, quantile),
            reference_tag: reference_tag.to_string(),
        })
    }
}

/// One radius of a regime report. Samples are `(S − E S)/√Var S` with the
/// analytic mean and variance.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeRow {
    pub d: usize,
    pub lambda: f64,
    pub radius: f64,
    pub n: usize,
    pub mean: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub ks_normal1: f64,
    pub ks_normal_half: f64,
    /// KS against the limit law of the regime: `N(0,1)` for `d ≤ 3`, `λ < 1`;
    /// `N(0,½)` for horospheres; the rescaled infinitely divisible law for `d ≥ 4`.
    pub ks_limit: f64,
    pub w1_limit: f64,
    pub be_indicator: f64,
    /// Mean share of `S` coming from hyperplanes with `s ≥ 0`.
    pub positive_share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub rows: Vec<RegimeRow>,
}

pub const REGIME_CSV_HEADER: &str =
    "d,lambda,R,n,mean,k2,k3,k4,ks_normal1,ks_normal_half,ks_limit,w1_limit,be_indicator";

impl RegimeReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{REGIME_CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.d,
                r.lambda,
                r.radius,
                r.n,
                r.mean,
                r.k2,
                r.k3,
                r.k4,
                r.ks_normal1,
                r.ks_normal_half,
                r.ks_limit,
                r.w1_limit,
                r.be_indicator
            );
        }
        out
    }
}

/// Limit reference of the non-Gaussian regime, built once per report.
struct LimitReference {
    scale: f64,
    cdf: InvertedCdf,
}

pub fn regime_report(
    d: usize,
    lambda: f64,
    radii: &[f64],
    n_replicates: usize,
    seed: u64,
) -> Result<RegimeReport> {
    let template = ModelConfig::new(d, lambda, radii.first().copied().unwrap_or(1.0))?;
    regime_report_for(&template, radii, n_replicates, seed)
}

/// Regime report for the `(d, λ, multiplier)` of `template` at each radius.
pub fn regime_report_for(
    template: &ModelConfig,
    radii: &[f64],
    n_replicates: usize,
    seed: u64,
) -> Result<RegimeReport> {
    if radii.is_empty() {
        return Err(Error::Unsupported("empty radius list"));
    }
    if n_replicates < 4 {
        return Err(Error::domain("n", n_replicates as f64, "at least 4 replicates"));
    }
    let d = template.d;
    let horosphere = template.geometry().is_horosphere();
    let limit = if d >= 4 && !horosphere {
        let spec = LimitLawSpec::for_config(template)?;
        Some(LimitReference {
            scale: spec.scale_constant,
            cdf: InvertedCdf::standard(&spec)?,
        })
    } else {
        None
    };
    let std1 = normal_cdf(0.0, 1.0);
    let half = normal_cdf(0.0, 0.5);
    let mut rows = Vec::with_capacity(radii.len());
    for &radius in radii {
        let cfg = template.with_radius(radius)?;
        let results = simulate_surface_areas(&cfg, n_replicates, seed);
        let mean_s = expected_surface_area(&cfg);
        let var_s = variance(&cfg)?;
        let sd = var_s.sqrt();
        let z: Vec<f64> = results.iter().map(|r| (r.value - mean_s) / sd).collect();
        let positive_share = results
            .iter()
            .map(|r| if r.value > 0.0 { r.positive_part / r.value } else { 0.0 })
            .sum::<f64>()
            / n_replicates as f64;
        let k = k_statistics(&z)?;
        let zs = sorted(&z);
        let ks_normal1 = ks_distance_sorted(&zs, &std1);
        let ks_normal_half = ks_distance_sorted(&zs, &half);
        let (ks_limit, w1_limit) = match &limit {
            Some(lim) => {
                // z = (S − E S)/√Var ≈ scale · e^{(d−2)R} Z / √Var
                let ln_factor = lim.scale.ln() + (d - 2) as f64 * radius - 0.5 * var_s.ln();
                let factor = ln_factor.exp();
                (
                    ks_distance_sorted(&zs, |x| lim.cdf.cdf(x / factor)),
                    wasserstein1(&zs, |p| factor * lim.cdf.quantile(p)),
                )
            }
            None if horosphere => (ks_normal_half, wasserstein1(&zs, normal_quantile(0.0, 0.5))),
            None => (ks_normal1, wasserstein1(&zs, normal_quantile(0.0, 1.0))),
        };
        rows.push(RegimeRow {
            d,
            lambda: cfg.lambda,
            radius,
            n: n_replicates,
            mean: k.mean,
            k2: k.k2,
            k3: k.k3,
            k4: k.k4,
            ks_normal1,
            ks_normal_half,
            ks_limit,
            w1_limit,
            be_indicator: berry_esseen_indicator(&cfg)?,
            positive_share,
        });
    }
    Ok(RegimeReport { rows })
}

//! The infinitely divisible limit laws `Z_d` and `Z_{d,λ}` of the
//! non-Gaussian regime `d ≥ 4`.
//!
//! `Z = lim_T (Σ_{s∈ζ, s≤T} h(s) − rate·sinh T)` where `h = cosh^{−(d−2)}` and
//! `ζ` is Poisson on `[0, ∞)` with density `rate · cosh^{d−1}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{LambdaGeometry, ModelConfig};
use crate::numerics::{
    cosh_power_full_integral, cosh_power_tail, gauss_kronrod, kronrod15, ln_cosh,
    unit_sphere_area, QuadOptions,
};
use crate::sampling::{stream_rng, zeta_rate, StreamDomain, ZetaProcess};

/// Target expected number of exact jumps per draw, up to the factor in [`default_t0`].
const EXACT_POINTS_SCALE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitLawSpec {
    pub d: usize,
    pub lambda: f64,
    pub rate: f64,
    pub t0: f64,
    pub tail_variance: f64,
    pub scale_constant: f64,
}

impl LimitLawSpec {
    /// `Z_{d,λ}` with rate `2(1−λ²)^{(d−1)/2}`.
    pub fn new(d: usize, lambda: f64) -> Result<Self> {
        Self::with_rate(d, lambda, zeta_rate(d, lambda)?)
    }

    /// `Z_d`: rate 1, the unoriented geodesic convention.
    pub fn geodesic(d: usize) -> Result<Self> {
        Self::with_rate(d, 0.0, 1.0)
    }

    /// The law matching a model configuration; the rate scales with the
    /// intensity multiplier.
    pub fn for_config(config: &ModelConfig) -> Result<Self> {
        let rate = zeta_rate(config.d, config.lambda)? * config.intensity_multiplier;
        Self::with_rate(config.d, config.lambda, rate)
    }

    pub fn with_rate(d: usize, lambda: f64, rate: f64) -> Result<Self> {
        if d < 4 {
            return Err(Error::UnsupportedDimension {
                d,
                reason: "the non-Gaussian limit needs d >= 4",
            });
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::domain("rate", rate, "rate > 0"));
        }
        let scale_constant = limit_scale_constant(d, lambda)?;
        let t0 = default_t0(d, rate);
        Ok(Self {
            d,
            lambda,
            rate,
            t0,
            tail_variance: tail_variance(d, rate, t0)?,
            scale_constant,
        })
    }

    /// Replaces the exact-simulation cutoff.
    pub fn with_t0(self, t0: f64) -> Result<Self> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::domain("T0", t0, "T0 > 0"));
        }
        Ok(Self {
            t0,
            tail_variance: tail_variance(self.d, self.rate, t0)?,
            ..self
        })
    }

    /// Third cumulant of the compensated jumps beyond `T0`, i.e. the skewness
    /// the Gaussian tail substitute ignores.
    pub fn tail_third_cumulant(&self) -> Result<f64> {
        Ok(self.rate * cosh_power_tail((2 * self.d - 5) as f64, self.t0)?)
    }
}

/// Cutoff solving `rate · e^{(d−1)T0} / ((d−1) 2^{d−2}) = 1000`.
pub fn default_t0(d: usize, rate: f64) -> f64 {
    let n = (d - 1) as f64;
    let t = (EXACT_POINTS_SCALE * n * 2f64.powi(d as i32 - 2) / rate).ln() / n;
    t.max(0.5)
}

/// `rate · ∫_{T0}^∞ cosh^{3−d}(s) ds`.
pub fn tail_variance(d: usize, rate: f64, t0: f64) -> Result<f64> {
    Ok(rate * cosh_power_tail((d - 3) as f64, t0)?)
}

/// `ω_{d−1} / ((d−2) 2^{d−2} √(1−λ²))`, linking `(S − E S)/e^{(d−2)R}` to `Z_{d,λ}`.
pub fn limit_scale_constant(d: usize, lambda: f64) -> Result<f64> {
    if d < 4 {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "the non-Gaussian limit needs d >= 4",
        });
    }
    let g = LambdaGeometry::new(lambda)?;
    if g.is_horosphere() {
        return Err(Error::Unsupported("no scale constant for horospheres"));
    }
    Ok(unit_sphere_area(d - 1) / ((d - 2) as f64 * 2f64.powi(d as i32 - 2) * g.mu))
}

/// `cum_ℓ(Z) = rate · ∫_0^∞ cosh^{−((d−2)ℓ−(d−1))}(s) ds`; zero for `ℓ = 1`.
pub fn limit_cumulant(spec: &LimitLawSpec, ell: u32) -> Result<f64> {
    if ell == 0 {
        return Err(Error::domain("ell", 0.0, "ell >= 1"));
    }
    if ell == 1 {
        return Ok(0.0);
    }
    let d = spec.d as f64;
    let p = (d - 2.0) * f64::from(ell) - (d - 1.0);
    if p <= 0.0 {
        return Err(Error::domain("ell", f64::from(ell), "(d-2) ell > d-1"));
    }
    Ok(spec.rate * 0.5 * cosh_power_full_integral(p)?)
}

/// Lévy density of `Z_d` per unit rate:
/// `1 / ((d−2) y^{(2d−3)/(d−2)} √(1 − y^{2/(d−2)}))` on `(0, 1)`.
pub fn levy_density(d: usize, y: f64) -> Result<f64> {
    if d < 4 {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "the Lévy density is defined for d >= 4",
        });
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain("y", y, "0 < y < 1"));
    }
    let n = (d - 2) as f64;
    let ln_y = y.ln();
    let one_minus = -((2.0 / n) * ln_y).exp_m1();
    Ok(1.0 / (n * ((2.0 * n + 1.0) / n * ln_y).exp() * one_minus.sqrt()))
}

/// `sin x − x` without cancellation for small `x`.
fn sin_minus_id(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x.sin() - x
    }
}

/// `log ψ(t) = rate · ∫_0^∞ (e^{ith(s)} − 1 − ith(s)) cosh^{d−1}(s) ds`.
pub fn log_characteristic_function(spec: &LimitLawSpec, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = spec.d as f64;
    let at = t.abs();
    // tails: Re part ≤ t²/2 · 2^{d−3} e^{−(d−3)S}/(d−3), Im part ≤ |t|³/6 · 2^{2d−5} e^{−(2d−5)S}/(2d−5)
    let target = 1e-17_f64;
    let cut_re = ((0.5 * at * at * 2f64.powf(d - 3.0) / (d - 3.0)) / target).ln() / (d - 3.0);
    let cut_im = ((at.powi(3) / 6.0 * 2f64.powf(2.0 * d - 5.0) / (2.0 * d - 5.0)) / target).ln()
        / (2.0 * d - 5.0);
    let upper = cut_re.max(cut_im).max(1.0);
    let h_exp = d - 2.0;
    let c_exp = d - 1.0;
    let opts = QuadOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-16,
        max_intervals: 4000,
    };
    // where t·h(s) drops below 1 the integrand stops oscillating
    let knee = if at > 1.0 { (at.ln() / h_exp + 0.7).min(upper) } else { 0.5 };
    let breaks = [0.0, knee, upper];
    let re = gauss_kronrod(
        |s| {
            let lc = ln_cosh(s);
            let x = at * (-h_exp * lc).exp();
            let half = (0.5 * x).sin();
            -2.0 * half * half * (c_exp * lc).exp()
        },
        &breaks,
        opts,
    )
    .require("characteristic function (real part)")?;
    let im = gauss_kronrod(
        |s| {
            let lc = ln_cosh(s);
            let x = at * (-h_exp * lc).exp();
            sin_minus_id(x) * (c_exp * lc).exp()
        },
        &breaks,
        opts,
    )
    .require("characteristic function (imaginary part)")?;
    // the imaginary part is odd in t
    let im = if t < 0.0 { -im } else { im };
    Ok(spec.rate * Complex64::new(re, im))
}

/// `ψ(t) = E e^{itZ}`.
pub fn characteristic_function(spec: &LimitLawSpec, t: f64) -> Result<Complex64> {
    Ok(log_characteristic_function(spec, t)?.exp())
}

/// Hybrid draws: exact jumps on `[0, T0]`, compensated, plus an independent
/// `N(0, tail_variance)` for the small jumps beyond `T0`.
pub fn sample_limit(spec: &LimitLawSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    let zeta = ZetaProcess::new(spec.d, spec.rate, spec.t0)?;
    let compensator = spec.rate * spec.t0.sinh();
    let tail_sd = spec.tail_variance.sqrt();
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, StreamDomain::LimitLaw, i);
            let jumps = zeta.jump_sum(&mut rng);
            let g: f64 = StandardNormal.sample(&mut rng);
            jumps - compensator + tail_sd * g
        })
        .collect())
}

/// Upper truncation point: first `2^j` with `|ψ| < 1e−10`.
fn truncation_point(spec: &LimitLawSpec) -> Result<f64> {
    let mut t = 1.0;
    for _ in 0..40 {
        if log_characteristic_function(spec, t)?.re < (1e-10f64).ln() {
            return Ok(t);
        }
        t *= 2.0;
    }
    Err(Error::NumericalFailure {
        what: "characteristic function decay",
        achieved: log_characteristic_function(spec, t)?.re.exp(),
        requested: 1e-10,
    })
}

/// Pool-adjacent-violators fit; returns the fitted values.
fn isotonic(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let n = n1 + n2;
            *blocks.last_mut().unwrap() = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, n)| std::iter::repeat_n(m, n))
        .collect()
}

/// Largest isotonic correction tolerated before inversion is declared failed.
pub const ISOTONIC_TOLERANCE: f64 = 1e-6;

/// CDF values on a sorted grid by Gil-Pelaez inversion of `ψ`.
pub fn cdf_via_inversion(spec: &LimitLawSpec, x_grid: &[f64]) -> Result<Vec<f64>> {
    if x_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Unsupported("x_grid must be sorted and free of NaN"));
    }
    if x_grid.is_empty() {
        return Ok(Vec::new());
    }
    let t_max = truncation_point(spec)?;
    let x_span = x_grid[0].abs().max(x_grid[x_grid.len() - 1].abs());
    let width = (0.25f64).min(1.5 / (x_span + 1.0));
    let panels = (t_max / width).ceil() as usize;
    let width = t_max / panels as f64;

    // ψ at every Kronrod node, evaluated once
    let mut nodes = Vec::with_capacity(panels * 15);
    for p in 0..panels {
        let a = p as f64 * width;
        let rule = kronrod15(a, a + width);
        let gauss = gauss_weights(width);
        for (j, &(t, w)) in rule.iter().enumerate() {
            nodes.push((t, w, gauss[j], p));
        }
    }
    let psi: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(t, ..)| characteristic_function(spec, t))
        .collect::<Result<_>>()?;

    let mut worst_error = 0f64;
    let raw: Vec<f64> = x_grid
        .iter()
        .map(|&x| {
            let mut kron = 0.0;
            let mut err = 0.0;
            let mut panel_k = 0f64;
            let mut panel_g = 0f64;
            let mut current = 0;
            for (&(t, wk, wg, p), ps) in nodes.iter().zip(&psi) {
                if p != current {
                    err += (panel_k - panel_g).abs();
                    kron += panel_k;
                    panel_k = 0.0;
                    panel_g = 0.0;
                    current = p;
                }
                let f = (Complex64::from_polar(1.0, -t * x) * ps).im / t;
                panel_k += wk * f;
                panel_g += wg * f;
            }
            err += (panel_k - panel_g).abs();
            kron += panel_k;
            worst_error = worst_error.max(err / PI);
            0.5 - kron / PI
        })
        .collect();
    if worst_error > ISOTONIC_TOLERANCE {
        return Err(Error::NumericalFailure {
            what: "Fourier inversion quadrature",
            achieved: worst_error,
            requested: ISOTONIC_TOLERANCE,
        });
    }
    let fitted = isotonic(&raw);
    let correction = raw
        .iter()
        .zip(&fitted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if correction > ISOTONIC_TOLERANCE {
        return Err(Error::NumericalFailure {
            what: "monotone correction of the inverted CDF",
            achieved: correction,
            requested: ISOTONIC_TOLERANCE,
        });
    }
    Ok(fitted.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// Gauss-7 weights aligned with the Kronrod-15 node order (zero at Kronrod-only nodes).
fn gauss_weights(width: f64) -> [f64; 15] {
    const WG: [f64; 4] = [
        0.129_484_966_168_869_693_270_611_432_679_082,
        0.279_705_391_489_276_667_901_467_771_423_780,
        0.381_830_050_505_118_944_950_369_775_488_975,
        0.417_959_183_673_469_387_755_102_040_816_327,
    ];
    let h = 0.5 * width;
    let mut out = [0.0; 15];
    // rule layout: pairs (2j, 2j+1) for XGK[j], j = 0..7, then the centre
    for j in 0..7 {
        if j % 2 == 1 {
            out[2 * j] = WG[j / 2] * h;
            out[2 * j + 1] = WG[j / 2] * h;
        }
    }
    out[14] = WG[3] * h;
    out
}

/// Monotone interpolant of an inverted CDF on a uniform grid.
#[derive(Debug, Clone)]
pub struct InvertedCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
}

impl InvertedCdf {
    /// Inverts on `n` uniformly spaced points of `[lo, hi]`.
    pub fn build(spec: &LimitLawSpec, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n < 3 {
            return Err(Error::Unsupported("need lo < hi and at least 3 grid points"));
        }
        let xs: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let fs = cdf_via_inversion(spec, &xs)?;
        Ok(Self::from_values(xs, fs))
    }

    /// Inverts on a grid spanning `[−8σ, 20σ]` with `σ² = cum_2`.
    pub fn standard(spec: &LimitLawSpec) -> Result<Self> {
        let sd = limit_cumulant(spec, 2)?.sqrt();
        Self::build(spec, -8.0 * sd, 20.0 * sd, 2001)
    }

    /// Fritsch–Carlson slopes for monotone data.
    pub fn from_values(xs: Vec<f64>, fs: Vec<f64>) -> Self {
        let n = xs.len();
        let secant: Vec<f64> = (0..n - 1)
            .map(|i| (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secant[0];
        slopes[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secant[i - 1] * secant[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secant[i - 1] + secant[i])
            };
        }
        for i in 0..n - 1 {
            if secant[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / secant[i];
            let b = slopes[i + 1] / secant[i];
            let r = a.hypot(b);
            if r > 3.0 {
                slopes[i] = 3.0 * a / r * secant[i];
                slopes[i + 1] = 3.0 * b / r * secant[i];
            }
        }
        Self { xs, fs, slopes }
    }

    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.fs)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.fs[0];
        }
        if x >= self.xs[n - 1] {
            return self.fs[n - 1];
        }
        let i = self.xs.partition_point(|&g| g <= x) - 1;
        let i = i.min(n - 2);
        let w = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / w;
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * self.fs[i]
            + (t3 - 2.0 * t2 + t) * w * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.fs[i + 1]
            + (t3 - t2) * w * self.slopes[i + 1];
        v.clamp(0.0, 1.0)
    }

    /// Quantile by bisection on the interpolant.
    pub fn quantile(&self, p: f64) -> f64 {
        let (mut a, mut b) = (self.xs[0], self.xs[self.xs.len() - 1]);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.cdf(m) < p {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-13 * (1.0 + m.abs()) {
                break;
            }
        }
        0.5 * (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cumulant_examples() {
        let z4 = LimitLawSpec::geodesic(4).unwrap();
        assert!(rel(limit_cumulant(&z4, 2).unwrap(), PI / 2.0) < 1e-13);
        assert!(rel(limit_cumulant(&z4, 3).unwrap(), PI / 4.0) < 1e-13);
        assert!(rel(limit_cumulant(&z4, 4).unwrap(), 3.0 * PI / 16.0) < 1e-13);
        assert_eq!(limit_cumulant(&z4, 1).unwrap(), 0.0);
        let z40 = LimitLawSpec::new(4, 0.0).unwrap();
        assert_eq!(z40.rate, 2.0);
        assert!(rel(limit_cumulant(&z40, 2).unwrap(), PI) < 1e-13);
        assert!(LimitLawSpec::new(3, 0.0).is_err());
        assert!(LimitLawSpec::new(4, 1.0).is_err());
    }

    #[test]
    fn scale_constant_examples() {
        assert!(rel(limit_scale_constant(4, 0.0).unwrap(), PI / 2.0) < 1e-14);
        assert!(limit_scale_constant(4, 0.999_999).unwrap() > 100.0);
        for d in 4..=6 {
            for &lambda in &[0.0, 0.6] {
                let spec = LimitLawSpec::new(d, lambda).unwrap();
                let lhs = spec.scale_constant.powi(2) * limit_cumulant(&spec, 2).unwrap();
                let rhs = crate::functionals::normalized_cumulant_limit(d, lambda, 2, 1.0).unwrap();
                assert!(rel(lhs, rhs) < 1e-12, "d={d} λ={lambda}");
            }
        }
    }

    #[test]
    fn levy_density_moments() {
        for d in 4..=6 {
            let spec = LimitLawSpec::geodesic(d).unwrap();
            for ell in 2..=4u32 {
                // y = w^{d−2} on (0, 1/2] and y = 1 − v² on [1/2, 1) remove both endpoint singularities
                let n = (d - 2) as f64;
                let opts = QuadOptions::with_rel_tol(1e-13);
                let split = 0.5f64;
                let head = gauss_kronrod(
                    |w| {
                        let y = w.powf(n);
                        y.powi(ell as i32) * levy_density(d, y).unwrap() * n * w.powf(n - 1.0)
                    },
                    &[0.0, split.powf(1.0 / n)],
                    opts,
                )
                .value;
                let tail = gauss_kronrod(
                    |v| {
                        let y = 1.0 - v * v;
                        y.powi(ell as i32) * levy_density(d, y).unwrap() * 2.0 * v
                    },
                    &[0.0, (1.0 - split).sqrt()],
                    opts,
                )
                .value;
                let m = head + tail;
                let want = limit_cumulant(&spec, ell).unwrap();
                assert!((m - want).abs() < 1e-8, "d={d} ℓ={ell}: {m} vs {want}");
            }
        }
        assert!(levy_density(4, 0.0).is_err());
        assert!(levy_density(4, 1.0).is_err());
    }

    #[test]
    fn levy_density_is_pushforward() {
        // ν(y) = cosh^{d−1}(s)/|h'(s)| at s = h^{-1}(y), h = cosh^{−(d−2)}
        for d in 4..=7 {
            let p = (d - 2) as f64;
            for &y in &[1e-6f64, 0.01, 0.3, 0.7, 0.999] {
                let s = (y.powf(-1.0 / p)).acosh();
                let dh = p * s.cosh().powf(-p - 1.0) * s.sinh();
                let want = s.cosh().powi(d as i32 - 1) / dh;
                let got = levy_density(d, y).unwrap();
                assert!(rel(got, want) < 1e-10, "d={d} y={y}");
            }
        }
    }

    #[test]
    fn characteristic_function_basics() {
        let spec = LimitLawSpec::geodesic(4).unwrap();
        assert_eq!(characteristic_function(&spec, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        for &t in &[0.3, 1.0, 4.0, 11.0] {
            let a = characteristic_function(&spec, t).unwrap();
            let b = characteristic_function(&spec, -t).unwrap();
            assert!((a - b.conj()).norm() < 1e-14);
            assert!(a.norm() <= 1.0);
        }
        // finite differences of log ψ at 0 give the cumulants
        let h = 1e-2;
        let l = |t| log_characteristic_function(&spec, t).unwrap();
        let second = (l(h) + l(-h)).re / (h * h);
        assert!(rel(-second, PI / 2.0) < 1e-3, "{second}");
        let third = (l(2.0 * h) - 2.0 * l(h) + 2.0 * l(-h) - l(-2.0 * h)).im / (2.0 * h.powi(3));
        assert!(rel(-third, PI / 4.0) < 1e-3, "{third}");
        let h = 1e-4;
        let second = (l(h) + l(-h)).re / (h * h);
        assert!(rel(-second, PI / 2.0) < 1e-4, "{second}");
    }

    #[test]
    fn rate_acts_as_a_power() {
        for d in [4, 5] {
            let one = LimitLawSpec::with_rate(d, 0.0, 1.0).unwrap();
            let r = 2.0 * 0.8f64.powi(d as i32 - 1);
            let other = LimitLawSpec::with_rate(d, 0.6, r).unwrap();
            for j in -20..=20 {
                let t = j as f64 * 0.5;
                let a = characteristic_function(&other, t).unwrap();
                let b = log_characteristic_function(&one, t).unwrap();
                let b = (b * r).exp();
                assert!((a - b).norm() < 1e-9, "d={d} t={t}");
            }
        }
    }

    #[test]
    fn tail_bookkeeping() {
        let spec = LimitLawSpec::geodesic(4).unwrap();
        // ∫_0^T sech + ∫_T^∞ sech = π/2
        for &t in &[0.5f64, 1.0, 3.0, 6.0] {
            let head = 2.0 * (0.5 * t).tanh().atan();
            let tail = tail_variance(4, 1.0, t).unwrap();
            assert!((head + tail - PI / 2.0).abs() < 1e-10);
        }
        let mut last = f64::INFINITY;
        for j in 1..20 {
            let v = tail_variance(5, 1.0, j as f64 * 0.3).unwrap();
            assert!(v < last);
            last = v;
        }
        let cum3 = limit_cumulant(&spec, 3).unwrap();
        assert!(spec.tail_third_cumulant().unwrap() <= 1e-3 * cum3);
        assert!((spec.t0 - 3.13).abs() < 0.02, "T0 = {}", spec.t0);
        let z = ZetaProcess::new(4, 1.0, spec.t0).unwrap();
        assert!(z.mean_count() > 300.0 && z.mean_count() < 700.0);
    }

    #[test]
    fn sampler_cumulants_small() {
        let spec = LimitLawSpec::geodesic(4).unwrap();
        let n = 100_000;
        let x = sample_limit(&spec, n, 17).unwrap();
        assert_eq!(x, sample_limit(&spec, n, 17).unwrap());
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 5.0 * (var / n as f64).sqrt());
        assert!((var - PI / 2.0).abs() < 0.05);
    }

    #[test]
    fn inversion_tails_and_median() {
        let spec = LimitLawSpec::geodesic(4).unwrap();
        let sd = (PI / 2.0).sqrt();
        let f = cdf_via_inversion(&spec, &[-20.0, 0.0, 20.0 * sd]).unwrap();
        assert!(f[0] < 1e-4);
        assert!(f[2] > 1.0 - 1e-2);
        let cdf = InvertedCdf::standard(&spec).unwrap();
        let median = cdf.quantile(0.5);
        assert!(median < 0.0, "median {median}");
        let (xs, fs) = cdf.grid();
        assert!(fs.windows(2).all(|w| w[0] <= w[1]));
        assert!(xs.len() == fs.len());
        assert!(cdf_via_inversion(&spec, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn inversion_matches_gaussian_limit_of_heavy_rate() {
        // with a large rate the law is close to N(0, rate·π/2) in shape
        let spec = LimitLawSpec::with_rate(4, 0.0, 400.0).unwrap();
        let sd = limit_cumulant(&spec, 2).unwrap().sqrt();
        let f = cdf_via_inversion(&spec, &[-sd, 0.0, sd]).unwrap();
        let normal = statrs::distribution::Normal::standard();
        use statrs::distribution::ContinuousCDF;
        for (v, z) in f.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - normal.cdf(z)).abs() < 0.02, "{v} at {z}");
        }
    }

    #[test]
    fn pav_fixes_small_violations() {
        assert_eq!(isotonic(&[0.0, 0.2, 0.1, 0.3]), vec![0.0, 0.15000000000000002, 0.15000000000000002, 0.3]);
        assert_eq!(isotonic(&[1.0, 2.0]), vec![1.0, 2.0]);
    }
}

//! Poisson sampling of hyperplane coordinates `(s, u)` under the invariant
//! measure, and of the auxiliary half-line process `ζ` behind the limit laws.
//!
//! Randomness comes from ChaCha8 keyed by the user seed with one stream per
//! replicate, so replicate `i` is reproducible on its own regardless of how
//! replicates are scheduled across threads.

mod cdf;
pub mod dump;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

pub use cdf::{CoshPowerCdf, KNOT_INTERVALS};

use crate::error::{Error, Result};
use crate::geometry::{Extended, ModelConfig};
use crate::numerics::{gauss_kronrod, ln_cosh, QuadOptions};

/// Keys that separate the random streams of different consumers sharing one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    Process = 0x7072_6f63,
    Zeta = 0x7a65_7461,
    LimitLaw = 0x6c69_6d74,
}

/// Independent random stream `index` of `seed` within `domain`.
pub fn stream_rng(seed: u64, domain: StreamDomain, index: u64) -> ChaCha8Rng {
    let key = seed ^ ((domain as u64) << 32 | domain as u64).rotate_left(17);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Draws a Poisson count with the given mean (0 for a vanishing mean).
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    dist.sample(rng) as u64
}

/// Uniform direction on the unit sphere `S^{d-1}`.
pub fn random_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Invariant intensity `multiplier · (cosh s − λ sinh s)^{d−1}` at signed distance `s`.
pub fn intensity_density(config: &ModelConfig, s: f64) -> f64 {
    let n = (config.d - 1) as f64;
    let g = config.geometry();
    let ln_base = match g.delta {
        Extended::Infinite => -s,
        Extended::Finite(delta) => g.mu.ln() + ln_cosh(s - delta),
    };
    config.intensity_multiplier * (n * ln_base).exp()
}

/// Expected number of hyperplanes hitting `B_R`: the intensity integrated over `[-R, R]`.
pub fn mean_count(config: &ModelConfig) -> f64 {
    let r = config.radius;
    let d = config.d;
    let g = config.geometry();
    let per_unit = if d == 2 {
        // μ ∫ cosh(s − Δ) ds = 2 sinh R, and ∫ e^{-s} ds = 2 sinh R as well
        2.0 * r.sinh()
    } else {
        match g.delta {
            Extended::Infinite => {
                let k = (d - 1) as f64;
                2.0 * (k * r).sinh() / k
            }
            Extended::Finite(delta) => {
                let n = (d - 1) as i32;
                let (lo, hi) = (-r - delta, r - delta);
                let mut points = vec![lo];
                if lo < 0.0 && hi > 0.0 {
                    points.push(0.0);
                }
                points.push(hi);
                let integral = gauss_kronrod(
                    |u| u.cosh().powi(n),
                    &points,
                    QuadOptions::with_rel_tol(1e-13),
                )
                .value;
                g.mu.powi(n) * integral
            }
        }
    };
    config.intensity_multiplier * per_unit
}

/// Normalized distribution of the signed distance `s` of a hyperplane hitting `B_R`.
#[derive(Debug, Clone)]
pub enum IntensityCdf {
    /// `λ = 1`: density `e^{-k s}` with `k = d − 1`.
    Exponential { rate: f64, radius: f64 },
    /// `d = 2`, `λ < 1`: density `μ cosh(s − Δ)`.
    Cosh { delta: f64, radius: f64 },
    /// general case, tabulated in `u = s − Δ`.
    Tabulated { delta: f64, radius: f64, table: CoshPowerCdf },
}

impl IntensityCdf {
    pub fn new(config: &ModelConfig) -> Self {
        let r = config.radius;
        match config.geometry().delta {
            Extended::Infinite => IntensityCdf::Exponential {
                rate: (config.d - 1) as f64,
                radius: r,
            },
            Extended::Finite(delta) if config.d == 2 => IntensityCdf::Cosh { delta, radius: r },
            Extended::Finite(delta) => IntensityCdf::Tabulated {
                delta,
                radius: r,
                table: CoshPowerCdf::new((config.d - 1) as u32, -r - delta, r - delta),
            },
        }
    }

    fn radius(&self) -> f64 {
        match self {
            IntensityCdf::Exponential { radius, .. }
            | IntensityCdf::Cosh { radius, .. }
            | IntensityCdf::Tabulated { radius, .. } => *radius,
        }
    }

    pub fn cdf(&self, s: f64) -> f64 {
        let r = self.radius();
        if s <= -r {
            return 0.0;
        }
        if s >= r {
            return 1.0;
        }
        match self {
            IntensityCdf::Exponential { rate, radius } => {
                // (1 − e^{-k(s+R)}) / (1 − e^{-2kR})
                (-rate * (s + radius)).exp_m1() / (-2.0 * rate * radius).exp_m1()
            }
            IntensityCdf::Cosh { delta, radius } => {
                let top = (radius + delta).sinh();
                ((s - delta).sinh() + top) / ((radius - delta).sinh() + top)
            }
            IntensityCdf::Tabulated { delta, table, .. } => table.cdf(s - delta),
        }
    }

    /// Quantile function; monotone, with `inverse(0) = -R` and `inverse(1) = R`.
    pub fn inverse(&self, p: f64) -> f64 {
        let r = self.radius();
        if p <= 0.0 {
            return -r;
        }
        if p >= 1.0 {
            return r;
        }
        let s = match self {
            IntensityCdf::Exponential { rate, radius } => {
                let span = -(-2.0 * rate * radius).exp_m1();
                -radius - (-p * span).ln_1p() / rate
            }
            IntensityCdf::Cosh { delta, radius } => {
                let top = (radius + delta).sinh();
                let total = (radius - delta).sinh() + top;
                delta + (p * total - top).asinh()
            }
            IntensityCdf::Tabulated { delta, table, .. } => delta + table.inverse(p),
        };
        s.clamp(-r, r)
    }
}

/// Quantile of the signed distance of a hyperplane hitting `B_R`.
pub fn inverse_cdf(config: &ModelConfig, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", p, "0 <= p <= 1"));
    }
    Ok(IntensityCdf::new(config).inverse(p))
}

/// One hyperplane: signed distance `s` and unit direction `u` (empty when
/// directions were not sampled).
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneCoord {
    pub s: f64,
    pub u: Vec<f64>,
}

/// One realization of the process restricted to hyperplanes hitting `B_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSample {
    pub config: ModelConfig,
    pub coords: Vec<HyperplaneCoord>,
    pub seed: u64,
    pub replicate_index: u64,
}

/// Reusable sampler: the CDF table is built once per configuration.
#[derive(Debug, Clone)]
pub struct ProcessSampler {
    config: ModelConfig,
    cdf: IntensityCdf,
    mean_count: f64,
    directions: bool,
}

impl ProcessSampler {
    pub fn new(config: &ModelConfig) -> Self {
        Self {
            config: *config,
            cdf: IntensityCdf::new(config),
            mean_count: mean_count(config),
            directions: true,
        }
    }

    /// Directions only matter for rendering; large runs switch them off.
    pub fn with_directions(mut self, on: bool) -> Self {
        self.directions = on;
        self
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn mean_count(&self) -> f64 {
        self.mean_count
    }

    pub fn cdf(&self) -> &IntensityCdf {
        &self.cdf
    }

    pub fn sample(&self, seed: u64, replicate_index: u64) -> ProcessSample {
        let mut rng = stream_rng(seed, StreamDomain::Process, replicate_index);
        let count = poisson_count(self.mean_count, &mut rng);
        let coords = (0..count)
            .map(|_| {
                let s = self.cdf.inverse(rng.random::<f64>());
                let u = if self.directions {
                    random_direction(self.config.d, &mut rng)
                } else {
                    Vec::new()
                };
                HyperplaneCoord { s, u }
            })
            .collect();
        ProcessSample {
            config: self.config,
            coords,
            seed,
            replicate_index,
        }
    }
}

/// Replicate 0 of the process for `(config, seed)`, directions included.
pub fn sample_process(config: &ModelConfig, seed: u64) -> ProcessSample {
    ProcessSampler::new(config).sample(seed, 0)
}

/// Inhomogeneous Poisson process on `[0, T]` with density `rate · cosh^{d−1}(s)`.
#[derive(Debug, Clone)]
pub struct ZetaProcess {
    d: usize,
    rate: f64,
    horizon: f64,
    table: CoshPowerCdf,
    mean_count: f64,
}

impl ZetaProcess {
    pub fn new(d: usize, rate: f64, horizon: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedDimension {
                d,
                reason: "d >= 2 required",
            });
        }
        if !(rate > 0.0) {
            return Err(Error::domain("rate", rate, "rate > 0"));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::domain("T", horizon, "T > 0"));
        }
        let table = CoshPowerCdf::new((d - 1) as u32, 0.0, horizon);
        let mean_count = rate * table.ln_total().exp();
        Ok(Self {
            d,
            rate,
            horizon,
            table,
            mean_count,
        })
    }

    /// `ζ_{d,λ}` with rate `2 (1 − λ²)^{(d−1)/2}`.
    pub fn for_lambda(d: usize, lambda: f64, horizon: f64) -> Result<Self> {
        Self::new(d, zeta_rate(d, lambda)?, horizon)
    }

    /// The unoriented geodesic variant with rate 1.
    pub fn geodesic(d: usize, horizon: f64) -> Result<Self> {
        Self::new(d, 1.0, horizon)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn mean_count(&self) -> f64 {
        self.mean_count
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let count = poisson_count(self.mean_count, rng);
        (0..count)
            .map(|_| self.table.inverse(rng.random::<f64>()))
            .collect()
    }

    /// `Σ cosh^{−(d−2)}(s)` over one realization.
    ///
    /// For `d = 4` the mean measure is `rate (sinh s + sinh³s / 3)`, so a point
    /// comes from solving `y³ + 3y = 3c` for `y = sinh s` by Cardano's formula and
    /// `cosh^{−2}(s) = 1/(1 + y²)`; no table lookup is needed.
    pub fn jump_sum<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let count = poisson_count(self.mean_count, rng);
        if self.d == 4 {
            let top = self.horizon.sinh();
            let total = top + top * top * top / 3.0;
            let mut acc = 0.0;
            for _ in 0..count {
                let a = 1.5 * total * rng.random::<f64>();
                let u = (a + a.hypot(1.0)).cbrt();
                let y = u - 1.0 / u;
                acc += 1.0 / (1.0 + y * y);
            }
            return acc;
        }
        let p = (self.d - 2) as f64;
        (0..count)
            .map(|_| (-p * ln_cosh(self.table.inverse(rng.random::<f64>()))).exp())
            .sum()
    }

    /// `Σ f(s)` over one realization without materializing the points.
    pub fn sum_over<R, F>(&self, rng: &mut R, mut f: F) -> f64
    where
        R: Rng + ?Sized,
        F: FnMut(f64) -> f64,
    {
        let count = poisson_count(self.mean_count, rng);
        (0..count)
            .map(|_| f(self.table.inverse(rng.random::<f64>())))
            .sum()
    }
}

/// Poisson rate of `ζ_{d,λ}`: `2 (1 − λ²)^{(d−1)/2}`.
pub fn zeta_rate(d: usize, lambda: f64) -> Result<f64> {
    let g = crate::geometry::LambdaGeometry::new(lambda)?;
    if g.is_horosphere() {
        return Err(Error::Unsupported(
            "no ζ process for horospheres (the limit law is Gaussian)",
        ));
    }
    Ok(2.0 * g.mu.powi(d as i32 - 1))
}

/// One draw of `ζ_{d,λ}` on `[0, T]`.
pub fn sample_zeta(d: usize, lambda: f64, horizon: f64, seed: u64) -> Result<Vec<f64>> {
    let zeta = ZetaProcess::for_lambda(d, lambda, horizon)?;
    let mut rng = stream_rng(seed, StreamDomain::Zeta, 0);
    Ok(zeta.sample(&mut rng))
}

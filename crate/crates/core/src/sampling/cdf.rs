use crate::numerics::{kronrod15, ln_cosh, CompensatedSum};

/// Number of knot intervals in a tabulated CDF.
pub const KNOT_INTERVALS: usize = 4096;

/// Normalized CDF of the density `cosh^n(u)` on `[lo, hi]`, tabulated on a
/// uniform grid and inverted through cubic Hermite interpolation (the
/// tabulated density supplies the exact slopes).
#[derive(Debug, Clone)]
pub struct CoshPowerCdf {
    n: u32,
    lo: f64,
    hi: f64,
    step: f64,
    knots_cdf: Vec<f64>,
    knots_density: Vec<f64>,
    guide: Vec<u32>,
    ln_total: f64,
}

impl CoshPowerCdf {
    pub fn new(n: u32, lo: f64, hi: f64) -> Self {
        assert!(hi > lo, "empty support [{lo}, {hi}]");
        let k = KNOT_INTERVALS;
        let step = (hi - lo) / k as f64;
        let nf = f64::from(n);
        // densities are scaled by cosh^{-n} of the largest |u|
        let ln_scale = nf * ln_cosh(lo.abs().max(hi.abs()));
        let density = |u: f64| (nf * ln_cosh(u) - ln_scale).exp();

        let knot = |i: usize| if i == k { hi } else { lo + step * i as f64 };
        let mut cumulative = Vec::with_capacity(k + 1);
        let mut acc = CompensatedSum::new();
        cumulative.push(0.0);
        for i in 0..k {
            let panel: f64 = kronrod15(knot(i), knot(i + 1))
                .iter()
                .map(|&(u, w)| w * density(u))
                .sum();
            acc.add(panel);
            cumulative.push(acc.value());
        }
        let total = acc.value();
        let knots_cdf: Vec<f64> = cumulative.iter().map(|c| c / total).collect();
        let knots_density: Vec<f64> = (0..=k).map(|i| density(knot(i)) / total).collect();

        let mut guide = Vec::with_capacity(k + 1);
        let mut idx = 0usize;
        for j in 0..=k {
            let p = j as f64 / k as f64;
            while idx + 1 < k && knots_cdf[idx + 1] <= p {
                idx += 1;
            }
            guide.push(idx as u32);
        }

        Self {
            n,
            lo,
            hi,
            step,
            knots_cdf,
            knots_density,
            guide,
            ln_total: total.ln() + ln_scale,
        }
    }

    pub fn power(&self) -> u32 {
        self.n
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `ln ∫_lo^hi cosh^n(u) du`.
    pub fn ln_total(&self) -> f64 {
        self.ln_total
    }

    fn knot(&self, i: usize) -> f64 {
        if i == KNOT_INTERVALS {
            self.hi
        } else {
            self.lo + self.step * i as f64
        }
    }

    fn hermite(&self, i: usize, t: f64) -> (f64, f64) {
        let w = self.knot(i + 1) - self.knot(i);
        let (f0, f1) = (self.knots_cdf[i], self.knots_cdf[i + 1]);
        let (m0, m1) = (self.knots_density[i] * w, self.knots_density[i + 1] * w);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * m1;
        let slope = (6.0 * t2 - 6.0 * t) * f0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * f1
            + (3.0 * t2 - 2.0 * t) * m1;
        (value, slope)
    }

    pub fn cdf(&self, u: f64) -> f64 {
        if u <= self.lo {
            return 0.0;
        }
        if u >= self.hi {
            return 1.0;
        }
        let i = (((u - self.lo) / self.step) as usize).min(KNOT_INTERVALS - 1);
        let w = self.knot(i + 1) - self.knot(i);
        let t = ((u - self.knot(i)) / w).clamp(0.0, 1.0);
        self.hermite(i, t).0.clamp(0.0, 1.0)
    }

    /// Unnormalized density `cosh^n(u)` divided by the total mass.
    pub fn density(&self, u: f64) -> f64 {
        if u < self.lo || u > self.hi {
            return 0.0;
        }
        (f64::from(self.n) * ln_cosh(u) - self.ln_total).exp()
    }

    pub fn inverse(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return self.lo;
        }
        if p >= 1.0 {
            return self.hi;
        }
        let k = KNOT_INTERVALS;
        let mut i = self.guide[(p * k as f64) as usize] as usize;
        while i + 1 < k && self.knots_cdf[i + 1] < p {
            i += 1;
        }
        let (f0, f1) = (self.knots_cdf[i], self.knots_cdf[i + 1]);
        let width = f1 - f0;
        if width <= 0.0 {
            return self.knot(i);
        }
        // safeguarded Newton on the Hermite cubic
        let (mut a, mut b) = (0.0, 1.0);
        let mut t = ((p - f0) / width).clamp(0.0, 1.0);
        for _ in 0..40 {
            let (v, dv) = self.hermite(i, t);
            let r = v - p;
            if r.abs() <= 1e-15 {
                break;
            }
            if r > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let newton = t - r / dv;
            t = if dv > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if b - a < 1e-15 {
                break;
            }
        }
        let w = self.knot(i + 1) - self.knot(i);
        (self.knot(i) + t * w).clamp(self.lo, self.hi)
    }
}

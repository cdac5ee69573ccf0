//! Numerical building blocks: log-domain hyperbolic functions, adaptive
//! Gauss–Kronrod quadrature and compensated summation.
//!
//! Everything that can overflow at large radii is evaluated through logarithms.
//! `cosh 700` is still finite in `f64`, `cosh 711` is not, and the moment
//! integrals routinely span several hundred e-folds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{LN_2, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `ln cosh x`, finite for every finite `x`.
#[inline]
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln sinh x` for `x > 0`; `-inf` at zero.
#[inline]
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    x + (-(-2.0 * x).exp_m1()).ln() - LN_2
}

/// `arcosh(e^l)` for `l >= 0`, without forming `e^l`.
#[inline]
pub fn arcosh_exp(l: f64) -> f64 {
    if l <= 0.0 {
        return 0.0;
    }
    // arcosh t = ln t + ln(1 + sqrt(1 - t^-2))
    l + (-(-2.0 * l).exp_m1()).sqrt().ln_1p()
}

/// `arcosh(1 + x)` for `x >= 0`, accurate for tiny `x` (where the section
/// shrinks to a point) and for `x` far beyond the `f64` range when given as a
/// logarithm.
#[inline]
pub fn arcosh_1p_ln(ln_x: f64) -> f64 {
    if ln_x == f64::NEG_INFINITY {
        return 0.0;
    }
    if ln_x < 30.0 {
        let x = ln_x.exp();
        (x + (x * (x + 2.0)).sqrt()).ln_1p()
    } else {
        arcosh_exp(ln_x + (-ln_x).exp().ln_1p())
    }
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `sinh y - y`, without cancellation for small `y >= 0`.
fn sinh_minus_id(y: f64) -> f64 {
    if y < 1.0 {
        let y2 = y * y;
        let mut term = y * y2 / 6.0;
        let mut sum = term;
        let mut k = 1.0;
        while term > 1e-18 * sum {
            term *= y2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        y.sinh() - y
    }
}

/// `ln ∫_0^x sinh^n(u) du` for `x >= 0`.
///
/// Exact antiderivatives for `n <= 3`, adaptive quadrature (relative tolerance
/// 1e-10) above that. Returns `-inf` for `x = 0`.
pub fn ln_sinh_power_integral(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    match n {
        0 => x.ln(),
        // cosh x - 1 = 2 sinh²(x/2)
        1 => LN_2 + 2.0 * ln_sinh(0.5 * x),
        // (sinh 2x - 2x) / 4
        2 => {
            let y = 2.0 * x;
            let ln_num = if y < 30.0 {
                sinh_minus_id(y).ln()
            } else {
                let ls = ln_sinh(y);
                ls + (-(y.ln() - ls).exp()).ln_1p()
            };
            ln_num - 2.0 * LN_2
        }
        // cosh³/3 - cosh + 2/3 = (c - 1)² (c + 2) / 3
        3 => {
            let ln_cm1 = LN_2 + 2.0 * ln_sinh(0.5 * x);
            let lc = ln_cosh(x);
            let ln_cp2 = lc + (2.0 * (-lc).exp()).ln_1p();
            2.0 * ln_cm1 + ln_cp2 - 3f64.ln()
        }
        _ => {
            let nf = f64::from(n);
            let top = ln_sinh(x);
            let est = gauss_kronrod(
                |u| (nf * (ln_sinh(u) - top)).exp(),
                &[0.0, x],
                QuadOptions::with_rel_tol(1e-10),
            );
            est.value.ln() + nf * top
        }
    }
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    (h * PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// Surface area of the Euclidean unit ball in `R^n`, i.e. `n κ_n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// `∫_{-∞}^{∞} cosh^{-h}(y) dy = √π Γ(h/2) / Γ((h+1)/2)` for `h > 0`.
pub fn cosh_power_full_integral(h: f64) -> Result<f64> {
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::domain("h", h, "h > 0 for a convergent integral"));
    }
    Ok((0.5 * PI.ln() + ln_gamma(0.5 * h) - ln_gamma(0.5 * (h + 1.0))).exp())
}

/// `∫_a^∞ cosh^{-p}(s) ds` for `p > 0`, `a >= 0`, by quadrature after the
/// substitution `t = e^{-s}`.
pub fn cosh_power_tail(p: f64, a: f64) -> Result<f64> {
    if p <= 0.0 {
        return Err(Error::domain("p", p, "p > 0"));
    }
    // cosh^{-p}(s) ds = 2^p t^{p-1} (1 + t²)^{-p} dt
    let upper = (-a).exp();
    let ln2p = p * LN_2;
    gauss_kronrod(
        |t| {
            if t <= 0.0 {
                return if p == 1.0 { 2.0 } else { 0.0 };
            }
            (ln2p + (p - 1.0) * t.ln() - p * (t * t).ln_1p()).exp()
        },
        &[0.0, upper],
        QuadOptions::with_rel_tol(1e-12),
    )
    .require("cosh power tail integral")
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

/// Result of an adaptive quadrature run. `converged` is false when the
/// interval budget ran out before the tolerance was met.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
    pub requested: f64,
}

impl Estimate {
    pub fn require(self, what: &'static str) -> Result<f64> {
        if self.converged && self.value.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::NumericalFailure {
                what,
                achieved: self.error,
                requested: self.requested,
            })
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Nodes and weights of the 15-point Kronrod rule mapped to `[a, b]`.
pub fn kronrod15(a: f64, b: f64) -> [(f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(c, WGK[7] * h); 15];
    for j in 0..7 {
        out[2 * j] = (c - h * XGK[j], WGK[j] * h);
        out[2 * j + 1] = (c + h * XGK[j], WGK[j] * h);
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Adaptive 7/15-point Gauss–Kronrod quadrature over `[p0, p1, ..., pn]`,
/// starting with one interval per pair of consecutive breakpoints and always
/// bisecting the interval with the largest error estimate.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(
    mut f: F,
    breakpoints: &[f64],
    opts: QuadOptions,
) -> Estimate {
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let seg = gk15(&mut f, w[0], w[1]);
            total += seg.value;
            err += seg.error;
            heap.push(seg);
        }
    }
    let target = |total: f64| opts.abs_tol.max(opts.rel_tol * total.abs());
    while err > target(total) && heap.len() < opts.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted floating-point resolution
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            err -= worst.error;
            continue;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    let mut acc = CompensatedSum::new();
    let mut acc_err = CompensatedSum::new();
    for seg in heap.iter() {
        acc.add(seg.value);
        acc_err.add(seg.error);
    }
    let value = acc.value();
    let error = acc_err.value();
    Estimate {
        value,
        error,
        intervals: heap.len(),
        converged: error <= target(value) || error == 0.0,
        requested: target(value),
    }
}

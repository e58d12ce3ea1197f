//! Coefficient extraction `(e^{at} Π_i (e^{b_i t} − 1))[t^D]`.
//!
//! Both evaluation paths rescale their inputs by a power of two before
//! doing any arithmetic and undo the scaling exactly afterwards, so
//! intermediate values stay near unit magnitude even when the coefficient
//! itself, or `D!`, lies far outside the `f64` range.

use super::dd::DoubleDouble;
use super::series::{exp_series, mult_series, shifted_exp_series, Multiply, TruncatedSeries};
use super::CoeffConfig;
use crate::combin::{factorial_f64, MAX_F64_FACTORIAL};
use crate::error::{Error, Result};

/// Hard upper bound on the subset path's `2^k` enumeration.
pub const MAX_SUBSET_SIZE: usize = 30;

/// A real `m · 2^e` with the exponent held separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    mantissa: f64,
    exp2: i64,
}

impl Scaled {
    pub(crate) fn new(x: f64) -> Self {
        if x == 0.0 || !x.is_finite() {
            return Self { mantissa: x, exp2: 0 };
        }
        let (x, bias) = if x.abs() < f64::MIN_POSITIVE { (x * 2f64.powi(64), -64) } else { (x, 0) };
        let bits = x.to_bits();
        let raw = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
        Self { mantissa, exp2: raw - 1023 + bias }
    }

    pub(crate) fn mul_f64(self, x: f64) -> Self {
        let s = Self::new(self.mantissa * x);
        Self { mantissa: s.mantissa, exp2: s.exp2 + self.exp2 }
    }

    pub(crate) fn mul_pow2(self, k: i64) -> Self {
        Self { mantissa: self.mantissa, exp2: self.exp2 + k }
    }

    pub(crate) fn to_f64(self) -> f64 {
        ldexp(self.mantissa, self.exp2)
    }
}

/// `x · 2^e`, exact unless the result leaves the normal range.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    let step = |k: i64| f64::from_bits(((k + 1023) as u64) << 52);
    while e > 1000 && x.is_finite() && x != 0.0 {
        x *= step(1000);
        e -= 1000;
    }
    while e < -1000 && x != 0.0 {
        x *= step(-1000);
        e += 1000;
    }
    if e < -1022 {
        // two steps keep the intermediate normal so only one rounding occurs
        return x * step(-1022) * step(e + 1022);
    }
    x * step(e)
}

/// `D!` as a scaled value, exact-table backed up to 170.
pub(crate) fn factorial_scaled(d: usize) -> Scaled {
    if d <= MAX_F64_FACTORIAL {
        return Scaled::new(factorial_f64(d));
    }
    (MAX_F64_FACTORIAL + 1..=d).fold(Scaled::new(factorial_f64(MAX_F64_FACTORIAL)), |acc, i| acc.mul_f64(i as f64))
}

/// Smallest `j` with `2^j ≥ x` for `x > 0`.
fn ceil_log2(x: f64) -> i64 {
    let s = Scaled::new(x);
    if s.mantissa == 1.0 {
        s.exp2
    } else {
        s.exp2 + 1
    }
}

/// Edge-size crossover `k* = ⌊log₂(D+1) + log₂log₂(max(D+1, 4))⌋`, at least 2.
pub fn crossover(d: usize) -> usize {
    let n = (d + 1) as f64;
    let k = n.log2() + n.max(4.0).log2().log2();
    (k.floor() as usize).max(2)
}

/// Which evaluation [`edge_coeff`] uses for a given shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffPath {
    /// More non-constant factors than the target degree: the coefficient is 0.
    Zero,
    /// Exactly `D` factors: only their linear terms reach `t^D`.
    Uniform,
    Subset,
    Direct,
    Fft,
}

impl CoeffPath {
    pub fn name(self) -> &'static str {
        match self {
            CoeffPath::Zero => "zero",
            CoeffPath::Uniform => "uniform",
            CoeffPath::Subset => "subset",
            CoeffPath::Direct => "direct",
            CoeffPath::Fft => "fft",
        }
    }
}

/// The path [`edge_coeff`] takes for `k` factors at degree `d`.
pub fn choose_path(k: usize, d: usize, cfg: &CoeffConfig) -> CoeffPath {
    if k > d {
        return CoeffPath::Zero;
    }
    if k == d {
        return CoeffPath::Uniform;
    }
    if let Some(p) = cfg.force {
        if p != CoeffPath::Subset || k <= MAX_SUBSET_SIZE {
            return p;
        }
    }
    let kstar = cfg.crossover.unwrap_or_else(|| crossover(d));
    if k <= kstar && k <= cfg.subset_cap.min(MAX_SUBSET_SIZE) {
        CoeffPath::Subset
    } else if d < cfg.direct_threshold {
        CoeffPath::Direct
    } else {
        CoeffPath::Fft
    }
}

/// Series path. Each `e^{b s u} − 1` is written as `b s u` times a series
/// leading with 1, so only degree `D − k` of the product is needed and the
/// factors `b s` are collected exactly as a scaled product. `s = 2^j ≈
/// D / (|a| + Σ|b|)` centres the mass of the product near degree `D`.
/// Returns `D!` times the coefficient.
fn series_scaled(a: f64, bs: &[f64], d: usize, how: Multiply) -> Scaled {
    let mass = a.abs() + bs.iter().map(|b| b.abs()).sum::<f64>();
    if mass == 0.0 || bs.len() > d || bs.contains(&0.0) {
        let one = bs.is_empty() && d == 0;
        return Scaled::new(if one { 1.0 } else { 0.0 });
    }
    let j = ceil_log2(d.max(1) as f64) - ceil_log2(mass);
    let s = ldexp(1.0, j);
    let rest = d - bs.len();
    let mut acc = exp_series(a * s, rest, false);
    let mut lead = factorial_scaled(d);
    for &b in bs {
        acc = mult_series(&acc, &shifted_exp_series(b * s, rest), rest, how);
        lead = lead.mul_f64(b * s);
    }
    lead.mul_f64(acc.coeff(rest)).mul_pow2(-j * d as i64)
}

/// Subset path: `Σ_{S⊆[k]} (−1)^{k−|S|} (a + Σ_S b)^D` in double-double,
/// visiting subsets in Gray-code order. Returns `D!` times the coefficient.
fn subset_scaled(a: f64, bs: &[f64], d: usize) -> Scaled {
    let mass = a.abs() + bs.iter().map(|b| b.abs()).sum::<f64>();
    if mass == 0.0 {
        let one = bs.is_empty() && d == 0;
        return Scaled::new(if one { 1.0 } else { 0.0 });
    }
    let e = ceil_log2(mass);
    let scale = ldexp(1.0, -e);
    let xs: Vec<DoubleDouble> = bs.iter().map(|&b| DoubleDouble::from_f64(b * scale)).collect();
    let mut sum = DoubleDouble::from_f64(a * scale);
    let k = bs.len();
    let mut positive = k.is_multiple_of(2);
    let mut total = sum.powi(d);
    if !positive {
        total = -total;
    }
    for i in 1u64..(1u64 << k) {
        let bit = i.trailing_zeros() as usize;
        let gray = i ^ (i >> 1);
        if gray & (1 << bit) != 0 {
            sum = sum + xs[bit];
        } else {
            sum = sum - xs[bit];
        }
        positive = !positive;
        let term = sum.powi(d);
        total = if positive { total + term } else { total - term };
    }
    Scaled::new(total.to_f64()).mul_pow2(e * d as i64)
}

fn uniform_scaled(bs: &[f64], d: usize) -> Scaled {
    bs.iter().fold(factorial_scaled(d), |acc, &b| acc.mul_f64(b))
}

/// `D!` times the coefficient, by the configured dispatch.
pub(crate) fn edge_coeff_scaled(a: f64, bs: &[f64], d: usize, cfg: &CoeffConfig) -> Scaled {
    match choose_path(bs.len(), d, cfg) {
        CoeffPath::Zero => Scaled::new(0.0),
        CoeffPath::Uniform => uniform_scaled(bs, d),
        CoeffPath::Subset => subset_scaled(a, bs, d),
        CoeffPath::Direct => series_scaled(a, bs, d, Multiply::Direct),
        CoeffPath::Fft => series_scaled(a, bs, d, Multiply::Fft),
    }
}

fn unscale(x: Scaled, d: usize) -> f64 {
    let f = factorial_scaled(d);
    Scaled { mantissa: x.mantissa / f.mantissa, exp2: x.exp2 - f.exp2 }.to_f64()
}

/// Hybrid dispatch between subset expansion and the series product.
pub fn edge_coeff(a: f64, bs: &[f64], d: usize, cfg: &CoeffConfig) -> f64 {
    unscale(edge_coeff_scaled(a, bs, d, cfg), d)
}

/// Series-product evaluation with FFT multiplication throughout.
pub fn edge_coeff_fft(a: f64, bs: &[f64], d: usize) -> f64 {
    unscale(series_scaled(a, bs, d, Multiply::Fft), d)
}

/// Series-product evaluation with direct convolution throughout.
pub fn edge_coeff_direct(a: f64, bs: &[f64], d: usize) -> f64 {
    unscale(series_scaled(a, bs, d, Multiply::Direct), d)
}

/// Subset-expansion evaluation; refuses more than `cap` factors.
pub fn edge_coeff_subset(a: f64, bs: &[f64], d: usize, cap: usize) -> Result<f64> {
    if bs.len() > cap.min(MAX_SUBSET_SIZE) {
        return Err(Error::InvalidArgument(format!(
            "subset expansion over {} factors exceeds the cap of {}",
            bs.len(),
            cap.min(MAX_SUBSET_SIZE)
        )));
    }
    Ok(unscale(subset_scaled(a, bs, d), d))
}

/// Plain-product series kept for callers that want the whole expansion.
pub fn edge_series(a: f64, bs: &[f64], d: usize, how: Multiply) -> TruncatedSeries {
    bs.iter().fold(exp_series(a, d, false), |acc, &b| mult_series(&acc, &exp_series(b, d, true), d, how))
}

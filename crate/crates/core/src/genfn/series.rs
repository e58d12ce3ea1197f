//! Truncated power series and their products.

use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Coefficients `c₀..c_D` of a power series truncated at degree `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

/// How [`mult_series`] forms the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiply {
    Direct,
    Fft,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series holds at least c₀");
        Self { coeffs }
    }

    /// The constant series `1`.
    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c_k`, zero past the truncation degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }
}

/// Taylor coefficients `a^k/k!` of `e^{at}` up to `t^D`; `drop_constant`
/// gives `e^{at} − 1` instead.
pub fn exp_series(a: f64, d: usize, drop_constant: bool) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(d + 1);
    let mut c = 1.0;
    coeffs.push(if drop_constant { 0.0 } else { 1.0 });
    for k in 1..=d {
        c *= a / k as f64;
        coeffs.push(c);
    }
    TruncatedSeries { coeffs }
}

/// Coefficients of `(e^{at} − 1)/(at)` up to `t^D`, that is
/// `a^k/(k+1)!`. Leads with 1 for every `a ≠ 0`.
pub fn shifted_exp_series(a: f64, d: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(d + 1);
    let mut c = 1.0;
    coeffs.push(c);
    for k in 1..=d {
        c *= a / (k + 1) as f64;
        coeffs.push(c);
    }
    TruncatedSeries { coeffs }
}

/// `f·g` truncated at degree `d`.
pub fn mult_series(f: &TruncatedSeries, g: &TruncatedSeries, d: usize, how: Multiply) -> TruncatedSeries {
    let fl = f.coeffs.len().min(d + 1);
    let gl = g.coeffs.len().min(d + 1);
    let (f, g) = (&f.coeffs[..fl], &g.coeffs[..gl]);
    let out_len = (fl + gl - 1).min(d + 1);
    let coeffs = match how {
        Multiply::Direct => convolve_direct(f, g, out_len),
        Multiply::Fft => convolve_fft(f, g, out_len),
    };
    TruncatedSeries { coeffs }
}

fn convolve_direct(f: &[f64], g: &[f64], out_len: usize) -> Vec<f64> {
    (0..out_len)
        .map(|k| {
            let lo = k.saturating_sub(g.len() - 1);
            let hi = k.min(f.len() - 1);
            (lo..=hi).map(|i| f[i] * g[k - i]).sum()
        })
        .collect()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn convolve_fft(f: &[f64], g: &[f64], out_len: usize) -> Vec<f64> {
    let n = (f.len() + g.len() - 1).next_power_of_two();
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });
    let lift = |x: &[f64]| {
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (slot, &v) in buf.iter_mut().zip(x) {
            slot.re = v;
        }
        buf
    };
    let mut fb = lift(f);
    let mut gb = lift(g);
    fwd.process(&mut fb);
    fwd.process(&mut gb);
    for (x, y) in fb.iter_mut().zip(&gb) {
        *x *= y;
    }
    inv.process(&mut fb);
    let scale = 1.0 / n as f64;
    fb[..out_len].iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exp_coefficients() {
        assert_eq!(exp_series(1.0, 2, false).coeffs(), &[1.0, 1.0, 0.5]);
        assert_eq!(exp_series(1.0, 2, true).coeffs(), &[0.0, 1.0, 0.5]);
        assert!(exp_series(0.0, 4, true).coeffs().iter().all(|&c| c == 0.0));
        assert!((exp_series(2.0, 3, false).coeff(3) - 8.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn small_products() {
        let f = TruncatedSeries::new(vec![1.0, 1.0]);
        for how in [Multiply::Direct, Multiply::Fft] {
            let p = mult_series(&f, &f, 2, how);
            for (x, y) in p.coeffs().iter().zip([1.0, 2.0, 1.0]) {
                assert!((x - y).abs() < 1e-15);
            }
            let g = TruncatedSeries::new(vec![0.5, -2.0, 3.0]);
            let id = mult_series(&g, &TruncatedSeries::one(), 5, how);
            for (x, y) in id.coeffs().iter().zip(g.coeffs()) {
                assert!((x - y).abs() < 1e-15);
            }
            assert_eq!(mult_series(&g, &g, 1, how).degree(), 1);
        }
    }

    proptest! {
        #[test]
        fn fft_matches_direct(
            f in prop::collection::vec(0.5f64..1.0, 1..200),
            g in prop::collection::vec(0.5f64..1.0, 1..200),
            d in 0usize..256,
        ) {
            let f = TruncatedSeries::new(f);
            let g = TruncatedSeries::new(g);
            let a = mult_series(&f, &g, d, Multiply::Direct);
            let b = mult_series(&f, &g, d, Multiply::Fft);
            prop_assert_eq!(a.degree(), b.degree());
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs());
            }
        }
    }
}

//! Uniform time grid, L1 convolution weights, and the generating symbol of
//! the weights.
//!
//! The symbol `b̂(z) = Σ_{j≥1} b_j e^{-jz}` is continued to the strip
//! `|Im z| ≤ π` through its lattice sum `Σ_k (z + 2kπi)^{α-2}`. The lattice
//! sum is evaluated directly for `|k| ≤ K` and the two tails are summed in
//! closed form by Euler-Maclaurin, which keeps `K` small.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::special::gamma;

/// Uniform mesh `t_j = j T / J` of `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    final_time: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(final_time: f64, steps: usize) -> Result<Self> {
        if !(final_time > 0.0 && final_time.is_finite()) {
            return domain(format!("final time must be positive, got {final_time}"));
        }
        if steps == 0 {
            return domain("time grid needs at least one step");
        }
        Ok(Self { final_time, steps })
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.final_time / self.steps as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.steps {
            self.final_time
        } else {
            j as f64 * self.final_time / self.steps as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| self.node(j)).collect()
    }
}

/// `b_j = j^{1-α} / Γ(2-α)` for `j = 0..=J` and the second differences
/// `d_m = b_{m+1} - 2 b_m + b_{m-1}` for `m = 1..J-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Weights {
    alpha: f64,
    b: Vec<f64>,
    d: Vec<f64>,
}

pub fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        domain(format!("fractional order must lie in (0, 1), got {alpha}"))
    }
}

/// Build the L1 weights for order `alpha` and `steps` time steps.
pub fn make_weights(alpha: f64, steps: usize) -> Result<L1Weights> {
    check_order(alpha)?;
    if steps == 0 {
        return domain("weights need at least one step");
    }
    let p = 1.0 - alpha;
    let g = gamma(2.0 - alpha);
    let b: Vec<f64> = (0..=steps).map(|j| (j as f64).powf(p) / g).collect();
    let d = (1..steps).map(|m| second_difference(m, p) / g).collect();
    Ok(L1Weights { alpha, b, d })
}

/// `(m+1)^p - 2 m^p + (m-1)^p`, summed as a binomial series once `m` is large
/// enough that the direct form would cancel.
fn second_difference(m: usize, p: f64) -> f64 {
    let mf = m as f64;
    if m < 8 {
        return (mf + 1.0).powf(p) - 2.0 * mf.powf(p) + (mf - 1.0).powf(p);
    }
    let x2 = 1.0 / (mf * mf);
    // 2 Σ_{k≥1} C(p, 2k) x^{2k}
    let mut coeff = p * (p - 1.0) / 2.0;
    let mut xpow = x2;
    let mut sum = 0.0;
    let mut k = 1usize;
    loop {
        let term = coeff * xpow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || k > 40 {
            break;
        }
        let n = 2 * k as u32;
        coeff *= (p - n as f64) * (p - n as f64 - 1.0) / ((n + 1) as f64 * (n + 2) as f64);
        xpow *= x2;
        k += 1;
    }
    2.0 * mf.powf(p) * sum
}

impl L1Weights {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of steps the weights were built for.
    pub fn steps(&self) -> usize {
        self.b.len() - 1
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Second differences, `d()[m - 1] = d_m`.
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// History coefficient `d_m`, `1 ≤ m ≤ J-1`.
    pub fn second_diff(&self, m: usize) -> f64 {
        self.d[m - 1]
    }

    /// Time part of the L1 operator applied at step `k` to the history
    /// `w_1..w_k` (scalar sequences): `b_1 w_k + Σ_{j<k} d_{k-j} w_j`.
    pub fn apply_scalar(&self, history: &[f64]) -> f64 {
        let k = history.len();
        let mut s = self.b[1] * history[k - 1];
        for (j, w) in history[..k - 1].iter().enumerate() {
            s += self.d[k - 1 - (j + 1)] * w;
        }
        s
    }
}

const BERNOULLI_EVEN: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Default number of explicit lattice terms on each side.
pub const DEFAULT_LATTICE_TERMS: usize = 16;

/// Evaluator for `b̂` and `ψ(z) = (e^z - 1)^2 b̂(z)` at fixed order.
#[derive(Debug, Clone, Copy)]
pub struct Symbol {
    alpha: f64,
    terms: usize,
}

/// `b̂(z)` with truncation error estimate.
#[derive(Debug, Clone, Copy)]
pub struct BhatValue {
    pub value: Complex64,
    pub tail_error: f64,
}

impl Symbol {
    pub fn new(alpha: f64, terms: usize) -> Result<Self> {
        check_order(alpha)?;
        if terms == 0 {
            return domain("lattice sum needs at least one term");
        }
        Ok(Self { alpha, terms })
    }

    pub fn with_default_terms(alpha: f64) -> Result<Self> {
        Self::new(alpha, DEFAULT_LATTICE_TERMS)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `b̂(z)` and an estimate of the Euler-Maclaurin remainder.
    pub fn bhat_detailed(&self, z: Complex64) -> Result<BhatValue> {
        let two_pi = 2.0 * PI;
        let shift = (z.im / two_pi).round();
        let z = Complex64::new(z.re, z.im - shift * two_pi);
        if z.im == 0.0 && z.re <= 0.0 {
            return domain(format!(
                "b̂ is not defined on the closed negative real axis (z = {z})"
            ));
        }
        let s = self.alpha - 2.0;
        let k_max = self.terms as i64;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in -k_max..=k_max {
            let zk = z + Complex64::new(0.0, two_pi * k as f64);
            sum += zk.powf(s);
        }
        // Σ_{k>K} (z + 2kπi)^s = (2πi)^s H(K+1+w), w = z/(2πi), and the mirror
        // tail with (-2πi)^s and -w. H(a) = Σ_{n≥0} (a+n)^s.
        let w = z / Complex64::new(0.0, two_pi);
        let a_plus = Complex64::new((k_max + 1) as f64, 0.0) + w;
        let a_minus = Complex64::new((k_max + 1) as f64, 0.0) - w;
        let (h_plus, e_plus) = hurwitz_tail(s, a_plus);
        let (h_minus, e_minus) = hurwitz_tail(s, a_minus);
        let ln2pi = two_pi.ln();
        let pref_plus = (Complex64::new(s * ln2pi, s * PI / 2.0)).exp();
        let pref_minus = (Complex64::new(s * ln2pi, -s * PI / 2.0)).exp();
        let value = sum + pref_plus * h_plus + pref_minus * h_minus;
        let tail_error = pref_plus.norm() * (e_plus + e_minus);
        Ok(BhatValue { value, tail_error })
    }

    pub fn bhat(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.bhat_detailed(z)?.value)
    }

    /// `b̂(z)`, failing when the remainder estimate exceeds `tol · |b̂(z)|`.
    pub fn bhat_checked(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let v = self.bhat_detailed(z)?;
        let bound = tol * v.value.norm();
        if v.tail_error > bound {
            return Err(Error::Precision {
                what: format!("lattice tail of b̂ at z = {z}"),
                estimate: v.tail_error,
                tolerance: bound,
            });
        }
        Ok(v.value)
    }

    pub fn psi(&self, z: Complex64) -> Result<Complex64> {
        let em1 = exp_m1(z);
        Ok(em1 * em1 * self.bhat(z)?)
    }

    /// `e^{-z} ψ(z)`, the quantity whose sector and size drive the kernel.
    pub fn damped_psi(&self, z: Complex64) -> Result<Complex64> {
        Ok((-z).exp() * self.psi(z)?)
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn exp_m1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * c - 2.0 * half * half;
    Complex64::new(re, z.re.exp() * s)
}

/// Euler-Maclaurin value of `Σ_{n≥0} (a+n)^s` for `s < -1` and `Re a` large,
/// with the size of the first omitted correction.
fn hurwitz_tail(s: f64, a: Complex64) -> (Complex64, f64) {
    let mut value = -a.powf(s + 1.0) / (s + 1.0) + 0.5 * a.powf(s);
    // f^{(2m-1)}(0) = s (s-1) ... (s-2m+2) a^{s-2m+1}
    let mut falling = s; // s (s-1) ... (s - r + 1) for r = 1
    let mut r = 1usize;
    let mut fact = 1.0; // (2m)!
    let mut last = 0.0;
    for (m, bern) in BERNOULLI_EVEN.iter().enumerate() {
        let two_m = 2 * (m + 1);
        while r < two_m - 1 {
            falling *= s - r as f64;
            r += 1;
        }
        fact *= ((two_m - 1) * two_m) as f64;
        let term = bern / fact * falling * a.powf(s - (two_m as f64) + 1.0);
        if m + 1 == BERNOULLI_EVEN.len() {
            last = term.norm();
        } else {
            value -= term;
        }
    }
    (value, last)
}

/// Diagnostics of the discrete symbol on the imaginary axis and on the
/// truncated contour `{ |Arg z| = θ*, |Im z| ≤ π }`.
#[derive(Debug, Clone)]
pub struct SymbolReport {
    pub alpha: f64,
    pub theta_star: f64,
    /// min over sampled `y` of `Re(e^{-iy} ψ(iy))`.
    pub min_re_psi_on_imag_axis: f64,
    /// min over contour samples of `|e^{-z} ψ(z)| / |z|^α`.
    pub lower_constant: f64,
    /// max over contour samples of `|ψ(z) - z^α| / |z|^{α+1}`.
    pub upper_constant: f64,
    /// max over contour samples of `|Arg(e^{-z} ψ(z))|`.
    pub max_arg: f64,
    pub imag_axis_samples: Vec<f64>,
    pub contour_samples: Vec<Complex64>,
}

/// Lower end of the imaginary-axis sampling window.
pub const IMAG_AXIS_START: f64 = 0.05;
/// Samples closer than this to the origin are excluded.
pub const ORIGIN_EXCLUSION: f64 = 1e-4;
/// Default contour angle for the diagnostics and the discrete kernel.
pub const DEFAULT_THETA_STAR: f64 = 9.0 * PI / 16.0;

pub fn symbol_diagnostics(alpha: f64, theta_star: f64, n_samples: usize) -> Result<SymbolReport> {
    check_order(alpha)?;
    if n_samples < 8 {
        return domain(format!(
            "symbol diagnostics need at least 8 samples, got {n_samples}"
        ));
    }
    if !(theta_star > PI / 2.0 && theta_star < PI) {
        return domain(format!(
            "contour angle must lie in (π/2, π), got {theta_star}"
        ));
    }
    let symbol = Symbol::with_default_terms(alpha)?;

    let imag_axis_samples: Vec<f64> = (0..n_samples)
        .map(|i| IMAG_AXIS_START + (PI - IMAG_AXIS_START) * i as f64 / (n_samples - 1) as f64)
        .collect();
    let mut min_re = f64::INFINITY;
    for &y in &imag_axis_samples {
        let z = Complex64::new(0.0, y);
        min_re = min_re.min(symbol.damped_psi(z)?.re);
    }

    let r_max = PI / theta_star.sin();
    let (lr0, lr1) = (ORIGIN_EXCLUSION.ln(), r_max.ln());
    let mut contour_samples = Vec::with_capacity(2 * n_samples);
    for i in 0..n_samples {
        let r = (lr0 + (lr1 - lr0) * i as f64 / (n_samples - 1) as f64).exp();
        contour_samples.push(Complex64::from_polar(r, theta_star));
        contour_samples.push(Complex64::from_polar(r, -theta_star));
    }
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut max_arg: f64 = 0.0;
    for &z in &contour_samples {
        let psi = symbol.psi(z)?;
        let damped = (-z).exp() * psi;
        let r = z.norm();
        lower = lower.min(damped.norm() / r.powf(alpha));
        upper = upper.max((psi - z.powf(alpha)).norm() / r.powf(alpha + 1.0));
        max_arg = max_arg.max(damped.arg().abs());
    }
    Ok(SymbolReport {
        alpha,
        theta_star,
        min_re_psi_on_imag_axis: min_re,
        lower_constant: lower,
        upper_constant: upper,
        max_arg,
        imag_axis_samples,
        contour_samples,
    })
}

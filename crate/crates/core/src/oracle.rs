//! Reference solutions of the semidiscrete problem: Mittag-Leffler functions,
//! spectral synthesis of mild solutions, and the continuous kernel `E(t)` by
//! contour quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::banded::Tridiagonal;
use crate::error::{domain, Error, Result};
use crate::fem1d::{AssembledSystem, SpectralData};
use crate::par::Execution;
use crate::quad::{adaptive, GaussRule};
use crate::special::{ln_gamma_signed, recip_gamma};

/// Tuning of [`mittag_leffler_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MittagLefflerParams {
    /// Series used for `x ≥ 0` and for `|x| ≤ crossover^α`. Beyond that the
    /// alternating terms grow like `exp(|x|^{1/α})` and cancellation dominates.
    pub crossover: f64,
    pub series_cap: usize,
    pub asymptotic_cap: usize,
    /// Relative accuracy demanded of each branch.
    pub tolerance: f64,
}

impl Default for MittagLefflerParams {
    fn default() -> Self {
        Self {
            crossover: 4.0,
            series_cap: 1000,
            asymptotic_cap: 30,
            tolerance: 1e-13,
        }
    }
}

impl MittagLefflerParams {
    fn validate(&self) -> Result<()> {
        if self.series_cap < 50 {
            return domain("Mittag-Leffler series cap must be at least 50 terms");
        }
        if self.asymptotic_cap == 0 || self.asymptotic_cap > 30 {
            return domain("Mittag-Leffler asymptotic cap must lie in 1..=30");
        }
        if !(self.crossover > 0.0 && self.tolerance > 0.0) {
            return domain("Mittag-Leffler crossover and tolerance must be positive");
        }
        Ok(())
    }
}

/// Evaluation strategy for `E_{α,β}(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MlBranch {
    ClosedForm,
    Series,
    Asymptotic,
    Integral,
}

/// A branch value with its error estimate (absolute).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlValue {
    pub value: f64,
    pub error: f64,
    pub branch: MlBranch,
}

/// `E_{α,β}(x)` with default parameters.
pub fn mittag_leffler(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    mittag_leffler_with(&MittagLefflerParams::default(), alpha, beta, x).map(|v| v.value)
}

pub fn mittag_leffler_with(
    params: &MittagLefflerParams,
    alpha: f64,
    beta: f64,
    x: f64,
) -> Result<MlValue> {
    params.validate()?;
    check_args(alpha, beta, x)?;
    if alpha == 1.0 {
        return ml_branch(params, alpha, beta, x, MlBranch::ClosedForm);
    }
    if x == 0.0 {
        return Ok(MlValue {
            value: recip_gamma(beta),
            error: 0.0,
            branch: MlBranch::Series,
        });
    }
    if x > 0.0 {
        return ml_branch(params, alpha, beta, x, MlBranch::Series);
    }
    let first = if -x <= params.crossover.powf(alpha) {
        MlBranch::Series
    } else {
        MlBranch::Asymptotic
    };
    if let Ok(v) = ml_branch(params, alpha, beta, x, first) {
        return Ok(v);
    }
    ml_branch(params, alpha, beta, x, MlBranch::Integral)
}

fn check_args(alpha: f64, beta: f64, x: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!(
            "Mittag-Leffler order must lie in (0, 1], got {alpha}"
        ));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!(
            "Mittag-Leffler second parameter must be positive, got {beta}"
        ));
    }
    if !(x <= 5.0) {
        return domain(format!(
            "Mittag-Leffler argument must be finite and at most 5, got {x}"
        ));
    }
    Ok(())
}

/// Evaluate one specific branch. A branch that cannot meet the requested
/// tolerance at `x` returns a precision error instead of a poor value.
pub fn ml_branch(
    params: &MittagLefflerParams,
    alpha: f64,
    beta: f64,
    x: f64,
    branch: MlBranch,
) -> Result<MlValue> {
    check_args(alpha, beta, x)?;
    let out = match branch {
        MlBranch::ClosedForm => closed_form(alpha, beta, x)?,
        MlBranch::Series => series(params, alpha, beta, x)?,
        MlBranch::Asymptotic => asymptotic(params, alpha, beta, x)?,
        MlBranch::Integral => integral(params, alpha, beta, x)?,
    };
    let allowed = params.tolerance * out.0.abs().max(f64::MIN_POSITIVE);
    if !(out.0.is_finite() && out.1 <= allowed) && branch != MlBranch::ClosedForm {
        return Err(Error::Precision {
            what: format!("E_({alpha},{beta})({x}) by {branch:?}"),
            estimate: out.1,
            tolerance: allowed,
        });
    }
    Ok(MlValue {
        value: out.0,
        error: out.1,
        branch,
    })
}

fn closed_form(alpha: f64, beta: f64, x: f64) -> Result<(f64, f64)> {
    if alpha != 1.0 {
        return Err(Error::Unsupported(format!(
            "no closed form for α = {alpha}"
        )));
    }
    if beta == 1.0 {
        Ok((x.exp(), 0.0))
    } else if beta == 2.0 {
        Ok(if x == 0.0 {
            (1.0, 0.0)
        } else {
            (x.exp_m1() / x, 0.0)
        })
    } else {
        Err(Error::Unsupported(format!(
            "α = 1 is supported for β ∈ {{1, 2}}, got {beta}"
        )))
    }
}

fn series(params: &MittagLefflerParams, alpha: f64, beta: f64, x: f64) -> Result<(f64, f64)> {
    let lnx = x.abs().ln();
    let mut sum = recip_gamma(beta);
    let mut abs_sum = sum.abs();
    let mut past_peak = false;
    let mut last = f64::INFINITY;
    for k in 1..=params.series_cap {
        let (lg, sg) = ln_gamma_signed(alpha * k as f64 + beta);
        let mag = (k as f64 * lnx - lg).exp();
        let sign = if x < 0.0 && k % 2 == 1 { -sg } else { sg };
        let term = sign * mag;
        sum += term;
        abs_sum += mag;
        if mag < last {
            past_peak = true;
        }
        last = mag;
        if past_peak && mag <= 1e-17 * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok((sum, f64::EPSILON * abs_sum));
        }
    }
    Err(Error::Precision {
        what: format!("E_({alpha},{beta})({x}) series"),
        estimate: last,
        tolerance: 1e-17 * sum.abs(),
    })
}

fn asymptotic(params: &MittagLefflerParams, alpha: f64, beta: f64, x: f64) -> Result<(f64, f64)> {
    if x >= 0.0 {
        return Err(Error::Unsupported("asymptotic branch needs x < 0".into()));
    }
    let inv = 1.0 / x;
    let cap = params.asymptotic_cap;
    let terms: Vec<f64> = (1..=cap + 2)
        .map(|k| -inv.powi(k as i32) * recip_gamma(beta - alpha * k as f64))
        .collect();
    // `1/Γ` has isolated zeros, so truncation is judged on the envelope
    // max(|t_k|, |t_{k+1}|) of the first omitted pair
    let envelope = |k: usize| terms[k].abs().max(terms[k + 1].abs());
    let best = (0..=cap)
        .min_by(|&a, &b| envelope(a).total_cmp(&envelope(b)))
        .expect("nonempty range");
    let sum: f64 = terms[..best].iter().sum();
    Ok((sum, envelope(best).max(f64::EPSILON * sum.abs())))
}

/// Collapsed Hankel integral, in the variable `u = r^α`.
fn integral(params: &MittagLefflerParams, alpha: f64, beta: f64, x: f64) -> Result<(f64, f64)> {
    if x >= 0.0 || alpha >= 1.0 {
        return Err(Error::Unsupported(
            "integral branch needs x < 0 and α < 1".into(),
        ));
    }
    if (beta - (alpha + 1.0)).abs() < 1e-14 {
        // E_{α,α+1}(x) = (E_{α,1}(x) - 1) / x
        let (e, err) = integral(params, alpha, 1.0, x)?;
        return Ok(((e - 1.0) / x, err / x.abs()));
    }
    if beta >= 1.0 + alpha {
        return Err(Error::Unsupported(format!(
            "integral branch needs β < 1 + α, got {beta}"
        )));
    }
    let lambda = -x;
    let (s_beta, s_diff, c_alpha) = (
        (PI * beta).sin(),
        (PI * (alpha - beta)).sin(),
        (PI * alpha).cos(),
    );
    let upper = 46f64.powf(alpha);
    let mut breaks = vec![0.0, upper];
    for b in [lambda, -lambda * c_alpha] {
        if b > 0.0 && b < upper {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let q = (1.0 - beta) / alpha;
    let f = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let den = u * u + 2.0 * lambda * u * c_alpha + lambda * lambda;
        (-u.powf(1.0 / alpha)).exp() * u.powf(q) * (u * s_beta - lambda * s_diff) / den
    };
    let res = adaptive(f, &breaks, 1e-300, 0.1 * params.tolerance, 4000);
    let scale = 1.0 / (alpha * PI);
    if !res.converged {
        return Err(Error::Precision {
            what: format!("E_({alpha},{beta})({x}) integral"),
            estimate: res.error * scale,
            tolerance: params.tolerance * (res.value * scale).abs(),
        });
    }
    Ok((res.value * scale, res.error * scale))
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!(
            "kernel is singular at t = 0; need finite t > 0, got {t}"
        ));
    }
    Ok(())
}

/// Modal factors `f(μ_i)` evaluated in ascending-μ order, then synthesized.
fn modal_apply(
    spectral: &SpectralData,
    v: &[f64],
    exec: Execution,
    factor: impl Fn(f64) -> Result<f64> + Sync + Send,
) -> Result<Vec<f64>> {
    if v.len() != spectral.modes().first().map_or(0, Vec::len) {
        return domain("vector does not conform to the spectral data");
    }
    let coeffs = spectral.modal_coefficients(v);
    let factors = exec.map(spectral.eigenvalues(), |&mu| factor(mu));
    let scaled = factors
        .into_iter()
        .zip(coeffs)
        .map(|(f, c)| f.map(|f| f * c))
        .collect::<Result<Vec<f64>>>()?;
    Ok(spectral.synthesize(&scaled))
}

/// Modal factor of `E(t)`: `t^{α-1} E_{α,α}(-μ t^α)`.
pub fn delta_modal_factor(alpha: f64, mu: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(t.powf(alpha - 1.0) * mittag_leffler(alpha, alpha, -mu * t.powf(alpha))?)
}

/// Modal factor of the constant-source solution: `t^α E_{α,α+1}(-μ t^α)`.
pub fn constant_source_modal_factor(alpha: f64, mu: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if !(t > 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    let ta = t.powf(alpha);
    Ok(ta * mittag_leffler(alpha, alpha + 1.0, -mu * ta)?)
}

/// `E(t) v`, the semidiscrete solution with source `v δ_0`.
pub fn semidiscrete_delta(
    spectral: &SpectralData,
    alpha: f64,
    v: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    check_time(t)?;
    modal_apply(spectral, v, Execution::default(), |mu| {
        delta_modal_factor(alpha, mu, t)
    })
}

/// Semidiscrete solution at time `t` for the time-constant source `g`.
pub fn semidiscrete_constant_source(
    spectral: &SpectralData,
    alpha: f64,
    g: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    if t == 0.0 {
        return Ok(vec![0.0; g.len()]);
    }
    modal_apply(spectral, g, Execution::default(), |mu| {
        constant_source_modal_factor(alpha, mu, t)
    })
}

/// Quadrature parameters of [`kernel_contour_continuous`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousContour {
    /// Ray angle, in `(π/2, π)`.
    pub angle: f64,
    /// Gauss nodes per geometric panel (the check run uses twice as many).
    pub nodes_per_panel: usize,
    /// Required agreement between the two runs, relative to the result.
    pub self_check: f64,
}

impl Default for ContinuousContour {
    fn default() -> Self {
        Self {
            angle: 0.75 * PI,
            nodes_per_panel: 16,
            self_check: 1e-8,
        }
    }
}

/// `E(t) v` from the contour integral of `e^{tz} (z^α M - A_h)^{-1} M v`.
pub fn kernel_contour_continuous(
    system: &AssembledSystem,
    alpha: f64,
    t: f64,
    v: &[f64],
    contour: &ContinuousContour,
) -> Result<Vec<f64>> {
    contour_kernel(system, system.operator(), alpha, t, v, contour)
}

/// Same as [`kernel_contour_continuous`] with the transposed operator.
pub fn kernel_contour_continuous_adjoint(
    system: &AssembledSystem,
    alpha: f64,
    t: f64,
    v: &[f64],
    contour: &ContinuousContour,
) -> Result<Vec<f64>> {
    contour_kernel(system, system.adjoint(), alpha, t, v, contour)
}

fn contour_kernel(
    system: &AssembledSystem,
    operator: &Tridiagonal,
    alpha: f64,
    t: f64,
    v: &[f64],
    contour: &ContinuousContour,
) -> Result<Vec<f64>> {
    crate::l1_core::check_order(alpha)?;
    check_time(t)?;
    if !(contour.angle > PI / 2.0 && contour.angle < PI) {
        return domain(format!(
            "ray angle must lie in (π/2, π), got {}",
            contour.angle
        ));
    }
    if contour.nodes_per_panel < 4 {
        return domain("need at least 4 nodes per panel");
    }
    if v.len() != system.dofs() {
        return domain("vector does not conform to the assembled system");
    }
    let coarse = contour_sum(
        system,
        operator,
        alpha,
        t,
        v,
        contour.angle,
        contour.nodes_per_panel,
    )?;
    let fine = contour_sum(
        system,
        operator,
        alpha,
        t,
        v,
        contour.angle,
        2 * contour.nodes_per_panel,
    )?;
    let size = fine.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let change = coarse
        .iter()
        .zip(&fine)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if change > contour.self_check * size.max(f64::MIN_POSITIVE) {
        return Err(Error::Precision {
            what: format!("contour kernel at t = {t}"),
            estimate: change,
            tolerance: contour.self_check * size,
        });
    }
    Ok(fine)
}

fn contour_sum(
    system: &AssembledSystem,
    operator: &Tridiagonal,
    alpha: f64,
    t: f64,
    v: &[f64],
    angle: f64,
    nodes: usize,
) -> Result<Vec<f64>> {
    let rule = GaussRule::new(nodes);
    let eps = (1.0 / t).min(1.0);
    let r_max = 1e16f64.ln() / (t * angle.cos().abs());
    let mut pts: Vec<(Complex64, Complex64)> = Vec::new();
    for (phi, w) in rule.mapped(0.0, angle) {
        let z = Complex64::from_polar(eps, phi);
        pts.push((z, Complex64::new(0.0, w) * z));
    }
    let dir = Complex64::from_polar(1.0, angle);
    let mut a = eps;
    while a < r_max {
        let b = (2.0 * a).min(r_max);
        for (r, w) in rule.mapped(a, b) {
            pts.push((dir * r, dir * w));
        }
        a = b;
    }

    let mass = system.mass().to_complex();
    let op = operator.to_complex();
    let mv: Vec<Complex64> = system
        .mass()
        .matvec(v)
        .into_iter()
        .map(Complex64::from)
        .collect();
    let parts: Vec<Result<Vec<Complex64>>> = Execution::default().map(&pts, |&(z, w)| {
        let shifted = mass.combine(z.powf(alpha), &op, Complex64::new(-1.0, 0.0));
        let lu = shifted
            .factor()
            .map_err(|_| Error::Contour(format!("resolvent singular at z = {z}")))?;
        let weight = w * (t * z).exp();
        Ok(lu.solve(&mv).into_iter().map(|u| weight * u).collect())
    });
    let mut acc = vec![Complex64::new(0.0, 0.0); v.len()];
    for part in parts {
        for (a, p) in acc.iter_mut().zip(part?) {
            *a += p;
        }
    }
    Ok(acc.into_iter().map(|c| c.im / PI).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::SpaceMesh1D;
    use crate::fem1d::{assemble, generalized_eigendecomposition, OperatorCoefficients};
    use crate::special::gamma;

    fn erfc_by_quadrature(x: f64) -> f64 {
        let r = adaptive(
            |s| (-s * s).exp(),
            &[x, x + 3.0, x + 10.0],
            1e-18,
            1e-15,
            200,
        );
        2.0 / PI.sqrt() * r.value
    }

    #[test]
    fn closed_forms() {
        assert!((mittag_leffler(1.0, 1.0, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        assert!(
            (mittag_leffler(1.0, 2.0, -3.0).unwrap() - (1.0 - (-3f64).exp()) / 3.0).abs() < 1e-15
        );
        assert!(mittag_leffler(1.0, 0.7, -1.0).is_err());
        for (a, b) in [(0.3, 0.3), (0.5, 1.0), (0.8, 1.8)] {
            assert!((mittag_leffler(a, b, 0.0).unwrap() - 1.0 / gamma(b)).abs() < 1e-15);
        }
    }

    #[test]
    fn erfc_identity() {
        for x in [0.5f64, 1.0, 2.0, 2.5, 3.0, 5.0] {
            let expect = (x * x).exp() * erfc_by_quadrature(x);
            let got = mittag_leffler(0.5, 1.0, -x).unwrap();
            assert!(
                (got - expect).abs() < 1e-10 * expect,
                "x = {x}: {got} vs {expect}"
            );
        }
        assert!((mittag_leffler(0.5, 1.0, -1.0).unwrap() - 0.4275836).abs() < 1e-7);
    }

    #[test]
    fn low_order_identity() {
        // E_{α,1}(x) + ... : E_{α,α+1}(x) x + 1 = E_{α,1}(x)
        for alpha in [0.2, 0.5, 0.9] {
            for x in [-0.3f64, -2.0, -8.0, -40.0, -300.0] {
                let e1 = mittag_leffler(alpha, 1.0, x).unwrap();
                let e2 = mittag_leffler(alpha, alpha + 1.0, x).unwrap();
                assert!((x * e2 + 1.0 - e1).abs() < 1e-11, "α={alpha}, x={x}");
            }
        }
    }

    #[test]
    fn argument_errors() {
        assert!(mittag_leffler(0.0, 1.0, -1.0).is_err());
        assert!(mittag_leffler(0.5, -1.0, -1.0).is_err());
        assert!(mittag_leffler(0.5, 1.0, 6.0).is_err());
        assert!(mittag_leffler(0.5, 1.0, f64::NAN).is_err());
        let bad = MittagLefflerParams {
            series_cap: 10,
            ..Default::default()
        };
        assert!(mittag_leffler_with(&bad, 0.5, 1.0, -1.0).is_err());
    }

    #[test]
    fn positive_arguments_use_the_series() {
        let v = mittag_leffler_with(&MittagLefflerParams::default(), 0.5, 1.0, 2.0).unwrap();
        assert_eq!(v.branch, MlBranch::Series);
        // E_{1/2}(x) = e^{x²} erfc(-x)
        let expect = 4f64.exp() * (2.0 - erfc_by_quadrature(2.0));
        assert!((v.value - expect).abs() < 1e-12 * expect);
    }

    fn laplacian(n: usize) -> AssembledSystem {
        assemble(
            &SpaceMesh1D::unit(n).unwrap(),
            &OperatorCoefficients::laplacian(),
        )
        .unwrap()
    }

    #[test]
    fn heat_semigroup_matches_matrix_exponential() {
        let sys = laplacian(8);
        let spectral = generalized_eigendecomposition(&sys).unwrap();
        let v: Vec<f64> = (0..7).map(|i| (i as f64 - 2.5).powi(2)).collect();
        let m = sys.mass().to_dense();
        let a = sys.operator().to_dense();
        let gen = m.clone().lu().solve(&a).unwrap();
        for t in [0.001, 0.01, 0.1] {
            let expect = (gen.clone() * t).exp() * nalgebra::DVector::from_vec(v.clone());
            let got = semidiscrete_delta(&spectral, 1.0, &v, t).unwrap();
            for (g, e) in got.iter().zip(expect.iter()) {
                assert!(
                    (g - e).abs() < 1e-10 * e.abs().max(1.0),
                    "t={t}: {g} vs {e}"
                );
            }
        }
    }

    #[test]
    fn constant_source_special_cases() {
        let sys = laplacian(8);
        let spectral = generalized_eigendecomposition(&sys).unwrap();
        let g = spectral.modes()[0].clone();
        assert!(semidiscrete_constant_source(&spectral, 0.5, &g, 0.0)
            .unwrap()
            .iter()
            .all(|x| *x == 0.0));
        let mu = spectral.eigenvalues()[0];
        let t = 0.3;
        let y = semidiscrete_constant_source(&spectral, 1.0, &g, t).unwrap();
        let factor = (1.0 - (-mu * t).exp()) / mu;
        for (y, p) in y.iter().zip(&g) {
            assert!((y - factor * p).abs() < 1e-13);
        }
        assert!(
            (constant_source_modal_factor(0.4, 0.0, 2.0).unwrap() - 2f64.powf(0.4) / gamma(1.4))
                .abs()
                < 1e-14
        );
        assert!(semidiscrete_delta(&spectral, 0.5, &g, 0.0).is_err());
        assert!(semidiscrete_delta(&spectral, 0.5, &vec![0.0; 7], 0.1)
            .unwrap()
            .iter()
            .all(|x| *x == 0.0));
    }

    #[test]
    fn contour_matches_spectral() {
        let sys = laplacian(16);
        let spectral = generalized_eigendecomposition(&sys).unwrap();
        let v: Vec<f64> = sys
            .mesh()
            .interior_nodes()
            .iter()
            .map(|x| x.powf(-0.49))
            .collect();
        for alpha in [0.3, 0.5, 0.9] {
            for t in [0.01, 0.05, 0.1, 1.0] {
                let a =
                    kernel_contour_continuous(&sys, alpha, t, &v, &ContinuousContour::default())
                        .unwrap();
                let b = semidiscrete_delta(&spectral, alpha, &v, t).unwrap();
                let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-8 * scale, "α={alpha} t={t}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn contour_parameter_errors() {
        let sys = laplacian(4);
        let v = vec![1.0; 3];
        assert!(
            kernel_contour_continuous(&sys, 0.5, 0.0, &v, &ContinuousContour::default()).is_err()
        );
        let bad = ContinuousContour {
            angle: 1.0,
            ..Default::default()
        };
        assert!(kernel_contour_continuous(&sys, 0.5, 0.1, &v, &bad).is_err());
        let tight = ContinuousContour {
            nodes_per_panel: 4,
            self_check: 1e-15,
            ..Default::default()
        };
        assert!(matches!(
            kernel_contour_continuous(&sys, 0.5, 0.1, &v, &tight),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn branches_agree_where_accurate() {
        let p = MittagLefflerParams::default();
        for alpha in [0.25, 0.5, 0.75, 0.99] {
            for beta in [alpha, 1.0, alpha + 1.0] {
                let mut compared = [0usize; 2];
                for i in 1..=400 {
                    let x = -60.0 * (i as f64 / 400.0).powi(2);
                    let Ok(reference) = ml_branch(&p, alpha, beta, x, MlBranch::Integral) else {
                        continue;
                    };
                    let reference = reference.value;
                    for (slot, branch) in [MlBranch::Series, MlBranch::Asymptotic]
                        .into_iter()
                        .enumerate()
                    {
                        if let Ok(v) = ml_branch(&p, alpha, beta, x, branch) {
                            compared[slot] += 1;
                            let err = (v.value - reference).abs();
                            assert!(
                                err <= 1e-10 * reference.abs().max(1e-300),
                                "α={alpha} β={beta} x={x} {branch:?}: {} vs {reference}",
                                v.value
                            );
                        }
                    }
                }
                assert!(
                    compared.iter().all(|&c| c > 0),
                    "α={alpha} β={beta}: {compared:?}"
                );
            }
        }
    }

    #[test]
    fn completely_monotone_on_negative_axis() {
        for alpha in [0.1, 0.4, 0.7, 0.95] {
            let mut last = f64::INFINITY;
            for i in 0..200 {
                let x = -(i as f64) * 0.25;
                let e = mittag_leffler(alpha, 1.0, x).unwrap();
                assert!(e > 0.0 && e < last, "α={alpha}, x={x}");
                last = e;
            }
        }
    }
}

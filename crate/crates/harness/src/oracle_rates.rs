//! Errors of the L1 scheme against the exact semidiscrete solution,
//! computed mode by mode in the M-orthonormal eigenbasis of the Laplacian.

use frac_l1::evolve::SourceSpec;
use frac_l1::fem1d::{generalized_eigendecomposition, project_load};
use frac_l1::oracle::{constant_source_modal_factor, delta_modal_factor};
use frac_l1::quad::GaussRule;
use frac_l1::{Execution, Profile, SpectralData};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::{laplacian_system, SINGULAR_EXPONENT};
use crate::rates::RateTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleDeltaRow {
    pub alpha: f64,
    pub steps: usize,
    /// `‖W_J − E(T)v‖`.
    pub e_t: f64,
    /// `∫_0^T ‖W(t) − E(t)v‖ dt` with `W` piecewise constant.
    pub e_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSourceRow {
    pub alpha: f64,
    pub steps: usize,
    /// `max_j ‖W_j − y(t_j)‖`.
    pub e_inf: f64,
}

pub fn delta_tables(rows: &[OracleDeltaRow]) -> (RateTable, RateTable) {
    (
        RateTable::new(
            "oracle_e_T",
            rows.iter().map(|r| (r.alpha, r.steps, r.e_t)).collect(),
        ),
        RateTable::new(
            "oracle_e_l1",
            rows.iter().map(|r| (r.alpha, r.steps, r.e_l1)).collect(),
        ),
    )
}

pub fn source_table(rows: &[OracleSourceRow]) -> RateTable {
    RateTable::new(
        "oracle_e_inf",
        rows.iter().map(|r| (r.alpha, r.steps, r.e_inf)).collect(),
    )
}

fn modal_solution(
    cfg_time: f64,
    alpha: f64,
    steps: usize,
    system: &frac_l1::AssembledSystem,
    spectral: &SpectralData,
    source: SourceSpec,
) -> Result<Vec<Vec<f64>>> {
    let grid = frac_l1::TimeGrid::new(cfg_time, steps)?;
    let weights = frac_l1::make_weights(alpha, steps)?;
    let w = frac_l1::evolve::solve_forward_with(
        system,
        &weights,
        &source,
        &grid,
        Execution::Sequential,
    )?;
    Ok((1..=steps)
        .map(|k| spectral.modal_coefficients(w.step(k)))
        .collect())
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Quadrature nodes for `∫_0^T`: Gauss on each of the `fine` cells, with
/// `t = τ s^{1/α}` on the first cell to absorb the `t^{α−1}` singularity.
const FIRST_CELL_LEVELS: i32 = 40;

fn time_nodes(alpha: f64, final_time: f64, fine: usize) -> Vec<(f64, f64)> {
    let tau = final_time / fine as f64;
    let first = GaussRule::new(8);
    let rule = GaussRule::new(4);
    // t = τ s^{1/α} on the first cell, graded panels in s absorb s^{1/α-1}
    let edges: Vec<f64> = std::iter::once(0.0)
        .chain((0..=FIRST_CELL_LEVELS).rev().map(|k| 0.5f64.powi(k)))
        .collect();
    let mut nodes: Vec<(f64, f64)> = edges
        .windows(2)
        .flat_map(|p| first.mapped(p[0], p[1]))
        .map(|(s, w)| {
            (
                tau * s.powf(1.0 / alpha),
                w * tau / alpha * s.powf(1.0 / alpha - 1.0),
            )
        })
        .collect();
    for k in 1..fine {
        nodes.extend(rule.mapped(k as f64 * tau, (k + 1) as f64 * tau));
    }
    nodes
}

/// Delta source `v δ_0` with `v = x^{-0.49}` against `E(t)v`. The time
/// integral uses `ref_steps` quadrature cells.
pub fn delta_vs_oracle(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<OracleDeltaRow>> {
    cfg.validate()?;
    let system = laplacian_system(cfg.cells)?;
    let spectral = generalized_eigendecomposition(&system)?;
    let v = project_load(system.mesh(), &Profile::power(SINGULAR_EXPONENT))?;
    let c = spectral.modal_coefficients(&v);
    let mu = spectral.eigenvalues();
    let t_final = cfg.final_time;
    let mut rows = Vec::new();
    for &alpha in &cfg.alphas {
        let nodes = time_nodes(alpha, t_final, cfg.ref_steps);
        let exact: Vec<frac_l1::Result<Vec<f64>>> = exec.map(&nodes, |&(t, _)| {
            mu.iter()
                .zip(&c)
                .map(|(&m, &ci)| Ok(ci * delta_modal_factor(alpha, m, t)?))
                .collect()
        });
        let exact: Vec<Vec<f64>> = exact.into_iter().collect::<frac_l1::Result<_>>()?;
        let at_final: Vec<f64> = mu
            .iter()
            .zip(&c)
            .map(|(&m, &ci)| Ok(ci * delta_modal_factor(alpha, m, t_final)?))
            .collect::<frac_l1::Result<_>>()?;
        let per_j = exec.map(&cfg.sorted_steps(), |&j| -> Result<OracleDeltaRow> {
            let w = modal_solution(
                t_final,
                alpha,
                j,
                &system,
                &spectral,
                SourceSpec::DeltaAtZero(v.clone()),
            )?;
            let tau = t_final / j as f64;
            let e_t = distance(&w[j - 1], &at_final);
            let e_l1 = nodes
                .iter()
                .zip(&exact)
                .map(|(&(t, wq), e)| {
                    let k = ((t / tau).ceil() as usize).clamp(1, j);
                    wq * distance(&w[k - 1], e)
                })
                .sum();
            Ok(OracleDeltaRow {
                alpha,
                steps: j,
                e_t,
                e_l1,
            })
        });
        for r in per_j {
            rows.push(r?);
        }
    }
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.steps.cmp(&b.steps)));
    Ok(rows)
}

/// Time-constant source `x^{-0.49}` against the exact semidiscrete solution at the grid nodes.
pub fn source_vs_oracle(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<OracleSourceRow>> {
    cfg.validate()?;
    let system = laplacian_system(cfg.cells)?;
    let spectral = generalized_eigendecomposition(&system)?;
    let g = project_load(system.mesh(), &Profile::power(SINGULAR_EXPONENT))?;
    let c = spectral.modal_coefficients(&g);
    let mu = spectral.eigenvalues();
    let cells: Vec<(f64, usize)> = cfg
        .alphas
        .iter()
        .flat_map(|&a| cfg.sorted_steps().into_iter().map(move |j| (a, j)))
        .collect();
    let rows = exec.map(&cells, |&(alpha, j)| -> Result<OracleSourceRow> {
        let w = modal_solution(
            cfg.final_time,
            alpha,
            j,
            &system,
            &spectral,
            SourceSpec::constant(g.clone(), j),
        )?;
        let tau = cfg.final_time / j as f64;
        let mut e_inf: f64 = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let t = if k + 1 == j {
                cfg.final_time
            } else {
                (k + 1) as f64 * tau
            };
            let exact: Vec<f64> = mu
                .iter()
                .zip(&c)
                .map(|(&m, &ci)| Ok(ci * constant_source_modal_factor(alpha, m, t)?))
                .collect::<frac_l1::Result<_>>()?;
            e_inf = e_inf.max(distance(wk, &exact));
        }
        Ok(OracleSourceRow {
            alpha,
            steps: j,
            e_inf,
        })
    });
    let mut out = rows.into_iter().collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.steps.cmp(&b.steps)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_nodes_integrate_singular_power() {
        for alpha in [0.3, 0.7, 0.9] {
            let nodes = time_nodes(alpha, 0.1, 64);
            let got: f64 = nodes.iter().map(|(t, w)| w * t.powf(alpha - 1.0)).sum();
            let exact = 0.1f64.powf(alpha) / alpha;
            // first cell is exact; 4-point Gauss on [τ, 2τ] limits the rest to ~3e-8
            assert!((got - exact).abs() < 1e-7 * exact, "{got} vs {exact}");
            let tau = 0.1f64 / 64.0;
            let first: Vec<(f64, f64)> = nodes.iter().copied().filter(|n| n.0 < tau).collect();
            let singular: f64 = first.iter().map(|(t, w)| w * t.powf(alpha - 1.0)).sum();
            assert!((singular - tau.powf(alpha) / alpha).abs() < 1e-14 * singular);
            let width: f64 = first.iter().map(|n| n.1).sum();
            assert!((width - tau).abs() < 1e-13 * tau);
            let len: f64 = nodes.iter().map(|n| n.1).sum();
            assert!((len - 0.1).abs() < 1e-14);
        }
    }
}

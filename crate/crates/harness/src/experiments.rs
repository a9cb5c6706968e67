//! Self-convergence experiments: a coarse run at each `J` against one
//! fine run of the same scheme at `J*`.

use frac_l1::evolve::{solve_forward_with, SourceSpec, SpaceTimeField};
use frac_l1::fem1d::{assemble, project_load};
use frac_l1::inverse::{optimality_residual, solve_inverse_with};
use frac_l1::{
    make_weights, AssembledSystem, Execution, InverseProblem, OperatorCoefficients, Profile,
    SpaceMesh1D, TimeGrid,
};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::rates::RateTable;

/// Exponent of the initial profile `x^{-0.49}` and of the source in the second experiment.
pub const SINGULAR_EXPONENT: f64 = -0.49;

/// Dirichlet Laplacian on (0, 1) with `cells` elements.
pub fn laplacian_system(cells: usize) -> Result<AssembledSystem> {
    let mesh = SpaceMesh1D::unit(cells)?;
    Ok(assemble(&mesh, &OperatorCoefficients::laplacian())?)
}

pub(crate) fn mass_distance(system: &AssembledSystem, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    system.mass_norm(&d)
}

/// Coarse step index `⌈j J / J*⌉` covering fine step `j`.
pub fn coarse_index(j: usize, coarse: usize, fine: usize) -> usize {
    (j * coarse).div_ceil(fine)
}

fn solve(
    system: &AssembledSystem,
    alpha: f64,
    source: impl Fn(usize) -> SourceSpec,
    final_time: f64,
    steps: usize,
    exec: Execution,
) -> Result<SpaceTimeField> {
    let grid = TimeGrid::new(final_time, steps)?;
    let weights = make_weights(alpha, steps)?;
    solve_forward_with(system, &weights, &source(steps), &grid, exec).map_err(
        HarnessError::context(format!("forward solve at alpha = {alpha}, J = {steps}")),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp1Row {
    pub alpha: f64,
    pub steps: usize,
    pub e_t: f64,
    pub e_l1: f64,
    /// `e_T / (τ^{α−1} J^{α−2})`.
    pub ratio_table1: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Exp1Output {
    pub rows: Vec<Exp1Row>,
}

impl Exp1Output {
    pub fn e_t_table(&self) -> RateTable {
        RateTable::new(
            "e_T",
            self.rows
                .iter()
                .map(|r| (r.alpha, r.steps, r.e_t))
                .collect(),
        )
    }

    pub fn e_l1_table(&self) -> RateTable {
        RateTable::new(
            "e_l1",
            self.rows
                .iter()
                .map(|r| (r.alpha, r.steps, r.e_l1))
                .collect(),
        )
    }

    pub fn ratio(&self, alpha: f64, steps: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.alpha == alpha && r.steps == steps)
            .map(|r| r.ratio_table1)
    }
}

/// `τ^{α−1} J^{α−2}` with `τ = T / J`.
pub fn table1_scale(alpha: f64, final_time: f64, steps: usize) -> f64 {
    let j = steps as f64;
    (final_time / j).powf(alpha - 1.0) * j.powf(alpha - 2.0)
}

/// Delta source `v δ_0`, `v = x^{-0.49}`: final-time and l1-in-time errors.
pub fn experiment1(cfg: &ExperimentConfig, exec: Execution) -> Result<Exp1Output> {
    cfg.validate()?;
    let system = laplacian_system(cfg.cells)?;
    let v = project_load(system.mesh(), &Profile::power(SINGULAR_EXPONENT))?;
    let steps = cfg.sorted_steps();
    let per_alpha = exec.map(&cfg.alphas, |&alpha| -> Result<Vec<Exp1Row>> {
        let delta = |_| SourceSpec::DeltaAtZero(v.clone());
        let fine = solve(
            &system,
            alpha,
            delta,
            cfg.final_time,
            cfg.ref_steps,
            Execution::Sequential,
        )?;
        let tau_fine = cfg.final_time / cfg.ref_steps as f64;
        steps
            .iter()
            .map(|&j| {
                let coarse = solve(
                    &system,
                    alpha,
                    delta,
                    cfg.final_time,
                    j,
                    Execution::Sequential,
                )?;
                let e_t = mass_distance(&system, coarse.final_value(), fine.final_value());
                let e_l1 = (1..=cfg.ref_steps)
                    .map(|k| {
                        let c = coarse_index(k, j, cfg.ref_steps);
                        tau_fine * mass_distance(&system, coarse.step(c), fine.step(k))
                    })
                    .sum();
                let ratio_table1 = e_t / table1_scale(alpha, cfg.final_time, j);
                Ok(Exp1Row {
                    alpha,
                    steps: j,
                    e_t,
                    e_l1,
                    ratio_table1,
                })
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_alpha {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.steps.cmp(&b.steps)));
    Ok(Exp1Output { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Row {
    pub alpha: f64,
    pub steps: usize,
    pub e_inf: f64,
}

/// Time-constant source `x^{-0.49}` (or the profile given): max-in-time error.
pub fn experiment2(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<Exp2Row>> {
    experiment2_with_source(cfg, &Profile::power(SINGULAR_EXPONENT), exec)
}

pub fn experiment2_with_source(
    cfg: &ExperimentConfig,
    source: &Profile,
    exec: Execution,
) -> Result<Vec<Exp2Row>> {
    cfg.validate()?;
    let system = laplacian_system(cfg.cells)?;
    let g = project_load(system.mesh(), source)?;
    let steps = cfg.sorted_steps();
    let per_alpha = exec.map(&cfg.alphas, |&alpha| -> Result<Vec<Exp2Row>> {
        let constant = |n| SourceSpec::constant(g.clone(), n);
        let fine = solve(
            &system,
            alpha,
            constant,
            cfg.final_time,
            cfg.ref_steps,
            Execution::Sequential,
        )?;
        steps
            .iter()
            .map(|&j| {
                let coarse = solve(
                    &system,
                    alpha,
                    constant,
                    cfg.final_time,
                    j,
                    Execution::Sequential,
                )?;
                let r = cfg.ref_steps / j;
                let e_inf = (1..=j)
                    .map(|k| mass_distance(&system, coarse.step(k), fine.step(k * r)))
                    .fold(0.0, f64::max);
                Ok(Exp2Row {
                    alpha,
                    steps: j,
                    e_inf,
                })
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_alpha {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.steps.cmp(&b.steps)));
    Ok(rows)
}

pub fn exp2_table(rows: &[Exp2Row]) -> RateTable {
    RateTable::new(
        "e_inf",
        rows.iter().map(|r| (r.alpha, r.steps, r.e_inf)).collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp3Row {
    pub alpha: f64,
    pub steps: usize,
    pub error: f64,
    pub iterations: usize,
    pub optimality_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp3Output {
    pub rows: Vec<Exp3Row>,
    /// `(alpha, iterations, optimality residual)` of each reference solve.
    pub reference: Vec<(f64, usize, f64)>,
}

impl Exp3Output {
    pub fn table(&self) -> RateTable {
        RateTable::new(
            "error",
            self.rows
                .iter()
                .map(|r| (r.alpha, r.steps, r.error))
                .collect(),
        )
    }
}

/// Box-constrained inverse source problem: state-plus-control error.
pub fn experiment3(cfg: &ExperimentConfig, exec: Execution) -> Result<Exp3Output> {
    cfg.validate()?;
    let system = laplacian_system(cfg.cells)?;
    let target = project_load(system.mesh(), &cfg.target.profile())?;
    let steps = cfg.sorted_steps();
    let run = |alpha: f64, j: usize| -> Result<(frac_l1::InverseSolution, f64)> {
        let grid = TimeGrid::new(cfg.final_time, j)?;
        let problem = InverseProblem::new(
            system.clone(),
            grid,
            alpha,
            target.clone(),
            cfg.nu,
            cfg.lower,
            cfg.upper,
        )?;
        let sol = solve_inverse_with(&problem, cfg.tol, cfg.max_iter, Execution::Sequential)
            .map_err(HarnessError::context(format!(
                "inverse solve at alpha = {alpha}, J = {j}"
            )))?;
        let res = optimality_residual(&sol, &problem);
        Ok((sol, res))
    };
    let per_alpha = exec.map(
        &cfg.alphas,
        |&alpha| -> Result<(Vec<Exp3Row>, (f64, usize, f64))> {
            let (fine, fine_res) = run(alpha, cfg.ref_steps)?;
            let tau_fine = cfg.final_time / cfg.ref_steps as f64;
            let rows = steps
                .iter()
                .map(|&j| {
                    let (coarse, res) = run(alpha, j)?;
                    let state = mass_distance(
                        &system,
                        coarse.state.final_value(),
                        fine.state.final_value(),
                    );
                    let control_sq: f64 = (1..=cfg.ref_steps)
                        .map(|k| {
                            let c = coarse_index(k, j, cfg.ref_steps);
                            tau_fine
                                * mass_distance(
                                    &system,
                                    coarse.control.step(c),
                                    fine.control.step(k),
                                )
                                .powi(2)
                        })
                        .sum();
                    Ok(Exp3Row {
                        alpha,
                        steps: j,
                        error: state + control_sq.sqrt(),
                        iterations: coarse.report.iterations,
                        optimality_residual: res,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((rows, (alpha, fine.report.iterations, fine_res)))
        },
    );
    let mut rows = Vec::new();
    let mut reference = Vec::new();
    for r in per_alpha {
        let (r, f) = r?;
        rows.extend(r);
        reference.push(f);
    }
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.steps.cmp(&b.steps)));
    reference.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Exp3Output { rows, reference })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_map() {
        assert_eq!(coarse_index(1, 4, 16), 1);
        assert_eq!(coarse_index(4, 4, 16), 1);
        assert_eq!(coarse_index(5, 4, 16), 2);
        assert_eq!(coarse_index(16, 4, 16), 4);
    }

    #[test]
    fn table1_scale_is_inverse_j() {
        let s = table1_scale(0.9, 0.1, 128);
        assert!((s - 0.1f64.powf(-0.1) / 128.0).abs() < 1e-15);
    }
}

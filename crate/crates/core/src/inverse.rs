//! Tikhonov-regularized recovery of a box-constrained source from a
//! final-time observation, by fixed-point iteration on the discrete
//! optimality system.

use crate::error::{domain, Error, Result};
use crate::evolve::{solve_adjoint_with, solve_forward_with, SourceSpec, SpaceTimeField};
use crate::fem1d::AssembledSystem;
use crate::l1_core::{make_weights, L1Weights, TimeGrid};
use crate::par::Execution;

/// `min ½‖(S_τU)(T−) − y_d‖² + (ν/2)‖U‖²` over `u_* ≤ U ≤ u^*`.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    system: AssembledSystem,
    grid: TimeGrid,
    weights: L1Weights,
    target: Vec<f64>,
    nu: f64,
    lower: f64,
    upper: f64,
}

impl InverseProblem {
    pub fn new(
        system: AssembledSystem,
        grid: TimeGrid,
        alpha: f64,
        target: Vec<f64>,
        nu: f64,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return domain(format!("regularization weight must be positive, got {nu}"));
        }
        check_bounds(lower, upper)?;
        if target.len() != system.dofs() {
            return domain("target does not conform to the assembled system");
        }
        if target.iter().any(|v| !v.is_finite()) {
            return domain("target has non-finite entries");
        }
        let weights = make_weights(alpha, grid.steps())?;
        Ok(Self {
            system,
            grid,
            weights,
            target,
            nu,
            lower,
            upper,
        })
    }

    pub fn system(&self) -> &AssembledSystem {
        &self.system
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.weights.alpha()
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// `S_τ U`.
    pub fn state(&self, control: &SpaceTimeField, exec: Execution) -> Result<SpaceTimeField> {
        solve_forward_with(
            &self.system,
            &self.weights,
            &control.as_source(),
            &self.grid,
            exec,
        )
    }

    /// `S_τ*((Y(T−) − y_d) δ̂_T)`.
    pub fn adjoint_state(&self, state: &SpaceTimeField, exec: Execution) -> Result<SpaceTimeField> {
        let misfit: Vec<f64> = state
            .final_value()
            .iter()
            .zip(&self.target)
            .map(|(y, d)| y - d)
            .collect();
        solve_adjoint_with(
            &self.system,
            &self.weights,
            &SourceSpec::DeltaAtFinal(misfit),
            &self.grid,
            exec,
        )
    }

    /// Entrywise `clamp(−P/ν, u_*, u^*)`.
    pub fn project(&self, adjoint: &SpaceTimeField) -> SpaceTimeField {
        let mut u = adjoint.clone();
        for v in u.values_mut() {
            *v = (-*v / self.nu).clamp(self.lower, self.upper);
        }
        u
    }

    /// Objective of a control, computing its state.
    pub fn objective(&self, control: &SpaceTimeField) -> Result<f64> {
        let y = self.state(control, Execution::default())?;
        objective_value(&self.system, control, &y, &self.target, self.nu)
    }
}

fn check_bounds(lower: f64, upper: f64) -> Result<()> {
    if !(lower < upper) {
        return domain(format!(
            "bounds must satisfy lower < upper, got [{lower}, {upper}]"
        ));
    }
    Ok(())
}

/// Minimizer of `r v + (ν/2) v²` over `[u_*, u^*]`, i.e. `clamp(−r/ν, u_*, u^*)`.
pub fn clamp_projection(r: f64, nu: f64, lower: f64, upper: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return domain("regularization weight must be positive");
    }
    check_bounds(lower, upper)?;
    Ok((-r / nu).clamp(lower, upper))
}

/// Which constraint is active at the minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveSet {
    Lower,
    Inactive,
    Upper,
}

/// Three-branch form with breakpoints `−ν u_*` and `−ν u^*`. The inactive
/// branch returns `r` itself; the operative update uses [`clamp_projection`].
pub fn branch_projection(r: f64, nu: f64, lower: f64, upper: f64) -> Result<(ActiveSet, f64)> {
    if !(nu > 0.0) {
        return domain("regularization weight must be positive");
    }
    check_bounds(lower, upper)?;
    Ok(if r > -nu * lower {
        (ActiveSet::Lower, lower)
    } else if r < -nu * upper {
        (ActiveSet::Upper, upper)
    } else {
        (ActiveSet::Inactive, r)
    })
}

/// `½ (Y_J − y_d)ᵀ M (Y_J − y_d) + (ν/2) τ Σ_k U_kᵀ M U_k`.
pub fn objective_value(
    system: &AssembledSystem,
    control: &SpaceTimeField,
    state: &SpaceTimeField,
    target: &[f64],
    nu: f64,
) -> Result<f64> {
    if control.grid() != state.grid()
        || control.dofs() != system.dofs()
        || state.dofs() != system.dofs()
    {
        return domain("control and state do not conform");
    }
    if target.len() != system.dofs() {
        return domain("target does not conform to the assembled system");
    }
    let misfit: Vec<f64> = state
        .final_value()
        .iter()
        .zip(target)
        .map(|(y, d)| y - d)
        .collect();
    let tau = control.grid().tau();
    let reg: f64 = (1..=control.steps())
        .map(|k| system.mass_inner(control.step(k), control.step(k)))
        .sum();
    Ok(0.5 * system.mass_inner(&misfit, &misfit) + 0.5 * nu * tau * reg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseReport {
    pub iterations: usize,
    pub final_sup_change: f64,
    pub converged: bool,
    pub objective: f64,
    /// `J_τ(U_j)` for `j = 0, 1, …` up to the returned control.
    pub objective_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSolution {
    pub control: SpaceTimeField,
    pub state: SpaceTimeField,
    pub adjoint: SpaceTimeField,
    pub report: InverseReport,
}

/// Fixed-point iteration `U_j = clamp(−S_τ*((S_τU_{j−1})(T−) − y_d)δ̂_T / ν)`
/// from `U_0 = 0`, stopped once the sup-norm update drops below `tol`.
pub fn solve_inverse(
    problem: &InverseProblem,
    tol: f64,
    max_iter: usize,
) -> Result<InverseSolution> {
    solve_inverse_with(problem, tol, max_iter, Execution::default())
}

pub fn solve_inverse_with(
    problem: &InverseProblem,
    tol: f64,
    max_iter: usize,
    exec: Execution,
) -> Result<InverseSolution> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let mut control = SpaceTimeField::zeros(problem.grid, problem.system.dofs());
    let mut history = Vec::new();
    let mut change = f64::INFINITY;
    for iteration in 1..=max_iter {
        let state = problem.state(&control, exec)?;
        history.push(objective_value(
            &problem.system,
            &control,
            &state,
            &problem.target,
            problem.nu,
        )?);
        let adjoint = problem.adjoint_state(&state, exec)?;
        let next = problem.project(&adjoint);
        change = next
            .values()
            .iter()
            .zip(control.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        control = next;
        if change < tol {
            let state = problem.state(&control, exec)?;
            let adjoint = problem.adjoint_state(&state, exec)?;
            let objective = objective_value(
                &problem.system,
                &control,
                &state,
                &problem.target,
                problem.nu,
            )?;
            history.push(objective);
            return Ok(InverseSolution {
                control,
                state,
                adjoint,
                report: InverseReport {
                    iterations: iteration,
                    final_sup_change: change,
                    converged: true,
                    objective,
                    objective_history: history,
                },
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_change: change,
    })
}

/// `sup |U − clamp(−P/ν, u_*, u^*)|` over all intervals and nodes.
pub fn optimality_residual(solution: &InverseSolution, problem: &InverseProblem) -> f64 {
    let projected = problem.project(&solution.adjoint);
    projected
        .values()
        .iter()
        .zip(solution.control.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

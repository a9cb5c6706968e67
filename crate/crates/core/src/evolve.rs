//! L1 time stepping (forward and backward in time), the space-time pairing,
//! and the discrete contour kernel that reproduces the time stepping.
//!
//! Forward step `k` solves
//! `(b_1 M − τ^α A_h) W_k = τ^α M ḡ_k − M Σ_{j<k} d_{k−j} W_j`,
//! the backward march is the same recurrence in reversed time with `A_hᵀ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::banded::Tridiagonal;
use crate::error::{domain, Error, Result};
use crate::fem1d::{project_load, AssembledSystem, Profile, SpaceMesh1D};
use crate::l1_core::{check_order, L1Weights, Symbol, TimeGrid, DEFAULT_THETA_STAR};
use crate::par::Execution;
use crate::quad::GaussRule;

/// Right-hand side of the time-stepping schemes.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    /// `ḡ_k = τ^{-1} ∫_{t_{k-1}}^{t_k} g dt` as nodal vectors, `k = 1..J`.
    IntervalAverages(Vec<Vec<f64>>),
    /// `v δ_0`, smeared over the first interval.
    DeltaAtZero(Vec<f64>),
    /// `v δ_T`, smeared over the last interval.
    DeltaAtFinal(Vec<f64>),
}

impl SourceSpec {
    /// The same spatial vector on every interval.
    pub fn constant(v: Vec<f64>, steps: usize) -> Self {
        SourceSpec::IntervalAverages(vec![v; steps])
    }

    fn validate(&self, steps: usize, dofs: usize) -> Result<()> {
        match self {
            SourceSpec::IntervalAverages(avgs) => {
                if avgs.len() != steps {
                    return domain(format!(
                        "source has {} interval averages, grid has {steps} steps",
                        avgs.len()
                    ));
                }
                if let Some(bad) = avgs.iter().position(|g| g.len() != dofs) {
                    return domain(format!("interval average {} has wrong length", bad + 1));
                }
            }
            SourceSpec::DeltaAtZero(v) | SourceSpec::DeltaAtFinal(v) => {
                if v.len() != dofs {
                    return domain(format!(
                        "delta weight has length {}, expected {dofs}",
                        v.len()
                    ));
                }
            }
        }
        Ok(())
    }

    /// Interval average on step `k` (1-based), written into `out`.
    fn average_into(&self, k: usize, steps: usize, tau: f64, out: &mut [f64]) {
        match self {
            SourceSpec::IntervalAverages(avgs) => out.copy_from_slice(&avgs[k - 1]),
            SourceSpec::DeltaAtZero(v) if k == 1 => {
                out.iter_mut().zip(v).for_each(|(o, x)| *o = x / tau)
            }
            SourceSpec::DeltaAtFinal(v) if k == steps => {
                out.iter_mut().zip(v).for_each(|(o, x)| *o = x / tau)
            }
            _ => out.iter_mut().for_each(|o| *o = 0.0),
        }
    }
}

/// Piecewise constant in time, nodal in space. `step(k)` is the value on
/// `(t_{k-1}, t_k)`, equivalently the nodal solution at `t_k−`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: TimeGrid,
    dofs: usize,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: TimeGrid, dofs: usize) -> Self {
        Self {
            grid,
            dofs,
            values: vec![0.0; grid.steps() * dofs],
        }
    }

    pub fn from_steps(grid: TimeGrid, steps: &[Vec<f64>]) -> Result<Self> {
        if steps.len() != grid.steps() {
            return domain(format!(
                "{} step vectors for a {}-step grid",
                steps.len(),
                grid.steps()
            ));
        }
        let dofs = steps.first().map_or(0, Vec::len);
        if steps.iter().any(|s| s.len() != dofs) {
            return domain("step vectors differ in length");
        }
        Ok(Self {
            grid,
            dofs,
            values: steps.concat(),
        })
    }

    /// Interval averages of a source as a field (delta sources become their
    /// one-interval box functions).
    pub fn from_source(grid: TimeGrid, dofs: usize, source: &SourceSpec) -> Result<Self> {
        source.validate(grid.steps(), dofs)?;
        let mut f = Self::zeros(grid, dofs);
        let tau = grid.tau();
        for k in 1..=grid.steps() {
            source.average_into(k, grid.steps(), tau, f.step_mut(k));
        }
        Ok(f)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dofs(&self) -> usize {
        self.dofs
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    pub fn step(&self, k: usize) -> &[f64] {
        &self.values[(k - 1) * self.dofs..k * self.dofs]
    }

    pub fn step_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[(k - 1) * self.dofs..k * self.dofs]
    }

    pub fn final_value(&self) -> &[f64] {
        self.step(self.steps())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn to_steps(&self) -> Vec<Vec<f64>> {
        (1..=self.steps()).map(|k| self.step(k).to_vec()).collect()
    }

    /// Field with step order reversed: `out.step(k) = self.step(J - k + 1)`.
    pub fn reversed(&self) -> Self {
        let mut out = Self::zeros(self.grid, self.dofs);
        let j = self.steps();
        for k in 1..=j {
            out.step_mut(k).copy_from_slice(self.step(j - k + 1));
        }
        out
    }

    /// Sup norm over all steps and nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_source(&self) -> SourceSpec {
        SourceSpec::IntervalAverages(self.to_steps())
    }
}

/// `τ Σ_k F_kᵀ M G_k`, the L²(0,T; L²) pairing of piecewise-constant fields.
pub fn spacetime_inner(
    system: &AssembledSystem,
    f: &SpaceTimeField,
    g: &SpaceTimeField,
) -> Result<f64> {
    if f.grid != g.grid || f.dofs != g.dofs {
        return domain("space-time fields live on different grids");
    }
    if f.dofs != system.dofs() {
        return domain("field does not conform to the assembled system");
    }
    let mut acc = 0.0;
    for k in 1..=f.steps() {
        acc += system.mass_inner(f.step(k), g.step(k));
    }
    Ok(f.grid.tau() * acc)
}

/// Forward-in-time L1 solve; `DeltaAtFinal` is rejected.
pub fn solve_forward(
    system: &AssembledSystem,
    weights: &L1Weights,
    source: &SourceSpec,
    grid: &TimeGrid,
) -> Result<SpaceTimeField> {
    solve_forward_with(system, weights, source, grid, Execution::default())
}

pub fn solve_forward_with(
    system: &AssembledSystem,
    weights: &L1Weights,
    source: &SourceSpec,
    grid: &TimeGrid,
    exec: Execution,
) -> Result<SpaceTimeField> {
    if matches!(source, SourceSpec::DeltaAtFinal(_)) {
        return domain("the forward solver accepts a delta source only at t = 0");
    }
    march(
        system,
        system.operator(),
        weights,
        source,
        grid,
        false,
        exec,
    )
}

/// Backward-in-time L1 solve with the transposed operator; `DeltaAtZero` is rejected.
pub fn solve_adjoint(
    system: &AssembledSystem,
    weights: &L1Weights,
    source: &SourceSpec,
    grid: &TimeGrid,
) -> Result<SpaceTimeField> {
    solve_adjoint_with(system, weights, source, grid, Execution::default())
}

pub fn solve_adjoint_with(
    system: &AssembledSystem,
    weights: &L1Weights,
    source: &SourceSpec,
    grid: &TimeGrid,
    exec: Execution,
) -> Result<SpaceTimeField> {
    if matches!(source, SourceSpec::DeltaAtZero(_)) {
        return domain("the adjoint solver accepts a delta source only at t = T");
    }
    march(system, system.adjoint(), weights, source, grid, true, exec)
}

/// Work (steps × nodes) below which the history sum stays on one thread.
const PARALLEL_HISTORY_WORK: usize = 1 << 15;
const HISTORY_CHUNK: usize = 64;

fn march(
    system: &AssembledSystem,
    operator: &Tridiagonal,
    weights: &L1Weights,
    source: &SourceSpec,
    grid: &TimeGrid,
    backward: bool,
    exec: Execution,
) -> Result<SpaceTimeField> {
    let steps = grid.steps();
    let n = system.dofs();
    check_order(weights.alpha())?;
    if weights.steps() < steps {
        return domain(format!(
            "weights cover {} steps, grid has {steps}",
            weights.steps()
        ));
    }
    source.validate(steps, n)?;

    let tau = grid.tau();
    let tau_a = tau.powf(weights.alpha());
    let b1 = weights.b()[1];
    let step_matrix = system.mass().combine(b1, operator, -tau_a);
    let lu = step_matrix
        .factor()
        .map_err(|e| Error::Singular(format!("L1 step matrix: {e}")))?;
    let mass = system.mass();
    let d = weights.d();

    // marching order: position p = 1..J maps to time step k = p (forward) or J - p + 1
    let mut out = SpaceTimeField::zeros(*grid, n);
    let mut history = vec![0.0; n];
    let mut gbar = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for p in 1..=steps {
        history_sum(&out.values, n, p, d, &mut history, exec);
        let k = if backward { steps - p + 1 } else { p };
        source.average_into(k, steps, tau, &mut gbar);
        for i in 0..n {
            gbar[i] = tau_a * gbar[i] - history[i];
        }
        mass.matvec_into(&gbar, &mut rhs);
        lu.solve_in_place(&mut rhs);
        out.values[(p - 1) * n..p * n].copy_from_slice(&rhs);
    }
    if backward {
        Ok(out.reversed())
    } else {
        Ok(out)
    }
}

/// `h = Σ_{j=1}^{p-1} d_{p-j} W_j` over the first `p - 1` stored rows.
fn history_sum(values: &[f64], n: usize, p: usize, d: &[f64], h: &mut [f64], exec: Execution) {
    let accumulate = |offset: usize, chunk: &mut [f64]| {
        chunk.iter_mut().for_each(|x| *x = 0.0);
        let width = chunk.len();
        for j in 1..p {
            let c = d[p - j - 1];
            let row = &values[(j - 1) * n + offset..(j - 1) * n + offset + width];
            for (x, w) in chunk.iter_mut().zip(row) {
                *x += c * w;
            }
        }
    };
    if exec.is_parallel() && p * n >= PARALLEL_HISTORY_WORK && n > HISTORY_CHUNK {
        exec.for_each_chunk_mut(h, HISTORY_CHUNK, |ci, chunk| {
            accumulate(ci * HISTORY_CHUNK, chunk)
        });
    } else {
        accumulate(0, h);
    }
}

/// Space-time source `g(t, x)`.
#[derive(Clone)]
pub enum SpaceTimeProfile {
    /// Constant in time.
    Steady(Profile),
    /// `g(t, x)`.
    General(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for SpaceTimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTimeProfile::Steady(p) => write!(f, "Steady({p:?})"),
            SpaceTimeProfile::General(_) => write!(f, "General(..)"),
        }
    }
}

impl SpaceTimeProfile {
    pub fn general(g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        SpaceTimeProfile::General(Arc::new(g))
    }
}

/// Interval averages of `g`, projected onto the P1 space. Time-varying
/// sources use two-point Gauss in time on each interval.
pub fn as_interval_averages(
    g: &SpaceTimeProfile,
    grid: &TimeGrid,
    mesh: &SpaceMesh1D,
) -> Result<SourceSpec> {
    match g {
        SpaceTimeProfile::Steady(profile) => {
            let v = project_load(mesh, profile)?;
            Ok(SourceSpec::constant(v, grid.steps()))
        }
        SpaceTimeProfile::General(f) => {
            let rule = GaussRule::new(2);
            let tau = grid.tau();
            let mut avgs = Vec::with_capacity(grid.steps());
            for k in 1..=grid.steps() {
                let mut acc = vec![0.0; mesh.dofs()];
                for (t, w) in rule.mapped(grid.node(k - 1), grid.node(k)) {
                    let f = Arc::clone(f);
                    let slice = project_load(mesh, &Profile::function(move |x| f(t, x)))?;
                    acc.iter_mut()
                        .zip(slice)
                        .for_each(|(a, s)| *a += w / tau * s);
                }
                avgs.push(acc);
            }
            Ok(SourceSpec::IntervalAverages(avgs))
        }
    }
}

/// Contour `{|Arg z| = θ*, |Im z| ≤ π}` with its corner at the origin
/// replaced by the arc `|z| = ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub theta_star: f64,
    /// Gauss-Legendre nodes per panel. Each arm is split into geometric
    /// panels of ratio 2 starting at the arc.
    pub nodes_per_panel: usize,
    pub radius: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            theta_star: DEFAULT_THETA_STAR,
            nodes_per_panel: 32,
            radius: 0.05,
        }
    }
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_star > PI / 2.0 && self.theta_star < PI) {
            return domain(format!(
                "contour angle must lie in (π/2, π), got {}",
                self.theta_star
            ));
        }
        if self.nodes_per_panel < 8 {
            return domain("contour needs at least 8 nodes per panel");
        }
        if !(self.radius > 0.0 && self.radius < PI / 4.0) {
            return domain(format!(
                "arc radius must lie in (0, π/4), got {}",
                self.radius
            ));
        }
        Ok(())
    }

    /// Nodes `z` and weights `w · dz/ds` of the upper half (Im z ≥ 0), in
    /// traversal order: arc from angle 0 to θ*, then the arm outward.
    pub fn upper_half_nodes(&self) -> Vec<(Complex64, Complex64)> {
        let rule = GaussRule::new(self.nodes_per_panel);
        let mut nodes = Vec::new();
        let eps = self.radius;
        for (phi, w) in rule.mapped(0.0, self.theta_star) {
            let z = Complex64::from_polar(eps, phi);
            nodes.push((z, Complex64::new(0.0, w) * z));
        }
        let r_max = PI / self.theta_star.sin();
        let dir = Complex64::from_polar(1.0, self.theta_star);
        let mut a = eps;
        while a < r_max {
            let b = (2.0 * a).min(r_max);
            for (r, w) in rule.mapped(a, b) {
                nodes.push((dir * r, dir * w));
            }
            a = b;
        }
        nodes
    }
}

/// `ℰ_j v` for `j = 0..=j_max`, reusing one resolvent solve per contour node.
pub fn discrete_kernel_apply_all(
    system: &AssembledSystem,
    alpha: f64,
    tau: f64,
    j_max: usize,
    v: &[f64],
    contour: &ContourSpec,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    check_order(alpha)?;
    contour.validate()?;
    if !(tau > 0.0) {
        return domain("time step must be positive");
    }
    if v.len() != system.dofs() {
        return domain("vector does not conform to the assembled system");
    }
    let symbol = Symbol::with_default_terms(alpha)?;
    let mass = system.mass().to_complex();
    let op = system.operator().to_complex();
    let mv: Vec<Complex64> = system
        .mass()
        .matvec(v)
        .into_iter()
        .map(Complex64::from)
        .collect();
    let nodes = contour.upper_half_nodes();
    let scale = tau.powf(-alpha);

    let solved: Vec<Result<Vec<Complex64>>> = exec.map(&nodes, |&(z, _)| {
        let lambda = scale * symbol.damped_psi(z)?;
        let shifted = mass.combine(lambda, &op, Complex64::new(-1.0, 0.0));
        let lu = shifted.factor().map_err(|_| {
            Error::Contour(format!(
                "resolvent singular at z = {z}; try a different angle or arc radius"
            ))
        })?;
        Ok(lu.solve(&mv))
    });

    let n = system.dofs();
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); n]; j_max + 1];
    for ((z, w), u) in nodes.iter().zip(solved) {
        let u = u?;
        let step = z.exp();
        let mut factor = *w;
        for row in acc.iter_mut() {
            for (a, x) in row.iter_mut().zip(&u) {
                *a += factor * x;
            }
            factor *= step;
        }
    }
    Ok(acc
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.im / PI).collect())
        .collect())
}

/// `ℰ_j v`.
pub fn discrete_kernel_apply(
    system: &AssembledSystem,
    alpha: f64,
    tau: f64,
    j: usize,
    v: &[f64],
    contour: &ContourSpec,
) -> Result<Vec<f64>> {
    let mut all =
        discrete_kernel_apply_all(system, alpha, tau, j, v, contour, Execution::default())?;
    Ok(all.pop().expect("j_max + 1 rows"))
}

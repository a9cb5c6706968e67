use frac_l1::Profile;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Spatial profile given on the command line as `const:<c>` or `power:<p>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TargetProfile {
    Const(f64),
    Power(f64),
}

impl TargetProfile {
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, value) = spec.split_once(':').ok_or_else(|| {
            HarnessError::Config(format!("profile `{spec}` is not of the form kind:value"))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            HarnessError::Config(format!("profile `{spec}` has a non-numeric value"))
        })?;
        match kind.trim() {
            "const" => Ok(TargetProfile::Const(value)),
            "power" => Ok(TargetProfile::Power(value)),
            other => Err(HarnessError::Config(format!(
                "unknown profile kind `{other}`"
            ))),
        }
    }

    pub fn profile(&self) -> Profile {
        match *self {
            TargetProfile::Const(c) => Profile::Constant(c),
            TargetProfile::Power(p) => Profile::power(p),
        }
    }
}

impl std::fmt::Display for TargetProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetProfile::Const(c) => write!(f, "const:{c}"),
            TargetProfile::Power(p) => write!(f, "power:{p}"),
        }
    }
}

/// Settings shared by all experiments. Unused fields are ignored by the
/// experiments that do not need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alphas: Vec<f64>,
    /// Coarse step counts `J`.
    pub steps: Vec<usize>,
    /// Reference step count `J*`.
    pub ref_steps: usize,
    /// Spatial cells `N` on (0, 1).
    pub cells: usize,
    pub final_time: f64,
    pub nu: f64,
    pub lower: f64,
    pub upper: f64,
    pub target: TargetProfile,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

pub const DESK_CELLS: usize = 1 << 8;
pub const DESK_REF_STEPS: usize = 1 << 12;
pub const HEAVY_CELLS: usize = 1 << 10;
pub const HEAVY_REF_STEPS: usize = 1 << 15;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.4, 0.6, 0.8],
            steps: (5..=9).map(|k| 1 << k).collect(),
            ref_steps: DESK_REF_STEPS,
            cells: DESK_CELLS,
            final_time: 0.1,
            nu: 10.0,
            lower: 0.0,
            upper: 10.0,
            target: TargetProfile::Const(1.0),
            tol: 1e-12,
            max_iter: 10_000,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Large mesh and reference (2^10 cells, 2^15 steps).
    pub fn heavy() -> Self {
        Self {
            cells: HEAVY_CELLS,
            ref_steps: HEAVY_REF_STEPS,
            steps: vec![1 << 7, 1 << 8, 1 << 9],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.alphas.is_empty() {
            return bad("alpha list is empty".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return bad(format!("alpha {a} outside (0, 1)"));
        }
        if self.steps.is_empty() || self.steps.contains(&0) {
            return bad("step list must be nonempty and positive".into());
        }
        let max = *self.steps.iter().max().expect("nonempty");
        if self.ref_steps < max {
            return bad(format!(
                "reference steps {} must be at least every coarse J (max {max})",
                self.ref_steps
            ));
        }
        if let Some(j) = self.steps.iter().find(|j| self.ref_steps % **j != 0) {
            return bad(format!(
                "J = {j} does not divide the reference steps {}",
                self.ref_steps
            ));
        }
        if self.cells < 2 {
            return bad("need at least 2 cells".into());
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return bad("final time must be positive".into());
        }
        if !(self.nu > 0.0) {
            return bad("nu must be positive".into());
        }
        if !(self.lower < self.upper) {
            return bad("need lower < upper".into());
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return bad("tolerance and iteration cap must be positive".into());
        }
        Ok(())
    }

    /// Coarse levels sorted ascending, duplicates removed.
    pub fn sorted_steps(&self) -> Vec<usize> {
        let mut s = self.steps.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Least-squares convergence rate of `error ~ C J^{-slope}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    /// `log(e_i / e_{i+1}) / log(J_{i+1} / J_i)` for consecutive usable rows.
    pub pairwise: Vec<f64>,
    /// Step counts dropped because their error was not positive.
    pub excluded: Vec<usize>,
}

/// Fit `log error` against `log(1/J)`. Rows must have distinct `J`.
pub fn fit_rate(rows: &[(usize, f64)]) -> Result<RateFit> {
    let mut usable: Vec<(usize, f64)> = Vec::new();
    let mut excluded = Vec::new();
    for &(j, e) in rows {
        if e > 0.0 && e.is_finite() && j > 0 {
            usable.push((j, e));
        } else {
            excluded.push(j);
        }
    }
    usable.sort_by_key(|r| r.0);
    if usable.len() < 2 {
        return Err(HarnessError::Fit(format!(
            "{} usable rows, need at least 2",
            usable.len()
        )));
    }
    let pts: Vec<(f64, f64)> = usable
        .iter()
        .map(|&(j, e)| (-(j as f64).ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Fit("all rows share one step count".into()));
    }
    let pairwise = usable
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[1].0 as f64 / w[0].0 as f64).ln())
        .collect();
    Ok(RateFit {
        slope: sxy / sxx,
        pairwise,
        excluded,
    })
}

/// One fitted rate per α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub alpha: f64,
    pub metric: String,
    pub fit: RateFit,
}

/// `(alpha, J, error)` rows, sorted by `(alpha, J)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateTable {
    pub metric: String,
    pub rows: Vec<(f64, usize, f64)>,
}

impl RateTable {
    pub fn new(metric: impl Into<String>, mut rows: Vec<(f64, usize, f64)>) -> Self {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Self {
            metric: metric.into(),
            rows,
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.rows.iter().map(|r| r.0).collect();
        a.dedup();
        a
    }

    pub fn fits(&self) -> Result<Vec<RateSummary>> {
        self.alphas()
            .into_iter()
            .map(|alpha| {
                let rows: Vec<(usize, f64)> = self
                    .rows
                    .iter()
                    .filter(|r| r.0 == alpha)
                    .map(|r| (r.1, r.2))
                    .collect();
                Ok(RateSummary {
                    alpha,
                    metric: self.metric.clone(),
                    fit: fit_rate(&rows)?,
                })
            })
            .collect()
    }

    pub fn slope(&self, alpha: f64) -> Result<f64> {
        self.fits()?
            .into_iter()
            .find(|s| s.alpha == alpha)
            .map(|s| s.fit.slope)
            .ok_or_else(|| HarnessError::Fit(format!("no rows for alpha {alpha}")))
    }
}

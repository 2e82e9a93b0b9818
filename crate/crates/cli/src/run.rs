use std::fmt;

use multipulse::analysis::{fit_slope, sweep, SlopeFit, SweepResult};
use serde::Serialize;

use crate::config::Plan;

/// Fitted slope of one curve; `eps2` is set for rows of a 2-D grid.
#[derive(Debug, Clone, Serialize)]
pub struct CurveFit {
    pub sequence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    pub exponent: f64,
    pub prefactor: f64,
    pub max_residual: f64,
    pub window: (f64, f64),
    pub points: usize,
}

impl CurveFit {
    fn new(sequence: &str, eps2: Option<f64>, f: &SlopeFit) -> Self {
        Self {
            sequence: sequence.to_string(),
            eps2,
            exponent: f.exponent,
            prefactor: f.prefactor(),
            max_residual: f.max_residual,
            window: f.window,
            points: f.n_points,
        }
    }
}

impl fmt::Display for CurveFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fit {}", self.sequence)?;
        if let Some(e2) = self.eps2 {
            write!(f, " (eps2 = {e2:.3e})")?;
        }
        write!(
            f,
            ": exponent {:.4}, prefactor {:.4e}, max residual {:.2e}, {} points in [{:.3e}, {:.3e}]",
            self.exponent, self.prefactor, self.max_residual, self.points, self.window.0, self.window.1
        )
    }
}

pub struct Outcome {
    pub result: SweepResult,
    pub fits: Vec<CurveFit>,
}

/// Sweeps the plan and fits each `eps2` row separately.
pub fn execute(plan: &Plan) -> multipulse::Result<Outcome> {
    let result = sweep(&plan.experiment, &plan.grid)?;
    let mut fits = Vec::new();
    if let Some(window) = plan.fit_window {
        let id = &plan.experiment.id;
        match &plan.eps2 {
            None => fits.push(CurveFit::new(id, None, &result.fit(window)?)),
            Some(e2s) => {
                for &e2 in e2s {
                    let pts: Vec<(f64, f64)> = result
                        .rows
                        .iter()
                        .filter(|r| r.eps2 == Some(e2))
                        .map(|r| (r.eps1, r.infidelity))
                        .collect();
                    fits.push(CurveFit::new(id, Some(e2), &fit_slope(&pts, window)?));
                }
            }
        }
    }
    Ok(Outcome { result, fits })
}

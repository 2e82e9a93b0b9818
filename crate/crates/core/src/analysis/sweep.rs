use std::fmt::Write;
use std::sync::Arc;

use rayon::prelude::*;

use super::fit::{fit_slope, SlopeFit};
use super::rng::random_sign_assignment;
use crate::error::{domain, Error, Result};
use crate::sequence::{Compiler, ControlLabel, ErrorAssignment, PulseSequence};
use crate::unitary::{fidelity, subspace_fidelity, Subspace, Unitary};

/// Which sweep coordinate a group of labels follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Eps1,
    Eps2,
    Fixed(f64),
    /// `c·ε1`; `c = −1` gives anticorrelated errors.
    Eps1Scaled(f64),
}

/// How grid coordinates become an [`ErrorAssignment`].
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorModel {
    /// Each entry is one shared-error group.
    Groups(Vec<(Vec<ControlLabel>, Axis)>),
    /// `±ε1` per label with seeded signs; the pair shares one draw.
    RandomSign {
        seed: u64,
        labels: Vec<ControlLabel>,
        correlated: Option<(ControlLabel, ControlLabel)>,
    },
}

impl ErrorModel {
    /// All labels in one group following `ε1`.
    pub fn shared(labels: &[ControlLabel]) -> Self {
        Self::Groups(vec![(labels.to_vec(), Axis::Eps1)])
    }

    pub fn assignment(&self, eps1: f64, eps2: Option<f64>) -> Result<ErrorAssignment> {
        match self {
            Self::Groups(groups) => {
                let mut a = ErrorAssignment::new();
                for (labels, axis) in groups {
                    let v = match axis {
                        Axis::Eps1 => eps1,
                        Axis::Eps2 => {
                            eps2.ok_or_else(|| domain("model uses eps2 but the grid has none"))?
                        }
                        Axis::Fixed(v) => *v,
                        Axis::Eps1Scaled(c) => c * eps1,
                    };
                    a.group(labels.iter().cloned(), v)?;
                }
                Ok(a)
            }
            Self::RandomSign {
                seed,
                labels,
                correlated,
            } => random_sign_assignment(
                *seed,
                labels,
                eps1,
                correlated.as_ref().map(|(a, b)| (a, b)),
            ),
        }
    }
}

/// A sequence, its ideal action and the space fidelity is measured on.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub id: String,
    pub sequence: Arc<PulseSequence>,
    pub target: Unitary,
    pub subspace: Option<Subspace>,
    pub model: ErrorModel,
}

impl Experiment {
    pub fn new(
        id: impl Into<String>,
        sequence: PulseSequence,
        target: Unitary,
        model: ErrorModel,
    ) -> Self {
        Self {
            id: id.into(),
            sequence: Arc::new(sequence),
            target,
            subspace: None,
            model,
        }
    }

    pub fn on_subspace(mut self, s: Subspace) -> Self {
        self.subspace = Some(s);
        self
    }

    /// Infidelity at one grid point, reusing `compiler`'s cache.
    pub fn evaluate(
        &self,
        compiler: &mut Compiler,
        eps1: f64,
        eps2: Option<f64>,
    ) -> Result<SweepRow> {
        let at = |e: Error| Error::AtPoint {
            eps: eps1,
            source: Box::new(e),
        };
        let errs = self.model.assignment(eps1, eps2).map_err(at)?;
        let u = compiler.compile(&self.sequence, &errs).map_err(at)?;
        let report = match &self.subspace {
            Some(s) => subspace_fidelity(&self.target, &u, s),
            None => fidelity(&self.target, &u),
        }
        .map_err(at)?;
        Ok(SweepRow {
            eps1,
            eps2,
            infidelity: report.infidelity.clamp(0.0, 1.0),
            sequence: self.id.clone(),
            seed: errs.seed(),
            signs: errs.sign_pattern().map(str::to_owned),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps1: f64,
    pub eps2: Option<f64>,
    pub infidelity: f64,
    pub sequence: String,
    pub seed: Option<u64>,
    pub signs: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: &str = "eps1,eps2,infidelity,sequence,seed,signs";

impl SweepResult {
    /// `(eps1, infidelity)` pairs.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.eps1, r.infidelity)).collect()
    }

    pub fn fit(&self, window: (f64, f64)) -> Result<SlopeFit> {
        fit_slope(&self.points(), window)
    }

    /// Fit over the whole `eps1` range of the result.
    pub fn fit_all(&self) -> Result<SlopeFit> {
        let lo = self
            .rows
            .iter()
            .map(|r| r.eps1)
            .fold(f64::INFINITY, f64::min);
        let hi = self.rows.iter().map(|r| r.eps1).fold(0.0, f64::max);
        self.fit((lo, hi))
    }

    pub fn extend(&mut self, other: SweepResult) {
        self.rows.extend(other.rows);
    }

    /// Floats use 17 significant digits; absent fields are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let eps2 = r.eps2.map(|e| format!("{e:.16e}")).unwrap_or_default();
            let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{:.16e},{},{:.16e},{},{},{}",
                r.eps1,
                eps2,
                r.infidelity,
                r.sequence,
                seed,
                r.signs.as_deref().unwrap_or("")
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Grid point `(ε1, ε2)`; `ε2` is absent for one-parameter sweeps.
pub type GridPoint = (f64, Option<f64>);

pub fn grid_1d(eps: &[f64]) -> Vec<GridPoint> {
    eps.iter().map(|&e| (e, None)).collect()
}

/// Row-major over `eps2` then `eps1`, both ascending.
pub fn grid_2d(eps1: &[f64], eps2: &[f64]) -> Vec<GridPoint> {
    eps2.iter()
        .flat_map(|&b| eps1.iter().map(move |&a| (a, Some(b))))
        .collect()
}

fn check_grid(grid: &[GridPoint]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("sweep grid is empty"));
    }
    for &(a, b) in grid {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(a) || b.is_some_and(|b| !ok(b)) {
            return Err(domain(format!(
                "grid values must be finite and >= 0, got ({a}, {b:?})"
            )));
        }
    }
    let one_d = grid.iter().all(|p| p.1.is_none());
    let sorted = grid.windows(2).all(|w| match one_d {
        true => w[0].0 <= w[1].0,
        false => (w[0].1, w[0].0) <= (w[1].1, w[1].0),
    });
    if !sorted {
        return Err(domain("sweep grid must be ascending"));
    }
    Ok(())
}

/// Evaluates every grid point in parallel, one compiler per worker. Rows come
/// back in grid order regardless of scheduling.
pub fn sweep(exp: &Experiment, grid: &[GridPoint]) -> Result<SweepResult> {
    check_grid(grid)?;
    let rows = grid
        .par_iter()
        .map_init(Compiler::new, |c, &(a, b)| exp.evaluate(c, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

//! Locating where infidelity scaling in `ε1` switches from `ε1⁶` to `ε1²`.

use super::fit::{log_log_least_squares, SlopeFit, INFIDELITY_FLOOR};
use super::sweep::Experiment;
use crate::error::Result;
use crate::sequence::Compiler;

/// Multiplicative step for the centred local log-log slope.
pub const SLOPE_STEP: f64 = 1.05;
/// The crossover is where the local slope passes 4, midway between 2 and 6.
pub const SLOPE_THRESHOLD: f64 = 4.0;
/// Final bracket ratio `hi/lo` around the crossover.
pub const BRACKET_RATIO: f64 = 1.05;
/// Coarse scan ratio when walking down from the top of the range.
const SCAN_RATIO: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverReport {
    pub eps2: Vec<f64>,
    /// `None` when no regime change was found in range.
    pub eps1_star: Vec<Option<f64>>,
    /// Power of `ε1*` against `ε2`, when at least two crossovers exist.
    pub power: Option<SlopeFit>,
}

/// `d ln F / d ln ε1` by a centred difference with step [`SLOPE_STEP`];
/// `None` once either sample sits at the noise floor.
pub fn local_slope(
    exp: &Experiment,
    compiler: &mut Compiler,
    eps1: f64,
    eps2: f64,
) -> Result<Option<f64>> {
    let up = exp
        .evaluate(compiler, eps1 * SLOPE_STEP, Some(eps2))?
        .infidelity;
    let down = exp
        .evaluate(compiler, eps1 / SLOPE_STEP, Some(eps2))?
        .infidelity;
    if up <= INFIDELITY_FLOOR || down <= INFIDELITY_FLOOR {
        return Ok(None);
    }
    Ok(Some((up / down).ln() / (SLOPE_STEP * SLOPE_STEP).ln()))
}

/// Walks down from `range.1` until the local slope first drops below 4,
/// then bisects geometrically. Returns the geometric centre of the final
/// bracket, or `None` if the slope never crosses above the noise floor.
pub fn locate_crossover(exp: &Experiment, eps2: f64, range: (f64, f64)) -> Result<Option<f64>> {
    let mut compiler = Compiler::new();
    let (lo_limit, mut hi) = range;
    let Some(mut s_hi) = local_slope(exp, &mut compiler, hi, eps2)? else {
        return Ok(None);
    };
    let mut lo = hi / SCAN_RATIO;
    loop {
        if lo < lo_limit {
            return Ok(None);
        }
        let Some(s_lo) = local_slope(exp, &mut compiler, lo, eps2)? else {
            return Ok(None);
        };
        if s_hi >= SLOPE_THRESHOLD && s_lo < SLOPE_THRESHOLD {
            break;
        }
        hi = lo;
        s_hi = s_lo;
        lo /= SCAN_RATIO;
    }
    while hi / lo > BRACKET_RATIO {
        let mid = (lo * hi).sqrt();
        match local_slope(exp, &mut compiler, mid, eps2)? {
            Some(s) if s < SLOPE_THRESHOLD => lo = mid,
            Some(_) => hi = mid,
            None => return Ok(None),
        }
    }
    Ok(Some((lo * hi).sqrt()))
}

/// Crossovers for each `ε2` and the fitted power of `ε1*` against `ε2`.
pub fn crossover_scan(
    exp: &Experiment,
    eps2: &[f64],
    range: (f64, f64),
) -> Result<CrossoverReport> {
    let eps1_star = eps2
        .iter()
        .map(|&e| locate_crossover(exp, e, range))
        .collect::<Result<Vec<_>>>()?;
    let found: Vec<(f64, f64)> = eps2
        .iter()
        .zip(&eps1_star)
        .filter_map(|(&e2, s)| s.map(|s| (e2, s)))
        .collect();
    let power = if found.len() >= 2 {
        Some(log_log_least_squares(&found)?)
    } else {
        None
    };
    Ok(CrossoverReport {
        eps2: eps2.to_vec(),
        eps1_star,
        power,
    })
}

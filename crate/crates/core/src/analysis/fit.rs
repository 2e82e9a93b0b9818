use crate::error::{Error, Result};

/// Infidelities at or below this are treated as numerical noise and left
/// out of fits.
pub const INFIDELITY_FLOOR: f64 = 1e-27;

/// Least-squares power law `y = e^{log_prefactor}·x^{exponent}` in log-log
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub exponent: f64,
    pub log_prefactor: f64,
    /// Largest |residual| in natural-log units.
    pub max_residual: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

impl SlopeFit {
    pub fn prefactor(&self) -> f64 {
        self.log_prefactor.exp()
    }

    /// Model value at `x`.
    pub fn predict(&self, x: f64) -> f64 {
        (self.log_prefactor + self.exponent * x.ln()).exp()
    }
}

/// Fits points with `lo ≤ x ≤ hi` and `y` above [`INFIDELITY_FLOOR`].
pub fn fit_slope(points: &[(f64, f64)], window: (f64, f64)) -> Result<SlopeFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::DegenerateWindow(format!("[{lo:e}, {hi:e}]")));
    }
    let slack = 1e-12;
    let used: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| {
            x >= lo * (1.0 - slack) && x <= hi * (1.0 + slack) && y > INFIDELITY_FLOOR
        })
        .collect();
    if used.len() < 4 {
        return Err(Error::TooFewPoints(used.len()));
    }
    let mut fit = log_log_least_squares(&used)?;
    fit.window = window;
    Ok(fit)
}

/// Unwindowed log-log least squares over at least two positive points.
pub fn log_log_least_squares(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::DegenerateWindow(
            "log-log fit needs positive data".into(),
        ));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if points.len() < 2 || sxx <= 0.0 {
        return Err(Error::DegenerateWindow("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let log_prefactor = my - exponent * mx;
    let max_residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - log_prefactor - exponent * x).abs())
        .fold(0.0, f64::max);
    let xs = points.iter().map(|p| p.0);
    Ok(SlopeFit {
        exponent,
        log_prefactor,
        max_residual,
        window: (
            xs.clone().fold(f64::INFINITY, f64::min),
            xs.fold(0.0, f64::max),
        ),
        n_points: points.len(),
    })
}

/// `n` points spaced evenly in log between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = log_grid(1e-4, 1e-2, 9)
            .into_iter()
            .map(|x| (x, 3.0 * x.powi(6)))
            .collect();
        let f = fit_slope(&pts, (1e-4, 1e-2)).unwrap();
        assert!((f.exponent - 6.0).abs() < 1e-6);
        assert!((f.prefactor() - 3.0).abs() < 1e-6);
        assert!(f.max_residual < 1e-9);
    }

    #[test]
    fn regime_mixture_shows_in_residual() {
        let pts: Vec<_> = log_grid(1e-4, 1.0, 17)
            .into_iter()
            .map(|x| (x, x.powi(6) + 1e-6 * x * x))
            .collect();
        let f = fit_slope(&pts, (1e-4, 1.0)).unwrap();
        assert!(f.max_residual > 0.5, "{f:?}");
    }

    #[test]
    fn too_few_and_degenerate() {
        let pts = [(1e-3, 1e-6)];
        assert_eq!(fit_slope(&pts, (1e-4, 1e-2)), Err(Error::TooFewPoints(1)));
        assert!(matches!(
            fit_slope(&pts, (1e-2, 1e-4)),
            Err(Error::DegenerateWindow(_))
        ));
    }

    #[test]
    fn floor_excludes_noise() {
        let mut pts: Vec<_> = log_grid(1e-3, 1e-1, 6)
            .into_iter()
            .map(|x| (x, x * x))
            .collect();
        pts.push((1e-4, 0.0));
        let f = fit_slope(&pts, (1e-4, 1e-1)).unwrap();
        assert_eq!(f.n_points, 6);
    }
}

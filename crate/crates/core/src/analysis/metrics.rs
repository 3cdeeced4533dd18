use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::MeanFieldSolution;
use crate::samplers::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMode {
    /// Supremum over time (single cell).
    Homogeneous,
    /// Per-cell supremum over time, averaged uniformly over cells.
    Spatial,
}

/// Largest absolute difference between two equally long series.
pub fn sup_error(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn errors_on_grid(a: &Trajectory, b: &Trajectory, mode: ErrorMode) -> Result<(f64, f64)> {
    a.same_grid(b)?;
    let mc = a.n_cells();
    if mode == ErrorMode::Homogeneous && mc != 1 {
        return Err(Error::InvalidDimension(format!("homogeneous error on {mc} cells")));
    }
    let mut ef = 0.0;
    let mut eg = 0.0;
    for l in 0..mc {
        ef += sup_error(&a.predator_series(l), &b.predator_series(l))?;
        eg += sup_error(&a.prey_series(l), &b.prey_series(l))?;
    }
    Ok((ef / mc as f64, eg / mc as f64))
}

/// `(e_f, e_g)` between a (typically realization-averaged) trajectory and
/// the mean-field solution resampled onto the trajectory's times.
pub fn error_vs_meanfield(traj: &Trajectory, mf: &MeanFieldSolution, mode: ErrorMode) -> Result<(f64, f64)> {
    if traj.n_cells() != mf.n_cells() {
        return Err(Error::GridMismatch(format!("{} vs {} cells", traj.n_cells(), mf.n_cells())));
    }
    let reference = mf.resample(&traj.times)?;
    errors_on_grid(traj, &reference, mode)
}

/// `(E_f, E_g)` between the mean trajectory of an approximate sampler and
/// the mean trajectory of the exact sampler on a shared grid.
pub fn error_vs_direct(traj: &Trajectory, direct: &Trajectory, mode: ErrorMode) -> Result<(f64, f64)> {
    errors_on_grid(traj, direct, mode)
}

/// Least-squares fit of `ln y = intercept + slope ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits positive, finite `(x, y)` pairs; others are skipped.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(Error::Fit(format!("{} x values vs {} y values", x.len(), y.len())));
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite() && **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit(format!("{} valid points, need at least 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LogLogFit { slope, intercept: my - slope * mx, r_squared, points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Lattice;
    use crate::samplers::{RunStats, Source, TrajectoryMeta};

    fn traj(f: Vec<f64>, g: Vec<f64>, cells: usize) -> Trajectory {
        let lattice = if cells == 1 { Lattice::WellMixed } else { Lattice::Line { cells } };
        Trajectory {
            lattice,
            times: (0..f.len() / cells).map(|k| k as f64).collect(),
            predator: f,
            prey: g,
            meta: TrajectoryMeta { source: Source::Average, seed: 0, params_hash: String::new(), stats: RunStats::default() },
        }
    }

    #[test]
    fn identical_and_offset() {
        let a = traj(vec![0.1, 0.2, 0.3], vec![0.3, 0.2, 0.1], 1);
        assert_eq!(error_vs_direct(&a, &a, ErrorMode::Homogeneous).unwrap(), (0.0, 0.0));
        let b = traj(vec![0.15, 0.25, 0.35], vec![0.3, 0.2, 0.1], 1);
        let (ef, eg) = error_vs_direct(&a, &b, ErrorMode::Homogeneous).unwrap();
        assert!((ef - 0.05).abs() < 1e-15 && eg == 0.0);
    }

    #[test]
    fn spatial_mode_averages_cell_suprema() {
        let a = traj(vec![0.0; 4], vec![0.0; 4], 2);
        let b = traj(vec![0.1, 0.0, 0.0, 0.3], vec![0.0; 4], 2);
        let (ef, _) = error_vs_direct(&a, &b, ErrorMode::Spatial).unwrap();
        assert!((ef - 0.2).abs() < 1e-15);
    }

    #[test]
    fn mismatched_grids() {
        let a = traj(vec![0.1, 0.2], vec![0.0; 2], 1);
        let b = traj(vec![0.1, 0.2, 0.3], vec![0.0; 3], 1);
        assert!(matches!(error_vs_direct(&a, &b, ErrorMode::Homogeneous), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn exact_power_law() {
        let x = [10.0, 100.0, 1000.0, 10000.0];
        let y: Vec<f64> = x.iter().map(|n: &f64| 3.0 / n.sqrt()).collect();
        let fit = fit_loglog(&x, &y).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit_loglog(&x[..2], &y[..2]).is_err());
        assert!(fit_loglog(&[1.0, 2.0, 3.0], &[0.0, -1.0, 1.0]).is_err());
    }
}

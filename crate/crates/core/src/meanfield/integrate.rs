use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::{rhs_into, Field, Method, SolverConfig, Workspace};
use crate::model::{Lattice, ScaledParams};
use crate::samplers::{RunStats, Source, Trajectory, TrajectoryMeta};

const INVARIANT_TOL: f64 = 1e-9;

/// Mean-field densities on a fixed output grid (time-major storage).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldSolution {
    pub lattice: Lattice,
    pub times: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// Accepted integrator steps.
    pub steps: u64,
}

impl MeanFieldSolution {
    pub fn n_cells(&self) -> usize {
        self.lattice.n_cells()
    }

    pub fn field(&self, k: usize) -> Field {
        let n = self.n_cells();
        Field {
            lattice: self.lattice,
            time: self.times[k],
            f: self.f[k * n..(k + 1) * n].to_vec(),
            g: self.g[k * n..(k + 1) * n].to_vec(),
        }
    }

    pub fn last(&self) -> Field {
        self.field(self.times.len() - 1)
    }

    /// Linear interpolation of all cells at time `t`.
    pub fn at(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (t0, t1) = (self.times[0], self.times[self.times.len() - 1]);
        let tol = 1e-9 * t1.abs().max(1.0);
        if t < t0 - tol || t > t1 + tol {
            return Err(Error::GridMismatch(format!("time {t} outside the solution range [{t0}, {t1}]")));
        }
        let n = self.n_cells();
        let k = match self.times.partition_point(|&s| s <= t) {
            0 => 0,
            i => (i - 1).min(self.times.len().saturating_sub(2)),
        };
        if self.times.len() == 1 {
            return Ok((self.f[..n].to_vec(), self.g[..n].to_vec()));
        }
        let w = ((t - self.times[k]) / (self.times[k + 1] - self.times[k])).clamp(0.0, 1.0);
        let lerp = |v: &[f64], l: usize| v[k * n + l] * (1.0 - w) + v[(k + 1) * n + l] * w;
        Ok(((0..n).map(|l| lerp(&self.f, l)).collect(), (0..n).map(|l| lerp(&self.g, l)).collect()))
    }

    /// The solution sampled on `times`, as a trajectory.
    pub fn resample(&self, times: &[f64]) -> Result<Trajectory> {
        let mut t = self.to_trajectory();
        t.times.clear();
        t.predator.clear();
        t.prey.clear();
        for &s in times {
            let (f, g) = self.at(s)?;
            t.push(s, &f, &g);
        }
        Ok(t)
    }

    pub fn to_trajectory(&self) -> Trajectory {
        Trajectory {
            lattice: self.lattice,
            times: self.times.clone(),
            predator: self.f.clone(),
            prey: self.g.clone(),
            meta: TrajectoryMeta {
                source: Source::MeanField,
                seed: 0,
                params_hash: String::new(),
                stats: RunStats { steps: self.steps, ..Default::default() },
            },
        }
    }
}

struct System<'a> {
    lattice: Lattice,
    sp: &'a ScaledParams,
    cfg: &'a SolverConfig,
    n: usize,
    work: Workspace,
}

impl System<'_> {
    fn eval(&mut self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (f, g) = y.split_at(self.n);
        let (df, dg) = dy.split_at_mut(self.n);
        rhs_into(self.lattice, f, g, self.sp, self.cfg.epsilon, self.cfg.boundary, df, dg, &mut self.work)
    }

    fn check(&self, t: f64, y: &[f64]) -> Result<()> {
        let (f, g) = y.split_at(self.n);
        for l in 0..self.n {
            let (a, b) = (f[l], g[l]);
            if !(a.is_finite() && b.is_finite()) || a < -INVARIANT_TOL || b < -INVARIANT_TOL || a + b > 1.0 + INVARIANT_TOL {
                return Err(Error::SolverInstability(format!("cell {l} at t = {t}: f = {a}, g = {b}")));
            }
        }
        Ok(())
    }
}

fn validate(f0: &Field, sp: &ScaledParams, cfg: &SolverConfig) -> Result<()> {
    for (name, v) in [("dt", cfg.dt), ("t_final", cfg.t_final), ("output_stride", cfg.output_stride), ("epsilon", cfg.epsilon)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
        }
    }
    f0.check(INVARIANT_TOL)?;
    let m = sp.m1_t.max(sp.m2_t);
    if matches!(cfg.method, Method::Rk4) && f0.lattice.n_cells() > 1 && m > 0.0 {
        let limit = cfg.epsilon * cfg.epsilon / (4.0 * m);
        if cfg.dt > limit {
            return Err(Error::InvalidConfig(format!("dt = {} exceeds the stability limit {limit}", cfg.dt)));
        }
    }
    if let Method::DormandPrince { rtol, atol } = cfg.method {
        if !(rtol > 0.0 && atol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
    }
    Ok(())
}

/// Integrates the mean-field equations from `f0` (its `time` is ignored;
/// integration starts at 0) and samples the solution every
/// `cfg.output_stride` up to `cfg.t_final`.
///
/// Densities are checked after every accepted step; leaving
/// `0 <= f, g, f + g <= 1` by more than 1e-9 is a solver instability.
pub fn integrate(f0: &Field, sp: &ScaledParams, cfg: &SolverConfig) -> Result<MeanFieldSolution> {
    validate(f0, sp, cfg)?;
    let n = f0.f.len();
    let mut sys = System { lattice: f0.lattice, sp, cfg, n, work: Workspace::new(n) };
    let mut y: Vec<f64> = f0.f.iter().chain(&f0.g).copied().collect();
    let n_out = (cfg.t_final / cfg.output_stride + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=n_out).map(|k| k as f64 * cfg.output_stride).collect();
    let mut sol = MeanFieldSolution {
        lattice: f0.lattice,
        times: Vec::with_capacity(grid.len()),
        f: Vec::with_capacity(grid.len() * n),
        g: Vec::with_capacity(grid.len() * n),
        steps: 0,
    };
    let emit = |sol: &mut MeanFieldSolution, t: f64, y: &[f64]| {
        sol.times.push(t);
        sol.f.extend_from_slice(&y[..n]);
        sol.g.extend_from_slice(&y[n..]);
    };
    emit(&mut sol, 0.0, &y);
    match cfg.method {
        Method::Rk4 => {
            let ratio = cfg.output_stride / cfg.dt;
            let per_out = ratio.round();
            if per_out < 1.0 || (ratio - per_out).abs() > 1e-9 * ratio {
                return Err(Error::InvalidConfig(format!(
                    "output_stride {} is not a multiple of dt {}",
                    cfg.output_stride, cfg.dt
                )));
            }
            let per_out = per_out as u64;
            let mut stages = vec![vec![0.0; 2 * n]; 4];
            let mut tmp = vec![0.0; 2 * n];
            let h = cfg.dt;
            for (k, &t_out) in grid.iter().enumerate().skip(1) {
                for s in 0..per_out {
                    let t = ((k as u64 - 1) * per_out + s) as f64 * h;
                    rk4_step(&mut sys, &mut y, h, &mut stages, &mut tmp)?;
                    sol.steps += 1;
                    sys.check(t + h, &y)?;
                }
                emit(&mut sol, t_out, &y);
            }
        }
        Method::DormandPrince { rtol, atol } => {
            let mut stepper = DormandPrince::new(2 * n);
            let mut t = 0.0;
            let mut h = cfg.dt.min(grid[grid.len() - 1].max(cfg.dt));
            let h_min = 1e-12 * cfg.t_final.max(1.0);
            let mut next_out = 1;
            let t_end = grid[grid.len() - 1];
            while next_out < grid.len() {
                let step = h.min(t_end - t);
                let (err, y_new) = stepper.step(&mut sys, &y, step, rtol, atol)?;
                if err <= 1.0 {
                    let t_new = if (t_end - (t + step)).abs() <= 1e-12 * t_end { t_end } else { t + step };
                    sys.check(t_new, &y_new)?;
                    while next_out < grid.len() && grid[next_out] <= t_new + 1e-12 * t_end {
                        let w = ((grid[next_out] - t) / (t_new - t)).clamp(0.0, 1.0);
                        let yi: Vec<f64> = y.iter().zip(&y_new).map(|(a, b)| a * (1.0 - w) + b * w).collect();
                        emit(&mut sol, grid[next_out], &yi);
                        next_out += 1;
                    }
                    y = y_new;
                    t = t_new;
                    sol.steps += 1;
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = step * factor;
                if h < h_min && next_out < grid.len() {
                    return Err(Error::SolverInstability(format!("step size underflow at t = {t}: h = {h:e}")));
                }
            }
        }
    }
    Ok(sol)
}

fn rk4_step(sys: &mut System, y: &mut [f64], h: f64, k: &mut [Vec<f64>], tmp: &mut [f64]) -> Result<()> {
    sys.eval(y, &mut k[0])?;
    for i in 0..y.len() {
        tmp[i] = y[i] + 0.5 * h * k[0][i];
    }
    sys.eval(tmp, &mut k[1])?;
    for i in 0..y.len() {
        tmp[i] = y[i] + 0.5 * h * k[1][i];
    }
    sys.eval(tmp, &mut k[2])?;
    for i in 0..y.len() {
        tmp[i] = y[i] + h * k[2][i];
    }
    sys.eval(tmp, &mut k[3])?;
    for i in 0..y.len() {
        y[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
    Ok(())
}

struct DormandPrince {
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl DormandPrince {
    fn new(n: usize) -> Self {
        Self { k: vec![vec![0.0; n]; 7], tmp: vec![0.0; n] }
    }

    /// One trial step; returns the scaled RMS error estimate and the
    /// fifth-order solution.
    fn step(&mut self, sys: &mut System, y: &[f64], h: f64, rtol: f64, atol: f64) -> Result<(f64, Vec<f64>)> {
        let n = y.len();
        for (s, row) in A.iter().enumerate() {
            for (i, &yi) in y.iter().enumerate() {
                let mut acc = yi;
                for (j, a) in row.iter().enumerate().take(s) {
                    acc += h * a * self.k[j][i];
                }
                self.tmp[i] = acc;
            }
            sys.eval(&self.tmp, &mut self.k[s])?;
        }
        let mut y5 = vec![0.0; n];
        let mut err = 0.0;
        for i in 0..n {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for s in 0..7 {
                s5 += B5[s] * self.k[s][i];
                s4 += B4[s] * self.k[s][i];
            }
            y5[i] = y[i] + h * s5;
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            let e = h * (s5 - s4) / sc;
            err += e * e;
        }
        Ok(((err / n as f64).sqrt(), y5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::Boundary;
    use crate::model::{scale_params, ModelParams};

    fn hom() -> ScaledParams {
        scale_params(&ModelParams::homogeneous_reference().homogeneous_mapping()).unwrap()
    }

    #[test]
    fn damped_oscillation_reaches_equilibrium() {
        let f0 = Field::new(Lattice::WellMixed, vec![0.25], vec![0.5]).unwrap();
        for method in [Method::Rk4, Method::DormandPrince { rtol: 1e-8, atol: 1e-10 }] {
            let cfg = SolverConfig { dt: 0.05, t_final: 500.0, output_stride: 1.0, method, ..Default::default() };
            let sol = integrate(&f0, &hom(), &cfg).unwrap();
            assert_eq!(sol.times.len(), 501);
            let last = sol.last();
            assert!((last.f[0] - 0.2).abs() < 1e-3, "{method:?}: f(500) = {}", last.f[0]);
            assert!((last.g[0] - 0.2).abs() < 5e-3, "g(500) = {}", last.g[0]);
        }
    }

    #[test]
    fn methods_agree() {
        let f0 = Field::new(Lattice::WellMixed, vec![0.25], vec![0.5]).unwrap();
        let a = integrate(&f0, &hom(), &SolverConfig { dt: 0.01, t_final: 50.0, ..Default::default() }).unwrap();
        let cfg = SolverConfig { method: Method::DormandPrince { rtol: 1e-10, atol: 1e-12 }, t_final: 50.0, ..Default::default() };
        let b = integrate(&f0, &hom(), &cfg).unwrap();
        assert!((a.last().f[0] - b.last().f[0]).abs() < 1e-8);
    }

    #[test]
    fn zero_field_stays_zero() {
        let f0 = Field::uniform(Lattice::Line { cells: 4 }, 0.0, 0.0).unwrap();
        let sp = scale_params(&ModelParams::heterogeneous_reference()).unwrap();
        let sol = integrate(&f0, &sp, &SolverConfig { t_final: 10.0, ..Default::default() }).unwrap();
        assert!(sol.f.iter().chain(&sol.g).all(|&x| x == 0.0));
    }

    #[test]
    fn rk4_order() {
        let f0 = Field::new(Lattice::WellMixed, vec![0.25], vec![0.5]).unwrap();
        let sp = hom();
        let run = |dt: f64| {
            let cfg = SolverConfig { dt, t_final: 10.0, output_stride: 10.0, ..Default::default() };
            integrate(&f0, &sp, &cfg).unwrap().last()
        };
        // larger steps so the error stays well above round-off
        let (a, b, c) = (run(2.0), run(1.0), run(0.5));
        let e1 = (a.f[0] - b.f[0]).abs() + (a.g[0] - b.g[0]).abs();
        let e2 = (b.f[0] - c.f[0]).abs() + (b.g[0] - c.g[0]).abs();
        let order = (e1 / e2).log2();
        assert!(order >= 3.5, "observed order {order}");
    }

    #[test]
    fn stability_limit_enforced() {
        let f0 = Field::uniform(Lattice::Line { cells: 4 }, 0.1, 0.1).unwrap();
        let sp = scale_params(&ModelParams::heterogeneous_reference()).unwrap();
        let cfg = SolverConfig { dt: 2.0, output_stride: 2.0, boundary: Boundary::ZeroFlux, ..Default::default() };
        assert!(matches!(integrate(&f0, &sp, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn interpolation() {
        let f0 = Field::new(Lattice::WellMixed, vec![0.25], vec![0.5]).unwrap();
        let sol = integrate(&f0, &hom(), &SolverConfig { t_final: 2.0, ..Default::default() }).unwrap();
        let (f, _) = sol.at(0.5).unwrap();
        assert!((f[0] - 0.5 * (sol.f[0] + sol.f[1])).abs() < 1e-15);
        assert!(sol.at(3.0).is_err());
    }
}

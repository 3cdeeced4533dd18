use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_noise::LinearNoiseModel;
use crate::meanfield::rhs_homogeneous;
use crate::model::{Lattice, ScaledParams};
use crate::rng::{stream, SimRng};
use crate::samplers::{record_grid, RunStats, Source, Trajectory, TrajectoryMeta};

/// Euler–Maruyama settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangevinConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_stride: f64,
    pub seed: u64,
    /// Initial point: deviation from equilibrium (linear system) or
    /// densities (nonlinear system).
    pub initial: [f64; 2],
    pub noise: bool,
}

impl Default for LangevinConfig {
    fn default() -> Self {
        Self { dt: 0.01, t_final: 100.0, record_stride: 1.0, seed: 0, initial: [0.0, 0.0], noise: true }
    }
}

impl LangevinConfig {
    fn steps(&self) -> Result<(u64, u64)> {
        for (name, v) in [("dt", self.dt), ("t_final", self.t_final), ("record_stride", self.record_stride)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let ratio = self.record_stride / self.dt;
        let per = ratio.round();
        if per < 1.0 || (ratio - per).abs() > 1e-9 * ratio {
            return Err(Error::InvalidConfig(format!(
                "record_stride {} is not a multiple of dt {}",
                self.record_stride, self.dt
            )));
        }
        let n_rec = record_grid(self.t_final, self.record_stride).len() as u64 - 1;
        Ok((per as u64, n_rec))
    }
}

/// Trajectory of a Langevin run with its clamping counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangevinRun {
    pub trajectory: Trajectory,
    /// Steps after which a density had to be clamped back into range.
    pub clamped_states: u64,
    /// Square-root arguments that were negative and replaced by 0.
    pub clamped_radicands: u64,
}

fn normals(rng: &mut SimRng) -> [f64; 4] {
    let mut z = [0.0; 4];
    for v in z.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
    z
}

fn meta(source: Source, seed: u64) -> TrajectoryMeta {
    TrajectoryMeta { source, seed, params_hash: String::new(), stats: RunStats::default() }
}

/// Euler–Maruyama integration of `x' = Psi x + Phi xi` for the deviations
/// `x = (f - f*, g - g*)`. The recorded trajectory holds deviations, not
/// densities.
pub fn simulate_langevin_linear(model: &LinearNoiseModel, cfg: &LangevinConfig) -> Result<Trajectory> {
    let (per, n_rec) = cfg.steps()?;
    let psi = model.psi;
    let tr = psi[0][0] + psi[1][1];
    let det = psi[0][0] * psi[1][1] - psi[0][1] * psi[1][0];
    let disc = tr * tr / 4.0 - det;
    let radius = if disc >= 0.0 { (tr / 2.0).abs() + disc.sqrt() } else { det.abs().sqrt() };
    if cfg.dt * radius >= 1.0 {
        return Err(Error::Unstable(format!("dt * spectral radius = {} >= 1", cfg.dt * radius)));
    }
    let mut rng = stream(cfg.seed);
    let scale = if cfg.noise { model.sigma * cfg.dt.sqrt() } else { 0.0 };
    let mut x = cfg.initial;
    let reference = x[0].abs().max(x[1].abs()).max(model.sigma);
    let mut traj = Trajectory::empty(Lattice::WellMixed, meta(Source::LangevinLinear, cfg.seed));
    traj.push(0.0, &x[..1], &x[1..]);
    for k in 1..=n_rec {
        for _ in 0..per {
            let drift = [psi[0][0] * x[0] + psi[0][1] * x[1], psi[1][0] * x[0] + psi[1][1] * x[1]];
            let mut next = [x[0] + cfg.dt * drift[0], x[1] + cfg.dt * drift[1]];
            if scale > 0.0 {
                let z = normals(&mut rng);
                for (n, phi) in next.iter_mut().zip(&model.phi) {
                    *n += scale * phi.iter().zip(&z).map(|(p, z)| p * z).sum::<f64>();
                }
            }
            x = next;
            traj.meta.stats.steps += 1;
        }
        let size = x[0].abs().max(x[1].abs());
        if size.is_nan() || size > 1e3 * reference {
            return Err(Error::Unstable(format!("deviation {x:?} diverged at t = {}", k as f64 * cfg.record_stride)));
        }
        traj.push(k as f64 * cfg.record_stride, &x[..1], &x[1..]);
    }
    Ok(traj)
}

/// Euler–Maruyama integration of the nonlinear Langevin system of a
/// population of `n` components, with state-dependent noise amplitudes
/// `sqrt(2 p1_t f g)`, `sqrt(d1_t f)`, `sqrt(2 b_t g (1 - f - g))` and
/// `sqrt(2 p2_t f g + d2_t g)`. Densities leaving `[0, 1]` (or `f + g > 1`)
/// are clamped back and counted.
pub fn simulate_langevin_full(sp: &ScaledParams, n: f64, cfg: &LangevinConfig) -> Result<LangevinRun> {
    let (per, n_rec) = cfg.steps()?;
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidParameter { name: "N", reason: format!("must be positive, got {n}") });
    }
    let sigma = if cfg.noise { (cfg.dt / n).sqrt() } else { 0.0 };
    let mut rng = stream(cfg.seed);
    let [mut f, mut g] = cfg.initial;
    let mut run = LangevinRun {
        trajectory: Trajectory::empty(Lattice::WellMixed, meta(Source::LangevinFull, cfg.seed)),
        clamped_states: 0,
        clamped_radicands: 0,
    };
    let sqrt_c = |v: f64, count: &mut u64| {
        if v < 0.0 {
            *count += 1;
            0.0
        } else {
            v.sqrt()
        }
    };
    run.trajectory.push(0.0, &[f], &[g]);
    for k in 1..=n_rec {
        for _ in 0..per {
            let (df, dg) = rhs_homogeneous(f, g, sp)?;
            let mut nf = f + cfg.dt * df;
            let mut ng = g + cfg.dt * dg;
            if sigma > 0.0 {
                let z = normals(&mut rng);
                let c = &mut run.clamped_radicands;
                let s2 = sqrt_c(2.0 * sp.p1_t * f * g, c);
                let s4 = sqrt_c(sp.d1_t * f, c);
                let s1 = sqrt_c(2.0 * sp.b_t * g * (1.0 - f - g), c);
                let s3 = sqrt_c(2.0 * sp.p2_t * f * g + sp.d2_t * g, c);
                nf += sigma * (s2 * z[1] - s4 * z[3]);
                ng += sigma * (s1 * z[0] - s2 * z[1] - s3 * z[2]);
            }
            let (cf, cg) = (nf.clamp(0.0, 1.0), ng.clamp(0.0, 1.0));
            let cg = cg.min(1.0 - cf);
            if cf != nf || cg != ng {
                run.clamped_states += 1;
            }
            f = cf;
            g = cg;
            run.trajectory.meta.stats.steps += 1;
        }
        run.trajectory.push(k as f64 * cfg.record_stride, &[f], &[g]);
    }
    run.trajectory.meta.stats.clamped = run.clamped_states;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_noise::build_linear_model;
    use crate::model::{scale_params, ModelParams};

    fn hom() -> ScaledParams {
        scale_params(&ModelParams::homogeneous_reference().homogeneous_mapping()).unwrap()
    }

    #[test]
    fn extinct_start_stays_extinct() {
        let cfg = LangevinConfig { t_final: 20.0, initial: [0.0, 0.0], ..Default::default() };
        let run = simulate_langevin_full(&hom(), 100.0, &cfg).unwrap();
        assert!(run.trajectory.predator.iter().chain(&run.trajectory.prey).all(|&x| x == 0.0));
    }

    #[test]
    fn vanishing_noise_recovers_deterministic_path() {
        let m = build_linear_model(&hom(), 1e300).unwrap();
        let on = LangevinConfig { t_final: 50.0, initial: [0.05, 0.0], ..Default::default() };
        let off = LangevinConfig { noise: false, ..on };
        let a = simulate_langevin_linear(&m, &on).unwrap();
        let b = simulate_langevin_linear(&m, &off).unwrap();
        for (x, y) in a.predator.iter().zip(&b.predator) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn unstable_step_rejected() {
        let m = build_linear_model(&hom(), 100.0).unwrap();
        let cfg = LangevinConfig { dt: 20.0, record_stride: 20.0, ..Default::default() };
        assert!(matches!(simulate_langevin_linear(&m, &cfg), Err(Error::Unstable(_))));
    }
}

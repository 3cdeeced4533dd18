//! Experiment runners. Each writes its artifacts and then the manifest.

use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use predprey::analysis::{
    benchmark_cost, convergence_study, error_vs_direct, error_vs_meanfield, meanfield_params, BenchCase,
    ConvergenceSetup, ErrorMode,
};
use predprey::linear_noise::{analytical_spectrum, build_linear_model, empirical_spectrum, spectral_coefficients};
use predprey::meanfield::{integrate, Field, MeanFieldSolution};
use predprey::model::{equilibrium, Lattice, ModelParams};
use predprey::samplers::{run_realizations, EngineKind, EnsembleSummary, RunSpec, RunStats, Trajectory};
use serde::Serialize;

use crate::config::{CostSweep, ExperimentConfig, ExperimentKind};
use crate::output::{ArtifactWriter, Manifest};

pub const MANIFEST: &str = "manifest.json";

/// Runs the configured experiment and returns the writer holding the list
/// of produced files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ArtifactWriter> {
    let mut out = ArtifactWriter::new(&cfg.out_dir())?;
    let kind = cfg.kind();
    match kind {
        ExperimentKind::Simulate => simulate(cfg, &mut out),
        ExperimentKind::Meanfield => meanfield(cfg, &mut out),
        ExperimentKind::Validate => validate(cfg, &mut out),
        ExperimentKind::Convergence => convergence(cfg, &mut out),
        ExperimentKind::Cost => cost(cfg, &mut out),
        ExperimentKind::Accuracy => accuracy(cfg, &mut out),
        ExperimentKind::Spectrum => spectrum(cfg, &mut out),
    }
    .with_context(|| format!("{} experiment failed", kind.name()))?;

    let manifest = Manifest {
        program: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        kind: kind.name().to_string(),
        engine: cfg.engine_config().kind.name().to_string(),
        seed: cfg.seed(),
        params: cfg.params(),
        config: cfg.clone(),
        files: out.files().to_vec(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    out.json(MANIFEST, &manifest)?;
    Ok(out)
}

fn error_mode(lattice: Lattice) -> ErrorMode {
    if lattice.is_well_mixed() {
        ErrorMode::Homogeneous
    } else {
        ErrorMode::Spatial
    }
}

fn run_spec(cfg: &ExperimentConfig) -> Result<RunSpec> {
    Ok(RunSpec { state0: cfg.initial_state()?, params: cfg.params(), engine: cfg.engine_config() })
}

fn mean_of(spec: &RunSpec, realizations: usize, seed: u64) -> Result<EnsembleSummary> {
    let trajs = run_realizations(spec, realizations, seed)?;
    Ok(EnsembleSummary::from_trajectories(&trajs)?)
}

fn meanfield_solution(cfg: &ExperimentConfig, initial: &Field) -> Result<MeanFieldSolution> {
    let sp = meanfield_params(&cfg.params(), cfg.lattice_layout())?;
    Ok(integrate(initial, &sp, &cfg.solver_config())?)
}

#[derive(Serialize)]
struct SimulateReport {
    engine: String,
    realizations: usize,
    capacity: u32,
    t_final: f64,
    extinct_runs: usize,
    stats: RunStats,
}

fn simulate(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<()> {
    let spec = run_spec(cfg)?;
    let trajs = run_realizations(&spec, cfg.realizations(), cfg.seed())?;
    let mut stats = RunStats::default();
    for t in &trajs {
        stats.steps += t.meta.stats.steps;
        stats.events += t.meta.stats.events;
        stats.rejected += t.meta.stats.rejected;
        stats.clamped += t.meta.stats.clamped;
    }
    let extinct_runs = trajs.iter().filter(|t| final_extinct(t)).count();
    let mean = if trajs.len() == 1 { trajs[0].clone() } else { EnsembleSummary::from_trajectories(&trajs)?.mean_trajectory() };
    out.trajectory("trajectory.csv", &mean)?;
    out.json(
        "simulate.json",
        &SimulateReport {
            engine: spec.engine.kind.name().to_string(),
            realizations: trajs.len(),
            capacity: spec.state0.capacity(),
            t_final: spec.engine.t_final,
            extinct_runs,
            stats,
        },
    )
}

fn final_extinct(t: &Trajectory) -> bool {
    let mc = t.n_cells();
    let k = t.len() - 1;
    (0..mc).all(|l| t.f(k, l) == 0.0 && t.g(k, l) == 0.0)
}

#[derive(Serialize)]
struct MeanfieldReport {
    steps: u64,
    equilibrium: Option<(f64, f64)>,
    final_f: Vec<f64>,
    final_g: Vec<f64>,
}

fn meanfield(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<()> {
    let d = cfg.initial_densities()?;
    let sol = meanfield_solution(cfg, &Field::new(d.lattice, d.f, d.g)?)?;
    out.trajectory("meanfield.csv", &sol.to_trajectory())?;
    let sp = meanfield_params(&cfg.params(), cfg.lattice_layout())?;
    let last = sol.last();
    out.json(
        "meanfield.json",
        &MeanfieldReport { steps: sol.steps, equilibrium: equilibrium(&sp).ok(), final_f: last.f, final_g: last.g },
    )
}

#[derive(Serialize)]
struct ValidateReport {
    engine: String,
    mode: ErrorMode,
    realizations: usize,
    capacity: u32,
    e_f: f64,
    e_g: f64,
}

fn validate(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<()> {
    let spec = run_spec(cfg)?;
    let mean = mean_of(&spec, cfg.realizations(), cfg.seed())?.mean_trajectory();
    let sol = meanfield_solution(cfg, &Field::from_state(&spec.state0))?;
    let mode = error_mode(spec.state0.lattice());
    let (e_f, e_g) = error_vs_meanfield(&mean, &sol, mode)?;
    out.trajectory("stochastic.csv", &mean)?;
    out.trajectory("meanfield.csv", &sol.resample(&mean.times)?)?;
    out.json(
        "validate.json",
        &ValidateReport {
            engine: spec.engine.kind.name().to_string(),
            mode,
            realizations: cfg.realizations(),
            capacity: spec.state0.capacity(),
            e_f,
            e_g,
        },
    )
}

fn convergence(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<()> {
    let setup = ConvergenceSetup {
        params: cfg.params(),
        initial: cfg.initial_densities()?,
        engine: cfg.engine_config(),
        solver: cfg.solver_config(),
        realizations: cfg.realizations(),
        seed: cfg.seed(),
        mode: error_mode(cfg.lattice_layout()),
    };
    let sizes = cfg.sizes.clone().unwrap_or_default();
    let report = convergence_study(&setup, &sizes)?;
    let rows = (0..report.sizes.len())
        .map(|i| vec![report.sizes[i].to_string(), report.e_f[i].to_string(), report.e_g[i].to_string()]);
    out.csv("convergence.csv", &["size", "e_f", "e_g"], rows)?;
    out.json("convergence.json", &report)
}

fn cost(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<()> {
    let base = run_spec(cfg)?;
    let initial = cfg.initial_densities()?;
    let sweep = cfg.sweep.unwrap_or_default();
    let points: Vec<f64> = match sweep {
        CostSweep::Size => cfg.sizes.iter().flatten().map(|&n| n as f64).collect(),
        CostSweep::Competition => cfg.sweep_values.clone().unwrap_or_default(),
    };
    let mut cases = Vec::new();
    for &kind in cfg.engines.iter().flatten() {
        for &v in &points {
            let engine = predprey::samplers::EngineConfig { kind, ..base.engine };
            let spec = match sweep {
                CostSweep::Size => RunSpec { state0: initial.state(v as u32)?, params: base.params, engine },
                CostSweep::Competition => {
                    RunSpec { state0: base.state0.clone(), params: ModelParams { p1_r: v, p2_r: v, ..base.params }, engine }
                }
            };
            cases.push(BenchCase { sweep_value: v, spec });
        }
    }
    let name = match sweep {
        CostSweep::Size => "size",
        CostSweep::Competition => "competition",
    };
    let report = benchmark_cost(&cases, cfg.repetitions.unwrap_or(5), name)?;
    let rows = report.entries.iter().map(|e| {
        vec![e.engine.name().to_string(), e.sweep_value.to_string(), e.median.to_string(), e.iqr.to_string()]
    });
    out.csv("cost.csv", &["engine", "sweep_value", "median_s", "iqr_s"], rows)?;
    out.json("cost.json", &report)
}

#[derive(Serialize)]
struct AccuracyEngine {
    engine: String,
    e_f: Vec<f64>,
    e_g: Vec<f64>,
}

#[derive(Serialize)]
struct AccuracyReport {
    reference: String,
    mode: ErrorMode,
    realizations: usize,
    sizes: Vec<u32>,
    engines: Vec<AccuracyEngine>,
}

/// Mean-trajectory errors of each engine against the direct method.
fn accuracy(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<()> {
    let initial = cfg.initial_densities()?;
    let sizes = cfg.sizes.clone().unwrap_or_default();
    let engines = cfg.engines.clone().unwrap_or_default();
    let r = cfg.realizations();
    let mode = error_mode(cfg.lattice_layout());
    let mut results: Vec<AccuracyEngine> = engines
        .iter()
        .map(|k| AccuracyEngine { engine: k.name().to_string(), e_f: Vec::new(), e_g: Vec::new() })
        .collect();
    for (i, &n) in sizes.iter().enumerate() {
        let state0 = initial.state(n)?;
        let spec = |kind| RunSpec { state0: state0.clone(), params: cfg.params(), engine: predprey::samplers::EngineConfig { kind, ..cfg.engine_config() } };
        let seed = cfg.seed().wrapping_add((i as u64) << 32);
        let direct = mean_of(&spec(EngineKind::Direct), r, seed)?.mean_trajectory();
        for (k, &kind) in engines.iter().enumerate() {
            let mean = mean_of(&spec(kind), r, seed.wrapping_add(k as u64 + 1))?.mean_trajectory();
            let (e_f, e_g) = error_vs_direct(&mean, &direct, mode)?;
            results[k].e_f.push(e_f);
            results[k].e_g.push(e_g);
        }
    }
    let rows = results.iter().flat_map(|e| {
        sizes
            .iter()
            .enumerate()
            .map(|(i, n)| vec![n.to_string(), e.engine.clone(), e.e_f[i].to_string(), e.e_g[i].to_string()])
    });
    out.csv("accuracy.csv", &["size", "engine", "e_f", "e_g"], rows)?;
    out.json("accuracy.json", &AccuracyReport { reference: "direct".into(), mode, realizations: r, sizes, engines: results })
}

#[derive(Serialize)]
struct SpectrumReport {
    engine: String,
    capacity: u32,
    realizations: usize,
    resonance: Option<f64>,
    peak_empirical: Option<(f64, f64)>,
    peak_analytical: Option<(f64, f64)>,
    omega: Vec<f64>,
    analytical: Vec<f64>,
    empirical: Vec<f64>,
    std_error: Vec<f64>,
}

fn spectrum(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<()> {
    let spec = run_spec(cfg)?;
    let trajs = run_realizations(&spec, cfg.realizations(), cfg.seed())?;
    let emp = empirical_spectrum(&trajs, true)?;
    drop(trajs);
    let sp = meanfield_params(&spec.params, Lattice::WellMixed)?;
    let model = build_linear_model(&sp, spec.state0.capacity() as f64)?;
    let an = analytical_spectrum(&model, &emp.omega)?;
    let rows = (0..emp.omega.len()).map(|i| {
        vec![emp.omega[i].to_string(), an.power[i].to_string(), emp.power[i].to_string(), emp.std_error[i].to_string()]
    });
    out.csv("spectrum.csv", &["omega", "analytical", "empirical", "std_error"], rows)?;
    let hi = emp.omega.last().copied().unwrap_or(0.0);
    out.json(
        "spectrum.json",
        &SpectrumReport {
            engine: spec.engine.kind.name().to_string(),
            capacity: spec.state0.capacity(),
            realizations: emp.realizations,
            resonance: spectral_coefficients(&model)?.resonance(),
            peak_empirical: emp.peak_in(0.0, hi),
            peak_analytical: an.peak_in(0.0, hi),
            omega: emp.omega,
            analytical: an.power,
            empirical: emp.power,
            std_error: emp.std_error,
        },
    )
}

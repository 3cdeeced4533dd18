use predprey::analysis::{master_equation_exact, meanfield_params, total_variation, MasterOptions};
use predprey::meanfield::{integrate, Field, SolverConfig};
use predprey::model::{Lattice, LatticeState, ModelParams};
use predprey::samplers::{run, run_realizations, EngineConfig, EngineKind, EnsembleMode, EnsembleSummary, RunSpec, Trajectory};
use proptest::prelude::*;

fn spec(state0: LatticeState, params: ModelParams, kind: EngineKind, t_final: f64, stride: f64) -> RunSpec {
    RunSpec {
        state0,
        params,
        engine: EngineConfig { kind, t_final, record_stride: Some(stride), ..Default::default() },
    }
}

fn summary(spec: &RunSpec, r: usize, seed: u64) -> EnsembleSummary {
    EnsembleSummary::from_trajectories(&run_realizations(spec, r, seed).unwrap()).unwrap()
}

/// Largest gap between two mean curves measured in units of their combined
/// standard errors.
fn max_gap_in_se(a: &EnsembleSummary, b: &EnsembleSummary) -> f64 {
    assert_eq!(a.times, b.times);
    let gap = |ma: &[f64], sa: &[f64], mb: &[f64], sb: &[f64]| {
        (0..ma.len())
            .map(|i| {
                let s = sa[i] + sb[i];
                let d = (ma[i] - mb[i]).abs();
                if s > 0.0 { d / s } else if d == 0.0 { 0.0 } else { f64::INFINITY }
            })
            .fold(0.0, f64::max)
    };
    gap(&a.mean_f, &a.se_f, &b.mean_f, &b.se_f).max(gap(&a.mean_g, &a.se_g, &b.mean_g, &b.se_g))
}

#[test]
fn direct_method_matches_master_equation() {
    let state0 = LatticeState::well_mixed(3, 1, 1).unwrap();
    let p = ModelParams::homogeneous_reference();
    let t = 5.0;
    let exact = master_equation_exact(&state0, &p, t, &MasterOptions::default()).unwrap();
    let runs = 100_000;
    let trajs = run_realizations(&spec(state0, p, EngineKind::Direct, t, t), runs, 11).unwrap();
    let mut hist = vec![0.0; exact.states.len()];
    for tr in &trajs {
        let k = tr.times.len() - 1;
        let (a, b) = ((tr.f(k, 0) * 3.0).round() as u32, (tr.g(k, 0) * 3.0).round() as u32);
        let s = LatticeState::well_mixed(3, a, b).unwrap();
        hist[exact.index_of(&s).unwrap()] += 1.0 / runs as f64;
    }
    let tv = total_variation(&hist, &exact.probs).unwrap();
    assert!(tv <= 0.02, "total variation {tv}");
}

#[test]
fn direct_method_matches_master_equation_on_two_cells() {
    let lattice = Lattice::Line { cells: 2 };
    let state0 = LatticeState::new(
        lattice,
        3,
        vec![predprey::model::Cell::new(1, 1, 1), predprey::model::Cell::new(0, 2, 1)],
    )
    .unwrap();
    let p = ModelParams { m1_r: 1.0, m2_r: 1.0, q1: 0.4, q2: 0.4, ..ModelParams::benchmark_reference() };
    let t = 1.0;
    let exact = master_equation_exact(&state0, &p, t, &MasterOptions::default()).unwrap();
    let runs = 100_000;
    let trajs = run_realizations(&spec(state0, p, EngineKind::Direct, t, t), runs, 5).unwrap();
    let mut hist = vec![0.0; exact.states.len()];
    for tr in &trajs {
        let k = tr.times.len() - 1;
        let cells = (0..2)
            .map(|l| {
                let (a, b) = ((tr.f(k, l) * 3.0).round() as u32, (tr.g(k, l) * 3.0).round() as u32);
                predprey::model::Cell::new(a, b, 3 - a - b)
            })
            .collect();
        let s = LatticeState::new(lattice, 3, cells).unwrap();
        hist[exact.index_of(&s).unwrap()] += 1.0 / runs as f64;
    }
    let tv = total_variation(&hist, &exact.probs).unwrap();
    assert!(tv <= 0.02, "total variation {tv}");
}

#[test]
fn ensemble_and_direct_means_agree() {
    let state0 = LatticeState::well_mixed(100, 20, 20).unwrap();
    let p = ModelParams::homogeneous_reference();
    let direct = summary(&spec(state0.clone(), p, EngineKind::Direct, 20.0, 1.0), 500, 1);
    for mode in [EnsembleMode::Agents, EnsembleMode::Counts] {
        let mut s = spec(state0.clone(), p, EngineKind::Ensemble, 20.0, 1.0);
        s.engine.ensemble_mode = mode;
        let ens = summary(&s, 500, 2);
        let gap = max_gap_in_se(&ens, &direct);
        assert!(gap <= 3.0, "{mode:?}: gap of {gap} standard errors");
    }
}

#[test]
fn tau_leaping_and_direct_means_agree() {
    let state0 = LatticeState::well_mixed(1000, 200, 200).unwrap();
    let p = ModelParams::benchmark_reference();
    let direct = summary(&spec(state0.clone(), p, EngineKind::Direct, 10.0, 0.5), 200, 3);
    let leap = summary(&spec(state0, p, EngineKind::TauLeaping, 10.0, 0.5), 200, 4);
    let gap = max_gap_in_se(&leap, &direct);
    assert!(gap <= 3.0, "gap of {gap} standard errors");
}

#[test]
fn lattice_engines_agree_with_direct_method() {
    let lattice = Lattice::Line { cells: 4 };
    let cells = [(10, 10), (0, 20), (20, 0), (5, 5)]
        .iter()
        .map(|&(a, b)| predprey::model::Cell::new(a, b, 50 - a - b))
        .collect();
    let state0 = LatticeState::new(lattice, 50, cells).unwrap();
    let p = ModelParams::heterogeneous_reference();
    let direct = summary(&spec(state0.clone(), p, EngineKind::Direct, 10.0, 1.0), 400, 5);
    for kind in [EngineKind::Ensemble, EngineKind::ClassicMc] {
        let other = summary(&spec(state0.clone(), p, kind, 10.0, 1.0), 400, 6);
        let gap = max_gap_in_se(&other, &direct);
        assert!(gap <= 3.0, "{kind:?}: gap of {gap} standard errors");
    }
}

#[test]
fn classic_prey_only_follows_logistic_growth() {
    let state0 = LatticeState::well_mixed(500, 0, 50).unwrap();
    let p = ModelParams { mu: 1.0, ..ModelParams::homogeneous_reference() };
    let mean = summary(&spec(state0.clone(), p, EngineKind::ClassicMc, 20.0, 1.0), 40, 7).mean_trajectory();
    let sp = meanfield_params(&p, Lattice::WellMixed).unwrap();
    let mf = integrate(&Field::from_state(&state0), &sp, &SolverConfig { t_final: 20.0, ..Default::default() }).unwrap();
    for (k, &t) in mean.times.iter().enumerate() {
        let (_, g) = mf.at(t).unwrap();
        let logistic = 1.0 / (1.0 + 9.0 * (-0.2 * t).exp());
        assert!((g[0] - logistic).abs() < 1e-6);
        assert!((mean.g(k, 0) - logistic).abs() < 0.02, "t = {t}: {} vs {logistic}", mean.g(k, 0));
        assert_eq!(mean.f(k, 0), 0.0);
    }
}

#[test]
fn single_realization_equals_direct_call() {
    let state0 = LatticeState::uniform(Lattice::Line { cells: 3 }, 40, 8, 8).unwrap();
    for kind in EngineKind::ALL {
        let s = spec(state0.clone(), ModelParams::heterogeneous_reference(), kind, 3.0, 0.5);
        let batch = run_realizations(&s, 1, 99).unwrap();
        let single = run(&s.state0, &s.params, &EngineConfig { seed: 99, ..s.engine }).unwrap();
        assert_eq!(batch[0], single, "{kind:?}");
    }
}

#[test]
fn step_counts() {
    let p = ModelParams::homogeneous_reference();
    for n in [100, 1000] {
        let state0 = LatticeState::well_mixed(n, n / 5, n / 5).unwrap();
        let ens = run(&state0, &p, &spec(state0.clone(), p, EngineKind::Ensemble, 5.0, 1.0).engine).unwrap();
        assert_eq!(ens.meta.stats.steps, 50);
        let classic = run(&state0, &p, &spec(state0.clone(), p, EngineKind::ClassicMc, 5.0, 1.0).engine).unwrap();
        assert_eq!(classic.meta.stats.steps, 50 * n as u64);
    }
}

fn assert_conserved(t: &Trajectory, nc: u32) -> Result<(), TestCaseError> {
    for (&f, &g) in t.predator.iter().zip(&t.prey) {
        let (a, b) = (f * nc as f64, g * nc as f64);
        prop_assert!((a - a.round()).abs() < 1e-9 && (b - b.round()).abs() < 1e-9);
        prop_assert!(a >= 0.0 && b >= 0.0 && a.round() + b.round() <= nc as f64);
    }
    Ok(())
}

fn engine_strategy() -> impl Strategy<Value = (EngineKind, EnsembleMode)> {
    prop_oneof![
        Just((EngineKind::Direct, EnsembleMode::Agents)),
        Just((EngineKind::ClassicMc, EnsembleMode::Agents)),
        Just((EngineKind::TauLeaping, EnsembleMode::Agents)),
        Just((EngineKind::Ensemble, EnsembleMode::Agents)),
        Just((EngineKind::Ensemble, EnsembleMode::Counts)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engines_conserve_components_and_are_deterministic(
        (kind, mode) in engine_strategy(),
        lattice in prop_oneof![
            Just(Lattice::WellMixed),
            (2usize..5).prop_map(|cells| Lattice::Line { cells }),
            Just(Lattice::Grid { nx: 2, ny: 2 }),
        ],
        nc in 20u32..60,
        fa in 0.0..0.5f64,
        fb in 0.0..0.5f64,
        seed in any::<u64>(),
    ) {
        let state0 = LatticeState::uniform(lattice, nc, (fa * nc as f64) as u32, (fb * nc as f64) as u32).unwrap();
        let params = if lattice.is_well_mixed() { ModelParams::benchmark_reference() } else { ModelParams::heterogeneous_reference() };
        let mut engine = EngineConfig { kind, seed, t_final: 2.0, record_stride: Some(0.1), ..Default::default() };
        engine.ensemble_mode = mode;
        let a = run(&state0, &params, &engine).unwrap();
        assert_conserved(&a, nc)?;
        let b = run(&state0, &params, &engine).unwrap();
        prop_assert_eq!(a, b);
    }
}

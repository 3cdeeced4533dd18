use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::analysis::metrics::{fit_loglog, LogLogFit};
use crate::error::{Error, Result};
use crate::samplers::{run, EngineKind, RunSpec, RunStats};

/// A timed run of one engine at one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub sweep_value: f64,
    pub spec: RunSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    pub engine: EngineKind,
    pub sweep_value: f64,
    /// Wall-clock seconds per repetition.
    pub times: Vec<f64>,
    pub median: f64,
    pub iqr: f64,
    /// Work counters, identical across repetitions.
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub sweep_name: String,
    pub repetitions: usize,
    pub entries: Vec<CostEntry>,
    /// Log-log fit of median time against the sweep value, per engine with
    /// at least three sweep values.
    pub exponents: Vec<(EngineKind, LogLogFit)>,
}

impl CostReport {
    pub fn exponent(&self, engine: EngineKind) -> Option<LogLogFit> {
        self.exponents.iter().find(|(e, _)| *e == engine).map(|(_, f)| *f)
    }

    pub fn median(&self, engine: EngineKind, sweep_value: f64) -> Option<f64> {
        self.entries.iter().find(|e| e.engine == engine && e.sweep_value == sweep_value).map(|e| e.median)
    }
}

/// Smallest positive difference between consecutive clock readings.
fn timer_tick() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..64 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1 == t0 {
            t1 = Instant::now();
        }
        best = best.min(t1 - t0);
    }
    best
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, w) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - w) + sorted[i + 1] * w
    } else {
        sorted[i]
    }
}

/// Times every case serially: one untimed warm-up run, then `repetitions`
/// timed runs with the case's seed.
pub fn benchmark_cost(cases: &[BenchCase], repetitions: usize, sweep_name: &str) -> Result<CostReport> {
    if repetitions < 3 {
        return Err(Error::InvalidConfig(format!("repetitions must be at least 3, got {repetitions}")));
    }
    let min_run = timer_tick() * 100;
    let mut entries = Vec::with_capacity(cases.len());
    for case in cases {
        let spec = &case.spec;
        let warm = run(&spec.state0, &spec.params, &spec.engine)?;
        let mut times = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let t0 = Instant::now();
            let traj = run(&spec.state0, &spec.params, &spec.engine)?;
            let dt = t0.elapsed();
            if dt < min_run {
                return Err(Error::Measurement(format!(
                    "{} at {} took {dt:?}, below 100 timer ticks ({min_run:?})",
                    spec.engine.kind.name(),
                    case.sweep_value
                )));
            }
            if traj.meta.stats != warm.meta.stats {
                return Err(Error::Measurement(format!(
                    "{} at {} did different work across repetitions",
                    spec.engine.kind.name(),
                    case.sweep_value
                )));
            }
            times.push(dt.as_secs_f64());
        }
        let mut sorted = times.clone();
        sorted.sort_by(f64::total_cmp);
        entries.push(CostEntry {
            engine: spec.engine.kind,
            sweep_value: case.sweep_value,
            median: quantile(&sorted, 0.5),
            iqr: quantile(&sorted, 0.75) - quantile(&sorted, 0.25),
            times,
            stats: warm.meta.stats,
        });
    }
    let mut exponents = Vec::new();
    for kind in EngineKind::ALL {
        let (x, y): (Vec<f64>, Vec<f64>) =
            entries.iter().filter(|e| e.engine == kind).map(|e| (e.sweep_value, e.median)).unzip();
        if let Ok(fit) = fit_loglog(&x, &y) {
            exponents.push((kind, fit));
        }
    }
    Ok(CostReport { sweep_name: sweep_name.to_string(), repetitions, entries, exponents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LatticeState, ModelParams};
    use crate::samplers::EngineConfig;

    #[test]
    fn quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.5), 2.5);
        assert_eq!(quantile(&s, 0.25), 1.75);
        assert_eq!(quantile(&[5.0], 0.75), 5.0);
    }

    #[test]
    fn reports_identical_work() {
        let spec = RunSpec {
            state0: LatticeState::well_mixed(200, 40, 40).unwrap(),
            params: ModelParams::default(),
            engine: EngineConfig { kind: EngineKind::Direct, t_final: 5.0, seed: 3, ..Default::default() },
        };
        let report = benchmark_cost(&[BenchCase { sweep_value: 200.0, spec }], 3, "N").unwrap();
        let e = &report.entries[0];
        assert_eq!(e.times.len(), 3);
        assert!(e.times.iter().all(|&t| t > 0.0) && e.iqr >= 0.0);
        assert!(e.stats.events > 0);
        assert!(benchmark_cost(&[], 2, "N").is_err());
    }
}

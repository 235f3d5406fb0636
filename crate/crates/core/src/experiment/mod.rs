//! Monte-Carlo sweeps comparing solvers on paired channel draws.
//!
//! Trial `t` of every swept value uses channel seed `seed + t`, so all
//! algorithms, and all swept values, see the same realizations.

mod report;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{generate_channels, ScenarioConfig};
use crate::optimizer::{Mode, Schedule, SolveResult, SolverOptions};
use crate::rate::RateObjective;
use crate::selection::{select, Selection};
pub use report::{emit_csv, emit_table, parse_csv, SweepRow};

/// Scenario parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParam {
    IBarDb,
    PMaxDb,
    Zeta,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::IBarDb => "i_bar_db",
            SweptParam::PMaxDb => "p_max_db",
            SweptParam::Zeta => "zeta",
        }
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            SweptParam::IBarDb => cfg.set_i_bar_db(value),
            SweptParam::PMaxDb => cfg.set_p_max_db(value),
            SweptParam::Zeta => cfg.set_zeta(value),
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub mode: Mode,
    pub schedule: Schedule,
    #[serde(default = "default_selection")]
    pub selection: Selection,
}

fn default_selection() -> Selection {
    Selection::All
}

impl AlgorithmSpec {
    pub fn new(mode: Mode, schedule: Schedule, selection: Selection) -> Self {
        Self {
            mode,
            schedule,
            selection,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub swept: SweptParam,
    pub values: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_oracle_grid")]
    pub oracle_grid_points: usize,
    #[serde(default)]
    pub objective: RateObjective,
    /// When false, solve times are reported as 0 so that output is
    /// reproducible byte for byte.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

fn default_trials() -> usize {
    200
}

fn default_oracle_grid() -> usize {
    21
}

fn default_true() -> bool {
    true
}

impl SweepSpec {
    pub fn new(base: ScenarioConfig, swept: SweptParam, values: Vec<f64>, algorithms: Vec<AlgorithmSpec>) -> Self {
        Self {
            base,
            swept,
            values,
            trials: default_trials(),
            seed: 0,
            algorithms,
            oracle_grid_points: default_oracle_grid(),
            objective: RateObjective::Exact,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSweep(m.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.values.is_empty() {
            return bad("no swept values");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms");
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return bad("swept values must be finite");
        }
        self.base.validate()?;
        for &v in &self.values {
            self.swept.apply(&self.base, v)?;
        }
        for a in &self.algorithms {
            self.solver_options(a).validate()?;
        }
        Ok(())
    }

    pub fn solver_options(&self, a: &AlgorithmSpec) -> SolverOptions {
        SolverOptions::new(a.mode, a.schedule)
            .with_grid_points(self.oracle_grid_points)
            .with_objective(self.objective)
    }
}

/// Outcome of one algorithm on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSample {
    pub swept_value: f64,
    pub trial: usize,
    pub algorithm: AlgorithmSpec,
    pub rate: f64,
    pub interference: f64,
    pub i_bar: f64,
    pub within_box: bool,
    pub trace_monotone: bool,
    pub solve_ms: f64,
}

impl TrialSample {
    pub fn satisfies_constraints(&self) -> bool {
        self.within_box && self.interference <= self.i_bar + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedTrial {
    pub swept_value: f64,
    pub trial: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub samples: Vec<TrialSample>,
    pub dropped: Vec<DroppedTrial>,
}

fn sample(value: f64, trial: usize, a: AlgorithmSpec, cfg: &ScenarioConfig, r: &SolveResult, ms: f64) -> TrialSample {
    TrialSample {
        swept_value: value,
        trial,
        algorithm: a,
        rate: r.rate,
        interference: r.interference,
        i_bar: r.i_bar,
        within_box: r.allocation.within_box(cfg),
        trace_monotone: r.trace_is_monotone(),
        solve_ms: ms,
    }
}

fn run_trial(spec: &SweepSpec, cfg: &ScenarioConfig, value: f64, trial: usize) -> Result<Vec<TrialSample>> {
    let ch = generate_channels(cfg, spec.seed.wrapping_add(trial as u64))?;
    spec.algorithms
        .iter()
        .map(|a| {
            let start = Instant::now();
            let r = select(&ch, cfg, a.selection, &spec.solver_options(a))?;
            let ms = if spec.record_timing {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            Ok(sample(value, trial, *a, cfg, &r, ms))
        })
        .collect()
}

/// Runs every algorithm on every (swept value, trial) pair. A trial in
/// which any algorithm fails is dropped for all algorithms and logged.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut dropped = Vec::new();
    for &value in &spec.values {
        let cfg = spec.swept.apply(&spec.base, value)?;
        let outcomes: Vec<Result<Vec<TrialSample>>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| run_trial(spec, &cfg, value, t))
            .collect();
        let mut kept = Vec::new();
        for (trial, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(s) => kept.push(s),
                Err(e) => {
                    log::warn!("{}={value} trial {trial} dropped: {e}", spec.swept.name());
                    dropped.push(DroppedTrial {
                        swept_value: value,
                        trial,
                        error: e.to_string(),
                    });
                }
            }
        }
        rows.extend(aggregate(spec, value, &kept));
        samples.extend(kept.into_iter().flatten());
    }
    Ok(SweepReport { rows, samples, dropped })
}

/// Mean and standard error of the mean; the error is 0 for one sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Relative shortfall of `rate` against `reference`, in percent.
pub fn gap_pct(reference: f64, rate: f64) -> Option<f64> {
    (reference > 0.0).then(|| 100.0 * (reference - rate) / reference)
}

fn aggregate(spec: &SweepSpec, value: f64, trials: &[Vec<TrialSample>]) -> Vec<SweepRow> {
    let stats: Vec<(f64, f64, f64)> = (0..spec.algorithms.len())
        .map(|i| {
            let rates: Vec<f64> = trials.iter().map(|t| t[i].rate).collect();
            let (mean, stderr) = mean_stderr(&rates);
            let ms = mean_stderr(&trials.iter().map(|t| t[i].solve_ms).collect::<Vec<_>>()).0;
            (mean, stderr, ms)
        })
        .collect();
    spec.algorithms
        .iter()
        .zip(&stats)
        .map(|(a, &(mean, stderr, ms))| {
            let oracle = spec.algorithms.iter().zip(&stats).find(|(o, _)| {
                o.schedule == Schedule::GridOracle && o.mode == a.mode && o.selection == a.selection
            });
            SweepRow {
                swept_name: spec.swept.name().to_string(),
                swept_value: value,
                mode: a.mode,
                schedule: a.schedule,
                selection: a.selection,
                mean_rate_bps_hz: mean,
                stderr,
                gap_pct: oracle.and_then(|(_, s)| gap_pct(s.0, mean)),
                mean_solve_ms: ms,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        assert_eq!(mean_stderr(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(gap_pct(2.0, 1.5), Some(25.0));
        assert_eq!(gap_pct(0.0, 0.0), None);
    }

    #[test]
    fn spec_json_defaults() {
        let spec: SweepSpec = serde_json::from_str(
            r#"{"base": {"relay_count": 2}, "swept": "i_bar_db", "values": [0, 10],
                "algorithms": [{"mode": "noncoherent", "schedule": "greedy1"},
                               {"mode": "coherent", "schedule": "oracle", "selection": "mrs"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.trials, 200);
        assert_eq!(spec.oracle_grid_points, 21);
        assert!(spec.record_timing);
        assert_eq!(spec.algorithms[0].selection, Selection::All);
        assert_eq!(spec.algorithms[1].schedule, Schedule::GridOracle);
        spec.validate().unwrap();
    }

    #[test]
    fn invalid_specs() {
        let cfg = ScenarioConfig::new(2).unwrap();
        let a = vec![AlgorithmSpec::new(Mode::NonCoherent, Schedule::Greedy1, Selection::All)];
        let mut spec = SweepSpec::new(cfg.clone(), SweptParam::Zeta, vec![], a.clone());
        assert!(matches!(spec.validate(), Err(Error::InvalidSweep(_))));
        spec.values = vec![-1.0];
        assert!(spec.validate().is_err());
        spec.values = vec![0.01];
        spec.trials = 0;
        assert!(spec.validate().is_err());
        assert!(SweepSpec::new(cfg, SweptParam::Zeta, vec![0.1], vec![]).validate().is_err());
    }
}

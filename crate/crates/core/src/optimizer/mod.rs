//! Rate maximization under the radar interference cap.
//!
//! The joint problem is not concave, but with all variables but one fixed
//! each restriction is well behaved, so the solvers here alternate 1-D (or
//! small-block) maximizations. In coherent mode every outer iteration first
//! re-solves the relay phase partition at the current powers.

pub mod golden;
mod landscape;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interference::{coherent_terms_at, induced_phases, PhaseAssignment, PhasePartition};
use crate::partition::best_phase_partition;
use crate::model::{ChannelRealization, LinkBudget, PowerAllocation, RelaySubset, ScenarioConfig};
use crate::rate::{rate_from_inner, RateObjective};
use landscape::Landscape;
pub use oracle::{solve_grid_oracle, ORACLE_MAX_DIMS};

/// Grid resolution of the outer variable(s) in a block update.
pub const BLOCK_GRID_POINTS: usize = 33;
/// Coarse scan preceding each golden-section search over a relay power.
pub const RELAY_SCAN_POINTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Interference adds in power at the radar.
    #[serde(rename = "noncoherent", alias = "non_coherent")]
    NonCoherent,
    /// Relays rotate their signals so that contributions partly cancel.
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// One relay power per step.
    Greedy1,
    /// Two relay powers per step.
    Greedy2,
    /// Exhaustive grid search.
    #[serde(alias = "oracle")]
    GridOracle,
}

impl Schedule {
    pub fn default_block_size(self) -> usize {
        match self {
            Schedule::Greedy2 => 2,
            _ => 1,
        }
    }
}

macro_rules! str_enum {
    ($ty:ty { $($name:literal $(| $alias:literal)* => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name $(| $alias)* => Ok($variant),)+
                    _ => Err(Error::InvalidOptions(format!("unknown {} '{s}'", stringify!($ty)))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let name = match self { $(v if *v == $variant => $name,)+ _ => unreachable!() };
                f.write_str(name)
            }
        }
    };
}

str_enum!(Mode {
    "noncoherent" | "non_coherent" => Mode::NonCoherent,
    "coherent" => Mode::Coherent,
});
str_enum!(Schedule {
    "greedy1" => Schedule::Greedy1,
    "greedy2" => Schedule::Greedy2,
    "grid_oracle" | "oracle" => Schedule::GridOracle,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub mode: Mode,
    pub schedule: Schedule,
    /// Relay powers updated jointly per step; clamped to the subset size.
    pub block_size: usize,
    pub objective: RateObjective,
    /// Relative bracket width at which each 1-D search stops.
    pub scalar_tol: f64,
    /// Outer loop stops once the objective gains less than
    /// `outer_tol * (1 + |objective|)`.
    pub outer_tol: f64,
    pub max_outer_iters: usize,
    /// Grid oracle resolution per dimension.
    pub grid_points: usize,
    /// Polish the grid oracle's best point with coordinate ascent.
    pub refine_oracle: bool,
}

impl SolverOptions {
    pub fn new(mode: Mode, schedule: Schedule) -> Self {
        Self {
            mode,
            schedule,
            block_size: schedule.default_block_size(),
            objective: RateObjective::Exact,
            scalar_tol: 1e-6,
            outer_tol: 1e-7,
            max_outer_iters: 200,
            grid_points: 41,
            refine_oracle: true,
        }
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn with_objective(mut self, objective: RateObjective) -> Self {
        self.objective = objective;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidOptions(m.into()));
        if self.block_size == 0 {
            return bad("block_size must be at least 1");
        }
        if !(self.scalar_tol > 0.0 && self.outer_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.schedule == Schedule::GridOracle && self.grid_points < 2 {
            return bad("grid_points must be at least 2");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub subset: RelaySubset,
    pub allocation: PowerAllocation,
    /// Coherent mode only.
    pub partition: Option<PhasePartition>,
    /// Coherent mode only: relay rotations realising `partition`.
    pub phases: Option<PhaseAssignment>,
    /// Exact achievable rate at `allocation`, bits/s/Hz.
    pub rate: f64,
    /// Value of the optimized objective (inner sum) at `allocation`.
    pub objective: f64,
    /// `log2(1 + objective)`; differs from `rate` when the simplified
    /// objective was optimized.
    pub objective_rate: f64,
    /// Interference at the radar under the mode's model.
    pub interference: f64,
    pub i_bar: f64,
    pub mode: Mode,
    pub schedule: Schedule,
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
}

impl SolveResult {
    pub fn satisfies_constraints(&self, cfg: &ScenarioConfig) -> bool {
        self.interference <= self.i_bar + 1e-9 && self.allocation.within_box(cfg)
    }

    pub fn trace_is_monotone(&self) -> bool {
        self.objective_trace.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Runs the solver selected by `opts.schedule` on one relay subset.
pub fn solve(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    match opts.schedule {
        Schedule::GridOracle => solve_grid_oracle(ch, cfg, subset, opts),
        _ => solve_coordinate_ascent(ch, cfg, subset, opts),
    }
}

/// Coordinate ascent from the feasibility-scaled full-power point.
pub fn solve_coordinate_ascent(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let budget = LinkBudget::new(ch, cfg, subset)?;
    let mut land = Landscape::new(&budget, opts.mode, opts.objective);
    let x0 = scaled_start(&mut land)?;
    run_from(&mut land, x0, opts)
}

/// Coordinate ascent from a caller-supplied feasible allocation.
pub fn solve_coordinate_ascent_from(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    opts: &SolverOptions,
    start: &PowerAllocation,
) -> Result<SolveResult> {
    opts.validate()?;
    let budget = LinkBudget::new(ch, cfg, subset)?;
    let mut land = Landscape::new(&budget, opts.mode, opts.objective);
    let powers = start.to_powers(subset)?;
    if !start.within_box(cfg) {
        return Err(Error::InvalidOptions("start point outside the power box".into()));
    }
    let x0 = land.coords_of(&powers);
    let (interference, anti) = land.best_interference(&x0);
    if interference > budget.i_bar {
        return Err(Error::Infeasible {
            interference,
            threshold: budget.i_bar,
        });
    }
    land.anti = anti;
    run_from(&mut land, x0, opts)
}

/// Projection of the constraint set onto one variable (0 = source, `1 + i`
/// = `i`-th relay of `subset`), in power units. Coherent mode evaluates the
/// constraint under the best phase partition at `alloc`.
pub fn feasible_interval(
    mode: Mode,
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    alloc: &PowerAllocation,
    var: usize,
) -> Result<(f64, f64)> {
    let budget = LinkBudget::new(ch, cfg, subset)?;
    if var >= budget.dims() {
        return Err(Error::InvalidOptions(format!("variable {var} out of range")));
    }
    let mut land = Landscape::new(&budget, mode, RateObjective::Exact);
    let x = land.coords_of(&alloc.to_powers(subset)?);
    land.anti = land.best_interference(&x).1;
    let (lo, hi) = land.interval_containing(&x, var)?;
    Ok(match mode {
        Mode::NonCoherent => (lo, hi),
        Mode::Coherent => (lo * lo, (hi * hi).min(budget.box_max(var))),
    })
}

/// Largest `c` in `[0, 1]` such that `c` times the full-power point meets
/// the constraint (best partition in coherent mode). Sets the partition.
fn scaled_start(land: &mut Landscape<'_>) -> Result<Vec<f64>> {
    let b = land.budget;
    let full: Vec<f64> = (0..land.dims()).map(|v| b.box_max(v)).collect();
    let at = |land: &mut Landscape<'_>, c: f64| {
        let x = land.coords_of(&full.iter().map(|p| c * p).collect::<Vec<_>>());
        let (i, anti) = land.best_interference(&x);
        (x, i, anti)
    };
    let c = match land.mode {
        Mode::NonCoherent => {
            let i_full = b.interference_noncoherent(&full);
            if i_full <= b.i_bar {
                1.0
            } else {
                // shave a few ulps so rounding cannot push us over the cap
                (b.i_bar / i_full) * (1.0 - 4.0 * f64::EPSILON)
            }
        }
        Mode::Coherent => {
            let n = landscape::SCAN_POINTS - 1;
            let mut above = None;
            let mut c = 0.0;
            for g in (0..=n).rev() {
                let t = g as f64 / n as f64;
                if at(land, t).1 <= b.i_bar {
                    c = t;
                    break;
                }
                above = Some(t);
            }
            if let Some(mut bad) = above {
                for _ in 0..60 {
                    let mid = 0.5 * (c + bad);
                    if at(land, mid).1 <= b.i_bar {
                        c = mid;
                    } else {
                        bad = mid;
                    }
                }
            }
            c
        }
    };
    let (x, i, anti) = at(land, c);
    if i > b.i_bar + 1e-9 {
        return Err(Error::NoFeasiblePoint);
    }
    land.anti = anti;
    Ok(x)
}

/// Outer coordinate-ascent loop from a feasible `x`.
pub(crate) fn run_from(land: &mut Landscape<'_>, mut x: Vec<f64>, opts: &SolverOptions) -> Result<SolveResult> {
    let n = land.budget.n();
    let block = opts.block_size.clamp(1, n.max(1));
    let relay_vars: Vec<usize> = (1..=n).collect();
    let mut f = land.objective(&x);
    let mut trace = vec![f];
    let mut iterations = 0;
    for _ in 0..opts.max_outer_iters {
        iterations += 1;
        let mut y = x.clone();
        if land.fill_objective(&mut y) > land.objective(&x) {
            x = y;
        }
        for vars in relay_vars.chunks(block) {
            update_block(land, &mut x, vars, opts);
        }
        let f_new = land.objective(&x);
        trace.push(f_new);
        let gained = f_new - f;
        f = f_new;
        if gained < opts.outer_tol * (1.0 + f.abs()) {
            break;
        }
    }
    finish(land, &x, trace, iterations, opts)
}

/// Maximizes over one relay variable, the source following at its largest
/// feasible value. Returns the objective at the updated `x`, or `-inf` when
/// no relay value admits a feasible source power.
fn update_relay(land: &mut Landscape<'_>, x: &mut [f64], var: usize, opts: &SolverOptions) -> f64 {
    let hi = land.relay_upper(x, var);
    let mut current = x.to_vec();
    let f_current = land.fill_objective(&mut current);
    let mut y = current.clone();
    let step = hi / (RELAY_SCAN_POINTS - 1) as f64;
    let mut best = (current[var], f_current);
    for g in 0..RELAY_SCAN_POINTS {
        y[var] = g as f64 * step;
        let f = land.fill_objective(&mut y);
        if f > best.1 {
            best = (y[var], f);
        }
    }
    let g = golden::maximize(
        |t| {
            y[var] = t;
            land.fill_objective(&mut y)
        },
        (best.0 - step).max(0.0),
        (best.0 + step).min(hi),
        opts.scalar_tol,
    );
    if g.fx > best.1 {
        best = (g.x, g.fx);
    }
    if best.1 > f_current {
        y.copy_from_slice(&current);
        y[var] = best.0;
        let f = land.fill_objective(&mut y);
        if f > f_current {
            x.copy_from_slice(&y);
            return f;
        }
    }
    if f_current > f64::NEG_INFINITY {
        x.copy_from_slice(&current);
    }
    f_current
}

/// Joint update of a block of relay variables: leading variables are
/// gridded, the last one is searched continuously for every grid point.
fn update_block(land: &mut Landscape<'_>, x: &mut [f64], vars: &[usize], opts: &SolverOptions) -> f64 {
    let Some((&u, rest)) = vars.split_first() else {
        return land.objective(x);
    };
    if rest.is_empty() {
        return update_relay(land, x, u, opts);
    }
    let mut best = x.to_vec();
    let mut best_f = land.fill_objective(&mut best);
    let mut y = x.to_vec();
    let f = update_block(land, &mut y, rest, opts);
    if f > best_f {
        best_f = f;
        best.copy_from_slice(&y);
    }
    let hi = land.relay_upper_alone(u);
    let steps = BLOCK_GRID_POINTS - 1;
    for g in 0..=steps {
        y.copy_from_slice(x);
        y[u] = hi * g as f64 / steps as f64;
        let f = update_block(land, &mut y, rest, opts);
        if f > best_f {
            best_f = f;
            best.copy_from_slice(&y);
        }
    }
    x.copy_from_slice(&best);
    best_f
}

fn finish(
    land: &mut Landscape<'_>,
    x: &[f64],
    trace: Vec<f64>,
    iterations: usize,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    let b = land.budget;
    let powers: Vec<f64> = land
        .to_powers(x)
        .iter()
        .enumerate()
        .map(|(v, p)| p.clamp(0.0, b.box_max(v)))
        .collect();
    let objective = b.inner_sum(&powers, opts.objective);
    let (interference, partition, phases) = match land.mode {
        Mode::NonCoherent => (b.interference_noncoherent(&powers), None, None),
        Mode::Coherent => {
            let terms = coherent_terms_at(b, &powers);
            let mut part = best_phase_partition(&terms)?;
            if part.interference > b.i_bar {
                // the tree search may stop within epsilon of the best split
                let mut mags = vec![terms.a_magnitude];
                mags.extend(&terms.b_magnitudes);
                let anti = landscape::min_residual(&mags).1;
                let (in_phase, anti_phase) = terms.relays.iter().partition(|&&k| !anti[b.subset.position(k).unwrap_or(0)]);
                part = PhasePartition::new(&terms, in_phase, anti_phase)?;
            }
            let phases = induced_phases(&terms, &part.anti_phase);
            (part.interference, Some(part), Some(phases))
        }
    };
    Ok(SolveResult {
        subset: b.subset.clone(),
        allocation: PowerAllocation::from_powers(&b.subset, &powers),
        partition,
        phases,
        rate: b.rate(&powers),
        objective,
        objective_rate: rate_from_inner(objective),
        interference,
        i_bar: b.i_bar,
        mode: opts.mode,
        schedule: opts.schedule,
        iterations,
        objective_trace: trace,
    })
}

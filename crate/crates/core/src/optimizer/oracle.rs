//! Exhaustive grid search over all power variables.
//!
//! Non-coherent grids span `[0, min(box, I_bar / coefficient)]` per power,
//! coherent grids span `[0, sqrt(box)]` per amplitude. For each relay tuple
//! the source is scanned from the top down: the objective is nondecreasing
//! in `P_S`, so the first feasible source value is the best for that tuple.

use super::landscape::Landscape;
use super::{run_from, Mode, Schedule, SolveResult, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, LinkBudget, RelaySubset, ScenarioConfig};

/// Largest number of variables (source plus relays) the oracle accepts.
pub const ORACLE_MAX_DIMS: usize = 5;

pub fn solve_grid_oracle(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let budget = LinkBudget::new(ch, cfg, subset)?;
    let dims = budget.dims();
    if dims > ORACLE_MAX_DIMS {
        return Err(Error::DimensionGuard {
            dims,
            max: ORACLE_MAX_DIMS,
        });
    }
    let mut land = Landscape::new(&budget, opts.mode, opts.objective);
    let m = opts.grid_points;
    let grids: Vec<Vec<f64>> = (0..dims)
        .map(|v| {
            let top = match opts.mode {
                Mode::NonCoherent => {
                    let coef = budget.noncoherent_coefficient(v);
                    if coef > 0.0 {
                        (budget.i_bar / coef).min(budget.box_max(v))
                    } else {
                        budget.box_max(v)
                    }
                }
                Mode::Coherent => budget.box_max(v).sqrt(),
            };
            (0..m).map(|g| top * g as f64 / (m - 1) as f64).collect()
        })
        .collect();

    let mut best_x = vec![0.0; dims];
    let mut best_f = land.objective(&best_x);
    let mut x = vec![0.0; dims];
    let mut idx = vec![0usize; dims - 1];
    let s_coef = budget.noncoherent_coefficient(0);
    loop {
        for (r, &g) in idx.iter().enumerate() {
            x[r + 1] = grids[r + 1][g];
        }
        x[0] = grids[0][m - 1];
        if land.objective(&x) > best_f {
            match opts.mode {
                Mode::NonCoherent => {
                    x[0] = 0.0;
                    let rest = land.interference(&x);
                    if rest <= budget.i_bar {
                        let g = if s_coef > 0.0 {
                            let top = (budget.i_bar - rest) / s_coef;
                            grids[0].iter().rposition(|&p| p <= top).unwrap_or(0)
                        } else {
                            m - 1
                        };
                        x[0] = grids[0][g];
                        // rounding at the boundary: step down until feasible
                        let mut g = g;
                        while !land.feasible(&x) && g > 0 {
                            g -= 1;
                            x[0] = grids[0][g];
                        }
                        let f = land.objective(&x);
                        if f > best_f && land.feasible(&x) {
                            best_f = f;
                            best_x.copy_from_slice(&x);
                        }
                    }
                }
                Mode::Coherent => {
                    for g in (0..m).rev() {
                        x[0] = grids[0][g];
                        let f = land.objective(&x);
                        if f <= best_f {
                            break;
                        }
                        if land.feasible_best(&x) {
                            best_f = f;
                            best_x.copy_from_slice(&x);
                            break;
                        }
                    }
                }
            }
        }
        if !advance(&mut idx, m) {
            break;
        }
    }

    let (_, anti) = land.best_interference(&best_x);
    land.anti = anti;
    let mut refine = opts.clone();
    refine.schedule = Schedule::Greedy1;
    refine.block_size = 1;
    if !opts.refine_oracle {
        refine.max_outer_iters = 0;
    }
    let mut result = run_from(&mut land, best_x, &refine)?;
    result.schedule = Schedule::GridOracle;
    Ok(result)
}

/// Odometer increment; false once every combination has been visited.
fn advance(idx: &mut [usize], m: usize) -> bool {
    for i in idx.iter_mut() {
        *i += 1;
        if *i < m {
            return true;
        }
        *i = 0;
    }
    false
}

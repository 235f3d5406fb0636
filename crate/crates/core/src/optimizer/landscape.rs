//! Objective and constraint of one solve, seen through the solver's
//! variables: powers in non-coherent mode, amplitudes `sqrt(P)` in coherent
//! mode. Variable 0 is the source, variable `1 + i` the `i`-th active relay.

use super::Mode;
use crate::error::{Error, Result};
use crate::interference::signed_residual;
use crate::model::LinkBudget;
use crate::rate::RateObjective;

/// Points per coordinate when scanning for feasible intervals.
pub(crate) const SCAN_POINTS: usize = 512;
const BISECT_ITERS: usize = 64;
/// Grid used to locate the largest feasible coherent source amplitude.
const SOURCE_SCAN_POINTS: usize = 64;

pub(crate) struct Landscape<'a> {
    pub budget: &'a LinkBudget,
    pub mode: Mode,
    pub objective: RateObjective,
    /// Coherent mode: relays (by subset position) currently opposing `A`.
    pub anti: Vec<bool>,
    powers: Vec<f64>,
    mags: Vec<f64>,
}

impl<'a> Landscape<'a> {
    pub fn new(budget: &'a LinkBudget, mode: Mode, objective: RateObjective) -> Self {
        Self {
            budget,
            mode,
            objective,
            anti: vec![false; budget.n()],
            powers: vec![0.0; budget.dims()],
            mags: Vec::with_capacity(budget.dims()),
        }
    }

    pub fn dims(&self) -> usize {
        self.budget.dims()
    }

    /// Upper box bound of a variable.
    pub fn upper(&self, var: usize) -> f64 {
        match self.mode {
            Mode::NonCoherent => self.budget.box_max(var),
            Mode::Coherent => self.budget.box_max(var).sqrt(),
        }
    }

    pub fn to_powers(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(v, &xi)| match self.mode {
                Mode::NonCoherent => xi,
                Mode::Coherent => (xi * xi).min(self.budget.box_max(v)),
            })
            .collect()
    }

    pub fn coords_of(&self, p: &[f64]) -> Vec<f64> {
        match self.mode {
            Mode::NonCoherent => p.to_vec(),
            Mode::Coherent => p.iter().map(|q| q.sqrt()).collect(),
        }
    }

    fn load(&mut self, x: &[f64]) {
        match self.mode {
            Mode::NonCoherent => self.powers.copy_from_slice(x),
            Mode::Coherent => {
                for (p, xi) in self.powers.iter_mut().zip(x) {
                    *p = xi * xi;
                }
            }
        }
    }

    pub fn objective(&mut self, x: &[f64]) -> f64 {
        self.load(x);
        self.budget.inner_sum(&self.powers, self.objective)
    }

    /// Interference under the current partition (coherent) or in power
    /// (non-coherent).
    pub fn interference(&mut self, x: &[f64]) -> f64 {
        self.load(x);
        match self.mode {
            Mode::NonCoherent => self.budget.interference_noncoherent(&self.powers),
            Mode::Coherent => {
                self.budget.coherent_magnitudes(&self.powers, &mut self.mags);
                let d = signed_residual(&self.mags, &self.anti);
                d * d
            }
        }
    }

    pub fn feasible(&mut self, x: &[f64]) -> bool {
        self.interference(x) <= self.budget.i_bar
    }

    /// Interference under the best partition for this point (coherent) and
    /// the anti-phase mask achieving it.
    pub fn best_interference(&mut self, x: &[f64]) -> (f64, Vec<bool>) {
        self.load(x);
        match self.mode {
            Mode::NonCoherent => (self.budget.interference_noncoherent(&self.powers), self.anti.clone()),
            Mode::Coherent => {
                self.budget.coherent_magnitudes(&self.powers, &mut self.mags);
                let (d, anti) = min_residual(&self.mags);
                (d * d, anti)
            }
        }
    }

    /// Feasibility under the best partition for this point.
    pub fn feasible_best(&mut self, x: &[f64]) -> bool {
        self.load(x);
        match self.mode {
            Mode::NonCoherent => self.budget.interference_noncoherent(&self.powers) <= self.budget.i_bar,
            Mode::Coherent => {
                self.budget.coherent_magnitudes(&self.powers, &mut self.mags);
                let d = min_residual_mask(&self.mags).0;
                d * d <= self.budget.i_bar
            }
        }
    }

    /// Moves from a feasible point `feasible_at` towards an infeasible one and
    /// returns the last feasible value of variable `var`.
    fn bisect(&mut self, y: &mut [f64], var: usize, mut feasible_at: f64, mut infeasible_at: f64) -> f64 {
        let width = 1e-14 * self.upper(var).max(f64::MIN_POSITIVE);
        for _ in 0..BISECT_ITERS {
            if (infeasible_at - feasible_at).abs() <= width {
                break;
            }
            let mid = 0.5 * (feasible_at + infeasible_at);
            y[var] = mid;
            if self.feasible(y) {
                feasible_at = mid;
            } else {
                infeasible_at = mid;
            }
        }
        feasible_at
    }

    fn bisect_best(&mut self, y: &mut [f64], var: usize, mut feasible_at: f64, mut infeasible_at: f64) -> f64 {
        for _ in 0..BISECT_ITERS {
            if (infeasible_at - feasible_at).abs() <= 1e-14 * self.upper(var) {
                break;
            }
            let mid = 0.5 * (feasible_at + infeasible_at);
            y[var] = mid;
            if self.feasible_best(y) {
                feasible_at = mid;
            } else {
                infeasible_at = mid;
            }
        }
        feasible_at
    }

    /// Largest interval of feasible values of `var` containing its current
    /// value, the other variables held fixed.
    pub fn interval_containing(&mut self, x: &[f64], var: usize) -> Result<(f64, f64)> {
        let upper = self.upper(var);
        let current = x[var];
        let i = self.interference(x);
        if i > self.budget.i_bar + 1e-9 {
            return Err(Error::Infeasible {
                interference: i,
                threshold: self.budget.i_bar,
            });
        }
        if self.mode == Mode::NonCoherent {
            return Ok((0.0, self.affine_upper(x, var).max(current)));
        }
        let mut y = x.to_vec();
        let step = upper / (SCAN_POINTS - 1) as f64;
        // upward: grid points strictly above the current value
        let mut hi = upper;
        let mut last = current;
        let mut g = (current / step).floor() as usize + 1;
        while g < SCAN_POINTS {
            let t = (g as f64 * step).min(upper);
            y[var] = t;
            if !self.feasible(&y) {
                hi = self.bisect(&mut y, var, last, t);
                break;
            }
            last = t;
            g += 1;
        }
        if g >= SCAN_POINTS {
            hi = last.max(current);
        }
        // downward
        let mut lo = 0.0;
        let mut last = current;
        let mut g = (current / step).ceil() as isize - 1;
        while g >= 0 {
            let t = g as f64 * step;
            y[var] = t;
            if !self.feasible(&y) {
                lo = self.bisect(&mut y, var, last, t);
                break;
            }
            last = t;
            g -= 1;
        }
        if g < 0 {
            lo = last.min(current);
        }
        Ok((lo, hi))
    }

    /// Sets the source variable of `y` to its largest feasible value for
    /// the relay values in `y` and returns the objective there, or `-inf`
    /// if none exists. A feasible current source value is kept unless the
    /// larger one strictly improves the objective.
    pub fn fill_objective(&mut self, y: &mut [f64]) -> f64 {
        let current = y[0];
        let current_ok = self.feasible_best(y);
        let top = self.upper(0);
        y[0] = top;
        if !self.feasible_best(y) {
            match self.mode {
                Mode::NonCoherent => {
                    y[0] = 0.0;
                    let rest = self.interference(y);
                    let coef = self.budget.noncoherent_coefficient(0);
                    if rest > self.budget.i_bar {
                        y[0] = f64::NAN;
                    } else {
                        y[0] = ((self.budget.i_bar - rest) / coef).clamp(0.0, top);
                        // rounding can leave us a few ulps over the cap
                        while y[0] > 0.0 && !self.feasible_best(y) {
                            y[0] *= 1.0 - 4.0 * f64::EPSILON;
                        }
                    }
                }
                Mode::Coherent => {
                    let step = top / (SOURCE_SCAN_POINTS - 1) as f64;
                    y[0] = f64::NAN;
                    let mut above = top;
                    for g in (0..SOURCE_SCAN_POINTS - 1).rev() {
                        let t = g as f64 * step;
                        y[0] = t;
                        if self.feasible_best(y) {
                            y[0] = self.bisect_best(y, 0, t, above);
                            break;
                        }
                        above = t;
                        y[0] = f64::NAN;
                    }
                }
            }
        }
        if y[0].is_nan() && !current_ok {
            y[0] = current;
            return f64::NEG_INFINITY;
        }
        let filled = y[0];
        let f = if !current_ok || filled > current {
            self.objective(y)
        } else {
            f64::NEG_INFINITY
        };
        if current_ok {
            y[0] = current;
            let f_current = self.objective(y);
            if f_current >= f {
                return f_current;
            }
            y[0] = filled;
        }
        f
    }

    /// Search range of a relay variable with the source switched off.
    pub fn relay_upper(&mut self, x: &[f64], var: usize) -> f64 {
        match self.mode {
            Mode::NonCoherent => {
                let mut y = x.to_vec();
                y[0] = 0.0;
                self.affine_upper(&y, var)
            }
            Mode::Coherent => self.upper(var),
        }
    }

    /// Search range of a relay variable with every other power off.
    pub fn relay_upper_alone(&self, var: usize) -> f64 {
        let coef = self.budget.noncoherent_coefficient(var);
        match self.mode {
            Mode::NonCoherent if coef > 0.0 => (self.budget.i_bar / coef).min(self.upper(var)),
            _ => self.upper(var),
        }
    }

    /// Non-coherent: largest value of `var` meeting the affine constraint.
    fn affine_upper(&mut self, x: &[f64], var: usize) -> f64 {
        let mut y = x.to_vec();
        y[var] = 0.0;
        let rest = self.interference(&y);
        let coef = self.budget.noncoherent_coefficient(var);
        let hi = if coef > 0.0 {
            (self.budget.i_bar - rest) / coef
        } else {
            f64::INFINITY
        };
        hi.clamp(0.0, self.upper(var))
    }
}

/// Smallest `|residual|` over every sign pattern with `mags[0]` fixed
/// positive, and the anti-phase mask (by relay position) achieving it.
pub(crate) fn min_residual(mags: &[f64]) -> (f64, Vec<bool>) {
    let n = mags.len() - 1;
    if n > 16 {
        // far beyond the oracle's dimension guard; fall back to the tree search
        let mut anti = vec![false; n];
        let d = crate::partition::PartitionInstance::with_default_epsilon(mags.to_vec())
            .and_then(|inst| crate::partition::solve_cga(&inst))
            .map(|sol| {
                for &i in &sol.set2 {
                    anti[i - 1] = true;
                }
                signed_residual(mags, &anti)
            })
            .unwrap_or(f64::INFINITY);
        return (d.abs(), anti);
    }
    let (best, mask) = min_residual_mask(mags);
    (best, (0..n).map(|i| mask >> i & 1 == 1).collect())
}

fn min_residual_mask(mags: &[f64]) -> (f64, u32) {
    let n = mags.len() - 1;
    if n > 16 {
        return (min_residual(mags).0, 0);
    }
    let mut best = f64::INFINITY;
    let mut best_mask = 0u32;
    for mask in 0u32..(1 << n) {
        let mut d = mags[0];
        for (i, m) in mags[1..].iter().enumerate() {
            if mask >> i & 1 == 1 {
                d -= m;
            } else {
                d += m;
            }
        }
        if d.abs() < best {
            best = d.abs();
            best_mask = mask;
        }
    }
    (best, best_mask)
}

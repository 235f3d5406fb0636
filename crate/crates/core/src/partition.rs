//! Two-way number partitioning of the coherent phasor magnitudes.
//!
//! Choosing which relays align with the aggregate term `A` and which oppose
//! it is equivalent to splitting `{|A|, |B_1|, ...}` into two sets with sums
//! as close as possible, `|A|` always on the in-phase side. The complete
//! greedy search below walks the binary assignment tree in descending value
//! order, visiting the "lower sum" branch first, so its first leaf is the
//! greedy solution and later leaves can only improve on it.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interference::{induced_phases, CoherentTerms, PhaseAssignment, PhasePartition};

/// Largest instance accepted by [`solve_bruteforce`].
pub const BRUTEFORCE_MAX: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionInstance {
    pub values: Vec<f64>,
    /// Search stops at the first partition whose difference is below this.
    pub epsilon: f64,
}

impl PartitionInstance {
    pub fn new(values: Vec<f64>, epsilon: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if !values.iter().all(|v| v.is_finite() && *v >= 0.0) || epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidValue);
        }
        Ok(Self { values, epsilon })
    }

    /// Uses `epsilon = 1e-9 * sum(values)`.
    pub fn with_default_epsilon(values: Vec<f64>) -> Result<Self> {
        let eps = 1e-9 * values.iter().sum::<f64>();
        Self::new(values, if eps.is_finite() { eps } else { 0.0 })
    }

    /// `[|A|, |B_k|...]` for the given coherent terms.
    pub fn from_terms(terms: &CoherentTerms) -> Result<Self> {
        let mut values = Vec::with_capacity(terms.relays.len() + 1);
        values.push(terms.a_magnitude);
        values.extend_from_slice(&terms.b_magnitudes);
        Self::with_default_epsilon(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// A complete partition came within epsilon.
    Perfect,
    /// Closing a subtree whose gap the remaining values cannot bridge gave a
    /// partition within epsilon.
    PruneCondition2,
    /// The whole tree was searched.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSolution {
    /// Instance indices; always holds index 0.
    pub set1: Vec<usize>,
    pub set2: Vec<usize>,
    pub difference: f64,
    pub nodes_explored: u64,
    pub terminated_by: Termination,
}

impl PartitionSolution {
    fn from_sides(values: &[f64], in_set2: &[bool], nodes: u64, terminated_by: Termination) -> Self {
        let flip = in_set2[0];
        let (mut set1, mut set2) = (Vec::new(), Vec::new());
        for (i, &s2) in in_set2.iter().enumerate() {
            if s2 != flip {
                set2.push(i);
            } else {
                set1.push(i);
            }
        }
        let sum = |s: &[usize]| s.iter().map(|&i| values[i]).sum::<f64>();
        Self {
            difference: (sum(&set1) - sum(&set2)).abs(),
            set1,
            set2,
            nodes_explored: nodes,
            terminated_by,
        }
    }
}

/// Switches for the tree search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CgaOptions {
    /// Apply the early-stop and subtree-closing rules. Turning this off
    /// searches the full tree and must not change the returned difference.
    pub prune: bool,
}

impl Default for CgaOptions {
    fn default() -> Self {
        Self { prune: true }
    }
}

/// Complete greedy partitioning with pruning.
pub fn solve_cga(instance: &PartitionInstance) -> Result<PartitionSolution> {
    solve_cga_with(instance, CgaOptions::default())
}

pub fn solve_cga_with(instance: &PartitionInstance, opts: CgaOptions) -> Result<PartitionSolution> {
    let n = instance.values.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    let order = descending_order(&instance.values);
    let sorted: Vec<f64> = order.iter().map(|&i| instance.values[i]).collect();
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + sorted[i];
    }
    let mut search = Search {
        sorted: &sorted,
        suffix,
        epsilon: instance.epsilon,
        prune: opts.prune,
        current: vec![false; n],
        best: vec![false; n],
        best_diff: f64::INFINITY,
        nodes: 0,
        stop: None,
    };
    if opts.prune {
        // Both sets are empty at the root: the two branches mirror each
        // other, so the largest value goes to set 1 only.
        search.nodes += 1;
        search.descend(1, sorted[0], 0.0);
    } else {
        search.descend(0, 0.0, 0.0);
    }

    let mut in_set2 = vec![false; n];
    for (pos, &orig) in order.iter().enumerate() {
        in_set2[orig] = search.best[pos];
    }
    let terminated_by = search.stop.unwrap_or(Termination::Exhausted);
    Ok(PartitionSolution::from_sides(
        &instance.values,
        &in_set2,
        search.nodes,
        terminated_by,
    ))
}

struct Search<'a> {
    sorted: &'a [f64],
    /// `suffix[i]` is the sum of the values not yet assigned at depth `i`.
    suffix: Vec<f64>,
    epsilon: f64,
    prune: bool,
    /// `true` means set 2, in sorted order.
    current: Vec<bool>,
    best: Vec<bool>,
    best_diff: f64,
    nodes: u64,
    stop: Option<Termination>,
}

impl Search<'_> {
    /// Explores the subtree where the first `depth` sorted values are placed
    /// and the sets sum to `s1` and `s2`.
    fn descend(&mut self, depth: usize, s1: f64, s2: f64) {
        let n = self.sorted.len();
        let d = (s1 - s2).abs();
        if depth == n {
            self.leaf(d, Termination::Perfect);
            return;
        }
        let lower_is_2 = s2 < s1;
        let remaining = self.suffix[depth];
        if self.prune && d >= remaining {
            // Nothing left can close the gap: the best completion puts every
            // remaining value on the lighter side.
            self.nodes += 1;
            self.current[depth..].fill(lower_is_2);
            self.leaf(d - remaining, Termination::PruneCondition2);
            return;
        }
        if depth == n - 1 {
            // The last value always goes to the lighter side.
            self.nodes += 1;
            self.current[depth] = lower_is_2;
            self.leaf((d - self.sorted[depth]).abs(), Termination::Perfect);
            return;
        }
        let v = self.sorted[depth];
        let symmetric = self.prune && d == 0.0;
        for to_set2 in [lower_is_2, !lower_is_2] {
            self.nodes += 1;
            self.current[depth] = to_set2;
            if to_set2 {
                self.descend(depth + 1, s1, s2 + v);
            } else {
                self.descend(depth + 1, s1 + v, s2);
            }
            if self.stop.is_some() || symmetric {
                return;
            }
        }
    }

    fn leaf(&mut self, diff: f64, kind: Termination) {
        if diff < self.best_diff {
            self.best_diff = diff;
            self.best.copy_from_slice(&self.current);
        }
        if self.prune && (diff < self.epsilon || diff == 0.0) {
            self.stop = Some(kind);
        }
    }
}

/// Indices sorted by descending value; ties keep input order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal));
    order
}

/// Largest-first greedy: each value joins the currently lighter set (set 1
/// on ties).
pub fn solve_greedy(instance: &PartitionInstance) -> Result<PartitionSolution> {
    let n = instance.values.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    let mut in_set2 = vec![false; n];
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in descending_order(&instance.values) {
        let v = instance.values[i];
        if s2 < s1 {
            s2 += v;
            in_set2[i] = true;
        } else {
            s1 += v;
        }
    }
    Ok(PartitionSolution::from_sides(
        &instance.values,
        &in_set2,
        n as u64,
        Termination::Exhausted,
    ))
}

/// Exact minimum by enumerating every split with index 0 in set 1.
pub fn solve_bruteforce(instance: &PartitionInstance) -> Result<PartitionSolution> {
    let n = instance.values.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if n > BRUTEFORCE_MAX {
        return Err(Error::TooManyValues { n, max: BRUTEFORCE_MAX });
    }
    let total: f64 = instance.values.iter().sum();
    let mut best_mask = 0u32;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << (n - 1)) {
        let s2: f64 = (0..n - 1)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| instance.values[b + 1])
            .sum();
        let d = (total - 2.0 * s2).abs();
        if d < best {
            best = d;
            best_mask = mask;
        }
    }
    let in_set2: Vec<bool> = (0..n)
        .map(|i| i > 0 && best_mask >> (i - 1) & 1 == 1)
        .collect();
    Ok(PartitionSolution::from_sides(
        &instance.values,
        &in_set2,
        1 << (n - 1),
        Termination::Exhausted,
    ))
}

fn check_against_terms(solution: &PartitionSolution, terms: &CoherentTerms) -> Result<()> {
    let n = terms.relays.len() + 1;
    let mut all: Vec<usize> = solution.set1.iter().chain(&solution.set2).copied().collect();
    all.sort_unstable();
    if all != (0..n).collect::<Vec<_>>() {
        return Err(Error::PartitionMismatch);
    }
    if !solution.set1.contains(&0) {
        return Err(Error::PseudoIndexNotInPhase);
    }
    Ok(())
}

/// Relays that end up opposing `A` (set 2 of the solution).
fn anti_phase_relays(solution: &PartitionSolution, terms: &CoherentTerms) -> Vec<usize> {
    solution.set2.iter().map(|&i| terms.relays[i - 1]).collect()
}

/// Relay phase rotations that realise a partition of `[|A|, |B_k|...]`.
pub fn partition_to_phases(solution: &PartitionSolution, terms: &CoherentTerms) -> Result<PhaseAssignment> {
    check_against_terms(solution, terms)?;
    Ok(induced_phases(terms, &anti_phase_relays(solution, terms)))
}

/// The in-phase / anti-phase relay split described by a solution.
pub fn to_phase_partition(solution: &PartitionSolution, terms: &CoherentTerms) -> Result<PhasePartition> {
    check_against_terms(solution, terms)?;
    let anti = anti_phase_relays(solution, terms);
    let in_phase = solution.set1.iter().filter(|&&i| i > 0).map(|&i| terms.relays[i - 1]).collect();
    PhasePartition::new(terms, in_phase, anti)
}

/// Solves the partition for the given terms with the complete greedy search.
pub fn best_phase_partition(terms: &CoherentTerms) -> Result<PhasePartition> {
    let solution = solve_cga(&PartitionInstance::from_terms(terms)?)?;
    to_phase_partition(&solution, terms)
}

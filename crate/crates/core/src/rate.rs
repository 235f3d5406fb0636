//! Amplify-and-forward gain and the end-to-end rate of the relay network.
//!
//! For an active relay `k` with destination SNR `a_k = P_Rk |h_RkD|^2 / s_D`
//! and relay SINR `b_k = P_S |h_SRk|^2 / (sum_j zeta_j |h_RjRk|^2 P_Rj + s_Rk)`
//! the relay contributes `a_k b_k / (1 + a_k + b_k)` and the rate is
//! `log2(1 + sum_k ...)`. The direct source-destination path is ignored.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, LinkBudget, PowerAllocation, RelaySubset, ScenarioConfig};

/// Which rate expression an optimizer maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RateObjective {
    /// Relay noise kept in the SINR denominator.
    #[default]
    Exact,
    /// Relay noise dropped, assuming self-interference dominates it.
    Simplified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    /// Contribution of each relay inside the logarithm.
    pub per_relay_sinr_term: BTreeMap<usize, f64>,
    /// Amplification gain of each relay.
    pub gain: BTreeMap<usize, f64>,
    /// Bits/s/Hz.
    pub total_rate: f64,
}

/// `a b / (1 + a + b)`, continued to `a` as `b` grows without bound.
#[inline]
pub(crate) fn relay_term(a: f64, b: f64) -> f64 {
    if b.is_infinite() {
        a
    } else {
        a * b / (1.0 + a + b)
    }
}

/// `num / den` for a non-negative SINR, with `0/0 = 0` and `x/0 = inf`.
#[inline]
fn sinr(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

pub fn rate_from_inner(x: f64) -> f64 {
    (1.0 + x).log2()
}

impl LinkBudget {
    /// `[P_S |h_SRk|^2 + sum_j zeta_j P_Rj |h_RjRk|^2 + s_Rk]^(-1/2)`.
    pub fn gain(&self, powers: &[f64], k: usize) -> Option<f64> {
        let bracket =
            powers[0] * self.sr2[k] + self.self_interference(powers, k) + self.noise_relay[k];
        (bracket > 0.0).then(|| bracket.powf(-0.5))
    }

    /// Per-relay terms of the rate for the chosen objective.
    pub fn relay_terms(&self, powers: &[f64], objective: RateObjective) -> Vec<f64> {
        (0..self.n())
            .map(|k| self.relay_term_at(powers, k, objective))
            .collect()
    }

    #[inline]
    fn relay_term_at(&self, powers: &[f64], k: usize, objective: RateObjective) -> f64 {
        let a = powers[1 + k] * self.rd2[k] / self.noise_dest;
        let mut den = self.self_interference(powers, k);
        if objective == RateObjective::Exact {
            den += self.noise_relay[k];
        }
        relay_term(a, sinr(powers[0] * self.sr2[k], den))
    }

    /// Sum of the relay terms, i.e. the argument `x` of `log2(1 + x)`.
    pub fn inner_sum(&self, powers: &[f64], objective: RateObjective) -> f64 {
        (0..self.n())
            .map(|k| self.relay_term_at(powers, k, objective))
            .sum()
    }

    /// Achievable rate in bits/s/Hz (always the exact expression).
    pub fn rate(&self, powers: &[f64]) -> f64 {
        rate_from_inner(self.inner_sum(powers, RateObjective::Exact))
    }
}

/// Amplification gain of relay `k` (a relay index, not a subset position).
pub fn amplification_gain(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    alloc: &PowerAllocation,
    k: usize,
) -> Result<f64> {
    let pos = subset.position(k).ok_or(Error::RelayNotInSubset(k))?;
    let budget = LinkBudget::new(ch, cfg, subset)?;
    let powers = alloc.to_powers(subset)?;
    budget.gain(&powers, pos).ok_or(Error::DegenerateGain(k))
}

/// Exact achievable rate with its per-relay breakdown.
pub fn achievable_rate(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    alloc: &PowerAllocation,
) -> Result<RateBreakdown> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let budget = LinkBudget::new(ch, cfg, subset)?;
    let powers = alloc.to_powers(subset)?;
    let terms = budget.relay_terms(&powers, RateObjective::Exact);
    let total: f64 = terms.iter().sum();
    let mut gain = BTreeMap::new();
    for (pos, k) in subset.iter().enumerate() {
        gain.insert(k, budget.gain(&powers, pos).ok_or(Error::DegenerateGain(k))?);
    }
    Ok(RateBreakdown {
        per_relay_sinr_term: subset.iter().zip(terms).collect(),
        gain,
        total_rate: rate_from_inner(total),
    })
}

/// Inner sum of the rate with relay noise dropped from the SINR.
///
/// Fails when some relay sees no self-interference at all, since the
/// approximation is then meaningless.
pub fn simplified_rate_objective(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    alloc: &PowerAllocation,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let budget = LinkBudget::new(ch, cfg, subset)?;
    let powers = alloc.to_powers(subset)?;
    for (pos, k) in subset.iter().enumerate() {
        if budget.self_interference(&powers, pos) <= 0.0 {
            return Err(Error::ZeroSelfInterference(k));
        }
    }
    Ok(budget.inner_sum(&powers, RateObjective::Simplified))
}

//! Relay subset selection by exhaustive enumeration.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, RelaySubset, ScenarioConfig};
use crate::optimizer::{solve, SolveResult, SolverOptions};

/// Largest relay count accepted by [`select_multi`].
pub const MAX_SELECTION_RELAYS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Every relay active, no enumeration.
    All,
    /// Best nonempty subset.
    Mrs,
    /// Best single relay.
    Srs,
}

impl FromStr for Selection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Selection::All),
            "mrs" => Ok(Selection::Mrs),
            "srs" => Ok(Selection::Srs),
            _ => Err(Error::InvalidOptions(format!("unknown selection '{s}'"))),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::All => "all",
            Selection::Mrs => "mrs",
            Selection::Srs => "srs",
        })
    }
}

/// Nonempty subsets of `0..k`, by size and then lexicographically.
pub fn enumerate_subsets(k: usize) -> Result<Vec<RelaySubset>> {
    if k > MAX_SELECTION_RELAYS {
        return Err(Error::SelectionGuard {
            relays: k,
            max: MAX_SELECTION_RELAYS,
        });
    }
    let mut masks: Vec<u32> = (1..1u32 << k).collect();
    let members = |m: u32| (0..k).filter(move |i| m >> i & 1 == 1);
    masks.sort_by_key(|&m| (m.count_ones(), members(m).collect::<Vec<_>>()));
    masks.into_iter().map(|m| RelaySubset::new(members(m).collect(), k)).collect()
}

/// Solves every candidate subset and keeps the highest rate; earlier
/// candidates win ties.
fn best_of(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    candidates: &[RelaySubset],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    let solved: Vec<SolveResult> = candidates
        .par_iter()
        .map(|s| solve(ch, cfg, s, opts))
        .collect::<Result<_>>()?;
    let mut best: Option<SolveResult> = None;
    for r in solved {
        if best.as_ref().is_none_or(|b| r.rate > b.rate + 1e-12) {
            best = Some(r);
        }
    }
    best.ok_or(Error::EmptySubset)
}

/// Multi-relay selection: best result over all nonempty relay subsets.
pub fn select_multi(ch: &ChannelRealization, cfg: &ScenarioConfig, opts: &SolverOptions) -> Result<SolveResult> {
    best_of(ch, cfg, &enumerate_subsets(cfg.relay_count)?, opts)
}

/// Single-relay selection: best result over singleton subsets.
pub fn select_single(ch: &ChannelRealization, cfg: &ScenarioConfig, opts: &SolverOptions) -> Result<SolveResult> {
    let singles = (0..cfg.relay_count)
        .map(|k| RelaySubset::single(k, cfg.relay_count))
        .collect::<Result<Vec<_>>>()?;
    best_of(ch, cfg, &singles, opts)
}

/// Dispatches on `selection`.
pub fn select(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    selection: Selection,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    match selection {
        Selection::All => solve(ch, cfg, &RelaySubset::full(cfg.relay_count)?, opts),
        Selection::Mrs => select_multi(ch, cfg, opts),
        Selection::Srs => select_single(ch, cfg, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_order() {
        let s: Vec<Vec<usize>> = enumerate_subsets(3)
            .unwrap()
            .iter()
            .map(|s| s.indices().to_vec())
            .collect();
        assert_eq!(
            s,
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
        assert_eq!(enumerate_subsets(10).unwrap().len(), 1023);
        assert!(matches!(enumerate_subsets(11), Err(Error::SelectionGuard { .. })));
    }

    #[test]
    fn parse_selection() {
        for s in [Selection::All, Selection::Mrs, Selection::Srs] {
            assert_eq!(s.to_string().parse::<Selection>().unwrap(), s);
        }
        assert!("best".parse::<Selection>().is_err());
    }
}

//! Scenario configuration, channel generation and the power/relay-set types
//! shared by every other module.

mod channel;
mod config;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use channel::{generate_channels, ChannelRealization, LinkVariances};
pub use config::{db_to_linear, linear_to_db, ScenarioConfig, Variance};

use crate::error::{Error, Result};

/// Ordered, non-empty set of active relays (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelaySubset(Vec<usize>);

impl RelaySubset {
    pub fn new(mut indices: Vec<usize>, relay_count: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateRelay(w[0]));
            }
        }
        if let Some(&index) = indices.last().filter(|&&i| i >= relay_count) {
            return Err(Error::RelayOutOfRange { index, relay_count });
        }
        Ok(Self(indices))
    }

    /// Every relay `0..relay_count`.
    pub fn full(relay_count: usize) -> Result<Self> {
        Self::new((0..relay_count).collect(), relay_count)
    }

    pub fn single(relay: usize, relay_count: usize) -> Result<Self> {
        Self::new(vec![relay], relay_count)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, relay: usize) -> bool {
        self.0.binary_search(&relay).is_ok()
    }

    /// Position of `relay` inside the subset.
    pub fn position(&self, relay: usize) -> Option<usize> {
        self.0.binary_search(&relay).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

/// Transmit powers of the source and of the active relays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub p_s: f64,
    pub p_r: BTreeMap<usize, f64>,
}

impl PowerAllocation {
    /// Same power on the source and on every relay of `subset`.
    pub fn uniform(subset: &RelaySubset, p_s: f64, p_r: f64) -> Self {
        Self {
            p_s,
            p_r: subset.iter().map(|k| (k, p_r)).collect(),
        }
    }

    /// Builds an allocation from the flat layout `[P_S, P_R(subset[0]), ...]`.
    pub fn from_powers(subset: &RelaySubset, powers: &[f64]) -> Self {
        debug_assert_eq!(powers.len(), subset.len() + 1);
        Self {
            p_s: powers[0],
            p_r: subset.iter().zip(&powers[1..]).map(|(k, &p)| (k, p)).collect(),
        }
    }

    /// Flat layout `[P_S, P_R(subset[0]), ...]`; the allocation must be
    /// defined on exactly the relays of `subset`.
    pub fn to_powers(&self, subset: &RelaySubset) -> Result<Vec<f64>> {
        if self.p_r.len() != subset.len() || !subset.iter().all(|k| self.p_r.contains_key(&k)) {
            return Err(Error::AllocationMismatch);
        }
        let mut out = Vec::with_capacity(subset.len() + 1);
        out.push(self.p_s);
        out.extend(subset.iter().map(|k| self.p_r[&k]));
        Ok(out)
    }

    pub fn within_box(&self, cfg: &ScenarioConfig) -> bool {
        (0.0..=cfg.p_s_max).contains(&self.p_s)
            && self.p_r.values().all(|p| (0.0..=cfg.p_r_max).contains(p))
    }
}

/// Channel gains and scenario constants restricted to one relay subset and
/// laid out for fast evaluation. Relay quantities are in subset order;
/// power vectors use the layout `[P_S, P_R(subset[0]), ...]`.
#[derive(Debug, Clone)]
pub struct LinkBudget {
    pub subset: RelaySubset,
    /// `|h_SR_k|^2`
    pub sr2: Vec<f64>,
    /// `|h_RkD|^2`
    pub rd2: Vec<f64>,
    /// `|h_RkP|^2`
    pub rp2: Vec<f64>,
    /// `|h_SP|^2`
    pub sp2: f64,
    pub zeta: Vec<f64>,
    /// Row-major `n x n`, entry `[j * n + k]` is `zeta_j |h_{R_j R_k}|^2`.
    pub zhat: Vec<f64>,
    pub noise_relay: Vec<f64>,
    pub noise_dest: f64,
    pub h_sr: Vec<Complex64>,
    pub h_rp: Vec<Complex64>,
    pub h_sp: Complex64,
    /// Row-major `n x n`, entry `[j * n + k]` is `h_{R_j R_k}`.
    pub h_rr: Vec<Complex64>,
    pub p_s_max: f64,
    pub p_r_max: f64,
    pub i_bar: f64,
}

impl LinkBudget {
    pub fn new(ch: &ChannelRealization, cfg: &ScenarioConfig, subset: &RelaySubset) -> Result<Self> {
        if ch.relay_count() != cfg.relay_count {
            return Err(Error::InvalidConfig(format!(
                "channel has {} relays, configuration has {}",
                ch.relay_count(),
                cfg.relay_count
            )));
        }
        if let Some(&index) = subset.indices().last().filter(|&&i| i >= cfg.relay_count) {
            return Err(Error::RelayOutOfRange {
                index,
                relay_count: cfg.relay_count,
            });
        }
        let idx = subset.indices();
        let n = idx.len();
        let pick = |v: &[Complex64]| idx.iter().map(|&k| v[k]).collect::<Vec<_>>();
        let h_sr = pick(&ch.h_sr);
        let h_rp = pick(&ch.h_rp);
        let mut h_rr = Vec::with_capacity(n * n);
        let mut zhat = Vec::with_capacity(n * n);
        for &j in idx {
            for &k in idx {
                let h = ch.rr(j, k);
                h_rr.push(h);
                zhat.push(cfg.zeta[j] * h.norm_sqr());
            }
        }
        Ok(Self {
            subset: subset.clone(),
            sr2: h_sr.iter().map(|h| h.norm_sqr()).collect(),
            rd2: idx.iter().map(|&k| ch.h_rd[k].norm_sqr()).collect(),
            rp2: h_rp.iter().map(|h| h.norm_sqr()).collect(),
            sp2: ch.h_sp.norm_sqr(),
            zeta: idx.iter().map(|&k| cfg.zeta[k]).collect(),
            zhat,
            noise_relay: idx.iter().map(|&k| cfg.noise_power_relay[k]).collect(),
            noise_dest: cfg.noise_power_dest,
            h_sr,
            h_rp,
            h_sp: ch.h_sp,
            h_rr,
            p_s_max: cfg.p_s_max,
            p_r_max: cfg.p_r_max,
            i_bar: cfg.i_bar,
        })
    }

    /// Number of active relays.
    pub fn n(&self) -> usize {
        self.sr2.len()
    }

    /// Number of optimization variables (source plus relays).
    pub fn dims(&self) -> usize {
        self.n() + 1
    }

    pub fn box_max(&self, var: usize) -> f64 {
        if var == 0 {
            self.p_s_max
        } else {
            self.p_r_max
        }
    }

    /// Residual self-interference power `sum_j zeta_j |h_{R_j R_k}|^2 P_{R_j}`
    /// seen by relay `k` (subset position).
    pub fn self_interference(&self, powers: &[f64], k: usize) -> f64 {
        let n = self.n();
        (0..n).map(|j| self.zhat[j * n + k] * powers[1 + j]).sum()
    }
}

//! Interference power delivered to the radar receiver.
//!
//! Non-coherently, contributions add in power. Coherently the source and
//! relay signals add as phasors `A + sum_k B_k exp(-j phi_k)`, where each
//! relay may rotate its contribution by `phi_k`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, LinkBudget, PowerAllocation, RelaySubset, ScenarioConfig};

/// Phasor terms of the coherent interference at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentTerms {
    /// Active relays; `b_terms` and friends are in the same order.
    pub relays: Vec<usize>,
    /// Source leakage plus relay distortion, `h_SP sqrt(P_S) + sum_k h_RkP sqrt(zeta_k P_Rk)`.
    pub a_term: Complex64,
    pub a_magnitude: f64,
    /// Phase of `a_term` in `(-pi, pi]`.
    pub a_phase: f64,
    pub b_terms: Vec<Complex64>,
    pub b_magnitudes: Vec<f64>,
    pub b_phases: Vec<f64>,
}

impl CoherentTerms {
    fn from_phasors(relays: Vec<usize>, a: Complex64, b: Vec<Complex64>) -> Self {
        let (a_magnitude, a_phase) = a.to_polar();
        let (b_magnitudes, b_phases) = b.iter().map(|z| z.to_polar()).unzip();
        Self {
            relays,
            a_term: a,
            a_magnitude,
            a_phase,
            b_terms: b,
            b_magnitudes,
            b_phases,
        }
    }

    pub fn b_term(&self, relay: usize) -> Option<Complex64> {
        self.position(relay).map(|i| self.b_terms[i])
    }

    fn position(&self, relay: usize) -> Option<usize> {
        self.relays.iter().position(|&r| r == relay)
    }

    /// Phase rotations in relay order; fails if `phases` covers other relays.
    fn aligned_phases(&self, phases: &PhaseAssignment) -> Result<Vec<f64>> {
        if phases.phi.len() != self.relays.len() {
            return Err(Error::PartitionMismatch);
        }
        self.relays
            .iter()
            .map(|k| phases.phi.get(k).copied().ok_or(Error::PartitionMismatch))
            .collect()
    }

    /// Magnitudes and rotated phases of the aligned phasors, index 0 being `A`.
    fn rotated(&self, phi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut mags = Vec::with_capacity(phi.len() + 1);
        let mut theta = Vec::with_capacity(phi.len() + 1);
        mags.push(self.a_magnitude);
        theta.push(self.a_phase);
        for (i, &p) in phi.iter().enumerate() {
            mags.push(self.b_magnitudes[i]);
            theta.push(self.b_phases[i] - p);
        }
        (mags, theta)
    }
}

/// Relay phase rotations in radians, canonicalized to `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseAssignment {
    pub phi: BTreeMap<usize, f64>,
}

impl PhaseAssignment {
    pub fn new(phi: impl IntoIterator<Item = (usize, f64)>) -> Self {
        Self {
            phi: phi.into_iter().map(|(k, p)| (k, wrap_phase(p))).collect(),
        }
    }

    /// Relay delays `phi_k / (2 pi f_s)` in seconds.
    pub fn delays(&self, sampling_frequency: f64) -> BTreeMap<usize, f64> {
        self.phi
            .iter()
            .map(|(&k, &p)| (k, p / (TAU * sampling_frequency)))
            .collect()
    }
}

/// Maps an angle onto `[0, 2 pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// In-phase / anti-phase split of the active relays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePartition {
    pub in_phase: Vec<usize>,
    pub anti_phase: Vec<usize>,
    /// `|A| + sum_in |B_k| - sum_anti |B_l|`.
    pub residual: f64,
    /// `residual^2`.
    pub interference: f64,
}

impl PhasePartition {
    /// Builds the partition and evaluates its residual against `terms`.
    pub fn new(terms: &CoherentTerms, in_phase: Vec<usize>, anti_phase: Vec<usize>) -> Result<Self> {
        let mut p = Self {
            in_phase,
            anti_phase,
            residual: 0.0,
            interference: 0.0,
        };
        p.residual = partition_residual(terms, &p)?;
        p.interference = p.residual * p.residual;
        Ok(p)
    }

    pub fn covers(&self, relays: &[usize]) -> bool {
        let mut all: Vec<usize> = self.in_phase.iter().chain(&self.anti_phase).copied().collect();
        all.sort_unstable();
        let mut want = relays.to_vec();
        want.sort_unstable();
        all == want
    }

    /// `true` per subset position when the relay is on the anti-phase side.
    pub fn anti_mask(&self, relays: &[usize]) -> Vec<bool> {
        relays.iter().map(|k| self.anti_phase.contains(k)).collect()
    }
}

impl LinkBudget {
    /// Non-coherent interference in its closed, affine form.
    pub fn interference_noncoherent(&self, powers: &[f64]) -> f64 {
        self.sp2 * powers[0]
            + (0..self.n())
                .map(|k| self.rp2[k] * powers[1 + k] * (1.0 + self.zeta[k]))
                .sum::<f64>()
    }

    /// Coefficient of variable `var` in the affine non-coherent interference.
    pub fn noncoherent_coefficient(&self, var: usize) -> f64 {
        if var == 0 {
            self.sp2
        } else {
            self.rp2[var - 1] * (1.0 + self.zeta[var - 1])
        }
    }

    /// Writes `|A|` and every `|B_k|` into `out` (index 0 is `|A|`) without
    /// building the phasors.
    pub fn coherent_magnitudes(&self, powers: &[f64], out: &mut Vec<f64>) {
        let n = self.n();
        let sqrt_ps = powers[0].sqrt();
        let distortion = |i: usize| (self.zeta[i] * powers[1 + i]).sqrt();
        out.clear();
        let mut a = self.h_sp * sqrt_ps;
        for k in 0..n {
            a += self.h_rp[k] * distortion(k);
        }
        out.push(a.norm());
        for k in 0..n {
            let noise = (self.noise_relay[k] * 0.5).sqrt();
            let mut bracket = self.h_sr[k] * sqrt_ps + Complex64::new(noise, noise);
            let mut received = powers[0] * self.sr2[k] + self.noise_relay[k];
            for i in 0..n {
                bracket += self.h_rr[i * n + k] * distortion(i);
                received += self.zhat[i * n + k] * powers[1 + i];
            }
            out.push(if received > 0.0 {
                bracket.norm() * (self.rp2[k] * powers[1 + k] / received).sqrt()
            } else {
                0.0
            });
        }
    }

    /// `A` and the `B_k` at the given powers.
    pub fn coherent_phasors(&self, powers: &[f64]) -> (Complex64, Vec<Complex64>) {
        let n = self.n();
        let sqrt_ps = powers[0].sqrt();
        let distortion: Vec<f64> = (0..n).map(|k| (self.zeta[k] * powers[1 + k]).sqrt()).collect();
        let mut a = self.h_sp * sqrt_ps;
        for (h, d) in self.h_rp.iter().zip(&distortion) {
            a += h * d;
        }
        let b = (0..n)
            .map(|k| {
                let mut bracket = self.h_sr[k] * sqrt_ps
                    + Complex64::new(1.0, 1.0) * (self.noise_relay[k].sqrt() * FRAC_1_SQRT_2);
                for (i, d) in distortion.iter().enumerate() {
                    bracket += self.h_rr[i * n + k] * d;
                }
                match self.gain(powers, k) {
                    Some(g) => bracket * self.h_rp[k] * (g * powers[1 + k].sqrt()),
                    // no received power means nothing to forward
                    None => Complex64::new(0.0, 0.0),
                }
            })
            .collect();
        (a, b)
    }
}

/// Non-coherent interference written out term by term, with the amplified
/// relay signal scaled by its gain.
pub fn interference_noncoherent_full(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    alloc: &PowerAllocation,
) -> Result<f64> {
    let budget = LinkBudget::new(ch, cfg, subset)?;
    let p = alloc.to_powers(subset)?;
    let mut total = budget.sp2 * p[0];
    for k in 0..budget.n() {
        total += budget.rp2[k] * budget.zeta[k] * p[1 + k];
        let bracket = budget.sr2[k] * p[0] + budget.self_interference(&p, k) + budget.noise_relay[k];
        if let Some(g) = budget.gain(&p, k) {
            total += g * g * budget.rp2[k] * p[1 + k] * bracket;
        }
    }
    Ok(total)
}

/// Non-coherent interference `|h_SP|^2 P_S + sum_k |h_RkP|^2 P_Rk (1 + zeta_k)`.
pub fn interference_noncoherent_simplified(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    alloc: &PowerAllocation,
) -> Result<f64> {
    let budget = LinkBudget::new(ch, cfg, subset)?;
    Ok(budget.interference_noncoherent(&alloc.to_powers(subset)?))
}

pub fn coherent_terms(
    ch: &ChannelRealization,
    cfg: &ScenarioConfig,
    subset: &RelaySubset,
    alloc: &PowerAllocation,
) -> Result<CoherentTerms> {
    let budget = LinkBudget::new(ch, cfg, subset)?;
    Ok(coherent_terms_at(&budget, &alloc.to_powers(subset)?))
}

pub fn coherent_terms_at(budget: &LinkBudget, powers: &[f64]) -> CoherentTerms {
    let (a, b) = budget.coherent_phasors(powers);
    CoherentTerms::from_phasors(budget.subset.indices().to_vec(), a, b)
}

/// `|A + sum_k B_k exp(-j phi_k)|^2`.
pub fn interference_coherent(terms: &CoherentTerms, phases: &PhaseAssignment) -> Result<f64> {
    let phi = terms.aligned_phases(phases)?;
    let sum = terms
        .b_terms
        .iter()
        .zip(&phi)
        .fold(terms.a_term, |acc, (b, &p)| acc + b * Complex64::from_polar(1.0, -p));
    Ok(sum.norm_sqr())
}

/// Same quantity as [`interference_coherent`], expanded into squared
/// magnitudes plus pairwise cosine cross terms (each pair counted once).
pub fn interference_coherent_expanded(terms: &CoherentTerms, phases: &PhaseAssignment) -> Result<f64> {
    let (mags, theta) = terms.rotated(&terms.aligned_phases(phases)?);
    let mut total: f64 = mags.iter().map(|m| m * m).sum();
    for k in 0..mags.len() {
        for i in (k + 1)..mags.len() {
            total += 2.0 * mags[k] * mags[i] * (theta[k] - theta[i]).cos();
        }
    }
    Ok(total)
}

/// Partial derivatives of the coherent interference with respect to each
/// relay phase.
pub fn phase_gradient(terms: &CoherentTerms, phases: &PhaseAssignment) -> Result<BTreeMap<usize, f64>> {
    let (mags, theta) = terms.rotated(&terms.aligned_phases(phases)?);
    Ok(terms
        .relays
        .iter()
        .enumerate()
        .map(|(pos, &k)| {
            let m = pos + 1;
            let d: f64 = (0..mags.len())
                .filter(|&i| i != m)
                .map(|i| mags[m] * mags[i] * (theta[m] - theta[i]).sin())
                .sum();
            (k, 2.0 * d)
        })
        .collect())
}

/// Diagonal of the Hessian of the coherent interference in the relay phases.
pub fn phase_hessian_diag(terms: &CoherentTerms, phases: &PhaseAssignment) -> Result<BTreeMap<usize, f64>> {
    let (mags, theta) = terms.rotated(&terms.aligned_phases(phases)?);
    Ok(terms
        .relays
        .iter()
        .enumerate()
        .map(|(pos, &k)| {
            let m = pos + 1;
            let d: f64 = (0..mags.len())
                .filter(|&i| i != m)
                .map(|i| mags[m] * mags[i] * (theta[m] - theta[i]).cos())
                .sum();
            (k, -2.0 * d)
        })
        .collect())
}

fn partition_residual(terms: &CoherentTerms, partition: &PhasePartition) -> Result<f64> {
    if !partition.covers(&terms.relays) {
        return Err(Error::PartitionMismatch);
    }
    let mut d = terms.a_magnitude;
    for (pos, k) in terms.relays.iter().enumerate() {
        if partition.anti_phase.contains(k) {
            d -= terms.b_magnitudes[pos];
        } else {
            d += terms.b_magnitudes[pos];
        }
    }
    Ok(d)
}

/// Coherent interference when in-phase relays align with `A` and anti-phase
/// relays oppose it: `(|A| + sum_in |B_k| - sum_anti |B_l|)^2`.
pub fn interference_coherent_partition(terms: &CoherentTerms, partition: &PhasePartition) -> Result<f64> {
    let d = partition_residual(terms, partition)?;
    Ok(d * d)
}

/// Residual `|A| + sum_in |B| - sum_anti |B|` from precomputed magnitudes
/// (`mags[0] = |A|`), with `anti` flagging anti-phase relays by position.
#[inline]
pub(crate) fn signed_residual(mags: &[f64], anti: &[bool]) -> f64 {
    mags[1..]
        .iter()
        .zip(anti)
        .fold(mags[0], |d, (&m, &a)| if a { d - m } else { d + m })
}

/// Phase rotations that realise a partition: in-phase relays are turned onto
/// the phase of `A`, anti-phase relays onto the opposite direction.
pub(crate) fn induced_phases(terms: &CoherentTerms, anti_phase: &[usize]) -> PhaseAssignment {
    PhaseAssignment::new(terms.relays.iter().enumerate().map(|(pos, &k)| {
        let base = terms.b_phases[pos] - terms.a_phase;
        let phi = if anti_phase.contains(&k) { base + PI } else { base };
        (k, phi)
    }))
}

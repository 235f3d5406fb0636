//! Shared fixtures and straight-line reference formulas for the
//! integration tests. The references read raw channel coefficients and never
//! call into the library's evaluation code.
#![allow(dead_code)]

use fdcr_core::model::{generate_channels, ChannelRealization, PowerAllocation, RelaySubset, ScenarioConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub ch: ChannelRealization,
    pub cfg: ScenarioConfig,
    pub subset: RelaySubset,
    pub alloc: PowerAllocation,
}

/// Random scenario with 1 to `max_k` relays, a random active subset, random
/// per-relay zeta and noise, and powers inside the box.
pub fn random_instance(seed: u64, max_k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let k = rng.gen_range(1..=max_k);
    let mut cfg = ScenarioConfig::new(k).unwrap();
    cfg.zeta = (0..k).map(|_| rng.gen_range(0.0..0.5)).collect();
    cfg.noise_power_relay = (0..k).map(|_| rng.gen_range(0.2..2.0)).collect();
    cfg.noise_power_dest = rng.gen_range(0.2..2.0);
    cfg.set_p_max_db(20.0);
    let ch = generate_channels(&cfg, seed).unwrap();
    let mut members: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.7)).collect();
    if members.is_empty() {
        members.push(rng.gen_range(0..k));
    }
    let subset = RelaySubset::new(members, k).unwrap();
    let p_s = rng.gen_range(0.0..cfg.p_s_max);
    let alloc = PowerAllocation {
        p_s,
        p_r: subset.iter().map(|r| (r, rng.gen_range(0.0..cfg.p_r_max))).collect(),
    };
    Instance { ch, cfg, subset, alloc }
}

fn rr(ch: &ChannelRealization, from: usize, to: usize) -> Complex64 {
    ch.h_rr[from * ch.h_sr.len() + to]
}

/// Self-interference power seen by relay `k`: sum over active `j` of
/// `zeta_j |h_RjRk|^2 P_Rj`.
pub fn ref_self_interference(inst: &Instance, k: usize) -> f64 {
    let mut s = 0.0;
    for j in inst.subset.iter() {
        s += inst.cfg.zeta[j] * rr(&inst.ch, j, k).norm_sqr() * inst.alloc.p_r[&j];
    }
    s
}

pub fn ref_gain(inst: &Instance, k: usize) -> f64 {
    let bracket = inst.alloc.p_s * inst.ch.h_sr[k].norm_sqr()
        + ref_self_interference(inst, k)
        + inst.cfg.noise_power_relay[k];
    1.0 / bracket.sqrt()
}

/// `log2(1 + sum_k a b / (1 + a + b))` written out directly.
pub fn ref_rate(inst: &Instance) -> f64 {
    let mut sum = 0.0;
    for k in inst.subset.iter() {
        let a = inst.alloc.p_r[&k] * inst.ch.h_rd[k].norm_sqr() / inst.cfg.noise_power_dest;
        let b = inst.alloc.p_s * inst.ch.h_sr[k].norm_sqr()
            / (ref_self_interference(inst, k) + inst.cfg.noise_power_relay[k]);
        sum += a * b / (1.0 + a + b);
    }
    (1.0 + sum).log2()
}

/// Non-coherent interference with the gain kept explicit.
pub fn ref_noncoherent_full(inst: &Instance) -> f64 {
    let mut total = inst.ch.h_sp.norm_sqr() * inst.alloc.p_s;
    for k in inst.subset.iter() {
        let rp = inst.ch.h_rp[k].norm_sqr();
        let pr = inst.alloc.p_r[&k];
        let g = ref_gain(inst, k);
        total += rp * inst.cfg.zeta[k] * pr;
        total += g * g
            * rp
            * pr
            * (inst.ch.h_sr[k].norm_sqr() * inst.alloc.p_s
                + ref_self_interference(inst, k)
                + inst.cfg.noise_power_relay[k]);
    }
    total
}

/// `A` and the `B_k` phasors, in subset order.
pub fn ref_phasors(inst: &Instance) -> (Complex64, Vec<Complex64>) {
    let ps = inst.alloc.p_s.sqrt();
    let mut a = inst.ch.h_sp * ps;
    for k in inst.subset.iter() {
        a += inst.ch.h_rp[k] * (inst.cfg.zeta[k] * inst.alloc.p_r[&k]).sqrt();
    }
    let unit = Complex64::new(1.0, 1.0) / 2f64.sqrt();
    let b = inst
        .subset
        .iter()
        .map(|k| {
            let mut inner = inst.ch.h_sr[k] * ps + unit * inst.cfg.noise_power_relay[k].sqrt();
            for i in inst.subset.iter() {
                inner += rr(&inst.ch, i, k) * (inst.cfg.zeta[i] * inst.alloc.p_r[&i]).sqrt();
            }
            inner * ref_gain(inst, k) * inst.ch.h_rp[k] * inst.alloc.p_r[&k].sqrt()
        })
        .collect();
    (a, b)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

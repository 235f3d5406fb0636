use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::error::Result;

/// Per-link variances actually used for one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkVariances {
    pub sr: Vec<f64>,
    pub rd: Vec<f64>,
    pub rp: Vec<f64>,
    pub sd: f64,
    pub sp: f64,
    /// Row-major `K x K`, entry `[j * K + k]` is the variance of `R_j -> R_k`.
    pub rr: Vec<f64>,
}

/// One draw of every channel coefficient in the network.
///
/// Relays are indexed `0..K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub h_sr: Vec<Complex64>,
    pub h_rd: Vec<Complex64>,
    pub h_sd: Complex64,
    pub h_rp: Vec<Complex64>,
    pub h_sp: Complex64,
    /// Row-major `K x K`, entry `[j * K + k]` is `R_j -> R_k`; the diagonal
    /// holds the residual self-loop of each relay.
    pub h_rr: Vec<Complex64>,
    pub variances: LinkVariances,
}

impl ChannelRealization {
    pub fn relay_count(&self) -> usize {
        self.h_sr.len()
    }

    /// Channel from relay `from` into relay `to`.
    pub fn rr(&self, from: usize, to: usize) -> Complex64 {
        self.h_rr[from * self.relay_count() + to]
    }

    pub fn is_consistent(&self) -> bool {
        let k = self.relay_count();
        let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        self.h_rd.len() == k
            && self.h_rp.len() == k
            && self.h_rr.len() == k * k
            && self
                .h_sr
                .iter()
                .chain(&self.h_rd)
                .chain(&self.h_rp)
                .chain(&self.h_rr)
                .chain([&self.h_sd, &self.h_sp])
                .all(finite)
    }
}

/// Circularly-symmetric complex Gaussian with the given variance.
fn cn<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (variance / 2.0).sqrt()
}

/// Draws a Rayleigh-faded realization of every link.
///
/// The random stream layout depends only on the relay count: link variances
/// are drawn first (one uniform per link, used when the configured variance
/// is an interval), then two normals per coefficient. Realizations for the
/// same seed therefore stay paired when powers, thresholds or `zeta` change.
pub fn generate_channels(cfg: &ScenarioConfig, seed: u64) -> Result<ChannelRealization> {
    cfg.validate()?;
    let k = cfg.relay_count;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut draw = |v: &super::Variance| v.sample(rng.gen::<f64>());
    let mut sr = Vec::with_capacity(k);
    let mut rd = Vec::with_capacity(k);
    let mut rp = Vec::with_capacity(k);
    for _ in 0..k {
        sr.push(draw(&cfg.var_sr));
        rd.push(draw(&cfg.var_rd));
        rp.push(draw(&cfg.var_rp));
    }
    let sd = draw(&cfg.var_sd);
    let sp = draw(&cfg.var_sp);
    let rr: Vec<f64> = (0..k * k).map(|_| draw(&cfg.var_rr)).collect();
    let variances = LinkVariances { sr, rd, rp, sd, sp, rr };

    let mut h_sr = Vec::with_capacity(k);
    let mut h_rd = Vec::with_capacity(k);
    let mut h_rp = Vec::with_capacity(k);
    for i in 0..k {
        h_sr.push(cn(&mut rng, variances.sr[i]));
        h_rd.push(cn(&mut rng, variances.rd[i]));
        h_rp.push(cn(&mut rng, variances.rp[i]));
    }
    let h_sd = cn(&mut rng, variances.sd);
    let h_sp = cn(&mut rng, variances.sp);
    let h_rr = variances.rr.iter().map(|&v| cn(&mut rng, v)).collect();

    Ok(ChannelRealization {
        h_sr,
        h_rd,
        h_sd,
        h_rp,
        h_sp,
        h_rr,
        variances,
    })
}

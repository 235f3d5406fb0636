use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a power ratio in decibels to linear scale.
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Converts a positive linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(10.0 * x.log10())
    } else {
        Err(Error::NonPositiveLinear(x))
    }
}

/// Variance of a Rayleigh link: either a fixed value or an interval from
/// which one value is drawn per link and per channel realization.
///
/// In JSON a fixed variance is a number and an interval is `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Variance {
    Fixed(f64),
    Uniform(f64, f64),
}

impl Variance {
    /// Maps a uniform draw `u` in `[0, 1)` onto the variance.
    pub fn sample(&self, u: f64) -> f64 {
        match *self {
            Variance::Fixed(v) => v,
            Variance::Uniform(lo, hi) => lo + (hi - lo) * u,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Variance::Fixed(v) => (v, v),
            Variance::Uniform(lo, hi) => (lo, hi),
        }
    }

    fn check(&self, name: &str) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo) {
            return Err(Error::InvalidConfig(format!(
                "{name} must be a non-negative variance or interval, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Static description of one network scenario. All quantities are linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile")]
pub struct ScenarioConfig {
    pub relay_count: usize,
    /// Noise power at each relay receiver.
    pub noise_power_relay: Vec<f64>,
    pub noise_power_dest: f64,
    pub noise_power_pu: f64,
    pub var_sr: Variance,
    pub var_rd: Variance,
    pub var_sd: Variance,
    pub var_rr: Variance,
    pub var_sp: Variance,
    pub var_rp: Variance,
    /// Self-interference quality of each relay.
    pub zeta: Vec<f64>,
    pub p_s_max: f64,
    pub p_r_max: f64,
    /// Interference threshold at the radar receiver.
    pub i_bar: f64,
    /// Only used to convert relay phases into delays.
    pub sampling_frequency: f64,
}

impl ScenarioConfig {
    /// Default scenario for `relay_count` relays: unit noise everywhere,
    /// unit-variance source and destination links, a weak direct link,
    /// relay-relay variances in `[0.5, 1]` and radar-link variances in
    /// `[0.8, 1]`, `zeta = 0.01`, 20 dB power caps and a 0 dB threshold.
    pub fn new(relay_count: usize) -> Result<Self> {
        let cfg = Self {
            relay_count,
            noise_power_relay: vec![1.0; relay_count],
            noise_power_dest: 1.0,
            noise_power_pu: 1.0,
            var_sr: Variance::Fixed(1.0),
            var_rd: Variance::Fixed(1.0),
            var_sd: Variance::Fixed(0.1),
            var_rr: Variance::Uniform(0.5, 1.0),
            var_sp: Variance::Uniform(0.8, 1.0),
            var_rp: Variance::Uniform(0.8, 1.0),
            zeta: vec![0.01; relay_count],
            p_s_max: db_to_linear(20.0),
            p_r_max: db_to_linear(20.0),
            i_bar: 1.0,
            sampling_frequency: 1.0e6,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.relay_count == 0 {
            return bad("relay_count must be positive".into());
        }
        if self.noise_power_relay.len() != self.relay_count {
            return bad(format!(
                "noise_power_relay has {} entries for {} relays",
                self.noise_power_relay.len(),
                self.relay_count
            ));
        }
        if self.zeta.len() != self.relay_count {
            return bad(format!(
                "zeta has {} entries for {} relays",
                self.zeta.len(),
                self.relay_count
            ));
        }
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !self.noise_power_relay.iter().all(|&x| nonneg(x)) {
            return bad("noise_power_relay entries must be finite and non-negative".into());
        }
        if !self.zeta.iter().all(|&x| nonneg(x)) {
            return bad("zeta entries must be finite and non-negative".into());
        }
        for (name, x) in [
            ("noise_power_dest", self.noise_power_dest),
            ("noise_power_pu", self.noise_power_pu),
            ("p_s_max", self.p_s_max),
            ("p_r_max", self.p_r_max),
            ("i_bar", self.i_bar),
            ("sampling_frequency", self.sampling_frequency),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return bad(format!("{name} must be finite and positive, got {x}"));
            }
        }
        for (name, v) in [
            ("var_sr", self.var_sr),
            ("var_rd", self.var_rd),
            ("var_sd", self.var_sd),
            ("var_rr", self.var_rr),
            ("var_sp", self.var_sp),
            ("var_rp", self.var_rp),
        ] {
            v.check(name)?;
        }
        Ok(())
    }

    /// Sets the same self-interference quality on every relay.
    pub fn set_zeta(&mut self, zeta: f64) {
        self.zeta = vec![zeta; self.relay_count];
    }

    /// Sets both power caps from a dB value.
    pub fn set_p_max_db(&mut self, p_max_db: f64) {
        self.p_s_max = db_to_linear(p_max_db);
        self.p_r_max = self.p_s_max;
    }

    pub fn set_i_bar_db(&mut self, i_bar_db: f64) {
        self.i_bar = db_to_linear(i_bar_db);
    }

    /// Changes the relay count, resizing the per-relay vectors. New relays
    /// copy the settings of relay 0.
    pub fn set_relay_count(&mut self, relay_count: usize) {
        let noise = self.noise_power_relay.first().copied().unwrap_or(1.0);
        let zeta = self.zeta.first().copied().unwrap_or(0.0);
        self.noise_power_relay.resize(relay_count, noise);
        self.zeta.resize(relay_count, zeta);
        self.relay_count = relay_count;
    }

    /// Relay delay that realises a phase rotation, `phi / (2 pi f_s)`.
    pub fn phase_to_delay(&self, phi: f64) -> f64 {
        phi / (2.0 * std::f64::consts::PI * self.sampling_frequency)
    }
}

/// A number for every relay, or a list with one entry per relay.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PerRelay {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerRelay {
    fn expand(self, relay_count: usize) -> Vec<f64> {
        match self {
            PerRelay::Scalar(x) => vec![x; relay_count],
            PerRelay::List(v) => v,
        }
    }
}

/// On-disk form of [`ScenarioConfig`]. Every field is optional and falls
/// back to the defaults of [`ScenarioConfig::new`]; power caps and the
/// threshold may be given linearly or with a `_db` suffix.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    relay_count: usize,
    noise_power_relay: Option<PerRelay>,
    noise_power_dest: Option<f64>,
    noise_power_pu: Option<f64>,
    var_sr: Option<Variance>,
    var_rd: Option<Variance>,
    var_sd: Option<Variance>,
    var_rr: Option<Variance>,
    var_sp: Option<Variance>,
    var_rp: Option<Variance>,
    zeta: Option<PerRelay>,
    p_s_max: Option<f64>,
    p_s_max_db: Option<f64>,
    p_r_max: Option<f64>,
    p_r_max_db: Option<f64>,
    p_max_db: Option<f64>,
    i_bar: Option<f64>,
    i_bar_db: Option<f64>,
    sampling_frequency: Option<f64>,
}

fn pick(name: &str, linear: Option<f64>, db: Option<f64>) -> Result<Option<f64>> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(Error::InvalidConfig(format!(
            "both {name} and {name}_db are set"
        ))),
        (Some(x), None) => Ok(Some(x)),
        (None, Some(d)) => Ok(Some(db_to_linear(d))),
        (None, None) => Ok(None),
    }
}

impl TryFrom<ScenarioFile> for ScenarioConfig {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        let k = f.relay_count;
        let mut cfg = ScenarioConfig::new(k.max(1))?;
        cfg.relay_count = k;
        cfg.noise_power_relay = f
            .noise_power_relay
            .map_or_else(|| vec![1.0; k], |v| v.expand(k));
        cfg.zeta = f.zeta.map_or_else(|| vec![0.01; k], |v| v.expand(k));
        if let Some(x) = f.noise_power_dest {
            cfg.noise_power_dest = x;
        }
        if let Some(x) = f.noise_power_pu {
            cfg.noise_power_pu = x;
        }
        for (slot, v) in [
            (&mut cfg.var_sr, f.var_sr),
            (&mut cfg.var_rd, f.var_rd),
            (&mut cfg.var_sd, f.var_sd),
            (&mut cfg.var_rr, f.var_rr),
            (&mut cfg.var_sp, f.var_sp),
            (&mut cfg.var_rp, f.var_rp),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(d) = f.p_max_db {
            cfg.set_p_max_db(d);
        }
        if let Some(x) = pick("p_s_max", f.p_s_max, f.p_s_max_db)? {
            cfg.p_s_max = x;
        }
        if let Some(x) = pick("p_r_max", f.p_r_max, f.p_r_max_db)? {
            cfg.p_r_max = x;
        }
        if let Some(x) = pick("i_bar", f.i_bar, f.i_bar_db)? {
            cfg.i_bar = x;
        }
        if let Some(x) = f.sampling_frequency {
            cfg.sampling_frequency = x;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

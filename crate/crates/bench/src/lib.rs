//! Fixtures shared by the benchmarks in `benches/`.

use fdcr_core::ScenarioConfig;

/// `k` relays, zeta 0.01, both power caps at 20 dB, default cap at the radar.
pub fn scenario(k: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(k).expect("valid relay count");
    cfg.set_zeta(0.01);
    cfg.set_p_max_db(20.0);
    cfg
}

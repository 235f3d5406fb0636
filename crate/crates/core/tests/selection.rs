use fdcr_core::model::{generate_channels, RelaySubset, ScenarioConfig};
use fdcr_core::optimizer::{solve, Mode, Schedule, SolverOptions};
use fdcr_core::selection::*;
use num_complex::Complex64;

fn scenario(k: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(k).unwrap();
    cfg.set_zeta(0.01);
    cfg.set_p_max_db(20.0);
    cfg.set_i_bar_db(4.0);
    cfg
}

#[test]
fn one_relay_all_strategies_agree() {
    let cfg = scenario(1);
    let s = RelaySubset::full(1).unwrap();
    for seed in 0..10 {
        let ch = generate_channels(&cfg, seed).unwrap();
        for mode in [Mode::NonCoherent, Mode::Coherent] {
            let o = SolverOptions::new(mode, Schedule::Greedy1);
            let direct = solve(&ch, &cfg, &s, &o).unwrap();
            assert_eq!(select_multi(&ch, &cfg, &o).unwrap(), direct);
            assert_eq!(select_single(&ch, &cfg, &o).unwrap(), direct);
        }
    }
}

#[test]
fn dead_relay_adds_nothing() {
    let cfg = scenario(2);
    for seed in 0..10 {
        let mut ch = generate_channels(&cfg, seed).unwrap();
        ch.h_sr[1] = Complex64::new(0.0, 0.0);
        ch.h_rd[1] = Complex64::new(0.0, 0.0);
        let o = SolverOptions::new(Mode::NonCoherent, Schedule::Greedy1);
        let only_first = solve(&ch, &cfg, &RelaySubset::single(0, 2).unwrap(), &o).unwrap();
        let best = select_multi(&ch, &cfg, &o).unwrap();
        assert!((best.rate - only_first.rate).abs() <= 1e-9 * only_first.rate.max(1.0));
        assert_eq!(best.subset.indices(), &[0]);
    }
}

#[test]
fn multi_is_best_subset_and_beats_single() {
    let cfg = scenario(3);
    for seed in 0..10 {
        let ch = generate_channels(&cfg, seed).unwrap();
        for mode in [Mode::NonCoherent, Mode::Coherent] {
            let o = SolverOptions::new(mode, Schedule::Greedy1);
            let best = select_multi(&ch, &cfg, &o).unwrap();
            let explicit = enumerate_subsets(3)
                .unwrap()
                .iter()
                .map(|s| solve(&ch, &cfg, s, &o).unwrap().rate)
                .fold(0.0, f64::max);
            assert!(best.rate <= explicit && best.rate >= explicit - 1e-12);
            let single = select_single(&ch, &cfg, &o).unwrap();
            assert!(best.rate >= single.rate);
            assert_eq!(single.subset.len(), 1);
            assert!(best.satisfies_constraints(&cfg) && best.trace_is_monotone());
        }
    }
}

#[test]
fn selection_guard() {
    let cfg = scenario(11);
    let ch = generate_channels(&cfg, 0).unwrap();
    let o = SolverOptions::new(Mode::NonCoherent, Schedule::Greedy1);
    assert!(matches!(select_multi(&ch, &cfg, &o), Err(fdcr_core::Error::SelectionGuard { .. })));
    assert!(select_single(&ch, &cfg, &o).is_ok());
}

use std::collections::BTreeMap;

use lppl::scanner::verdict;
use lppl::{generate_lppl_series, generate_null_series, generate_windows, scan, GaConfig, ScanConfig, SynthSpec, VerdictRule, WindowConfig};
use proptest::prelude::*;

mod common;
use common::{assert_scan_invariants, TRUTH};

fn bubble(n: usize, seed: u64) -> lppl::TimeSeries {
    generate_lppl_series(&SynthSpec {
        truth: TRUTH,
        n_points: n,
        noise_sigma: 0.01,
        seed,
    })
    .unwrap()
}

fn quick_ga() -> GaConfig {
    GaConfig {
        population_size: 60,
        max_generations: 60,
        ..GaConfig::default()
    }
}

#[test]
fn series_of_min_length_gives_one_fit() {
    let series = bubble(60, 1);
    let cfg = ScanConfig {
        ga: quick_ga(),
        threads: 1,
        ..ScanConfig::default()
    };
    let report = scan(&series, &cfg).unwrap();
    assert_eq!(report.n_windows, 1);
    assert_eq!(report.fits.len(), 1);
    assert_eq!(report.fits[0].window, lppl::Window::full(60));
    assert_scan_invariants(&report, &cfg, 60);
}

#[test]
fn thread_count_does_not_change_results() {
    let series = bubble(130, 2);
    let mut cfg = ScanConfig {
        window: WindowConfig {
            min_length: 60,
            max_length: Some(120),
            stride: 15,
            end_index: Some(125),
        },
        ga: quick_ga().with_seed(77),
        threads: 1,
        ..ScanConfig::default()
    };
    let one = scan(&series, &cfg).unwrap();
    cfg.threads = 3;
    let three = scan(&series, &cfg).unwrap();
    assert_eq!(one, three);
    let windows = generate_windows(series.len(), &cfg.window).unwrap();
    let order: Vec<_> = one.fits.iter().map(|f| f.window).collect();
    assert_eq!(order, windows);
    assert_scan_invariants(&one, &cfg, series.len());
}

#[test]
fn bubble_scan_says_yes() {
    let series = bubble(250, 3);
    let cfg = ScanConfig {
        ga: GaConfig::default().with_seed(3),
        ..ScanConfig::default()
    };
    let report = scan(&series, &cfg).unwrap();
    assert_eq!(report.n_windows, 39);
    assert!(report.verdict.bubble, "{:?}", report.verdict);
    let mode = report.verdict.mode_bin.unwrap();
    assert!((mode - 260).abs() <= 3, "mode {mode}");
    assert_scan_invariants(&report, &cfg, 250);
}

#[test]
fn random_walk_scan_says_no() {
    let series = generate_null_series(250, 2e-4, 0.01, 4).unwrap();
    let cfg = ScanConfig {
        ga: GaConfig::default().with_seed(4),
        ..ScanConfig::default()
    };
    let report = scan(&series, &cfg).unwrap();
    assert!(!report.verdict.bubble, "{:?}", report.verdict);
    assert_scan_invariants(&report, &cfg, 250);
}

#[test]
fn mode_ties_break_to_the_earliest_bin() {
    let counts = BTreeMap::from([(270, 3), (250, 3), (290, 1)]);
    let (_, mode, _) = verdict(&counts, &VerdictRule::default());
    assert_eq!(mode, Some(250));
}

proptest! {
    #[test]
    fn adding_mode_signals_never_flips_yes(
        counts in prop::collection::btree_map(200i64..320, 1usize..6, 1..12),
        extra in 1usize..10,
    ) {
        let rule = VerdictRule::default();
        let (before, mode, _) = verdict(&counts, &rule);
        let mut more = counts.clone();
        *more.get_mut(&mode.unwrap()).unwrap() += extra;
        let (after, _, _) = verdict(&more, &rule);
        prop_assert!(!before || after);
    }
}

//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lppl::calibrator::{run_ga, ParamBox, StopReason};
use lppl::{
    accept_signal, calibrate_window, generate_lppl_series, generate_null_series, lppl_value, scan, sse, FilterConfig, FitResult, GaConfig,
    LpplParams, ScanConfig, SearchBounds, SynthSpec, TimeSeries, Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{scan_violations, TRUTH};

struct Outcome {
    pass: bool,
    detail: String,
}

fn oracle_value(p: &LpplParams, t: f64) -> f64 {
    let tau = p.t_c - t;
    p.a + p.b * tau.powf(p.m) + p.c * tau.powf(p.m) * (p.omega * tau.ln() + p.phi).cos()
}

fn random_params(rng: &mut ChaCha8Rng, t_c_min: f64) -> LpplParams {
    LpplParams {
        a: rng.random_range(-5.0..5.0),
        b: rng.random_range(-3.0..3.0),
        c: rng.random_range(-1.5..1.5),
        m: rng.random_range(0.05..0.95),
        omega: rng.random_range(2.0..16.0),
        phi: rng.random_range(0.0..std::f64::consts::TAU),
        t_c: t_c_min + rng.random_range(0.01..150.0),
    }
}

fn point(a: f64, b: f64, c: f64, t_c: f64) -> LpplParams {
    LpplParams {
        a,
        b,
        c,
        m: 0.5,
        omega: 8.0,
        phi: 0.0,
        t_c,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let analytic = [
        (point(1.0, 0.0, 0.0, 10.0), 5.0, 1.0),
        (point(0.0, -1.0, 0.0, 10.0), 6.0, -2.0),
        (point(2.0, -1.0, 0.5, 10.0), 9.0, 1.5),
    ];
    let mut worst_abs = 0f64;
    for (p, t, want) in analytic {
        worst_abs = worst_abs.max((lppl_value(&p, t).unwrap() - want).abs());
    }
    let hp = LpplParams {
        a: 0.3,
        b: -0.6,
        c: 0.2,
        m: 0.4,
        omega: 7.0,
        phi: 1.0,
        t_c: 120.0,
    };
    let hp_want = -2.1950394130991024512515678979352145568193067865307_f64;
    let hp_rel = ((lppl_value(&hp, 37.0).unwrap() - hp_want) / hp_want).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_rel = 0f64;
    for _ in 0..100 {
        let p = random_params(&mut rng, 1.0);
        let t = rng.random_range(0.0..p.t_c - 0.01);
        let want = oracle_value(&p, t);
        worst_rel = worst_rel.max((lppl_value(&p, t).unwrap() - want).abs() / want.abs().max(f64::MIN_POSITIVE));
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst_abs <= 1e-12 && hp_rel <= 1e-13 && worst_rel <= 1e-12 && elapsed < Duration::from_secs(1),
        detail: format!("analytic max abs err {worst_abs:.1e}, high-precision rel err {hp_rel:.1e}, 100 draws max rel err {worst_rel:.1e}, {elapsed:.2?}"),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0f64;
    for _ in 0..100 {
        let n = rng.random_range(10..300);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
        let series = TimeSeries::from_values(values.clone(), None, true).unwrap();
        let s = rng.random_range(0..n - 1);
        let e = rng.random_range(s..n);
        let p = random_params(&mut rng, e as f64);
        let mut want = 0.0;
        for i in s..=e {
            let r = values[i] - oracle_value(&p, i as f64);
            want += r * r;
        }
        let got = sse(&p, &series, Window::new(s, e)).unwrap();
        worst = worst.max(((got - want) / want).abs());
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-12 && elapsed < Duration::from_secs(1),
        detail: format!("100 triples max rel err {worst:.1e}, {elapsed:.2?}"),
    }
}

fn noisy_bubble(seed: u64) -> TimeSeries {
    generate_lppl_series(&SynthSpec {
        truth: TRUTH,
        n_points: 250,
        noise_sigma: 0.01,
        seed,
    })
    .unwrap()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut hits = 0;
    let mut slowest = Duration::ZERO;
    let mut misses = Vec::new();
    for seed in 0..20 {
        let t0 = Instant::now();
        let fit = calibrate_window(&noisy_bubble(seed), Window::full(250), &SearchBounds::default(), &GaConfig::default().with_seed(seed)).unwrap();
        slowest = slowest.max(t0.elapsed());
        let p = fit.params;
        if (p.t_c - 260.0).abs() <= 2.0 && (p.m - 0.5).abs() <= 0.1 && (p.omega - 8.0).abs() <= 0.5 {
            hits += 1;
        } else {
            misses.push(format!("seed {seed}: t_c={:.2} m={:.3} omega={:.3}", p.t_c, p.m, p.omega));
        }
    }
    let total = start.elapsed();
    let mut detail = format!("{hits}/20 recovered, slowest fit {slowest:.2?}, total {total:.2?}");
    if !misses.is_empty() {
        detail.push_str(&format!(" [{}]", misses.join("; ")));
    }
    Outcome {
        pass: hits >= 18 && slowest <= Duration::from_secs(10) && total <= Duration::from_secs(240),
        detail,
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let window = Window::new(0, 99);
    let t_end = 99.0;
    let ms = [0.0999, 0.1, 0.1001, 0.5, 0.8999, 0.9, 0.9001];
    let omegas = [5.999, 6.0, 6.001, 9.0, 12.999, 13.0, 13.001];
    let cs = [-1.0001, -1.0, -0.9999, 0.0, 0.9999, 1.0, 1.0001];
    let bs = [-0.5, 0.0, 0.5];
    let offsets = [0.0, 1e-9, 25.0, 49.999, 50.0, 50.001, 80.0];
    let mut points = 0;
    let mut mismatches = 0;
    for negative_bubble in [false, true] {
        let filter = FilterConfig {
            negative_bubble,
            ..FilterConfig::default()
        };
        for &m in &ms {
            for &omega in &omegas {
                for &c in &cs {
                    for &b in &bs {
                        for &off in &offsets {
                            let fit = FitResult {
                                window,
                                t_end,
                                params: LpplParams {
                                    a: 1.0,
                                    b,
                                    c,
                                    m,
                                    omega,
                                    phi: 0.0,
                                    t_c: t_end + off,
                                },
                                sse: 0.0,
                                rmse: 0.0,
                                generations_run: 0,
                                objective_evaluations: 0,
                                converged: true,
                                stop_reason: StopReason::Stalled,
                                seed: 0,
                                accepted: false,
                                rejection_reasons: Vec::new(),
                            };
                            let sign_ok = if negative_bubble { b > 0.0 } else { b < 0.0 };
                            let want = 0.1 < m && m < 0.9 && 6.0 < omega && omega < 13.0 && c.abs() < 1.0 && sign_ok && 0.0 < off && off <= 50.0;
                            let (got, reasons) = accept_signal(&fit, &filter);
                            if got != want || got != reasons.is_empty() {
                                mismatches += 1;
                            }
                            points += 1;
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches == 0 && points >= 2187 && elapsed < Duration::from_secs(1),
        detail: format!("{points} grid points, {mismatches} mismatches, {elapsed:.2?}"),
    }
}

fn criterion_5(violations: &mut Vec<String>) -> Outcome {
    let start = Instant::now();
    let mut yes = 0;
    let mut no = 0;
    let mut windows = usize::MAX;
    let mut notes = Vec::new();
    for seed in 0..20 {
        let cfg = ScanConfig {
            ga: GaConfig::default().with_seed(seed),
            ..ScanConfig::default()
        };
        let report = scan(&noisy_bubble(seed), &cfg).unwrap();
        violations.extend(scan_violations(&report, &cfg, 250));
        windows = windows.min(report.n_windows);
        let mode_ok = report.verdict.mode_bin.is_some_and(|b| (b - 260).abs() <= 3);
        if report.verdict.bubble && mode_ok {
            yes += 1;
        } else {
            notes.push(format!("bubble seed {seed}: {:?}", report.verdict));
        }

        let null = generate_null_series(250, 2e-4, 0.01, 1000 + seed).unwrap();
        let report = scan(&null, &cfg).unwrap();
        violations.extend(scan_violations(&report, &cfg, 250));
        if !report.verdict.bubble {
            no += 1;
        } else {
            notes.push(format!("null seed {seed}: {:?}", report.verdict));
        }
    }
    let elapsed = start.elapsed();
    let mut detail = format!("bubble YES near 260 in {yes}/20, null NO in {no}/20, {windows} windows per scan, {elapsed:.2?}");
    if !notes.is_empty() {
        detail.push_str(&format!(" [{}]", notes.join("; ")));
    }
    Outcome {
        pass: yes >= 18 && no >= 16 && windows >= 30 && elapsed <= Duration::from_secs(1800),
        detail,
    }
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("series.csv");
    let bin = env!("CARGO_BIN_EXE_lppl");
    let status = Command::new(bin)
        .args(["synth", "--seed", "6", "--output", input.to_str().unwrap()])
        .output()
        .unwrap();
    if !status.status.success() {
        return Outcome {
            pass: false,
            detail: "synth failed".into(),
        };
    }
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "seed = 6\n[window]\nstride = 15\n").unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "8"] {
        for run in 0..3 {
            let out = dir.path().join(format!("t{threads}_{run}"));
            let status = Command::new(bin)
                .args(["scan", "--config", config.to_str().unwrap(), "--input", input.to_str().unwrap()])
                .args(["--out-dir", out.to_str().unwrap(), "--threads", threads])
                .output()
                .unwrap();
            if !status.status.success() {
                return Outcome {
                    pass: false,
                    detail: format!("scan failed: {}", String::from_utf8_lossy(&status.stderr)),
                };
            }
            reports.push(std::fs::read(out.join("report.json")).unwrap());
        }
    }
    let identical = reports.windows(2).all(|w| w[0] == w[1]);
    Outcome {
        pass: identical,
        detail: format!("{} report.json files ({} bytes) {}", reports.len(), reports[0].len(), if identical { "byte-identical" } else { "differ" }),
    }
}

fn criterion_7() -> Outcome {
    let lower = LpplParams {
        a: 0.0,
        b: -1.0,
        c: 0.1,
        m: 0.0,
        omega: 0.0,
        phi: 1.0,
        t_c: 300.0,
    };
    let pbox = ParamBox {
        lower,
        upper: LpplParams {
            m: 1.0,
            omega: 20.0,
            ..lower
        },
    };
    let surrogate = |p: &LpplParams| (p.m - 0.5).powi(2) + (p.omega - 8.0).powi(2);
    let mut runs = 0;
    let mut non_monotone = 0;
    let mut hits = 0;
    for seed in 0..20 {
        let out = run_ga(surrogate, &pbox, &GaConfig::default().with_seed(seed)).unwrap();
        runs += 1;
        if !out.history.windows(2).all(|w| w[1] <= w[0]) {
            non_monotone += 1;
        }
        if out.best_value < 1e-4 {
            hits += 1;
        }
    }
    let series = noisy_bubble(7);
    let window = Window::full(250);
    let lbox = SearchBounds::default().resolve(&series, window).unwrap();
    let objective = |p: &LpplParams| sse(p, &series, window).unwrap_or(f64::INFINITY);
    for seed in 0..5 {
        let cfg = GaConfig {
            max_generations: 100,
            ..GaConfig::default().with_seed(seed)
        };
        let out = run_ga(objective, &lbox, &cfg).unwrap();
        runs += 1;
        if !out.history.windows(2).all(|w| w[1] <= w[0]) {
            non_monotone += 1;
        }
    }
    Outcome {
        pass: non_monotone == 0 && hits >= 19,
        detail: format!("{non_monotone} of {runs} logged runs non-monotone, surrogate within 1e-4 in {hits}/20"),
    }
}

fn criterion_8(violations: &mut Vec<String>) -> Outcome {
    let mut scans = 40;
    for (n, min_length, stride) in [(60, 60, 5), (130, 60, 7), (250, 100, 30)] {
        let cfg = ScanConfig {
            window: lppl::WindowConfig {
                min_length,
                stride,
                ..Default::default()
            },
            ga: GaConfig {
                population_size: 60,
                max_generations: 60,
                ..GaConfig::default().with_seed(n as u64)
            },
            ..ScanConfig::default()
        };
        let series = generate_null_series(n, 0.0, 0.02, n as u64).unwrap();
        let report = scan(&series, &cfg).unwrap();
        violations.extend(scan_violations(&report, &cfg, n));
        scans += 1;
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!("{scans} scans checked, {} violations {:?}", violations.len(), violations),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: u32, name: &str, o: Outcome| {
        println!("{} criterion {n} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    };
    let mut violations = Vec::new();
    report(1, "model evaluation", criterion_1());
    report(2, "objective oracle", criterion_2());
    report(3, "fit recovery", criterion_3());
    report(4, "filter grid", criterion_4());
    report(5, "signal patterns", criterion_5(&mut violations));
    report(6, "thread determinism", criterion_6());
    report(7, "GA sanity", criterion_7());
    report(8, "scan invariants", criterion_8(&mut violations));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

#![allow(dead_code)]

use lppl::scanner::ScanReport;
use lppl::{accept_signal, LpplParams, ScanConfig};

/// Ground truth used across the recovery tests.
pub const TRUTH: LpplParams = LpplParams {
    a: 1.0,
    b: -1.0,
    c: 0.3,
    m: 0.5,
    omega: 8.0,
    phi: 1.0,
    t_c: 260.0,
};

/// Checks histogram mass conservation, filter soundness and window
/// geometry. Returns one message per violation.
pub fn scan_violations(report: &ScanReport, cfg: &ScanConfig, series_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mass: usize = report.histogram.iter().map(|b| b.count).sum();
    if mass != report.n_accepted {
        out.push(format!("histogram mass {mass} != n_accepted {}", report.n_accepted));
    }
    if report.n_accepted > report.n_windows {
        out.push("n_accepted exceeds n_windows".into());
    }
    if report.fits.len() + report.failures.len() != report.n_windows {
        out.push("fits + failures != n_windows".into());
    }
    if report.fits.iter().filter(|f| f.accepted).count() != report.n_accepted {
        out.push("accepted flags disagree with n_accepted".into());
    }
    let end = cfg.window.end_index.unwrap_or(series_len - 1);
    let max_len = cfg.window.max_length.unwrap_or(end + 1);
    for f in &report.fits {
        let (ok, reasons) = accept_signal(f, &cfg.filter);
        if ok != f.accepted || reasons != f.rejection_reasons {
            out.push(format!("filter recheck disagrees on window {}", f.window));
        }
        if f.accepted && !f.rejection_reasons.is_empty() {
            out.push(format!("accepted fit with reasons on {}", f.window));
        }
        if !f.accepted && f.rejection_reasons.is_empty() {
            out.push(format!("rejected fit without reasons on {}", f.window));
        }
        if f.window.end != end {
            out.push(format!("window {} does not end at {end}", f.window));
        }
        let len = f.window.len();
        if len < cfg.window.min_length || len > max_len {
            out.push(format!("window {} length {len} outside bounds", f.window));
        }
        if !(f.params.t_c > f.t_end) {
            out.push(format!("t_c not after window end on {}", f.window));
        }
    }
    out
}

pub fn assert_scan_invariants(report: &ScanReport, cfg: &ScanConfig, series_len: usize) {
    let v = scan_violations(report, cfg, series_len);
    assert!(v.is_empty(), "scan invariant violations: {v:?}");
}

//! Machine-readable result rows.
//!
//! The TSV schema mirrors the benchmark table: one row per instance with
//! columns `name n m theta round best best_discr time_sdp time_subp
//! time_total backtracks optimal`. Bench rows append the pure-CP baseline
//! as `cp_best cp_time cp_backtracks cp_optimal`. The JSON form carries
//! the same fields (plus the degraded-mode flag).

use serde::Serialize;

use crate::cp::{CpResult, CpStatus};
use crate::hybrid::RunReport;
use crate::scalar::Real;

pub const TSV_HEADER: &str =
    "name\tn\tm\ttheta\tround\tbest\tbest_discr\ttime_sdp\ttime_subp\ttime_total\tbacktracks\toptimal";

pub const BENCH_TSV_HEADER: &str =
    "name\tn\tm\ttheta\tround\tbest\tbest_discr\ttime_sdp\ttime_subp\ttime_total\tbacktracks\toptimal\tcp_best\tcp_time\tcp_backtracks\tcp_optimal";

/// Serializable view of a [`RunReport`] with the external field names.
#[derive(Debug, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub theta: f64,
    pub round: f64,
    pub best: f64,
    pub best_discr: usize,
    pub time_sdp: f64,
    pub time_subp: f64,
    pub time_total: f64,
    pub backtracks: u64,
    pub optimal: bool,
    pub degraded: bool,
}

impl ReportRow {
    pub fn from_report<F: Real>(r: &RunReport<F>) -> Self {
        ReportRow {
            name: r.name.clone(),
            n: r.n,
            m: r.m,
            theta: r.theta.to_f64(),
            round: r.round_value.to_f64(),
            best: r.best_value.to_f64(),
            best_discr: r.best_discrepancy,
            time_sdp: r.time_sdp,
            time_subp: r.time_subproblems,
            time_total: r.time_total,
            backtracks: r.backtracks,
            optimal: r.proven_optimal,
            degraded: r.degraded,
        }
    }
}

/// Integral values print without decimals (`746`), everything else with
/// shortest round-trip formatting; NaN prints as `nan`.
pub fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.fract() == 0.0 && v.abs() < 2f64.powi(53) {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

fn fmt_theta(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.2}")
    }
}

pub fn tsv_row<F: Real>(r: &RunReport<F>) -> String {
    let v = ReportRow::from_report(r);
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{}\t{}",
        v.name,
        v.n,
        v.m,
        fmt_theta(v.theta),
        fmt_value(v.round),
        fmt_value(v.best),
        v.best_discr,
        v.time_sdp,
        v.time_subp,
        v.time_total,
        v.backtracks,
        v.optimal as u8,
    )
}

pub fn bench_tsv_row<F: Real>(report: &RunReport<F>, baseline: &CpResult<F>) -> String {
    let cp_best = baseline
        .best_value()
        .map_or(0.0, crate::scalar::Real::to_f64);
    format!(
        "{}\t{}\t{:.2}\t{}\t{}",
        tsv_row(report),
        fmt_value(cp_best),
        baseline.elapsed.as_secs_f64(),
        baseline.backtracks,
        (baseline.status == CpStatus::Optimal) as u8,
    )
}

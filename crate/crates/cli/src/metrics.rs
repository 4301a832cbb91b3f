//! Metrics report: `scope,name,value` rows. Counts print as integers, ratios
//! with six significant digits.

use std::fmt::Write;

use cawgr_core::{utilization_summary, Metrics};

pub const HEADER: &str = "scope,name,value";

/// Fixed six-significant-digit rendering; zero prints as `0`.
pub fn ratio(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value.is_finite() { "0".into() } else { format!("{value}") };
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

pub fn emit(metrics: &Metrics) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    fn count(out: &mut String, scope: &str, name: &str, value: u64) {
        writeln!(out, "{scope},{name},{value}").unwrap();
    }
    count(&mut out, "global", "frames", metrics.frames as u64);
    count(&mut out, "global", "slots_per_frame", metrics.slots_per_frame as u64);
    count(&mut out, "global", "offered", metrics.offered);
    count(&mut out, "global", "delivered", metrics.delivered);
    count(&mut out, "global", "queued", metrics.queued);
    for p in &metrics.pairs {
        let scope = format!("pair:{}->{}", p.src, p.dst);
        count(&mut out, &scope, "grants", p.grants as u64);
        count(&mut out, &scope, "offered", p.offered);
        count(&mut out, &scope, "delivered", p.delivered);
        count(&mut out, &scope, "queued", p.queued);
        writeln!(out, "{scope},mean_delay,{}", ratio(p.mean_delay)).unwrap();
        writeln!(out, "{scope},max_delay,{}", p.max_delay).unwrap();
    }
    for row in utilization_summary(metrics) {
        writeln!(out, "{},{},{}", row.scope, row.name, ratio(row.value)).unwrap();
    }
    out
}

/// One-line run summary for standard output.
pub fn summary(metrics: &Metrics) -> String {
    let aggregate = utilization_summary(metrics).last().map_or(0.0, |r| r.value);
    format!(
        "offered={} delivered={} queued={} frames={} utilization={}",
        metrics.offered,
        metrics.delivered,
        metrics.queued,
        metrics.frames,
        ratio(aggregate)
    )
}

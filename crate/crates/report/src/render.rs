//! Deterministic text, CSV, and histogram rendering of association rows.

use std::fmt::Write as _;

use wardlens_core::domain::{OutcomeKind, Phase};

use crate::assoc::{group_index, group_names, AssociationRow, GroupStats};
use crate::observe::WindowObservation;

/// Histogram bin width for the visitation-average distribution output.
pub const HISTOGRAM_BIN_WIDTH: f64 = 0.25;

/// Formats a p-value: three decimals at or above `1e-3`, otherwise
/// scientific notation with a two-digit zero-padded exponent
/// (`0.000505` → `"5.05e-04"`).
pub fn format_p(p: f64) -> String {
    if p >= 1e-3 {
        return format!("{p:.3}");
    }
    let raw = format!("{p:.2e}");
    let (mantissa, exponent) = raw.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exponent.parse().expect("numeric exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn mean_std_cell(stats: &GroupStats) -> String {
    match &stats.summary {
        Some(s) => format!("{:.2} ({:.2})", s.mean, s.std),
        None => "-".to_owned(),
    }
}

fn max_min_cell(stats: &GroupStats) -> String {
    match &stats.summary {
        Some(s) => format!("{:.2} ({:.2})", s.max, s.min),
        None => "-".to_owned(),
    }
}

fn p_cell(row: &AssociationRow) -> String {
    match &row.test {
        Some(test) => format_p(test.p_value),
        None if row.notes.iter().any(|n| n == "insufficient data") => {
            "insufficient data".to_owned()
        }
        None => "-".to_owned(),
    }
}

/// The three outcomes in fixed report order.
const OUTCOME_ORDER: [OutcomeKind; 3] = [
    OutcomeKind::Pain,
    OutcomeKind::Acuity,
    OutcomeKind::Delirium,
];

/// Renders one aligned-text table per outcome present, rows ordered as
/// given (metric, then Day/Night/Combined). Same rows, same bytes.
pub fn render_text(rows: &[AssociationRow]) -> String {
    let mut out = String::new();
    for outcome in OUTCOME_ORDER {
        let table: Vec<&AssociationRow> =
            rows.iter().filter(|r| r.outcome == outcome).collect();
        if table.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        let names = group_names(outcome);
        let show_adjusted = table.iter().any(|r| r.adjusted_p.is_some());
        let _ = writeln!(
            out,
            "{} associations: {} vs {}",
            outcome.name(),
            names[0],
            names[1]
        );
        let _ = writeln!(
            out,
            "cells are N, Mean (STD), Max (Min) per group; p from the two-sided Mann-Whitney U test"
        );
        let _ = writeln!(out, "{:31}{:<41}{}", "", names[0], names[1]);
        let header_p = if show_adjusted { "p-value   adj p" } else { "p-value" };
        let _ = writeln!(
            out,
            "{:<21}{:<10}{:>6}  {:<13}  {:<14}   {:>6}  {:<13}  {:<14}  {}",
            "Metric", "Stratum", "N", "Mean (STD)", "Max (Min)", "N", "Mean (STD)", "Max (Min)", header_p
        );
        let mut footnotes: Vec<String> = Vec::new();
        for row in &table {
            let adjusted = match (show_adjusted, row.adjusted_p) {
                (true, Some(p)) => format!("  {}", format_p(p)),
                (true, None) => "  -".to_owned(),
                (false, _) => String::new(),
            };
            let _ = writeln!(
                out,
                "{:<21}{:<10}{:>6}  {:<13}  {:<14}   {:>6}  {:<13}  {:<14}  {}{}",
                row.metric.display_name(),
                row.stratum.name(),
                row.groups[0].n,
                mean_std_cell(&row.groups[0]),
                max_min_cell(&row.groups[0]),
                row.groups[1].n,
                mean_std_cell(&row.groups[1]),
                max_min_cell(&row.groups[1]),
                p_cell(row),
                adjusted
            );
            if !row.notes.is_empty() {
                footnotes.push(format!(
                    "  - {}/{}: {}",
                    row.metric.display_name(),
                    row.stratum.name(),
                    row.notes.join("; ")
                ));
            }
        }
        if !footnotes.is_empty() {
            let _ = writeln!(out, "notes:");
            for note in footnotes {
                let _ = writeln!(out, "{note}");
            }
        }
    }
    out
}

/// CSV field text for an optional float, full precision, empty when absent.
fn opt_cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Commas and line breaks would break the single-line CSV grammar, so note
/// text demotes them to semicolons / spaces.
fn sanitize_note(text: &str) -> String {
    text.replace(',', ";").replace('\n', " ")
}

/// Renders rows as long-format CSV: one line per (row, group), with the
/// comparison columns (`u_statistic,p,adjusted_p,notes`) repeated on both
/// group lines so every line is self-contained.
pub fn render_csv(rows: &[AssociationRow]) -> String {
    let mut out = String::from(
        "outcome,metric,stratum,group,n,mean,std,min,max,u_statistic,p,adjusted_p,notes\n",
    );
    for row in rows {
        let u = opt_cell(row.test.as_ref().map(|t| t.statistic));
        let p = opt_cell(row.test.as_ref().map(|t| t.p_value));
        let adjusted = opt_cell(row.adjusted_p);
        let mut notes: Vec<String> = row.notes.iter().map(|n| sanitize_note(n)).collect();
        if let Some(test) = &row.test {
            if !test.notes.is_empty() {
                notes.push(sanitize_note(&test.notes));
            }
        }
        let notes = notes.join("; ");
        for group in &row.groups {
            let (mean, std, min, max) = match &group.summary {
                Some(s) => (
                    s.mean.to_string(),
                    s.std.to_string(),
                    s.min.to_string(),
                    s.max.to_string(),
                ),
                None => Default::default(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                row.outcome.name(),
                row.metric.token(),
                row.stratum.name(),
                group.name,
                group.n,
                mean,
                std,
                min,
                max,
                u,
                p,
                adjusted,
                notes
            );
        }
    }
    out
}

/// Emits the visitation-average distribution as CSV histogram bins of
/// width [`HISTOGRAM_BIN_WIDTH`], per outcome × comparison group × phase.
/// Bins are half-open `[start, end)`, contiguous from the smallest to the
/// largest populated bin (zero counts included in between); group/phase
/// combinations with no windows emit nothing.
pub fn histogram_bins(observations: &[WindowObservation]) -> String {
    let mut out = String::from("outcome,group,phase,bin_start,bin_end,count\n");
    for outcome in OUTCOME_ORDER {
        let names = group_names(outcome);
        for (which, name) in names.iter().enumerate() {
            for phase in [Phase::Day, Phase::Night] {
                let values: Vec<f64> = observations
                    .iter()
                    .filter(|obs| {
                        obs.kind == outcome
                            && obs.phase == phase
                            && group_index(outcome, &obs.label) == Some(which)
                    })
                    .map(|obs| obs.metrics.visitation_mean)
                    .collect();
                if values.is_empty() {
                    continue;
                }
                let bin_of = |v: f64| (v / HISTOGRAM_BIN_WIDTH).floor() as i64;
                let lo = values.iter().copied().map(bin_of).min().expect("non-empty");
                let hi = values.iter().copied().map(bin_of).max().expect("non-empty");
                let mut counts = vec![0usize; (hi - lo + 1) as usize];
                for &v in &values {
                    counts[(bin_of(v) - lo) as usize] += 1;
                }
                for (offset, count) in counts.iter().enumerate() {
                    let bin = lo + offset as i64;
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        outcome.name(),
                        name,
                        phase.name(),
                        bin as f64 * HISTOGRAM_BIN_WIDTH,
                        (bin + 1) as f64 * HISTOGRAM_BIN_WIDTH,
                        count
                    );
                }
            }
        }
    }
    out
}

//! Outcome × metric × stratum association rows.

use wardlens_core::align::EventLabel;
use wardlens_core::domain::{
    AcuityLabel, DeliriumStatus, OutcomeKind, PainGroup, PainLevel, Phase,
};
use wardlens_core::exec;
use wardlens_core::metrics::WindowMetrics;
use wardlens_stats::{
    bh_adjust, bonferroni_adjust, dagostino_k2, kruskal_wallis, mann_whitney_u, TestResult,
};

use crate::observe::WindowObservation;
use crate::render::format_p;
use crate::ReportError;

/// The three per-window metrics a row can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Mean person count per frame.
    VisitationAverage,
    /// Population variance of the person count.
    VisitationVariance,
    /// Fraction of frames with a lying-in-bed detection.
    LyingProportion,
}

impl MetricKind {
    /// All metrics in report order.
    pub const ALL: [MetricKind; 3] = [
        MetricKind::VisitationAverage,
        MetricKind::VisitationVariance,
        MetricKind::LyingProportion,
    ];

    /// Machine token used in CSV output.
    pub fn token(self) -> &'static str {
        match self {
            MetricKind::VisitationAverage => "VisitationAverage",
            MetricKind::VisitationVariance => "VisitationVariance",
            MetricKind::LyingProportion => "LyingProportion",
        }
    }

    /// Human-readable name used in text tables.
    pub fn display_name(self) -> &'static str {
        match self {
            MetricKind::VisitationAverage => "Visitation Average",
            MetricKind::VisitationVariance => "Visitation Variance",
            MetricKind::LyingProportion => "Lying Proportion",
        }
    }

    /// Extracts this metric's value from a window.
    pub fn value(self, metrics: &WindowMetrics) -> f64 {
        match self {
            MetricKind::VisitationAverage => metrics.visitation_mean,
            MetricKind::VisitationVariance => metrics.visitation_variance,
            MetricKind::LyingProportion => metrics.lying_proportion,
        }
    }
}

/// Which part of the day a row covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    /// Events with a daytime timestamp.
    Day,
    /// Events with a nighttime timestamp.
    Night,
    /// All events.
    Combined,
}

impl Stratum {
    /// All strata in report order.
    pub const ALL: [Stratum; 3] = [Stratum::Day, Stratum::Night, Stratum::Combined];

    /// Display and CSV name.
    pub fn name(self) -> &'static str {
        match self {
            Stratum::Day => "Day",
            Stratum::Night => "Night",
            Stratum::Combined => "Combined",
        }
    }

    /// True iff an event in `phase` belongs to this stratum.
    pub fn admits(self, phase: Phase) -> bool {
        match self {
            Stratum::Day => phase == Phase::Day,
            Stratum::Night => phase == Phase::Night,
            Stratum::Combined => true,
        }
    }
}

/// Multiple-comparison correction applied per outcome family (9 rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Adjustment {
    /// Report raw p-values only.
    #[default]
    None,
    /// Benjamini–Hochberg step-up FDR control.
    BenjaminiHochberg,
    /// Bonferroni family-wise control.
    Bonferroni,
}

/// Summary statistics of one group's metric values (population std).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    /// Arithmetic mean.
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Smallest per-window value.
    pub min: f64,
    /// Largest per-window value.
    pub max: f64,
}

/// One comparison group's size and summary; `summary` is `None` for an
/// empty group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    /// Group label (`NoMild`, `Stable`, …).
    pub name: &'static str,
    /// Windows in the group.
    pub n: usize,
    /// Summary statistics, when at least one window is present.
    pub summary: Option<SummaryStats>,
}

impl GroupStats {
    /// Summarizes one group's values.
    pub fn from_values(name: &'static str, values: &[f64]) -> GroupStats {
        if values.is_empty() {
            return GroupStats {
                name,
                n: 0,
                summary: None,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            min = min.min(v);
            max = max.max(v);
        }
        // Accumulated rounding can land the raw mean an ulp outside the
        // hull of a near-constant sample; the row invariant is
        // mean ∈ [min, max].
        let mean = mean.clamp(min, max);
        GroupStats {
            name,
            n: values.len(),
            summary: Some(SummaryStats {
                mean,
                std: variance.sqrt(),
                min,
                max,
            }),
        }
    }
}

/// One metric × outcome × stratum comparison: group summaries, the test
/// (absent when a group is under-populated or the data are degenerate),
/// the optionally adjusted p, and advisory notes.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRow {
    /// The outcome being compared.
    pub outcome: OutcomeKind,
    /// The metric being compared.
    pub metric: MetricKind,
    /// The stratum the comparison runs in.
    pub stratum: Stratum,
    /// Both groups, in the fixed order of [`group_names`].
    pub groups: [GroupStats; 2],
    /// Mann–Whitney result; `None` when the comparison could not run.
    pub test: Option<TestResult>,
    /// Adjusted p-value when a correction was requested.
    pub adjusted_p: Option<f64>,
    /// Advisory notes: normality checks, insufficient-data markers, and
    /// reasons a test was skipped.
    pub notes: Vec<String>,
}

/// The two comparison groups of an outcome, in fixed report order.
pub fn group_names(outcome: OutcomeKind) -> [&'static str; 2] {
    match outcome {
        OutcomeKind::Pain => [
            PainGroup::NoMild.name(),
            PainGroup::ModerateSevere.name(),
        ],
        OutcomeKind::Acuity => [AcuityLabel::Stable.name(), AcuityLabel::Unstable.name()],
        OutcomeKind::Delirium => [
            DeliriumStatus::NonDelirious.name(),
            DeliriumStatus::Delirious.name(),
        ],
    }
}

/// Which of the outcome's two groups a label belongs to; `None` for labels
/// outside the comparison (wrong outcome, or delirium `Excluded`).
pub(crate) fn group_index(outcome: OutcomeKind, label: &EventLabel) -> Option<usize> {
    match (outcome, label) {
        (OutcomeKind::Pain, EventLabel::Pain(level)) => Some(match level.group() {
            PainGroup::NoMild => 0,
            PainGroup::ModerateSevere => 1,
        }),
        (OutcomeKind::Acuity, EventLabel::Acuity(label)) => Some(match label {
            AcuityLabel::Stable => 0,
            AcuityLabel::Unstable => 1,
        }),
        (OutcomeKind::Delirium, EventLabel::Delirium(status)) => match status {
            DeliriumStatus::NonDelirious => Some(0),
            DeliriumStatus::Delirious => Some(1),
            DeliriumStatus::Excluded => None,
        },
        _ => None,
    }
}

/// Records the normality advisory for one group. The omnibus test needs
/// n ≥ 20 and non-constant data; when it cannot run, the note says why.
fn normality_note(name: &str, values: &[f64], notes: &mut Vec<String>) {
    match dagostino_k2(values) {
        Ok(result) => {
            let verdict = if result.p_value < 0.05 {
                "rejected"
            } else {
                "not rejected"
            };
            notes.push(format!(
                "normality[{name}] p = {} ({verdict} at alpha 0.05)",
                format_p(result.p_value)
            ));
        }
        Err(err) => notes.push(format!("normality[{name}] not assessed: {err}")),
    }
}

/// Runs the 3 metrics × 3 strata two-group comparison for one outcome.
///
/// Every row gets group summaries. The Mann–Whitney test (two-sided, tie
/// and continuity corrected) runs whenever both groups have at least two
/// windows in the stratum; under-populated rows carry an "insufficient
/// data" note instead, and degenerate data (e.g. every value identical)
/// are noted rather than fatal. Normality is assessed per group as an
/// advisory only — the reported test never switches.
pub fn run_association(
    observations: &[WindowObservation],
    outcome: OutcomeKind,
    adjustment: Adjustment,
) -> Result<Vec<AssociationRow>, ReportError> {
    let names = group_names(outcome);
    let mut members: [Vec<&WindowObservation>; 2] = [Vec::new(), Vec::new()];
    for obs in observations.iter().filter(|o| o.kind == outcome) {
        if let Some(which) = group_index(outcome, &obs.label) {
            members[which].push(obs);
        }
    }

    let mut rows = Vec::with_capacity(MetricKind::ALL.len() * Stratum::ALL.len());
    for metric in MetricKind::ALL {
        for stratum in Stratum::ALL {
            let values: [Vec<f64>; 2] = [0, 1].map(|which| {
                members[which]
                    .iter()
                    .filter(|obs| stratum.admits(obs.phase))
                    .map(|obs| metric.value(&obs.metrics))
                    .collect()
            });
            let groups = [
                GroupStats::from_values(names[0], &values[0]),
                GroupStats::from_values(names[1], &values[1]),
            ];
            let mut notes = Vec::new();
            let test = if values[0].len() >= 2 && values[1].len() >= 2 {
                for (name, group_values) in names.iter().zip(values.iter()) {
                    normality_note(name, group_values, &mut notes);
                }
                match mann_whitney_u(&values[0], &values[1], true) {
                    Ok(result) => Some(result),
                    Err(err) => {
                        notes.push(format!("test not run: {err}"));
                        None
                    }
                }
            } else {
                notes.push("insufficient data".to_owned());
                None
            };
            rows.push(AssociationRow {
                outcome,
                metric,
                stratum,
                groups,
                test,
                adjusted_p: None,
                notes,
            });
        }
    }
    apply_adjustment(&mut rows, adjustment)?;
    Ok(rows)
}

/// Adjusts the p-values of the rows whose test ran, in row order, across
/// the whole family passed in (one outcome: 9 rows).
fn apply_adjustment(rows: &mut [AssociationRow], adjustment: Adjustment) -> Result<(), ReportError> {
    let p_values: Vec<f64> = rows
        .iter()
        .filter_map(|row| row.test.as_ref().map(|t| t.p_value))
        .collect();
    if p_values.is_empty() {
        return Ok(());
    }
    let adjusted = match adjustment {
        Adjustment::None => return Ok(()),
        Adjustment::BenjaminiHochberg => bh_adjust(&p_values)?,
        Adjustment::Bonferroni => bonferroni_adjust(&p_values)?,
    };
    let mut next = adjusted.into_iter();
    for row in rows.iter_mut() {
        if row.test.is_some() {
            row.adjusted_p = next.next();
        }
    }
    Ok(())
}

/// Runs all three outcomes (in parallel — they are independent) and
/// concatenates the rows in Pain, Acuity, Delirium order.
pub fn run_all_associations(
    observations: &[WindowObservation],
    adjustment: Adjustment,
) -> Result<Vec<AssociationRow>, ReportError> {
    let outcomes = [OutcomeKind::Pain, OutcomeKind::Acuity, OutcomeKind::Delirium];
    let results = exec::par_map(&outcomes, |outcome| {
        run_association(observations, *outcome, adjustment)
    });
    let mut rows = Vec::with_capacity(outcomes.len() * 9);
    for result in results {
        rows.extend(result?);
    }
    Ok(rows)
}

/// Kruskal–Wallis over the visitation average across the four fine-grained
/// pain levels (None, Mild, Moderate, Severe), combined strata. Empty
/// levels are dropped; fewer than two populated levels is an error.
pub fn run_pain_four_group(
    observations: &[WindowObservation],
) -> Result<TestResult, ReportError> {
    let mut groups: [Vec<f64>; 4] = Default::default();
    for obs in observations.iter().filter(|o| o.kind == OutcomeKind::Pain) {
        if let EventLabel::Pain(level) = obs.label {
            let index = match level {
                PainLevel::None => 0,
                PainLevel::Mild => 1,
                PainLevel::Moderate => 2,
                PainLevel::Severe => 3,
            };
            groups[index].push(obs.metrics.visitation_mean);
        }
    }
    let populated: Vec<&[f64]> = groups
        .iter()
        .filter(|group| !group.is_empty())
        .map(Vec::as_slice)
        .collect();
    if populated.len() < 2 {
        return Err(ReportError::TooFewPainGroups {
            non_empty: populated.len(),
        });
    }
    Ok(kruskal_wallis(&populated)?)
}

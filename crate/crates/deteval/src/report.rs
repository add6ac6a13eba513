//! Cross-fold aggregation into a mean/std report and its renderings.

use wardlens_core::domain::PostureClass;
use wardlens_core::exec;

use crate::ap::{average_precision, operating_point, pool_matches};
use crate::samples::EvalSample;
use crate::EvalError;

/// The four reported metrics for one class in one fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMetrics {
    /// All-points average precision at the report's IoU threshold.
    pub ap: f64,
    /// Precision at the max-F1 operating point.
    pub precision: f64,
    /// Recall at the max-F1 operating point.
    pub recall: f64,
    /// F1 at the max-F1 operating point.
    pub f1: f64,
}

/// One report row (a class, or the unweighted all-classes mean).
#[derive(Debug, Clone, PartialEq)]
pub struct RowSummary {
    /// Human-readable row label (`lying in bed`, …, `all classes`).
    pub label: String,
    /// One cell per fold; `None` where the fold had no ground truth for
    /// this row.
    pub per_fold: Vec<Option<CellMetrics>>,
    /// Mean over counted folds (`None` if no fold counted).
    pub mean: Option<CellMetrics>,
    /// Population standard deviation over counted folds.
    pub std: Option<CellMetrics>,
    /// How many folds the mean/std aggregate.
    pub folds_counted: usize,
}

/// Detection-quality report: per-class rows plus the all-classes row,
/// each cell a cross-fold mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// IoU threshold the evaluation ran at.
    pub iou_threshold: f64,
    /// Number of folds supplied.
    pub fold_count: usize,
    /// Class rows in input class order, then the `all classes` row.
    pub rows: Vec<RowSummary>,
    /// Exclusions applied during aggregation.
    pub notes: Vec<String>,
}

impl EvalReport {
    /// The row with the given label, if present.
    pub fn row(&self, label: &str) -> Option<&RowSummary> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Human-readable row label for a class (`lying_in_bed` → `lying in bed`).
pub fn class_label(class: PostureClass) -> String {
    class.token().replace('_', " ")
}

fn aggregate(cells: &[CellMetrics]) -> (CellMetrics, CellMetrics) {
    let n = cells.len() as f64;
    let mean_of = |f: fn(&CellMetrics) -> f64| cells.iter().map(f).sum::<f64>() / n;
    let mean = CellMetrics {
        ap: mean_of(|c| c.ap),
        precision: mean_of(|c| c.precision),
        recall: mean_of(|c| c.recall),
        f1: mean_of(|c| c.f1),
    };
    let std_of = |f: fn(&CellMetrics) -> f64, m: f64| {
        (cells.iter().map(|c| (f(c) - m) * (f(c) - m)).sum::<f64>() / n).sqrt()
    };
    let std = CellMetrics {
        ap: std_of(|c| c.ap, mean.ap),
        precision: std_of(|c| c.precision, mean.precision),
        recall: std_of(|c| c.recall, mean.recall),
        f1: std_of(|c| c.f1, mean.f1),
    };
    (mean, std)
}

fn summarize(label: String, per_fold: Vec<Option<CellMetrics>>) -> RowSummary {
    let counted: Vec<CellMetrics> = per_fold.iter().filter_map(|c| *c).collect();
    let folds_counted = counted.len();
    let (mean, std) = if counted.is_empty() {
        (None, None)
    } else {
        let (m, s) = aggregate(&counted);
        (Some(m), Some(s))
    };
    RowSummary {
        label,
        per_fold,
        mean,
        std,
        folds_counted,
    }
}

/// Evaluates per-fold test samples and aggregates across folds.
///
/// Each fold is scored independently (in parallel where enabled): per
/// class, predictions are matched per frame, pooled, and reduced to AP
/// plus the max-F1 operating point. A class with no ground truth in a fold
/// leaves that cell empty with a note; a fold with no ground truth at all
/// is excluded with a note. The `all classes` row is the unweighted mean
/// over the classes present in each fold; means and population standard
/// deviations run over counted folds only.
pub fn evaluate_folds(
    folds: &[Vec<EvalSample>],
    classes: &[PostureClass],
    iou_threshold: f64,
) -> Result<EvalReport, EvalError> {
    if folds.len() < 2 {
        return Err(EvalError::TooFewFolds { folds: folds.len() });
    }
    if classes.is_empty() {
        return Err(EvalError::NoClasses);
    }
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(EvalError::BadThreshold {
            threshold: iou_threshold,
        });
    }

    let scored: Result<Vec<Vec<Option<CellMetrics>>>, EvalError> =
        exec::par_map(folds, |samples| {
            classes
                .iter()
                .map(|&class| {
                    let pool = pool_matches(samples, class, iou_threshold)?;
                    if pool.ground_truth == 0 {
                        return Ok(None);
                    }
                    let op = operating_point(&pool)?;
                    Ok(Some(CellMetrics {
                        ap: average_precision(&pool)?,
                        precision: op.precision,
                        recall: op.recall,
                        f1: op.f1,
                    }))
                })
                .collect()
        })
        .into_iter()
        .collect();
    let scored = scored?;

    let mut notes = Vec::new();
    for (f, cells) in scored.iter().enumerate() {
        if cells.iter().all(Option::is_none) {
            notes.push(format!("fold {}: excluded (no ground truth)", f + 1));
        } else {
            for (&class, cell) in classes.iter().zip(cells) {
                if cell.is_none() {
                    notes.push(format!(
                        "fold {}: no {} ground truth; cell left empty",
                        f + 1,
                        class_label(class)
                    ));
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(classes.len() + 1);
    for (c, &class) in classes.iter().enumerate() {
        rows.push(summarize(
            class_label(class),
            scored.iter().map(|cells| cells[c]).collect(),
        ));
    }
    let all_per_fold: Vec<Option<CellMetrics>> = scored
        .iter()
        .map(|cells| {
            let present: Vec<CellMetrics> = cells.iter().filter_map(|c| *c).collect();
            if present.is_empty() {
                None
            } else {
                Some(aggregate(&present).0)
            }
        })
        .collect();
    rows.push(summarize("all classes".to_owned(), all_per_fold));

    Ok(EvalReport {
        iou_threshold,
        fold_count: folds.len(),
        rows,
        notes,
    })
}

fn capitalized(label: &str) -> String {
    let mut chars = label.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn cell_text(mean: Option<&CellMetrics>, std: Option<&CellMetrics>, f: fn(&CellMetrics) -> f64) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{:.3} ({:.3})", f(m), f(s)),
        _ => "-".to_owned(),
    }
}

/// Renders the report as an aligned-text table shaped like the study's
/// results table: one row per class plus `All classes`, columns mAP /
/// Precision / Recall / F1 Score, cells `mean (std)` with std taken
/// across counted folds (population form).
pub fn render_text(report: &EvalReport) -> String {
    let mut table: Vec<[String; 5]> = vec![[
        "Class".to_owned(),
        "mAP".to_owned(),
        "Precision".to_owned(),
        "Recall".to_owned(),
        "F1 Score".to_owned(),
    ]];
    for row in &report.rows {
        let mean = row.mean.as_ref();
        let std = row.std.as_ref();
        table.push([
            capitalized(&row.label),
            cell_text(mean, std, |c| c.ap),
            cell_text(mean, std, |c| c.precision),
            cell_text(mean, std, |c| c.recall),
            cell_text(mean, std, |c| c.f1),
        ]);
    }
    let widths: Vec<usize> = (0..5)
        .map(|col| table.iter().map(|r| r[col].len()).max().unwrap_or(0))
        .collect();

    let mut out = format!(
        "detection evaluation: {} folds, IoU threshold {:.2}\n\
         cells are mean (std) across counted folds; std is population form\n\n",
        report.fold_count, report.iou_threshold
    );
    for row in &table {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(col, cell)| format!("{cell:<width$}", width = widths[col]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    if !report.notes.is_empty() {
        out.push_str("\nnotes:\n");
        for note in &report.notes {
            out.push_str("  - ");
            out.push_str(note);
            out.push('\n');
        }
    }
    out
}

fn csv_cell(cell: Option<&CellMetrics>) -> String {
    match cell {
        Some(c) => format!("{:.6},{:.6},{:.6},{:.6}", c.ap, c.precision, c.recall, c.f1),
        None => ",,,".to_owned(),
    }
}

/// Renders the report as CSV: one line per (row, fold) plus `mean` and
/// `std` lines per row; cells of excluded folds are left empty.
pub fn render_csv(report: &EvalReport) -> String {
    let mut out = String::from("class,fold,ap,precision,recall,f1\n");
    for row in &report.rows {
        for (f, cell) in row.per_fold.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", row.label, f + 1, csv_cell(cell.as_ref())));
        }
        out.push_str(&format!("{},mean,{}\n", row.label, csv_cell(row.mean.as_ref())));
        out.push_str(&format!("{},std,{}\n", row.label, csv_cell(row.std.as_ref())));
    }
    out
}

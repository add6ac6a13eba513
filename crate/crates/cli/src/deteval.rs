//! `wardlens deteval`: score predictions against ground truth over
//! patient-grouped folds, from a supplied fold file or a seeded split.
//!
//! The fold file lists test-set memberships (`fold,patient_id`); each
//! fold's train set is every sample patient outside its test set. A
//! patient in two test sets is leakage and fails the run.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use wardlens_core::domain::{FrameGeometry, PatientId};
use wardlens_core::ingest::{parse_detection_stream, PatientFrames};
use wardlens_deteval::folds::{grouped_kfold, validate_folds};
use wardlens_deteval::report::{render_csv, render_text};
use wardlens_deteval::samples::{classes_present, join_streams, patients_present, split_by_folds};
use wardlens_deteval::{evaluate_folds, FoldSpec};

use crate::args::{DetevalArgs, FormatFlag};
use crate::fail::{domain, usage, CliError};
use crate::load::{ensure_out_dir, open_reader, read_to_string, write_artifact};

/// The paper-protocol IoU matching threshold.
pub const IOU_THRESHOLD: f64 = 0.5;

const FOLDS_HEADER: &str = "fold,patient_id";

fn parse_stream(path: &Path) -> Result<(PatientFrames, usize), CliError> {
    let geometry = FrameGeometry::default();
    let (frames, report) = parse_detection_stream(open_reader(path)?, &geometry)
        .map_err(|err| usage(format!("while reading {}: {err}", path.display())))?;
    Ok((frames, report.rejects.len()))
}

/// Parses the `fold,patient_id` test-membership file into fold specs whose
/// train sets are the complement within `patients`.
pub fn parse_folds_file(
    text: &str,
    patients: &BTreeSet<PatientId>,
) -> Result<Vec<FoldSpec>, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == FOLDS_HEADER => {}
        Some((_, header)) => {
            return Err(usage(format!(
                "folds file: expected header `{FOLDS_HEADER}`, got `{header}`"
            )))
        }
        None => return Err(usage("folds file is empty")),
    }

    let mut test_sets: BTreeMap<usize, BTreeSet<PatientId>> = BTreeMap::new();
    for (index, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((fold, patient)) = line.split_once(',') else {
            return Err(usage(format!(
                "folds file line {}: expected `fold,patient_id`, got `{line}`",
                index + 1
            )));
        };
        let fold: usize = fold.trim().parse().map_err(|_| {
            usage(format!(
                "folds file line {}: invalid fold index `{fold}`",
                index + 1
            ))
        })?;
        let patient_id = PatientId::new(patient.trim()).map_err(|err| {
            usage(format!("folds file line {}: {err}", index + 1))
        })?;
        test_sets.entry(fold).or_default().insert(patient_id);
    }

    let mut folds = Vec::with_capacity(test_sets.len());
    for (position, (_, test)) in test_sets.into_iter().enumerate() {
        let train: BTreeSet<PatientId> = patients.difference(&test).cloned().collect();
        folds.push(FoldSpec::new(position, test, train).map_err(domain)?);
    }
    Ok(folds)
}

/// Runs the subcommand.
pub fn run(args: &DetevalArgs) -> Result<(), CliError> {
    let (predictions, pred_rejects) = parse_stream(&args.predictions)?;
    let (ground_truth, gt_rejects) = parse_stream(&args.ground_truth)?;
    if pred_rejects + gt_rejects > 0 {
        eprintln!(
            "warning: {pred_rejects} prediction and {gt_rejects} ground-truth line(s) rejected; \
             continuing with accepted records"
        );
    }

    let samples = join_streams(&predictions, &ground_truth);
    if samples.is_empty() {
        return Err(domain(
            "no frames shared between predictions and ground truth",
        ));
    }
    let patients = patients_present(&samples);

    let folds = match &args.folds {
        Some(path) => {
            let folds = parse_folds_file(&read_to_string(path)?, &patients)?;
            validate_folds(&folds).map_err(domain)?;
            folds
        }
        None => grouped_kfold(&patients, args.kfold, args.seed).map_err(domain)?,
    };

    let per_fold = split_by_folds(&samples, &folds);
    let classes = classes_present(&samples);
    let report = evaluate_folds(&per_fold, &classes, IOU_THRESHOLD).map_err(domain)?;

    let text = render_text(&report);
    let csv = render_csv(&report);
    ensure_out_dir(&args.out)?;
    write_artifact(&args.out, "deteval.txt", &text)?;
    write_artifact(&args.out, "deteval.csv", &csv)?;

    match args.format {
        FormatFlag::Text => print!("{text}"),
        FormatFlag::Csv => print!("{csv}"),
    }
    Ok(())
}

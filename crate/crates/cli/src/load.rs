//! Shared file plumbing: reading cohort inputs into a bundle and writing
//! report artifacts, with every failure mapped onto the exit contract.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use wardlens_core::domain::FrameGeometry;
use wardlens_core::ingest::{
    parse_acuity_events, parse_delirium_events, parse_detection_stream, parse_pain_events,
    validate_cohort, CohortBundle, ValidationReport,
};

use crate::fail::{usage, CliError};

/// Opens a file for buffered reading; missing or unreadable files are
/// usage failures (exit 2).
pub fn open_reader(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|err| usage(format!("cannot open {}: {err}", path.display())))
}

/// Reads a whole file; missing or unreadable files are usage failures.
pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|err| usage(format!("cannot read {}: {err}", path.display())))
}

/// Creates the output directory (and parents) if needed.
pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|err| usage(format!("cannot create {}: {err}", dir.display())))
}

/// Writes one artifact file into the output directory and returns its path
/// for display.
pub fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<String, CliError> {
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|err| usage(format!("cannot write {}: {err}", path.display())))?;
    Ok(path.display().to_string())
}

/// Parses the four cohort files into a bundle plus one merged validation
/// report (parser findings from all files, then orphan/coverage findings
/// from cohort-level validation). Reader failures are usage failures;
/// malformed content lands in the report instead.
pub fn load_bundle(
    detections: &Path,
    pain: &Path,
    acuity: &Path,
    delirium: &Path,
) -> Result<(CohortBundle, ValidationReport), CliError> {
    let geometry = FrameGeometry::default();
    let io_fail = |path: &Path| {
        let shown = path.display().to_string();
        move |err: wardlens_core::ingest::IngestError| {
            usage(format!("while reading {shown}: {err}"))
        }
    };

    let (frames, mut report) =
        parse_detection_stream(open_reader(detections)?, &geometry).map_err(io_fail(detections))?;
    let (pain_records, pain_report) =
        parse_pain_events(open_reader(pain)?).map_err(io_fail(pain))?;
    let (acuity_records, acuity_report) =
        parse_acuity_events(open_reader(acuity)?).map_err(io_fail(acuity))?;
    let (delirium_records, delirium_report) =
        parse_delirium_events(open_reader(delirium)?).map_err(io_fail(delirium))?;

    report.merge(pain_report);
    report.merge(acuity_report);
    report.merge(delirium_report);

    let bundle = CohortBundle {
        frames,
        pain: pain_records,
        acuity: acuity_records,
        delirium: delirium_records,
    };

    // Cohort-level findings are attached field-by-field: merging the whole
    // report would double the record counts.
    let cohort = validate_cohort(&bundle);
    report.orphans = cohort.orphans;
    report.coverage = cohort.coverage;
    report.notes.extend(cohort.notes);

    Ok((bundle, report))
}

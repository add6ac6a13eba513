//! `wardlens synth`: generate a planted synthetic cohort and prove the
//! output conforms by re-validating it from disk.
//!
//! The generated files are the exact ingest formats, so the invariant
//! `synth ∘ validate` succeeding is checked on every run: after writing,
//! the files are parsed back and any reject or orphan fails the command.

use wardlens_synth::{generate_cohort, SynthConfig};

use crate::args::SynthArgs;
use crate::fail::{from_synth, CliError};
use crate::load::{ensure_out_dir, load_bundle, read_to_string, write_artifact};

/// Runs the subcommand.
pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let text = read_to_string(&args.config)?;
    let mut config = SynthConfig::from_key_values(&text).map_err(from_synth)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let cohort = generate_cohort(&config).map_err(from_synth)?;

    ensure_out_dir(&args.out)?;
    let detections = write_artifact(
        &args.out,
        "detections.tsv",
        &wardlens_core::ingest::detection_stream_to_string(&cohort.frames),
    )?;
    let pain = write_artifact(
        &args.out,
        "pain.csv",
        &wardlens_core::ingest::pain_events_to_string(&cohort.pain),
    )?;
    let acuity = write_artifact(
        &args.out,
        "acuity.csv",
        &wardlens_core::ingest::acuity_events_to_string(&cohort.acuity),
    )?;
    let delirium = write_artifact(
        &args.out,
        "delirium.csv",
        &wardlens_core::ingest::delirium_events_to_string(&cohort.delirium),
    )?;
    write_artifact(&args.out, "ledger.csv", &cohort.ledger.to_csv())?;

    // Round-trip guard: the files just written must parse back clean.
    let (_bundle, report) = load_bundle(
        detections.as_ref(),
        pain.as_ref(),
        acuity.as_ref(),
        delirium.as_ref(),
    )?;
    if !report.is_clean() || !report.orphans.is_empty() {
        return Err(CliError::Domain(format!(
            "generated files failed re-validation ({} reject(s), {} orphan(s)) — \
             please report this as a generator bug",
            report.rejects.len(),
            report.orphans.len()
        )));
    }

    println!(
        "patients: {}   frames: {}   events: {} pain / {} acuity / {} delirium",
        report.counts.patients,
        report.counts.frames,
        report.counts.pain,
        report.counts.acuity,
        report.counts.delirium
    );
    println!("ledger rows: {}", cohort.ledger.rows.len());
    println!("re-validation: clean");
    Ok(())
}

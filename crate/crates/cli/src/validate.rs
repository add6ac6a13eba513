//! `wardlens validate`: parse everything, print the findings, and fail
//! (exit 1) iff any line was rejected.

use crate::args::ValidateArgs;
use crate::fail::CliError;
use crate::load::load_bundle;

/// Runs the subcommand.
pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    let (_bundle, report) = load_bundle(&args.detections, &args.pain, &args.acuity, &args.delirium)?;
    print!("{}", report.render_text());
    if report.is_clean() {
        Ok(())
    } else {
        Err(CliError::Domain(format!(
            "validation failed: {} line(s) rejected",
            report.rejects.len()
        )))
    }
}

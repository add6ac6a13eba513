//! `wardlens analyze`: aligned windows → association rows → artifacts.
//!
//! Policy resolution is layered: defaults, then the config file's
//! `window.*` / `metrics.*` keys, then individual flags on top. The three
//! artifacts (text table, long-format CSV, histogram bins) are always
//! written; `--format` only chooses which one is echoed to stdout.

use wardlens_core::align::{build_windows, WindowPolicy};
use wardlens_core::config::{
    apply_window_keys, counting_policy_from_map, ensure_known_keys, parse_counting_classes,
    parse_key_values, parse_span, METRICS_KEYS, WINDOW_KEYS,
};
use wardlens_core::metrics::CountingPolicy;
use wardlens_report::{
    histogram_bins, observe_windows, render_csv, render_text, run_all_associations,
};

use crate::args::{AnalyzeArgs, FormatFlag};
use crate::fail::{domain, from_config, CliError};
use crate::load::{ensure_out_dir, load_bundle, read_to_string, write_artifact};

/// Window policy plus counting policy after all overrides.
#[derive(Debug)]
pub struct ResolvedPolicy {
    /// Alignment spans and admission threshold.
    pub windows: WindowPolicy,
    /// Which posture classes count as people.
    pub counting: CountingPolicy,
}

/// Applies config-file keys and then flag overrides on top of defaults.
pub fn resolve_policy(args: &AnalyzeArgs) -> Result<ResolvedPolicy, CliError> {
    let mut policy = WindowPolicy::default();
    let mut counting = CountingPolicy::default();

    if let Some(path) = &args.config {
        let text = read_to_string(path)?;
        let map = parse_key_values(&text).map_err(from_config)?;
        let allowed: Vec<&str> = WINDOW_KEYS.iter().chain(METRICS_KEYS.iter()).copied().collect();
        ensure_known_keys(&map, &allowed).map_err(from_config)?;
        policy = apply_window_keys(&map, policy).map_err(from_config)?;
        if let Some(from_file) = counting_policy_from_map(&map).map_err(from_config)? {
            counting = from_file;
        }
    }

    if let Some(span) = &args.window_pain {
        policy = policy
            .with_pain(parse_span(span).map_err(from_config)?)
            .map_err(domain)?;
    }
    if let Some(span) = &args.window_delirium {
        policy = policy
            .with_delirium(parse_span(span).map_err(from_config)?)
            .map_err(domain)?;
    }
    if let Some(span) = &args.window_acuity {
        policy = policy
            .with_acuity(parse_span(span).map_err(from_config)?)
            .map_err(domain)?;
    }
    if let Some(min_frames) = args.min_frames {
        policy = policy.with_min_frames(min_frames).map_err(domain)?;
    }
    if let Some(classes) = &args.counting_classes {
        counting = parse_counting_classes(classes).map_err(from_config)?;
    }

    Ok(ResolvedPolicy {
        windows: policy,
        counting,
    })
}

/// Runs the subcommand.
pub fn run(args: &AnalyzeArgs) -> Result<(), CliError> {
    let resolved = resolve_policy(args)?;
    let (bundle, report) = load_bundle(&args.detections, &args.pain, &args.acuity, &args.delirium)?;
    if !report.is_clean() {
        eprintln!(
            "warning: {} line(s) rejected during parsing; continuing with accepted records",
            report.rejects.len()
        );
    }

    let (windows, exclusions) = build_windows(&bundle, &resolved.windows);
    if windows.is_empty() {
        return Err(domain("no admissible windows"));
    }

    let observations = observe_windows(&windows, &resolved.counting).map_err(domain)?;
    let rows = run_all_associations(&observations, args.adjust.into()).map_err(domain)?;

    let text = render_text(&rows);
    let csv = render_csv(&rows);
    let bins = histogram_bins(&observations);

    ensure_out_dir(&args.out)?;
    write_artifact(&args.out, "associations.txt", &text)?;
    write_artifact(&args.out, "associations.csv", &csv)?;
    write_artifact(&args.out, "histogram_bins.csv", &bins)?;

    eprintln!(
        "windows: {} admitted, {} excluded",
        windows.len(),
        exclusions.excluded.len()
    );
    match args.format {
        FormatFlag::Text => print!("{text}"),
        FormatFlag::Csv => print!("{csv}"),
    }
    Ok(())
}

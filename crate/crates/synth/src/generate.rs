//! Cohort realization: turns a [`SynthConfig`] into detection frames,
//! clinical events, and a ground-truth ledger.
//!
//! Planned windows are dealt round-robin over patients (event `e` goes to
//! patient `e mod patients`), and each patient holds at most one event per
//! calendar day, at 14:00 local for day events and 02:00 for night events.
//! That spacing keeps every patient's frame timeline strictly increasing:
//! the latest window a day event can cover ends at 13:45, the earliest
//! frame the next day's event can need is 22:00 the same evening (a night
//! acuity window reaching back four hours from 02:00).
//!
//! Each window runs an independent birth–death visitor process at one step
//! per second: visitors arrive at `rate/3600` per second, each present
//! visitor departs with probability `1/(60·dwell)` per second, and the
//! count starts at a Poisson draw with the stationary mean `rate·dwell/60`.
//! The per-frame draw order is fixed (lying, then departures, then the
//! arrival), so every byte of output is a pure function of the seed.
//! Per-patient generator streams are seeded `seed ⊕ index`, which makes
//! patients independent and the output identical whatever the thread count.

use std::fmt::Write as _;

use chrono::{Days, Duration};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use wardlens_core::align::WindowPolicy;
use wardlens_core::domain::{
    classify_phase, AcuityFlags, AcuityRecord, BoundingBox, CamIcu, DeliriumRecord, Detection,
    DetectionFrame, FrameGeometry, Gcs, PainRecord, PatientId, Phase, PostureClass, Rass,
    Timestamp,
};
use wardlens_core::exec;
use wardlens_core::ingest::PatientFrames;
use wardlens_core::metrics::{window_metrics, CountingPolicy, WindowMetrics};

use crate::config::{SynthConfig, SynthGroup};
use crate::SynthError;

/// Everything the generator produces for one run: frames keyed by patient,
/// the three clinical event lists, and the ledger describing what was
/// planted where.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    /// Detection frames per patient, in timestamp order.
    pub frames: PatientFrames,
    /// Pain assessments, one per pain window.
    pub pain: Vec<PainRecord>,
    /// Acuity intervals, one per acuity window.
    pub acuity: Vec<AcuityRecord>,
    /// Delirium assessments, one per delirium window.
    pub delirium: Vec<DeliriumRecord>,
    /// Ground truth: one row per generated window.
    pub ledger: GroundTruthLedger,
}

/// Ground truth for one generated window: where it is, what occupancy was
/// planted, and what the frames actually realized.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    /// The patient the window belongs to.
    pub patient_id: PatientId,
    /// The group whose process generated the window.
    pub group: SynthGroup,
    /// The clinical event the window is aligned to.
    pub event_timestamp: Timestamp,
    /// Day/night phase of the event (the generated frames share it).
    pub phase: Phase,
    /// Stationary mean occupancy the process was tuned to.
    pub planted_mean: f64,
    /// Metrics actually realized by the generated frames.
    pub metrics: WindowMetrics,
}

/// One row per generated window, in patient-index order and, per patient,
/// event order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruthLedger {
    /// The rows.
    pub rows: Vec<LedgerRow>,
}

impl GroundTruthLedger {
    /// Rows whose window was generated for `group`.
    pub fn rows_for(&self, group: SynthGroup) -> impl Iterator<Item = &LedgerRow> {
        self.rows.iter().filter(move |row| row.group == group)
    }

    /// Serializes the ledger as CSV. Floats use the shortest representation
    /// that round-trips, so reparsing reproduces the exact values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "outcome,group,patient_id,event_timestamp,phase,planted_mean,frames,\
             realized_mean,realized_variance,realized_lying\n",
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                row.group.outcome().name(),
                row.group.label(),
                row.patient_id,
                row.event_timestamp.to_rfc3339(),
                row.phase.name(),
                row.planted_mean,
                row.metrics.frame_count,
                row.metrics.visitation_mean,
                row.metrics.visitation_variance,
                row.metrics.lying_proportion,
            );
        }
        out
    }
}

/// Everything one patient's generator stream produces.
struct PatientOutput {
    patient_id: PatientId,
    frames: Vec<DetectionFrame>,
    pain: Vec<PainRecord>,
    acuity: Vec<AcuityRecord>,
    delirium: Vec<DeliriumRecord>,
    rows: Vec<LedgerRow>,
}

/// Deals the planned windows round-robin over patients: event `e` goes to
/// patient `e mod patients`, scanning groups in [`SynthGroup::ALL`] order.
fn planned_events(config: &SynthConfig) -> Vec<Vec<SynthGroup>> {
    let mut per_patient = vec![Vec::new(); config.patients];
    let mut event = 0usize;
    for group in SynthGroup::ALL {
        let windows = config.plans.get(&group).map_or(0, |plan| plan.windows);
        for _ in 0..windows {
            per_patient[event % config.patients].push(group);
            event += 1;
        }
    }
    per_patient
}

fn domain(err: impl std::fmt::Display) -> SynthError {
    SynthError::Domain(err.to_string())
}

/// The bed: a fixed box in the lower middle of the frame.
fn lying_detection(confidence: f64, geometry: &FrameGeometry) -> Result<Detection, SynthError> {
    let bbox = BoundingBox::new(180.0, 260.0, 420.0, 400.0, geometry).map_err(domain)?;
    Detection::new(bbox, PostureClass::LyingInBed, confidence).map_err(domain)
}

/// Visitor `slot` standing in a 10×12 grid of 48×96 boxes; slots beyond
/// 119 wrap onto earlier grid cells (counts stay correct either way).
fn standing_detection(
    slot: usize,
    confidence: f64,
    geometry: &FrameGeometry,
) -> Result<Detection, SynthError> {
    let column = (slot % 10) as f64;
    let row = ((slot / 10) % 12) as f64;
    let x_min = 16.0 + 56.0 * column;
    let y_min = 24.0 + 40.0 * row;
    let bbox = BoundingBox::new(x_min, y_min, x_min + 48.0, y_min + 96.0, geometry)
        .map_err(domain)?;
    Detection::new(bbox, PostureClass::Standing, confidence).map_err(domain)
}

/// Places one event on the patient's `day`-th calendar day: 14:00 local
/// with probability `day_fraction`, 02:00 otherwise. One draw per event.
fn event_timestamp(
    config: &SynthConfig,
    day: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Timestamp, SynthError> {
    let is_day = rng.gen_bool(config.day_fraction);
    let hour = if is_day { 14 } else { 2 };
    let date = config
        .start_date
        .checked_add_days(Days::new(day as u64))
        .ok_or_else(|| SynthError::Domain("calendar overflow placing events".to_owned()))?;
    let naive = date
        .and_hms_opt(hour, 0, 0)
        .expect("14:00 and 02:00 are valid wall-clock times");
    naive
        .and_local_timezone(config.utc_offset)
        .single()
        .ok_or_else(|| SynthError::Domain("ambiguous local time".to_owned()))
}

/// Runs the visitor process for one window and renders its frames.
fn simulate_window(
    config: &SynthConfig,
    group: SynthGroup,
    patient_id: &PatientId,
    event_time: &Timestamp,
    geometry: &FrameGeometry,
    policy: &WindowPolicy,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<DetectionFrame>, SynthError> {
    let rate = config.arrival_rate(group)?;
    let arrival = rate / 3600.0;
    let departure = 1.0 / (60.0 * config.mean_dwell_minutes);
    let mean_visitors = rate * config.mean_dwell_minutes / 60.0;
    let mut visitors = if mean_visitors > 0.0 {
        let stationary = Poisson::new(mean_visitors).map_err(domain)?;
        stationary.sample(rng) as usize
    } else {
        0
    };
    let start = *event_time + policy.offsets(group.outcome()).start;
    let mut frames = Vec::with_capacity(config.frames_per_window);
    for second in 0..config.frames_per_window {
        let lying = rng.gen_bool(config.lying_probability);
        let mut detections = Vec::with_capacity(visitors + usize::from(lying));
        if lying {
            detections.push(lying_detection(config.confidence, geometry)?);
        }
        for slot in 0..visitors {
            detections.push(standing_detection(slot, config.confidence, geometry)?);
        }
        frames.push(DetectionFrame {
            patient_id: patient_id.clone(),
            timestamp: start + Duration::seconds(second as i64),
            detections,
        });
        let mut departed = 0usize;
        for _ in 0..visitors {
            if rng.gen_bool(departure) {
                departed += 1;
            }
        }
        visitors -= departed;
        if rng.gen_bool(arrival) {
            visitors += 1;
        }
    }
    Ok(frames)
}

/// Generates one patient's whole timeline from its dedicated stream.
fn patient_timeline(
    config: &SynthConfig,
    index: usize,
    groups: &[SynthGroup],
) -> Result<PatientOutput, SynthError> {
    let geometry = FrameGeometry::default();
    let policy = WindowPolicy::default();
    let counting = CountingPolicy::default();
    let patient_id = PatientId::new(format!("P{index:03}")).map_err(domain)?;
    let rass_zero = Rass::new(0).map_err(domain)?;
    let gcs_full = Gcs::new(15).map_err(domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ index as u64);
    let mut out = PatientOutput {
        patient_id: patient_id.clone(),
        frames: Vec::new(),
        pain: Vec::new(),
        acuity: Vec::new(),
        delirium: Vec::new(),
        rows: Vec::new(),
    };
    for (day, &group) in groups.iter().enumerate() {
        let event_time = event_timestamp(config, day, &mut rng)?;
        let window = simulate_window(
            config,
            group,
            &patient_id,
            &event_time,
            &geometry,
            &policy,
            &mut rng,
        )?;
        let metrics = window_metrics(&window, &counting).map_err(domain)?;
        out.rows.push(LedgerRow {
            patient_id: patient_id.clone(),
            group,
            event_timestamp: event_time,
            phase: classify_phase(&event_time),
            planted_mean: config.plans[&group].occupancy,
            metrics,
        });
        out.frames.extend(window);
        match group {
            SynthGroup::PainNoMild => out.pain.push(PainRecord {
                patient_id: patient_id.clone(),
                timestamp: event_time,
                dvprs: config.dvprs_no_mild,
            }),
            SynthGroup::PainModerateSevere => out.pain.push(PainRecord {
                patient_id: patient_id.clone(),
                timestamp: event_time,
                dvprs: config.dvprs_moderate_severe,
            }),
            SynthGroup::AcuityStable => out.acuity.push(AcuityRecord::new(
                patient_id.clone(),
                event_time,
                AcuityFlags::default(),
            )),
            SynthGroup::AcuityUnstable => out.acuity.push(AcuityRecord::new(
                patient_id.clone(),
                event_time,
                AcuityFlags {
                    ventilation: true,
                    ..AcuityFlags::default()
                },
            )),
            SynthGroup::DeliriumNonDelirious => out.delirium.push(
                DeliriumRecord::new(
                    patient_id.clone(),
                    event_time,
                    Some(rass_zero),
                    Some(CamIcu::Negative),
                    Some(gcs_full),
                    None,
                )
                .map_err(domain)?,
            ),
            SynthGroup::DeliriumDelirious => out.delirium.push(
                DeliriumRecord::new(
                    patient_id.clone(),
                    event_time,
                    Some(rass_zero),
                    Some(CamIcu::Positive),
                    Some(gcs_full),
                    None,
                )
                .map_err(domain)?,
            ),
        }
    }
    Ok(out)
}

/// Generates a full cohort from the config. Patients are generated in
/// parallel (each from its own seeded stream) and merged in index order,
/// so the result is byte-for-byte deterministic in the seed alone.
pub fn generate_cohort(config: &SynthConfig) -> Result<Cohort, SynthError> {
    config.validate()?;
    let events = planned_events(config);
    let outputs = exec::par_map_indices(events.len(), |index| {
        patient_timeline(config, index, &events[index])
    });
    let mut cohort = Cohort {
        frames: PatientFrames::new(),
        pain: Vec::new(),
        acuity: Vec::new(),
        delirium: Vec::new(),
        ledger: GroundTruthLedger::default(),
    };
    for output in outputs {
        let output = output?;
        if !output.frames.is_empty() {
            cohort.frames.insert(output.patient_id.clone(), output.frames);
        }
        cohort.pain.extend(output.pain);
        cohort.acuity.extend(output.acuity);
        cohort.delirium.extend(output.delirium);
        cohort.ledger.rows.extend(output.rows);
    }
    Ok(cohort)
}

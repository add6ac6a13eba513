//! Streaming parsers and serializers for detection-stream and clinical-event
//! files, plus cohort-level validation (coverage spans, gap detection,
//! orphan events).
//!
//! Parsing is skip-and-report: a malformed line never aborts the run, it
//! becomes exactly one reject entry with a reason, so long sensor captures
//! with partial corruption still yield every salvageable record. The
//! invariant `accepted + rejected = data lines read` holds for every parser
//! (the single header line of event files is framing, not data, and is
//! counted separately).
//!
//! Formats:
//! - detection stream: one frame per line, `patient_id<TAB>timestamp<TAB>`
//!   `detections`, where detections is a semicolon-separated list of
//!   `class,conf,x_min,y_min,x_max,y_max` entries (empty = empty room);
//! - clinical events: comma-separated with a header; pain
//!   `patient_id,timestamp,dvprs`; acuity `patient_id,interval_end,crrt,`
//!   `ventilation,vasopressor,transfusion_ge_10u_24h[,label]`; delirium
//!   `patient_id,timestamp,rass,cam_icu,gcs[,delirious]`.
//!
//! Timestamps are RFC 3339 with a fixed offset; all records in one stream
//! must share the offset (one facility clock per dataset). Frame timestamps
//! must be whole seconds and strictly increase within a patient stream.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};

use chrono::{DateTime, FixedOffset};
use thiserror::Error;

use crate::domain::{
    AcuityFlags, AcuityRecord, BoundingBox, CamIcu, DeliriumRecord, Detection, DetectionFrame,
    Dvprs, FrameGeometry, Gcs, OutcomeKind, PainRecord, PatientId, PostureClass, Rass, Timestamp,
};

/// Frames grouped per patient, each list in strictly increasing timestamp
/// order.
pub type PatientFrames = BTreeMap<PatientId, Vec<DetectionFrame>>;

/// Non-recoverable ingestion failures. Malformed *content* never raises
/// these — only the underlying reader failing does.
#[derive(Debug, Error)]
pub enum IngestError {
    /// The underlying byte stream failed.
    #[error("i/o failure while reading input")]
    Io(#[from] io::Error),
}

/// One rejected input line with its reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedLine {
    /// 1-based physical line number in the source.
    pub line_number: usize,
    /// Why the line was rejected.
    pub reason: String,
    /// The offending line (lossy-decoded if it was not valid UTF-8).
    pub content: String,
}

/// A clinical event whose patient has no frames in the bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrphanEvent {
    /// Which outcome stream the event came from.
    pub kind: OutcomeKind,
    /// The patient with no frame coverage.
    pub patient_id: PatientId,
    /// The event timestamp.
    pub timestamp: Timestamp,
}

/// An inter-frame interval longer than the gap threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageGap {
    /// Last frame before the gap.
    pub after: Timestamp,
    /// First frame after the gap.
    pub before: Timestamp,
    /// Gap length in whole seconds.
    pub seconds: i64,
}

/// Per-patient frame coverage: stay span, frame count, and gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatientCoverage {
    /// The covered patient.
    pub patient_id: PatientId,
    /// First frame timestamp.
    pub first: Timestamp,
    /// Last frame timestamp.
    pub last: Timestamp,
    /// Number of frames in the stay.
    pub frame_count: usize,
    /// Inter-frame intervals longer than [`GAP_THRESHOLD_SECONDS`].
    pub gaps: Vec<CoverageGap>,
}

/// Record totals carried by a [`ValidationReport`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecordCounts {
    /// Distinct patients with at least one frame.
    pub patients: usize,
    /// Accepted detection frames.
    pub frames: usize,
    /// Detections across all accepted frames.
    pub detections: usize,
    /// Accepted pain records.
    pub pain: usize,
    /// Accepted acuity records.
    pub acuity: usize,
    /// Accepted delirium records.
    pub delirium: usize,
}

/// Inter-frame intervals strictly longer than this many seconds are
/// reported as coverage gaps (five missed frames at the nominal 1 FPS).
pub const GAP_THRESHOLD_SECONDS: i64 = 5;

/// Outcome of parsing or validating: counts, rejects, coverage, notes.
/// `accepted + rejects.len() == lines_read` always holds for parser-produced
/// reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    /// Data lines read (the event-file header line is excluded).
    pub lines_read: usize,
    /// Lines accepted as records.
    pub accepted: usize,
    /// Rejected lines with reasons.
    pub rejects: Vec<RejectedLine>,
    /// Record totals.
    pub counts: RecordCounts,
    /// Events without frame coverage for their patient.
    pub orphans: Vec<OrphanEvent>,
    /// Per-patient coverage spans and gaps.
    pub coverage: Vec<PatientCoverage>,
    /// Free-form advisory notes (e.g. mixed zone offsets across files).
    pub notes: Vec<String>,
}

impl ValidationReport {
    /// True when nothing was rejected.
    pub fn is_clean(&self) -> bool {
        self.rejects.is_empty()
    }

    /// Folds another report into this one (counts add, lists concatenate).
    /// Meant for combining *parser* reports over disjoint inputs; merging a
    /// [`validate_cohort`] report of the same data would double its counts —
    /// attach its orphan/coverage findings by field instead.
    pub fn merge(&mut self, other: ValidationReport) {
        self.lines_read += other.lines_read;
        self.accepted += other.accepted;
        self.rejects.extend(other.rejects);
        self.counts.patients += other.counts.patients;
        self.counts.frames += other.counts.frames;
        self.counts.detections += other.counts.detections;
        self.counts.pain += other.counts.pain;
        self.counts.acuity += other.counts.acuity;
        self.counts.delirium += other.counts.delirium;
        self.orphans.extend(other.orphans);
        self.coverage.extend(other.coverage);
        self.notes.extend(other.notes);
    }

    /// Renders the report as plain text for terminal display.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "lines read: {}   accepted: {}   rejected: {}\n",
            self.lines_read,
            self.accepted,
            self.rejects.len()
        ));
        out.push_str(&format!(
            "patients: {}   frames: {}   detections: {}\n",
            self.counts.patients, self.counts.frames, self.counts.detections
        ));
        out.push_str(&format!(
            "pain: {}   acuity: {}   delirium: {}\n",
            self.counts.pain, self.counts.acuity, self.counts.delirium
        ));
        if !self.orphans.is_empty() {
            out.push_str(&format!("orphan events: {}\n", self.orphans.len()));
            for orphan in &self.orphans {
                out.push_str(&format!(
                    "  {} {} at {}\n",
                    orphan.kind.name(),
                    orphan.patient_id,
                    orphan.timestamp.to_rfc3339()
                ));
            }
        }
        let gap_total: usize = self.coverage.iter().map(|c| c.gaps.len()).sum();
        if gap_total > 0 {
            out.push_str(&format!("coverage gaps: {gap_total}\n"));
            for cov in self.coverage.iter().filter(|c| !c.gaps.is_empty()) {
                let longest = cov.gaps.iter().map(|g| g.seconds).max().unwrap_or(0);
                out.push_str(&format!(
                    "  {}: {} gaps, longest {} s\n",
                    cov.patient_id,
                    cov.gaps.len(),
                    longest
                ));
            }
        }
        if !self.rejects.is_empty() {
            out.push_str("rejects:\n");
            for reject in &self.rejects {
                out.push_str(&format!(
                    "  line {}: {}\n",
                    reject.line_number, reject.reason
                ));
            }
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

/// The full parsed dataset: frames per patient plus the three clinical
/// event streams. Immutable once assembled.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CohortBundle {
    /// Frames grouped by patient, strictly increasing timestamps.
    pub frames: PatientFrames,
    /// Pain observations.
    pub pain: Vec<PainRecord>,
    /// Acuity intervals.
    pub acuity: Vec<AcuityRecord>,
    /// Delirium assessments.
    pub delirium: Vec<DeliriumRecord>,
}

impl CohortBundle {
    /// Total frame count across all patients.
    pub fn total_frames(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }
}

/// Reads raw lines (split on `\n`, trailing `\r` stripped) so that invalid
/// UTF-8 is a per-line reject rather than a fatal error.
struct LineReader<R> {
    inner: R,
    line_number: usize,
}

impl<R: BufRead> LineReader<R> {
    fn new(inner: R) -> Self {
        LineReader {
            inner,
            line_number: 0,
        }
    }

    /// Returns `(line_number, Ok(text) | Err(lossy_text))`; `None` at EOF.
    fn next_line(&mut self) -> io::Result<Option<(usize, Result<String, String>)>> {
        let mut buf = Vec::new();
        let read = self.inner.read_until(b'\n', &mut buf)?;
        if read == 0 {
            return Ok(None);
        }
        self.line_number += 1;
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        let line = match String::from_utf8(buf) {
            Ok(text) => Ok(text),
            Err(err) => Err(String::from_utf8_lossy(err.as_bytes()).into_owned()),
        };
        Ok(Some((self.line_number, line)))
    }
}

fn reject(report: &mut ValidationReport, line_number: usize, reason: impl Into<String>, content: &str) {
    report.rejects.push(RejectedLine {
        line_number,
        reason: reason.into(),
        content: content.to_owned(),
    });
}

fn parse_timestamp(text: &str) -> Result<Timestamp, String> {
    DateTime::parse_from_rfc3339(text).map_err(|e| format!("invalid timestamp `{text}`: {e}"))
}

/// Checks the one-clock-per-stream rule: the first accepted record fixes
/// the offset, later records must match it.
fn check_offset(
    stream_offset: &mut Option<FixedOffset>,
    ts: &Timestamp,
) -> Result<(), String> {
    match stream_offset {
        Some(offset) if ts.offset() != offset => Err(format!(
            "time zone offset {} differs from stream offset {}",
            ts.offset(),
            offset
        )),
        _ => Ok(()),
    }
}

/// Parses a detection stream into per-patient frame lists. Malformed lines
/// (bad field counts, invalid timestamps, sub-second timestamps, offset
/// mismatches, unknown posture tokens, out-of-bounds boxes, non-monotonic
/// timestamps) are rejected individually; the parse itself only fails on
/// reader errors.
pub fn parse_detection_stream<R: BufRead>(
    reader: R,
    geometry: &FrameGeometry,
) -> Result<(PatientFrames, ValidationReport), IngestError> {
    let mut lines = LineReader::new(reader);
    let mut frames: PatientFrames = BTreeMap::new();
    let mut report = ValidationReport::default();
    let mut stream_offset: Option<FixedOffset> = None;

    while let Some((line_number, line)) = lines.next_line()? {
        report.lines_read += 1;
        let line = match line {
            Ok(text) => text,
            Err(lossy) => {
                reject(&mut report, line_number, "invalid utf-8", &lossy);
                continue;
            }
        };
        match parse_frame_line(&line, geometry, &mut stream_offset, &frames) {
            Ok(frame) => {
                report.accepted += 1;
                report.counts.detections += frame.detections.len();
                frames.entry(frame.patient_id.clone()).or_default().push(frame);
            }
            Err(reason) => reject(&mut report, line_number, reason, &line),
        }
    }
    report.counts.frames = report.accepted;
    report.counts.patients = frames.len();
    Ok((frames, report))
}

fn parse_frame_line(
    line: &str,
    geometry: &FrameGeometry,
    stream_offset: &mut Option<FixedOffset>,
    frames: &PatientFrames,
) -> Result<DetectionFrame, String> {
    let mut parts = line.splitn(3, '\t');
    let patient = parts.next().unwrap_or_default();
    let (Some(ts_text), Some(detections_text)) = (parts.next(), parts.next()) else {
        return Err("expected 3 tab-separated fields".to_owned());
    };

    let patient_id = PatientId::new(patient).map_err(|e| e.to_string())?;
    let timestamp = parse_timestamp(ts_text)?;
    if timestamp.timestamp_subsec_nanos() != 0 {
        return Err("subsecond timestamp (frames are whole seconds)".to_owned());
    }
    check_offset(stream_offset, &timestamp)?;

    if let Some(last) = frames.get(&patient_id).and_then(|v| v.last()) {
        if timestamp <= last.timestamp {
            return Err(format!(
                "non-monotonic timestamp: {} does not advance past {}",
                timestamp.to_rfc3339(),
                last.timestamp.to_rfc3339()
            ));
        }
    }

    let mut detections = Vec::new();
    if !detections_text.is_empty() {
        for entry in detections_text.split(';') {
            let fields: Vec<&str> = entry.split(',').collect();
            if fields.len() != 6 {
                return Err(format!(
                    "detection entry needs 6 comma-separated fields, got {}",
                    fields.len()
                ));
            }
            let posture = PostureClass::from_token(fields[0]).map_err(|e| e.to_string())?;
            let mut numbers = [0.0f64; 5];
            for (slot, text) in numbers.iter_mut().zip(&fields[1..]) {
                *slot = text
                    .parse()
                    .map_err(|_| format!("invalid number `{text}` in detection entry"))?;
            }
            let [confidence, x_min, y_min, x_max, y_max] = numbers;
            let bbox = BoundingBox::new(x_min, y_min, x_max, y_max, geometry)
                .map_err(|e| e.to_string())?;
            let detection =
                Detection::new(bbox, posture, confidence).map_err(|e| e.to_string())?;
            detections.push(detection);
        }
    }

    *stream_offset = Some(*timestamp.offset());
    Ok(DetectionFrame {
        patient_id,
        timestamp,
        detections,
    })
}

/// Typed result of [`parse_clinical_events`].
#[derive(Debug, Clone, PartialEq)]
pub enum ClinicalRecords {
    /// Parsed pain observations.
    Pain(Vec<PainRecord>),
    /// Parsed acuity intervals.
    Acuity(Vec<AcuityRecord>),
    /// Parsed delirium assessments.
    Delirium(Vec<DeliriumRecord>),
}

/// Parses one clinical-event file of the given kind. Thin dispatcher over
/// the typed parsers below.
pub fn parse_clinical_events<R: BufRead>(
    reader: R,
    kind: OutcomeKind,
) -> Result<(ClinicalRecords, ValidationReport), IngestError> {
    match kind {
        OutcomeKind::Pain => {
            let (records, report) = parse_pain_events(reader)?;
            Ok((ClinicalRecords::Pain(records), report))
        }
        OutcomeKind::Acuity => {
            let (records, report) = parse_acuity_events(reader)?;
            Ok((ClinicalRecords::Acuity(records), report))
        }
        OutcomeKind::Delirium => {
            let (records, report) = parse_delirium_events(reader)?;
            Ok((ClinicalRecords::Delirium(records), report))
        }
    }
}

const PAIN_HEADER: &str = "patient_id,timestamp,dvprs";
const ACUITY_HEADER: &str = "patient_id,interval_end,crrt,ventilation,vasopressor,transfusion_ge_10u_24h";
const ACUITY_HEADER_LABELED: &str =
    "patient_id,interval_end,crrt,ventilation,vasopressor,transfusion_ge_10u_24h,label";
const DELIRIUM_HEADER: &str = "patient_id,timestamp,rass,cam_icu,gcs";
const DELIRIUM_HEADER_LABELED: &str = "patient_id,timestamp,rass,cam_icu,gcs,delirious";

/// Runs one event parser: validates the header, then feeds every data line
/// through `parse_row`, collecting rejects.
fn parse_event_file<R: BufRead, T>(
    reader: R,
    headers: &[&str],
    mut parse_row: impl FnMut(&str, &mut Option<FixedOffset>) -> Result<T, String>,
) -> Result<(Vec<T>, ValidationReport), IngestError> {
    let mut lines = LineReader::new(reader);
    let mut records = Vec::new();
    let mut report = ValidationReport::default();
    let mut stream_offset: Option<FixedOffset> = None;
    let mut header_checked = false;

    while let Some((line_number, line)) = lines.next_line()? {
        let line = match line {
            Ok(text) => text,
            Err(lossy) => {
                report.lines_read += 1;
                reject(&mut report, line_number, "invalid utf-8", &lossy);
                continue;
            }
        };
        if !header_checked {
            header_checked = true;
            if headers.contains(&line.as_str()) {
                // Header is framing, not data: excluded from lines_read.
                continue;
            }
            report.lines_read += 1;
            reject(
                &mut report,
                line_number,
                format!("expected header `{}`", headers[0]),
                &line,
            );
            continue;
        }
        report.lines_read += 1;
        match parse_row(&line, &mut stream_offset) {
            Ok(record) => {
                report.accepted += 1;
                records.push(record);
            }
            Err(reason) => reject(&mut report, line_number, reason, &line),
        }
    }
    Ok((records, report))
}

fn parse_bool(text: &str) -> Result<bool, String> {
    match text.to_ascii_lowercase().as_str() {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        other => Err(format!("invalid flag `{other}` (want 0/1/true/false)")),
    }
}

fn parse_int(text: &str, field: &str) -> Result<i64, String> {
    text.parse()
        .map_err(|_| format!("invalid integer `{text}` for {field}"))
}

/// Parses `patient_id,timestamp,dvprs` rows.
pub fn parse_pain_events<R: BufRead>(
    reader: R,
) -> Result<(Vec<PainRecord>, ValidationReport), IngestError> {
    let (records, mut report) = parse_event_file(reader, &[PAIN_HEADER], |line, offset| {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(format!("expected 3 comma-separated fields, got {}", fields.len()));
        }
        let patient_id = PatientId::new(fields[0]).map_err(|e| e.to_string())?;
        let timestamp = parse_timestamp(fields[1])?;
        check_offset(offset, &timestamp)?;
        let dvprs = Dvprs::new(parse_int(fields[2], "dvprs")?).map_err(|e| e.to_string())?;
        *offset = Some(*timestamp.offset());
        Ok(PainRecord {
            patient_id,
            timestamp,
            dvprs,
        })
    })?;
    report.counts.pain = report.accepted;
    Ok((records, report))
}

/// Parses `patient_id,interval_end,crrt,ventilation,vasopressor,`
/// `transfusion_ge_10u_24h[,label]` rows. A supplied label must agree with
/// the label the flags derive, or the row is rejected.
pub fn parse_acuity_events<R: BufRead>(
    reader: R,
) -> Result<(Vec<AcuityRecord>, ValidationReport), IngestError> {
    let headers = [ACUITY_HEADER, ACUITY_HEADER_LABELED];
    let (records, mut report) = parse_event_file(reader, &headers, |line, offset| {
        let fields: Vec<&str> = line.split(',').collect();
        if !(fields.len() == 6 || fields.len() == 7) {
            return Err(format!(
                "expected 6 or 7 comma-separated fields, got {}",
                fields.len()
            ));
        }
        let patient_id = PatientId::new(fields[0]).map_err(|e| e.to_string())?;
        let interval_end = parse_timestamp(fields[1])?;
        check_offset(offset, &interval_end)?;
        let flags = AcuityFlags {
            crrt: parse_bool(fields[2])?,
            ventilation: parse_bool(fields[3])?,
            vasopressor: parse_bool(fields[4])?,
            transfusion_ge_10u_24h: parse_bool(fields[5])?,
        };
        let record = AcuityRecord::new(patient_id, interval_end, flags);
        if let Some(&label_text) = fields.get(6) {
            let derived = record.label().name();
            if label_text != derived {
                return Err(format!(
                    "acuity label `{label_text}` contradicts flags (derived `{derived}`)"
                ));
            }
        }
        *offset = Some(*interval_end.offset());
        Ok(record)
    })?;
    report.counts.acuity = report.accepted;
    Ok((records, report))
}

/// Parses `patient_id,timestamp,rass,cam_icu,gcs[,delirious]` rows; the
/// optional score fields may be empty.
pub fn parse_delirium_events<R: BufRead>(
    reader: R,
) -> Result<(Vec<DeliriumRecord>, ValidationReport), IngestError> {
    let headers = [DELIRIUM_HEADER, DELIRIUM_HEADER_LABELED];
    let (records, mut report) = parse_event_file(reader, &headers, |line, offset| {
        let fields: Vec<&str> = line.split(',').collect();
        if !(fields.len() == 5 || fields.len() == 6) {
            return Err(format!(
                "expected 5 or 6 comma-separated fields, got {}",
                fields.len()
            ));
        }
        let patient_id = PatientId::new(fields[0]).map_err(|e| e.to_string())?;
        let timestamp = parse_timestamp(fields[1])?;
        check_offset(offset, &timestamp)?;
        let rass = if fields[2].is_empty() {
            None
        } else {
            Some(Rass::new(parse_int(fields[2], "rass")?).map_err(|e| e.to_string())?)
        };
        let cam_icu = if fields[3].is_empty() {
            None
        } else {
            Some(
                CamIcu::from_token(fields[3])
                    .ok_or_else(|| format!("invalid cam_icu token `{}`", fields[3]))?,
            )
        };
        let gcs = if fields[4].is_empty() {
            None
        } else {
            Some(Gcs::new(parse_int(fields[4], "gcs")?).map_err(|e| e.to_string())?)
        };
        let delirious = match fields.get(5) {
            None | Some(&"") => None,
            Some(text) => Some(parse_bool(text)?),
        };
        let record = DeliriumRecord::new(patient_id, timestamp, rass, cam_icu, gcs, delirious)
            .map_err(|e| e.to_string())?;
        *offset = Some(*timestamp.offset());
        Ok(record)
    })?;
    report.counts.delirium = report.accepted;
    Ok((records, report))
}

/// Cohort-level validation: record counts, orphan events (patient has no
/// frames), per-patient coverage spans, and inter-frame gaps longer than
/// [`GAP_THRESHOLD_SECONDS`]. Reporting only — never rejects anything.
pub fn validate_cohort(bundle: &CohortBundle) -> ValidationReport {
    let mut report = ValidationReport {
        counts: RecordCounts {
            patients: bundle.frames.len(),
            frames: bundle.total_frames(),
            detections: bundle
                .frames
                .values()
                .flatten()
                .map(|f| f.detections.len())
                .sum(),
            pain: bundle.pain.len(),
            acuity: bundle.acuity.len(),
            delirium: bundle.delirium.len(),
        },
        ..ValidationReport::default()
    };

    let pain_events = bundle
        .pain
        .iter()
        .map(|r| (OutcomeKind::Pain, &r.patient_id, &r.timestamp));
    let acuity_events = bundle
        .acuity
        .iter()
        .map(|r| (OutcomeKind::Acuity, &r.patient_id, &r.interval_end));
    let delirium_events = bundle
        .delirium
        .iter()
        .map(|r| (OutcomeKind::Delirium, &r.patient_id, &r.timestamp));
    for (kind, patient_id, timestamp) in pain_events.chain(acuity_events).chain(delirium_events) {
        if !bundle.frames.contains_key(patient_id) {
            report.orphans.push(OrphanEvent {
                kind,
                patient_id: patient_id.clone(),
                timestamp: *timestamp,
            });
        }
    }

    for (patient_id, frames) in &bundle.frames {
        if frames.is_empty() {
            continue;
        }
        let gaps = frames
            .windows(2)
            .filter_map(|pair| {
                let seconds = (pair[1].timestamp - pair[0].timestamp).num_seconds();
                (seconds > GAP_THRESHOLD_SECONDS).then(|| CoverageGap {
                    after: pair[0].timestamp,
                    before: pair[1].timestamp,
                    seconds,
                })
            })
            .collect();
        report.coverage.push(PatientCoverage {
            patient_id: patient_id.clone(),
            first: frames[0].timestamp,
            last: frames[frames.len() - 1].timestamp,
            frame_count: frames.len(),
            gaps,
        });
    }

    let mut offsets: BTreeSet<i32> = BTreeSet::new();
    for frame in bundle.frames.values().flatten() {
        offsets.insert(frame.timestamp.offset().local_minus_utc());
    }
    for ts in bundle
        .pain
        .iter()
        .map(|r| &r.timestamp)
        .chain(bundle.acuity.iter().map(|r| &r.interval_end))
        .chain(bundle.delirium.iter().map(|r| &r.timestamp))
    {
        offsets.insert(ts.offset().local_minus_utc());
    }
    if offsets.len() > 1 {
        report
            .notes
            .push("mixed time zone offsets across records".to_owned());
    }
    report
}

fn push_detection(out: &mut String, detection: &Detection) {
    use std::fmt::Write as _;
    let b = detection.bbox;
    // f64 Display is the shortest representation that round-trips, so
    // re-parsing reproduces the bits exactly.
    let _ = write!(
        out,
        "{},{},{},{},{},{}",
        detection.posture.token(),
        detection.confidence(),
        b.x_min(),
        b.y_min(),
        b.x_max(),
        b.y_max()
    );
}

/// Serializes frames to the detection-stream line format (patients in key
/// order, frames in stored order). Re-parsing yields an identical map.
pub fn detection_stream_to_string(frames: &PatientFrames) -> String {
    let mut out = String::new();
    for (patient_id, list) in frames {
        for frame in list {
            out.push_str(patient_id.as_str());
            out.push('\t');
            out.push_str(&frame.timestamp.to_rfc3339());
            out.push('\t');
            for (i, detection) in frame.detections.iter().enumerate() {
                if i > 0 {
                    out.push(';');
                }
                push_detection(&mut out, detection);
            }
            out.push('\n');
        }
    }
    out
}

/// Writes [`detection_stream_to_string`] to a writer.
pub fn write_detection_stream<W: Write>(frames: &PatientFrames, writer: &mut W) -> io::Result<()> {
    writer.write_all(detection_stream_to_string(frames).as_bytes())
}

/// Serializes pain records with the standard header.
pub fn pain_events_to_string(records: &[PainRecord]) -> String {
    let mut out = String::from(PAIN_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.patient_id,
            r.timestamp.to_rfc3339(),
            r.dvprs.value()
        ));
    }
    out
}

/// Serializes acuity records with the labeled header; flags as `0`/`1`.
pub fn acuity_events_to_string(records: &[AcuityRecord]) -> String {
    let mut out = String::from(ACUITY_HEADER_LABELED);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.patient_id,
            r.interval_end.to_rfc3339(),
            u8::from(r.flags.crrt),
            u8::from(r.flags.ventilation),
            u8::from(r.flags.vasopressor),
            u8::from(r.flags.transfusion_ge_10u_24h),
            r.label().name()
        ));
    }
    out
}

/// Serializes delirium records with the labeled header; optional fields are
/// empty when absent, the explicit label is `0`/`1` when present.
pub fn delirium_events_to_string(records: &[DeliriumRecord]) -> String {
    let mut out = String::from(DELIRIUM_HEADER_LABELED);
    out.push('\n');
    for r in records {
        let rass = r.rass.map(|v| v.value().to_string()).unwrap_or_default();
        let cam = r.cam_icu.map(|v| v.token().to_owned()).unwrap_or_default();
        let gcs = r.gcs.map(|v| v.value().to_string()).unwrap_or_default();
        let delirious = r
            .delirious
            .map(|v| if v { "1" } else { "0" }.to_owned())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.patient_id,
            r.timestamp.to_rfc3339(),
            rass,
            cam,
            gcs,
            delirious
        ));
    }
    out
}

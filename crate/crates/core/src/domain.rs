//! Shared domain types and the deterministic outcome-labeling and
//! day/night-classification rules.
//!
//! Every type validates its invariants at construction and is immutable
//! afterwards; every labeling rule here is a pure total function over its
//! declared input grid, so the exhaustive rule tables in the tests below
//! pin the behavior completely.

use chrono::{DateTime, FixedOffset, Timelike};
use thiserror::Error;

/// Civil date-time with a fixed UTC offset — the single clock every frame
/// and clinical event in one dataset must share.
pub type Timestamp = DateTime<FixedOffset>;

/// Validation failures raised by domain-type constructors and labeling rules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    /// A bounding box with non-positive width or height.
    #[error("bounding box is empty or inverted: [{x_min}, {y_min}, {x_max}, {y_max}]")]
    InvertedBox {
        /// Left edge in pixels.
        x_min: f64,
        /// Top edge in pixels.
        y_min: f64,
        /// Right edge in pixels.
        x_max: f64,
        /// Bottom edge in pixels.
        y_max: f64,
    },
    /// A bounding box extending outside the frame geometry.
    #[error("bbox out of bounds: [{x_min}, {y_min}, {x_max}, {y_max}] exceeds {width}x{height} frame")]
    BoxOutOfBounds {
        /// Left edge in pixels.
        x_min: f64,
        /// Top edge in pixels.
        y_min: f64,
        /// Right edge in pixels.
        x_max: f64,
        /// Bottom edge in pixels.
        y_max: f64,
        /// Frame width the box was validated against.
        width: f64,
        /// Frame height the box was validated against.
        height: f64,
    },
    /// A non-finite coordinate or measurement.
    #[error("non-finite value {value} for {field}")]
    NonFinite {
        /// Name of the offending field.
        field: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// Frame geometry with non-positive dimensions.
    #[error("frame geometry must be positive, got {width}x{height}")]
    InvalidGeometry {
        /// Rejected width.
        width: f64,
        /// Rejected height.
        height: f64,
    },
    /// Detection confidence outside `[0, 1]`.
    #[error("confidence {value} outside [0, 1]")]
    ConfidenceOutOfRange {
        /// The rejected confidence.
        value: f64,
    },
    /// A posture token not in the closed class vocabulary.
    #[error("unknown posture token `{token}`")]
    UnknownPosture {
        /// The rejected token.
        token: String,
    },
    /// An empty patient identifier.
    #[error("patient id must be non-empty")]
    EmptyPatientId,
    /// A DVPRS pain score outside `[0, 10]`.
    #[error("dvprs score {value} outside [0, 10]")]
    DvprsOutOfRange {
        /// The rejected score.
        value: i64,
    },
    /// A RASS score outside `[-5, 4]`.
    #[error("rass score {value} outside [-5, 4]")]
    RassOutOfRange {
        /// The rejected score.
        value: i64,
    },
    /// A GCS score outside `[3, 15]`.
    #[error("gcs score {value} outside [3, 15]")]
    GcsOutOfRange {
        /// The rejected score.
        value: i64,
    },
    /// A delirium record with neither an explicit label nor enough fields to
    /// derive one.
    #[error("delirium record needs an explicit label or both cam_icu and rass")]
    UnderspecifiedDelirium,
    /// An explicit acuity label that contradicts the instability flags.
    #[error("acuity label `{given}` contradicts flags (derived `{derived}`)")]
    InconsistentAcuityLabel {
        /// The label supplied on the record.
        given: &'static str,
        /// The label the flags imply.
        derived: &'static str,
    },
}

/// Pixel dimensions of the camera frame that bounding boxes must fit inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry {
    width: f64,
    height: f64,
}

impl Default for FrameGeometry {
    /// The depth-camera default: 640 x 576 pixels.
    fn default() -> Self {
        FrameGeometry {
            width: 640.0,
            height: 576.0,
        }
    }
}

impl FrameGeometry {
    /// Builds a geometry with positive, finite dimensions.
    pub fn new(width: f64, height: f64) -> Result<Self, DomainError> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(DomainError::InvalidGeometry { width, height });
        }
        Ok(FrameGeometry { width, height })
    }

    /// Frame width in pixels.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Frame height in pixels.
    pub fn height(&self) -> f64 {
        self.height
    }
}

/// Axis-aligned box in pixel coordinates with `x_min < x_max`,
/// `y_min < y_max`, validated against a [`FrameGeometry`] at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BoundingBox {
    /// Validates and builds a box inside `geometry`.
    pub fn new(
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
        geometry: &FrameGeometry,
    ) -> Result<Self, DomainError> {
        for (field, value) in [
            ("x_min", x_min),
            ("y_min", y_min),
            ("x_max", x_max),
            ("y_max", y_max),
        ] {
            if !value.is_finite() {
                return Err(DomainError::NonFinite { field, value });
            }
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(DomainError::InvertedBox {
                x_min,
                y_min,
                x_max,
                y_max,
            });
        }
        if x_min < 0.0 || y_min < 0.0 || x_max > geometry.width || y_max > geometry.height {
            return Err(DomainError::BoxOutOfBounds {
                x_min,
                y_min,
                x_max,
                y_max,
                width: geometry.width,
                height: geometry.height,
            });
        }
        Ok(BoundingBox {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    /// Left edge in pixels.
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Top edge in pixels.
    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    /// Right edge in pixels.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Bottom edge in pixels.
    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    /// Box width in pixels (always positive).
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Box height in pixels (always positive).
    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// Box area in square pixels (always positive).
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Box center `(x, y)` in pixels.
    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }
}

/// The closed posture vocabulary detected in each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PostureClass {
    /// Patient lying in the bed.
    LyingInBed,
    /// A person standing in the room.
    Standing,
    /// A person sitting on the bed.
    SittingBed,
    /// A person sitting on a chair.
    SittingChair,
    /// Patient mobilized with assistance.
    AssistedMobility,
}

impl PostureClass {
    /// All five variants in their canonical order.
    pub const ALL: [PostureClass; 5] = [
        PostureClass::LyingInBed,
        PostureClass::Standing,
        PostureClass::SittingBed,
        PostureClass::SittingChair,
        PostureClass::AssistedMobility,
    ];

    /// Parses the wire token used in detection-stream files.
    pub fn from_token(token: &str) -> Result<Self, DomainError> {
        match token {
            "lying_in_bed" => Ok(PostureClass::LyingInBed),
            "standing" => Ok(PostureClass::Standing),
            "sitting_bed" => Ok(PostureClass::SittingBed),
            "sitting_chair" => Ok(PostureClass::SittingChair),
            "assisted" => Ok(PostureClass::AssistedMobility),
            other => Err(DomainError::UnknownPosture {
                token: other.to_owned(),
            }),
        }
    }

    /// The wire token this class serializes to.
    pub fn token(&self) -> &'static str {
        match self {
            PostureClass::LyingInBed => "lying_in_bed",
            PostureClass::Standing => "standing",
            PostureClass::SittingBed => "sitting_bed",
            PostureClass::SittingChair => "sitting_chair",
            PostureClass::AssistedMobility => "assisted",
        }
    }
}

/// One detected person: box, posture class, and model confidence in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Where the person was detected.
    pub bbox: BoundingBox,
    /// Which posture was detected.
    pub posture: PostureClass,
    confidence: f64,
}

impl Detection {
    /// Validates the confidence and builds a detection.
    pub fn new(bbox: BoundingBox, posture: PostureClass, confidence: f64) -> Result<Self, DomainError> {
        if !confidence.is_finite() || !(0.0..=1.0).contains(&confidence) {
            return Err(DomainError::ConfidenceOutOfRange { value: confidence });
        }
        Ok(Detection {
            bbox,
            posture,
            confidence,
        })
    }

    /// Model confidence in `[0, 1]`.
    pub fn confidence(&self) -> f64 {
        self.confidence
    }
}

/// Opaque, non-empty patient identifier; ordering is plain byte order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatientId(String);

impl PatientId {
    /// Builds a non-empty identifier.
    pub fn new(id: impl Into<String>) -> Result<Self, DomainError> {
        let id = id.into();
        if id.is_empty() {
            return Err(DomainError::EmptyPatientId);
        }
        Ok(PatientId(id))
    }

    /// The identifier as a string slice.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for PatientId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// One timestamped frame's detections for one patient stay. Within a
/// patient stream, timestamps strictly increase (enforced at ingestion);
/// nominal cadence is one frame per second, gaps allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionFrame {
    /// Which stay this frame belongs to.
    pub patient_id: PatientId,
    /// Capture time, whole seconds.
    pub timestamp: Timestamp,
    /// Detections in the frame, in model output order; empty = empty room.
    pub detections: Vec<Detection>,
}

/// Day/night stratum of a clock time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    /// Local clock in `[07:00, 19:00)`.
    Day,
    /// Local clock in `[19:00, 07:00)`.
    Night,
}

impl Phase {
    /// Display name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Phase::Day => "Day",
            Phase::Night => "Night",
        }
    }
}

/// Classifies a timestamp into [`Phase::Day`] iff its local clock time falls
/// in the half-open interval `[07:00, 19:00)`, [`Phase::Night`] otherwise.
pub fn classify_phase(t: &Timestamp) -> Phase {
    let hour = t.hour();
    if (7..19).contains(&hour) {
        Phase::Day
    } else {
        Phase::Night
    }
}

/// Validated DVPRS pain score, an integer in `[0, 10]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dvprs(u8);

impl Dvprs {
    /// Validates the score range.
    pub fn new(score: i64) -> Result<Self, DomainError> {
        if !(0..=10).contains(&score) {
            return Err(DomainError::DvprsOutOfRange { value: score });
        }
        Ok(Dvprs(score as u8))
    }

    /// The raw score.
    pub fn value(&self) -> u8 {
        self.0
    }

    /// Fine-grained pain level of this score.
    pub fn level(&self) -> PainLevel {
        match self.0 {
            0 => PainLevel::None,
            1..=4 => PainLevel::Mild,
            5..=6 => PainLevel::Moderate,
            _ => PainLevel::Severe,
        }
    }
}

/// Fine-grained pain level derived from DVPRS: `None` = 0, `Mild` = 1–4,
/// `Moderate` = 5–6, `Severe` = 7–10. `Ord` follows severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PainLevel {
    /// DVPRS 0 — absence of pain.
    None,
    /// DVPRS 1–4.
    Mild,
    /// DVPRS 5–6.
    Moderate,
    /// DVPRS 7–10.
    Severe,
}

impl PainLevel {
    /// The coarse two-group bucket this level belongs to.
    pub fn group(&self) -> PainGroup {
        match self {
            PainLevel::None | PainLevel::Mild => PainGroup::NoMild,
            PainLevel::Moderate | PainLevel::Severe => PainGroup::ModerateSevere,
        }
    }

    /// Display name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            PainLevel::None => "None",
            PainLevel::Mild => "Mild",
            PainLevel::Moderate => "Moderate",
            PainLevel::Severe => "Severe",
        }
    }
}

/// Coarse two-group pain bucket used for the primary comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PainGroup {
    /// No pain or mild pain (DVPRS 0–4).
    NoMild,
    /// Moderate or severe pain (DVPRS 5–10).
    ModerateSevere,
}

impl PainGroup {
    /// Display name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            PainGroup::NoMild => "NoMild",
            PainGroup::ModerateSevere => "ModerateSevere",
        }
    }
}

/// One self-reported pain observation.
#[derive(Debug, Clone, PartialEq)]
pub struct PainRecord {
    /// Which stay the observation belongs to.
    pub patient_id: PatientId,
    /// When the score was recorded.
    pub timestamp: Timestamp,
    /// The validated score.
    pub dvprs: Dvprs,
}

/// The four instability indicators recorded per acuity interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AcuityFlags {
    /// Continuous renal replacement therapy.
    pub crrt: bool,
    /// Mechanical ventilation required.
    pub ventilation: bool,
    /// Vasopressor infusion received.
    pub vasopressor: bool,
    /// Blood transfusion of ten or more units within 24 hours.
    pub transfusion_ge_10u_24h: bool,
}

impl AcuityFlags {
    /// True iff any indicator is set.
    pub fn any(&self) -> bool {
        self.crrt || self.ventilation || self.vasopressor || self.transfusion_ge_10u_24h
    }
}

/// Binary patient stability state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AcuityLabel {
    /// No instability indicator set.
    Stable,
    /// At least one instability indicator set.
    Unstable,
}

impl AcuityLabel {
    /// Display name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            AcuityLabel::Stable => "Stable",
            AcuityLabel::Unstable => "Unstable",
        }
    }
}

/// Labels an acuity interval `Unstable` iff any instability flag is set.
pub fn acuity_label(flags: &AcuityFlags) -> AcuityLabel {
    if flags.any() {
        AcuityLabel::Unstable
    } else {
        AcuityLabel::Stable
    }
}

/// One four-hour acuity interval; the label is derived from the flags at
/// construction, never stored inconsistently.
#[derive(Debug, Clone, PartialEq)]
pub struct AcuityRecord {
    /// Which stay the interval belongs to.
    pub patient_id: PatientId,
    /// End of the recorded four-hour interval.
    pub interval_end: Timestamp,
    /// The instability indicators.
    pub flags: AcuityFlags,
    label: AcuityLabel,
}

impl AcuityRecord {
    /// Builds a record, deriving the label from the flags.
    pub fn new(patient_id: PatientId, interval_end: Timestamp, flags: AcuityFlags) -> Self {
        let label = acuity_label(&flags);
        AcuityRecord {
            patient_id,
            interval_end,
            flags,
            label,
        }
    }

    /// The derived stability label.
    pub fn label(&self) -> AcuityLabel {
        self.label
    }
}

/// Validated RASS sedation/agitation score, an integer in `[-5, 4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rass(i8);

impl Rass {
    /// Validates the score range.
    pub fn new(score: i64) -> Result<Self, DomainError> {
        if !(-5..=4).contains(&score) {
            return Err(DomainError::RassOutOfRange { value: score });
        }
        Ok(Rass(score as i8))
    }

    /// The raw score.
    pub fn value(&self) -> i8 {
        self.0
    }
}

/// Validated Glasgow Coma Scale score, an integer in `[3, 15]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gcs(u8);

impl Gcs {
    /// Validates the score range.
    pub fn new(score: i64) -> Result<Self, DomainError> {
        if !(3..=15).contains(&score) {
            return Err(DomainError::GcsOutOfRange { value: score });
        }
        Ok(Gcs(score as u8))
    }

    /// The raw score.
    pub fn value(&self) -> u8 {
        self.0
    }
}

/// Confusion Assessment Method for the ICU result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CamIcu {
    /// Assessment positive for delirium.
    Positive,
    /// Assessment negative for delirium.
    Negative,
    /// Assessment could not be completed.
    Unassessable,
}

impl CamIcu {
    /// Parses the wire token used in event files (case-insensitive).
    pub fn from_token(token: &str) -> Option<Self> {
        match token.to_ascii_lowercase().as_str() {
            "positive" => Some(CamIcu::Positive),
            "negative" => Some(CamIcu::Negative),
            "unassessable" => Some(CamIcu::Unassessable),
            _ => None,
        }
    }

    /// The wire token this result serializes to.
    pub fn token(&self) -> &'static str {
        match self {
            CamIcu::Positive => "positive",
            CamIcu::Negative => "negative",
            CamIcu::Unassessable => "unassessable",
        }
    }
}

/// One delirium assessment. Construction guarantees the labeling rule is
/// total: either an explicit `delirious` flag is present, or both `cam_icu`
/// and `rass` are.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliriumRecord {
    /// Which stay the assessment belongs to.
    pub patient_id: PatientId,
    /// When the assessment was recorded.
    pub timestamp: Timestamp,
    /// Sedation/agitation score, if recorded.
    pub rass: Option<Rass>,
    /// Confusion assessment result, if recorded.
    pub cam_icu: Option<CamIcu>,
    /// Consciousness score; carried for completeness, not used in labeling.
    pub gcs: Option<Gcs>,
    /// Explicit delirium label, overriding derivation when present.
    pub delirious: Option<bool>,
}

impl DeliriumRecord {
    /// Builds a record, rejecting combinations the labeling rule cannot
    /// cover (no explicit label and `cam_icu`/`rass` not both present).
    pub fn new(
        patient_id: PatientId,
        timestamp: Timestamp,
        rass: Option<Rass>,
        cam_icu: Option<CamIcu>,
        gcs: Option<Gcs>,
        delirious: Option<bool>,
    ) -> Result<Self, DomainError> {
        if delirious.is_none() && (cam_icu.is_none() || rass.is_none()) {
            return Err(DomainError::UnderspecifiedDelirium);
        }
        Ok(DeliriumRecord {
            patient_id,
            timestamp,
            rass,
            cam_icu,
            gcs,
            delirious,
        })
    }
}

/// Outcome of the delirium labeling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeliriumStatus {
    /// Delirium present.
    Delirious,
    /// Delirium absent.
    NonDelirious,
    /// Unassessable (deep sedation or incomplete assessment); dropped from
    /// group comparisons.
    Excluded,
}

impl DeliriumStatus {
    /// Display name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            DeliriumStatus::Delirious => "Delirious",
            DeliriumStatus::NonDelirious => "NonDelirious",
            DeliriumStatus::Excluded => "Excluded",
        }
    }
}

/// Labels a delirium record. An explicit `delirious` field always wins;
/// otherwise the record's construction guarantees `cam_icu` and `rass` are
/// present and the derivation is: RASS ≤ -4 → `Excluded` (too sedated to
/// assess), else CAM-ICU positive → `Delirious`, negative → `NonDelirious`,
/// unassessable → `Excluded`.
pub fn delirium_label(record: &DeliriumRecord) -> DeliriumStatus {
    if let Some(explicit) = record.delirious {
        return if explicit {
            DeliriumStatus::Delirious
        } else {
            DeliriumStatus::NonDelirious
        };
    }
    let rass = record
        .rass
        .expect("construction guarantees rass when no explicit label");
    let cam = record
        .cam_icu
        .expect("construction guarantees cam_icu when no explicit label");
    if rass.value() <= -4 {
        return DeliriumStatus::Excluded;
    }
    match cam {
        CamIcu::Positive => DeliriumStatus::Delirious,
        CamIcu::Negative => DeliriumStatus::NonDelirious,
        CamIcu::Unassessable => DeliriumStatus::Excluded,
    }
}

/// The three clinical outcome streams the pipeline aligns windows to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeKind {
    /// DVPRS pain observations.
    Pain,
    /// Four-hour acuity intervals.
    Acuity,
    /// Delirium assessments.
    Delirium,
}

impl OutcomeKind {
    /// Display name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            OutcomeKind::Pain => "Pain",
            OutcomeKind::Acuity => "Acuity",
            OutcomeKind::Delirium => "Delirium",
        }
    }
}

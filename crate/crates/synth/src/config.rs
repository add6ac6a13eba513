//! Generator configuration: plain-text `key = value` files, feasibility
//! validation, and the closed-form effect planting.

use std::collections::BTreeMap;

use chrono::{FixedOffset, NaiveDate};
use wardlens_core::config::parse_key_values;
use wardlens_core::domain::{Dvprs, OutcomeKind, PainGroup};

use crate::SynthError;

/// The six planted comparison groups, two per outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SynthGroup {
    /// Pain scores 0–4.
    PainNoMild,
    /// Pain scores 5–10.
    PainModerateSevere,
    /// No instability flag set.
    AcuityStable,
    /// Ventilated (one representative instability flag).
    AcuityUnstable,
    /// CAM-ICU negative.
    DeliriumNonDelirious,
    /// CAM-ICU positive.
    DeliriumDelirious,
}

impl SynthGroup {
    /// All groups in generation order.
    pub const ALL: [SynthGroup; 6] = [
        SynthGroup::PainNoMild,
        SynthGroup::PainModerateSevere,
        SynthGroup::AcuityStable,
        SynthGroup::AcuityUnstable,
        SynthGroup::DeliriumNonDelirious,
        SynthGroup::DeliriumDelirious,
    ];

    /// The outcome the group belongs to.
    pub fn outcome(self) -> OutcomeKind {
        match self {
            SynthGroup::PainNoMild | SynthGroup::PainModerateSevere => OutcomeKind::Pain,
            SynthGroup::AcuityStable | SynthGroup::AcuityUnstable => OutcomeKind::Acuity,
            SynthGroup::DeliriumNonDelirious | SynthGroup::DeliriumDelirious => {
                OutcomeKind::Delirium
            }
        }
    }

    /// The clinical-group label the generated events will classify into,
    /// matching the labeling rules applied at ingest.
    pub fn label(self) -> &'static str {
        match self {
            SynthGroup::PainNoMild => "NoMild",
            SynthGroup::PainModerateSevere => "ModerateSevere",
            SynthGroup::AcuityStable => "Stable",
            SynthGroup::AcuityUnstable => "Unstable",
            SynthGroup::DeliriumNonDelirious => "NonDelirious",
            SynthGroup::DeliriumDelirious => "Delirious",
        }
    }

    /// The config-key prefix (`pain.no_mild`, …).
    pub fn key(self) -> &'static str {
        match self {
            SynthGroup::PainNoMild => "pain.no_mild",
            SynthGroup::PainModerateSevere => "pain.moderate_severe",
            SynthGroup::AcuityStable => "acuity.stable",
            SynthGroup::AcuityUnstable => "acuity.unstable",
            SynthGroup::DeliriumNonDelirious => "delirium.non_delirious",
            SynthGroup::DeliriumDelirious => "delirium.delirious",
        }
    }
}

/// One group's plan: how many windows to generate and the stationary mean
/// occupancy to plant in them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupPlan {
    /// Number of event windows to generate.
    pub windows: usize,
    /// Target stationary mean person count per frame.
    pub occupancy: f64,
}

/// Full generator configuration.
///
/// The visitor process per group is a discrete birth–death chain with
/// per-second arrival probability `arrival_rate/3600` and per-visitor
/// departure probability `1/(60·mean_dwell)`; its stationary mean is
/// `arrival_rate·mean_dwell/60` visitors, on top of the
/// `lying_probability` the patient contributes. [`SynthConfig::arrival_rate`]
/// inverts the group's occupancy target into the rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Master seed; per-patient streams derive from `seed ⊕ index`.
    pub seed: u64,
    /// Cohort size; events are dealt round-robin over patients.
    pub patients: usize,
    /// Fixed UTC offset for every timestamp.
    pub utc_offset: FixedOffset,
    /// Calendar day of each patient's first event.
    pub start_date: NaiveDate,
    /// Per-frame probability of a lying-in-bed detection.
    pub lying_probability: f64,
    /// Mean visitor dwell time, minutes.
    pub mean_dwell_minutes: f64,
    /// Frames emitted inside each event window (1 frame/s from the start
    /// of the window span).
    pub frames_per_window: usize,
    /// Fraction of events anchored in the day phase.
    pub day_fraction: f64,
    /// Confidence stamped on every emitted detection.
    pub confidence: f64,
    /// Per-group window counts and occupancy targets.
    pub plans: BTreeMap<SynthGroup, GroupPlan>,
    /// Score reported by no/mild pain events (must stay in scores 0–4).
    pub dvprs_no_mild: Dvprs,
    /// Score reported by moderate/severe pain events (scores 5–10).
    pub dvprs_moderate_severe: Dvprs,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let mut plans = BTreeMap::new();
        for group in SynthGroup::ALL {
            plans.insert(
                group,
                GroupPlan {
                    windows: 8,
                    occupancy: 1.2,
                },
            );
        }
        SynthConfig {
            seed: 0,
            patients: 4,
            utc_offset: FixedOffset::east_opt(0).expect("zero offset"),
            start_date: NaiveDate::from_ymd_opt(2024, 3, 1).expect("fixed date"),
            lying_probability: 0.95,
            mean_dwell_minutes: 2.0,
            frames_per_window: 900,
            day_fraction: 0.5,
            confidence: 0.9,
            plans,
            dvprs_no_mild: Dvprs::new(2).expect("in range"),
            dvprs_moderate_severe: Dvprs::new(7).expect("in range"),
        }
    }
}

/// Every key the config file may contain.
pub const CONFIG_KEYS: [&str; 23] = [
    "seed",
    "patients",
    "utc_offset",
    "start_date",
    "lying_probability",
    "mean_dwell_minutes",
    "frames_per_window",
    "day_fraction",
    "confidence",
    "pain.no_mild.windows",
    "pain.no_mild.occupancy",
    "pain.no_mild.dvprs",
    "pain.moderate_severe.windows",
    "pain.moderate_severe.occupancy",
    "pain.moderate_severe.dvprs",
    "acuity.stable.windows",
    "acuity.stable.occupancy",
    "acuity.unstable.windows",
    "acuity.unstable.occupancy",
    "delirium.non_delirious.windows",
    "delirium.non_delirious.occupancy",
    "delirium.delirious.windows",
    "delirium.delirious.occupancy",
];

fn parse_value<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, SynthError> {
    map.get(key)
        .map(|text| {
            text.parse().map_err(|_| SynthError::BadValue {
                key: key.to_owned(),
                text: text.clone(),
            })
        })
        .transpose()
}

fn parse_offset(text: &str) -> Option<FixedOffset> {
    // ±HH:MM
    let (sign, rest) = match text.as_bytes().first()? {
        b'+' => (1, &text[1..]),
        b'-' => (-1, &text[1..]),
        _ => return None,
    };
    let (h, m) = rest.split_once(':')?;
    if h.len() != 2 || m.len() != 2 {
        return None;
    }
    let hours: i32 = h.parse().ok()?;
    let minutes: i32 = m.parse().ok()?;
    if minutes >= 60 {
        return None;
    }
    FixedOffset::east_opt(sign * (hours * 3600 + minutes * 60))
}

impl SynthConfig {
    /// Builds a config from `key = value` text on top of the defaults,
    /// then validates it. Unknown keys are rejected.
    pub fn from_key_values(text: &str) -> Result<Self, SynthError> {
        let map = parse_key_values(text)?;
        wardlens_core::config::ensure_known_keys(&map, &CONFIG_KEYS)?;
        let mut config = SynthConfig::default();

        if let Some(seed) = parse_value(&map, "seed")? {
            config.seed = seed;
        }
        if let Some(patients) = parse_value(&map, "patients")? {
            config.patients = patients;
        }
        if let Some(text) = map.get("utc_offset") {
            config.utc_offset = parse_offset(text).ok_or_else(|| SynthError::BadValue {
                key: "utc_offset".to_owned(),
                text: text.clone(),
            })?;
        }
        if let Some(text) = map.get("start_date") {
            config.start_date =
                NaiveDate::parse_from_str(text, "%Y-%m-%d").map_err(|_| SynthError::BadValue {
                    key: "start_date".to_owned(),
                    text: text.clone(),
                })?;
        }
        if let Some(p) = parse_value(&map, "lying_probability")? {
            config.lying_probability = p;
        }
        if let Some(d) = parse_value(&map, "mean_dwell_minutes")? {
            config.mean_dwell_minutes = d;
        }
        if let Some(f) = parse_value(&map, "frames_per_window")? {
            config.frames_per_window = f;
        }
        if let Some(f) = parse_value(&map, "day_fraction")? {
            config.day_fraction = f;
        }
        if let Some(c) = parse_value(&map, "confidence")? {
            config.confidence = c;
        }
        for group in SynthGroup::ALL {
            let plan = config.plans.get_mut(&group).expect("all groups planned");
            if let Some(w) = parse_value(&map, &format!("{}.windows", group.key()))? {
                plan.windows = w;
            }
            if let Some(o) = parse_value(&map, &format!("{}.occupancy", group.key()))? {
                plan.occupancy = o;
            }
        }
        for (key, slot, group) in [
            (
                "pain.no_mild.dvprs",
                &mut config.dvprs_no_mild,
                SynthGroup::PainNoMild,
            ),
            (
                "pain.moderate_severe.dvprs",
                &mut config.dvprs_moderate_severe,
                SynthGroup::PainModerateSevere,
            ),
        ] {
            if let Some(score) = parse_value::<i64>(&map, key)? {
                *slot = Dvprs::new(score).map_err(|e| SynthError::Domain(e.to_string()))?;
                let want = match group {
                    SynthGroup::PainNoMild => PainGroup::NoMild,
                    _ => PainGroup::ModerateSevere,
                };
                if slot.level().group() != want {
                    return Err(SynthError::DvprsGroupMismatch {
                        dvprs: score,
                        group: group.key(),
                    });
                }
            }
        }

        config.validate()?;
        Ok(config)
    }

    /// Checks ranges and the feasibility of every planted target.
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.patients == 0 {
            return Err(SynthError::NoPatients);
        }
        for (what, value) in [
            ("lying probability", self.lying_probability),
            ("day fraction", self.day_fraction),
            ("confidence", self.confidence),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SynthError::BadProbability { what, value });
            }
        }
        // Departure probability 1/(60·dwell) must be a probability.
        if !(self.mean_dwell_minutes.is_finite() && self.mean_dwell_minutes >= 1.0 / 60.0) {
            return Err(SynthError::BadDwell {
                minutes: self.mean_dwell_minutes,
            });
        }
        if self.frames_per_window == 0 || self.frames_per_window > 900 {
            return Err(SynthError::BadFramesPerWindow {
                frames: self.frames_per_window,
            });
        }
        for group in SynthGroup::ALL {
            if self.plans[&group].windows > 0 {
                self.arrival_rate(group)?;
            }
        }
        Ok(())
    }

    /// The arrival rate (visitors/hour) that plants the group's occupancy
    /// target: solves `lying_probability + rate·dwell/60 = target`.
    pub fn arrival_rate(&self, group: SynthGroup) -> Result<f64, SynthError> {
        let target = self.plans[&group].occupancy;
        if !target.is_finite() || target < self.lying_probability {
            return Err(SynthError::InfeasibleTarget {
                group: group.key(),
                target,
                lying: self.lying_probability,
            });
        }
        let rate = (target - self.lying_probability) * 60.0 / self.mean_dwell_minutes;
        if rate > 3600.0 {
            return Err(SynthError::RateTooHigh {
                group: group.key(),
                rate,
            });
        }
        Ok(rate)
    }

    /// Total windows over all groups.
    pub fn total_windows(&self) -> usize {
        self.plans.values().map(|p| p.windows).sum()
    }
}

/// Returns a copy of `config` with the outcome's two groups re-planted at
/// `(first, second)` stationary mean occupancies — first = (no/mild,
/// stable, non-delirious), second = (moderate/severe, unstable,
/// delirious). Fails if either target is below the lying probability or
/// implies an arrival rate beyond one visitor per second.
pub fn plant_effect(
    config: &SynthConfig,
    outcome: OutcomeKind,
    group_means: (f64, f64),
) -> Result<SynthConfig, SynthError> {
    let mut planted = config.clone();
    let (first, second) = match outcome {
        OutcomeKind::Pain => (SynthGroup::PainNoMild, SynthGroup::PainModerateSevere),
        OutcomeKind::Acuity => (SynthGroup::AcuityStable, SynthGroup::AcuityUnstable),
        OutcomeKind::Delirium => (
            SynthGroup::DeliriumNonDelirious,
            SynthGroup::DeliriumDelirious,
        ),
    };
    planted.plans.get_mut(&first).expect("planned").occupancy = group_means.0;
    planted.plans.get_mut(&second).expect("planned").occupancy = group_means.1;
    planted.arrival_rate(first)?;
    planted.arrival_rate(second)?;
    Ok(planted)
}

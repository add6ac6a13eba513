//! Plain-text `key = value` configuration files and the duration/span
//! grammar used by window overrides.
//!
//! The file grammar is one `key = value` pair per line; blank lines and
//! lines starting with `#` are ignored; duplicate keys are an error (silent
//! last-one-wins hides typos in long configs). Durations are written as an
//! optionally signed integer with an `s`/`m`/`h` unit (`-30m`, `4h`,
//! `90s`), or the bare zero `0`; window spans pair two durations with `..`
//! (`-30m..-15m`). Recognized analysis keys: `window.pain`,
//! `window.delirium`, `window.acuity`, `window.min_frames`,
//! `metrics.counting_classes`.

use std::collections::BTreeMap;

use chrono::Duration;
use thiserror::Error;

use crate::align::{AlignError, WindowOffsets, WindowPolicy};
use crate::domain::PostureClass;
use crate::metrics::CountingPolicy;

/// Configuration parsing and application failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    /// A line that is not `key = value`, a comment, or blank.
    #[error("config line {line}: expected `key = value`, got `{content}`")]
    Malformed {
        /// 1-based line number.
        line: usize,
        /// The offending line.
        content: String,
    },
    /// The same key twice.
    #[error("duplicate config key `{key}`")]
    DuplicateKey {
        /// The repeated key.
        key: String,
    },
    /// A key no consumer recognizes (likely a typo).
    #[error("unknown config key `{key}`")]
    UnknownKey {
        /// The unrecognized key.
        key: String,
    },
    /// A duration outside the `<int><s|m|h>` grammar.
    #[error("invalid duration `{text}` (want e.g. `-30m`, `4h`, `90s`, or `0`)")]
    InvalidDuration {
        /// The rejected text.
        text: String,
    },
    /// A span that is not `<duration>..<duration>`.
    #[error("invalid span `{text}` (want `<start>..<end>`, e.g. `-30m..-15m`)")]
    InvalidSpan {
        /// The rejected text.
        text: String,
    },
    /// A non-integer where an integer is required.
    #[error("invalid integer `{text}` for key `{key}`")]
    InvalidInteger {
        /// The key being set.
        key: String,
        /// The rejected text.
        text: String,
    },
    /// An unknown posture token in a class list.
    #[error("unknown posture token `{token}` in counting classes")]
    UnknownClass {
        /// The rejected token.
        token: String,
    },
    /// A class list with no classes.
    #[error("counting classes must name at least one class")]
    EmptyClassList,
    /// A window override the alignment policy rejected.
    #[error(transparent)]
    Align(#[from] AlignError),
}

/// Parses the `key = value` file grammar into an ordered map.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: index + 1,
                content: raw.to_owned(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ConfigError::Malformed {
                line: index + 1,
                content: raw.to_owned(),
            });
        }
        if map.insert(key.to_owned(), value.to_owned()).is_some() {
            return Err(ConfigError::DuplicateKey {
                key: key.to_owned(),
            });
        }
    }
    Ok(map)
}

/// Parses a signed duration: `-30m`, `4h`, `90s`, or the bare `0`.
pub fn parse_duration(text: &str) -> Result<Duration, ConfigError> {
    let err = || ConfigError::InvalidDuration {
        text: text.to_owned(),
    };
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(Duration::zero());
    }
    let (sign, rest) = match trimmed.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, trimmed),
    };
    if rest.len() < 2 {
        return Err(err());
    }
    let (digits, unit) = rest.split_at(rest.len() - 1);
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let magnitude: i64 = digits.parse().map_err(|_| err())?;
    let per_unit = match unit {
        "s" => 1,
        "m" => 60,
        "h" => 3600,
        _ => return Err(err()),
    };
    let seconds = magnitude
        .checked_mul(per_unit)
        .and_then(|s| s.checked_mul(sign))
        .ok_or_else(err)?;
    Ok(Duration::seconds(seconds))
}

/// Parses a `<start>..<end>` pair of durations.
pub fn parse_span(text: &str) -> Result<WindowOffsets, ConfigError> {
    let Some((start, end)) = text.split_once("..") else {
        return Err(ConfigError::InvalidSpan {
            text: text.to_owned(),
        });
    };
    Ok(WindowOffsets {
        start: parse_duration(start)?,
        end: parse_duration(end)?,
    })
}

/// Parses a comma-separated posture-class list into a counting policy.
pub fn parse_counting_classes(text: &str) -> Result<CountingPolicy, ConfigError> {
    let mut classes = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let class = PostureClass::from_token(token).map_err(|_| ConfigError::UnknownClass {
            token: token.to_owned(),
        })?;
        classes.push(class);
    }
    CountingPolicy::new(classes).map_err(|_| ConfigError::EmptyClassList)
}

/// The window.* keys [`apply_window_keys`] consumes.
pub const WINDOW_KEYS: [&str; 4] = [
    "window.pain",
    "window.delirium",
    "window.acuity",
    "window.min_frames",
];

/// The metrics.* key [`counting_policy_from_map`] consumes.
pub const METRICS_KEYS: [&str; 1] = ["metrics.counting_classes"];

/// Applies any `window.*` keys in `map` on top of `policy`. Keys outside
/// [`WINDOW_KEYS`] are left for other consumers.
pub fn apply_window_keys(
    map: &BTreeMap<String, String>,
    mut policy: WindowPolicy,
) -> Result<WindowPolicy, ConfigError> {
    if let Some(text) = map.get("window.pain") {
        policy = policy.with_pain(parse_span(text)?)?;
    }
    if let Some(text) = map.get("window.delirium") {
        policy = policy.with_delirium(parse_span(text)?)?;
    }
    if let Some(text) = map.get("window.acuity") {
        policy = policy.with_acuity(parse_span(text)?)?;
    }
    if let Some(text) = map.get("window.min_frames") {
        let min_frames: usize = text.parse().map_err(|_| ConfigError::InvalidInteger {
            key: "window.min_frames".to_owned(),
            text: text.to_owned(),
        })?;
        policy = policy.with_min_frames(min_frames)?;
    }
    Ok(policy)
}

/// Reads `metrics.counting_classes` from `map`, if present.
pub fn counting_policy_from_map(
    map: &BTreeMap<String, String>,
) -> Result<Option<CountingPolicy>, ConfigError> {
    map.get("metrics.counting_classes")
        .map(|text| parse_counting_classes(text))
        .transpose()
}

/// Rejects any key outside `allowed` — call with the consumer's complete
/// key set to catch config typos early.
pub fn ensure_known_keys(
    map: &BTreeMap<String, String>,
    allowed: &[&str],
) -> Result<(), ConfigError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { key: key.clone() });
        }
    }
    Ok(())
}

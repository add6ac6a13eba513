//! Nonparametric statistics for group-difference testing.
//!
//! Implements the rank machinery (midranks with tie handling), the
//! Mann–Whitney U and Kruskal–Wallis H tests, the D'Agostino–Pearson K²
//! normality omnibus, Benjamini–Hochberg adjustment, and the special
//! functions (log-gamma, regularized incomplete gamma, erfc) that back
//! the survival functions. Everything here is deterministic and pure.

mod error;

pub mod adjust;
pub mod normality;
pub mod rank;
pub mod special;

pub use adjust::{bh_adjust, bonferroni_adjust};
pub use error::StatsError;
pub use normality::dagostino_k2;
pub use rank::rank_with_ties;
pub use rank_tests::{kruskal_wallis, mann_whitney_u};
pub use special::{chi2_sf, erfc, ln_gamma, normal_sf};

/// Outcome of a hypothesis test: the statistic, its two-sided p-value,
/// and enough context to render a report row.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    /// Test statistic (U₁ for Mann–Whitney, H for Kruskal–Wallis, K² for the omnibus).
    pub statistic: f64,
    /// Two-sided p-value in [0, 1].
    pub p_value: f64,
    /// Sample size of each group, in input order.
    pub group_sizes: Vec<usize>,
    /// Short method tag, e.g. "mann-whitney-u".
    pub method: &'static str,
    /// Semicolon-joined caveats such as "tie correction applied".
    pub notes: String,
}

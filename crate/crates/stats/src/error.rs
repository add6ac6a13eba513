use thiserror::Error;

/// Failure modes of the statistical routines. All inputs are validated up
/// front so the numeric kernels never see NaN or empty data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("empty sample")]
    EmptySample,
    #[error("need at least two groups, got {got}")]
    TooFewGroups { got: usize },
    #[error("degenerate data: zero rank variance")]
    DegenerateRanks,
    #[error("degenerate data: all pooled values identical")]
    DegeneratePooled,
    #[error("sample too small for the omnibus normality test: n = {n}, need n >= 20")]
    SampleTooSmall { n: usize },
    #[error("zero-variance sample")]
    ZeroVariance,
    #[error("kurtosis transform undefined for this sample")]
    KurtosisUndefined,
    #[error("chi-squared statistic must be non-negative, got {x}")]
    NegativeChiSquared { x: f64 },
    #[error("degrees of freedom must be at least 1")]
    ZeroDegreesOfFreedom,
    #[error("p-values must lie in [0, 1], got {value}")]
    PValueOutOfRange { value: f64 },
}

//! Error types, one enum per module family.

use thiserror::Error;

/// Parameter-validation failures; the message names the first violated
/// invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("d_b must be positive (got {0})")]
    DbNotPositive(f64),
    #[error("gamma_eit must be positive (got {0})")]
    GammaEitNotPositive(f64),
    #[error("length_ratio must be >= 1 (got {0})")]
    LengthRatioTooSmall(f64),
    #[error("omega_c must be positive (got {0})")]
    OmegaCNotPositive(f64),
    #[error("big_gamma must be positive (got {0})")]
    BigGammaNotPositive(f64),
    #[error("v_g must be positive (got {0})")]
    GroupVelocityNotPositive(f64),
    #[error(
        "gamma_eit inconsistent with omega_c^2/big_gamma: {gamma_eit} vs {derived} \
         (relative mismatch {mismatch:.3e} exceeds 1e-12)"
    )]
    ControlFieldInconsistent {
        gamma_eit: f64,
        derived: f64,
        mismatch: f64,
    },
    #[error("{name} must be finite")]
    NotFinite { name: &'static str },
}

/// Errors from the closed-form layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("erfcx domain error: x must be >= 0 (got {0})")]
    ErfcxDomain(f64),
    #[error("input rate must be >= 0 (got {0})")]
    NegativeRate(f64),
    #[error("pulse_duration must be positive (got {0})")]
    NonPositivePulse(f64),
    #[error("beta must lie in (0, 1) (got {0})")]
    BetaOutOfRange(f64),
    #[error("epsilon must lie in (0, 1) (got {0})")]
    EpsilonOutOfRange(f64),
    #[error(
        "infeasible rate window: r_in_lower {lower} exceeds r_in_upper {upper} \
         for the requested train length {n_requested}"
    )]
    InfeasibleWindow {
        lower: f64,
        upper: f64,
        n_requested: f64,
    },
    #[error("transmission curve requires strictly increasing r_in (row {0})")]
    CurveNotIncreasing(usize),
    #[error("transmission curve value out of range at row {0}")]
    CurveValueOutOfRange(usize),
}

/// Errors from quadrature-backed filter operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("tau_eit must be positive (got {0})")]
    NonPositiveTauEit(f64),
    #[error("window_sigmas must be positive (got {0})")]
    NonPositiveWindow(f64),
    #[error("tau_end must be >= tau_b (got tau_end {tau_end}, tau_b {tau_b})")]
    PulseTooShort { tau_end: f64, tau_b: f64 },
    #[error(
        "quadrature did not converge: achieved absolute error {achieved:.3e} \
         exceeds the requested {requested:.3e}"
    )]
    QuadratureNonConvergence { achieved: f64, requested: f64 },
    #[error("correlation grid must be a 2-D (full) grid for filtering")]
    GridNotFull,
    #[error("correlation grid must be uniformly spaced for filtering")]
    GridNotUniform,
    #[error(
        "grid resolution {actual:.3e} is coarser than the required tau_eit/10 = {required:.3e}"
    )]
    GridResolution { actual: f64, required: f64 },
    #[error("grid does not cover the kernel window around any evaluation point")]
    GridTooNarrow,
}

/// Errors from the Monte-Carlo simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("arrival times must be sorted ascending (violation at index {0})")]
    UnsortedArrivals(usize),
    #[error("n_trials must be >= 1")]
    NoTrials,
    #[error("duration {duration} must exceed twice the burn-in {burn_in}")]
    DurationTooShort { duration: f64, burn_in: f64 },
    #[error("need at least {required} bins for t_max {t_max} (10 per blockade time; got {got})")]
    TooFewBins {
        required: usize,
        got: usize,
        t_max: f64,
    },
}

/// Errors from data ingestion and fitting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: missing column `{column}`")]
    MissingColumn { line: usize, column: String },
    #[error("line {line}: r_in must be positive (got {value})")]
    NonPositiveRate { line: usize, value: f64 },
    #[error("line {line}: r_out must be >= 0 (got {value})")]
    NegativeOutput { line: usize, value: f64 },
    #[error("line {line}: sigma must be positive when present (got {value})")]
    BadSigma { line: usize, value: f64 },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("gamma bracket must satisfy 0 < lo < hi (got {lo}, {hi})")]
    BadBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Params(#[from] ParamsError),
}

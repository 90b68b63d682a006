//! Closed forms for rates, correlation functions, and train-design bounds.
//!
//! Everything here is a pure function of dimensionless products, so times and
//! rates may be passed in any consistent unit system. The high-intensity
//! transmission is evaluated through the scaled complementary error function
//! to avoid overflow, and the correlation sums run in the log domain so they
//! stay finite out to thousands of blockade times.

use crate::error::AnalyticError;
use crate::params::{MediumParams, Timescales};
use crate::special;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Heaviside step with the theta(0) = 1 convention used throughout.
#[inline]
fn theta(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Scaled complementary error function exp(x^2) erfc(x) on the nonnegative
/// branch the model needs. Relative error stays below 1e-12 for all x >= 0
/// and the value never overflows.
pub fn erfcx(x: f64) -> Result<f64, AnalyticError> {
    if x < 0.0 || x.is_nan() {
        return Err(AnalyticError::ErfcxDomain(x));
    }
    Ok(special::erfcx(x))
}

/// CW probe description; `pulse_duration` absent means continuous-wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeInput {
    pub r_in: f64,
    pub pulse_duration: Option<f64>,
}

impl ProbeInput {
    pub fn new(r_in: f64, pulse_duration: Option<f64>) -> Result<Self, AnalyticError> {
        if !(r_in >= 0.0) {
            return Err(AnalyticError::NegativeRate(r_in));
        }
        if let Some(tp) = pulse_duration {
            if !(tp > 0.0) {
                return Err(AnalyticError::NonPositivePulse(tp));
            }
        }
        Ok(ProbeInput {
            r_in,
            pulse_duration,
        })
    }
}

/// Output rate for perfect single-polariton EIT: 1 / (tau_b + 1/R_in).
///
/// Bounded by both R_in and 1/tau_b; exact for Poisson input because the
/// transmitted photons form a renewal process with cycle tau_b + Exp(1/R_in).
pub fn rate_out_perfect(r_in: f64, tau_b: f64) -> f64 {
    debug_assert!(r_in >= 0.0 && tau_b > 0.0);
    if r_in == 0.0 {
        return 0.0;
    }
    1.0 / (tau_b + 1.0 / r_in)
}

/// Poisson-averaged single-polariton EIT transmission through depth
/// `l_over_rb` blockade radii: erfcx(tau_EIT(l) R_in).
pub fn eta_bar(l_over_rb: f64, r_in: f64, ts: &Timescales) -> f64 {
    debug_assert!(l_over_rb > 0.0 && r_in >= 0.0);
    special::erfcx(ts.tau_eit_at(l_over_rb) * r_in)
}

/// Average effective blockade time over the full one, tau_b_bar / tau_b,
/// as a function of x = tau_EIT(r_b) R_in:
/// [erfcx(x) + sqrt(4/pi) x - 1] / x^2, with value 1 in the x -> 0 limit.
pub fn tau_b_bar_ratio(r_in: f64, ts: &Timescales) -> f64 {
    let x = ts.tau_eit_at(1.0) * r_in;
    tau_b_bar_ratio_from_x(x)
}

/// Same, parameterized directly by x = tau_EIT(r_b) R_in.
pub fn tau_b_bar_ratio_from_x(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_57;
    if x < 1e-4 {
        // removable 0/0 at x = 0; three-term expansion of the closed form
        return 1.0 - 4.0 * x / (3.0 * std::f64::consts::PI.sqrt()) + 0.5 * x * x;
    }
    (special::erfcx(x) + TWO_OVER_SQRT_PI * x - 1.0) / (x * x)
}

/// Output rate with EIT decay: eta_bar(L) / (tau_b_bar + 1/R_in).
///
/// Reduces to [`rate_out_perfect`] when EIT losses vanish, remains finite as
/// R_in grows without bound, and in general is non-monotonic in R_in.
pub fn rate_out(r_in: f64, params: &MediumParams) -> f64 {
    let ts = crate::params::derive_timescales(params).expect("params valid");
    rate_out_ts(r_in, &ts)
}

/// [`rate_out`] for a pre-derived set of timescales.
pub fn rate_out_ts(r_in: f64, ts: &Timescales) -> f64 {
    debug_assert!(r_in >= 0.0);
    if r_in == 0.0 {
        return 0.0;
    }
    let eta = special::erfcx(ts.tau_eit_full() * r_in);
    let tau_bar = ts.tau_b * tau_b_bar_ratio(r_in, ts);
    eta / (tau_bar + 1.0 / r_in)
}

/// Rate from naively merging all photons within consecutive intervals of
/// width `delta_t` into single ones: (1 - exp(-R_in dt)) / dt.
pub fn naive_rate(r_in: f64, delta_t: f64) -> f64 {
    debug_assert!(delta_t > 0.0 && r_in >= 0.0);
    -(-r_in * delta_t).exp_m1() / delta_t
}

/// Diagonal first-order correlation function G1(tau; tau) (ensemble-averaged
/// intensity) for square-pulse Poisson input entering an empty medium at
/// tau = 0, in the limit of perfect single-polariton EIT:
///
///   sum_{j=0}^{floor(tau/tau_b)} R e^{-R(tau - j tau_b)} [R(tau - j tau_b)]^j / j!
///
/// Terms are accumulated in the log domain (log-gamma for j!), and for long
/// times only the j-window that actually contributes is scanned, so the sum
/// is stable out to j of order 1e4 and beyond.
pub fn g1_diag(tau: f64, r_in: f64, tau_b: f64) -> f64 {
    debug_assert!(r_in >= 0.0 && tau_b > 0.0);
    if tau < 0.0 || r_in == 0.0 {
        return 0.0;
    }
    let jmax = (tau / tau_b).floor() as u64;
    if jmax <= 4096 {
        let mut acc = 0.0;
        for j in 0..=jmax {
            acc += g1_term(tau, r_in, tau_b, j);
        }
        return acc;
    }
    // dominant j is near tau / (tau_b + 1/R); expand outward until terms die
    let j_center = (tau / (tau_b + 1.0 / r_in)).round().clamp(0.0, jmax as f64) as u64;
    let mut acc = g1_term(tau, r_in, tau_b, j_center);
    let mut dead = 0;
    let mut j = j_center;
    while j > 0 && dead < 8 {
        j -= 1;
        let t = g1_term(tau, r_in, tau_b, j);
        acc += t;
        dead = if t < acc * 1e-18 { dead + 1 } else { 0 };
    }
    dead = 0;
    j = j_center;
    while j < jmax && dead < 8 {
        j += 1;
        let t = g1_term(tau, r_in, tau_b, j);
        acc += t;
        dead = if t < acc * 1e-18 { dead + 1 } else { 0 };
    }
    acc
}

#[inline]
fn g1_term(tau: f64, r_in: f64, tau_b: f64, j: u64) -> f64 {
    let x = tau - j as f64 * tau_b;
    if x < 0.0 {
        return 0.0;
    }
    if j == 0 {
        return r_in * (-r_in * x).exp();
    }
    if x == 0.0 {
        return 0.0;
    }
    let ln_t =
        r_in.ln() - r_in * x + j as f64 * (r_in * x).ln() - ln_gamma(j as f64 + 1.0);
    ln_t.exp()
}

/// Formation-time density of the p-th polariton (p >= 1): a Gamma(p, 1/R_in)
/// density shifted to start at (p-1) tau_b.
pub fn peak_density(p: u32, t: f64, r_in: f64, tau_b: f64) -> f64 {
    assert!(p >= 1, "peak index must be >= 1");
    debug_assert!(r_in >= 0.0 && tau_b > 0.0);
    if r_in == 0.0 {
        return 0.0;
    }
    let x = t - (p - 1) as f64 * tau_b;
    if x < 0.0 {
        return 0.0;
    }
    if p == 1 {
        return r_in * (-r_in * x).exp();
    }
    if x == 0.0 {
        return 0.0;
    }
    let k = (p - 1) as f64;
    (r_in.ln() - r_in * x + k * (r_in * x).ln() - ln_gamma(p as f64)).exp()
}

/// Off-diagonal G1(tau; tau') with a `near_branch` flag raised when
/// |tau - tau'| sits within 1e-12 tau_b of the branch point at tau_b (the
/// two branches agree there, but callers probing the boundary can tell).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagValue {
    pub value: f64,
    pub near_branch: bool,
}

/// First-order coherence G1(tau; tau') between two detection times.
///
/// For |tau - tau'| <= tau_b the diagonal value at the earlier time is
/// damped by exp(-2 R_in |tau - tau'|); beyond one blockade time an extra
/// vacancy-probability factor G1(|tau-tau'| - tau_b)/R_in applies. The two
/// branches agree at the boundary.
pub fn g1_offdiag(tau: f64, tau_prime: f64, r_in: f64, tau_b: f64) -> f64 {
    g1_offdiag_detailed(tau, tau_prime, r_in, tau_b).value
}

/// [`g1_offdiag`] with the branch-proximity flag.
pub fn g1_offdiag_detailed(tau: f64, tau_prime: f64, r_in: f64, tau_b: f64) -> OffDiagValue {
    debug_assert!(r_in >= 0.0 && tau_b > 0.0);
    let m = tau.min(tau_prime);
    let delta = (tau - tau_prime).abs();
    let near_branch = (delta - tau_b).abs() <= 1e-12 * tau_b;
    if r_in == 0.0 {
        return OffDiagValue {
            value: 0.0,
            near_branch,
        };
    }
    let diag = g1_diag(m, r_in, tau_b);
    let value = if delta <= tau_b {
        diag * (-2.0 * r_in * delta).exp()
    } else {
        diag * (-2.0 * r_in * tau_b).exp() * g1_diag(delta - tau_b, r_in, tau_b) / r_in
    };
    OffDiagValue { value, near_branch }
}

/// Diagonal second-order correlation G2(tau1, tau2): zero inside the
/// blockade band, a product of first-order diagonals outside.
pub fn g2_diag(tau1: f64, tau2: f64, r_in: f64, tau_b: f64) -> f64 {
    debug_assert!(tau1 >= 0.0 && tau2 >= 0.0);
    let delta = (tau2 - tau1).abs();
    theta(delta - tau_b) * g1_diag(tau1.min(tau2), r_in, tau_b) * g1_diag(delta - tau_b, r_in, tau_b)
}

/// Diagonal N-th-order correlation for an ascending list of detection times:
/// product over consecutive gaps, with a virtual event one blockade time
/// before the pulse onset.
pub fn gn_diag(taus: &[f64], r_in: f64, tau_b: f64) -> f64 {
    debug_assert!(
        taus.windows(2).all(|w| w[0] <= w[1]),
        "detection times must be sorted ascending"
    );
    let mut prev = -tau_b;
    let mut prod = 1.0;
    for &t in taus {
        let gap = t - prev - tau_b;
        if gap < 0.0 {
            return 0.0;
        }
        prod *= g1_diag(gap, r_in, tau_b);
        prev = t;
    }
    prod
}

/// Location and width of the p-th intensity peak (p >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakGeometry {
    /// Peak center measured from pulse onset: p (tau_b + 1/R_in).
    pub center: f64,
    /// Half width at half maximum, sqrt(ln(4) p) / R_in (valid for p >> 1).
    pub hwhm: f64,
}

pub fn peak_geometry(p: u32, r_in: f64, tau_b: f64) -> PeakGeometry {
    assert!(p >= 1, "peak index must be >= 1");
    debug_assert!(r_in > 0.0 && tau_b > 0.0);
    PeakGeometry {
        center: p as f64 * (tau_b + 1.0 / r_in),
        hwhm: (4f64.ln() * p as f64).sqrt() / r_in,
    }
}

/// Design bounds for converting a CW probe into a regular train of single
/// photons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainDesign {
    /// Regularity-limited train length at the EIT-capped input rate.
    pub n_loc: f64,
    /// Loss-limited train length for the requested loss fraction.
    pub n_eit: f64,
    /// Balanced optimum, cbrt(pi beta^2 d_b / (128 ln 2)).
    pub n_max: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// Minimum rate keeping the first n_eit peaks regular:
    /// sqrt(ln(4) n_eit) / (beta tau_b).
    pub r_in_lower: f64,
    /// Maximum rate keeping the EIT loss below epsilon:
    /// (sqrt(pi)/4) epsilon / tau_EIT(r_b).
    pub r_in_upper: f64,
}

impl TrainDesign {
    /// Evaluate all bounds; never fails on feasibility (see
    /// [`train_design`] for the checked variant). `n_eit_constant` is the
    /// order-one proportionality constant in N_EIT = c / epsilon.
    pub fn evaluate(
        ts: &Timescales,
        beta: f64,
        epsilon: f64,
        n_eit_constant: f64,
    ) -> Result<Self, AnalyticError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(AnalyticError::BetaOutOfRange(beta));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(AnalyticError::EpsilonOutOfRange(epsilon));
        }
        let ln4 = 4f64.ln();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let tau_eit_rb = ts.tau_eit_at(1.0);
        let n_eit = n_eit_constant / epsilon;
        let r_in_upper = 0.25 * sqrt_pi * epsilon / tau_eit_rb;
        let r_in_lower = (ln4 * n_eit).sqrt() / (beta * ts.tau_b);
        let n_loc = (beta * ts.tau_b * r_in_upper).powi(2) / ln4;
        let n_max =
            (std::f64::consts::PI * beta * beta * ts.d_b() / (128.0 * 2f64.ln())).cbrt();
        Ok(TrainDesign {
            n_loc,
            n_eit,
            n_max,
            beta,
            epsilon,
            r_in_lower,
            r_in_upper,
        })
    }

    /// True when a rate window exists for the requested train length.
    pub fn feasible(&self) -> bool {
        self.r_in_lower <= self.r_in_upper
    }
}

/// Train design with the default N_EIT = 1/epsilon constant; errors when the
/// rate window for the requested train length is empty.
pub fn train_design(
    ts: &Timescales,
    beta: f64,
    epsilon: f64,
) -> Result<TrainDesign, AnalyticError> {
    let d = TrainDesign::evaluate(ts, beta, epsilon, 1.0)?;
    if !d.feasible() {
        return Err(AnalyticError::InfeasibleWindow {
            lower: d.r_in_lower,
            upper: d.r_in_upper,
            n_requested: d.n_eit,
        });
    }
    Ok(d)
}

/// Model provenance tag for a transmission curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    PerfectEit,
    ImperfectEit,
    NaiveInterval,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::PerfectEit => "perfect_eit",
            ModelTag::ImperfectEit => "imperfect_eit",
            ModelTag::NaiveInterval => "naive_interval",
        }
    }
}

/// Ordered (r_in, r_out) samples of one transmission model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionCurve {
    points: Vec<(f64, f64)>,
    pub model_tag: ModelTag,
}

impl TransmissionCurve {
    /// Validates that r_in is strictly increasing and 0 <= r_out <= r_in.
    pub fn new(points: Vec<(f64, f64)>, model_tag: ModelTag) -> Result<Self, AnalyticError> {
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(AnalyticError::CurveNotIncreasing(i + 1));
            }
        }
        for (i, &(r_in, r_out)) in points.iter().enumerate() {
            if !(r_out >= 0.0) || r_out > r_in * (1.0 + 1e-12) {
                return Err(AnalyticError::CurveValueOutOfRange(i));
            }
        }
        Ok(TransmissionCurve { points, model_tag })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

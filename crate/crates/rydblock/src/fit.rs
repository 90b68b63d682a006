//! Experimental-data ingestion and least-squares extraction of gamma_EIT.
//!
//! The fit minimizes the weighted squared residual of the imperfect-EIT
//! output rate against measured (R_in, R_out) points, over gamma_EIT alone
//! with d_b and L/r_b held fixed: a coarse log-spaced scan followed by
//! golden-section refinement. The objective evaluates the same
//! [`crate::analytic::rate_out_ts`] as the public curve API.

use crate::analytic::{self, ModelTag, TransmissionCurve};
use crate::error::FitError;
use crate::params::{derive_timescales, MediumParams};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One measured transmission point; rates in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataRow {
    pub r_in: f64,
    pub r_out: f64,
    /// Measurement uncertainty on r_out, if reported.
    pub sigma: Option<f64>,
}

/// A validated transmission dataset, sorted by r_in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    pub rows: Vec<DataRow>,
    /// Free-text source label (file path or caller-supplied).
    pub metadata: String,
}

/// Rate units accepted by the CSV schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RateUnits {
    PerMicrosecond,
    PerSecond,
}

/// Load a transmission CSV: header `r_in,r_out[,sigma]`, rates in
/// photons/microsecond unless a pragma line `# units: per_second` precedes
/// the header. Rows are validated and sorted by r_in.
pub fn load_dataset(path: &Path) -> Result<DataSet, FitError> {
    let text = std::fs::read_to_string(path).map_err(|e| FitError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let ds = parse_dataset(&text, &path.display().to_string())?;
    Ok(ds)
}

/// [`load_dataset`] on in-memory text; `label` becomes the metadata field.
pub fn parse_dataset(text: &str, label: &str) -> Result<DataSet, FitError> {
    let mut units = RateUnits::PerMicrosecond;
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<DataRow> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if header.is_none() {
                let pragma = comment.trim();
                if let Some(u) = pragma.strip_prefix("units:") {
                    units = match u.trim() {
                        "per_second" => RateUnits::PerSecond,
                        "per_microsecond" => RateUnits::PerMicrosecond,
                        other => {
                            return Err(FitError::Parse {
                                line: line_no,
                                reason: format!("unknown units pragma `{other}`"),
                            })
                        }
                    };
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match &header {
            None => {
                let cols: Vec<String> = fields.iter().map(|s| s.to_lowercase()).collect();
                for required in ["r_in", "r_out"] {
                    if !cols.iter().any(|c| c == required) {
                        return Err(FitError::MissingColumn {
                            line: line_no,
                            column: required.to_string(),
                        });
                    }
                }
                header = Some(cols);
            }
            Some(cols) => {
                if fields.len() != cols.len() {
                    return Err(FitError::Parse {
                        line: line_no,
                        reason: format!(
                            "expected {} fields per the header, got {}",
                            cols.len(),
                            fields.len()
                        ),
                    });
                }
                let mut r_in = None;
                let mut r_out = None;
                let mut sigma = None;
                for (col, field) in cols.iter().zip(&fields) {
                    let value: f64 = field.parse().map_err(|_| FitError::Parse {
                        line: line_no,
                        reason: format!("cannot parse `{field}` in column `{col}` as a number"),
                    })?;
                    match col.as_str() {
                        "r_in" => r_in = Some(value),
                        "r_out" => r_out = Some(value),
                        "sigma" => sigma = Some(value),
                        _ => {
                            return Err(FitError::Parse {
                                line: line_no,
                                reason: format!("unknown column `{col}`"),
                            })
                        }
                    }
                }
                let scale = match units {
                    RateUnits::PerMicrosecond => 1e6,
                    RateUnits::PerSecond => 1.0,
                };
                let r_in = r_in.unwrap() * scale;
                let r_out = r_out.unwrap() * scale;
                let sigma = sigma.map(|s| s * scale);
                if !(r_in > 0.0) {
                    return Err(FitError::NonPositiveRate {
                        line: line_no,
                        value: r_in,
                    });
                }
                if !(r_out >= 0.0) {
                    return Err(FitError::NegativeOutput {
                        line: line_no,
                        value: r_out,
                    });
                }
                if let Some(s) = sigma {
                    if !(s > 0.0) {
                        return Err(FitError::BadSigma {
                            line: line_no,
                            value: s,
                        });
                    }
                }
                rows.push(DataRow { r_in, r_out, sigma });
            }
        }
    }
    if rows.is_empty() {
        return Err(FitError::EmptyDataset);
    }
    rows.sort_by(|a, b| a.r_in.total_cmp(&b.r_in));
    Ok(DataSet {
        rows,
        metadata: label.to_string(),
    })
}

/// Outcome of a gamma_EIT fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Fitted EIT linewidth (rad/s).
    pub gamma_eit_hat: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub sse: f64,
    /// Objective evaluations spent.
    pub n_evals: usize,
    /// Final golden-section interval.
    pub bracket: (f64, f64),
    /// True when the optimum landed within 1% of a user-bracket edge.
    pub boundary_warning: bool,
}

/// Weighted SSE of the imperfect-EIT curve at a trial gamma.
fn objective(
    gamma: f64,
    data: &DataSet,
    d_b: f64,
    length_ratio: f64,
    n_evals: &mut usize,
) -> f64 {
    *n_evals += 1;
    let params = MediumParams {
        d_b,
        gamma_eit: gamma,
        length_ratio,
        omega_c: None,
        big_gamma: None,
        v_g: None,
    };
    let ts = derive_timescales(&params).expect("positive gamma inside bracket");
    let mut sse = 0.0;
    for row in &data.rows {
        let w = match row.sigma {
            Some(s) => 1.0 / (s * s),
            None => 1.0,
        };
        let resid = analytic::rate_out_ts(row.r_in, &ts) - row.r_out;
        sse += w * resid * resid;
    }
    sse
}

/// Fit gamma_EIT over `bracket` by a 64-point log-spaced scan plus
/// golden-section refinement to relative bracket width 1e-6.
pub fn fit_gamma(
    data: &DataSet,
    d_b: f64,
    length_ratio: f64,
    bracket: (f64, f64),
) -> Result<FitResult, FitError> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(FitError::BadBracket { lo, hi });
    }
    if data.rows.is_empty() {
        return Err(FitError::EmptyDataset);
    }
    MediumParams::new(d_b, lo, length_ratio)?;

    let mut n_evals = 0usize;
    let mut f = |g: f64| objective(g, data, d_b, length_ratio, &mut n_evals);

    // coarse scan, 64 log-spaced points
    const SCAN: usize = 64;
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    let grid: Vec<f64> = (0..SCAN)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (SCAN - 1) as f64).exp())
        .collect();
    for (i, &g) in grid.iter().enumerate() {
        let v = f(g);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }

    // golden-section refinement in log space around the scan minimum
    let mut a = grid[best_i.saturating_sub(1)].ln();
    let mut b = grid[(best_i + 1).min(SCAN - 1)].ln();
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1.exp());
    let mut f2 = f(x2.exp());
    while b - a > 1e-6 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1.exp());
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2.exp());
        }
    }
    let (ln_best, sse) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let gamma_hat = ln_best.exp();
    let rel = 0.01 * (ln_hi - ln_lo);
    let boundary_warning = ln_best - ln_lo <= rel || ln_hi - ln_best <= rel;
    Ok(FitResult {
        gamma_eit_hat: gamma_hat,
        sse,
        n_evals,
        bracket: (a.exp(), b.exp()),
        boundary_warning,
    })
}

/// Imperfect-EIT prediction curve on an increasing r_in grid.
pub fn predict_curve(
    params: &MediumParams,
    r_in_grid: &[f64],
) -> Result<TransmissionCurve, FitError> {
    let ts = derive_timescales(params)?;
    let points = r_in_grid
        .iter()
        .map(|&r| (r, analytic::rate_out_ts(r, &ts)))
        .collect();
    TransmissionCurve::new(points, ModelTag::ImperfectEit)
        .map_err(|e| FitError::Parse {
            line: 0,
            reason: e.to_string(),
        })
}

/// Perfect-EIT comparison curve on the same grid.
pub fn perfect_curve(tau_b: f64, r_in_grid: &[f64]) -> TransmissionCurve {
    let points = r_in_grid
        .iter()
        .map(|&r| (r, analytic::rate_out_perfect(r, tau_b)))
        .collect();
    TransmissionCurve::new(points, ModelTag::PerfectEit).expect("bounded by construction")
}

/// Interval-merging comparison curve, as displayed next to the data.
pub fn naive_curve(delta_t: f64, r_in_grid: &[f64]) -> TransmissionCurve {
    let points = r_in_grid
        .iter()
        .map(|&r| (r, analytic::naive_rate(r, delta_t)))
        .collect();
    TransmissionCurve::new(points, ModelTag::NaiveInterval).expect("bounded by construction")
}

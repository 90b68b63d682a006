//! Gaussian EIT filtering.
//!
//! A polariton whose temporal extent is short compared to the filtering time
//! tau_EIT loses amplitude to the finite EIT window. The filter is a Gaussian
//! with frequency response exp(-w^2 tau_EIT^2 / 2), i.e. a unit-area
//! real-space kernel of standard deviation tau_EIT applied per coordinate of
//! the correlation functions.

pub mod two_photon;

use crate::error::FilterError;
use crate::grid::{CorrelationGrid, GridData};
use crate::params::Timescales;
use crate::quad;
use crate::special;
use serde::{Deserialize, Serialize};

pub use two_photon::{two_photon_transmission, TwoPhotonSetup};

/// Gaussian filtering kernel description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    /// Kernel standard deviation (the filtering time), > 0.
    pub tau_eit: f64,
    /// Truncation half-width of the kernel in units of tau_eit.
    pub window_sigmas: f64,
}

impl FilterSpec {
    pub fn new(tau_eit: f64) -> Result<Self, FilterError> {
        FilterSpec {
            tau_eit,
            window_sigmas: 8.0,
        }
        .validated()
    }

    pub fn with_window_sigmas(mut self, window_sigmas: f64) -> Result<Self, FilterError> {
        self.window_sigmas = window_sigmas;
        self.validated()
    }

    fn validated(self) -> Result<Self, FilterError> {
        if !(self.tau_eit > 0.0) {
            return Err(FilterError::NonPositiveTauEit(self.tau_eit));
        }
        if !(self.window_sigmas > 0.0) {
            return Err(FilterError::NonPositiveWindow(self.window_sigmas));
        }
        Ok(self)
    }
}

/// EIT transmission of a square pulse of duration `tau` after Gaussian
/// filtering with time `tau_eit`:
///
///   Erf[tau/(2 tau_EIT)] - (2 tau_EIT / (sqrt(pi) tau)) (1 - exp(-tau^2/(4 tau_EIT^2)))
///
/// Monotone increasing in `tau`, with limit 0 at tau -> 0.
pub fn eta_square_pulse_raw(tau: f64, tau_eit: f64) -> f64 {
    debug_assert!(tau_eit > 0.0);
    if tau <= 0.0 {
        return 0.0;
    }
    let x = tau / (2.0 * tau_eit);
    special::erf(x) + (-x * x).exp_m1() / (std::f64::consts::PI.sqrt() * x)
}

/// [`eta_square_pulse_raw`] with the filtering time taken at propagation
/// depth `l_over_rb` blockade radii.
pub fn eta_square_pulse(tau: f64, l_over_rb: f64, ts: &Timescales) -> f64 {
    eta_square_pulse_raw(tau, ts.tau_eit_at(l_over_rb))
}

/// Poisson-averaged transmission by adaptive quadrature of
/// int_0^inf R (R tau) e^{-R tau} eta_EIT(tau, l) dtau — the independent
/// route to the closed-form [`crate::analytic::eta_bar`].
pub fn eta_bar_via_average(
    l_over_rb: f64,
    r_in: f64,
    ts: &Timescales,
) -> Result<f64, FilterError> {
    assert!(r_in > 0.0, "averaging requires r_in > 0");
    let tau_eit = ts.tau_eit_at(l_over_rb);
    // substitute u = R tau; the Gamma(2) weight u e^{-u} is spent by u = 45.
    // eta transitions on the scale u ~ tau_eit r_in, which can sit deep
    // inside the first panel, so integrate that layer separately.
    let layer = (20.0 * tau_eit * r_in).min(22.5);
    let f = |u: f64| u * (-u).exp() * eta_square_pulse_raw(u / r_in, tau_eit);
    let inner = quad::integrate(&f, 0.0, layer, 1e-13, 1e-10, 4000);
    let outer = quad::integrate(&f, layer, 45.0, 1e-13, 1e-10, 4000);
    if !(inner.converged && outer.converged) {
        return Err(FilterError::QuadratureNonConvergence {
            achieved: inner.abs_error + outer.abs_error,
            requested: 1e-12f64.max(1e-10 * (inner.value + outer.value).abs()),
        });
    }
    Ok(inner.value + outer.value)
}

/// Transmission of one isolated, EIT-filtered intensity peak:
/// erfcx(2 tau_EIT R_in), independent of the peak index.
pub fn eta_filtered_peak(r_in: f64, tau_eit: f64) -> f64 {
    debug_assert!(r_in >= 0.0 && tau_eit >= 0.0);
    special::erfcx(2.0 * tau_eit * r_in)
}

/// Composite Newton-Cotes weights for `n` equal intervals of width `dt`:
/// Simpson when the count is even, a 3/8-rule chunk absorbs an odd count,
/// trapezoid only for a single interval.
fn newton_cotes_weights(n: usize, dt: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), n + 1);
    out.iter_mut().for_each(|w| *w = 0.0);
    if n == 0 {
        return;
    }
    if n == 1 {
        out[0] = 0.5 * dt;
        out[1] = 0.5 * dt;
        return;
    }
    let mut start = 0usize;
    if n % 2 == 1 {
        // 3/8 rule on the first three intervals
        let c = 3.0 * dt / 8.0;
        out[0] += c;
        out[1] += 3.0 * c;
        out[2] += 3.0 * c;
        out[3] += c;
        start = 3;
        if n == 3 {
            return;
        }
    }
    let c = dt / 3.0;
    out[start] += c;
    let mut i = start + 1;
    while i < n {
        out[i] += 4.0 * c;
        if i + 1 < n {
            out[i + 1] += 2.0 * c;
        }
        i += 2;
    }
    out[n] += c;
}

/// Window quadrature weights with a panel break at `split` (a node index),
/// so integrands that kink there keep high-order convergence.
fn split_weights(n_points: usize, split: usize, dt: f64, scratch: &mut [f64], out: &mut [f64]) {
    debug_assert_eq!(out.len(), n_points);
    out.iter_mut().for_each(|w| *w = 0.0);
    if split == 0 || split >= n_points - 1 {
        newton_cotes_weights(n_points - 1, dt, out);
        return;
    }
    newton_cotes_weights(split, dt, &mut scratch[..=split]);
    out[..=split].copy_from_slice(&scratch[..=split]);
    let right = n_points - 1 - split;
    newton_cotes_weights(right, dt, &mut scratch[..=right]);
    for (o, s) in out[split..].iter_mut().zip(&scratch[..=right]) {
        *o += s;
    }
}

/// Unit-area kernel samples on a window of half-width `k` samples.
fn window_kernel(spec: &FilterSpec, dt: f64, k: usize) -> Vec<f64> {
    let n = 2 * k + 1;
    let mut kern: Vec<f64> = (0..n)
        .map(|i| {
            let x = (i as f64 - k as f64) * dt;
            (-x * x / (2.0 * spec.tau_eit * spec.tau_eit)).exp()
        })
        .collect();
    let mut w = vec![0.0; n];
    newton_cotes_weights(n - 1, dt, &mut w);
    let norm: f64 = kern.iter().zip(&w).map(|(kv, wv)| kv * wv).sum();
    kern.iter_mut().for_each(|kv| *kv /= norm);
    kern
}

/// One filtered-diagonal evaluation: the 2-D window quadrature of
/// g(i, j) kern(i-c) kern(j-c), with the inner axis split at the kink on the
/// equal-time diagonal.
fn convolve_window(
    g: impl Fn(usize, usize) -> f64,
    c: usize,
    k: usize,
    dt: f64,
    kern: &[f64],
    w_outer: &[f64],
    w_inner: &mut [f64],
    scratch: &mut [f64],
) -> f64 {
    let n = 2 * k + 1;
    let lo = c - k;
    let mut acc = 0.0;
    for di in 0..n {
        let i = lo + di;
        // the diagonal node j == i, clamped into the window
        let split = i.saturating_sub(lo).min(n - 1);
        split_weights(n, split, dt, scratch, w_inner);
        let mut inner = 0.0;
        for dj in 0..n {
            inner += w_inner[dj] * kern[dj] * g(i, lo + dj);
        }
        acc += w_outer[di] * kern[di] * inner;
    }
    acc
}

/// Filtered diagonal G~1(tau; tau) = iint G1(t1; t2) K(t1-tau) K(t2-tau),
/// evaluated on the subset of grid times whose full kernel window the grid
/// covers.
///
/// The grid must be 2-D, uniform, and no coarser than tau_eit/10.
pub fn filter_g1_diag(
    grid: &CorrelationGrid,
    spec: &FilterSpec,
) -> Result<CorrelationGrid, FilterError> {
    let spec = spec.validated()?;
    let values = match grid.data() {
        GridData::Full(v) => v,
        GridData::Diagonal(_) => return Err(FilterError::GridNotFull),
    };
    let times = grid.times();
    let n = times.len();
    if n < 3 || !quad::is_uniform(times) {
        return Err(FilterError::GridNotUniform);
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    let required = spec.tau_eit / 10.0;
    if dt > required * (1.0 + 1e-12) {
        return Err(FilterError::GridResolution {
            actual: dt,
            required,
        });
    }
    let k = (spec.window_sigmas * spec.tau_eit / dt + 1e-9).floor() as usize;
    if 2 * k + 1 > n {
        return Err(FilterError::GridTooNarrow);
    }
    let kern = window_kernel(&spec, dt, k);
    let win = 2 * k + 1;
    let mut w_outer = vec![0.0; win];
    newton_cotes_weights(win - 1, dt, &mut w_outer);
    let mut w_inner = vec![0.0; win];
    let mut scratch = vec![0.0; win];

    let mut out_times = Vec::with_capacity(n - 2 * k);
    let mut out_values = Vec::with_capacity(n - 2 * k);
    for c in k..n - k {
        let v = convolve_window(
            |i, j| values[i * n + j],
            c,
            k,
            dt,
            &kern,
            &w_outer,
            &mut w_inner,
            &mut scratch,
        );
        out_times.push(times[c]);
        out_values.push(v);
    }
    Ok(CorrelationGrid::diagonal(out_times, out_values))
}

/// Filtered diagonal sampled at arbitrary output times, windowing the
/// analytic G1(t1; t2) locally around each point (resolution tau_eit/12).
pub fn filtered_g1_profile(
    r_in: f64,
    tau_b: f64,
    spec: &FilterSpec,
    out_times: &[f64],
) -> Result<CorrelationGrid, FilterError> {
    let spec = spec.validated()?;
    let dt = spec.tau_eit / 12.0;
    let k = (spec.window_sigmas * spec.tau_eit / dt + 1e-9).floor() as usize;
    let kern = window_kernel(&spec, dt, k);
    let win = 2 * k + 1;
    let mut w_outer = vec![0.0; win];
    newton_cotes_weights(win - 1, dt, &mut w_outer);
    let mut w_inner = vec![0.0; win];
    let mut scratch = vec![0.0; win];
    let mut local = vec![0.0f64; win];
    let mut values = Vec::with_capacity(out_times.len());
    for &tau in out_times {
        for (i, l) in local.iter_mut().enumerate() {
            *l = tau + (i as f64 - k as f64) * dt;
        }
        let v = convolve_window(
            |i, j| crate::analytic::g1_offdiag(local[i], local[j], r_in, tau_b),
            k,
            k,
            dt,
            &kern,
            &w_outer,
            &mut w_inner,
            &mut scratch,
        );
        values.push(v);
    }
    Ok(CorrelationGrid::diagonal(out_times.to_vec(), values))
}

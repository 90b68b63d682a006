//! Seeded Monte-Carlo event simulator of the hard-sphere blockade under
//! Poisson input; the brute-force oracle for rates and correlation functions.
//!
//! Determinism contract: every estimate is a pure function of
//! `(seed, parameters, n_trials)`. Per-trial RNG streams are derived
//! counter-style from (seed, trial index), per-trial results are merged as
//! exact integer sums or in fixed trial order, so serial and parallel runs
//! agree bit for bit no matter how many threads rayon uses.

use crate::error::McError;
use crate::filter::eta_square_pulse_raw;
use crate::params::{derive_timescales, MediumParams, Timescales};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Burn-in discarded at the start of every rate-estimation window.
pub const BURN_IN_TAU_B: f64 = 10.0;

/// Which loss channels the sweep applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Hard-sphere scattering only; every polariton exits.
    Perfect,
    /// Hard-sphere scattering plus single-polariton EIT decay.
    Lossy,
}

/// One Monte-Carlo realization of the event history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTrain {
    /// Sorted photon arrival times.
    pub arrivals: Vec<f64>,
    /// Arrival times that formed polaritons.
    pub formations: Vec<f64>,
    /// Arrival times scattered by an active blockade.
    pub scattered: Vec<f64>,
    /// (formation time, decay depth l*/r_b) for EIT-lost polaritons.
    pub decays: Vec<(f64, f64)>,
    /// Exit times of transmitted polaritons (formation + traversal).
    pub outputs: Vec<f64>,
    pub seed: u64,
    pub duration: f64,
}

/// RNG stream for one trial, derived counter-style from the base seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sorted Poisson arrival times on [0, duration): exponential gaps with mean
/// 1/r_in.
pub fn sample_arrivals<R: Rng>(r_in: f64, duration: f64, rng: &mut R) -> Vec<f64> {
    debug_assert!(r_in >= 0.0 && duration > 0.0);
    let mut arrivals = Vec::new();
    if r_in == 0.0 {
        return arrivals;
    }
    let mut t = 0.0;
    loop {
        let u: f64 = rng.gen();
        t += -(1.0 - u).ln() / r_in;
        if t >= duration {
            return arrivals;
        }
        arrivals.push(t);
    }
}

fn check_sorted(arrivals: &[f64]) -> Result<(), McError> {
    for (i, w) in arrivals.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(McError::UnsortedArrivals(i + 1));
        }
    }
    Ok(())
}

/// Perfect-EIT sweep: a photon forms a polariton iff at least one blockade
/// time has passed since the previous formation (a separation of exactly
/// tau_b admits formation); otherwise it scatters. Every formation exits.
pub fn simulate_perfect(
    arrivals: &[f64],
    tau_b: f64,
    duration: f64,
    seed: u64,
) -> Result<EventTrain, McError> {
    check_sorted(arrivals)?;
    let mut formations = Vec::new();
    let mut scattered = Vec::new();
    let mut last_formation = f64::NEG_INFINITY;
    for &t in arrivals {
        if t - last_formation >= tau_b {
            formations.push(t);
            last_formation = t;
        } else {
            scattered.push(t);
        }
    }
    Ok(EventTrain {
        arrivals: arrivals.to_vec(),
        outputs: formations.clone(),
        formations,
        scattered,
        decays: Vec::new(),
        seed,
        duration,
    })
}

/// Survival function of a polariton of temporal extent `extent` against EIT
/// decay, as a function of depth (in blockade radii).
fn survival(extent: f64, l_over_rb: f64, ts: &Timescales) -> f64 {
    eta_square_pulse_raw(extent, ts.tau_eit_at(l_over_rb))
}

/// Invert S(l) = u by bisection on l in (0, length_ratio].
fn invert_survival(extent: f64, u: f64, length_ratio: f64, ts: &Timescales) -> f64 {
    if extent <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, length_ratio);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if survival(extent, mid, ts) >= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lossy sweep. Each formed polariton's temporal extent is the interval its
/// wave packet is localized to by the serialized treatment: from the moment
/// the medium became vacant (the previous blockade release, or the window
/// start) through the formation to the first R-R event after it. The
/// backward piece is read off the realized stream; the forward piece is a
/// fresh exponential gap with mean 1/`r_in` (the same law as the next
/// arrival), truncated at the window end for the last polariton. Re-using
/// the realized next arrival instead would tie later formation times to the
/// survival outcome, which is a function of the extent, and bias the
/// serialized averages; with the fresh forward piece every extent carries
/// the R^2 tau e^{-R tau} weight exactly.
///
/// Survival along the medium is sampled by inverting the depth profile
/// S(l) = eta_EIT(extent, l) on a uniform deviate; a decay at l* < r_b
/// releases the blockade at formation + tau_b l*/r_b and a new polariton may
/// form at the first arrival strictly after that release. Survivors past
/// l = L exit at formation + (L/r_b) tau_b.
pub fn simulate_lossy<R: Rng>(
    arrivals: &[f64],
    params: &MediumParams,
    r_in: f64,
    duration: f64,
    seed: u64,
    rng: &mut R,
) -> Result<EventTrain, McError> {
    check_sorted(arrivals)?;
    let ts = derive_timescales(params).expect("validated params");
    let length_ratio = params.length_ratio;
    let traversal = length_ratio * ts.tau_b;

    let mut formations = Vec::new();
    let mut scattered = Vec::new();
    let mut decays = Vec::new();
    let mut outputs = Vec::new();
    let mut next_allowed = f64::NEG_INFINITY;
    let mut strict = false;
    let mut vacant_since = 0.0f64;

    for (i, &t) in arrivals.iter().enumerate() {
        let admit = if strict {
            t > next_allowed
        } else {
            t >= next_allowed
        };
        if !admit {
            scattered.push(t);
            continue;
        }
        formations.push(t);
        let u_gap: f64 = rng.gen();
        let mut forward = -(1.0 - u_gap).ln() / r_in;
        if i + 1 >= arrivals.len() {
            forward = forward.min((duration - t).max(0.0));
        }
        let extent = (t - vacant_since).max(0.0) + forward;
        let u: f64 = rng.gen();
        if u < survival(extent, length_ratio, &ts) {
            outputs.push(t + traversal);
            next_allowed = t + ts.tau_b;
            strict = false;
        } else {
            let l_star = invert_survival(extent, u, length_ratio, &ts);
            decays.push((t, l_star));
            if l_star < 1.0 {
                next_allowed = t + ts.tau_b * l_star;
                strict = true;
            } else {
                next_allowed = t + ts.tau_b;
                strict = false;
            }
        }
        vacant_since = next_allowed;
    }
    Ok(EventTrain {
        arrivals: arrivals.to_vec(),
        formations,
        scattered,
        decays,
        outputs,
        seed,
        duration,
    })
}

/// A Monte-Carlo estimate with its statistical standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_trials: usize,
    pub seed: u64,
}

fn run_one(
    params: &MediumParams,
    mode: Mode,
    r_in: f64,
    duration: f64,
    seed: u64,
    trial: u64,
) -> EventTrain {
    let mut rng = trial_rng(seed, trial);
    let arrivals = sample_arrivals(r_in, duration, &mut rng);
    match mode {
        Mode::Perfect => {
            let tau_b = derive_timescales(params).expect("validated params").tau_b;
            simulate_perfect(&arrivals, tau_b, duration, seed).expect("sorted by construction")
        }
        Mode::Lossy => simulate_lossy(&arrivals, params, r_in, duration, seed, &mut rng)
            .expect("sorted by construction"),
    }
}

/// Mean output-photon rate with standard error across independent trials.
///
/// Each trial simulates [0, duration], drops a 10 tau_b burn-in, and counts
/// polaritons formed inside the remaining window that exit the medium.
pub fn estimate_rate(
    params: &MediumParams,
    mode: Mode,
    r_in: f64,
    duration: f64,
    n_trials: usize,
    seed: u64,
) -> Result<McEstimate, McError> {
    if n_trials == 0 {
        return Err(McError::NoTrials);
    }
    let ts = derive_timescales(params).expect("validated params");
    let burn = BURN_IN_TAU_B * ts.tau_b;
    if duration <= 2.0 * burn {
        return Err(McError::DurationTooShort {
            duration,
            burn_in: burn,
        });
    }
    if r_in == 0.0 {
        return Ok(McEstimate {
            value: 0.0,
            std_error: 0.0,
            n_trials,
            seed,
        });
    }
    let traversal = params.length_ratio * ts.tau_b;
    let window = duration - burn;
    let counts: Vec<u64> = (0..n_trials as u64)
        .into_par_iter()
        .map(|trial| {
            let train = run_one(params, mode, r_in, duration, seed, trial);
            let in_window = |tf: f64| tf > burn && tf <= duration;
            let count = match mode {
                Mode::Perfect => train.formations.iter().filter(|&&t| in_window(t)).count(),
                Mode::Lossy => train
                    .outputs
                    .iter()
                    .filter(|&&e| in_window(e - traversal))
                    .count(),
            };
            count as u64
        })
        .collect();
    let (sum, sumsq) = counts
        .iter()
        .fold((0u128, 0u128), |(s, s2), &c| {
            (s + c as u128, s2 + (c as u128) * (c as u128))
        });
    let n = n_trials as f64;
    let mean = sum as f64 / n;
    let var = if n_trials > 1 {
        ((sumsq as f64) - n * mean * mean) / (n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        value: mean / window,
        std_error: (var / n).sqrt().max(0.0) / window,
        n_trials,
        seed,
    })
}

/// Mean effective blockade duration per polariton in the lossy sweep.
///
/// The sampled extents are exactly Gamma(2, 1/R_in)-distributed for every
/// polariton except the last of a window (whose extent is truncated at the
/// window end), so that one is excluded from the statistic.
pub fn estimate_mean_blockade(
    params: &MediumParams,
    r_in: f64,
    duration: f64,
    n_trials: usize,
    seed: u64,
) -> Result<McEstimate, McError> {
    if n_trials == 0 {
        return Err(McError::NoTrials);
    }
    let ts = derive_timescales(params).expect("validated params");
    // (sum of blockade durations, qualifying formation count) per trial
    let per_trial: Vec<(f64, u64)> = (0..n_trials as u64)
        .into_par_iter()
        .map(|trial| {
            let train = run_one(params, Mode::Lossy, r_in, duration, seed, trial);
            let last = train.arrivals.last().copied();
            let mut di = 0usize;
            let mut sum = 0.0;
            let mut count = 0u64;
            for &tf in &train.formations {
                let decayed = di < train.decays.len() && train.decays[di].0 == tf;
                let dur = if decayed {
                    let l = train.decays[di].1;
                    di += 1;
                    ts.tau_b * l.min(1.0)
                } else {
                    ts.tau_b
                };
                if Some(tf) == last {
                    continue;
                }
                sum += dur;
                count += 1;
            }
            (sum, count)
        })
        .collect();
    let total: f64 = per_trial.iter().map(|p| p.0).sum();
    let count: u64 = per_trial.iter().map(|p| p.1).sum();
    if count == 0 {
        return Ok(McEstimate {
            value: 0.0,
            std_error: 0.0,
            n_trials,
            seed,
        });
    }
    let ratio = total / count as f64;
    // cluster-robust variance of the ratio estimator over trials
    let mut var = 0.0;
    for &(s, c) in &per_trial {
        let d = s - ratio * c as f64;
        var += d * d;
    }
    let se = var.sqrt() / count as f64;
    Ok(McEstimate {
        value: ratio,
        std_error: se,
        n_trials,
        seed,
    })
}

/// A per-bin density histogram with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram1d {
    /// bins + 1 edges spanning [0, t_max].
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    pub n_trials: usize,
    pub seed: u64,
}

/// A joint histogram over [0, t_max]^2 (row-major, ordered pairs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2d {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    pub n_trials: usize,
    pub seed: u64,
}

fn required_bins(t_max: f64, tau_b: f64) -> usize {
    (10.0 * t_max / tau_b).ceil() as usize
}

/// Accumulate integer per-trial bin counts (and squares) over all trials in
/// fixed-size chunks; integer addition keeps the merge order-insensitive.
fn accumulate<F>(n_trials: usize, n_bins: usize, fill: F) -> (Vec<u64>, Vec<u64>)
where
    F: Fn(u64, &mut [u32]) + Sync,
{
    const CHUNK: usize = 256;
    let n_chunks = n_trials.div_ceil(CHUNK);
    let parts: Vec<(Vec<u64>, Vec<u64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut sums = vec![0u64; n_bins];
            let mut sq = vec![0u64; n_bins];
            let mut scratch = vec![0u32; n_bins];
            let lo = ci * CHUNK;
            let hi = ((ci + 1) * CHUNK).min(n_trials);
            for trial in lo..hi {
                scratch.fill(0);
                fill(trial as u64, &mut scratch);
                for (b, &c) in scratch.iter().enumerate() {
                    if c > 0 {
                        sums[b] += c as u64;
                        sq[b] += (c as u64) * (c as u64);
                    }
                }
            }
            (sums, sq)
        })
        .collect();
    let mut sums = vec![0u64; n_bins];
    let mut sq = vec![0u64; n_bins];
    for (ps, pq) in parts {
        for b in 0..n_bins {
            sums[b] += ps[b];
            sq[b] += pq[b];
        }
    }
    (sums, sq)
}

fn density_and_errors(
    sums: &[u64],
    sq: &[u64],
    n_trials: usize,
    bin_measure: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = n_trials as f64;
    let mut density = Vec::with_capacity(sums.len());
    let mut std_error = Vec::with_capacity(sums.len());
    for (&s, &s2) in sums.iter().zip(sq) {
        let mean = s as f64 / n;
        let var = if n_trials > 1 {
            ((s2 as f64) - n * mean * mean) / (n - 1.0)
        } else {
            0.0
        };
        density.push(mean / bin_measure);
        std_error.push((var.max(0.0) / n).sqrt() / bin_measure);
    }
    (density, std_error)
}

/// Per-bin density of polariton formation times over [0, t_max), averaged
/// across trials. Requires at least 10 bins per blockade time.
pub fn histogram_g1_diag(
    params: &MediumParams,
    mode: Mode,
    r_in: f64,
    t_max: f64,
    bins: usize,
    n_trials: usize,
    seed: u64,
) -> Result<Histogram1d, McError> {
    if n_trials == 0 {
        return Err(McError::NoTrials);
    }
    let ts = derive_timescales(params).expect("validated params");
    let required = required_bins(t_max, ts.tau_b);
    if bins < required {
        return Err(McError::TooFewBins {
            required,
            got: bins,
            t_max,
        });
    }
    let width = t_max / bins as f64;
    let (sums, sq) = accumulate(n_trials, bins, |trial, scratch| {
        let train = run_one(params, mode, r_in, t_max, seed, trial);
        for &t in &train.formations {
            let b = (t / width) as usize;
            if b < bins {
                scratch[b] += 1;
            }
        }
    });
    let (density, std_error) = density_and_errors(&sums, &sq, n_trials, width);
    Ok(Histogram1d {
        edges: (0..=bins).map(|i| i as f64 * width).collect(),
        density,
        std_error,
        n_trials,
        seed,
    })
}

/// Joint density of ordered formation-time pairs over [0, t_max)^2.
pub fn histogram_g2(
    params: &MediumParams,
    mode: Mode,
    r_in: f64,
    t_max: f64,
    bins: usize,
    n_trials: usize,
    seed: u64,
) -> Result<Histogram2d, McError> {
    if n_trials == 0 {
        return Err(McError::NoTrials);
    }
    let ts = derive_timescales(params).expect("validated params");
    let required = required_bins(t_max, ts.tau_b);
    if bins < required {
        return Err(McError::TooFewBins {
            required,
            got: bins,
            t_max,
        });
    }
    let width = t_max / bins as f64;
    let (sums, sq) = accumulate(n_trials, bins * bins, |trial, scratch| {
        let train = run_one(params, mode, r_in, t_max, seed, trial);
        let idx: Vec<usize> = train
            .formations
            .iter()
            .map(|&t| (t / width) as usize)
            .filter(|&b| b < bins)
            .collect();
        for (a, &b1) in idx.iter().enumerate() {
            for (b, &b2) in idx.iter().enumerate() {
                if a != b {
                    scratch[b1 * bins + b2] += 1;
                }
            }
        }
    });
    let (density, std_error) = density_and_errors(&sums, &sq, n_trials, width * width);
    Ok(Histogram2d {
        edges: (0..=bins).map(|i| i as f64 * width).collect(),
        density,
        std_error,
        n_trials,
        seed,
    })
}

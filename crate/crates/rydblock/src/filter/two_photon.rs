//! Transmission of a two-photon square pulse through a medium of length
//! L = r_b, combining the hard-sphere exclusion with Gaussian EIT filtering.
//!
//! The unscattered two-photon amplitude is uniform (1/tau_end) on the region
//! {0 <= t1, t2 <= tau_end, |t2 - t1| >= tau_b}; each photon coordinate is
//! filtered by a Gaussian amplitude kernel of standard deviation
//! tau_EIT(r_b). The transmitted probability is the squared norm of the
//! filtered amplitude, which reduces exactly to
//!
//!   T2 = (2 K_uu + 2 K_ul) / tau_end^2,
//!   K_pq = iint_{P x Q} C(t1 - t1') C(t2 - t2') dt dt',
//!
//! over the two triangles P, Q in {upper, lower} of the support, with
//! C = K * K a Gaussian of standard deviation sqrt(2) tau_EIT. The inner
//! (t2, t2') pair integrates to the closed-form Gaussian overlap of two
//! intervals, and the t1 sweep along the kernel diagonal is closed form as
//! well, leaving a single smooth 1-D integral in z = t1 - t1'. This stays
//! cheap and accurate from d_b of a few up to the unfiltered limit, where a
//! frequency-box quadrature would need to resolve ~tau_end/tau_EIT
//! oscillation periods per axis.

use crate::error::FilterError;
use crate::params::{derive_timescales, MediumParams};
use crate::quad;
use crate::special::{norm_cdf, norm_pdf};
use serde::{Deserialize, Serialize};

/// Two-photon square-pulse arrangement; the medium length is fixed at one
/// blockade radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonSetup {
    /// Pulse duration (s), >= tau_b.
    pub tau_end: f64,
    /// Optical depth per blockade radius.
    pub d_b: f64,
}

/// Medium length in blockade radii used by the two-photon comparison.
pub const MEDIUM_LENGTH_RATIO: f64 = 1.0;

/// First antiderivative chain of the normal density: G2' = Phi, G3' = G2.
#[inline]
fn g2f(z: f64) -> f64 {
    z * norm_cdf(z) + norm_pdf(z)
}

#[inline]
fn g3f(z: f64) -> f64 {
    0.5 * ((z * z + 1.0) * norm_cdf(z) + z * norm_pdf(z))
}

/// Transmission probability of the two-photon component.
pub fn two_photon_transmission(
    setup: &TwoPhotonSetup,
    gamma_eit: f64,
) -> Result<f64, FilterError> {
    let params = MediumParams::new(setup.d_b, gamma_eit, MEDIUM_LENGTH_RATIO)
        .expect("two-photon setup parameters");
    let ts = derive_timescales(&params).expect("validated params");
    transmission_raw(ts.tau_b, ts.tau_eit_at(1.0), setup.tau_end)
}

/// Core computation in terms of the three timescales.
pub fn transmission_raw(tau_b: f64, tau_eit: f64, tau_end: f64) -> Result<f64, FilterError> {
    if tau_end < tau_b {
        return Err(FilterError::PulseTooShort { tau_end, tau_b });
    }
    let t_len = tau_end - tau_b;
    if t_len == 0.0 {
        return Ok(0.0);
    }
    let sig = std::f64::consts::SQRT_2 * tau_eit;
    let c_pdf = |z: f64| norm_pdf(z / sig) / sig;

    // t1 in [max(0,z), min(T, T+z)], both photons in the upper triangle
    let h_uu = |z: f64| -> f64 {
        let lo = z.max(0.0);
        let hi = t_len.min(t_len + z);
        if hi <= lo {
            return 0.0;
        }
        let c = z / sig;
        let s_lo = (lo - t_len) / sig;
        let s_hi = (hi - t_len) / sig;
        sig * sig * (g3f(c - s_lo) - g3f(c - s_hi) + g3f(s_hi) - g3f(s_lo))
            - sig * (hi - lo) * (g2f(c) + g2f(0.0))
    };

    // t1 in the upper triangle, t1' = t1 - z in the lower one
    let h_ul = |z: f64| -> f64 {
        let lo = (tau_b + z).max(0.0);
        let hi = t_len.min(tau_end + z);
        if hi <= lo {
            return 0.0;
        }
        sig * (hi - lo) * (g2f(tau_end / sig) + g2f((2.0 * tau_b + z) / sig))
            - sig * sig * (g3f((hi + tau_b) / sig) - g3f((lo + tau_b) / sig))
            - sig
                * sig
                * (g3f((tau_end + tau_b + z - lo) / sig) - g3f((tau_end + tau_b + z - hi) / sig))
    };

    let abs_tol = 1e-13 * tau_end * tau_end;
    let reach = 14.0 * sig;

    let r_uu = quad::integrate(
        |z| c_pdf(z) * h_uu(z),
        (-t_len).max(-reach),
        t_len.min(reach),
        abs_tol,
        1e-9,
        4000,
    );
    if !r_uu.converged {
        return Err(FilterError::QuadratureNonConvergence {
            achieved: r_uu.abs_error,
            requested: abs_tol.max(1e-9 * r_uu.value.abs()),
        });
    }

    let z_lo = (-tau_end).max(-reach);
    let z_hi = (t_len - tau_b).min(reach);
    let k_ul = if z_hi > z_lo {
        let r_ul = quad::integrate(|z| c_pdf(z) * h_ul(z), z_lo, z_hi, abs_tol, 1e-9, 4000);
        if !r_ul.converged {
            return Err(FilterError::QuadratureNonConvergence {
                achieved: r_ul.abs_error,
                requested: abs_tol.max(1e-9 * r_ul.value.abs()),
            });
        }
        r_ul.value
    } else {
        0.0
    };

    Ok((2.0 * (r_uu.value + k_ul)) / (tau_end * tau_end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::eta_square_pulse_raw;

    #[test]
    fn cross_checked_against_frequency_box() {
        // reference values from an independent frequency-space quadrature of
        // |psi_hat|^2 exp(-(w1^2+w2^2) tau_EIT^2)/(2 pi)^2 (converged to 1e-12)
        let cases = [
            (5.0, 0.176866204253),
            (10.0, 0.235522713517),
            (20.0, 0.301970005598),
            (50.0, 0.382747606158),
        ];
        for (d_b, want) in cases {
            let tau_eit = 2.0 / f64::sqrt(d_b);
            let got = transmission_raw(1.0, tau_eit, 4.0).unwrap();
            assert!(
                (got - want).abs() < 1e-9,
                "d_b={d_b}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn no_blockade_limit_is_single_pulse_squared() {
        for d_b in [5.0, 20.0] {
            let tau_eit = 2.0 / f64::sqrt(d_b);
            let got = transmission_raw(1e-9, tau_eit, 4.0).unwrap();
            let want = eta_square_pulse_raw(4.0, tau_eit).powi(2);
            assert!((got / want - 1.0).abs() < 1e-6, "d_b={d_b}");
        }
    }

    #[test]
    fn unfiltered_limit_is_exclusion_weight() {
        let got = transmission_raw(1.0, 2e-4, 4.0).unwrap();
        assert!((got - 0.562355542495).abs() < 1e-7);
        assert!((got - 0.5625).abs() < 1e-3);
        let got = transmission_raw(1.0, 2e-4, 100.0).unwrap();
        assert!((got - 0.980092372015).abs() < 1e-7);
    }

    #[test]
    fn degenerate_pulse() {
        assert_eq!(transmission_raw(1.0, 0.5, 1.0).unwrap(), 0.0);
        assert!(matches!(
            transmission_raw(1.0, 0.5, 0.5),
            Err(FilterError::PulseTooShort { .. })
        ));
    }

    #[test]
    fn setup_wrapper_scale_invariance() {
        // the result depends only on (tau_end/tau_b, d_b)
        let s = TwoPhotonSetup {
            tau_end: 4.0 * 5.0,
            d_b: 10.0,
        };
        let a = two_photon_transmission(&s, 1.0).unwrap(); // tau_b = 5
        let tau_eit = 2.0 / f64::sqrt(10.0);
        let b = transmission_raw(1.0, tau_eit, 4.0).unwrap();
        assert!((a / b - 1.0).abs() < 1e-9);
    }
}

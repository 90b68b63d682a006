//! Medium parameters, validation, and the derived model timescales.
//!
//! The model depends only on the knob set `(d_b, gamma_eit, L/r_b)`: the
//! optical depth per blockade radius, the single-atom EIT linewidth, and the
//! medium length in blockade radii. `omega_c`, `big_gamma`, and `v_g` are
//! carried for unit bookkeeping at the tool boundary and never enter the
//! formulas independently.

use crate::error::ParamsError;
use serde::{Deserialize, Serialize};

/// Physical parameters of a dissipative Rydberg-EIT medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Optical depth per blockade radius (> 0).
    pub d_b: f64,
    /// Single-atom EIT linewidth, angular frequency in rad/s (> 0).
    pub gamma_eit: f64,
    /// Medium length in blockade radii, L/r_b (>= 1).
    pub length_ratio: f64,
    /// Control Rabi frequency in rad/s, if known.
    pub omega_c: Option<f64>,
    /// Intermediate-level halfwidth in rad/s, if known.
    pub big_gamma: Option<f64>,
    /// Group velocity in m/s; only used for unit conversions.
    pub v_g: Option<f64>,
}

impl MediumParams {
    /// Build from the independent knob set and validate.
    pub fn new(d_b: f64, gamma_eit: f64, length_ratio: f64) -> Result<Self, ParamsError> {
        MediumParams {
            d_b,
            gamma_eit,
            length_ratio,
            omega_c: None,
            big_gamma: None,
            v_g: None,
        }
        .validated()
    }

    /// Attach the control-field parameters; re-validates the consistency
    /// identity gamma_eit = omega_c^2 / big_gamma.
    pub fn with_control_fields(
        mut self,
        omega_c: f64,
        big_gamma: f64,
    ) -> Result<Self, ParamsError> {
        self.omega_c = Some(omega_c);
        self.big_gamma = Some(big_gamma);
        self.validated()
    }

    /// Attach a group velocity (m/s).
    pub fn with_group_velocity(mut self, v_g: f64) -> Result<Self, ParamsError> {
        self.v_g = Some(v_g);
        self.validated()
    }

    /// Check every invariant, reporting the first violation by name.
    pub fn validated(self) -> Result<Self, ParamsError> {
        validate(self)
    }
}

/// Returns the parameters unchanged if all invariants hold; otherwise the
/// first violated invariant, by name.
pub fn validate(params: MediumParams) -> Result<MediumParams, ParamsError> {
    if !params.d_b.is_finite() {
        return Err(ParamsError::NotFinite { name: "d_b" });
    }
    if params.d_b <= 0.0 {
        return Err(ParamsError::DbNotPositive(params.d_b));
    }
    if !params.gamma_eit.is_finite() {
        return Err(ParamsError::NotFinite { name: "gamma_eit" });
    }
    if params.gamma_eit <= 0.0 {
        return Err(ParamsError::GammaEitNotPositive(params.gamma_eit));
    }
    if !params.length_ratio.is_finite() {
        return Err(ParamsError::NotFinite {
            name: "length_ratio",
        });
    }
    if params.length_ratio < 1.0 {
        return Err(ParamsError::LengthRatioTooSmall(params.length_ratio));
    }
    if let Some(w) = params.omega_c {
        if !w.is_finite() {
            return Err(ParamsError::NotFinite { name: "omega_c" });
        }
        if w <= 0.0 {
            return Err(ParamsError::OmegaCNotPositive(w));
        }
    }
    if let Some(g) = params.big_gamma {
        if !g.is_finite() {
            return Err(ParamsError::NotFinite { name: "big_gamma" });
        }
        if g <= 0.0 {
            return Err(ParamsError::BigGammaNotPositive(g));
        }
    }
    if let Some(v) = params.v_g {
        if !v.is_finite() {
            return Err(ParamsError::NotFinite { name: "v_g" });
        }
        if v <= 0.0 {
            return Err(ParamsError::GroupVelocityNotPositive(v));
        }
    }
    if let (Some(w), Some(g)) = (params.omega_c, params.big_gamma) {
        let derived = w * w / g;
        let mismatch = ((params.gamma_eit - derived) / derived).abs();
        if mismatch > 1e-12 {
            return Err(ParamsError::ControlFieldInconsistent {
                gamma_eit: params.gamma_eit,
                derived,
                mismatch,
            });
        }
    }
    Ok(params)
}

/// Blockade and EIT-filtering timescales derived from [`MediumParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timescales {
    /// Blockade time tau_b = d_b / (2 gamma_eit), in seconds.
    pub tau_b: f64,
    d_b: f64,
    gamma_eit: f64,
    length_ratio: f64,
}

impl Timescales {
    /// Gaussian filtering time tau_EIT(l) = sqrt(d_b l/r_b) / gamma_eit for a
    /// propagation depth of `l_over_rb` blockade radii. Monotone increasing.
    pub fn tau_eit_at(&self, l_over_rb: f64) -> f64 {
        assert!(
            l_over_rb > 0.0,
            "tau_eit_at requires l/r_b > 0 (got {l_over_rb})"
        );
        (self.d_b * l_over_rb).sqrt() / self.gamma_eit
    }

    /// Filtering time over the full medium length.
    pub fn tau_eit_full(&self) -> f64 {
        self.tau_eit_at(self.length_ratio)
    }

    pub fn d_b(&self) -> f64 {
        self.d_b
    }

    pub fn length_ratio(&self) -> f64 {
        self.length_ratio
    }
}

/// Derive the blockade time and the filtering-time profile.
pub fn derive_timescales(params: &MediumParams) -> Result<Timescales, ParamsError> {
    let params = validate(*params)?;
    Ok(Timescales {
        tau_b: params.d_b / (2.0 * params.gamma_eit),
        d_b: params.d_b,
        gamma_eit: params.gamma_eit,
        length_ratio: params.length_ratio,
    })
}

/// The reduced unit system: times in tau_b, rates in 1/tau_b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedUnits {
    /// One blockade time, in seconds.
    pub time_unit: f64,
    /// One inverse blockade time, in 1/s.
    pub rate_unit: f64,
}

impl ReducedUnits {
    pub fn from_timescales(ts: &Timescales) -> Self {
        ReducedUnits {
            time_unit: ts.tau_b,
            rate_unit: 1.0 / ts.tau_b,
        }
    }

    /// Physical time (s) -> time in units of tau_b.
    pub fn to_reduced_time(&self, t: f64) -> f64 {
        t / self.time_unit
    }

    /// Physical rate (1/s) -> rate in units of 1/tau_b.
    pub fn to_reduced_rate(&self, r: f64) -> f64 {
        r * self.time_unit
    }

    pub fn to_physical_time(&self, t_reduced: f64) -> f64 {
        t_reduced * self.time_unit
    }

    pub fn to_physical_rate(&self, r_reduced: f64) -> f64 {
        r_reduced / self.time_unit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timescale_examples() {
        let ts = derive_timescales(&MediumParams::new(2.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(ts.tau_b, 1.0);

        let ts = derive_timescales(&MediumParams::new(4.0, 2.0, 1.0).unwrap()).unwrap();
        assert_eq!(ts.tau_eit_at(1.0), 1.0);

        // experimental linewidth 2 pi x 7.5 MHz at d_b = 10
        let gamma = 2.0 * std::f64::consts::PI * 7.5e6;
        let ts = derive_timescales(&MediumParams::new(10.0, gamma, 1.0).unwrap()).unwrap();
        let want = 10.0 / (2.0 * gamma);
        assert_eq!(ts.tau_b, want);
        assert!((ts.tau_b / 1.06e-7 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn validation_reports_first_violation() {
        let err = MediumParams::new(-1.0, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("d_b must be positive"));

        let err = MediumParams::new(1.0, 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("length_ratio must be >= 1"));

        // omega_c = 2, big_gamma = 4 gives gamma_eit = 1 exactly
        let p = MediumParams::new(1.0, 1.0, 1.0)
            .unwrap()
            .with_control_fields(2.0, 4.0);
        assert!(p.is_ok());

        let p = MediumParams::new(1.0, 1.0, 1.0)
            .unwrap()
            .with_control_fields(2.0, 5.0);
        assert!(matches!(
            p,
            Err(ParamsError::ControlFieldInconsistent { .. })
        ));
    }

    #[test]
    fn derive_is_pure_and_bit_identical() {
        let p = MediumParams::new(7.3, 0.11, 2.5).unwrap();
        let a = derive_timescales(&p).unwrap();
        let b = derive_timescales(&p).unwrap();
        assert_eq!(a.tau_b.to_bits(), b.tau_b.to_bits());
        assert_eq!(
            a.tau_eit_at(1.7).to_bits(),
            b.tau_eit_at(1.7).to_bits()
        );
    }

    #[test]
    fn tau_eit_scaling_laws() {
        let ts = derive_timescales(&MediumParams::new(9.0, 3.0, 100.0).unwrap()).unwrap();
        let base = ts.tau_eit_at(1.0);
        for i in 0..50 {
            let l = 10f64.powf(-2.0 + 4.0 * i as f64 / 49.0);
            let want = base * l.sqrt();
            assert!((ts.tau_eit_at(l) / want - 1.0).abs() < 1e-12);
        }
        // tau_eit(r_b)/tau_b = 2/sqrt(d_b)
        for d_b in [1.0, 10.0, 100.0, 1000.0] {
            let ts = derive_timescales(&MediumParams::new(d_b, 3.0, 1.0).unwrap()).unwrap();
            let ratio = ts.tau_eit_at(1.0) / ts.tau_b;
            assert!((ratio / (2.0 / d_b.sqrt()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_units_roundtrip() {
        let ts = derive_timescales(&MediumParams::new(10.0, 4.7e7, 4.0).unwrap()).unwrap();
        let u = ReducedUnits::from_timescales(&ts);
        assert_eq!(u.to_reduced_time(ts.tau_b), 1.0);
        assert_eq!(u.to_reduced_time(0.0), 0.0);
        assert!((u.to_reduced_rate(30.0 / ts.tau_b) - 30.0).abs() < 1e-12);
        for v in [1e-9, 3.7e-7, 2.2e-6] {
            let rt = u.to_physical_time(u.to_reduced_time(v));
            assert!((rt / v - 1.0).abs() < 1e-12);
            let rr = u.to_physical_rate(u.to_reduced_rate(v));
            assert!((rr / v - 1.0).abs() < 1e-12);
        }
    }
}

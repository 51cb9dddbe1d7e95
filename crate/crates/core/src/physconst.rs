//! Physical constants (Gaussian units) and the dimensionless unit system.
//!
//! Lengths are measured in λe = ħ/mₑc, energies in mₑc², magnetic fields in
//! B_c = mₑ²c³/ħe and times in τ_C = ħ/mₑc². In these units the coupling
//! k = e/mₑc² multiplying the vector potential is exactly 1/(λe·B_c).

use crate::{Error, Result};

/// The constants every other module works with, fixed to five significant figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// mₑc² in MeV.
    pub electron_rest_energy_mev: f64,
    /// λe = ħ/mₑc in pm.
    pub compton_wavelength_pm: f64,
    /// B_c = mₑ²c³/ħe in G.
    pub critical_field_g: f64,
    /// τ_C = ħ/mₑc² in s.
    pub compton_time_s: f64,
    /// c in cm/s.
    pub speed_of_light_cm_s: f64,
}

pub const CONSTANTS: Constants = Constants {
    electron_rest_energy_mev: 0.51100,
    compton_wavelength_pm: 0.38616,
    critical_field_g: 4.414e13,
    compton_time_s: 1.28809e-21,
    speed_of_light_cm_s: 2.99792e10,
};

pub const COMPTON_WAVELENGTH_PM: f64 = CONSTANTS.compton_wavelength_pm;
pub const CRITICAL_FIELD_G: f64 = CONSTANTS.critical_field_g;
pub const COMPTON_TIME_S: f64 = CONSTANTS.compton_time_s;

/// Elementary charge in statcoulomb.
pub const ELEMENTARY_CHARGE_STATC: f64 = 4.80320e-10;
/// mₑc² in erg.
pub const ELECTRON_REST_ENERGY_ERG: f64 = 8.18710e-7;

/// Picometres per centimetre.
pub const PM_PER_CM: f64 = 1e10;

/// k = e/mₑc² in 1/(G·pm), from the CGS charge and rest energy.
pub fn coupling_k_per_gauss_pm() -> f64 {
    ELEMENTARY_CHARGE_STATC / ELECTRON_REST_ENERGY_ERG / PM_PER_CM
}

fn check_exponent(n: f64) -> Result<()> {
    if !n.is_finite() || n <= -1.0 {
        return Err(Error::invalid(format!(
            "power-law exponent n = {n} must satisfy n > -1"
        )));
    }
    Ok(())
}

/// b0 = B0·λeⁿ/B_c for a field scale `b0_gauss` given in G·pm⁻ⁿ.
pub fn to_dimensionless_field(b0_gauss: f64, n: f64) -> Result<f64> {
    check_exponent(n)?;
    if !(b0_gauss > 0.0) || !b0_gauss.is_finite() {
        return Err(Error::invalid(format!(
            "field scale B0 = {b0_gauss} must be positive and finite"
        )));
    }
    Ok(b0_gauss * COMPTON_WAVELENGTH_PM.powf(n) / CRITICAL_FIELD_G)
}

/// Inverse of [`to_dimensionless_field`]: B0 in G·pm⁻ⁿ.
pub fn from_dimensionless_field(b0: f64, n: f64) -> Result<f64> {
    check_exponent(n)?;
    if !(b0 > 0.0) || !b0.is_finite() {
        return Err(Error::invalid(format!(
            "dimensionless field b0 = {b0} must be positive and finite"
        )));
    }
    Ok(b0 * CRITICAL_FIELD_G / COMPTON_WAVELENGTH_PM.powf(n))
}

pub fn lambda_to_pm(x: f64) -> f64 {
    x * COMPTON_WAVELENGTH_PM
}

pub fn compton_time_to_s(t: f64) -> f64 {
    t * COMPTON_TIME_S
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn critical_field_maps_to_unity() {
        assert_eq!(to_dimensionless_field(4.414e13, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn ten_gauss_uniform() {
        let b0 = to_dimensionless_field(10.0, 0.0).unwrap();
        assert!((b0 / 2.2656e-13 - 1.0).abs() < 1e-4, "{b0}");
    }

    #[test]
    fn quadratic_field_point_q() {
        let b0 = to_dimensionless_field(1.35e14, 2.0).unwrap();
        let expected = 1.35e14 * 0.38616_f64.powi(2) / 4.414e13;
        assert!((b0 - expected).abs() < 1e-12 * expected);
        assert!((b0 - 0.4561).abs() < 1e-4, "{b0}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(to_dimensionless_field(0.0, 0.0).is_err());
        assert!(to_dimensionless_field(-3.0, 1.0).is_err());
        assert!(to_dimensionless_field(1.0, -1.0).is_err());
        assert!(to_dimensionless_field(1.0, -2.5).is_err());
    }

    #[test]
    fn unit_system_is_consistent() {
        // k·λe·B_c = 1 up to the five-figure truncation of the constants.
        let k = coupling_k_per_gauss_pm();
        let product = k * COMPTON_WAVELENGTH_PM * CRITICAL_FIELD_G;
        assert!((product - 1.0).abs() < 2e-4, "{product}");
        // τ_C = λe / c
        let tau = COMPTON_WAVELENGTH_PM / PM_PER_CM / CONSTANTS.speed_of_light_cm_s;
        assert!((tau / COMPTON_TIME_S - 1.0).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn round_trip(log_b in -5.0f64..20.0, n in -0.95f64..30.0) {
            let b = 10f64.powf(log_b);
            let back = from_dimensionless_field(to_dimensionless_field(b, n).unwrap(), n).unwrap();
            prop_assert!((back - b).abs() <= 1e-12 * b);
        }

        #[test]
        fn increasing_in_b0(log_b in -5.0f64..20.0, step in 1e-6f64..2.0, n in -0.95f64..10.0) {
            let b = 10f64.powf(log_b);
            let lo = to_dimensionless_field(b, n).unwrap();
            let hi = to_dimensionless_field(b * (1.0 + step), n).unwrap();
            prop_assert!(hi > lo);
        }
    }
}

//! Power-law magnetic field `B = B0 ρⁿ ẑ`, its vector potential, and the
//! pole-piece electromagnet that realises such a profile in the lab.

use serde::{Deserialize, Serialize};

use crate::physconst::{self, PM_PER_CM};
use crate::{Error, Result};

/// Field scale `B0` in G·pm⁻ⁿ and exponent `n`, with the cached dimensionless strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawField {
    b0_gauss: f64,
    n: f64,
    b0: f64,
}

impl PowerLawField {
    pub fn new(b0_gauss: f64, n: f64) -> Result<Self> {
        let b0 = physconst::to_dimensionless_field(b0_gauss, n)?;
        Ok(Self { b0_gauss, n, b0 })
    }

    pub fn from_dimensionless(b0: f64, n: f64) -> Result<Self> {
        let b0_gauss = physconst::from_dimensionless_field(b0, n)?;
        Ok(Self { b0_gauss, n, b0 })
    }

    /// `B0` in G·pm⁻ⁿ.
    pub fn b0_gauss(&self) -> f64 {
        self.b0_gauss
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// Dimensionless strength `b0 = B0 λeⁿ / B_c`.
    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// |B| in G at radius `rho_pm`.
    pub fn field_at(&self, rho_pm: f64) -> Result<f64> {
        if rho_pm < 0.0 {
            return Err(Error::invalid(format!("radius {rho_pm} pm is negative")));
        }
        if rho_pm == 0.0 && self.n < 0.0 {
            return Err(Error::SingularField { n: self.n });
        }
        if self.n == 0.0 {
            return Ok(self.b0_gauss);
        }
        Ok(self.b0_gauss * rho_pm.powf(self.n))
    }

    /// Azimuthal vector potential `A_φ = B0 ρⁿ⁺¹/(n+2)` in G·pm.
    pub fn vector_potential_at(&self, rho_pm: f64) -> f64 {
        if rho_pm <= 0.0 {
            return 0.0;
        }
        self.b0_gauss * rho_pm.powf(self.n + 1.0) / (self.n + 2.0)
    }
}

/// Minimum `r_probe / r0` for which the pole-piece field is treated as a pure power law.
pub const APPROXIMATION_MIN_RATIO: f64 = 10.0;

/// Electromagnet with shaped pole pieces, in Gaussian units with lengths in cm.
///
/// The pole surfaces follow `z = z0 (r + r0)^p_surf`, so the gap is
/// `L_G(r) = 2 z0 (r + r0)^p_surf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolePieceDesign {
    pub turns_per_cm: f64,
    pub current_a: f64,
    /// μ/μ0 of the core.
    pub mu_rel: f64,
    pub core_length_cm: f64,
    /// Surface scale, in cm^(1 - p_surf).
    pub z0: f64,
    /// Surface offset, cm.
    pub r0: f64,
    /// Surface exponent; the resulting field exponent is `n = -p_surf`.
    pub p_surf: f64,
}

impl PolePieceDesign {
    /// Linear-field design: 100 turns/cm on a 10 cm ferrite core at 1 A,
    /// concave poles shaped so that B = 10⁴ G at the 0.5 mm core edge.
    pub fn linear_lab_example() -> Self {
        let mut d = Self {
            turns_per_cm: 100.0,
            current_a: 1.0,
            mu_rel: 2000.0,
            core_length_cm: 10.0,
            z0: 1.0,
            r0: 1e-7,
            p_surf: -1.0,
        };
        // K/(2 z0) = 1e4 G / 0.05 cm
        d.z0 = d.k_constant() / (2.0 * 2e5);
        d
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("turns_per_cm", self.turns_per_cm),
            ("current_a", self.current_a),
            ("mu_rel", self.mu_rel),
            ("core_length_cm", self.core_length_cm),
            ("z0", self.z0),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.r0 >= 0.0) {
            return Err(Error::invalid(format!("r0 = {} must be non-negative", self.r0)));
        }
        if !(self.p_surf < 1.0) {
            return Err(Error::invalid(format!(
                "p_surf = {} gives n = -p_surf <= -1",
                self.p_surf
            )));
        }
        Ok(())
    }

    /// `K = N·I·μ0` in G·cm, with N the total number of turns; in Gaussian
    /// units μ0·(1 A) contributes the factor 4π/10.
    pub fn k_constant(&self) -> f64 {
        let turns = self.turns_per_cm * self.core_length_cm;
        0.4 * std::f64::consts::PI * turns * self.current_a
    }

    /// Gap between the pole faces at radius `r_cm`.
    pub fn gap_at(&self, r_cm: f64) -> f64 {
        2.0 * self.z0 * (r_cm + self.r0).powf(self.p_surf)
    }
}

/// Gap field `B = N I μ0 μ / (L_c μ0 + L_G μ)` in G for a gap of `gap_cm`.
pub fn solenoid_gap_field(d: &PolePieceDesign, gap_cm: f64) -> Result<f64> {
    if !(gap_cm > 0.0) {
        return Err(Error::invalid(format!("gap {gap_cm} cm must be positive")));
    }
    Ok(d.k_constant() * d.mu_rel / (d.core_length_cm + gap_cm * d.mu_rel))
}

/// Power-law fit `B ≈ B0 rⁿ` of the pole-piece field, valid for `r_probe ≫ r0`.
pub fn design_to_powerlaw(d: &PolePieceDesign, r_probe_pm: f64) -> Result<PowerLawField> {
    d.validate()?;
    let r_probe_cm = r_probe_pm / PM_PER_CM;
    if r_probe_cm < APPROXIMATION_MIN_RATIO * d.r0 {
        return Err(Error::ApproximationInvalid {
            r_probe: r_probe_cm,
            r0: d.r0,
            min_ratio: APPROXIMATION_MIN_RATIO,
        });
    }
    let n = -d.p_surf;
    let b0_per_cm = d.k_constant() / (2.0 * d.z0);
    // B0 r_cmⁿ = B0 (r_pm / 1e10)ⁿ
    let b0_per_pm = b0_per_cm * PM_PER_CM.powf(-n);
    PowerLawField::new(b0_per_pm, n)
}

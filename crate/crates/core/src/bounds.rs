//! Bremermann–Bekenstein energy-per-bit bound and the field where the
//! spin-up and spin-down ground gaps coincide.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::eigensolver::{EigenRequest, EigenSolution, Spin, DEFAULT_TOL};
use crate::field::PowerLawField;
use crate::physconst::from_dimensionless_field;
use crate::qsl::EigenSource;
use crate::spectrum::{energy, energy_gap};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// non-relativistic, α₁ < 0.1
    I,
    /// transition
    II,
    /// relativistic, α₁ > 10
    III,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        }
    }
}

pub fn classify_region(alpha1: f64) -> Region {
    if alpha1 < 0.1 {
        Region::I
    } else if alpha1 <= 10.0 {
        Region::II
    } else {
        Region::III
    }
}

/// Which energy is charged per bit on the left of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianConvention {
    /// `(ε_ν + ε_ν+1)/2`, rest energy included.
    #[default]
    WithRestEnergy,
    /// `(ε_ν + ε_ν+1)/2 − 1`.
    KineticOnly,
}

impl std::str::FromStr for HamiltonianConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "with-rest-energy" | "total" => Ok(HamiltonianConvention::WithRestEnergy),
            "kinetic-only" | "kinetic" => Ok(HamiltonianConvention::KineticOnly),
            other => Err(Error::invalid(format!("unknown hamiltonian convention '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBPoint {
    pub n: f64,
    pub b0: f64,
    pub spin: Spin,
    pub nu: usize,
    pub convention: HamiltonianConvention,
    /// mₑc² per bit
    pub lhs_energy_per_bit: f64,
    /// `ħ ln2 / (π τ)` in mₑc²
    pub rhs: f64,
    pub alpha1: f64,
    pub region: Region,
}

impl BBPoint {
    pub fn holds(&self) -> bool {
        self.lhs_energy_per_bit > self.rhs
    }
}

pub fn bb_from_solution(sol: &EigenSolution, nu: usize, convention: HamiltonianConvention) -> Result<BBPoint> {
    if nu + 1 >= sol.levels() || sol.levels() < 2 {
        return Err(Error::IndexOutOfRange {
            index: (nu + 1).max(1),
            levels: sol.levels(),
        });
    }
    let (a_lo, a_hi) = (sol.alphas[nu], sol.alphas[nu + 1]);
    let mean = (energy(a_lo) + energy(a_hi)) / 2.0;
    let lhs = match convention {
        HamiltonianConvention::WithRestEnergy => mean,
        // mean − 1 without cancellation
        HamiltonianConvention::KineticOnly => {
            (a_lo / (energy(a_lo) + 1.0) + a_hi / (energy(a_hi) + 1.0)) / 2.0
        }
    };
    let alpha1 = sol.alphas[1];
    Ok(BBPoint {
        n: sol.request.field.n(),
        b0: sol.request.field.b0(),
        spin: sol.request.spin,
        nu,
        convention,
        lhs_energy_per_bit: lhs,
        rhs: energy_gap(a_lo, a_hi) * LN_2 / (PI * PI),
        alpha1,
        region: classify_region(alpha1),
    })
}

/// Bound at `(ν, ν+1)`; `base.levels` is raised to `ν + 2`.
pub fn bb_point(
    source: &dyn EigenSource,
    base: &EigenRequest,
    nu: usize,
    convention: HamiltonianConvention,
) -> Result<BBPoint> {
    let sol = source.solve(&EigenRequest {
        levels: nu + 2,
        ..*base
    })?;
    bb_from_solution(&sol, nu, convention)
}

pub const CRITICAL_BRACKET: (f64, f64) = (1e-6, 1e6);
pub const CRITICAL_REL_WIDTH: f64 = 1e-4;
const SCAN_POINTS_PER_DECADE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalFieldResult {
    pub n: f64,
    pub found: bool,
    pub b0_critical: Option<f64>,
    /// G·pm⁻ⁿ
    pub b0_gauss_critical: Option<f64>,
    /// Search interval in b0.
    pub bracket: (f64, f64),
    /// Final b0 interval containing the sign change (equal to `bracket` when not found).
    pub root_interval: (f64, f64),
}

/// `[ε₁ − ε₀]_up − [ε₁ − ε₀]_down` at dimensionless field `b0`.
pub fn spin_gap_difference(source: &dyn EigenSource, n: f64, b0: f64, tol: f64) -> Result<f64> {
    let field = PowerLawField::from_dimensionless(b0, n)?;
    let gap = |spin| -> Result<f64> {
        let sol = source.solve(&EigenRequest::new(field, spin, 2).with_tol(tol))?;
        Ok(energy_gap(sol.alphas[0], sol.alphas[1]))
    };
    Ok(gap(Spin::Up)? - gap(Spin::Down)?)
}

pub fn critical_field(source: &dyn EigenSource, n: f64) -> Result<CriticalFieldResult> {
    critical_field_in(source, n, CRITICAL_BRACKET, DEFAULT_TOL)
}

/// Scans the bracket on a log grid for the first sign change of the
/// spin-gap difference and bisects it in `log b0`.
pub fn critical_field_in(
    source: &dyn EigenSource,
    n: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<CriticalFieldResult> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid(format!("bracket [{lo}, {hi}] is not a positive interval")));
    }
    let not_found = CriticalFieldResult {
        n,
        found: false,
        b0_critical: None,
        b0_gauss_critical: None,
        bracket,
        root_interval: bracket,
    };
    let decades = (hi / lo).log10();
    let steps = ((decades * SCAN_POINTS_PER_DECADE as f64).ceil() as usize).max(1);
    let at = |k: usize| lo * (hi / lo).powf(k as f64 / steps as f64);

    let mut a = lo;
    let mut ga = spin_gap_difference(source, n, a, tol)?;
    let mut interval = None;
    for k in 1..=steps {
        let b = at(k);
        let gb = spin_gap_difference(source, n, b, tol)?;
        if ga == 0.0 {
            interval = Some((a, a));
            break;
        }
        if ga.signum() != gb.signum() {
            interval = Some((a, b));
            break;
        }
        a = b;
        ga = gb;
    }
    let Some((mut a, mut b)) = interval else {
        return Ok(not_found);
    };
    while b / a - 1.0 > CRITICAL_REL_WIDTH {
        let mid = (a * b).sqrt();
        let gm = spin_gap_difference(source, n, mid, tol)?;
        if gm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    let root = (a * b).sqrt();
    Ok(CriticalFieldResult {
        n,
        found: true,
        b0_critical: Some(root),
        b0_gauss_critical: Some(from_dimensionless_field(root, n)?),
        bracket,
        root_interval: (a, b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsl::DirectSolver;

    #[test]
    fn region_thresholds() {
        assert_eq!(classify_region(2.0), Region::II);
        assert_eq!(classify_region(1e-13), Region::I);
        assert_eq!(classify_region(1e3), Region::III);
        assert_eq!(classify_region(0.1), Region::II);
        assert_eq!(classify_region(10.0), Region::II);
    }

    #[test]
    fn uniform_spin_down_point() {
        let field = PowerLawField::from_dimensionless(1.0, 0.0).unwrap();
        let p = bb_point(&DirectSolver::default(), &EigenRequest::new(field, Spin::Down, 2), 0, HamiltonianConvention::WithRestEnergy)
            .unwrap();
        assert!((p.lhs_energy_per_bit - 1.36603).abs() < 1e-5);
        assert!((p.rhs - 0.051412).abs() < 1e-6);
        assert_eq!(p.region, Region::II);
        assert!(p.holds());
        let k = bb_point(&DirectSolver::default(), &EigenRequest::new(field, Spin::Down, 2), 0, HamiltonianConvention::KineticOnly)
            .unwrap();
        assert!((k.lhs_energy_per_bit - 0.36603).abs() < 1e-5);
    }

    #[test]
    fn uniform_has_no_crossing() {
        let r = critical_field_in(&DirectSolver::default(), 0.0, (1e-6, 1e6), DEFAULT_TOL).unwrap();
        assert!(!r.found);
        assert!(r.b0_critical.is_none());
    }

    #[test]
    fn bad_bracket() {
        assert!(critical_field_in(&DirectSolver::default(), 2.0, (1.0, 0.5), DEFAULT_TOL).is_err());
    }

    #[test]
    fn convention_parsing() {
        assert_eq!(
            "kinetic-only".parse::<HamiltonianConvention>().unwrap(),
            HamiltonianConvention::KineticOnly
        );
        assert!("x".parse::<HamiltonianConvention>().is_err());
    }
}

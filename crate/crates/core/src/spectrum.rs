//! Energies from eigenvalues, uniform-field closed forms and the
//! power-law eigenvalue ansatz with its analytic saturated speed limit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::eigensolver::{EigenSolution, Spin};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub nu: usize,
    pub alpha: f64,
    /// ε = E / mₑc².
    pub energy: f64,
}

pub fn energy(alpha: f64) -> f64 {
    (1.0 + alpha).sqrt()
}

/// `ε(α_hi) − ε(α_lo)` without cancellation for small α.
pub fn energy_gap(alpha_lo: f64, alpha_hi: f64) -> f64 {
    (alpha_hi - alpha_lo) / (energy(alpha_hi) + energy(alpha_lo))
}

pub fn energies(sol: &EigenSolution) -> Result<Vec<EnergyLevel>> {
    if !sol.converged {
        return Err(Error::Unconverged);
    }
    Ok(sol
        .alphas
        .iter()
        .enumerate()
        .map(|(nu, &alpha)| EnergyLevel {
            nu,
            alpha,
            energy: energy(alpha),
        })
        .collect())
}

/// Exact eigenvalue for the uniform field (`n = 0`).
pub fn uniform_alpha(b0: f64, nu: usize, m: i32, spin: Spin) -> f64 {
    let m = m as f64;
    2.0 * b0 * (nu as f64 + m.abs() / 2.0 - m / 2.0 + 0.5 + 0.5 * spin.sign())
}

/// Leading term of ε for `b0 → ∞` in a uniform field, dropping the rest energy.
pub fn highfield_energy_uniform(b0: f64, nu: usize, spin: Spin) -> Result<f64> {
    if spin == Spin::Down && nu == 0 {
        return Err(Error::UseExactValue);
    }
    if !(b0 > 0.0) {
        return Err(Error::invalid(format!("b0 = {b0} must be positive")));
    }
    Ok((2.0 * b0 * (nu as f64 + 0.5 + 0.5 * spin.sign())).sqrt())
}

fn ansatz_exponent(n: f64) -> f64 {
    (2.0 + 2.0 * n) / (n + 2.0)
}

/// `C3 b0^(2/(n+2)) (ν+C5)^((2+2n)/(n+2)) [1 ± C5/(ν+C5)]`.
pub fn ansatz_alpha(c3: f64, c5: f64, n: f64, b0: f64, nu: usize, spin: Spin) -> f64 {
    let shifted = nu as f64 + c5;
    c3 * b0.powf(2.0 / (n + 2.0))
        * shifted.powf(ansatz_exponent(n))
        * (1.0 + spin.sign() * c5 / shifted)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSample {
    pub b0: f64,
    pub nu: usize,
    pub spin: Spin,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzFit {
    pub n: f64,
    pub c3: f64,
    pub c5: f64,
    /// Largest relative deviation of the model over the fitted samples.
    pub fit_residual: f64,
    pub poor_fit: bool,
    pub samples_used: usize,
}

pub const C5_RANGE: (f64, f64) = (0.3, 0.7);
pub const POOR_FIT_RESIDUAL: f64 = 0.1;

/// Log-space least squares of the ansatz. `ln C3` is solved in closed form
/// for each trial `C5`; `C5` itself by golden-section search.
///
/// Spin-down ground states are skipped: the model vanishes there identically.
pub fn fit_ansatz(n: f64, samples: &[AnsatzSample]) -> Result<AnsatzFit> {
    let used: Vec<&AnsatzSample> = samples
        .iter()
        .filter(|s| s.alpha > 0.0 && s.b0 > 0.0 && !(s.spin == Spin::Down && s.nu == 0))
        .collect();
    let mut levels: Vec<usize> = used.iter().map(|s| s.nu).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() < 3 {
        return Err(Error::InsufficientSamples(format!(
            "{} distinct levels, need at least 3",
            levels.len()
        )));
    }
    let (lo, hi) = used.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), s| {
        (lo.min(s.b0), hi.max(s.b0))
    });
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientSamples(format!(
            "b0 spans {:.3} decades, need at least 2",
            (hi / lo).log10()
        )));
    }

    let log_c3 = |c5: f64| -> (f64, f64) {
        let residuals: Vec<f64> = used
            .iter()
            .map(|s| s.alpha.ln() - ansatz_alpha(1.0, c5, n, s.b0, s.nu, s.spin).ln())
            .collect();
        let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
        let sse = residuals.iter().map(|r| (r - mean).powi(2)).sum();
        (mean, sse)
    };

    let c5 = golden_section(|c| log_c3(c).1, C5_RANGE.0, C5_RANGE.1, 1e-12);
    let c3 = log_c3(c5).0.exp();
    let fit_residual = used
        .iter()
        .map(|s| (ansatz_alpha(c3, c5, n, s.b0, s.nu, s.spin) / s.alpha - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(AnsatzFit {
        n,
        c3,
        c5,
        fit_residual,
        poor_fit: fit_residual > POOR_FIT_RESIDUAL,
        samples_used: used.len(),
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

fn gamma_prefactor(n: f64) -> f64 {
    gamma(2.0 / (n + 2.0)).powf(-1.0 / (n + 2.0)) * gamma(3.0 / (n + 2.0))
}

/// Displacement ansatz `Γ(2/(n+2))^(-1/(n+2)) Γ(3/(n+2)) (ε1+ε0)²/ε1³`, in λe.
pub fn sqsl_ansatz_displacement(n: f64, eps0: f64, eps1: f64) -> Result<f64> {
    if !(n > -1.0) {
        return Err(Error::invalid(format!("n = {n} must exceed -1")));
    }
    if !(eps0 > 0.0 && eps1 >= eps0 && eps1.is_finite()) {
        return Err(Error::invalid(format!(
            "energies must satisfy eps1 >= eps0 > 0 (got {eps0}, {eps1})"
        )));
    }
    Ok(gamma_prefactor(n) * (eps1 + eps0).powi(2) / eps1.powi(3))
}

/// `F(ν)`: ansatz energy of level ν in units of `√(C3 b0^(2/(n+2)))`, spin up.
fn ansatz_f(n: f64, nu: f64) -> f64 {
    let shifted = nu + 0.5;
    (shifted.powf(ansatz_exponent(n)) + 0.5 * shifted.powf(n / (n + 2.0))).sqrt()
}

/// Closed-form saturated speed limit of the spin-up ground superposition.
pub fn analytic_sqsl_up(n: f64) -> Result<f64> {
    if !(n > -1.0) {
        return Err(Error::invalid(format!("n = {n} must exceed -1")));
    }
    let (f0, f1) = (ansatz_f(n, 0.0), ansatz_f(n, 1.0));
    Ok(gamma_prefactor(n) * (f1 + f0).powi(2) * (f1 - f0) / (PI * f1.powi(3)))
}

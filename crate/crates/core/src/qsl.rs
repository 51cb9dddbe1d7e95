//! Radial displacement, orthogonalisation time and speed limit of the equal
//! superposition of two consecutive levels in one spin channel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigensolver::{self, EigenRequest, EigenSolution, SolverSettings, Spin, DEFAULT_TOL};
use crate::field::PowerLawField;
use crate::par::{self, Parallelism};
use crate::physconst::{compton_time_to_s, lambda_to_pm};
use crate::spectrum::{energy, energy_gap};
use crate::{Error, Result};

/// How the spinor enters the transition dipole `⟨ψ_ν|ρ|ψ_ν+1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisplacementModel {
    /// Upper component `R` weighted by `√((ε+1)/2ε)`, lower component
    /// `L R / ‖L R‖` weighted by `√((ε−1)/2ε)`, where `L` is the first-order
    /// factor of the radial operator (`H = L†L`).
    #[default]
    DiracSpinor,
    /// The upper radial function alone.
    ScalarChannel,
}

impl DisplacementModel {
    pub fn as_str(self) -> &'static str {
        match self {
            DisplacementModel::DiracSpinor => "dirac-spinor",
            DisplacementModel::ScalarChannel => "scalar-channel",
        }
    }
}

impl std::str::FromStr for DisplacementModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirac-spinor" | "dirac" => Ok(DisplacementModel::DiracSpinor),
            "scalar-channel" | "scalar" => Ok(DisplacementModel::ScalarChannel),
            other => Err(Error::invalid(format!("unknown displacement model '{other}'"))),
        }
    }
}

/// Anything that can produce eigen-solutions (direct solver, cache, ...).
pub trait EigenSource: Sync {
    fn solve(&self, req: &EigenRequest) -> Result<EigenSolution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DirectSolver {
    pub settings: SolverSettings,
}

impl EigenSource for DirectSolver {
    fn solve(&self, req: &EigenRequest) -> Result<EigenSolution> {
        eigensolver::solve_with(req, &self.settings)
    }
}

/// `L R` on the cell faces `x_{k}`, `k = 1..=N`, where `L = ±∂ + m/x − a(x)`.
fn lower_component(sol: &EigenSolution, level: usize) -> Vec<f64> {
    let req = &sol.request;
    let n = req.field.n();
    let b0 = req.field.b0();
    let m = req.m as f64;
    let sign = req.spin.sign();
    let grid = sol.grid;
    let h = grid.spacing_h;
    let r = &sol.radials[level];
    let count = grid.count_n;
    (1..=count)
        .map(|k| {
            let x = k as f64 * h;
            // ghost value beyond the outer face mirrors the Dirichlet condition
            let right = if k < count { r[k] } else { -r[count - 1] };
            let left = r[k - 1];
            let value = 0.5 * (left + right);
            let slope = (right - left) / h;
            let a = b0 * x.powf(n + 1.0) / (n + 2.0);
            sign * slope + (m / x - a) * value
        })
        .collect()
}

fn face_products(p: &[f64], q: &[f64], h: f64, power: i32) -> f64 {
    h * p
        .iter()
        .zip(q)
        .enumerate()
        .map(|(k, (a, b))| a * b * ((k + 1) as f64 * h).powi(power))
        .sum::<f64>()
}

fn check_pair(sol: &EigenSolution, nu: usize) -> Result<()> {
    if nu + 1 >= sol.levels() {
        return Err(Error::IndexOutOfRange {
            index: nu + 1,
            levels: sol.levels(),
        });
    }
    Ok(())
}

/// `ρ_disp = 2|⟨ψ_ν|ρ|ψ_ν+1⟩|` in λe.
pub fn radial_displacement(sol: &EigenSolution, nu: usize, model: DisplacementModel) -> Result<f64> {
    check_pair(sol, nu)?;
    let upper = eigensolver::wavefunction_moment(sol, nu, nu + 1, 1)?;
    if model == DisplacementModel::ScalarChannel {
        return Ok(2.0 * upper.abs());
    }
    let weights = |level: usize| {
        let eps = energy(sol.alphas[level]);
        (((eps + 1.0) / (2.0 * eps)).sqrt(), (sol.alphas[level] / (2.0 * eps * (eps + 1.0))).sqrt())
    };
    let (a0, b0) = weights(nu);
    let (a1, b1) = weights(nu + 1);
    let mut dipole = a0 * a1 * upper;
    if b0 > 0.0 && b1 > 0.0 {
        let h = sol.grid.spacing_h;
        let q0 = lower_component(sol, nu);
        let q1 = lower_component(sol, nu + 1);
        let norm0 = face_products(&q0, &q0, h, 1).sqrt();
        let norm1 = face_products(&q1, &q1, h, 1).sqrt();
        dipole += b0 * b1 * face_products(&q0, &q1, h, 2) / (norm0 * norm1);
    }
    Ok(2.0 * dipole.abs())
}

/// Mandelstam–Tamm time `π/(ε_high − ε_low)` in τ_C.
pub fn qsl_time(eps_low: f64, eps_high: f64) -> Result<f64> {
    if !(eps_high > eps_low) {
        return Err(Error::InfiniteTime);
    }
    Ok(PI / (eps_high - eps_low))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslResult {
    pub field: PowerLawField,
    pub spin: Spin,
    pub nu: usize,
    pub model: DisplacementModel,
    /// λe
    pub rho_disp: f64,
    pub rho_disp_pm: f64,
    /// τ_C
    pub tau_qsl: f64,
    pub tau_qsl_s: f64,
    pub v_over_c: f64,
}

pub fn qsl_from_solution(sol: &EigenSolution, nu: usize, model: DisplacementModel) -> Result<QslResult> {
    let rho = radial_displacement(sol, nu, model)?;
    let gap = energy_gap(sol.alphas[nu], sol.alphas[nu + 1]);
    if !(gap > 0.0) {
        return Err(Error::InfiniteTime);
    }
    let tau = PI / gap;
    Ok(QslResult {
        field: sol.request.field,
        spin: sol.request.spin,
        nu,
        model,
        rho_disp: rho,
        rho_disp_pm: lambda_to_pm(rho),
        tau_qsl: tau,
        tau_qsl_s: compton_time_to_s(tau),
        v_over_c: rho / tau,
    })
}

/// Speed limit of `(ν, ν+1)`; `base.levels` is raised to `ν + 2`.
pub fn qsl_velocity(
    source: &dyn EigenSource,
    base: &EigenRequest,
    nu: usize,
    model: DisplacementModel,
) -> Result<QslResult> {
    let req = EigenRequest {
        levels: nu + 2,
        ..*base
    };
    qsl_from_solution(&source.solve(&req)?, nu, model)
}

/// Superpositions `(ν, ν+1)` for `ν = 0..nu_max` from one solve.
pub fn state_sweep(
    source: &dyn EigenSource,
    base: &EigenRequest,
    nu_max: usize,
    model: DisplacementModel,
) -> Result<Vec<QslResult>> {
    if nu_max == 0 || nu_max > 50 {
        return Err(Error::invalid(format!("nu_max = {nu_max} must lie in 1..=50")));
    }
    let sol = source.solve(&EigenRequest {
        levels: nu_max + 1,
        ..*base
    })?;
    (0..nu_max).map(|nu| qsl_from_solution(&sol, nu, model)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationSettings {
    pub b0_start: f64,
    pub b0_cap: f64,
    /// Relative change per decade below which the sweep switches to quarter decades.
    pub refine_below: f64,
    /// Relative change per decade that counts as saturated.
    ///
    /// Decades are counted in the eigenvalue scale `b0^(2/(n+2))`: for large
    /// `n` a decade of b0 moves the spectrum very little and would fake a plateau.
    pub threshold: f64,
    pub tol: f64,
}

impl Default for SaturationSettings {
    fn default() -> Self {
        Self {
            b0_start: 1e-4,
            b0_cap: 1e12,
            refine_below: 0.05,
            threshold: 0.005,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationResult {
    pub n: f64,
    pub spin: Spin,
    pub nu: usize,
    pub model: DisplacementModel,
    pub sqsl_v_over_c: f64,
    pub b0_at_saturation: f64,
    /// `(b0, v/c)` in sweep order.
    pub trace: Vec<(f64, f64)>,
    pub converged: bool,
}

/// Geometric b0 sweep (×10, then ×10^(1/4)) until `v` changes by less than
/// the threshold per decade of `b0^(2/(n+2))`.
pub fn saturated_qsl(
    source: &dyn EigenSource,
    n: f64,
    spin: Spin,
    nu: usize,
    model: DisplacementModel,
    settings: &SaturationSettings,
) -> Result<SaturationResult> {
    let speed = |b0: f64| -> Result<f64> {
        let field = PowerLawField::from_dimensionless(b0, n)?;
        let req = EigenRequest::new(field, spin, nu + 2).with_tol(settings.tol);
        Ok(qsl_from_solution(&source.solve(&req)?, nu, model)?.v_over_c)
    };
    let quarter = 10f64.powf(0.25);
    let mut trace = vec![(settings.b0_start, speed(settings.b0_start)?)];
    let mut b0 = settings.b0_start;
    // index of the last decade-spaced point once the sweep is in quarter steps
    let mut fine_from: Option<usize> = None;
    let finish = |trace: Vec<(f64, f64)>, converged: bool| {
        let &(b_last, v_last) = trace.last().expect("trace is non-empty");
        SaturationResult {
            n,
            spin,
            nu,
            model,
            sqsl_v_over_c: v_last,
            b0_at_saturation: b_last,
            trace,
            converged,
        }
    };
    loop {
        b0 *= if fine_from.is_some() { quarter } else { 10.0 };
        if b0 > settings.b0_cap * (1.0 + 1e-9) {
            return Ok(finish(trace, false));
        }
        trace.push((b0, speed(b0)?));
        let i = trace.len() - 1;
        let per_scale_decade = (n + 2.0) / 2.0;
        let change = |j: usize| {
            per_scale_decade * (trace[i].1 - trace[j].1).abs() / trace[i].1.abs().max(f64::MIN_POSITIVE)
        };
        match fine_from {
            None => {
                if change(i - 1) < settings.refine_below {
                    trace.pop();
                    b0 /= 10.0;
                    fine_from = Some(i - 1);
                }
            }
            Some(base) => {
                if i >= base + 4 && change(i - 4) < settings.threshold {
                    return Ok(finish(trace, true));
                }
            }
        }
    }
}

/// Evaluates `qsl_velocity` over many fields in parallel, preserving order.
pub fn qsl_grid(
    source: &dyn EigenSource,
    points: &[(EigenRequest, usize)],
    model: DisplacementModel,
    mode: Parallelism,
) -> Vec<Result<QslResult>> {
    par::map(points, mode, |(req, nu)| qsl_velocity(source, req, *nu, model))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(n: f64, b0: f64) -> PowerLawField {
        PowerLawField::from_dimensionless(b0, n).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn qsl_time_examples() {
        let t = qsl_time(1.0, 3.0_f64.sqrt()).unwrap();
        assert!((t - 4.29150).abs() < 1e-5);
        assert!(matches!(qsl_time(2.0, 2.0), Err(Error::InfiniteTime)));
    }

    #[test]
    fn high_field_spin_down_time() {
        // τ → π/(2β) with β = √(b0/2)
        let b0 = 1e8;
        let r = qsl_velocity(&DirectSolver::default(), &EigenRequest::new(field(0.0, b0), Spin::Down, 2), 0, DisplacementModel::DiracSpinor)
            .unwrap();
        let beta = (b0 / 2.0).sqrt();
        assert!(rel(r.tau_qsl * beta, PI / 2.0) < 1e-3);
    }

    #[test]
    fn scalar_moment_uniform() {
        // 2·√π/(4β) in the scalar channel at every field strength
        for b0 in [1e-6, 1.0, 1e4] {
            let sol = DirectSolver::default()
                .solve(&EigenRequest::new(field(0.0, b0), Spin::Up, 2))
                .unwrap();
            let beta = (b0 / 2.0).sqrt();
            let rho = radial_displacement(&sol, 0, DisplacementModel::ScalarChannel).unwrap();
            assert!(rel(rho * beta, PI.sqrt() / 2.0) < 1e-5);
        }
    }

    #[test]
    fn dirac_displacement_high_field_limit() {
        let expected = PI.sqrt() * (1.0 + 3.0 / (2.0 * 2.0_f64.sqrt())) / 4.0;
        for b0 in [1e4, 1e8] {
            let sol = DirectSolver::default()
                .solve(&EigenRequest::new(field(0.0, b0), Spin::Up, 2))
                .unwrap();
            let rho = radial_displacement(&sol, 0, DisplacementModel::DiracSpinor).unwrap();
            assert!(rel(rho * (b0 / 2.0).sqrt(), expected) < 5e-3);
        }
    }

    #[test]
    fn models_agree_non_relativistically() {
        let sol = DirectSolver::default()
            .solve(&EigenRequest::new(field(1.0, 1e-8), Spin::Down, 3))
            .unwrap();
        let d = radial_displacement(&sol, 1, DisplacementModel::DiracSpinor).unwrap();
        let s = radial_displacement(&sol, 1, DisplacementModel::ScalarChannel).unwrap();
        assert!(rel(d, s) < 1e-4);
    }

    #[test]
    fn missing_level_is_rejected() {
        let sol = DirectSolver::default()
            .solve(&EigenRequest::new(field(0.0, 1.0), Spin::Up, 2))
            .unwrap();
        assert!(matches!(
            radial_displacement(&sol, 1, DisplacementModel::DiracSpinor),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn non_relativistic_uniform_speed() {
        // v = √(b0/(2π)) for b0 ≪ 1
        let b0 = 1e-8;
        for spin in Spin::BOTH {
            let r = qsl_velocity(&DirectSolver::default(), &EigenRequest::new(field(0.0, b0), spin, 2), 0, DisplacementModel::DiracSpinor)
                .unwrap();
            assert!(rel(r.v_over_c, (b0 / (2.0 * PI)).sqrt()) < 1e-3, "{spin}: {}", r.v_over_c);
        }
    }

    #[test]
    fn state_sweep_bounds() {
        let src = DirectSolver::default();
        let base = EigenRequest::new(field(0.0, 1.0), Spin::Up, 1);
        assert!(state_sweep(&src, &base, 0, DisplacementModel::DiracSpinor).is_err());
        assert!(state_sweep(&src, &base, 51, DisplacementModel::DiracSpinor).is_err());
        let rows = state_sweep(&src, &base, 3, DisplacementModel::DiracSpinor).unwrap();
        assert_eq!(rows.iter().map(|r| r.nu).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn model_parsing() {
        assert_eq!("scalar".parse::<DisplacementModel>().unwrap(), DisplacementModel::ScalarChannel);
        assert_eq!(DisplacementModel::default().as_str(), "dirac-spinor");
        assert!("other".parse::<DisplacementModel>().is_err());
    }
}

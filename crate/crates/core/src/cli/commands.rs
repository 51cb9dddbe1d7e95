//! One function per subcommand, each producing a [`Table`].

use serde_json::{json, Value};

use super::cache::CachedSolver;
use super::config::SweepConfig;
use super::output::{col, Cell, Column, Table};
use super::error_kind;
use crate::bounds::{bb_from_solution, critical_field_in, CRITICAL_BRACKET};
use crate::eigensolver::{EigenRequest, Spin};
use crate::field::{design_to_powerlaw, PowerLawField};
use crate::par::{self, Parallelism};
use crate::physconst::{from_dimensionless_field, COMPTON_WAVELENGTH_PM, CRITICAL_FIELD_G, PM_PER_CM};
use crate::qsl::{qsl_from_solution, saturated_qsl, EigenSource, SaturationSettings};
use crate::spectrum::{analytic_sqsl_up, energy, fit_ansatz, AnsatzSample};
use crate::{Error, Result};

const FIELD_UNIT: &str = "G*pm^-n";
const B0_DIMLESS: &str = "B_c*lambda_e^-n";

pub struct CommandOutput {
    pub table: Table,
    pub failed_rows: usize,
    /// True when every failed row failed for numerical reasons.
    pub failures_numerical: bool,
}

struct Builder {
    table: Table,
    failed: usize,
    numerical: bool,
}

impl Builder {
    fn new(cfg: &SweepConfig, columns: Vec<Column>) -> Self {
        Self {
            table: Table::new(cfg.command.as_str(), parameters(cfg), columns),
            failed: 0,
            numerical: true,
        }
    }

    fn ok(&mut self, row: Vec<Cell>) {
        self.table.push(row);
    }

    /// Row for a failed point: the leading identifying cells, then blanks and the status.
    fn failed(&mut self, mut leading: Vec<Cell>, err: &Error) {
        self.failed += 1;
        self.numerical &= err.is_numerical();
        let width = self.table.columns.len();
        leading.resize(width - 1, Cell::Empty);
        leading.push(error_kind(err).into());
        self.table.push(leading);
    }

    fn finish(self) -> CommandOutput {
        CommandOutput {
            table: self.table,
            failed_rows: self.failed,
            failures_numerical: self.numerical,
        }
    }
}

/// Parameters that determine the numbers; output, cache and thread settings are excluded.
fn parameters(cfg: &SweepConfig) -> Value {
    json!({
        "n": cfg.n,
        "b0_min": cfg.b0_min,
        "b0_max": cfg.b0_max,
        "b0_unit": FIELD_UNIT,
        "points_per_decade": cfg.points_per_decade,
        "spins": cfg.spins,
        "m": cfg.m,
        "levels": cfg.levels,
        "nu_max": cfg.nu_max,
        "tol": cfg.tol,
        "displacement": cfg.displacement,
        "hamiltonian": cfg.hamiltonian,
    })
}

fn mode(cfg: &SweepConfig) -> Parallelism {
    Parallelism::from_jobs(cfg.jobs)
}

/// `(n, B0 [G pm^-n], spin)` in output order.
fn field_grid(cfg: &SweepConfig) -> Vec<(f64, f64, Spin)> {
    let mut out = Vec::new();
    for &n in &cfg.n {
        for b in cfg.b0_grid() {
            for &spin in &cfg.spins {
                out.push((n, b, spin));
            }
        }
    }
    out
}

fn request(cfg: &SweepConfig, n: f64, b0_gauss: f64, spin: Spin, levels: usize) -> Result<EigenRequest> {
    Ok(EigenRequest::new(PowerLawField::new(b0_gauss, n)?, spin, levels)
        .with_m(cfg.m)
        .with_tol(cfg.tol))
}

fn field_cells(n: f64, b0_gauss: f64) -> Vec<Cell> {
    let b0 = PowerLawField::new(b0_gauss, n).map(|f| f.b0()).ok();
    vec![n.into(), b0_gauss.into(), b0.into()]
}

pub fn cmd_eigen(cfg: &SweepConfig, source: &CachedSolver) -> Result<CommandOutput> {
    let mut b = Builder::new(
        cfg,
        vec![
            col("n", "1"),
            col("B0", FIELD_UNIT),
            col("b0", B0_DIMLESS),
            col("spin", "1"),
            col("m", "1"),
            col("nu", "1"),
            col("alpha", "m_e^2c^4"),
            col("epsilon", "m_e c^2"),
            col("richardson_error", "m_e^2c^4"),
            col("status", "1"),
        ],
    );
    let grid = field_grid(cfg);
    let results = par::map(&grid, mode(cfg), |&(n, b0, spin)| {
        source.solve(&request(cfg, n, b0, spin, cfg.levels)?)
    });
    for (&(n, b0, spin), res) in grid.iter().zip(results) {
        let mut lead = field_cells(n, b0);
        lead.extend([spin.as_str().into(), cfg.m.into()]);
        match res {
            Ok(sol) => {
                for (nu, (&alpha, &err)) in sol.alphas.iter().zip(&sol.richardson_error).enumerate() {
                    let mut row = lead.clone();
                    row.extend([nu.into(), alpha.into(), energy(alpha).into(), err.into(), "ok".into()]);
                    b.ok(row);
                }
            }
            Err(e) => b.failed(lead, &e),
        }
    }
    Ok(b.finish())
}

pub fn cmd_qsl_sweep(cfg: &SweepConfig, source: &CachedSolver) -> Result<CommandOutput> {
    let mut b = Builder::new(
        cfg,
        vec![
            col("n", "1"),
            col("B0", FIELD_UNIT),
            col("b0", B0_DIMLESS),
            col("spin", "1"),
            col("nu", "1"),
            col("rho_disp", "lambda_e"),
            col("rho_disp_pm", "pm"),
            col("tau_qsl", "tau_C"),
            col("tau_qsl_s", "s"),
            col("v_over_c", "c"),
            col("status", "1"),
        ],
    );
    let grid = field_grid(cfg);
    let results = par::map(&grid, mode(cfg), |&(n, b0, spin)| {
        let sol = source.solve(&request(cfg, n, b0, spin, cfg.nu_max + 1)?)?;
        (0..cfg.nu_max)
            .map(|nu| qsl_from_solution(&sol, nu, cfg.displacement))
            .collect::<Result<Vec<_>>>()
    });
    for (&(n, b0, spin), res) in grid.iter().zip(results) {
        let mut lead = field_cells(n, b0);
        lead.push(spin.as_str().into());
        match res {
            Ok(rows) => {
                for r in rows {
                    let mut row = lead.clone();
                    row.extend([
                        r.nu.into(),
                        r.rho_disp.into(),
                        r.rho_disp_pm.into(),
                        r.tau_qsl.into(),
                        r.tau_qsl_s.into(),
                        r.v_over_c.into(),
                        "ok".into(),
                    ]);
                    b.ok(row);
                }
            }
            Err(e) => b.failed(lead, &e),
        }
    }
    Ok(b.finish())
}

pub fn cmd_sqsl(cfg: &SweepConfig, source: &CachedSolver) -> Result<CommandOutput> {
    let mut b = Builder::new(
        cfg,
        vec![
            col("n", "1"),
            col("spin", "1"),
            col("nu", "1"),
            col("sqsl_v_over_c", "c"),
            col("b0_at_saturation", B0_DIMLESS),
            col("B0_at_saturation", FIELD_UNIT),
            col("converged", "1"),
            col("sweep_points", "1"),
            col("status", "1"),
        ],
    );
    let settings = SaturationSettings {
        tol: cfg.tol,
        ..SaturationSettings::default()
    };
    let mut items = Vec::new();
    for &n in &cfg.n {
        for &spin in &cfg.spins {
            for nu in 0..cfg.nu_max {
                items.push((n, spin, nu));
            }
        }
    }
    let results = par::map(&items, mode(cfg), |&(n, spin, nu)| {
        saturated_qsl(source, n, spin, nu, cfg.displacement, &settings)
    });
    for (&(n, spin, nu), res) in items.iter().zip(results) {
        let lead: Vec<Cell> = vec![n.into(), spin.as_str().into(), nu.into()];
        match res {
            Ok(s) => {
                let mut row = lead;
                row.extend([
                    s.sqsl_v_over_c.into(),
                    s.b0_at_saturation.into(),
                    from_dimensionless_field(s.b0_at_saturation, n).ok().into(),
                    s.converged.into(),
                    s.trace.len().into(),
                    "ok".into(),
                ]);
                b.ok(row);
            }
            Err(e) => b.failed(lead, &e),
        }
    }
    Ok(b.finish())
}

pub fn cmd_bb(cfg: &SweepConfig, source: &CachedSolver) -> Result<CommandOutput> {
    let mut b = Builder::new(
        cfg,
        vec![
            col("n", "1"),
            col("B0", FIELD_UNIT),
            col("b0", B0_DIMLESS),
            col("spin", "1"),
            col("nu", "1"),
            col("lhs_energy_per_bit", "m_e c^2/bit"),
            col("rhs", "m_e c^2/bit"),
            col("alpha1", "m_e^2c^4"),
            col("region", "1"),
            col("bound_holds", "1"),
            col("status", "1"),
        ],
    );
    let grid = field_grid(cfg);
    let results = par::map(&grid, mode(cfg), |&(n, b0, spin)| {
        let sol = source.solve(&request(cfg, n, b0, spin, cfg.nu_max + 1)?)?;
        (0..cfg.nu_max)
            .map(|nu| bb_from_solution(&sol, nu, cfg.hamiltonian))
            .collect::<Result<Vec<_>>>()
    });
    for (&(n, b0, spin), res) in grid.iter().zip(results) {
        let mut lead = field_cells(n, b0);
        lead.push(spin.as_str().into());
        match res {
            Ok(points) => {
                for p in points {
                    let mut row = lead.clone();
                    row.extend([
                        p.nu.into(),
                        p.lhs_energy_per_bit.into(),
                        p.rhs.into(),
                        p.alpha1.into(),
                        p.region.as_str().into(),
                        p.holds().into(),
                        "ok".into(),
                    ]);
                    b.ok(row);
                }
            }
            Err(e) => b.failed(lead, &e),
        }
    }
    Ok(b.finish())
}

pub fn cmd_critical(cfg: &SweepConfig, source: &CachedSolver) -> Result<CommandOutput> {
    let mut b = Builder::new(
        cfg,
        vec![
            col("n", "1"),
            col("found", "1"),
            col("b0_critical", B0_DIMLESS),
            col("B0_critical", FIELD_UNIT),
            col("root_lo", B0_DIMLESS),
            col("root_hi", B0_DIMLESS),
            col("bracket_lo", B0_DIMLESS),
            col("bracket_hi", B0_DIMLESS),
            col("status", "1"),
        ],
    );
    let results = par::map(&cfg.n, mode(cfg), |&n| critical_field_in(source, n, CRITICAL_BRACKET, cfg.tol));
    for (&n, res) in cfg.n.iter().zip(results) {
        match res {
            Ok(c) => b.ok(vec![
                n.into(),
                c.found.into(),
                c.b0_critical.into(),
                c.b0_gauss_critical.into(),
                c.found.then_some(c.root_interval.0).into(),
                c.found.then_some(c.root_interval.1).into(),
                c.bracket.0.into(),
                c.bracket.1.into(),
                "ok".into(),
            ]),
            Err(e) => b.failed(vec![n.into()], &e),
        }
    }
    Ok(b.finish())
}

const ANSATZ_B0: [f64; 3] = [1e-2, 1.0, 1e2];
const ANSATZ_LEVELS: usize = 5;

/// `C3` converted from b0 units to `(G pm^-n)^(-2/(n+2))`.
fn c3_in_gauss_units(c3: f64, n: f64) -> f64 {
    c3 * (COMPTON_WAVELENGTH_PM.powf(n) / CRITICAL_FIELD_G).powf(2.0 / (n + 2.0))
}

pub fn cmd_ansatz(cfg: &SweepConfig, source: &CachedSolver) -> Result<CommandOutput> {
    let mut b = Builder::new(
        cfg,
        vec![
            col("n", "1"),
            col("analytic_v_lim_up", "c"),
            col("swept_sqsl_up", "c"),
            col("swept_converged", "1"),
            col("b0_at_saturation", B0_DIMLESS),
            col("c3", "1 (b0 units)"),
            col("c3_gauss", "(G*pm^-n)^(-2/(n+2))"),
            col("c5", "1"),
            col("fit_residual", "1"),
            col("poor_fit", "1"),
            col("status", "1"),
        ],
    );
    let settings = SaturationSettings {
        tol: cfg.tol,
        ..SaturationSettings::default()
    };
    let results = par::map(&cfg.n, mode(cfg), |&n| -> Result<Vec<Cell>> {
        let analytic = analytic_sqsl_up(n)?;
        let swept = saturated_qsl(source, n, Spin::Up, 0, cfg.displacement, &settings)?;
        let mut samples = Vec::new();
        for &b0 in &ANSATZ_B0 {
            for spin in Spin::BOTH {
                let req = EigenRequest::new(PowerLawField::from_dimensionless(b0, n)?, spin, ANSATZ_LEVELS)
                    .with_tol(cfg.tol);
                let sol = source.solve(&req)?;
                samples.extend(sol.alphas.iter().enumerate().map(|(nu, &alpha)| AnsatzSample {
                    b0,
                    nu,
                    spin,
                    alpha,
                }));
            }
        }
        let fit = fit_ansatz(n, &samples)?;
        Ok(vec![
            n.into(),
            analytic.into(),
            swept.sqsl_v_over_c.into(),
            swept.converged.into(),
            swept.b0_at_saturation.into(),
            fit.c3.into(),
            c3_in_gauss_units(fit.c3, n).into(),
            fit.c5.into(),
            fit.fit_residual.into(),
            fit.poor_fit.into(),
            "ok".into(),
        ])
    });
    for (&n, res) in cfg.n.iter().zip(results) {
        match res {
            Ok(row) => b.ok(row),
            Err(e) => b.failed(vec![n.into()], &e),
        }
    }
    Ok(b.finish())
}

/// Radius at which the pole-piece field is matched to a power law: the core edge.
pub const DESIGN_PROBE_CM: f64 = 0.05;
pub const UNIFORM_LAB_FIELD_G: f64 = 10.0;

pub fn cmd_design(cfg: &SweepConfig, source: &CachedSolver) -> Result<CommandOutput> {
    let mut b = Builder::new(
        cfg,
        vec![
            col("scenario", "1"),
            col("n", "1"),
            col("B0", FIELD_UNIT),
            col("b0", B0_DIMLESS),
            col("spin", "1"),
            col("rho_disp_pm", "pm"),
            col("tau_qsl_s", "s"),
            col("v_over_c", "c"),
            col("status", "1"),
        ],
    );
    b.table.parameters["design"] = json!(cfg.design);
    b.table.parameters["probe_radius_cm"] = json!(DESIGN_PROBE_CM);
    b.table.parameters["uniform_field_G"] = json!(UNIFORM_LAB_FIELD_G);
    let pole = design_to_powerlaw(&cfg.design, DESIGN_PROBE_CM * PM_PER_CM)
        .map_err(|e| Error::Config(format!("design: {e}")))?;
    let scenarios = [("pole-piece", pole), ("uniform", PowerLawField::new(UNIFORM_LAB_FIELD_G, 0.0)?)];
    let mut items = Vec::new();
    for (label, field) in scenarios {
        for &spin in &cfg.spins {
            items.push((label, field, spin));
        }
    }
    let results = par::map(&items, mode(cfg), |&(_, field, spin)| {
        let sol = source.solve(&EigenRequest::new(field, spin, 2).with_tol(cfg.tol))?;
        qsl_from_solution(&sol, 0, cfg.displacement)
    });
    for (&(label, f, spin), res) in items.iter().zip(results) {
        let lead: Vec<Cell> = vec![
            label.into(),
            f.n().into(),
            f.b0_gauss().into(),
            f.b0().into(),
            spin.as_str().into(),
        ];
        match res {
            Ok(r) => {
                let mut row = lead;
                row.extend([r.rho_disp_pm.into(), r.tau_qsl_s.into(), r.v_over_c.into(), "ok".into()]);
                b.ok(row);
            }
            Err(e) => b.failed(lead, &e),
        }
    }
    Ok(b.finish())
}

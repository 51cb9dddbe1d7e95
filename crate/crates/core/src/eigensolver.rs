//! Radial eigenproblem of the squared Dirac operator in a power-law field.
//!
//! For each spin channel and angular quantum number `m` the eigenvalues of
//!
//! ```text
//! α R = -[R'' + R'/x - m²/x² R] + V(x) R,
//! V(x) = (b0 x^(n+1)/(n+2))² + b0 xⁿ (-2m/(n+2) ± 1)
//! ```
//!
//! are computed with a cell-centred finite-volume scheme that is
//! self-adjoint under the measure `x dx`. The substitution `x = L y` with
//! `L = b0^(-1/(n+2))` removes `b0` entirely, so the discrete problem is built
//! in `y` and `α = λ / L²`.
//!
//! Boundary treatment: zero flux through the inner face at `x = 0`, a
//! homogeneous Dirichlet condition on the outer face. Eigenvalues are
//! Richardson-extrapolated from grids `h` and `h/2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::field::PowerLawField;
use crate::tridiag::SymTridiagonal;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_TOL: f64 = 1e-2;
/// Upper bound on requested levels (superpositions up to ν = 50).
pub const MAX_LEVELS: usize = 51;

/// Sign of σ_z. `Up` takes the `+` branch of the `±b0 xⁿ` coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "+" | "+1" => Ok(Spin::Up),
            "down" | "-" | "-1" => Ok(Spin::Down),
            other => Err(Error::invalid(format!("unknown spin '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRequest {
    pub field: PowerLawField,
    pub spin: Spin,
    pub m: i32,
    pub levels: usize,
    pub tol: f64,
}

impl EigenRequest {
    pub fn new(field: PowerLawField, spin: Spin, levels: usize) -> Self {
        Self {
            field,
            spin,
            m: 0,
            levels,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_m(mut self, m: i32) -> Self {
        self.m = m;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.levels > MAX_LEVELS {
            return Err(Error::invalid(format!(
                "levels = {} must lie in 1..={MAX_LEVELS}",
                self.levels
            )));
        }
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return Err(Error::invalid(format!(
                "tol = {} must lie in (0, {MAX_TOL}]",
                self.tol
            )));
        }
        Ok(())
    }

    /// Length unit `L = b0^(-1/(n+2))` of the scaled problem, in λe.
    pub fn length_scale(&self) -> f64 {
        self.field.b0().powf(-1.0 / (self.field.n() + 2.0))
    }

    /// `b0^(2/(n+2))`: the factor mapping scaled eigenvalues to α.
    pub fn alpha_scale(&self) -> f64 {
        self.field.b0().powf(2.0 / (self.field.n() + 2.0))
    }
}

/// Cell-centred uniform grid: nodes `x_j = (j + ½) h`, `j = 0..count_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub spacing_h: f64,
    pub count_n: usize,
}

impl RadialGrid {
    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing_h
    }

    pub fn x_max(&self) -> f64 {
        self.count_n as f64 * self.spacing_h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count_n).map(move |j| self.node(j))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub request: EigenRequest,
    pub alphas: Vec<f64>,
    /// `radials[ν][j]` is R̃_ν(x_j), normalised so that `h Σ R̃² x = 1`.
    pub radials: Vec<Vec<f64>>,
    pub grid: RadialGrid,
    pub converged: bool,
    pub richardson_error: Vec<f64>,
}

impl EigenSolution {
    pub fn levels(&self) -> usize {
        self.alphas.len()
    }

    pub fn alpha(&self, level: usize) -> Result<f64> {
        self.alphas.get(level).copied().ok_or(Error::IndexOutOfRange {
            index: level,
            levels: self.levels(),
        })
    }
}

/// Knobs of the grid and domain control. The defaults are the production values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub initial_cells: usize,
    pub max_refinements: usize,
    /// `x_max = domain_factor · x_t` for the estimated outer turning point `x_t`.
    pub domain_factor: f64,
    pub tail_threshold: f64,
    pub max_domain_doublings: usize,
    /// Return an unconverged solution instead of an error.
    pub allow_unconverged: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            initial_cells: 2000,
            max_refinements: 4,
            domain_factor: 3.0,
            tail_threshold: 1e-8,
            max_domain_doublings: 4,
            allow_unconverged: false,
        }
    }
}

/// Identifier of the discretisation; bump when results change.
pub const SCHEME_VERSION: u32 = 1;

/// `V(x)` including the centrifugal `m²/x²` term, in units of mₑ²c².
pub fn assemble_potential(req: &EigenRequest, x: f64) -> f64 {
    let n = req.field.n();
    let b0 = req.field.b0();
    let m = req.m as f64;
    let a = b0 * x.powf(n + 1.0) / (n + 2.0);
    let coupling = -2.0 * m / (n + 2.0) + req.spin.sign();
    let bn = if n == 0.0 { b0 } else { b0 * x.powf(n) };
    a * a + bn * coupling + m * m / (x * x)
}

/// Scaled problem: `-∇²_y + (y^(n+1)/(n+2))² + yⁿ c + m²/y²`.
#[derive(Debug, Clone, Copy)]
struct ScaledOperator {
    n: f64,
    m: f64,
    coupling: f64,
}

impl ScaledOperator {
    fn new(req: &EigenRequest) -> Self {
        let n = req.field.n();
        let m = req.m as f64;
        Self {
            n,
            m,
            coupling: -2.0 * m / (n + 2.0) + req.spin.sign(),
        }
    }

    /// `∫ V(y) y dy` over `[lo, hi]` without the centrifugal term.
    fn weighted_integral(&self, lo: f64, hi: f64) -> f64 {
        let n = self.n;
        let p_sq = 2.0 * n + 4.0;
        let p_lin = n + 2.0;
        let sq = (hi.powf(p_sq) - lo.powf(p_sq)) / (p_sq * (n + 2.0) * (n + 2.0));
        let lin = self.coupling * (hi.powf(p_lin) - lo.powf(p_lin)) / p_lin;
        sq + lin
    }

    fn potential(&self, y: f64) -> f64 {
        let a = y.powf(self.n + 1.0) / (self.n + 2.0);
        a * a + self.coupling * y.powf(self.n) + self.m * self.m / (y * y)
    }

    /// Outermost `y` with `V(y) = lambda`.
    fn outer_turning_point(&self, lambda: f64) -> f64 {
        // walk outwards past the minimum of V and the crossing
        let mut hi = 1.0;
        while self.potential(hi) <= lambda || self.potential(2.0 * hi) <= self.potential(hi) {
            hi *= 2.0;
        }
        let mut lo = hi;
        while self.potential(lo) > lambda && lo > 1e-12 {
            lo /= 2.0;
        }
        if self.potential(lo) > lambda {
            return hi;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.potential(mid) > lambda {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        hi
    }

    fn matrix(&self, cells: usize, y_max: f64) -> SymTridiagonal {
        let h = y_max / cells as f64;
        let face = |k: usize| k as f64 * h;
        let mut diag = Vec::with_capacity(cells);
        let mut off = Vec::with_capacity(cells.saturating_sub(1));
        for j in 0..cells {
            let y = (j as f64 + 0.5) * h;
            let mass = y * h;
            let lo = face(j);
            let hi = face(j + 1);
            let mut a_jj = (lo + hi) / h;
            if j + 1 == cells {
                // Dirichlet on the outer face: ghost value -R_N
                a_jj += hi / h;
            }
            a_jj += self.weighted_integral(lo, hi);
            a_jj += self.m * self.m / (y * y) * mass;
            diag.push(a_jj / mass);
            if j + 1 < cells {
                let y_next = y + h;
                off.push(-hi / h / (h * (y * y_next).sqrt()));
            }
        }
        SymTridiagonal::new(diag, off)
    }
}

/// Rough outer turning point, in scaled units, of the given level: the
/// confining `(y^(n+1)/(n+2))²` term reaches an eigenvalue estimate.
fn turning_point_scaled(n: f64, m: i32, level: usize) -> f64 {
    let p = (2.0 + 2.0 * n) / (n + 2.0);
    let lambda = 2.0 * (level as f64 + m.unsigned_abs() as f64 + 1.0).powf(p) + 1.0;
    ((n + 2.0) * lambda.sqrt()).powf(1.0 / (n + 1.0))
}

struct ScaledSolve {
    lambdas: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    h: f64,
}

fn scaled_solve(op: &ScaledOperator, levels: usize, cells: usize, y_max: f64) -> ScaledSolve {
    let t = op.matrix(cells, y_max);
    let pairs = t.lowest(levels);
    let (lambdas, vectors) = pairs.into_iter().unzip();
    ScaledSolve {
        lambdas,
        vectors,
        h: y_max / cells as f64,
    }
}

fn tail_ratio(u: &[f64], h: f64) -> f64 {
    let values = u
        .iter()
        .enumerate()
        .map(|(j, &uj)| (uj / ((j as f64 + 0.5) * h * h).sqrt()).abs());
    let (max, last) = values.fold((0.0_f64, 0.0), |(m, _), v| (m.max(v), v));
    if max == 0.0 {
        1.0
    } else {
        last / max
    }
}

/// Raw (not extrapolated) eigenvalues and radials on an explicit grid of
/// `cells` cells spanning `[0, x_max]` (λe units).
pub fn solve_on_grid(
    req: &EigenRequest,
    cells: usize,
    x_max: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, RadialGrid)> {
    req.validate()?;
    if cells < req.levels + 1 || !(x_max > 0.0) {
        return Err(Error::invalid("grid too small for the requested levels"));
    }
    let op = ScaledOperator::new(req);
    let length = req.length_scale();
    let s = scaled_solve(&op, req.levels, cells, x_max / length);
    let alphas = s.lambdas.iter().map(|l| l * req.alpha_scale()).collect();
    let grid = RadialGrid {
        spacing_h: s.h * length,
        count_n: cells,
    };
    let radials = radials_from_vectors(&s.vectors, s.h, length);
    Ok((alphas, radials, grid))
}

fn radials_from_vectors(vectors: &[Vec<f64>], h: f64, length: f64) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|u| {
            u.iter()
                .enumerate()
                .map(|(j, &uj)| uj / ((j as f64 + 0.5) * h * h).sqrt() / length)
                .collect()
        })
        .collect()
}

pub fn solve(req: &EigenRequest) -> Result<EigenSolution> {
    solve_with(req, &SolverSettings::default())
}

pub fn solve_with(req: &EigenRequest, settings: &SolverSettings) -> Result<EigenSolution> {
    req.validate()?;
    let op = ScaledOperator::new(req);
    let levels = req.levels;
    let top = levels - 1;
    let n0 = settings.initial_cells.max(4 * levels);

    // a coarse solve on a generous domain fixes the eigenvalue scale, the
    // turning point of the actual potential then sets the domain
    let guess = settings.domain_factor * turning_point_scaled(op.n, req.m, top);
    let probe = scaled_solve(&op, levels, n0, guess);
    let mut y_max = settings.domain_factor * op.outer_turning_point(probe.lambdas[top].max(0.0));
    let mut coarse = None;
    for attempt in 0..=settings.max_domain_doublings {
        let s = scaled_solve(&op, levels, n0, y_max);
        if tail_ratio(&s.vectors[top], s.h) <= settings.tail_threshold {
            coarse = Some(s);
            break;
        }
        if attempt < settings.max_domain_doublings {
            y_max *= 2.0;
        }
    }
    let mut coarse_lambdas = coarse
        .ok_or(Error::DomainOverflow {
            x_max: y_max * req.length_scale(),
        })?
        .lambdas;

    let mut cells = n0;
    let mut worst = f64::INFINITY;
    let mut last = None;
    for _ in 0..=settings.max_refinements {
        let fine = scaled_solve(&op, levels, 2 * cells, y_max);
        let extrapolated: Vec<f64> = fine
            .lambdas
            .iter()
            .zip(&coarse_lambdas)
            .map(|(f, c)| (4.0 * f - c) / 3.0)
            .collect();
        let corrections: Vec<f64> = extrapolated
            .iter()
            .zip(&fine.lambdas)
            .map(|(e, f)| (e - f).abs())
            .collect();
        // natural eigenvalue unit of the scaled problem is 1
        worst = extrapolated
            .iter()
            .zip(&corrections)
            .map(|(e, c)| c / e.abs().max(1.0))
            .fold(0.0, f64::max);
        let done = worst <= req.tol;
        coarse_lambdas = fine.lambdas.clone();
        last = Some((fine, extrapolated, corrections));
        if done {
            break;
        }
        cells *= 2;
    }
    let (fine, extrapolated, corrections) = last.expect("at least one refinement");
    let converged = worst <= req.tol;
    if !converged && !settings.allow_unconverged {
        return Err(Error::NoConvergence {
            refinements: settings.max_refinements,
            worst,
        });
    }

    let mut lambdas = extrapolated;
    for (l, c) in lambdas.iter_mut().zip(&corrections) {
        if *l < 0.0 {
            // the radial operator factorises as L†L (or LL†) and is non-negative
            if *l < -(10.0 * c + 10.0 * req.tol) {
                return Err(Error::NoConvergence {
                    refinements: settings.max_refinements,
                    worst: l.abs(),
                });
            }
            *l = 0.0;
        }
    }
    for i in 1..lambdas.len() {
        let (lo, hi) = (lambdas[i - 1], lambdas[i]);
        if hi - lo <= 1e-10 * hi.abs().max(1.0) {
            return Err(Error::Degenerate {
                lower: i - 1,
                upper: i,
                alpha: hi * req.alpha_scale(),
            });
        }
    }

    let length = req.length_scale();
    let alpha_scale = req.alpha_scale();
    Ok(EigenSolution {
        request: *req,
        alphas: lambdas.iter().map(|l| l * alpha_scale).collect(),
        radials: radials_from_vectors(&fine.vectors, fine.h, length),
        grid: RadialGrid {
            spacing_h: fine.h * length,
            count_n: fine.vectors.first().map_or(0, Vec::len),
        },
        converged,
        richardson_error: corrections.iter().map(|c| c * alpha_scale).collect(),
    })
}

/// `h Σ R̃_ν R̃_μ x^(power+1)`: radial matrix element of `x^power` under the measure `x dx`.
pub fn wavefunction_moment(sol: &EigenSolution, nu: usize, mu: usize, power: u32) -> Result<f64> {
    if power > 2 {
        return Err(Error::invalid(format!("moment power {power} not in 0..=2")));
    }
    let levels = sol.levels();
    for idx in [nu, mu] {
        if idx >= levels {
            return Err(Error::IndexOutOfRange { index: idx, levels });
        }
    }
    let h = sol.grid.spacing_h;
    let sum: f64 = sol.radials[nu]
        .iter()
        .zip(&sol.radials[mu])
        .enumerate()
        .map(|(j, (a, b))| a * b * sol.grid.node(j).powi(power as i32 + 1))
        .sum();
    Ok(h * sum)
}

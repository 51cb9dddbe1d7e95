//! Shooting-method reference for the radial equation, independent of the
//! finite-volume solver: RK4 in `t = ln x` on the unscaled problem, node
//! counting and bisection on α.
#![allow(dead_code)]

/// `(x R')' = x (V - α) R`; with `P = x R'` and `t = ln x`:
/// `dR/dt = P`, `dP/dt = x² (V - α) R`.
#[derive(Debug, Clone, Copy)]
pub struct Shooting {
    pub n: f64,
    pub b0: f64,
    /// +1 spin up, -1 spin down
    pub sign: f64,
    pub m: i32,
    pub steps: usize,
}

pub struct Wave {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    /// dR/dx
    pub dr: Vec<f64>,
    pub dt: f64,
}

impl Shooting {
    pub fn new(n: f64, b0: f64, sign: f64) -> Self {
        Self {
            n,
            b0,
            sign,
            m: 0,
            steps: 40_000,
        }
    }

    pub fn a(&self, x: f64) -> f64 {
        self.b0 * x.powf(self.n + 1.0) / (self.n + 2.0)
    }

    fn coupling(&self) -> f64 {
        -2.0 * self.m as f64 / (self.n + 2.0) + self.sign
    }

    /// `x² V(x)`, finite at the origin.
    fn x2v(&self, x: f64) -> f64 {
        let a = self.a(x);
        let m = self.m as f64;
        x * x * a * a + self.b0 * self.coupling() * x.powf(self.n + 2.0) + m * m
    }

    fn potential(&self, x: f64) -> f64 {
        self.x2v(x) / (x * x)
    }

    fn scale(&self) -> f64 {
        self.b0.powf(-1.0 / (self.n + 2.0))
    }

    /// Integration interval in `t`: from deep inside the core to well past
    /// the outer turning point of `alpha_ref`.
    fn span(&self, alpha_ref: f64) -> (f64, f64) {
        let l = self.scale();
        let x0 = 1e-7 * l;
        let mut x = l;
        while self.potential(x) <= alpha_ref || self.potential(2.0 * x) <= self.potential(x) {
            x *= 2.0;
        }
        // march outward until the WKB decay exponent reaches 40
        let dx = x * 1e-3;
        let mut acc = 0.0;
        while acc < 40.0 {
            let k = (self.potential(x) - alpha_ref).max(0.0).sqrt();
            acc += k * dx;
            x += dx;
        }
        (x0.ln(), x.ln())
    }

    fn start(&self, x0: f64, alpha: f64) -> (f64, f64) {
        let m = self.m.unsigned_abs() as f64;
        if self.m != 0 {
            let r = x0.powf(m);
            return (r, m * r);
        }
        let n = self.n;
        let p = self.b0 * self.coupling() * x0.powf(n + 2.0) / (n + 2.0) - alpha * x0 * x0 / 2.0;
        (1.0, p)
    }

    fn rhs(&self, t: f64, r: f64, p: f64, alpha: f64) -> (f64, f64) {
        let x = t.exp();
        (p, (self.x2v(x) - alpha * x * x) * r)
    }

    /// Sign changes of `R` on the span, plus the trajectory when requested.
    fn integrate(&self, alpha: f64, span: (f64, f64), record: bool) -> (usize, Vec<(f64, f64, f64)>) {
        let (t0, t1) = span;
        let h = (t1 - t0) / self.steps as f64;
        let (mut r, mut p) = self.start(t0.exp(), alpha);
        let mut nodes = 0;
        let mut path = Vec::new();
        if record {
            path.push((t0, r, p));
        }
        for i in 0..self.steps {
            let t = t0 + i as f64 * h;
            let (k1r, k1p) = self.rhs(t, r, p, alpha);
            let (k2r, k2p) = self.rhs(t + h / 2.0, r + h / 2.0 * k1r, p + h / 2.0 * k1p, alpha);
            let (k3r, k3p) = self.rhs(t + h / 2.0, r + h / 2.0 * k2r, p + h / 2.0 * k2p, alpha);
            let (k4r, k4p) = self.rhs(t + h, r + h * k3r, p + h * k3p, alpha);
            let r_new = r + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
            let p_new = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            if r_new.signum() != r.signum() && r != 0.0 {
                nodes += 1;
            }
            r = r_new;
            p = p_new;
            if !record && r.abs() > 1e100 {
                r *= 1e-100;
                p *= 1e-100;
            }
            if record {
                path.push((t + h, r, p));
            }
        }
        (nodes, path)
    }

    /// The `k`-th eigenvalue (0-based) by bisection on the node count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let s = self.b0.powf(2.0 / (self.n + 2.0));
        let mut hi = s;
        loop {
            let span = self.span(hi);
            if self.integrate(hi, span, false).0 > k {
                break;
            }
            hi *= 2.0;
        }
        let span = self.span(hi);
        let mut lo = -1e-3 * s;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.integrate(mid, span, false).0 > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-13 * s {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Normalised `R` at eigenvalue `alpha`, with the divergent tail cut at
    /// the outermost minimum of `|R|`. The grid is set by `alpha_ref`, so
    /// waves built with the same reference share nodes.
    pub fn wave(&self, alpha: f64, alpha_ref: f64) -> Wave {
        let span = self.span(alpha_ref.max(self.b0.powf(2.0 / (self.n + 2.0))));
        let (_, path) = self.integrate(alpha, span, true);
        let dt = (span.1 - span.0) / self.steps as f64;
        let turning = path
            .iter()
            .rposition(|&(t, _, _)| self.potential(t.exp()) <= alpha)
            .unwrap_or(0);
        let cut = (turning..path.len())
            .min_by(|&i, &j| path[i].1.abs().total_cmp(&path[j].1.abs()))
            .unwrap_or(path.len() - 1);
        let mut x = Vec::with_capacity(path.len());
        let mut r = Vec::with_capacity(path.len());
        let mut dr = Vec::with_capacity(path.len());
        for (i, &(t, ri, pi)) in path.iter().enumerate() {
            let xi = t.exp();
            x.push(xi);
            if i <= cut {
                r.push(ri);
                dr.push(pi / xi);
            } else {
                r.push(0.0);
                dr.push(0.0);
            }
        }
        let mut w = Wave { x, r, dr, dt };
        let norm = w.integral(|i| w.r[i] * w.r[i], 0).sqrt();
        let sign = if w.r[0] < 0.0 { -1.0 } else { 1.0 };
        for v in w.r.iter_mut().chain(w.dr.iter_mut()) {
            *v *= sign / norm;
        }
        w
    }
}

impl Wave {
    /// Trapezoid rule for `∫ f x^(power+1) dx = ∫ f x^(power+2) dt`.
    pub fn integral(&self, f: impl Fn(usize) -> f64, power: i32) -> f64 {
        let g = |i: usize| f(i) * self.x[i].powi(power + 2);
        let last = self.x.len() - 1;
        let inner: f64 = (1..last).map(g).sum();
        self.dt * (inner + 0.5 * (g(0) + g(last)))
    }
}

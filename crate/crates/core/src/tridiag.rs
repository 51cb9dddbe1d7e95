//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm-sequence
//! bisection followed by inverse iteration.

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    off_sq: Vec<f64>,
    pivmin: f64,
}

impl SymTridiagonal {
    /// # Panics
    /// If `off.len() + 1 != diag.len()` or the matrix is empty.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length mismatch");
        let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
        let max_sq = off_sq.iter().cloned().fold(1.0_f64, f64::max);
        let pivmin = f64::MIN_POSITIVE * max_sq;
        Self {
            diag,
            off,
            off_sq,
            pivmin,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            q = self.diag[i] - x - if i == 0 { 0.0 } else { self.off_sq[i - 1] / q };
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let span = hi - lo;
        lo -= 1e-12 * span + self.pivmin;
        hi += 1e-12 * span + self.pivmin;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + self.pivmin;
            if hi - lo <= tol || mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Inverse iteration for the eigenvector belonging to `lambda`, unit 2-norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let scale = {
            let (lo, hi) = self.gershgorin();
            lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
        };
        let lu = ShiftedLu::factor(self, lambda, scale);
        // deterministic, generic start vector
        let mut v: Vec<f64> = (0..n)
            .map(|j| 1.0 + 0.5 * ((j as f64) * 0.618_033_988_75).sin())
            .collect();
        for _ in 0..4 {
            lu.solve(&mut v);
            normalize(&mut v);
        }
        v
    }

    /// The `k` lowest eigenpairs in ascending order. Vectors are orthonormal
    /// and carry a positive first significant component.
    pub fn lowest(&self, k: usize) -> Vec<(f64, Vec<f64>)> {
        let k = k.min(self.len());
        let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
        for i in 0..k {
            let lambda = self.eigenvalue(i);
            let mut v = self.eigenvector(lambda);
            for (_, prev) in &out {
                let d = dot(&v, prev);
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= d * b);
            }
            normalize(&mut v);
            fix_sign(&mut v);
            out.push((lambda, v));
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    v.iter_mut().for_each(|x| *x /= max);
    let norm = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-2 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// LU factorisation with partial pivoting of `T - σI`.
struct ShiftedLu {
    d: Vec<f64>,
    dl: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swap: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, sigma: f64, scale: f64) -> Self {
        let n = t.len();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - sigma).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swap[i] = true;
            }
        }
        // an exact shift leaves a zero pivot; perturb it
        let tiny = f64::EPSILON * scale;
        for x in d.iter_mut() {
            if x.abs() < tiny {
                *x = if *x < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            d,
            dl,
            du,
            du2,
            swap,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        // guard against overflow from a near-exact shift
        let max = b.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if !max.is_finite() || max == 0.0 {
            b.iter_mut().for_each(|x| *x = 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// tridiag(-1, 2, -1) has eigenvalues 2 - 2cos(kπ/(n+1)).
    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 200;
        let t = laplacian(n);
        let pairs = t.lowest(6);
        for (k, (lambda, v)) in pairs.iter().enumerate() {
            let arg = (k + 1) as f64 * PI / (n + 1) as f64;
            let exact = 2.0 - 2.0 * arg.cos();
            assert!((lambda - exact).abs() < 1e-13, "k={k}: {lambda} vs {exact}");
            // eigenvector is a sine mode
            let scale = (2.0 / (n + 1) as f64).sqrt();
            for (j, &x) in v.iter().enumerate() {
                let s = scale * (arg * (j + 1) as f64).sin();
                assert!((x - s).abs() < 1e-9, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn one_by_one_and_two_by_two() {
        let t = SymTridiagonal::new(vec![3.5], vec![]);
        let p = t.lowest(1);
        assert!((p[0].0 - 3.5).abs() < 1e-14);
        assert!((p[0].1[0] - 1.0).abs() < 1e-14);

        let t = SymTridiagonal::new(vec![1.0, 1.0], vec![1.0]);
        let p = t.lowest(2);
        assert!(p[0].0.abs() < 1e-14, "{}", p[0].0);
        assert!((p[1].0 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sturm_count_brackets() {
        let t = laplacian(50);
        assert_eq!(t.count_below(-1.0), 0);
        assert_eq!(t.count_below(5.0), 50);
        assert_eq!(t.count_below(2.0 + 1e-9), 25);
    }

    proptest! {
        #[test]
        fn residual_and_orthogonality(diag in proptest::collection::vec(-5.0f64..5.0, 30),
                                      off in proptest::collection::vec(0.1f64..2.0, 29)) {
            let t = SymTridiagonal::new(diag.clone(), off.clone());
            let pairs = t.lowest(4);
            for w in pairs.windows(2) {
                prop_assert!(w[0].0 <= w[1].0);
            }
            for (lambda, v) in &pairs {
                let n = diag.len();
                let mut res = 0.0_f64;
                for i in 0..n {
                    let mut tv = diag[i] * v[i];
                    if i > 0 { tv += off[i - 1] * v[i - 1]; }
                    if i + 1 < n { tv += off[i] * v[i + 1]; }
                    res = res.max((tv - lambda * v[i]).abs());
                }
                prop_assert!(res < 1e-9, "residual {}", res);
            }
            for i in 0..pairs.len() {
                for j in 0..i {
                    prop_assert!(dot(&pairs[i].1, &pairs[j].1).abs() < 1e-9);
                }
            }
        }
    }
}

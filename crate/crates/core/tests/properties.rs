use landau_qsl::bounds::{bb_from_solution, classify_region, HamiltonianConvention, Region};
use landau_qsl::eigensolver::{solve, EigenRequest, Spin};
use landau_qsl::par::Parallelism;
use landau_qsl::qsl::{qsl_from_solution, qsl_grid, radial_displacement, DirectSolver, DisplacementModel};
use landau_qsl::{EigenSolution, PowerLawField};
use proptest::prelude::*;

const DIRAC: DisplacementModel = DisplacementModel::DiracSpinor;
const SCALAR: DisplacementModel = DisplacementModel::ScalarChannel;

fn solved(b0: f64, n: f64, spin: Spin, levels: usize) -> EigenSolution {
    let field = PowerLawField::from_dimensionless(b0, n).unwrap();
    solve(&EigenRequest::new(field, spin, levels)).unwrap()
}

fn speed(b0: f64, n: f64, spin: Spin, model: DisplacementModel) -> f64 {
    qsl_from_solution(&solved(b0, n, spin, 2), 0, model).unwrap().v_over_c
}

fn rhs(b0: f64, n: f64, spin: Spin) -> (f64, Region) {
    let p = bb_from_solution(&solved(b0, n, spin, 2), 0, HamiltonianConvention::WithRestEnergy).unwrap();
    (p.rhs, p.region)
}

fn spin_ratio(b0: f64, n: f64) -> (f64, f64) {
    let up = qsl_from_solution(&solved(b0, n, Spin::Up, 2), 0, DIRAC).unwrap();
    let down = qsl_from_solution(&solved(b0, n, Spin::Down, 2), 0, DIRAC).unwrap();
    (down.v_over_c / up.v_over_c, down.rho_disp / up.rho_disp)
}

#[test]
fn speeds_coincide_for_both_spins_at_low_field() {
    for n in [-0.05, 0.0, 0.05] {
        let mut b0 = 1e-2;
        while solved(b0, n, Spin::Up, 2).alphas[1] >= 1e-3 {
            b0 /= 10.0;
        }
        let (v, _) = spin_ratio(b0, n);
        assert!((v - 1.0).abs() < 0.01, "n={n} b0={b0}: v_down/v_up = {v}");
    }
}

#[test]
fn displacement_is_spin_independent_at_low_field() {
    for n in [-0.01, 0.0, 0.01] {
        for model in [DIRAC, SCALAR] {
            let up = radial_displacement(&solved(1e-6, n, Spin::Up, 2), 0, model).unwrap();
            let down = radial_displacement(&solved(1e-6, n, Spin::Down, 2), 0, model).unwrap();
            assert!((up - down).abs() / up < 0.01, "n={n} {model:?}: {up} vs {down}");
        }
    }
}

#[test]
fn low_field_spin_splitting_is_scale_free() {
    // away from n = 0 the spin term keeps a fixed weight in the scaled problem
    for n in [-0.5, 0.5, 1.0] {
        let (v1, r1) = spin_ratio(1e-8, n);
        let (v2, r2) = spin_ratio(1e-6, n);
        assert!((v1 - v2).abs() < 1e-3 && (r1 - r2).abs() < 1e-3, "n={n}: {v1}/{v2}, {r1}/{r2}");
        assert!((v1 - 1.0).abs() > 0.01, "n={n}: {v1}");
    }
}

#[test]
fn spin_down_is_faster_in_strong_fields() {
    for n in [-0.5, 0.0, 0.5] {
        for model in [DIRAC, SCALAR] {
            let up = speed(1e6, n, Spin::Up, model);
            let down = speed(1e6, n, Spin::Down, model);
            assert!(down > up, "n={n} {model:?}: down {down} vs up {up}");
        }
    }
    // the scalar channel doubles the spin-up speed; the bispinor does not
    let ratio = speed(1e6, 0.0, Spin::Down, SCALAR) / speed(1e6, 0.0, Spin::Up, SCALAR);
    assert!(ratio > 2.0 && (ratio - (1.0 + 2f64.sqrt())).abs() < 0.01, "{ratio}");
}

#[test]
fn quadratic_field_bound_spin_pattern() {
    let (up_lo, region_lo) = rhs(1e-4, 2.0, Spin::Up);
    let (down_lo, _) = rhs(1e-4, 2.0, Spin::Down);
    assert_eq!(region_lo, Region::I);
    assert!(down_lo < up_lo, "{down_lo} vs {up_lo}");
    let (up_hi, region_hi) = rhs(1e4, 2.0, Spin::Up);
    let (down_hi, _) = rhs(1e4, 2.0, Spin::Down);
    assert_eq!(region_hi, Region::III);
    assert!(down_hi > up_hi, "{down_hi} vs {up_hi}");
}

#[test]
fn uniform_field_bound_is_spin_independent_in_region_one() {
    for b0 in [1e-8, 1e-6, 1e-4] {
        let (up, region) = rhs(b0, 0.0, Spin::Up);
        let (down, _) = rhs(b0, 0.0, Spin::Down);
        assert_eq!(region, Region::I);
        assert!((up - down).abs() / up < 1e-3, "b0={b0}: {up} vs {down}");
    }
}

#[test]
fn region_boundaries() {
    assert_eq!(classify_region(0.0999), Region::I);
    assert_eq!(classify_region(0.1), Region::II);
    assert_eq!(classify_region(10.0), Region::II);
    assert_eq!(classify_region(10.001), Region::III);
}

#[test]
fn sweeps_do_not_depend_on_parallelism() {
    let mut points = Vec::new();
    for n in [-0.5, 0.0, 1.0] {
        for k in -3..=3 {
            for spin in Spin::BOTH {
                let field = PowerLawField::from_dimensionless(10f64.powi(k), n).unwrap();
                points.push((EigenRequest::new(field, spin, 3), k.unsigned_abs() as usize % 2));
            }
        }
    }
    let src = DirectSolver::default();
    let seq = qsl_grid(&src, &points, DIRAC, Parallelism::Sequential);
    let par = qsl_grid(&src, &points, DIRAC, Parallelism::Parallel { jobs: 4 });
    assert_eq!(seq.len(), points.len());
    for (a, b) in seq.iter().zip(&par) {
        assert_eq!(a.as_ref().unwrap(), b.as_ref().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn speed_is_subluminal(n in -0.9f64..4.0, log_b0 in -6f64..8.0, up in any::<bool>()) {
        let spin = if up { Spin::Up } else { Spin::Down };
        let sol = solved(10f64.powf(log_b0), n, spin, 4);
        for nu in 0..3 {
            let q = qsl_from_solution(&sol, nu, DIRAC).unwrap();
            prop_assert!(q.v_over_c > 0.0 && q.v_over_c < 1.0);
            let p = bb_from_solution(&sol, nu, HamiltonianConvention::WithRestEnergy).unwrap();
            prop_assert!(p.holds() && p.rhs > 0.0);
        }
    }

    #[test]
    fn eigenvalues_ascend_and_scale(n in -0.9f64..4.0, log_b0 in -6f64..8.0) {
        let b0 = 10f64.powf(log_b0);
        let sol = solved(b0, n, Spin::Up, 4);
        prop_assert!(sol.alphas.windows(2).all(|w| w[1] > w[0]));
        // α scales as b0^(2/(n+2)) at fixed n
        let twice = solved(4.0 * b0, n, Spin::Up, 4);
        let factor = 4f64.powf(2.0 / (n + 2.0));
        for (a, b) in sol.alphas.iter().zip(&twice.alphas) {
            prop_assert!((b / a - factor).abs() / factor < 1e-5);
        }
    }
}

mod common;

use common::*;
use dgiga::assembly::{Assembler, DgConfig, DgSystem, Scheme};
use dgiga::harness::{load_config, problem_smooth};
use dgiga::solver::{solve_general, solve_spd, SolverOptions};
use nalgebra::{DMatrix, DVector};

fn lu_oracle(sys: &DgSystem) -> Vec<f64> {
    let n = sys.matrix.nrows();
    assert!(n <= 2000);
    let a = DMatrix::from_row_slice(n, n, &sys.matrix.to_dense());
    let b = DVector::from_column_slice(&sys.rhs);
    a.lu().solve(&b).expect("nonsingular").as_slice().to_vec()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn smooth_system(levels: usize, scheme: Scheme) -> DgSystem {
    let (study, mut d) = load_config(&config_path("smooth2d.json")).unwrap();
    for _ in 0..levels {
        d = d.refine_dyadic();
    }
    let p = problem_smooth(2, 1.0, 4).unwrap();
    Assembler::new(&d, DgConfig::with_default_mu(scheme, study.degree, 2))
        .unwrap()
        .assemble(&p.f, &p.u)
        .unwrap()
}

#[test]
fn cg_matches_dense_lu_on_smooth_sip() {
    let sys = smooth_system(3, Scheme::Sip);
    assert!(sys.matrix.nrows() > 1000);
    let (x, report) = solve_spd(&sys.matrix, &sys.rhs, &SolverOptions::default()).unwrap();
    assert!(report.converged && report.relative_residual <= 1e-10);
    assert!(max_diff(&x, &lu_oracle(&sys)) <= 1e-8);
}

#[test]
fn bicgstab_matches_dense_lu_on_iip() {
    let d = two_squares(1, 2, 3, [1.0, 5.0]);
    let p = problem_smooth(2, 1.0, 2).unwrap();
    let f = |_: usize, x: &[f64]| (p.f)(0, x);
    let sys = Assembler::new(&d, DgConfig::with_default_mu(Scheme::Iip, 1, 2))
        .unwrap()
        .assemble(&f, &p.u)
        .unwrap();
    assert!(sys.matrix.symmetry_defect() > 1e-6);
    let (x, report) = sys.solve(&SolverOptions::default()).unwrap();
    assert!(report.converged);
    assert!(max_diff(&x, &lu_oracle(&sys)) <= 1e-8);
    let (x, _) = solve_general(&sys.matrix, &sys.rhs, &SolverOptions::default()).unwrap();
    assert!(max_diff(&x, &lu_oracle(&sys)) <= 1e-8);
}

#[test]
fn bicgstab_agrees_with_cg_on_spd() {
    let sys = smooth_system(2, Scheme::Sip);
    let (x1, _) = solve_spd(&sys.matrix, &sys.rhs, &SolverOptions::default()).unwrap();
    let (x2, _) = solve_general(&sys.matrix, &sys.rhs, &SolverOptions::default()).unwrap();
    assert!(max_diff(&x1, &x2) <= 1e-8);
}

#[test]
fn preconditioning_does_not_change_the_solution() {
    let sys = smooth_system(2, Scheme::Sip);
    let tol = 1e-10;
    let with = SolverOptions::with_tol(tol);
    let without = SolverOptions {
        jacobi: false,
        ..with
    };
    let (x1, r1) = solve_spd(&sys.matrix, &sys.rhs, &with).unwrap();
    let (x2, r2) = solve_spd(&sys.matrix, &sys.rhs, &without).unwrap();
    assert!(r1.relative_residual <= tol && r2.relative_residual <= tol);
    let rel = max_diff(&x1, &x2) / x1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(rel <= 10.0 * tol, "{rel:.3e}");
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let sys = smooth_system(2, Scheme::Sip);
    let (a, _) = sys.solve(&SolverOptions::default()).unwrap();
    let (b, _) = sys.solve(&SolverOptions::default()).unwrap();
    assert_eq!(a, b);
    let iip = smooth_system(1, Scheme::Iip);
    let (a, _) = iip.solve(&SolverOptions::default()).unwrap();
    let (b, _) = iip.solve(&SolverOptions::default()).unwrap();
    assert_eq!(a, b);
}

mod common;

use common::*;
use dgiga::analysis::{dg_norm_error, l2_error};
use dgiga::assembly::{Assembler, DgConfig, Scheme};
use dgiga::geometry::MultiPatchDomain;
use dgiga::harness::problem_polynomial;
use dgiga::solver::SolverOptions;

/// Residual of the interpolated exact solution and dG error of the discrete
/// solution for a `Q_k` field.
fn patch_test(d: &MultiPatchDomain, scheme: Scheme) -> (f64, f64) {
    let k = d.degree();
    let problem = problem_polynomial(d.dim(), k, 1.0, d.num_patches()).unwrap();
    let a = Assembler::new(d, DgConfig::with_default_mu(scheme, k, d.dim())).unwrap();
    let sys = a.assemble(&problem.f, &problem.u).unwrap();
    let exact = interpolate(d, |p, x| (problem.u)(p, x));
    let au = sys.matrix.matvec(&exact);
    let res: Vec<f64> = au.iter().zip(&sys.rhs).map(|(x, y)| x - y).collect();
    let (uh, report) = sys.solve(&SolverOptions::with_tol(1e-13)).unwrap();
    assert!(report.converged);
    let err = dg_norm_error(&a, &uh, problem.exact()).unwrap();
    assert!(l2_error(&a, &uh, &problem.u).unwrap() <= err.max(1e-12));
    (norm(&res) / norm(&sys.rhs), err)
}

fn check(d: &MultiPatchDomain, label: &str) {
    for scheme in [Scheme::Sip, Scheme::Iip] {
        let (res, err) = patch_test(d, scheme);
        assert!(res <= 1e-10, "{label} {scheme}: residual {res:.3e}");
        assert!(err <= 1e-8, "{label} {scheme}: dG error {err:.3e}");
    }
}

#[test]
fn single_patch_reduces_to_nitsche() {
    for k in 1..=3 {
        check(&unit_square(k, 3), &format!("single k={k}"));
    }
}

#[test]
fn matching_two_patches() {
    for k in 1..=3 {
        check(&two_squares(k, 2, 2, [1.0, 1.0]), &format!("matching k={k}"));
    }
}

#[test]
fn non_matching_two_patches() {
    for k in 1..=3 {
        check(&two_squares(k, 2, 3, [1.0, 1.0]), &format!("non-matching k={k}"));
        check(&two_squares(k, 4, 2, [1.0, 1.0]), &format!("dyadic k={k}"));
    }
}

#[test]
fn three_dimensional_slabs() {
    let d = boxes(
        2,
        &[
            (vec![0.0, 0.0, 0.0], vec![0.5, 1.0, 1.0], vec![1, 2, 1]),
            (vec![0.5, 0.0, 0.0], vec![1.0, 1.0, 1.0], vec![2, 1, 3]),
        ],
        vec![axis_interface(0, 1, 0, 3)],
        vec![1.0, 1.0],
    );
    check(&d, "3d");
}

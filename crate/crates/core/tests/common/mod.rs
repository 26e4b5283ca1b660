#![allow(dead_code)]

use std::path::PathBuf;

use dgiga::geometry::{FaceSelector, GeometryPatch, InterfaceFace, MultiPatchDomain, Orientation, Side};
use dgiga::spline::{quasi_interpolate, TensorSplineSpace};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

/// Interface from the high `axis` face of `left` to the low face of `right`.
pub fn axis_interface(left: usize, right: usize, axis: usize, dim: usize) -> InterfaceFace {
    InterfaceFace {
        left_patch: left,
        right_patch: right,
        left_face: FaceSelector::new(axis, Side::High),
        right_face: FaceSelector::new(axis, Side::Low),
        orientation: Orientation::identity(dim - 1),
    }
}

/// Axis-aligned boxes with uniform solution spaces of degree `k`.
pub fn boxes(
    k: usize,
    patches: &[(Vec<f64>, Vec<f64>, Vec<usize>)],
    interfaces: Vec<InterfaceFace>,
    alpha: Vec<f64>,
) -> MultiPatchDomain {
    let geo = patches
        .iter()
        .enumerate()
        .map(|(i, (lo, hi, _))| GeometryPatch::axis_box(i, lo, hi).unwrap())
        .collect();
    let spaces = patches
        .iter()
        .map(|(_, _, n)| TensorSplineSpace::uniform(k, n).unwrap())
        .collect();
    MultiPatchDomain::new(geo, spaces, interfaces, alpha).unwrap()
}

/// `[0,1]^2` as one patch.
pub fn unit_square(k: usize, n: usize) -> MultiPatchDomain {
    boxes(k, &[(vec![0.0, 0.0], vec![1.0, 1.0], vec![n, n])], vec![], vec![1.0])
}

/// `[0,1]x[0,1]` and `[1,2]x[0,1]` with element counts `nl` and `nr`.
pub fn two_squares(k: usize, nl: usize, nr: usize, alpha: [f64; 2]) -> MultiPatchDomain {
    boxes(
        k,
        &[
            (vec![0.0, 0.0], vec![1.0, 1.0], vec![nl, nl]),
            (vec![1.0, 0.0], vec![2.0, 1.0], vec![nr, nr]),
        ],
        vec![axis_interface(0, 1, 0, 2)],
        alpha.to_vec(),
    )
}

/// Coefficients reproducing `g` on every patch, assuming affine patches
/// (the quasi-interpolant is a projector, so in-space fields are exact).
pub fn interpolate(domain: &MultiPatchDomain, g: impl Fn(usize, &[f64]) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, space) in domain.solution_spaces().iter().enumerate() {
        let patch = domain.patch(i);
        let c = quasi_interpolate(space, |xhat| g(i, &patch.map_point(xhat).unwrap()));
        out.extend(c.values);
    }
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

use serde::{Deserialize, Serialize};

use crate::spline::{KnotVector, TensorSplineSpace};
use crate::{Error, Result, MAX_DIM};

const SINGULAR_DET: f64 = 1e-14;

/// Which end of a parametric axis a face sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Low,
    High,
}

impl Side {
    pub fn coordinate(self) -> f64 {
        match self {
            Side::Low => 0.0,
            Side::High => 1.0,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Side::Low => -1.0,
            Side::High => 1.0,
        }
    }
}

/// A face of the parametric cube: the set `xhat[axis] = side`.
///
/// Face coordinates are the remaining axes in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceSelector {
    pub axis: usize,
    pub side: Side,
}

impl FaceSelector {
    pub fn new(axis: usize, side: Side) -> Self {
        Self { axis, side }
    }

    /// All `2 d` faces of the `d`-cube.
    pub fn all(dim: usize) -> impl Iterator<Item = FaceSelector> {
        (0..dim).flat_map(|axis| [Side::Low, Side::High].map(|side| FaceSelector { axis, side }))
    }

    pub fn tangent_axes(&self, dim: usize) -> Vec<usize> {
        (0..dim).filter(|&a| a != self.axis).collect()
    }

    /// Volumetric parametric point of face point `t`.
    pub fn to_volume(&self, dim: usize, t: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; dim];
        x[self.axis] = self.side.coordinate();
        for (&a, &ti) in self.tangent_axes(dim).iter().zip(t) {
            x[a] = ti;
        }
        x
    }
}

/// Jacobian `J[r][c] = d x_r / d xhat_c` of a patch map at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub dim: usize,
    pub matrix: [[f64; MAX_DIM]; MAX_DIM],
    pub det: f64,
    pub inv_t: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jacobian {
    fn from_matrix(dim: usize, matrix: [[f64; MAX_DIM]; MAX_DIM]) -> Option<Self> {
        let m = &matrix;
        let (det, inv) = match dim {
            1 => (m[0][0], {
                let mut inv = [[0.0; MAX_DIM]; MAX_DIM];
                inv[0][0] = 1.0 / m[0][0];
                inv
            }),
            2 => {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let mut inv = [[0.0; MAX_DIM]; MAX_DIM];
                inv[0][0] = m[1][1] / det;
                inv[0][1] = -m[0][1] / det;
                inv[1][0] = -m[1][0] / det;
                inv[1][1] = m[0][0] / det;
                (det, inv)
            }
            _ => {
                let cof = |r: usize, c: usize| {
                    let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
                    let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
                    m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]
                };
                let det = m[0][0] * cof(0, 0) + m[0][1] * cof(0, 1) + m[0][2] * cof(0, 2);
                let mut inv = [[0.0; MAX_DIM]; MAX_DIM];
                for (r, row) in inv.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = cof(c, r) / det;
                    }
                }
                (det, inv)
            }
        };
        if det.abs() < SINGULAR_DET || !det.is_finite() {
            return None;
        }
        let mut inv_t = [[0.0; MAX_DIM]; MAX_DIM];
        for r in 0..dim {
            for c in 0..dim {
                inv_t[r][c] = inv[c][r];
            }
        }
        Some(Self {
            dim,
            matrix,
            det,
            inv_t,
        })
    }

    /// Physical gradient `J^{-T} grad_hat`.
    #[inline]
    pub fn push_gradient(&self, grad_hat: &[f64; MAX_DIM]) -> [f64; MAX_DIM] {
        let mut g = [0.0; MAX_DIM];
        for r in 0..self.dim {
            for c in 0..self.dim {
                g[r] += self.inv_t[r][c] * grad_hat[c];
            }
        }
        g
    }

    /// Outward unit normal and surface measure factor of `face` at this point
    /// (Nanson: `ds = |det J| |J^{-T} e_axis| dshat`).
    pub fn face_normal(&self, face: FaceSelector) -> Option<FaceNormal> {
        let mut e = [0.0; MAX_DIM];
        e[face.axis] = face.side.sign();
        let g = self.push_gradient(&e);
        let len = g[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        if len < SINGULAR_DET || !len.is_finite() {
            return None;
        }
        let mut normal = [0.0; MAX_DIM];
        for (n, gi) in normal.iter_mut().zip(&g).take(self.dim) {
            *n = gi / len;
        }
        Some(FaceNormal {
            normal,
            surface_factor: self.det.abs() * len,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceNormal {
    pub normal: [f64; MAX_DIM],
    pub surface_factor: f64,
}

/// One patch parametrization `x = sum_j C_j B_j(xhat)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryPatch {
    pub id: usize,
    pub space: TensorSplineSpace,
    /// `dim` coordinates per basis function, basis-major.
    pub control_points: Vec<f64>,
}

impl GeometryPatch {
    pub fn new(id: usize, space: TensorSplineSpace, control_points: Vec<f64>) -> Result<Self> {
        let expected = space.num_basis() * space.dim();
        if control_points.len() != expected {
            return Err(Error::CoefficientLength {
                expected,
                got: control_points.len(),
            });
        }
        if control_points.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateGeometry {
                patch: id,
                reason: "non-finite control point".into(),
            });
        }
        Ok(Self {
            id,
            space,
            control_points,
        })
    }

    /// Multilinear map of `[0,1]^d` onto the axis-aligned box `[lo, hi]`.
    pub fn axis_box(id: usize, lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        let space = TensorSplineSpace::new(vec![KnotVector::uniform(1, 1)?; dim])?;
        let mut cps = Vec::with_capacity(dim << dim);
        for j in 0..(1usize << dim) {
            for a in 0..dim {
                cps.push(if (j >> a) & 1 == 1 { hi[a] } else { lo[a] });
            }
        }
        Self::new(id, space, cps)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn control_point(&self, j: usize) -> &[f64] {
        let d = self.dim();
        &self.control_points[j * d..(j + 1) * d]
    }

    pub fn map_point(&self, xhat: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let b = self.space.eval(xhat, 0)?;
        let mut x = vec![0.0; d];
        for (&j, &v) in b.indices.iter().zip(&b.values) {
            for (a, xa) in x.iter_mut().enumerate() {
                *xa += self.control_points[j * d + a] * v;
            }
        }
        Ok(x)
    }

    /// Image point and Jacobian in one basis evaluation.
    pub fn map_with_jacobian(&self, xhat: &[f64]) -> Result<(Vec<f64>, Jacobian)> {
        let d = self.dim();
        let b = self.space.eval(xhat, 1)?;
        let mut x = vec![0.0; d];
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for ((&j, &v), g) in b.indices.iter().zip(&b.values).zip(&b.grads) {
            let cp = &self.control_points[j * d..(j + 1) * d];
            for r in 0..d {
                x[r] += cp[r] * v;
                for c in 0..d {
                    m[r][c] += cp[r] * g[c];
                }
            }
        }
        let jac = Jacobian::from_matrix(d, m).ok_or_else(|| Error::DegenerateGeometry {
            patch: self.id,
            reason: format!("singular Jacobian at {xhat:?}"),
        })?;
        Ok((x, jac))
    }

    pub fn jacobian(&self, xhat: &[f64]) -> Result<Jacobian> {
        self.map_with_jacobian(xhat).map(|(_, j)| j)
    }

    /// Outward normal of `face` at face coordinates `t`.
    pub fn face_normal(&self, face: FaceSelector, t: &[f64]) -> Result<FaceNormal> {
        let xhat = face.to_volume(self.dim(), t);
        self.jacobian(&xhat)?
            .face_normal(face)
            .ok_or_else(|| Error::DegenerateGeometry {
                patch: self.id,
                reason: format!("degenerate face tangent at {xhat:?}"),
            })
    }

    /// Min and max of `|det J|` on an `n^d` grid including the cube corners.
    pub fn jacobian_bounds(&self, n: usize) -> Result<(f64, f64)> {
        let d = self.dim();
        let n = n.max(2);
        let mut bounds = (f64::INFINITY, 0.0f64);
        for flat in 0..n.pow(d as u32) {
            let idx = crate::spline::unflatten(flat, &vec![n; d]);
            let x: Vec<f64> = idx.iter().map(|&i| i as f64 / (n - 1) as f64).collect();
            let det = self.jacobian(&x)?.det.abs();
            bounds.0 = bounds.0.min(det);
            bounds.1 = bounds.1.max(det);
        }
        Ok(bounds)
    }

    /// Axis-aligned box containing the patch (convex hull of the control net).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for cp in self.control_points.chunks(d) {
            for a in 0..d {
                lo[a] = lo[a].min(cp[a]);
                hi[a] = hi[a].max(cp[a]);
            }
        }
        (lo, hi)
    }

    /// Newton inversion of the patch map; `Some(xhat)` when `x` is the image
    /// of a parametric point.
    pub fn locate(&self, x: &[f64], tol: f64) -> Option<Vec<f64>> {
        let d = self.dim();
        let starts = 3usize;
        for flat in 0..starts.pow(d as u32) {
            let idx = crate::spline::unflatten(flat, &vec![starts; d]);
            let mut xhat: Vec<f64> = idx.iter().map(|&i| (i as f64 + 0.5) / starts as f64).collect();
            for _ in 0..50 {
                let Ok((y, jac)) = self.map_with_jacobian(&xhat) else {
                    break;
                };
                let res: Vec<f64> = (0..d).map(|a| y[a] - x[a]).collect();
                let norm = res.iter().map(|r| r * r).sum::<f64>().sqrt();
                if norm < tol {
                    return Some(xhat);
                }
                // xhat -= J^{-1} res, J^{-1} = inv_t^T
                for c in 0..d {
                    let step: f64 = (0..d).map(|r| jac.inv_t[r][c] * res[r]).sum();
                    xhat[c] = (xhat[c] - step).clamp(0.0, 1.0);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Biquadratic B-spline quarter annulus (inner radius 1, outer 2), radial
    /// direction along axis 0, angle along axis 1. Corner control points lie
    /// on the circles; the middle angular control point sits at (r, r).
    pub(crate) fn quarter_annulus() -> GeometryPatch {
        let space = TensorSplineSpace::uniform(2, &[1, 1]).unwrap();
        let mut cps = Vec::new();
        for (ang_x, ang_y) in [(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
            for r in [1.0, 1.5, 2.0] {
                cps.push(r * ang_x);
                cps.push(r * ang_y);
            }
        }
        GeometryPatch::new(0, space, cps).unwrap()
    }

    /// De Casteljau evaluation of the same annulus for an independent check.
    fn annulus_bezier(u: f64, v: f64) -> [f64; 2] {
        let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        let curve = |r: f64| {
            let p = [[r, 0.0], [r, r], [0.0, r]];
            let q0 = lerp(p[0], p[1], v);
            let q1 = lerp(p[1], p[2], v);
            lerp(q0, q1, v)
        };
        lerp(curve(1.0), curve(2.0), u)
    }

    #[test]
    fn identity_box_corners_and_midpoint() {
        let p = GeometryPatch::axis_box(0, &[-0.5, -0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(p.map_point(&[0.0, 0.0]).unwrap(), vec![-0.5, -0.5]);
        assert_eq!(p.map_point(&[0.5, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn annulus_matches_de_casteljau() {
        let p = quarter_annulus();
        let x = p.map_point(&[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!((x[0] * x[0] + x[1] * x[1]).sqrt(), 1.0, epsilon = 1e-15);
        for (u, v) in [(0.0, 0.0), (0.3, 0.7), (1.0, 0.5), (0.25, 1.0)] {
            let x = p.map_point(&[u, v]).unwrap();
            let y = annulus_bezier(u, v);
            assert_abs_diff_eq!(x[0], y[0], epsilon = 1e-14);
            assert_abs_diff_eq!(x[1], y[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn affine_jacobians() {
        let p = GeometryPatch::axis_box(0, &[0.0, 0.0], &[3.0, 0.5]).unwrap();
        let j = p.jacobian(&[0.2, 0.9]).unwrap();
        assert_abs_diff_eq!(j.matrix[0][0], 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.matrix[1][1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(j.matrix[0][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.det, 1.5, epsilon = 1e-15);
        let unit = GeometryPatch::axis_box(0, &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        let j = unit.jacobian(&[0.5, 0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(j.det, 1.0, epsilon = 1e-15);
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(j.matrix[r][c], (r == c) as u8 as f64, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn annulus_jacobian_vs_finite_differences() {
        let p = quarter_annulus();
        let x0 = [0.5, 0.5];
        let j = p.jacobian(&x0).unwrap();
        let h = 1e-6;
        let mut fd = [[0.0; 2]; 2];
        for c in 0..2 {
            let mut xp = x0;
            let mut xm = x0;
            xp[c] += h;
            xm[c] -= h;
            let (a, b) = (p.map_point(&xp).unwrap(), p.map_point(&xm).unwrap());
            for r in 0..2 {
                fd[r][c] = (a[r] - b[r]) / (2.0 * h);
            }
        }
        let fd_det = fd[0][0] * fd[1][1] - fd[0][1] * fd[1][0];
        assert!(((j.det - fd_det) / fd_det).abs() < 1e-5);
        // J^T J^{-T} = I
        for r in 0..2 {
            for c in 0..2 {
                let v: f64 = (0..2).map(|m| j.matrix[m][r] * j.inv_t[m][c]).sum();
                assert_abs_diff_eq!(v, (r == c) as u8 as f64, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn singular_geometry_is_reported() {
        let space = TensorSplineSpace::uniform(1, &[1, 1]).unwrap();
        let flat = GeometryPatch::new(3, space, vec![0., 0., 1., 0., 0., 0., 1., 0.]).unwrap();
        assert!(matches!(
            flat.jacobian(&[0.5, 0.5]),
            Err(Error::DegenerateGeometry { patch: 3, .. })
        ));
    }

    #[test]
    fn box_face_normals() {
        let p = GeometryPatch::axis_box(0, &[-0.5, -0.5], &[0.5, 0.5]).unwrap();
        let n = p.face_normal(FaceSelector::new(1, Side::Low), &[0.3]).unwrap();
        assert_abs_diff_eq!(n.normal[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.normal[1], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.surface_factor, 1.0, epsilon = 1e-15);
        let b = GeometryPatch::axis_box(0, &[0.0, 0.0, 0.0], &[2.0, 3.0, 5.0]).unwrap();
        let n = b.face_normal(FaceSelector::new(0, Side::High), &[0.1, 0.2]).unwrap();
        assert_abs_diff_eq!(n.normal[0], 1.0, epsilon = 1e-15);
        // face area 15 on a unit parametric square
        assert_abs_diff_eq!(n.surface_factor, 15.0, epsilon = 1e-12);
    }

    #[test]
    fn curved_face_normal_vs_tangent_rotation() {
        let p = quarter_annulus();
        let face = FaceSelector::new(0, Side::High);
        let v = 0.37;
        let n = p.face_normal(face, &[v]).unwrap();
        let h = 1e-6;
        let a = p.map_point(&[1.0, v + h]).unwrap();
        let b = p.map_point(&[1.0, v - h]).unwrap();
        let t = [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)];
        let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
        // angle increases counterclockwise, so the outward normal is t rotated clockwise
        let expect = [t[1] / len, -t[0] / len];
        assert!((n.normal[0] - expect[0]).abs() < 1e-5);
        assert!((n.normal[1] - expect[1]).abs() < 1e-5);
        assert!((n.surface_factor - len).abs() < 1e-5 * len);
    }

    #[test]
    fn locate_inverts_map() {
        let p = quarter_annulus();
        let x = p.map_point(&[0.4, 0.6]).unwrap();
        let xhat = p.locate(&x, 1e-12).unwrap();
        assert_abs_diff_eq!(xhat[0], 0.4, epsilon = 1e-9);
        assert_abs_diff_eq!(xhat[1], 0.6, epsilon = 1e-9);
        assert!(p.locate(&[0.1, 0.1], 1e-12).is_none());
    }
}

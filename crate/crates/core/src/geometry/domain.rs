use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::patch::{FaceNormal, FaceSelector, GeometryPatch};
use crate::spline::TensorSplineSpace;
use crate::{Error, Result};

/// Correspondence between the face coordinates of the two sides of an
/// interface: right coordinate `q` equals left coordinate `permutation[q]`,
/// reversed (`t -> 1 - t`) when `flip[q]` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub permutation: Vec<usize>,
    pub flip: Vec<bool>,
}

impl Orientation {
    pub fn identity(face_dim: usize) -> Self {
        Self {
            permutation: (0..face_dim).collect(),
            flip: vec![false; face_dim],
        }
    }

    pub fn face_dim(&self) -> usize {
        self.permutation.len()
    }

    fn validate(&self, face_dim: usize) -> Result<()> {
        let mut seen = vec![false; face_dim];
        if self.permutation.len() != face_dim || self.flip.len() != face_dim {
            return Err(Error::Topology(format!(
                "orientation must act on {face_dim} face coordinates"
            )));
        }
        for &p in &self.permutation {
            if p >= face_dim || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Topology(format!(
                    "{:?} is not a permutation",
                    self.permutation
                )));
            }
        }
        Ok(())
    }

    pub fn to_right(&self, t_left: &[f64]) -> Vec<f64> {
        self.permutation
            .iter()
            .zip(&self.flip)
            .map(|(&p, &f)| if f { 1.0 - t_left[p] } else { t_left[p] })
            .collect()
    }

    pub fn to_left(&self, t_right: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; t_right.len()];
        for (q, (&p, &f)) in self.permutation.iter().zip(&self.flip).enumerate() {
            t[p] = if f { 1.0 - t_right[q] } else { t_right[q] };
        }
        t
    }

    /// Right face axis matching left face axis `p`, and whether it is flipped.
    pub fn right_axis_of(&self, p: usize) -> (usize, bool) {
        let q = self.permutation.iter().position(|&x| x == p).expect("permutation");
        (q, self.flip[q])
    }
}

/// A full patch face shared by two patches. The interface normal is the outward
/// normal of the left patch, pointing into the right patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceFace {
    pub left_patch: usize,
    pub right_patch: usize,
    pub left_face: FaceSelector,
    pub right_face: FaceSelector,
    pub orientation: Orientation,
}

impl InterfaceFace {
    /// The same interface seen from the other side.
    pub fn reversed(&self) -> Self {
        let face_dim = self.orientation.face_dim();
        let mut permutation = vec![0; face_dim];
        let mut flip = vec![false; face_dim];
        for (q, (&p, &f)) in self
            .orientation
            .permutation
            .iter()
            .zip(&self.orientation.flip)
            .enumerate()
        {
            permutation[p] = q;
            flip[p] = f;
        }
        Self {
            left_patch: self.right_patch,
            right_patch: self.left_patch,
            left_face: self.right_face,
            right_face: self.left_face,
            orientation: Orientation { permutation, flip },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryFace {
    pub patch: usize,
    pub face: FaceSelector,
}

#[derive(Debug, Clone, Copy)]
pub enum FaceRef<'a> {
    Interface(&'a InterfaceFace),
    Boundary(&'a BoundaryFace),
}

/// Outcome of [`MultiPatchDomain::verify_interface`].
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceCheck {
    pub passed: bool,
    pub max_mismatch: f64,
    /// Left face coordinates of the worst sample.
    pub worst_sample: Vec<f64>,
}

/// Patches, their solution spaces, topology and per-patch diffusion.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPatchDomain {
    dim: usize,
    patches: Vec<GeometryPatch>,
    solution_spaces: Vec<TensorSplineSpace>,
    interfaces: Vec<InterfaceFace>,
    boundary_faces: Vec<BoundaryFace>,
    alpha: Vec<f64>,
}

/// Relative tolerance of the geometric coincidence check.
pub const INTERFACE_TOL: f64 = 1e-10;

impl MultiPatchDomain {
    /// Builds the domain; every patch face not claimed by an interface becomes
    /// a Dirichlet boundary face.
    pub fn new(
        patches: Vec<GeometryPatch>,
        solution_spaces: Vec<TensorSplineSpace>,
        interfaces: Vec<InterfaceFace>,
        alpha: Vec<f64>,
    ) -> Result<Self> {
        let n = patches.len();
        if n == 0 {
            return Err(Error::Topology("no patches".into()));
        }
        let dim = patches[0].dim();
        if !(2..=3).contains(&dim) {
            return Err(Error::Topology(format!("dimension {dim} not in {{2, 3}}")));
        }
        if patches.iter().any(|p| p.dim() != dim) || solution_spaces.iter().any(|s| s.dim() != dim) {
            return Err(Error::Topology("mixed patch dimensions".into()));
        }
        if solution_spaces.len() != n || alpha.len() != n {
            return Err(Error::Topology(format!(
                "{n} patches but {} solution spaces and {} coefficients",
                solution_spaces.len(),
                alpha.len()
            )));
        }
        let k = solution_spaces[0].degree();
        if solution_spaces.iter().any(|s| s.degree() != k) {
            return Err(Error::InvalidSpace("all patches must share one degree".into()));
        }
        for (patch, &value) in alpha.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveAlpha { patch, value });
            }
        }
        let mut claimed = HashSet::new();
        for (i, f) in interfaces.iter().enumerate() {
            if f.left_patch >= n || f.right_patch >= n || f.left_patch == f.right_patch {
                return Err(Error::Topology(format!(
                    "interface {i} joins patches {} and {}",
                    f.left_patch, f.right_patch
                )));
            }
            for face in [f.left_face, f.right_face] {
                if face.axis >= dim {
                    return Err(Error::Topology(format!("interface {i}: face axis {}", face.axis)));
                }
            }
            f.orientation.validate(dim - 1)?;
            for key in [(f.left_patch, f.left_face), (f.right_patch, f.right_face)] {
                if !claimed.insert(key) {
                    return Err(Error::Topology(format!(
                        "face {:?} of patch {} is claimed twice (only full-face interfaces are supported)",
                        key.1, key.0
                    )));
                }
            }
        }
        let boundary_faces = (0..n)
            .flat_map(|patch| FaceSelector::all(dim).map(move |face| BoundaryFace { patch, face }))
            .filter(|b| !claimed.contains(&(b.patch, b.face)))
            .collect();
        Ok(Self {
            dim,
            patches,
            solution_spaces,
            interfaces,
            boundary_faces,
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn patches(&self) -> &[GeometryPatch] {
        &self.patches
    }

    pub fn patch(&self, i: usize) -> &GeometryPatch {
        &self.patches[i]
    }

    pub fn solution_spaces(&self) -> &[TensorSplineSpace] {
        &self.solution_spaces
    }

    pub fn solution_space(&self, i: usize) -> &TensorSplineSpace {
        &self.solution_spaces[i]
    }

    pub fn interfaces(&self) -> &[InterfaceFace] {
        &self.interfaces
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn degree(&self) -> usize {
        self.solution_spaces[0].degree()
    }

    /// Parametric mesh size `h_i` (largest element edge) of patch `i`.
    pub fn mesh_size(&self, i: usize) -> f64 {
        self.solution_spaces[i].h_max()
    }

    pub fn h_max(&self) -> f64 {
        (0..self.num_patches()).map(|i| self.mesh_size(i)).fold(0.0, f64::max)
    }

    pub fn with_alpha(&self, alpha: Vec<f64>) -> Result<Self> {
        Self::new(
            self.patches.clone(),
            self.solution_spaces.clone(),
            self.interfaces.clone(),
            alpha,
        )
    }

    pub fn with_solution_spaces(&self, spaces: Vec<TensorSplineSpace>) -> Result<Self> {
        Self::new(self.patches.clone(), spaces, self.interfaces.clone(), self.alpha.clone())
    }

    /// Diagonal of the bounding box of all control nets.
    pub fn diameter(&self) -> f64 {
        let d = self.dim;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in &self.patches {
            let (l, h) = p.bounding_box();
            for a in 0..d {
                lo[a] = lo[a].min(l[a]);
                hi[a] = hi[a].max(h[a]);
            }
        }
        lo.iter().zip(&hi).map(|(l, h)| (h - l).powi(2)).sum::<f64>().sqrt()
    }

    /// Unit normal and surface factor at face coordinates `t`. For interfaces
    /// `t` is in left face coordinates and the normal points left to right.
    pub fn face_normal(&self, face: FaceRef<'_>, t: &[f64]) -> Result<FaceNormal> {
        match face {
            FaceRef::Interface(f) => self.patches[f.left_patch].face_normal(f.left_face, t),
            FaceRef::Boundary(b) => self.patches[b.patch].face_normal(b.face, t),
        }
    }

    /// Compares both parametrizations at `samples^(d-1)` orientation-mapped
    /// face points.
    pub fn verify_interface(&self, face: &InterfaceFace, samples: usize) -> Result<InterfaceCheck> {
        if samples < 2 {
            return Err(Error::domain(samples as f64, "samples >= 2"));
        }
        let fd = self.dim - 1;
        let left = &self.patches[face.left_patch];
        let right = &self.patches[face.right_patch];
        let mut check = InterfaceCheck {
            passed: true,
            max_mismatch: 0.0,
            worst_sample: vec![0.0; fd],
        };
        for flat in 0..samples.pow(fd as u32) {
            let idx = crate::spline::unflatten(flat, &vec![samples; fd]);
            let t: Vec<f64> = idx.iter().map(|&i| i as f64 / (samples - 1) as f64).collect();
            let xl = left.map_point(&face.left_face.to_volume(self.dim, &t))?;
            let tr = face.orientation.to_right(&t);
            let xr = right.map_point(&face.right_face.to_volume(self.dim, &tr))?;
            let dist = xl.iter().zip(&xr).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if dist > check.max_mismatch {
                check.max_mismatch = dist;
                check.worst_sample = t;
            }
        }
        check.passed = check.max_mismatch < INTERFACE_TOL * self.diameter();
        Ok(check)
    }

    pub fn verify_interfaces(&self, samples: usize) -> Result<()> {
        for (index, face) in self.interfaces.iter().enumerate() {
            let check = self.verify_interface(face, samples)?;
            if !check.passed {
                return Err(Error::InterfaceMismatch {
                    index,
                    mismatch: check.max_mismatch,
                    at: check.worst_sample,
                });
            }
        }
        Ok(())
    }

    /// Spot check that no patch interior point lies inside another patch.
    pub fn check_non_overlap(&self, samples: usize) -> Result<()> {
        let d = self.dim;
        let tol = 1e-12 * self.diameter();
        let margin = 1e-8;
        for i in 0..self.num_patches() {
            let (lo_i, hi_i) = self.patches[i].bounding_box();
            for j in 0..self.num_patches() {
                if i == j {
                    continue;
                }
                let (lo_j, hi_j) = self.patches[j].bounding_box();
                let disjoint = (0..d).any(|a| hi_i[a].min(hi_j[a]) - lo_i[a].max(lo_j[a]) <= tol);
                if disjoint {
                    continue;
                }
                for flat in 0..samples.pow(d as u32) {
                    let idx = crate::spline::unflatten(flat, &vec![samples; d]);
                    let xhat: Vec<f64> = idx.iter().map(|&m| (m as f64 + 0.5) / samples as f64).collect();
                    let x = self.patches[i].map_point(&xhat)?;
                    if let Some(y) = self.patches[j].locate(&x, tol) {
                        if y.iter().all(|&v| v > margin && v < 1.0 - margin) {
                            return Err(Error::Overlap(i, j));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks `0 < min |det J|` and `max / min <= bound` on `n^d` samples.
    pub fn check_jacobians(&self, n: usize, bound: f64) -> Result<()> {
        for p in &self.patches {
            let (lo, hi) = p.jacobian_bounds(n)?;
            if lo <= 0.0 || hi / lo > bound {
                return Err(Error::DegenerateGeometry {
                    patch: p.id,
                    reason: format!("|det J| ranges over [{lo:.3e}, {hi:.3e}]"),
                });
            }
        }
        Ok(())
    }

    /// Halves every solution-space knot span; geometry is untouched.
    pub fn refine_dyadic(&self) -> Self {
        Self {
            solution_spaces: self.solution_spaces.iter().map(TensorSplineSpace::refine_dyadic).collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::patch::Side;
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn two_squares(flip: bool) -> MultiPatchDomain {
        let left = GeometryPatch::axis_box(0, &[-1.0, 0.0], &[0.0, 1.0]).unwrap();
        let right = GeometryPatch::axis_box(1, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let face = InterfaceFace {
            left_patch: 0,
            right_patch: 1,
            left_face: FaceSelector::new(0, Side::High),
            right_face: FaceSelector::new(0, Side::Low),
            orientation: Orientation {
                permutation: vec![0],
                flip: vec![flip],
            },
        };
        let spaces = vec![
            TensorSplineSpace::uniform(2, &[2, 2]).unwrap(),
            TensorSplineSpace::uniform(2, &[3, 3]).unwrap(),
        ];
        MultiPatchDomain::new(vec![left, right], spaces, vec![face], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn boundary_faces_are_the_unclaimed_ones() {
        let d = two_squares(false);
        assert_eq!(d.boundary_faces().len(), 6);
        assert!(!d
            .boundary_faces()
            .iter()
            .any(|b| b.patch == 0 && b.face == FaceSelector::new(0, Side::High)));
    }

    #[test]
    fn interface_verification() {
        let ok = two_squares(false);
        let check = ok.verify_interface(&ok.interfaces()[0], 5).unwrap();
        assert!(check.passed);
        assert_eq!(check.max_mismatch, 0.0);
        let bad = two_squares(true);
        let check = bad.verify_interface(&bad.interfaces()[0], 5).unwrap();
        assert!(!check.passed);
        assert!(check.max_mismatch > 0.5);
        assert!(matches!(bad.verify_interfaces(5), Err(Error::InterfaceMismatch { .. })));
        assert!(ok.verify_interface(&ok.interfaces()[0], 1).is_err());
    }

    #[test]
    fn interface_normal_points_left_to_right() {
        let d = two_squares(false);
        let f = &d.interfaces()[0];
        let n = d.face_normal(FaceRef::Interface(f), &[0.4]).unwrap();
        assert_abs_diff_eq!(n.normal[0], 1.0, epsilon = 1e-15);
        let rev = f.reversed();
        let t_right = f.orientation.to_right(&[0.4]);
        let m = d.face_normal(FaceRef::Interface(&rev), &t_right).unwrap();
        for a in 0..2 {
            assert_abs_diff_eq!(n.normal[a], -m.normal[a], epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_topology() {
        let d = two_squares(false);
        let mut faces = d.interfaces().to_vec();
        faces.push(faces[0].clone());
        assert!(matches!(
            MultiPatchDomain::new(d.patches().to_vec(), d.solution_spaces().to_vec(), faces, vec![1.0, 1.0]),
            Err(Error::Topology(_))
        ));
        assert!(matches!(
            d.with_alpha(vec![1.0, 0.0]),
            Err(Error::NonPositiveAlpha { patch: 1, .. })
        ));
    }

    #[test]
    fn overlap_detection() {
        assert!(two_squares(false).check_non_overlap(4).is_ok());
        let a = GeometryPatch::axis_box(0, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let b = GeometryPatch::axis_box(1, &[0.5, 0.5], &[1.5, 1.5]).unwrap();
        let spaces = vec![TensorSplineSpace::uniform(1, &[1, 1]).unwrap(); 2];
        let d = MultiPatchDomain::new(vec![a, b], spaces, vec![], vec![1.0, 1.0]).unwrap();
        assert!(matches!(d.check_non_overlap(4), Err(Error::Overlap(_, _))));
    }

    #[test]
    fn refinement_keeps_geometry_and_halves_h() {
        let d = two_squares(false);
        let r = d.refine_dyadic();
        assert_eq!(r.patches(), d.patches());
        assert_abs_diff_eq!(r.mesh_size(0), 0.5 * d.mesh_size(0), epsilon = 1e-14);
        assert_eq!(r.refine_dyadic().solution_space(0).elements_per_axis(), vec![8, 8]);
        assert_abs_diff_eq!(r.h_max(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn refined_space_contains_coarse_space() {
        // knot insertion oracle: a coarse spline lies in the refined space, so
        // its quasi-interpolant there reproduces it pointwise
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let coarse = TensorSplineSpace::uniform(2, &[2, 3]).unwrap();
        let fine = coarse.refine_dyadic();
        let c: Vec<f64> = (0..coarse.num_basis()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = crate::spline::SplineCoefficients::scalar(&coarse, c).unwrap();
        let f = crate::spline::quasi_interpolate(&fine, |x| s.evaluate(&coarse, x).unwrap()[0]);
        for _ in 0..100 {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let a = s.evaluate(&coarse, &x).unwrap()[0];
            let b = f.evaluate(&fine, &x).unwrap()[0];
            assert!((a - b).abs() < 1e-12);
        }
    }
}

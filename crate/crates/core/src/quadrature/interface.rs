//! Merged segmentation of non-matching interface meshes.
//!
//! The two sides of an interface carry independent tensor meshes. Their
//! traces on the shared face are merged into the common refinement so that
//! every integration cell lies inside exactly one element of each side and
//! the face integrals become sums over these micro-element edges.

use super::element::box_rule;
use crate::geometry::InterfaceFace;
use crate::spline::TensorSplineSpace;
use crate::{Result, MAX_DIM};

const MERGE_TOL: f64 = 1e-13;

/// One integration cell in left face coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceCell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub left_element: usize,
    pub right_element: usize,
}

impl FaceCell {
    pub fn measure(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSegmentation {
    pub face: InterfaceFace,
    pub dim: usize,
    /// Merged breakpoints along each left face axis.
    pub breakpoints: Vec<Vec<f64>>,
    pub cells: Vec<FaceCell>,
}

fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for v in all {
        match out.last() {
            Some(&last) if v - last <= MERGE_TOL => {}
            _ => out.push(v),
        }
    }
    out
}

/// Common refinement of both sides' face traces.
pub fn merge_interface(
    face: &InterfaceFace,
    left_space: &TensorSplineSpace,
    right_space: &TensorSplineSpace,
) -> Result<InterfaceSegmentation> {
    let d = left_space.dim();
    let left_tangents = face.left_face.tangent_axes(d);
    let right_tangents = face.right_face.tangent_axes(d);
    let breakpoints: Vec<Vec<f64>> = (0..d - 1)
        .map(|p| {
            let left = left_space.axis(left_tangents[p]).breakpoints();
            let (q, flip) = face.orientation.right_axis_of(p);
            let right: Vec<f64> = right_space
                .axis(right_tangents[q])
                .breakpoints()
                .into_iter()
                .map(|b| if flip { 1.0 - b } else { b })
                .collect();
            merge_sorted(&left, &right)
        })
        .collect();
    let segments: Vec<usize> = breakpoints.iter().map(|b| b.len() - 1).collect();
    let mut cells = Vec::with_capacity(segments.iter().product());
    for flat in 0..segments.iter().product::<usize>() {
        let idx = crate::spline::unflatten(flat, &segments);
        let lo: Vec<f64> = idx.iter().zip(&breakpoints).map(|(&i, b)| b[i]).collect();
        let hi: Vec<f64> = idx.iter().zip(&breakpoints).map(|(&i, b)| b[i + 1]).collect();
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let left_element = left_space.find_element(&face.left_face.to_volume(d, &mid))?;
        let right_mid = face.orientation.to_right(&mid);
        let right_element = right_space.find_element(&face.right_face.to_volume(d, &right_mid))?;
        cells.push(FaceCell {
            lo,
            hi,
            left_element,
            right_element,
        });
    }
    Ok(InterfaceSegmentation {
        face: face.clone(),
        dim: d,
        breakpoints,
        cells,
    })
}

/// Face Gauss points in both sides' volumetric parametric coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceQuadrature {
    pub left_points: Vec<[f64; MAX_DIM]>,
    pub right_points: Vec<[f64; MAX_DIM]>,
    /// Left face coordinates of each point.
    pub face_points: Vec<[f64; MAX_DIM]>,
    /// Parametric cell measure times Gauss weight.
    pub weights: Vec<f64>,
    pub cells: Vec<usize>,
}

impl FaceQuadrature {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

pub fn face_quadrature(seg: &InterfaceSegmentation, n_per_axis: usize) -> Result<FaceQuadrature> {
    let d = seg.dim;
    let mut out = FaceQuadrature {
        left_points: vec![],
        right_points: vec![],
        face_points: vec![],
        weights: vec![],
        cells: vec![],
    };
    let to_array = |v: Vec<f64>| {
        let mut a = [0.0; MAX_DIM];
        a[..v.len()].copy_from_slice(&v);
        a
    };
    for (c, cell) in seg.cells.iter().enumerate() {
        let (pts, wts) = box_rule(&cell.lo, &cell.hi, n_per_axis)?;
        for (t, w) in pts.into_iter().zip(wts) {
            let t = &t[..d - 1];
            let tr = seg.face.orientation.to_right(t);
            out.left_points.push(to_array(seg.face.left_face.to_volume(d, t)));
            out.right_points.push(to_array(seg.face.right_face.to_volume(d, &tr)));
            out.face_points.push(to_array(t.to_vec()));
            out.weights.push(w);
            out.cells.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FaceSelector, Orientation, Side};
    use crate::spline::KnotVector;
    use approx::assert_abs_diff_eq;

    fn x_interface(face_dim: usize, flip: bool) -> InterfaceFace {
        InterfaceFace {
            left_patch: 0,
            right_patch: 1,
            left_face: FaceSelector::new(0, Side::High),
            right_face: FaceSelector::new(0, Side::Low),
            orientation: Orientation {
                permutation: (0..face_dim).collect(),
                flip: vec![flip; face_dim],
            },
        }
    }

    #[test]
    fn matching_meshes() {
        let s2 = TensorSplineSpace::uniform(2, &[3, 2]).unwrap();
        let seg = merge_interface(&x_interface(1, false), &s2, &s2).unwrap();
        assert_eq!(seg.cells.len(), 2);
        let s3 = TensorSplineSpace::uniform(1, &[1, 2, 2]).unwrap();
        let seg = merge_interface(&x_interface(2, false), &s3, &s3).unwrap();
        assert_eq!(seg.cells.len(), 4);
        let q = face_quadrature(&seg, 2).unwrap();
        for (l, r) in q.left_points.iter().zip(&q.right_points) {
            assert_eq!(l[1..], r[1..]);
            assert_eq!((l[0], r[0]), (1.0, 0.0));
        }
    }

    #[test]
    fn halves_against_thirds() {
        let left = TensorSplineSpace::uniform(2, &[2, 2]).unwrap();
        let right = TensorSplineSpace::uniform(2, &[3, 3]).unwrap();
        let seg = merge_interface(&x_interface(1, false), &left, &right).unwrap();
        let expect = [0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0];
        assert_eq!(seg.cells.len(), 4);
        for (b, e) in seg.breakpoints[0].iter().zip(expect) {
            assert_abs_diff_eq!(*b, e, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(seg.cells.iter().map(FaceCell::measure).sum::<f64>(), 1.0, epsilon = 1e-14);
        assert_eq!(
            seg.cells.iter().map(|c| (c.left_element, c.right_element)).collect::<Vec<_>>(),
            vec![(1, 0), (1, 3), (3, 3), (3, 6)]
        );
        // Gauss points stay off both knot sets
        let q = face_quadrature(&seg, 3).unwrap();
        for t in &q.face_points {
            for bp in [vec![0.0, 0.5, 1.0], vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]] {
                assert!(bp.iter().all(|b| (t[0] - b).abs() > 1e-3));
            }
        }
    }

    #[test]
    fn flipped_orientation_maps_right_knots() {
        let left = TensorSplineSpace::uniform(1, &[1, 1]).unwrap();
        let knots = KnotVector::new(1, vec![0.0, 0.0, 0.25, 1.0, 1.0]).unwrap();
        let right = TensorSplineSpace::new(vec![KnotVector::uniform(1, 1).unwrap(), knots]).unwrap();
        let seg = merge_interface(&x_interface(1, true), &left, &right).unwrap();
        assert_eq!(seg.breakpoints[0], vec![0.0, 0.75, 1.0]);
        assert_eq!(seg.cells[0].right_element, 1);
        assert_eq!(seg.cells[1].right_element, 0);
    }

    #[test]
    fn refining_one_side_refines_the_segmentation() {
        let left = TensorSplineSpace::uniform(2, &[2, 2, 2]).unwrap();
        let right = TensorSplineSpace::uniform(2, &[3, 3, 3]).unwrap();
        let face = x_interface(2, false);
        let coarse = merge_interface(&face, &left, &right).unwrap();
        let fine = merge_interface(&face, &left.refine_dyadic(), &right).unwrap();
        for (c, f) in coarse.breakpoints.iter().zip(&fine.breakpoints) {
            assert!(c.iter().all(|b| f.iter().any(|x| (x - b).abs() < 1e-15)));
        }
        assert!(fine.cells.len() > coarse.cells.len());
    }
}

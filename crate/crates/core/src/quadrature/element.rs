use super::gauss::gauss_rule;
use crate::geometry::FaceSelector;
use crate::spline::TensorSplineSpace;
use crate::{Error, Result, MAX_DIM};

/// Tensor Gauss points of one parametric element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementQuadrature {
    pub element: usize,
    pub points: Vec<[f64; MAX_DIM]>,
    /// Include the parametric element measure.
    pub weights: Vec<f64>,
}

/// Tensor rule over the box `[lo, hi]` (any dimension up to 3).
pub(crate) fn box_rule(lo: &[f64], hi: &[f64], n: usize) -> Result<(Vec<[f64; MAX_DIM]>, Vec<f64>)> {
    let rule = gauss_rule(n)?;
    let d = lo.len();
    let total = n.pow(d as u32);
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut q = [0usize; MAX_DIM];
    for _ in 0..total {
        let mut x = [0.0; MAX_DIM];
        let mut w = 1.0;
        for a in 0..d {
            let len = hi[a] - lo[a];
            x[a] = lo[a] + len * rule.points[q[a]];
            w *= len * rule.weights[q[a]];
        }
        points.push(x);
        weights.push(w);
        for qa in q.iter_mut().take(d) {
            *qa += 1;
            if *qa < n {
                break;
            }
            *qa = 0;
        }
    }
    Ok((points, weights))
}

/// `n_per_axis^d` Gauss points on element `element` of `space`.
pub fn element_quadrature(
    space: &TensorSplineSpace,
    element: usize,
    n_per_axis: usize,
) -> Result<ElementQuadrature> {
    if element >= space.num_elements() {
        return Err(Error::Index {
            index: element,
            limit: space.num_elements(),
        });
    }
    let (lo, hi) = space.element_box(element)?;
    let (points, weights) = box_rule(&lo, &hi, n_per_axis)?;
    Ok(ElementQuadrature {
        element,
        points,
        weights,
    })
}

/// Quadrature on a patch face split along the patch's own mesh trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    /// Volumetric parametric coordinates.
    pub points: Vec<[f64; MAX_DIM]>,
    /// Face coordinates of each point.
    pub face_points: Vec<[f64; MAX_DIM]>,
    /// Parametric face measure; the surface factor is applied by the caller.
    pub weights: Vec<f64>,
    pub elements: Vec<usize>,
}

pub fn boundary_face_quadrature(
    space: &TensorSplineSpace,
    face: FaceSelector,
    n_per_axis: usize,
) -> Result<BoundaryQuadrature> {
    let d = space.dim();
    let tangents = face.tangent_axes(d);
    let per_axis: Vec<usize> = tangents.iter().map(|&a| space.axis(a).num_elements()).collect();
    let normal_element = match face.side {
        crate::geometry::Side::Low => 0,
        crate::geometry::Side::High => space.axis(face.axis).num_elements() - 1,
    };
    let mut out = BoundaryQuadrature {
        points: vec![],
        face_points: vec![],
        weights: vec![],
        elements: vec![],
    };
    for flat in 0..per_axis.iter().product::<usize>() {
        let cell = crate::spline::unflatten(flat, &per_axis);
        let (lo, hi): (Vec<f64>, Vec<f64>) = cell
            .iter()
            .zip(&tangents)
            .map(|(&e, &a)| space.axis(a).element_bounds(e))
            .unzip();
        let mut multi = vec![0; d];
        multi[face.axis] = normal_element;
        for (&e, &a) in cell.iter().zip(&tangents) {
            multi[a] = e;
        }
        let element = space.element_flat(&multi);
        let (pts, wts) = box_rule(&lo, &hi, n_per_axis)?;
        for (t, w) in pts.into_iter().zip(wts) {
            let x = face.to_volume(d, &t[..d - 1]);
            let mut xa = [0.0; MAX_DIM];
            xa[..d].copy_from_slice(&x);
            out.points.push(xa);
            out.face_points.push(t);
            out.weights.push(w);
            out.elements.push(element);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Side;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_element_midpoint() {
        let s = TensorSplineSpace::uniform(1, &[1, 1]).unwrap();
        let q = element_quadrature(&s, 0, 1).unwrap();
        assert_eq!(q.points, vec![[0.5, 0.5, 0.0]]);
        assert_eq!(q.weights, vec![1.0]);
        assert!(element_quadrature(&s, 1, 1).is_err());
    }

    #[test]
    fn weights_partition_the_cube() {
        let s = TensorSplineSpace::uniform(2, &[2, 2]).unwrap();
        let total: f64 = (0..4)
            .map(|e| element_quadrature(&s, e, 3).unwrap().weights.iter().sum::<f64>())
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
        let s3 = TensorSplineSpace::uniform(1, &[2, 3, 1]).unwrap();
        let q = element_quadrature(&s3, 4, 2).unwrap();
        assert_eq!(q.points.len(), 8);
        assert_abs_diff_eq!(q.weights.iter().sum::<f64>(), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn squared_basis_function_vs_monte_carlo() {
        let s = TensorSplineSpace::uniform(2, &[3, 3]).unwrap();
        let j = s.basis_flat(&[2, 1]);
        let value = |x: &[f64]| {
            let b = s.eval(x, 0).unwrap();
            b.indices.iter().position(|&i| i == j).map_or(0.0, |p| b.values[p])
        };
        let mut quad = 0.0;
        for e in 0..s.num_elements() {
            let q = element_quadrature(&s, e, 3).unwrap();
            for (p, w) in q.points.iter().zip(&q.weights) {
                quad += w * value(&p[..2]).powi(2);
            }
        }
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let n = 1_000_000;
        let mc: f64 = (0..n)
            .map(|_| value(&[rng.gen::<f64>(), rng.gen::<f64>()]).powi(2))
            .sum::<f64>()
            / n as f64;
        assert!((quad - mc).abs() < 1e-3, "{quad} vs {mc}");
    }

    #[test]
    fn boundary_rule_covers_face() {
        let s = TensorSplineSpace::uniform(2, &[2, 3, 4]).unwrap();
        let q = boundary_face_quadrature(&s, FaceSelector::new(1, Side::High), 3).unwrap();
        assert_eq!(q.points.len(), 2 * 4 * 9);
        assert_abs_diff_eq!(q.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        assert!(q.points.iter().all(|p| p[1] == 1.0));
        for (p, &e) in q.points.iter().zip(&q.elements) {
            assert_eq!(s.find_element(&p[..3]).unwrap(), e);
        }
    }
}

//! Local quasi-interpolation onto a tensor spline space.
//!
//! Each coefficient is read off a local L2 projection of `f` onto the
//! polynomials of one element inside the basis function's support. Because
//! the `(k+1)^d` active B-splines span all of `Q_k` on that element, the map
//! reproduces every spline exactly and coefficient `j` only sees `f` on that
//! element.

use super::knots::KnotVector;
use super::tensor::{SplineCoefficients, TensorSplineSpace};
use crate::quadrature::gauss_rule;
use crate::solver::dense::solve_dense;
use crate::MAX_DIM;

/// Element of `kv` on which the coefficient functional of basis `j` lives:
/// the longest element in the support, ties broken toward the middle.
fn anchor_element(kv: &KnotVector, j: usize) -> usize {
    let k = kv.degree();
    let spans = kv.element_spans();
    let candidates: Vec<usize> = spans
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= j && s <= j + k)
        .map(|(e, _)| e)
        .collect();
    let len = |e: usize| {
        let (lo, hi) = kv.element_bounds(e);
        hi - lo
    };
    let longest = candidates.iter().map(|&e| len(e)).fold(0.0, f64::max);
    let best: Vec<usize> = candidates
        .into_iter()
        .filter(|&e| len(e) >= longest * (1.0 - 1e-12))
        .collect();
    best[(best.len() - 1) / 2]
}

/// Per-axis dual operator on one element: row `l` maps samples of `f` at the
/// element's Gauss points to the local coefficient of active function `l`.
struct AxisProjector {
    points: Vec<f64>,
    /// (k+1) x nq, row-major
    weights: Vec<f64>,
    first: usize,
}

fn axis_projector(kv: &KnotVector, e: usize) -> AxisProjector {
    let k = kv.degree();
    let n = k + 1;
    let rule = gauss_rule(n).expect("degree-bounded rule");
    let (lo, hi) = kv.element_bounds(e);
    let span = kv.element_spans()[e];
    let len = hi - lo;
    let points: Vec<f64> = rule.points.iter().map(|&p| lo + len * p).collect();
    let w: Vec<f64> = rule.weights.iter().map(|&w| w * len).collect();
    let evals: Vec<Vec<f64>> = points
        .iter()
        .map(|&x| kv.eval_basis_in_span(span, x, 0).ders[0].clone())
        .collect();
    let mut mass = vec![0.0; n * n];
    for (q, b) in evals.iter().enumerate() {
        for r in 0..n {
            for c in 0..n {
                mass[r * n + c] += w[q] * b[r] * b[c];
            }
        }
    }
    // columns of M^{-1} B W, one solve per quadrature point
    let nq = points.len();
    let mut weights = vec![0.0; n * nq];
    for q in 0..nq {
        let rhs: Vec<f64> = evals[q].iter().map(|b| b * w[q]).collect();
        let col = solve_dense(&mass, n, &rhs).expect("B-spline mass matrix is SPD");
        for l in 0..n {
            weights[l * nq + q] = col[l];
        }
    }
    AxisProjector {
        points,
        weights,
        first: span - k,
    }
}

/// Quasi-interpolant of the scalar field `f` on `[0,1]^d`.
pub fn quasi_interpolate<F>(space: &TensorSplineSpace, f: F) -> SplineCoefficients
where
    F: Fn(&[f64]) -> f64,
{
    let d = space.dim();
    let k = space.degree();
    let nq = k + 1;
    let anchors: Vec<Vec<usize>> = space
        .axes()
        .iter()
        .map(|kv| (0..kv.num_basis()).map(|j| anchor_element(kv, j)).collect())
        .collect();
    let projectors: Vec<Vec<AxisProjector>> = space
        .axes()
        .iter()
        .map(|kv| (0..kv.num_elements()).map(|e| axis_projector(kv, e)).collect())
        .collect();

    let mut cache: std::collections::HashMap<Vec<usize>, Vec<f64>> = Default::default();
    let mut values = vec![0.0; space.num_basis()];
    for (j, value) in values.iter_mut().enumerate() {
        let multi = space.basis_multi(j);
        let elem: Vec<usize> = (0..d).map(|a| anchors[a][multi[a]]).collect();
        let samples = cache.entry(elem.clone()).or_insert_with(|| {
            let total = nq.pow(d as u32);
            let mut out = Vec::with_capacity(total);
            let mut q = [0usize; MAX_DIM];
            let mut x = vec![0.0; d];
            for _ in 0..total {
                for a in 0..d {
                    x[a] = projectors[a][elem[a]].points[q[a]];
                }
                out.push(f(&x));
                for qa in q.iter_mut().take(d) {
                    *qa += 1;
                    if *qa < nq {
                        break;
                    }
                    *qa = 0;
                }
            }
            out
        });
        let local: Vec<usize> = (0..d)
            .map(|a| multi[a] - projectors[a][elem[a]].first)
            .collect();
        let mut acc = 0.0;
        let mut q = [0usize; MAX_DIM];
        for &sample in samples.iter() {
            let mut w = 1.0;
            for a in 0..d {
                w *= projectors[a][elem[a]].weights[local[a] * nq + q[a]];
            }
            acc += w * sample;
            for qa in q.iter_mut().take(d) {
                *qa += 1;
                if *qa < nq {
                    break;
                }
                *qa = 0;
            }
        }
        *value = acc;
    }
    SplineCoefficients {
        values,
        components: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn reproduces_constants() {
        let s = TensorSplineSpace::uniform(3, &[3, 5]).unwrap();
        let c = quasi_interpolate(&s, |_| 1.0);
        for v in c.values {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn linear_function_gives_greville_points() {
        let kv = KnotVector::new(2, vec![0., 0., 0., 0.5, 1., 1., 1.]).unwrap();
        let s = TensorSplineSpace::new(vec![kv]).unwrap();
        let c = quasi_interpolate(&s, |x| x[0]);
        for (got, want) in c.values.iter().zip([0.0, 0.25, 0.75, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn projector_on_random_splines() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let knots = KnotVector::new(2, vec![0., 0., 0., 0.2, 0.5, 0.5, 0.9, 1., 1., 1.]).unwrap();
        let spaces = [
            TensorSplineSpace::uniform(2, &[3, 4]).unwrap(),
            TensorSplineSpace::uniform(3, &[2, 2, 3]).unwrap(),
            TensorSplineSpace::new(vec![knots.clone(), KnotVector::uniform(2, 3).unwrap()]).unwrap(),
        ];
        for s in &spaces {
            let coeffs: Vec<f64> = (0..s.num_basis()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let spline = SplineCoefficients::scalar(s, coeffs.clone()).unwrap();
            let back = quasi_interpolate(s, |x| spline.evaluate(s, x).unwrap()[0]);
            let scale = coeffs.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for (a, b) in back.values.iter().zip(&coeffs) {
                assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn coefficients_are_local() {
        let s = TensorSplineSpace::uniform(2, &[6]).unwrap();
        let base = quasi_interpolate(&s, |x| x[0].sin());
        // perturb f on the last element only
        let bumped = quasi_interpolate(&s, |x| {
            x[0].sin() + if x[0] > 5.0 / 6.0 { 1.0 } else { 0.0 }
        });
        let kv = s.axis(0);
        for j in 0..kv.num_basis() {
            let support_hi = kv.knots()[j + 3];
            if support_hi <= 5.0 / 6.0 + 1e-14 {
                assert_eq!(base.values[j], bumped.values[j]);
            }
        }
    }
}

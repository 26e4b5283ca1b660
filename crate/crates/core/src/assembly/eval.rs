use crate::geometry::{Jacobian, MultiPatchDomain};
use crate::{Result, MAX_DIM};

/// Basis data of one patch at one parametric point.
#[derive(Debug, Clone)]
pub struct PointData {
    /// Global dof indices (patch offset applied).
    pub dofs: Vec<usize>,
    pub values: Vec<f64>,
    /// Physical gradients.
    pub grads: Vec<[f64; MAX_DIM]>,
    pub x: Vec<f64>,
    pub jac: Jacobian,
}

impl PointData {
    pub fn value(&self, coeffs: &[f64]) -> f64 {
        self.dofs.iter().zip(&self.values).map(|(&j, &b)| coeffs[j] * b).sum()
    }

    pub fn gradient(&self, coeffs: &[f64]) -> [f64; MAX_DIM] {
        let mut g = [0.0; MAX_DIM];
        for (&j, gb) in self.dofs.iter().zip(&self.grads) {
            for a in 0..MAX_DIM {
                g[a] += coeffs[j] * gb[a];
            }
        }
        g
    }
}

/// Space-local indices of the basis functions active on element `e`.
pub fn element_dofs(space: &crate::spline::TensorSplineSpace, e: usize) -> Vec<usize> {
    let (lo, hi) = space.element_box(e).expect("valid element");
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    space.eval_in_element(e, &mid, 0).indices
}

/// Solution basis of `patch` at `xhat`, using the one-sided basis of
/// `element`, with physical gradients.
pub fn evaluate_basis(
    domain: &MultiPatchDomain,
    offset: usize,
    patch: usize,
    element: usize,
    xhat: &[f64],
) -> Result<PointData> {
    let space = domain.solution_space(patch);
    let (x, jac) = domain.patch(patch).map_with_jacobian(xhat)?;
    let b = space.eval_in_element(element, xhat, 1);
    Ok(PointData {
        dofs: b.indices.iter().map(|j| j + offset).collect(),
        values: b.values,
        grads: b.grads.iter().map(|g| jac.push_gradient(g)).collect(),
        x,
        jac,
    })
}

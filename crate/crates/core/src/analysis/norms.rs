use rayon::prelude::*;

use crate::assembly::{evaluate_basis, Assembler, PatchField};
use crate::quadrature::element_quadrature;
use crate::{Error, Result, MAX_DIM};

/// Gradient data given per patch at physical points.
pub type GradField<'a> = dyn Fn(usize, &[f64]) -> [f64; MAX_DIM] + Sync + 'a;

/// Exact solution, its gradient and the Dirichlet data.
#[derive(Clone, Copy)]
pub struct ExactSolution<'a> {
    pub u: &'a PatchField<'a>,
    pub grad: &'a GradField<'a>,
    pub u_d: &'a PatchField<'a>,
}

/// Per-element integral of `g(patch, point, u_h, grad u_h)` summed in fixed order.
fn integrate_volume<G>(assembler: &Assembler<'_>, coeffs: &[f64], g: G) -> Result<f64>
where
    G: Fn(usize, &[f64], f64, &[f64; MAX_DIM]) -> f64 + Sync,
{
    let domain = assembler.domain();
    let d = domain.dim();
    let n = assembler.config().rhs_points(domain.degree());
    let mut total = 0.0;
    for patch in 0..domain.num_patches() {
        let offset = assembler.dofmap().offset(patch);
        let space = domain.solution_space(patch);
        let parts: Vec<Result<f64>> = (0..space.num_elements())
            .into_par_iter()
            .map(|e| {
                let q = element_quadrature(space, e, n)?;
                let mut acc = 0.0;
                for (p, w) in q.points.iter().zip(&q.weights) {
                    let pd = evaluate_basis(domain, offset, patch, e, &p[..d])?;
                    acc += w * pd.jac.det.abs() * g(patch, &pd.x, pd.value(coeffs), &pd.gradient(coeffs));
                }
                Ok(acc)
            })
            .collect();
        for part in parts {
            total += part?;
        }
    }
    Ok(total)
}

fn check_len(assembler: &Assembler<'_>, coeffs: &[f64]) -> Result<()> {
    let expected = assembler.dofmap().total_dofs();
    if coeffs.len() != expected {
        return Err(Error::CoefficientLength {
            expected,
            got: coeffs.len(),
        });
    }
    Ok(())
}

/// Broken dG norm of `u - u_h`:
/// `sum_i alpha_i ||grad(u - u_h)||^2 + sum_F sigma_F ||[u - u_h]||^2_F`,
/// with `u_D` as the outer trace on boundary faces.
pub fn dg_norm_error(assembler: &Assembler<'_>, coeffs: &[f64], exact: ExactSolution<'_>) -> Result<f64> {
    check_len(assembler, coeffs)?;
    let domain = assembler.domain();
    let d = domain.dim();
    let alpha = domain.alpha();
    let volume = integrate_volume(assembler, coeffs, |patch, x, _, gh| {
        let g = (exact.grad)(patch, x);
        alpha[patch] * (0..d).map(|a| (g[a] - gh[a]).powi(2)).sum::<f64>()
    })?;
    let mut faces = 0.0;
    let n = assembler.config().rhs_points(domain.degree());
    assembler.visit_faces(n, true, true, |block| {
        for pt in &block.points {
            let uh_jump: f64 = block.dofs.iter().zip(&pt.jump).map(|(&j, &v)| coeffs[j] * v).sum();
            let u_jump = match pt.right_patch {
                Some(r) => (exact.u)(pt.patch, &pt.x) - (exact.u)(r, &pt.x),
                None => (exact.u_d)(pt.patch, &pt.x),
            };
            faces += pt.ds * block.sigma * (u_jump - uh_jump).powi(2);
        }
    })?;
    Ok((volume + faces).sqrt())
}

/// Broken `L2` norm of `u - u_h`.
pub fn l2_error(assembler: &Assembler<'_>, coeffs: &[f64], u: &PatchField) -> Result<f64> {
    check_len(assembler, coeffs)?;
    integrate_volume(assembler, coeffs, |patch, x, uh, _| (u(patch, x) - uh).powi(2)).map(f64::sqrt)
}

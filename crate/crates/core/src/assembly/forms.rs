use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::config::{DgConfig, Scheme};
use super::eval::{evaluate_basis, PointData};
use super::pattern::build_pattern;
use crate::geometry::{FaceSelector, MultiPatchDomain};
use crate::quadrature::{
    boundary_face_quadrature, element_quadrature, face_quadrature, merge_interface, InterfaceSegmentation,
};
use crate::solver::{solve_general, solve_spd, CsrMatrix, SolveError, SolveReport, SolverOptions};
use crate::{Error, Result};

/// Scalar data given per patch: `field(patch, x)` at physical point `x`.
pub type PatchField<'a> = dyn Fn(usize, &[f64]) -> f64 + Sync + 'a;

const ELEMENT_CHUNK: usize = 256;

/// Contiguous, disjoint dof blocks, one per patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    offsets: Vec<usize>,
}

impl DofMap {
    pub fn new(domain: &MultiPatchDomain) -> Self {
        let mut offsets = vec![0];
        for s in domain.solution_spaces() {
            offsets.push(offsets.last().unwrap() + s.num_basis());
        }
        Self { offsets }
    }

    pub fn offset(&self, patch: usize) -> usize {
        self.offsets[patch]
    }

    pub fn range(&self, patch: usize) -> std::ops::Range<usize> {
        self.offsets[patch]..self.offsets[patch + 1]
    }

    pub fn total_dofs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn num_patches(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

#[derive(Debug, Clone)]
pub struct DgSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofmap: DofMap,
    pub scheme: Scheme,
}

impl DgSystem {
    /// CG for SIP, BiCGStab for IIP.
    pub fn solve(&self, opts: &SolverOptions) -> Result<(Vec<f64>, SolveReport), SolveError> {
        match self.scheme {
            Scheme::Sip => solve_spd(&self.matrix, &self.rhs, opts),
            Scheme::Iip => solve_general(&self.matrix, &self.rhs, opts),
        }
    }
}

/// One face quadrature point with the traces of every dof in the block.
pub(crate) struct FacePoint {
    /// `[phi]` per block dof.
    pub jump: Vec<f64>,
    /// `{alpha grad phi} . n` per block dof.
    pub flux: Vec<f64>,
    pub ds: f64,
    pub x: Vec<f64>,
    pub patch: usize,
    /// `None` on boundary faces.
    pub right_patch: Option<usize>,
}

/// All points of one face cell, sharing the dof list and penalty weight.
pub(crate) struct FaceBlock {
    pub dofs: Vec<usize>,
    pub sigma: f64,
    pub boundary: bool,
    pub points: Vec<FacePoint>,
}

/// Assembler for one domain and configuration; caches the dof map and the
/// interface segmentations.
pub struct Assembler<'a> {
    domain: &'a MultiPatchDomain,
    config: DgConfig,
    dofmap: DofMap,
    segmentations: Vec<InterfaceSegmentation>,
}

impl<'a> Assembler<'a> {
    pub fn new(domain: &'a MultiPatchDomain, config: DgConfig) -> Result<Self> {
        DgConfig::new(config.scheme, config.mu)?;
        let dofmap = DofMap::new(domain);
        let segmentations = domain
            .interfaces()
            .iter()
            .map(|f| {
                merge_interface(
                    f,
                    domain.solution_space(f.left_patch),
                    domain.solution_space(f.right_patch),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            config,
            dofmap,
            segmentations,
        })
    }

    pub fn domain(&self) -> &MultiPatchDomain {
        self.domain
    }

    pub fn config(&self) -> &DgConfig {
        &self.config
    }

    pub fn dofmap(&self) -> &DofMap {
        &self.dofmap
    }

    pub fn segmentations(&self) -> &[InterfaceSegmentation] {
        &self.segmentations
    }

    /// Zero matrix holding every entry the dG form can touch.
    pub fn zero_matrix(&self) -> CsrMatrix {
        build_pattern(self.domain, self.dofmap.offsets(), &self.segmentations)
    }

    fn degree(&self) -> usize {
        self.domain.degree()
    }

    /// `mu alpha_l / h_l + mu alpha_r / h_r`.
    pub fn interface_penalty(&self, left: usize, right: usize) -> f64 {
        self.boundary_penalty(left) + self.boundary_penalty(right)
    }

    /// `mu alpha_i / h_i`.
    pub fn boundary_penalty(&self, patch: usize) -> f64 {
        self.config.mu * self.domain.alpha()[patch] / self.domain.mesh_size(patch)
    }

    pub(crate) fn eval(&self, patch: usize, element: usize, xhat: &[f64]) -> Result<PointData> {
        evaluate_basis(self.domain, self.dofmap.offset(patch), patch, element, xhat)
    }

    fn element_matrix(&self, patch: usize, e: usize, n: usize) -> Result<(Vec<usize>, Vec<f64>)> {
        let d = self.domain.dim();
        let alpha = self.domain.alpha()[patch];
        let space = self.domain.solution_space(patch);
        let q = element_quadrature(space, e, n)?;
        let nb = space.local_size();
        let mut local = vec![0.0; nb * nb];
        let mut dofs = Vec::new();
        for (p, w) in q.points.iter().zip(&q.weights) {
            let pd = self.eval(patch, e, &p[..d])?;
            let scale = alpha * w * pd.jac.det.abs();
            for a in 0..nb {
                let ga = pd.grads[a];
                for b in a..nb {
                    let gb = pd.grads[b];
                    let dotg: f64 = (0..d).map(|c| ga[c] * gb[c]).sum();
                    local[a * nb + b] += scale * dotg;
                }
            }
            dofs = pd.dofs;
        }
        for a in 0..nb {
            for b in 0..a {
                local[a * nb + b] = local[b * nb + a];
            }
        }
        Ok((dofs, local))
    }

    fn element_load(&self, patch: usize, e: usize, n: usize, f: &PatchField) -> Result<(Vec<usize>, Vec<f64>)> {
        let d = self.domain.dim();
        let space = self.domain.solution_space(patch);
        let q = element_quadrature(space, e, n)?;
        let mut local = vec![0.0; space.local_size()];
        let mut dofs = Vec::new();
        for (p, w) in q.points.iter().zip(&q.weights) {
            let pd = self.eval(patch, e, &p[..d])?;
            let fx = f(patch, &pd.x);
            let scale = w * pd.jac.det.abs() * fx;
            for (l, b) in local.iter_mut().zip(&pd.values) {
                *l += scale * b;
            }
            dofs = pd.dofs;
        }
        Ok((dofs, local))
    }

    /// Runs `work` over all elements of all patches in parallel chunks and
    /// hands the results to `sink` in (patch, element) order.
    fn for_each_element<T, W, S>(&self, work: W, mut sink: S) -> Result<()>
    where
        T: Send,
        W: Fn(usize, usize) -> Result<T> + Sync,
        S: FnMut(T),
    {
        for patch in 0..self.domain.num_patches() {
            let nel = self.domain.solution_space(patch).num_elements();
            for start in (0..nel).step_by(ELEMENT_CHUNK) {
                let end = (start + ELEMENT_CHUNK).min(nel);
                let results: Vec<Result<T>> = (start..end).into_par_iter().map(|e| work(patch, e)).collect();
                for r in results {
                    sink(r?);
                }
            }
        }
        Ok(())
    }

    /// `sum_i alpha_i (grad u, grad v)_{Omega_i}`.
    pub fn assemble_volume(&self, m: &mut CsrMatrix) -> Result<()> {
        let n = self.config.form_points(self.degree());
        self.for_each_element(
            |p, e| self.element_matrix(p, e, n),
            |(dofs, local)| m.add_block(&dofs, &dofs, &local),
        )
    }

    pub(crate) fn visit_faces<V>(&self, n: usize, interfaces: bool, boundary: bool, mut visit: V) -> Result<()>
    where
        V: FnMut(&FaceBlock),
    {
        let d = self.domain.dim();
        if interfaces {
            for seg in &self.segmentations {
                let face = &seg.face;
                let (l, r) = (face.left_patch, face.right_patch);
                let (al, ar) = (self.domain.alpha()[l], self.domain.alpha()[r]);
                let sigma = self.interface_penalty(l, r);
                let fq = face_quadrature(seg, n)?;
                let mut i = 0;
                while i < fq.len() {
                    let c = fq.cells[i];
                    let cell = &seg.cells[c];
                    let mut block = FaceBlock {
                        dofs: Vec::new(),
                        sigma,
                        boundary: false,
                        points: Vec::new(),
                    };
                    while i < fq.len() && fq.cells[i] == c {
                        let lp = self.eval(l, cell.left_element, &fq.left_points[i][..d])?;
                        let rp = self.eval(r, cell.right_element, &fq.right_points[i][..d])?;
                        let normal = lp.jac.face_normal(face.left_face).ok_or_else(|| {
                            Error::DegenerateGeometry {
                                patch: l,
                                reason: "degenerate interface tangent".into(),
                            }
                        })?;
                        let nn = normal.normal;
                        let flux = |g: &[f64; crate::MAX_DIM], alpha: f64| {
                            0.5 * alpha * (0..d).map(|a| g[a] * nn[a]).sum::<f64>()
                        };
                        if block.dofs.is_empty() {
                            block.dofs = lp.dofs.iter().chain(&rp.dofs).copied().collect();
                        }
                        block.points.push(FacePoint {
                            jump: lp.values.iter().copied().chain(rp.values.iter().map(|v| -v)).collect(),
                            flux: lp
                                .grads
                                .iter()
                                .map(|g| flux(g, al))
                                .chain(rp.grads.iter().map(|g| flux(g, ar)))
                                .collect(),
                            ds: fq.weights[i] * normal.surface_factor,
                            x: lp.x,
                            patch: l,
                            right_patch: Some(r),
                        });
                        i += 1;
                    }
                    visit(&block);
                }
            }
        }
        if boundary {
            for bf in self.domain.boundary_faces() {
                let p = bf.patch;
                let alpha = self.domain.alpha()[p];
                let sigma = self.boundary_penalty(p);
                let bq = boundary_face_quadrature(self.domain.solution_space(p), bf.face, n)?;
                let per_cell = n.pow((d - 1) as u32);
                for start in (0..bq.points.len()).step_by(per_cell) {
                    let e = bq.elements[start];
                    let mut block = FaceBlock {
                        dofs: Vec::new(),
                        sigma,
                        boundary: true,
                        points: Vec::with_capacity(per_cell),
                    };
                    for i in start..start + per_cell {
                        let pd = self.eval(p, e, &bq.points[i][..d])?;
                        let normal = boundary_normal(&pd, bf.face, p)?;
                        let nn = normal.normal;
                        block.points.push(FacePoint {
                            jump: pd.values.clone(),
                            flux: pd
                                .grads
                                .iter()
                                .map(|g| alpha * (0..d).map(|a| g[a] * nn[a]).sum::<f64>())
                                .collect(),
                            ds: bq.weights[i] * normal.surface_factor,
                            x: pd.x.clone(),
                            patch: p,
                            right_patch: None,
                        });
                        if block.dofs.is_empty() {
                            block.dofs = pd.dofs;
                        }
                    }
                    visit(&block);
                }
            }
        }
        Ok(())
    }

    /// Consistency flux `-({alpha grad u} . n, [v])` over interfaces and
    /// boundary faces; with `adjoint` the transposed term
    /// `-({alpha grad v} . n, [u])` instead.
    pub fn assemble_consistency(&self, m: &mut CsrMatrix, adjoint: bool) -> Result<()> {
        let n = self.config.form_points(self.degree());
        self.visit_faces(n, true, true, |block| {
            let nb = block.dofs.len();
            let mut local = vec![0.0; nb * nb];
            for pt in &block.points {
                for r in 0..nb {
                    for c in 0..nb {
                        let v = if adjoint {
                            pt.jump[c] * pt.flux[r]
                        } else {
                            pt.flux[c] * pt.jump[r]
                        };
                        local[r * nb + c] -= pt.ds * v;
                    }
                }
            }
            m.add_block(&block.dofs, &block.dofs, &local);
        })
    }

    /// Consistency terms of the configured scheme.
    pub fn assemble_interface(&self, m: &mut CsrMatrix) -> Result<()> {
        self.assemble_consistency(m, false)?;
        if self.config.scheme == Scheme::Sip {
            self.assemble_consistency(m, true)?;
        }
        Ok(())
    }

    /// `sum_F sigma_F ([u], [v])_F` over interfaces and boundary faces.
    pub fn assemble_penalty(&self, m: &mut CsrMatrix) -> Result<()> {
        let n = self.config.form_points(self.degree());
        self.visit_faces(n, true, true, |block| {
            let nb = block.dofs.len();
            let mut local = vec![0.0; nb * nb];
            for pt in &block.points {
                for r in 0..nb {
                    let s = pt.ds * block.sigma * pt.jump[r];
                    for c in 0..nb {
                        local[r * nb + c] += s * pt.jump[c];
                    }
                }
            }
            m.add_block(&block.dofs, &block.dofs, &local);
        })
    }

    pub fn assemble_matrix(&self) -> Result<CsrMatrix> {
        let mut m = self.zero_matrix();
        self.assemble_volume(&mut m)?;
        self.assemble_interface(&mut m)?;
        self.assemble_penalty(&mut m)?;
        Ok(m)
    }

    /// Matrix of the discrete dG norm: volume plus penalty terms.
    pub fn dg_norm_matrix(&self) -> Result<CsrMatrix> {
        let mut m = self.zero_matrix();
        self.assemble_volume(&mut m)?;
        self.assemble_penalty(&mut m)?;
        Ok(m)
    }

    /// Load `(f, v)` plus the weak Dirichlet terms.
    pub fn assemble_rhs(&self, f: &PatchField, u_d: &PatchField) -> Result<Vec<f64>> {
        let mut rhs = vec![0.0; self.dofmap.total_dofs()];
        let n = self.config.rhs_points(self.degree());
        self.for_each_element(
            |p, e| self.element_load(p, e, n, f),
            |(dofs, local)| {
                for (j, v) in dofs.iter().zip(local) {
                    rhs[*j] += v;
                }
            },
        )?;
        let sip = self.config.scheme == Scheme::Sip;
        self.visit_faces(n, false, true, |block| {
            debug_assert!(block.boundary);
            for pt in &block.points {
                let g = u_d(pt.patch, &pt.x);
                for (r, &j) in block.dofs.iter().enumerate() {
                    rhs[j] += pt.ds * g * block.sigma * pt.jump[r];
                    if sip {
                        rhs[j] -= pt.ds * g * pt.flux[r];
                    }
                }
            }
        })?;
        Ok(rhs)
    }

    pub fn assemble(&self, f: &PatchField, u_d: &PatchField) -> Result<DgSystem> {
        let matrix = self.assemble_matrix()?;
        if self.config.scheme == Scheme::Sip {
            debug_assert!(matrix.symmetry_defect() <= 1e-12);
        }
        Ok(DgSystem {
            matrix,
            rhs: self.assemble_rhs(f, u_d)?,
            dofmap: self.dofmap.clone(),
            scheme: self.config.scheme,
        })
    }
}

fn boundary_normal(pd: &PointData, face: FaceSelector, patch: usize) -> Result<crate::geometry::FaceNormal> {
    pd.jac.face_normal(face).ok_or_else(|| Error::DegenerateGeometry {
        patch,
        reason: "degenerate boundary tangent".into(),
    })
}

/// Assembles the full dG system for `domain`.
pub fn assemble(domain: &MultiPatchDomain, config: DgConfig, f: &PatchField, u_d: &PatchField) -> Result<DgSystem> {
    Assembler::new(domain, config)?.assemble(f, u_d)
}

/// Smallest Rayleigh quotient `v^T A v / v^T v` over `samples` random vectors.
pub fn probe_coercivity(matrix: &CsrMatrix, samples: usize, seed: u64) -> f64 {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let n = matrix.nrows();
    (0..samples)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            matrix.bilinear(&v, &v) / v.iter().map(|x| x * x).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

//! Multi-patch discontinuous Galerkin isogeometric analysis (dG-IgA) for the
//! diffusion equation `-div(alpha grad u) = f` with patch-wise constant
//! coefficients and weakly imposed Dirichlet data.
//!
//! Every patch carries its own tensor-product B-spline space; the spaces need
//! not match across patch interfaces. Continuity is enforced weakly through
//! interior-penalty fluxes integrated over the merged interface segmentation.
//!
//! - [`spline`]: knot vectors, Cox-de Boor evaluation, tensor spaces and a
//!   local quasi-interpolant.
//! - [`geometry`]: patch parametrizations, Jacobians, interfaces and the
//!   multi-patch domain.
//! - [`quadrature`]: Gauss-Legendre rules, element quadrature and the
//!   non-matching interface segmentation.
//! - [`assembly`]: the dG bilinear form (IIP and SIP variants) and load vector.
//! - [`solver`]: CSR storage, Jacobi-preconditioned CG and BiCGStab.
//! - [`analysis`]: dG and L2 error norms, observed and predicted rates.
//! - [`harness`]: manufactured problems, JSON configuration, refinement
//!   studies and report output.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod quadrature;
pub mod solver;
pub mod spline;

pub use error::{Error, Result};

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 3;

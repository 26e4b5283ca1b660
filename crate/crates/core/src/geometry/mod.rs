//! Patch parametrizations and multi-patch topology.
//!
//! Integrals are always pulled back to the parametric cube, so only the patch
//! map, its Jacobian and the inverse-transpose are ever evaluated.

mod domain;
mod patch;

pub use domain::{
    BoundaryFace, FaceRef, InterfaceCheck, InterfaceFace, MultiPatchDomain, Orientation, INTERFACE_TOL,
};
pub use patch::{FaceNormal, FaceSelector, GeometryPatch, Jacobian, Side};

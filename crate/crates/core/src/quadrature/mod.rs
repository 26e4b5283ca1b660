//! Gauss-Legendre rules, element and face quadrature.

mod element;
mod gauss;
mod interface;

pub use element::{boundary_face_quadrature, element_quadrature, BoundaryQuadrature, ElementQuadrature};
pub use gauss::{gauss_rule, QuadratureRule, MAX_POINTS};
pub use interface::{face_quadrature, merge_interface, FaceCell, FaceQuadrature, InterfaceSegmentation};

//! Univariate and tensor-product B-spline bases.

mod knots;
mod quasi;
mod tensor;

pub use knots::{BasisEval, KnotVector, MAX_DERIV};
pub use quasi::quasi_interpolate;
pub use tensor::{SplineCoefficients, TensorBasis, TensorSplineSpace, DEFAULT_QUASI_UNIFORMITY};
pub(crate) use tensor::unflatten;

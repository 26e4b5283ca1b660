use serde::{Deserialize, Serialize};

use super::knots::KnotVector;
use crate::{Error, Result, MAX_DIM};

/// Default bound on `max element edge / min element edge`.
pub const DEFAULT_QUASI_UNIFORMITY: f64 = 4.0;

/// Tensor product of univariate B-spline spaces of a common degree.
///
/// Basis functions and elements are numbered with axis 0 running fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorSplineSpace {
    axes: Vec<KnotVector>,
}

/// Nonzero tensor basis functions at one point.
#[derive(Debug, Clone, Default)]
pub struct TensorBasis {
    /// Space-local basis indices.
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Parametric gradients; only the first `dim` components are meaningful.
    pub grads: Vec<[f64; MAX_DIM]>,
}

impl TensorSplineSpace {
    pub fn new(axes: Vec<KnotVector>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::InvalidSpace(format!("dimension {} not in 1..=3", axes.len())));
        }
        let k = axes[0].degree();
        if axes.iter().any(|a| a.degree() != k) {
            return Err(Error::InvalidSpace("all axes must share one degree".into()));
        }
        Ok(Self { axes })
    }

    /// `dim`-variate space with `elements[a]` uniform elements on axis `a`.
    pub fn uniform(degree: usize, elements: &[usize]) -> Result<Self> {
        Self::new(
            elements
                .iter()
                .map(|&n| KnotVector::uniform(degree, n))
                .collect::<Result<_>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn degree(&self) -> usize {
        self.axes[0].degree()
    }

    pub fn axis(&self, a: usize) -> &KnotVector {
        &self.axes[a]
    }

    pub fn axes(&self) -> &[KnotVector] {
        &self.axes
    }

    pub fn basis_per_axis(&self) -> Vec<usize> {
        self.axes.iter().map(KnotVector::num_basis).collect()
    }

    pub fn num_basis(&self) -> usize {
        self.basis_per_axis().iter().product()
    }

    pub fn elements_per_axis(&self) -> Vec<usize> {
        self.axes.iter().map(KnotVector::num_elements).collect()
    }

    pub fn num_elements(&self) -> usize {
        self.elements_per_axis().iter().product()
    }

    /// Number of nonzero basis functions on one element.
    pub fn local_size(&self) -> usize {
        (self.degree() + 1).pow(self.dim() as u32)
    }

    pub fn element_multi(&self, e: usize) -> Vec<usize> {
        unflatten(e, &self.elements_per_axis())
    }

    pub fn element_flat(&self, multi: &[usize]) -> usize {
        flatten(multi, &self.elements_per_axis())
    }

    pub fn basis_flat(&self, multi: &[usize]) -> usize {
        flatten(multi, &self.basis_per_axis())
    }

    pub fn basis_multi(&self, j: usize) -> Vec<usize> {
        unflatten(j, &self.basis_per_axis())
    }

    /// Lower and upper corners of element `e` in `[0,1]^d`.
    pub fn element_box(&self, e: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if e >= self.num_elements() {
            return Err(Error::Index {
                index: e,
                limit: self.num_elements(),
            });
        }
        let multi = self.element_multi(e);
        Ok(multi
            .iter()
            .zip(&self.axes)
            .map(|(&m, kv)| kv.element_bounds(m))
            .unzip())
    }

    pub fn find_element(&self, x: &[f64]) -> Result<usize> {
        self.check_point(x)?;
        let multi: Vec<usize> = x
            .iter()
            .zip(&self.axes)
            .map(|(&xi, kv)| kv.find_element(xi))
            .collect::<Result<_>>()?;
        Ok(self.element_flat(&multi))
    }

    /// Largest parametric element edge over all axes.
    pub fn h_max(&self) -> f64 {
        self.axes.iter().map(KnotVector::max_span_length).fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.axes
            .iter()
            .map(KnotVector::min_span_length)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn quasi_uniformity_ratio(&self) -> f64 {
        self.h_max() / self.h_min()
    }

    pub fn is_quasi_uniform(&self, bound: f64) -> bool {
        self.quasi_uniformity_ratio() <= bound
    }

    pub fn refine_dyadic(&self) -> Self {
        Self {
            axes: self.axes.iter().map(KnotVector::refine_dyadic).collect(),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidSpace(format!(
                "point of dimension {} for a {}-variate space",
                x.len(),
                self.dim()
            )));
        }
        for &xi in x {
            if !(0.0..=1.0).contains(&xi) {
                return Err(Error::domain(xi, "[0, 1]^d"));
            }
        }
        Ok(())
    }

    /// Values (and parametric gradients when `nderiv >= 1`) of the
    /// `(k+1)^d` nonzero basis functions at `x`.
    pub fn eval(&self, x: &[f64], nderiv: usize) -> Result<TensorBasis> {
        self.check_point(x)?;
        if nderiv > 1 {
            return Err(Error::domain(nderiv as f64, "tensor derivative order <= 1"));
        }
        let spans: Vec<usize> = x
            .iter()
            .zip(&self.axes)
            .map(|(&xi, kv)| kv.find_span(xi))
            .collect::<Result<_>>()?;
        Ok(self.eval_in_spans(&spans, x, nderiv))
    }

    /// Evaluation with the element fixed, so points on element boundaries use
    /// the one-sided basis of that element.
    pub fn eval_in_element(&self, e: usize, x: &[f64], nderiv: usize) -> TensorBasis {
        let multi = self.element_multi(e);
        let spans: Vec<usize> = multi
            .iter()
            .zip(&self.axes)
            .map(|(&m, kv)| kv.element_spans()[m])
            .collect();
        self.eval_in_spans(&spans, x, nderiv)
    }

    fn eval_in_spans(&self, spans: &[usize], x: &[f64], nderiv: usize) -> TensorBasis {
        let d = self.dim();
        let k = self.degree();
        let uni: Vec<_> = (0..d)
            .map(|a| self.axes[a].eval_basis_in_span(spans[a], x[a], nderiv))
            .collect();
        let n_axis = self.basis_per_axis();
        let per = k + 1;
        let total = self.local_size();
        let mut out = TensorBasis {
            indices: Vec::with_capacity(total),
            values: Vec::with_capacity(total),
            grads: Vec::with_capacity(total),
        };
        let mut local = [0usize; MAX_DIM];
        for _ in 0..total {
            let mut index = 0;
            let mut stride = 1;
            let mut value = 1.0;
            for a in 0..d {
                index += (uni[a].first + local[a]) * stride;
                stride *= n_axis[a];
                value *= uni[a].ders[0][local[a]];
            }
            let mut grad = [0.0; MAX_DIM];
            if nderiv >= 1 {
                for (g, grad_g) in grad.iter_mut().enumerate().take(d) {
                    *grad_g = (0..d)
                        .map(|a| uni[a].ders[usize::from(a == g)][local[a]])
                        .product();
                }
            }
            out.indices.push(index);
            out.values.push(value);
            out.grads.push(grad);
            for a in 0..d {
                local[a] += 1;
                if local[a] < per {
                    break;
                }
                local[a] = 0;
            }
        }
        out
    }
}

pub(crate) fn flatten(multi: &[usize], sizes: &[usize]) -> usize {
    multi
        .iter()
        .zip(sizes)
        .rev()
        .fold(0, |acc, (&m, &n)| acc * n + m)
}

pub(crate) fn unflatten(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .map(|&n| {
            let m = flat % n;
            flat /= n;
            m
        })
        .collect()
}

/// Coefficient vector of a (possibly vector-valued) spline in a
/// [`TensorSplineSpace`], stored basis-major: `values[j * components + c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineCoefficients {
    pub values: Vec<f64>,
    pub components: usize,
}

impl SplineCoefficients {
    pub fn new(space: &TensorSplineSpace, values: Vec<f64>, components: usize) -> Result<Self> {
        let expected = space.num_basis() * components;
        if values.len() != expected {
            return Err(Error::CoefficientLength {
                expected,
                got: values.len(),
            });
        }
        Ok(Self { values, components })
    }

    pub fn scalar(space: &TensorSplineSpace, values: Vec<f64>) -> Result<Self> {
        Self::new(space, values, 1)
    }

    /// Component values of the spline at `x`.
    pub fn evaluate(&self, space: &TensorSplineSpace, x: &[f64]) -> Result<Vec<f64>> {
        let basis = space.eval(x, 0)?;
        let mut out = vec![0.0; self.components];
        for (&j, &b) in basis.indices.iter().zip(&basis.values) {
            for (c, o) in out.iter_mut().enumerate() {
                *o += self.values[j * self.components + c] * b;
            }
        }
        Ok(out)
    }

    /// Parametric gradient of a scalar spline at `x`.
    pub fn gradient(&self, space: &TensorSplineSpace, x: &[f64]) -> Result<Vec<f64>> {
        let basis = space.eval(x, 1)?;
        let mut out = vec![0.0; space.dim()];
        for (&j, g) in basis.indices.iter().zip(&basis.grads) {
            for (a, o) in out.iter_mut().enumerate() {
                *o += self.values[j * self.components] * g[a];
            }
        }
        Ok(out)
    }
}

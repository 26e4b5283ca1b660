//! Open knot vectors on the parametric interval `[0, 1]` and the Cox-de Boor
//! evaluation of their univariate B-spline bases.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Highest derivative order supported by [`KnotVector::eval_basis`].
pub const MAX_DERIV: usize = 2;

const KNOT_TOL: f64 = 1e-14;

/// A non-decreasing, open (clamped) knot vector of degree `k` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKnotVector", into = "RawKnotVector")]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawKnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl TryFrom<RawKnotVector> for KnotVector {
    type Error = Error;
    fn try_from(raw: RawKnotVector) -> Result<Self> {
        KnotVector::new(raw.degree, raw.knots)
    }
}

impl From<KnotVector> for RawKnotVector {
    fn from(kv: KnotVector) -> Self {
        RawKnotVector {
            degree: kv.degree,
            knots: kv.knots,
        }
    }
}

/// Nonzero basis functions (and derivatives) at one parameter value.
///
/// Function `first + j` has value `ders[0][j]`, first derivative `ders[1][j]`
/// and so on, for `j` in `0..=degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    pub span: usize,
    pub first: usize,
    pub ders: Vec<Vec<f64>>,
}

impl BasisEval {
    pub fn values(&self) -> &[f64] {
        &self.ders[0]
    }
}

impl KnotVector {
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidKnots(msg));
        if knots.iter().any(|t| !t.is_finite()) {
            return invalid("non-finite knot".into());
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return invalid("knots must be non-decreasing".into());
        }
        if knots.len() < 2 * (degree + 1) {
            return invalid(format!(
                "{} knots cannot hold {} basis functions of degree {degree}",
                knots.len(),
                degree + 1
            ));
        }
        let (lo, hi) = (knots[0], knots[knots.len() - 1]);
        if lo.abs() > KNOT_TOL || (hi - 1.0).abs() > KNOT_TOL {
            return invalid(format!("knots must span [0, 1], got [{lo}, {hi}]"));
        }
        let m = knots.len();
        if knots[..=degree].iter().any(|&t| t != lo) || knots[m - degree - 1..].iter().any(|&t| t != hi) {
            return invalid(format!("end knots must have multiplicity {}", degree + 1));
        }
        let mut i = degree + 1;
        while i < m - degree - 1 {
            let mut j = i;
            while j < m - degree - 1 && knots[j] == knots[i] {
                j += 1;
            }
            if j - i > degree {
                return invalid(format!(
                    "interior knot {} has multiplicity {} > degree {degree}",
                    knots[i],
                    j - i
                ));
            }
            i = j;
        }
        Ok(Self { degree, knots })
    }

    /// Uniform open knot vector with `n_elements` equal spans and maximal
    /// smoothness `C^{k-1}`.
    pub fn uniform(degree: usize, n_elements: usize) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidKnots("at least one element required".into()));
        }
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..n_elements).map(|e| e as f64 / n_elements as f64));
        knots.extend(std::iter::repeat(1.0).take(degree + 1));
        Self::new(degree, knots)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct knot values, i.e. the element boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bp: Vec<f64> = Vec::with_capacity(self.knots.len());
        for &t in &self.knots {
            if bp.last() != Some(&t) {
                bp.push(t);
            }
        }
        bp
    }

    pub fn num_elements(&self) -> usize {
        self.breakpoints().len() - 1
    }

    /// Knot span index of every nonempty element, left to right.
    pub fn element_spans(&self) -> Vec<usize> {
        (self.degree..self.num_basis())
            .filter(|&i| self.knots[i] < self.knots[i + 1])
            .collect()
    }

    /// Parametric interval `[lo, hi]` of element `e`.
    pub fn element_bounds(&self, e: usize) -> (f64, f64) {
        let span = self.element_spans()[e];
        (self.knots[span], self.knots[span + 1])
    }

    pub fn max_span_length(&self) -> f64 {
        self.breakpoints()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn min_span_length(&self) -> f64 {
        self.breakpoints()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Greville abscissae `(t_{j+1} + ... + t_{j+k}) / k`.
    pub fn greville(&self) -> Vec<f64> {
        let k = self.degree;
        (0..self.num_basis())
            .map(|j| {
                if k == 0 {
                    0.5 * (self.knots[j] + self.knots[j + 1])
                } else {
                    self.knots[j + 1..=j + k].iter().sum::<f64>() / k as f64
                }
            })
            .collect()
    }

    /// Index `i` with `knots[i] <= x < knots[i + 1]`; `x = 1` maps to the last
    /// nonempty span.
    pub fn find_span(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(x, "[0, 1]"));
        }
        let n = self.num_basis();
        if x >= self.knots[n] {
            return Ok(n - 1);
        }
        // largest i in [k, n-1] with knots[i] <= x
        let (mut lo, mut hi) = (self.degree, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.knots[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Element index (position among nonempty spans) containing `x`.
    pub fn find_element(&self, x: f64) -> Result<usize> {
        let span = self.find_span(x)?;
        let spans = self.element_spans();
        Ok(spans.partition_point(|&s| s < span))
    }

    /// Values and derivatives up to `nderiv` of the `k + 1` nonzero basis
    /// functions at `x` (Cox-de Boor with the triangular derivative scheme).
    pub fn eval_basis(&self, x: f64, nderiv: usize) -> Result<BasisEval> {
        if nderiv > MAX_DERIV {
            return Err(Error::domain(nderiv as f64, "derivative order <= 2"));
        }
        let span = self.find_span(x)?;
        Ok(self.eval_basis_in_span(span, x, nderiv))
    }

    /// Same as [`eval_basis`](Self::eval_basis) with a known span; `x` may lie
    /// on either end of the span.
    pub fn eval_basis_in_span(&self, span: usize, x: f64, nderiv: usize) -> BasisEval {
        let k = self.degree;
        let t = &self.knots;
        let mut ndu = vec![vec![0.0; k + 1]; k + 1];
        let mut left = vec![0.0; k + 1];
        let mut right = vec![0.0; k + 1];
        ndu[0][0] = 1.0;
        for j in 1..=k {
            left[j] = x - t[span + 1 - j];
            right[j] = t[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                // lower triangle holds knot differences
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; k + 1]; nderiv + 1];
        for j in 0..=k {
            ders[0][j] = ndu[j][k];
        }
        let mut a = vec![vec![0.0; k + 1]; 2];
        for r in 0..=k {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for d in 1..=nderiv.min(k) {
                let mut der = 0.0;
                let rk = r as isize - d as isize;
                let pk = k - d;
                if r >= d {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    der = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize { d - 1 } else { k - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    der += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][d] = -a[s1][d - 1] / ndu[pk + 1][r];
                    der += a[s2][d] * ndu[r][pk];
                }
                ders[d][r] = der;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = k as f64;
        for d in 1..=nderiv.min(k) {
            for v in ders[d].iter_mut() {
                *v *= factor;
            }
            factor *= (k - d) as f64;
        }
        BasisEval {
            span,
            first: span - k,
            ders,
        }
    }

    /// Inserts the midpoint of every nonempty span once.
    pub fn refine_dyadic(&self) -> Self {
        let mut knots = Vec::with_capacity(self.knots.len() * 2);
        for (i, &t) in self.knots.iter().enumerate() {
            knots.push(t);
            if i + 1 < self.knots.len() && self.knots[i + 1] > t {
                knots.push(0.5 * (t + self.knots[i + 1]));
            }
        }
        Self {
            degree: self.degree,
            knots,
        }
    }

    /// Knot vector with the same breakpoints and degree `degree`, interior
    /// knots simple.
    pub fn with_breakpoints(degree: usize, breakpoints: &[f64]) -> Result<Self> {
        let mut knots = vec![breakpoints[0]; degree + 1];
        knots.extend_from_slice(&breakpoints[1..breakpoints.len() - 1]);
        knots.extend(std::iter::repeat(breakpoints[breakpoints.len() - 1]).take(degree + 1));
        Self::new(degree, knots)
    }
}

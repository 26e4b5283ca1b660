//! Manufactured problems: `f = -div(alpha grad u)` and `u_D = u` on the
//! boundary, all in closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::{predicted_rate, ExactSolution};
use crate::{Error, Result, MAX_DIM};

/// Frequency of the smooth solution `prod_a sin(2.5 pi x_a)`.
pub const SMOOTH_FREQUENCY: f64 = 2.5 * PI;

/// Offset above the critical exponent `l - d/p` used for `|x|^lambda`.
pub const LAMBDA_OFFSET: f64 = 0.01;

type Scalar = Box<dyn Fn(usize, &[f64]) -> f64 + Send + Sync>;
type Vector = Box<dyn Fn(usize, &[f64]) -> [f64; MAX_DIM] + Send + Sync>;

/// Problem selector as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ProblemKind {
    /// `prod_a sin(2.5 pi x_a)`.
    Smooth,
    /// `|x|^lambda` with `lambda = l - d/p + 0.01`.
    LowRegularity { l: f64, p: f64 },
    /// A `Q_k` polynomial, contained in the discrete space on affine patches.
    Polynomial,
    /// Piecewise `sin(w x_0) / alpha_i prod_{a>0} sin(w x_a)`: continuous with
    /// continuous normal flux across `x_0 = 0` for any coefficient jump.
    AlphaJump,
}

/// Regularity `u in W^{l,p}` used for the rate prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularity {
    pub l: f64,
    pub p: f64,
}

pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
    pub alpha: Vec<f64>,
    pub u: Scalar,
    pub grad: Vector,
    pub f: Scalar,
    /// `None` for solutions smooth enough that only the degree limits the rate.
    pub regularity: Option<Regularity>,
}

impl ProblemSpec {
    pub fn exact(&self) -> ExactSolution<'_> {
        ExactSolution {
            u: &self.u,
            grad: &self.grad,
            u_d: &self.u,
        }
    }

    pub fn dirichlet(&self, patch: usize, x: &[f64]) -> f64 {
        (self.u)(patch, x)
    }

    pub fn predicted_rate(&self, degree: usize) -> Result<f64> {
        let reg = self.regularity.unwrap_or(Regularity {
            l: degree as f64 + 1.0,
            p: 2.0,
        });
        predicted_rate(degree, reg.l, reg.p, self.dim)
    }
}

impl ProblemKind {
    pub fn build(&self, dim: usize, degree: usize, alpha: &[f64]) -> Result<ProblemSpec> {
        match self {
            ProblemKind::Smooth => problem_smooth(dim, uniform_alpha(alpha)?, alpha.len()),
            ProblemKind::LowRegularity { l, p } => problem_lowreg(dim, *l, *p, uniform_alpha(alpha)?, alpha.len()),
            ProblemKind::Polynomial => problem_polynomial(dim, degree, uniform_alpha(alpha)?, alpha.len()),
            ProblemKind::AlphaJump => problem_alpha_jump(dim, alpha),
        }
    }
}

fn uniform_alpha(alpha: &[f64]) -> Result<f64> {
    let a = alpha[0];
    if alpha.iter().any(|&b| b != a) {
        return Err(Error::Config(
            "this problem needs one diffusion coefficient on all patches".into(),
        ));
    }
    Ok(a)
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Config(format!("dimension {dim} not in {{2, 3}}")));
    }
    Ok(())
}

/// `u = prod_a sin(2.5 pi x_a)`, `f = d (2.5 pi)^2 alpha u`.
pub fn problem_smooth(dim: usize, alpha: f64, patches: usize) -> Result<ProblemSpec> {
    check_dim(dim)?;
    let w = SMOOTH_FREQUENCY;
    let u = move |x: &[f64]| x.iter().map(|&xi| (w * xi).sin()).product::<f64>();
    Ok(ProblemSpec {
        name: "smooth".into(),
        dim,
        alpha: vec![alpha; patches],
        u: Box::new(move |_, x| u(x)),
        grad: Box::new(move |_, x| {
            let mut g = [0.0; MAX_DIM];
            for (a, ga) in g.iter_mut().enumerate().take(x.len()) {
                *ga = (0..x.len())
                    .map(|b| if a == b { w * (w * x[b]).cos() } else { (w * x[b]).sin() })
                    .product();
            }
            g
        }),
        f: Box::new(move |_, x| alpha * x.len() as f64 * w * w * u(x)),
        regularity: None,
    })
}

/// Exponent `lambda = l - d/p + 0.01` placing `|x|^lambda` just inside `W^{l,p}`.
pub fn lowreg_lambda(dim: usize, l: f64, p: f64) -> f64 {
    l - dim as f64 / p + LAMBDA_OFFSET
}

/// `u = |x|^lambda`, `f = -alpha lambda (lambda + d - 2) |x|^(lambda - 2)`.
pub fn problem_lowreg(dim: usize, l: f64, p: f64, alpha: f64, patches: usize) -> Result<ProblemSpec> {
    check_dim(dim)?;
    // validates the admissible (l, p) range
    predicted_rate(usize::MAX / 2, l, p, dim)?;
    let lambda = lowreg_lambda(dim, l, p);
    let d = dim as f64;
    let r = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(ProblemSpec {
        name: format!("lowreg(l={l},p={p})"),
        dim,
        alpha: vec![alpha; patches],
        u: Box::new(move |_, x| r(x).powf(lambda)),
        grad: Box::new(move |_, x| {
            let s = lambda * r(x).powf(lambda - 2.0);
            let mut g = [0.0; MAX_DIM];
            for (ga, xa) in g.iter_mut().zip(x) {
                *ga = s * xa;
            }
            g
        }),
        f: Box::new(move |_, x| -alpha * lambda * (lambda + d - 2.0) * r(x).powf(lambda - 2.0)),
        regularity: Some(Regularity { l, p }),
    })
}

/// `u = 1 + 0.5 x_0 x_1 + sum_a c_a x_a^k + 0.2 prod_a x_a^k`, a member of
/// `Q_k` on every axis.
pub fn problem_polynomial(dim: usize, degree: usize, alpha: f64, patches: usize) -> Result<ProblemSpec> {
    check_dim(dim)?;
    let k = degree as i32;
    let kf = degree as f64;
    let coef = |a: usize| 0.3 * (a + 1) as f64;
    let pow = |x: f64, e: i32| if e < 0 { 0.0 } else { x.powi(e) };
    let u = move |x: &[f64]| {
        1.0 + 0.5 * x[0] * x[1]
            + (0..x.len()).map(|a| coef(a) * pow(x[a], k)).sum::<f64>()
            + 0.2 * x.iter().map(|&v| pow(v, k)).product::<f64>()
    };
    let grad = move |x: &[f64]| {
        let mut g = [0.0; MAX_DIM];
        for a in 0..x.len() {
            let cross = match a {
                0 => 0.5 * x[1],
                1 => 0.5 * x[0],
                _ => 0.0,
            };
            let tensor: f64 = (0..x.len())
                .map(|b| if a == b { kf * pow(x[b], k - 1) } else { pow(x[b], k) })
                .product();
            g[a] = cross + coef(a) * kf * pow(x[a], k - 1) + 0.2 * tensor;
        }
        g
    };
    let laplacian = move |x: &[f64]| {
        let second = kf * (kf - 1.0);
        (0..x.len())
            .map(|a| {
                let tensor: f64 = (0..x.len())
                    .map(|b| if a == b { second * pow(x[b], k - 2) } else { pow(x[b], k) })
                    .product();
                coef(a) * second * pow(x[a], k - 2) + 0.2 * tensor
            })
            .sum::<f64>()
    };
    Ok(ProblemSpec {
        name: "polynomial".into(),
        dim,
        alpha: vec![alpha; patches],
        u: Box::new(move |_, x| u(x)),
        grad: Box::new(move |_, x| grad(x)),
        f: Box::new(move |_, x| -alpha * laplacian(x)),
        regularity: None,
    })
}

/// Smooth solution with a coefficient jump across `x_0 = 0`.
pub fn problem_alpha_jump(dim: usize, alpha: &[f64]) -> Result<ProblemSpec> {
    check_dim(dim)?;
    let w = SMOOTH_FREQUENCY;
    let a1 = alpha.to_vec();
    let a2 = alpha.to_vec();
    let base = move |x: &[f64]| x.iter().map(|&xi| (w * xi).sin()).product::<f64>();
    Ok(ProblemSpec {
        name: "alpha_jump".into(),
        dim,
        alpha: alpha.to_vec(),
        u: Box::new(move |p, x| base(x) / a1[p]),
        grad: Box::new(move |p, x| {
            let mut g = [0.0; MAX_DIM];
            for (a, ga) in g.iter_mut().enumerate().take(x.len()) {
                *ga = (0..x.len())
                    .map(|b| if a == b { w * (w * x[b]).cos() } else { (w * x[b]).sin() })
                    .product::<f64>()
                    / a2[p];
            }
            g
        }),
        // -alpha_i Laplace(u_i) is the same on every patch
        f: Box::new(move |_, x| x.len() as f64 * w * w * base(x)),
        regularity: None,
    })
}

use crate::{Error, Result};

pub const MAX_POINTS: usize = 30;

/// Gauss-Legendre rule on the reference interval `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `n`-point Gauss-Legendre rule, exact for polynomials of degree `2n - 1`.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_POINTS).contains(&n) {
        return Err(Error::domain(n as f64, "1 <= n <= 30"));
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Newton on P_n from the Tricomi initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // z > 0 here; map [-1,1] -> [0,1]
        points[i] = 0.5 * (1.0 - z);
        points[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.5;
    }
    Ok(QuadratureRule { points, weights })
}

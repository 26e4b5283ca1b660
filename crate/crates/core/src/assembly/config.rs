use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Interior-penalty variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Incomplete interior penalty: one consistency term, nonsymmetric.
    Iip,
    /// Symmetric interior penalty: adds the transposed consistency term.
    Sip,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iip" => Ok(Scheme::Iip),
            "sip" => Ok(Scheme::Sip),
            other => Err(Error::Config(format!("unknown scheme {other:?} (expected sip or iip)"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Iip => "iip",
            Scheme::Sip => "sip",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgConfig {
    pub scheme: Scheme,
    pub mu: f64,
    /// Gauss points per axis for the bilinear forms (default `k + 1`).
    pub quadrature_order: Option<usize>,
    /// Gauss points per axis for load vectors and error norms (default `k + 2`).
    pub rhs_order: Option<usize>,
}

impl DgConfig {
    pub fn new(scheme: Scheme, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("penalty parameter must be positive, got {mu}")));
        }
        Ok(Self {
            scheme,
            mu,
            quadrature_order: None,
            rhs_order: None,
        })
    }

    /// `mu = 2 (k + 1) (k + d)`.
    pub fn default_mu(degree: usize, dim: usize) -> f64 {
        2.0 * (degree + 1) as f64 * (degree + dim) as f64
    }

    pub fn with_default_mu(scheme: Scheme, degree: usize, dim: usize) -> Self {
        Self::new(scheme, Self::default_mu(degree, dim)).expect("positive default")
    }

    pub fn form_points(&self, degree: usize) -> usize {
        self.quadrature_order.unwrap_or(degree + 1)
    }

    pub fn rhs_points(&self, degree: usize) -> usize {
        self.rhs_order.unwrap_or(degree + 2)
    }
}

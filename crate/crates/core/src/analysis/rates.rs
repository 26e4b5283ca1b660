use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Errors of one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub level: usize,
    pub h_max: f64,
    pub dofs: usize,
    pub dg_error: f64,
    pub l2_error: f64,
}

/// Errors per level and the rates between consecutive levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub records: Vec<ErrorRecord>,
    /// `dg_rates[s - 1]` belongs to the step from level `s - 1` to `s`.
    pub dg_rates: Vec<f64>,
    pub l2_rates: Vec<f64>,
    pub predicted_rate: Option<f64>,
    /// False when a level failed and the study stopped early.
    pub complete: bool,
}

impl ConvergenceReport {
    pub fn from_records(records: Vec<ErrorRecord>, predicted_rate: Option<f64>, complete: bool) -> Result<Self> {
        let (dg_rates, l2_rates) = if records.len() >= 2 {
            let dg: Vec<f64> = records.iter().map(|r| r.dg_error).collect();
            let l2: Vec<f64> = records.iter().map(|r| r.l2_error).collect();
            (observed_rates(&dg)?, observed_rates(&l2)?)
        } else {
            (vec![], vec![])
        };
        Ok(Self {
            records,
            dg_rates,
            l2_rates,
            predicted_rate,
            complete,
        })
    }

    pub fn final_dg_rate(&self) -> Option<f64> {
        self.dg_rates.last().copied()
    }

    pub fn final_l2_rate(&self) -> Option<f64> {
        self.l2_rates.last().copied()
    }
}

/// `rate_i = log2(errors[i-1] / errors[i])`.
pub fn observed_rates(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::domain(errors.len() as f64, "at least two errors"));
    }
    if let Some(&bad) = errors.iter().find(|&&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::UndefinedRate(bad));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// Predicted dG-norm rate for `u in W^{l,p}` with degree `k` in dimension
/// `d`: `l_eff - 1` for `p = 2`, otherwise `l_eff + d/2 - d/p - 1`, with
/// `l_eff = min(l, k + 1)`. Requires `l >= 2` and `2d / (d + 2(l-1)) < p <= 2`.
pub fn predicted_rate(k: usize, l: f64, p: f64, d: usize) -> Result<f64> {
    if !(l >= 2.0) {
        return Err(Error::domain(l, "l >= 2"));
    }
    let df = d as f64;
    let p_min = 2.0 * df / (df + 2.0 * (l - 1.0));
    if !(p > p_min && p <= 2.0) {
        return Err(Error::domain(p, "2d/(d+2(l-1)) < p <= 2"));
    }
    let l_eff = l.min(k as f64 + 1.0);
    Ok(l_eff + df / 2.0 - df / p - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rate_examples() {
        assert_eq!(observed_rates(&[0.4, 0.1]).unwrap(), vec![2.0]);
        assert_eq!(observed_rates(&[1.0, 0.5, 0.25]).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(observed_rates(&[1.0, 0.0]), Err(Error::UndefinedRate(_))));
        assert!(observed_rates(&[1.0, -1.0]).is_err());
        assert!(observed_rates(&[1.0]).is_err());
    }

    #[test]
    fn predicted_rate_examples() {
        assert_abs_diff_eq!(predicted_rate(2, 3.0, 2.0, 3).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(predicted_rate(8, 2.0, 1.4, 3).unwrap(), 0.357142857142857, epsilon = 1e-12);
        assert_abs_diff_eq!(predicted_rate(8, 3.0, 1.4, 3).unwrap(), 1.357142857142857, epsilon = 1e-12);
        // l capped at k + 1
        assert_abs_diff_eq!(predicted_rate(2, 5.0, 2.0, 2).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(predicted_rate(2, 3.0, 1.4, 3).unwrap(), 1.357142857142857, epsilon = 1e-12);
    }

    #[test]
    fn predicted_rate_rejects_inadmissible_p() {
        // l = 2, d = 3: p must exceed 6/5
        assert!(predicted_rate(3, 2.0, 1.2, 3).is_err());
        assert!(predicted_rate(3, 2.0, 2.5, 3).is_err());
        assert!(predicted_rate(3, 1.5, 2.0, 3).is_err());
        assert!(predicted_rate(3, 2.0, 1.21, 3).is_ok());
    }

    proptest! {
        #[test]
        fn rates_are_scale_invariant(errs in prop::collection::vec(1e-8f64..1.0, 2..6), c in 1e-3f64..1e3) {
            let a = observed_rates(&errs).unwrap();
            let scaled: Vec<f64> = errs.iter().map(|e| e * c).collect();
            let b = observed_rates(&scaled).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn predicted_rate_is_monotone(k in 1usize..5, l in 2.0f64..5.0, dl in 0.0f64..1.0, t in 0.0f64..1.0, dt in 0.0f64..1.0, d in 2usize..4) {
            let df = d as f64;
            let p_min = |l: f64| 2.0 * df / (df + 2.0 * (l - 1.0));
            let lo = p_min(l);
            let p = lo + (2.0 - lo) * (0.01 + 0.98 * t);
            let p2 = (p + (2.0 - p) * dt).min(2.0);
            let base = predicted_rate(k, l, p, d).unwrap();
            prop_assert!(predicted_rate(k, l, p2, d).unwrap() >= base - 1e-12);
            prop_assert!(predicted_rate(k, l + dl, p, d).unwrap() >= base - 1e-12);
        }

        #[test]
        fn p_two_branch_is_l_minus_one(k in 1usize..5, l in 2.0f64..4.0, d in 2usize..4) {
            let r = predicted_rate(k, l, 2.0, d).unwrap();
            prop_assert!((r - (l.min(k as f64 + 1.0) - 1.0)).abs() < 1e-12);
        }
    }
}

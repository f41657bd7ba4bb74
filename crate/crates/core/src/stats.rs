//! Small least-squares and distribution helpers shared by the Granger and
//! QAP code.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal};

/// Relative tolerance on the diagonal of R below which a column counts as
/// linearly dependent on the preceding ones.
const RANK_TOL: f64 = 1e-10;

/// Least-squares solver for a fixed design matrix, reusable across many
/// right-hand sides.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares {
    /// `(X'X)^-1 X'`, k x n.
    pinv: DMatrix<f64>,
    design: DMatrix<f64>,
}

/// Outcome of a rank check: the indices of columns that are (numerically)
/// linear combinations of earlier columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RankDeficient {
    pub dependent_columns: Vec<usize>,
}

impl LeastSquares {
    pub fn new(design: DMatrix<f64>) -> Result<Self, RankDeficient> {
        let (n, k) = design.shape();
        if n < k {
            return Err(RankDeficient {
                dependent_columns: (n..k).collect(),
            });
        }
        let qr = design.clone().qr();
        let r = qr.r();
        let col_norms: Vec<f64> = (0..k).map(|j| design.column(j).norm()).collect();
        let dependent: Vec<usize> = (0..k)
            .filter(|&j| r[(j, j)].abs() <= RANK_TOL * col_norms[j].max(f64::MIN_POSITIVE))
            .collect();
        if !dependent.is_empty() {
            return Err(RankDeficient {
                dependent_columns: dependent,
            });
        }
        let q = qr.q();
        let r_inv = r
            .try_inverse()
            .ok_or_else(|| RankDeficient {
                dependent_columns: (0..k).collect(),
            })?;
        Ok(LeastSquares {
            pinv: r_inv * q.transpose(),
            design,
        })
    }

    pub fn coefficients(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.pinv * y
    }

    pub fn residuals(&self, y: &DVector<f64>) -> DVector<f64> {
        y - &self.design * self.coefficients(y)
    }

    pub fn rss(&self, y: &DVector<f64>) -> f64 {
        self.residuals(y).norm_squared()
    }
}

/// Upper-tail probability of an F(d1, d2) statistic.
pub(crate) fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f.is_nan() {
        return 1.0;
    }
    if f == f64::INFINITY {
        return 0.0;
    }
    if f <= 0.0 {
        return 1.0;
    }
    let dist = FisherSnedecor::new(d1, d2).expect("positive degrees of freedom");
    dist.sf(f).clamp(0.0, 1.0)
}

/// Upper-tail probability of a standard normal.
pub(crate) fn normal_sf(z: f64) -> f64 {
    let dist = Normal::standard();
    dist.sf(z).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let ls = LeastSquares::new(x).unwrap();
        let b = ls.coefficients(&y);
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[1] - 2.0).abs() < 1e-12);
        assert!(ls.rss(&y) < 1e-20);
    }

    #[test]
    fn detects_collinearity() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 1.0, 2.0, 1.0, 2.0, 4.0, 1.0, 3.0, 6.0, 1.0, 5.0, 10.0]);
        let err = LeastSquares::new(x).unwrap_err();
        assert_eq!(err.dependent_columns, vec![2]);
    }

    #[test]
    fn tail_probabilities() {
        assert!((normal_sf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_sf(1.959963984540054) - 0.025).abs() < 1e-9);
        assert_eq!(f_sf(f64::INFINITY, 1.0, 10.0), 0.0);
        assert_eq!(f_sf(0.0, 1.0, 10.0), 1.0);
        // F(1, d) is t(d)^2; t_{0.975}(10) = 2.228138852
        assert!((f_sf(2.228138852f64.powi(2), 1.0, 10.0) - 0.05).abs() < 1e-7);
    }
}

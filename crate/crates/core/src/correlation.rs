//! Pearson correlation matrices and the |rho| summary used for threshold bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ReturnPanel;

/// Symmetric sample Pearson correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    tickers: Vec<String>,
    // row-major N x N
    rho: Vec<f64>,
}

impl CorrelationMatrix {
    /// Wraps a precomputed matrix. Checks shape, unit diagonal, symmetry and range.
    pub fn from_rows(tickers: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = tickers.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::data("correlation matrix must be N x N"));
        }
        for i in 0..n {
            if (rows[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::data(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                    return Err(Error::data(format!("entry ({i},{j}) = {v} out of [-1, 1]")));
                }
                if v != rows[j][i] {
                    return Err(Error::data(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(CorrelationMatrix {
            tickers,
            rho: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix with every off-diagonal entry equal to `value`.
    pub fn constant(tickers: Vec<String>, value: f64) -> Result<Self> {
        let n = tickers.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { value }).collect())
            .collect();
        CorrelationMatrix::from_rows(tickers, rows)
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.n() + j]
    }

    pub fn abs_rho(&self, i: usize, j: usize) -> f64 {
        self.rho(i, j).abs()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.rho[i * n..(i + 1) * n]
    }

    /// Off-diagonal |rho| values in `(0,1), (0,2), ..., (N-2,N-1)` order.
    pub fn upper_abs(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.abs_rho(i, j));
            }
        }
        out
    }

    /// Reorders tickers; `order[k]` is the old index placed at position `k`.
    pub fn permuted(&self, order: &[usize]) -> CorrelationMatrix {
        let n = self.n();
        let mut rho = vec![0.0; n * n];
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                rho[a * n + b] = self.rho(i, j);
            }
        }
        CorrelationMatrix {
            tickers: order.iter().map(|&i| self.tickers[i].clone()).collect(),
            rho,
        }
    }
}

/// Sample Pearson correlation for every unordered pair of return series.
///
/// Each pair is evaluated exactly once and mirrored, so the result is
/// bit-symmetric and independent of thread scheduling.
pub fn pearson_matrix(returns: &ReturnPanel) -> Result<CorrelationMatrix> {
    let t_len = returns.len();
    if t_len < 3 {
        return Err(Error::data(format!(
            "correlation needs at least 3 observations, got {t_len}"
        )));
    }
    let n = returns.n_tickers();
    let centered: Vec<Vec<f64>> = returns
        .all_series()
        .iter()
        .map(|s| {
            let mean = s.iter().sum::<f64>() / t_len as f64;
            s.iter().map(|x| x - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let flat: Vec<&str> = norms
        .iter()
        .zip(returns.tickers())
        .filter(|(nrm, _)| **nrm == 0.0)
        .map(|(_, t)| t.as_str())
        .collect();
    if !flat.is_empty() {
        return Err(Error::data(format!(
            "zero-variance return series: {}",
            flat.join(", ")
        )));
    }

    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let cross: f64 = centered[i]
                        .iter()
                        .zip(&centered[j])
                        .map(|(a, b)| a * b)
                        .sum();
                    cross / (norms[i] * norms[j])
                })
                .collect()
        })
        .collect();

    let mut rho = vec![0.0; n * n];
    for i in 0..n {
        rho[i * n + i] = 1.0;
        for (k, v) in upper[i].iter().enumerate() {
            let j = i + 1 + k;
            rho[i * n + j] = *v;
            rho[j * n + i] = *v;
        }
    }
    Ok(CorrelationMatrix {
        tickers: returns.tickers().to_vec(),
        rho,
    })
}

/// Mean and spread of the off-diagonal |rho| values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrSummary {
    pub mu: f64,
    pub sigma: f64,
    pub lo3: f64,
    pub hi3: f64,
}

impl CorrSummary {
    /// Derives the three-sigma bounds from a mean and standard deviation.
    pub fn from_moments(mu: f64, sigma: f64) -> Self {
        CorrSummary {
            mu,
            sigma,
            lo3: mu - 3.0 * sigma,
            hi3: mu + 3.0 * sigma,
        }
    }
}

/// `mu`, unbiased `sigma` and `mu -/+ 3 sigma` over the N(N-1)/2 off-diagonal |rho|.
///
/// `mu + 3 sigma` is not clipped to 1.
pub fn corr_summary(matrix: &CorrelationMatrix) -> Result<CorrSummary> {
    if matrix.n() < 2 {
        return Err(Error::data("summary needs at least two tickers"));
    }
    let values = matrix.upper_abs();
    let (mu, sigma) = mean_sd(&values);
    Ok(CorrSummary::from_moments(mu, sigma))
}

/// Mean and (n-1)-denominator standard deviation; sd is 0 for a single value.
pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mu, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    (mu, (ss / (n - 1.0)).sqrt())
}

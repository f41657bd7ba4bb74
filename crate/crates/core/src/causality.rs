//! Pairwise Granger causality: the linear F-test, the Hiemstra-Jones
//! nonlinear test on VAR residuals, and the directed networks obtained by
//! thresholding the p-values.
//!
//! Matrix convention: `p[i][j]` is the p-value for "ticker `j` does not
//! Granger-cause ticker `i`", and the network has an edge `j -> i` when it
//! is below `alpha`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{centralizations, directed_degree_centralization};
use crate::error::{Error, Result};
use crate::graph::Network;
use crate::ingest::ReturnPanel;
use crate::stats::{f_sf, normal_sf, LeastSquares};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Linear,
    Nonlinear,
}

/// `N x N` p-values with a unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueMatrix {
    pub tickers: Vec<String>,
    /// Row-major; `p[i][j]` tests `j -> i`.
    pub p: Vec<Vec<f64>>,
    pub kind: TestKind,
    /// Ordered pairs `(i, j)` whose regression was degenerate; their p is 1.
    pub degenerate: Vec<(usize, usize)>,
}

impl PValueMatrix {
    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }
}

/// Restricted-model design: intercept plus `lag` own lags, rows `t = lag..T`.
fn own_lags(y: &[f64], lag: usize) -> DMatrix<f64> {
    let n = y.len() - lag;
    DMatrix::from_fn(n, 1 + lag, |r, c| if c == 0 { 1.0 } else { y[r + lag - c] })
}

/// Unrestricted design: own lags followed by `lag` lags of `x`.
fn joint_lags(y: &[f64], x: &[f64], lag: usize) -> DMatrix<f64> {
    let n = y.len() - lag;
    DMatrix::from_fn(n, 1 + 2 * lag, |r, c| match c {
        0 => 1.0,
        c if c <= lag => y[r + lag - c],
        c => x[r + lag - (c - lag)],
    })
}

fn check_lag(returns: &ReturnPanel, lag: usize) -> Result<()> {
    if lag == 0 {
        return Err(Error::config("Granger lag must be at least 1"));
    }
    if returns.len() <= 3 * lag + 2 {
        return Err(Error::data(format!(
            "Granger test with lag {lag} needs more than {} observations, got {}",
            3 * lag + 2,
            returns.len()
        )));
    }
    if returns.n_tickers() < 2 {
        return Err(Error::data("Granger tests need at least two tickers"));
    }
    Ok(())
}

/// Bivariate linear Granger test for every ordered pair.
///
/// The target is regressed on an intercept and `lag` of its own lags
/// (restricted) and additionally on `lag` lags of the candidate cause
/// (unrestricted). The statistic
/// `F = ((RSS_r - RSS_u) / lag) / (RSS_u / (n - 2 lag - 1))`
/// is referred to `F(lag, n - 2 lag - 1)` with `n = T - lag`.
pub fn granger_linear(returns: &ReturnPanel, lag: usize) -> Result<PValueMatrix> {
    check_lag(returns, lag)?;
    let n_t = returns.n_tickers();
    let n_obs = returns.len() - lag;
    let df2 = (n_obs - 2 * lag - 1) as f64;

    let rows: Vec<(Vec<f64>, Vec<(usize, usize)>)> = (0..n_t)
        .into_par_iter()
        .map(|i| {
            let y = returns.series(i);
            let target = DVector::from_column_slice(&y[lag..]);
            let mut row = vec![1.0; n_t];
            let mut bad = Vec::new();
            let rss_r = match LeastSquares::new(own_lags(y, lag)) {
                Ok(ls) => ls.rss(&target),
                Err(_) => {
                    bad.extend((0..n_t).filter(|&j| j != i).map(|j| (i, j)));
                    return (row, bad);
                }
            };
            for j in (0..n_t).filter(|&j| j != i) {
                let Ok(ls) = LeastSquares::new(joint_lags(y, returns.series(j), lag)) else {
                    bad.push((i, j));
                    continue;
                };
                let rss_u = ls.rss(&target);
                row[j] = if rss_u <= 1e-14 * rss_r {
                    // the cause explains the target exactly
                    0.0
                } else {
                    let f = ((rss_r - rss_u) / lag as f64) / (rss_u / df2);
                    f_sf(f, lag as f64, df2)
                };
            }
            (row, bad)
        })
        .collect();

    let mut p = Vec::with_capacity(n_t);
    let mut degenerate = Vec::new();
    for (row, bad) in rows {
        p.push(row);
        degenerate.extend(bad);
    }
    Ok(PValueMatrix {
        tickers: returns.tickers().to_vec(),
        p,
        kind: TestKind::Linear,
        degenerate,
    })
}

/// Parameters of the Hiemstra-Jones test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearParams {
    /// Lead length `m` of the target vector.
    pub lead: usize,
    /// Embedding length used for both lag vectors.
    pub embed: usize,
    /// Bandwidth `e`, in units of residual standard deviations.
    pub bandwidth: f64,
    /// VAR order used to filter the series before testing.
    pub var_lag: usize,
}

impl Default for NonlinearParams {
    fn default() -> Self {
        NonlinearParams {
            lead: 1,
            embed: 1,
            bandwidth: 1.5,
            var_lag: 1,
        }
    }
}

/// Standardized residuals of the bivariate VAR(`lag`) for `(y, x)`.
fn var_residuals(y: &[f64], x: &[f64], lag: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let ry = LeastSquares::new(joint_lags(y, x, lag))
        .ok()?
        .residuals(&DVector::from_column_slice(&y[lag..]));
    let rx = LeastSquares::new(joint_lags(x, y, lag))
        .ok()?
        .residuals(&DVector::from_column_slice(&x[lag..]));
    Some((standardize(ry.as_slice())?, standardize(rx.as_slice())?))
}

fn standardize(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if !(sd > 1e-12) {
        return None;
    }
    Some(v.iter().map(|a| (a - mean) / sd).collect())
}

/// Statistic and one-sided p-value of the Hiemstra-Jones test that `x`
/// does not Granger-cause `y`. Returns `None` when a correlation integral
/// or the variance estimate is degenerate.
pub fn hiemstra_jones(y: &[f64], x: &[f64], params: &NonlinearParams) -> Option<(f64, f64)> {
    let m = params.lead;
    let l = params.embed;
    let e = params.bandwidth;
    let len = y.len().min(x.len());
    if m == 0 || l == 0 || len < l + m + 2 {
        return None;
    }
    // time index t runs over l..=len-m (0-based), giving n usable points
    let n = len + 1 - m - l;
    let start = l;

    // sup-norm distances between embedded vectors at times t and s
    let dist = |t: usize, s: usize| {
        let lead = (0..m).map(|k| (y[t + k] - y[s + k]).abs()).fold(0.0, f64::max);
        let ylag = (1..=l).map(|k| (y[t - k] - y[s - k]).abs()).fold(0.0, f64::max);
        let xlag = (1..=l).map(|k| (x[t - k] - x[s - k]).abs()).fold(0.0, f64::max);
        (lead, ylag, xlag)
    };

    // kernel row sums per time point for C1..C4
    let mut sums = vec![[0.0f64; 4]; n];
    for a in 0..n {
        for b in a + 1..n {
            let (lead, ylag, xlag) = dist(start + a, start + b);
            let k4 = ylag < e;
            let k3 = k4 && lead < e;
            let k2 = k4 && xlag < e;
            let k1 = k2 && lead < e;
            let ks = [k1, k2, k3, k4];
            for (c, &hit) in ks.iter().enumerate() {
                if hit {
                    sums[a][c] += 1.0;
                    sums[b][c] += 1.0;
                }
            }
        }
    }
    let nf = n as f64;
    let mut c = [0.0f64; 4];
    for row in &sums {
        for k in 0..4 {
            c[k] += row[k];
        }
    }
    for v in c.iter_mut() {
        *v /= nf * (nf - 1.0);
    }
    if c[1] <= 0.0 || c[3] <= 0.0 {
        return None;
    }

    // projections h_k(t) = mean_s K_k(t, s) - C_k
    let h: Vec<[f64; 4]> = sums
        .iter()
        .map(|row| {
            let mut out = [0.0; 4];
            for k in 0..4 {
                out[k] = row[k] / (nf - 1.0) - c[k];
            }
            out
        })
        .collect();
    let bandwidth = (nf.powf(0.25)) as usize;
    let mut sigma = [[0.0f64; 4]; 4];
    for lag in 0..=bandwidth.min(n - 1) {
        let w = if lag == 0 {
            1.0
        } else {
            // both +lag and -lag autocovariances
            2.0 * (1.0 - lag as f64 / (bandwidth as f64 + 1.0))
        };
        for p in 0..4 {
            for q in 0..4 {
                let mut acc = 0.0;
                for t in lag..n {
                    acc += 0.5 * (h[t][p] * h[t - lag][q] + h[t - lag][p] * h[t][q]);
                }
                sigma[p][q] += 4.0 * w * acc / nf;
            }
        }
    }
    let grad = [1.0 / c[1], -c[0] / (c[1] * c[1]), -1.0 / c[3], c[2] / (c[3] * c[3])];
    let mut var = 0.0;
    for p in 0..4 {
        for q in 0..4 {
            var += grad[p] * sigma[p][q] * grad[q];
        }
    }
    if !(var > 0.0) || !var.is_finite() {
        return None;
    }
    let stat = nf.sqrt() * (c[0] / c[1] - c[2] / c[3]) / var.sqrt();
    Some((stat, normal_sf(stat)))
}

/// Hiemstra-Jones test for every ordered pair, applied to standardized
/// residuals of the bivariate VAR used by the linear test.
pub fn granger_nonlinear(returns: &ReturnPanel, params: &NonlinearParams) -> Result<PValueMatrix> {
    if params.lead == 0 || params.embed == 0 || !(params.bandwidth > 0.0) {
        return Err(Error::config("nonlinear test parameters must be positive"));
    }
    check_lag(returns, params.var_lag)?;
    if returns.len() < params.var_lag + params.lead + params.embed + 10 {
        return Err(Error::data("too few observations for the nonlinear test"));
    }
    let n_t = returns.n_tickers();
    for i in 0..n_t {
        if standardize(returns.series(i)).is_none() {
            return Err(Error::data(format!(
                "constant return series for {}",
                returns.tickers()[i]
            )));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n_t).flat_map(|i| (i + 1..n_t).map(move |j| (i, j))).collect();
    // (p[i][j], p[j][i]) per unordered pair
    let results: Vec<Option<(f64, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ri, rj) = var_residuals(returns.series(i), returns.series(j), params.var_lag)?;
            let ij = hiemstra_jones(&ri, &rj, params).map(|r| r.1);
            let ji = hiemstra_jones(&rj, &ri, params).map(|r| r.1);
            Some((ij.unwrap_or(f64::NAN), ji.unwrap_or(f64::NAN)))
        })
        .collect();
    let mut p = vec![vec![1.0; n_t]; n_t];
    let mut degenerate = Vec::new();
    for (&(i, j), r) in pairs.iter().zip(results) {
        let (a, b) = r.unwrap_or((f64::NAN, f64::NAN));
        for (row, col, v) in [(i, j, a), (j, i, b)] {
            if v.is_nan() {
                degenerate.push((row, col));
            } else {
                p[row][col] = v;
            }
        }
    }
    degenerate.sort_unstable();
    Ok(PValueMatrix {
        tickers: returns.tickers().to_vec(),
        p,
        kind: TestKind::Nonlinear,
        degenerate,
    })
}

/// Directed network with an edge `j -> i` whenever `p[i][j] < alpha`.
pub fn causality_network(pvals: &PValueMatrix, alpha: f64) -> Result<Network> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let n = pvals.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && pvals.p[i][j] < alpha {
                edges.push((j, i));
            }
        }
    }
    Network::from_edges(pvals.tickers.clone(), true, &edges)
}

/// Significance levels swept by default.
pub const DEFAULT_ALPHAS: [f64; 7] = [0.2, 0.15, 0.1, 0.075, 0.05, 0.025, 0.01];

/// Density and degree centralization of a causality network at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub n_edges: usize,
    /// `E / (N (N - 1))` over ordered pairs.
    pub density: f64,
    pub in_degree_centralization: f64,
    pub out_degree_centralization: f64,
    /// Degree centralization of the undirected projection.
    pub degree_centralization: f64,
}

pub fn causality_sweep(pvals: &PValueMatrix, alphas: &[f64]) -> Result<Vec<SweepPoint>> {
    if pvals.n() < 3 {
        return Err(Error::data("causality sweep needs at least three tickers"));
    }
    alphas
        .iter()
        .map(|&alpha| {
            let net = causality_network(pvals, alpha)?;
            let n = net.n() as f64;
            let dir = directed_degree_centralization(&net)?;
            let und = centralizations(&net.to_undirected())?;
            Ok(SweepPoint {
                alpha,
                n_edges: net.n_edges(),
                density: net.n_edges() as f64 / (n * (n - 1.0)),
                in_degree_centralization: dir.in_degree,
                out_degree_centralization: dir.out_degree,
                degree_centralization: und.degree,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn noise(rng: &mut ChaCha8Rng, t: usize) -> Vec<f64> {
        (0..t).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn panel(cols: Vec<Vec<f64>>) -> ReturnPanel {
        let names = (0..cols.len()).map(|i| format!("S{i}")).collect();
        ReturnPanel::from_series(names, cols).unwrap()
    }

    #[test]
    fn lead_lag_is_directional() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = noise(&mut rng, 300);
        let e = noise(&mut rng, 300);
        let mut y = vec![e[0]];
        for t in 1..300 {
            y.push(0.8 * x[t - 1] + e[t]);
        }
        let pv = granger_linear(&panel(vec![y, x]), 1).unwrap();
        assert!(pv.get(0, 1) < 1e-6);
        assert!(pv.get(1, 0) > 0.01);
        assert_eq!(pv.get(0, 0), 1.0);
    }

    #[test]
    fn exact_shift_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = noise(&mut rng, 50);
        let mut y = vec![0.3];
        y.extend_from_slice(&x[..49]);
        let pv = granger_linear(&panel(vec![y, x]), 1).unwrap();
        assert!(pv.get(0, 1) < 1e-12);
    }

    #[test]
    fn lag_preconditions() {
        let p = panel(vec![vec![0.1, 0.2, 0.3, 0.1, 0.2], vec![0.3, 0.1, 0.2, 0.2, 0.1]]);
        assert!(granger_linear(&p, 1).is_err());
        assert!(granger_linear(&p, 0).is_err());
    }

    #[test]
    fn network_thresholding() {
        let pv = PValueMatrix {
            tickers: vec!["A".into(), "B".into(), "C".into()],
            p: vec![vec![1.0, 0.01, 0.2], vec![0.04, 1.0, 0.05], vec![0.5, 0.0, 1.0]],
            kind: TestKind::Linear,
            degenerate: vec![],
        };
        let net = causality_network(&pv, 0.05).unwrap();
        assert_eq!(net.edges(), vec![(0, 1), (1, 0), (1, 2)]);
        assert_eq!(causality_network(&pv, 1.0).unwrap().n_edges(), 6);
        assert!(causality_network(&pv, 0.0).is_err());
        let all_one = PValueMatrix {
            p: vec![vec![1.0; 3]; 3],
            ..pv
        };
        assert_eq!(causality_network(&all_one, 1.0).unwrap().n_edges(), 0);
    }

    #[test]
    fn nonlinear_detects_abs_coupling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = noise(&mut rng, 500);
        let e = noise(&mut rng, 500);
        let mut y = vec![e[0]];
        for t in 1..500 {
            y.push(0.8 * x[t - 1].abs() + e[t]);
        }
        let pv = granger_nonlinear(&panel(vec![y, x]), &NonlinearParams::default()).unwrap();
        assert!(pv.get(0, 1) < 0.05, "p = {}", pv.get(0, 1));
    }

    #[test]
    fn nonlinear_rejects_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = panel(vec![noise(&mut rng, 120), vec![0.0; 120]]);
        assert!(granger_nonlinear(&p, &NonlinearParams::default()).is_err());
    }
}

//! Node-level regression with permutation inference.
//!
//! The dependent series (typically degree centrality) is regressed on firm
//! fundamentals by least squares. Significance comes from refitting after
//! randomly relabelling the dependent series across nodes, which keeps the
//! regressors' joint structure intact.

use std::io::Read;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::LeastSquares;

/// Label recorded in every result so readers know which variable was permuted.
pub const PERMUTATION_SCHEME: &str = "dependent-variable permutation over node labels";

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    pub tickers: Vec<String>,
    pub dependent: Vec<f64>,
    pub regressors: Vec<(String, Vec<f64>)>,
    /// Keep the nodes whose dependent value ranks in the top fraction.
    pub top_fraction: f64,
    pub permutations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    /// Two-sided permutation p-value; absent for the intercept, whose
    /// estimate does not change under relabelling.
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QapResult {
    /// Intercept first, then regressors in spec order.
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub n_used: usize,
    pub permutations_run: usize,
    pub scheme: String,
}

impl QapResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Significance marker: `***` for p < 0.01, `**` for p < 0.05, `*` for p < 0.1.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Indices (in input order) of the `ceil(frac * N)` largest values. Ties at
/// the cut go to the lexically smaller ticker.
pub fn truncate_top(tickers: &[String], values: &[f64], frac: f64) -> Result<Vec<usize>> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::config(format!("top fraction must lie in (0, 1], got {frac}")));
    }
    if tickers.len() != values.len() {
        return Err(Error::data("ticker and value lists differ in length"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("dependent series contains non-finite values"));
    }
    let keep = (frac * values.len() as f64 - 1e-9).ceil() as usize;
    if keep == 0 {
        return Err(Error::data("truncation selects no nodes"));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then_with(|| tickers[a].cmp(&tickers[b])));
    let mut chosen = order[..keep].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

fn validate(spec: &RegressionSpec) -> Result<()> {
    if spec.permutations == 0 {
        return Err(Error::config("permutations must be at least 1"));
    }
    let n = spec.tickers.len();
    if spec.dependent.len() != n {
        return Err(Error::data("dependent series length differs from ticker count"));
    }
    for (k, (name, xs)) in spec.regressors.iter().enumerate() {
        if xs.len() != n {
            return Err(Error::data(format!("regressor {name} length differs from ticker count")));
        }
        if xs.iter().any(|v| !v.is_finite()) {
            return Err(Error::data(format!("regressor {name} contains non-finite values")));
        }
        if spec.regressors[..k].iter().any(|(other, _)| other == name) {
            return Err(Error::config(format!("duplicate regressor name {name}")));
        }
    }
    Ok(())
}

/// OLS fit on the truncated sample with permutation p-values.
///
/// Permutation `k` shuffles with its own ChaCha8 stream (`seed`, stream `k`),
/// so the result does not depend on thread count.
pub fn qap_regress(spec: &RegressionSpec) -> Result<QapResult> {
    validate(spec)?;
    let rows = truncate_top(&spec.tickers, &spec.dependent, spec.top_fraction)?;
    let n = rows.len();
    let k = spec.regressors.len();
    if n <= k + 1 {
        return Err(Error::data(format!(
            "{n} observations are too few for {k} regressors plus an intercept"
        )));
    }

    // standardize each regressor on the used rows
    let mut centers = Vec::with_capacity(k);
    let mut scales = Vec::with_capacity(k);
    for (name, xs) in &spec.regressors {
        let vals: Vec<f64> = rows.iter().map(|&r| xs[r]).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        if !(sd > 0.0) {
            return Err(Error::numeric(format!("regressor {name} is constant on the sample")));
        }
        centers.push(mean);
        scales.push(sd);
    }
    let design = DMatrix::from_fn(n, k + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            (spec.regressors[c - 1].1[rows[r]] - centers[c - 1]) / scales[c - 1]
        }
    });
    let ls = LeastSquares::new(design).map_err(|e| {
        let names: Vec<&str> = e
            .dependent_columns
            .iter()
            .map(|&c| if c == 0 { "intercept" } else { spec.regressors[c - 1].0.as_str() })
            .collect();
        Error::numeric(format!("rank-deficient regressors: {}", names.join(", ")))
    })?;

    let y: Vec<f64> = rows.iter().map(|&r| spec.dependent[r]).collect();
    let y_vec = DVector::from_column_slice(&y);
    let beta = ls.coefficients(&y_vec);
    let rss = ls.rss(&y_vec);
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 0.0 };

    let observed: Vec<f64> = (1..=k).map(|c| beta[c].abs()).collect();
    let exceed: Vec<Vec<u32>> = (0..spec.permutations)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(p as u64);
            let mut shuffled = y.clone();
            shuffled.shuffle(&mut rng);
            let b = ls.coefficients(&DVector::from_vec(shuffled));
            (1..=k).map(|c| u32::from(b[c].abs() >= observed[c - 1])).collect()
        })
        .collect();
    let mut counts = vec![0u64; k];
    for hits in &exceed {
        for (c, h) in counts.iter_mut().zip(hits) {
            *c += u64::from(*h);
        }
    }

    let mut coefficients = Vec::with_capacity(k + 1);
    let mut intercept = beta[0];
    for c in 0..k {
        intercept -= beta[c + 1] * centers[c] / scales[c];
    }
    coefficients.push(Coefficient {
        name: "intercept".to_string(),
        estimate: intercept,
        p_value: None,
    });
    let denom = (spec.permutations + 1) as f64;
    for c in 0..k {
        coefficients.push(Coefficient {
            name: spec.regressors[c].0.clone(),
            estimate: beta[c + 1] / scales[c],
            p_value: Some((1 + counts[c]) as f64 / denom),
        });
    }
    Ok(QapResult {
        coefficients,
        r_squared,
        n_used: n,
        permutations_run: spec.permutations,
        scheme: PERMUTATION_SCHEME.to_string(),
    })
}

/// Columns every fundamentals file must carry.
pub const FUNDAMENTAL_COLUMNS: [&str; 6] = [
    "current_ratio",
    "quick_ratio",
    "leverage",
    "turnover",
    "roe",
    "market_value",
];

/// Per-ticker firm characteristics.
#[derive(Debug, Clone, PartialEq)]
pub struct Fundamentals {
    pub tickers: Vec<String>,
    /// Column name and values aligned with `tickers`.
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Fundamentals {
    /// Reads `ticker,current_ratio,...,market_value[,extra...]`. Any extra
    /// numeric column (for example `financing`) is kept.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if headers.first().map(String::as_str) != Some("ticker") {
            return Err(Error::data("fundamentals file must start with a 'ticker' column"));
        }
        for required in FUNDAMENTAL_COLUMNS {
            if !headers.iter().any(|h| h == required) {
                return Err(Error::data(format!("fundamentals file lacks column {required}")));
            }
        }
        let mut tickers = Vec::new();
        let mut columns: Vec<(String, Vec<f64>)> =
            headers[1..].iter().map(|h| (h.clone(), Vec::new())).collect();
        for (k, rec) in reader.records().enumerate() {
            let rec = rec?;
            let line = k + 2;
            let ticker = rec.get(0).unwrap_or("").to_string();
            if ticker.is_empty() {
                return Err(Error::data(format!("fundamentals line {line}: empty ticker")));
            }
            if tickers.contains(&ticker) {
                return Err(Error::data(format!("fundamentals line {line}: duplicate ticker {ticker}")));
            }
            for (c, (name, values)) in columns.iter_mut().enumerate() {
                let raw = rec.get(c + 1).unwrap_or("");
                let v: f64 = raw.parse().map_err(|_| {
                    Error::data(format!("fundamentals line {line}: bad {name} value '{raw}'"))
                })?;
                if !v.is_finite() {
                    return Err(Error::data(format!("fundamentals line {line}: non-finite {name}")));
                }
                values.push(v);
            }
            tickers.push(ticker);
        }
        if tickers.is_empty() {
            return Err(Error::data("fundamentals file has no rows"));
        }
        Ok(Fundamentals { tickers, columns })
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Selected columns re-ordered to follow `tickers`.
    pub fn aligned(&self, tickers: &[String], names: &[String]) -> Result<Vec<(String, Vec<f64>)>> {
        let idx: Vec<usize> = tickers
            .iter()
            .map(|t| {
                self.tickers
                    .iter()
                    .position(|u| u == t)
                    .ok_or_else(|| Error::data(format!("no fundamentals for ticker {t}")))
            })
            .collect::<Result<_>>()?;
        names
            .iter()
            .map(|name| {
                let col = self
                    .column(name)
                    .ok_or_else(|| Error::config(format!("unknown fundamentals column {name}")))?;
                Ok((name.clone(), idx.iter().map(|&i| col[i]).collect()))
            })
            .collect()
    }
}

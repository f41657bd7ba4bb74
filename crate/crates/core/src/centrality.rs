//! Node centralities, network centralizations, degree heterogeneity and
//! degree-distribution / power-law analysis.
//!
//! All node centralities are "relative": scaled into `[0, 1]` by their
//! value on an extremal graph. Centralizations are normalized so that the
//! star graph scores exactly 1:
//!
//! | index       | normalizer                    |
//! |-------------|-------------------------------|
//! | degree      | `N - 2`                       |
//! | betweenness | `N - 1`                       |
//! | closeness   | `(N-1)(N-2) / (2N - 3)`       |

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components, shortest_paths, Network, UNREACHABLE};
use crate::special::hurwitz_zeta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralityKind {
    RelativeDegree,
    RelativeInDegree,
    RelativeOutDegree,
    RelativeBetweenness,
    RelativeCloseness,
}

impl CentralityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CentralityKind::RelativeDegree => "relative_degree",
            CentralityKind::RelativeInDegree => "relative_in_degree",
            CentralityKind::RelativeOutDegree => "relative_out_degree",
            CentralityKind::RelativeBetweenness => "relative_betweenness",
            CentralityKind::RelativeCloseness => "relative_closeness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector {
    pub tickers: Vec<String>,
    pub values: Vec<f64>,
    pub kind: CentralityKind,
}

impl CentralityVector {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the first maximal entry.
    pub fn argmax(&self) -> Option<usize> {
        let m = self.max();
        self.values.iter().position(|&v| v == m)
    }
}

fn require_nodes(net: &Network, min: usize) -> Result<()> {
    if net.n() < min {
        return Err(Error::data(format!(
            "centrality needs at least {min} nodes, got {}",
            net.n()
        )));
    }
    Ok(())
}

fn scaled(net: &Network, kind: CentralityKind, degree: impl Fn(usize) -> usize) -> CentralityVector {
    let denom = (net.n() - 1) as f64;
    CentralityVector {
        tickers: net.tickers().to_vec(),
        values: (0..net.n()).map(|i| degree(i) as f64 / denom).collect(),
        kind,
    }
}

/// `k_i / (N - 1)` on an undirected network.
pub fn relative_degree(net: &Network) -> Result<CentralityVector> {
    require_nodes(net, 2)?;
    if net.is_directed() {
        return Err(Error::data(
            "relative_degree is for undirected networks; use relative_in_degree / relative_out_degree",
        ));
    }
    Ok(scaled(net, CentralityKind::RelativeDegree, |i| net.degree(i)))
}

/// In-degree over `N - 1`.
pub fn relative_in_degree(net: &Network) -> Result<CentralityVector> {
    require_nodes(net, 2)?;
    Ok(scaled(net, CentralityKind::RelativeInDegree, |i| net.in_degree(i)))
}

/// Out-degree over `N - 1`.
pub fn relative_out_degree(net: &Network) -> Result<CentralityVector> {
    require_nodes(net, 2)?;
    Ok(scaled(net, CentralityKind::RelativeOutDegree, |i| net.out_degree(i)))
}

/// Brandes dependency accumulation from one source.
fn brandes_source(net: &Network, s: usize) -> Vec<f64> {
    let n = net.n();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![UNREACHABLE; n];
    let mut delta = vec![0.0f64; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in net.neighbors(v) {
            if dist[w] == UNREACHABLE {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    while let Some(w) = order.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

/// `2 / ((N-1)(N-2)) * sum_{j<k} g_jk(i) / g_jk`. Unreachable pairs add nothing.
pub fn relative_betweenness(net: &Network) -> Result<CentralityVector> {
    require_nodes(net, 3)?;
    if net.is_directed() {
        return Err(Error::data("relative_betweenness is defined for undirected networks"));
    }
    let n = net.n();
    let per_source: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| brandes_source(net, s)).collect();
    // fixed summation order keeps the result independent of scheduling
    let mut total = vec![0.0f64; n];
    for delta in &per_source {
        for (t, d) in total.iter_mut().zip(delta) {
            *t += d;
        }
    }
    // every unordered pair was counted from both ends
    let norm = ((n - 1) * (n - 2)) as f64;
    Ok(CentralityVector {
        tickers: net.tickers().to_vec(),
        values: total.into_iter().map(|v| v / norm).collect(),
        kind: CentralityKind::RelativeBetweenness,
    })
}

/// Closeness of each node as the exact fraction `(n_c - 1, sum_j d_ij)`;
/// isolated nodes get `(0, 1)`.
fn closeness_fractions(net: &Network) -> Vec<(u64, u64)> {
    let n = net.n();
    let d = shortest_paths(net);
    let mut comp_size = vec![1usize; n];
    for c in components(&net.to_undirected()) {
        for &i in &c {
            comp_size[i] = c.len();
        }
    }
    (0..n)
        .map(|i| {
            let total: u64 = d
                .row(i)
                .iter()
                .filter(|&&x| x != UNREACHABLE)
                .map(|&x| u64::from(x))
                .sum();
            if comp_size[i] < 2 || total == 0 {
                (0, 1)
            } else {
                ((comp_size[i] - 1) as u64, total)
            }
        })
        .collect()
}

/// `(n_c - 1) / sum_j d_ij` inside the node's own component of size `n_c`;
/// isolated nodes score 0.
pub fn relative_closeness(net: &Network) -> Result<CentralityVector> {
    require_nodes(net, 1)?;
    let values = closeness_fractions(net)
        .into_iter()
        .map(|(p, q)| p as f64 / q as f64)
        .collect();
    Ok(CentralityVector {
        tickers: net.tickers().to_vec(),
        values,
        kind: CentralityKind::RelativeCloseness,
    })
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `sum_i (max - c_i) * (2N - 3) / ((N - 1)(N - 2))` evaluated in rational
/// arithmetic so that closed forms such as the star come out exact. Returns
/// `None` on overflow.
fn exact_closeness_centralization(fracs: &[(u64, u64)]) -> Option<f64> {
    let n = fracs.len() as u128;
    let &(a, b) = fracs
        .iter()
        .max_by(|x, y| (u128::from(x.0) * u128::from(y.1)).cmp(&(u128::from(y.0) * u128::from(x.1))))?;
    let (a, b) = (u128::from(a), u128::from(b));
    // running sum num/den of all closeness values
    let (mut num, mut den) = (0u128, 1u128);
    for &(p, q) in fracs {
        let (p, q) = (u128::from(p), u128::from(q));
        let g = gcd(den, q);
        let l = den.checked_mul(q / g)?;
        num = num.checked_mul(l / den)?.checked_add(p.checked_mul(l / q)?)?;
        den = l;
        let r = gcd(num, den).max(1);
        num /= r;
        den /= r;
    }
    // n*a/b - num/den
    let top = n.checked_mul(a)?.checked_mul(den)?.checked_sub(b.checked_mul(num)?)?;
    let bottom = b.checked_mul(den)?;
    let top = top.checked_mul(2 * n - 3)?;
    let bottom = bottom.checked_mul((n - 1) * (n - 2))?;
    let r = gcd(top, bottom).max(1);
    Some((top / r) as f64 / (bottom / r) as f64)
}

/// Whole-network centralization indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Centralization {
    pub degree: f64,
    pub betweenness: f64,
    pub closeness: f64,
}

/// `sum_i (k_max - k_i) / denom` with an integer numerator.
fn degree_spread(degrees: &[usize], denom: f64) -> f64 {
    let max = degrees.iter().copied().max().unwrap_or(0);
    degrees.iter().map(|&k| max - k).sum::<usize>() as f64 / denom
}

fn spread(v: &CentralityVector) -> f64 {
    let m = v.max();
    v.values.iter().map(|x| m - x).sum()
}

/// Degree, betweenness and closeness centralization, each equal to 1 on a
/// star. On disconnected graphs closeness centralization can exceed 1
/// because closeness is taken per component.
pub fn centralizations(net: &Network) -> Result<Centralization> {
    require_nodes(net, 3)?;
    let n = net.n() as f64;
    if net.is_directed() {
        return Err(Error::data("centralizations are defined for undirected networks"));
    }
    let degrees = net.degrees();
    let btw = relative_betweenness(net)?;
    let fracs = closeness_fractions(net);
    let closeness = exact_closeness_centralization(&fracs).unwrap_or_else(|| {
        let clo = relative_closeness(net).expect("node count already checked");
        spread(&clo) * (2.0 * n - 3.0) / ((n - 1.0) * (n - 2.0))
    });
    Ok(Centralization {
        degree: degree_spread(&degrees, (n - 1.0) * (n - 2.0)),
        betweenness: spread(&btw) / (n - 1.0),
        closeness,
    })
}

/// In- and out-degree centralization of a directed network, normalized by
/// `N - 1` (the value for a node pointing to, or pointed at by, all others).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedDegreeCentralization {
    pub in_degree: f64,
    pub out_degree: f64,
}

pub fn directed_degree_centralization(net: &Network) -> Result<DirectedDegreeCentralization> {
    require_nodes(net, 2)?;
    let n = net.n() as f64;
    let ins: Vec<usize> = (0..net.n()).map(|i| net.in_degree(i)).collect();
    let outs: Vec<usize> = (0..net.n()).map(|i| net.out_degree(i)).collect();
    Ok(DirectedDegreeCentralization {
        in_degree: degree_spread(&ins, (n - 1.0) * (n - 1.0)),
        out_degree: degree_spread(&outs, (n - 1.0) * (n - 1.0)),
    })
}

/// `sum D_i^2 / (sum D_i)^2`. Integer sums keep closed forms exact.
pub fn heterogeneity(degrees: &[usize]) -> Result<f64> {
    let total: u128 = degrees.iter().map(|&d| d as u128).sum();
    if total == 0 {
        return Err(Error::data("heterogeneity undefined when all degrees are zero"));
    }
    let squares: u128 = degrees.iter().map(|&d| (d as u128) * (d as u128)).sum();
    Ok(squares as f64 / (total * total) as f64)
}

/// Empirical degree CDF and the log-log probability mass points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    /// `(k, P(K <= k))` at each distinct degree.
    pub cdf: Vec<(usize, f64)>,
    /// `(ln k, ln P(K = k))` for each distinct positive degree.
    pub loglog: Vec<(f64, f64)>,
}

pub fn degree_distribution(net: &Network) -> Result<DegreeDistribution> {
    require_nodes(net, 1)?;
    Ok(distribution_of(&net.degrees()))
}

pub fn distribution_of(degrees: &[usize]) -> DegreeDistribution {
    let n = degrees.len() as f64;
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let mut cdf = Vec::new();
    let mut loglog = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let k = sorted[i];
        let j = sorted.partition_point(|&x| x <= k);
        cdf.push((k, j as f64 / n));
        if k > 0 {
            loglog.push(((k as f64).ln(), ((j - i) as f64 / n).ln()));
        }
        i = j;
    }
    DegreeDistribution { cdf, loglog }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XminStrategy {
    Fixed(usize),
    /// Pick the `xmin` whose fitted tail has the smallest KS distance.
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub lambda: f64,
    pub xmin: usize,
    pub ks_distance: f64,
    pub n_tail: usize,
}

/// Scan only considers tails at least this large when any exist.
const MIN_SCAN_TAIL: usize = 10;

/// Discrete power-law fit `P(k) = k^-lambda / zeta(lambda, xmin)` for
/// `k >= xmin` by maximum likelihood.
///
/// The closed-form approximation `1 + n / sum ln(x_i / (xmin - 1/2))` is
/// only used to bracket the search: at small `xmin` it is biased by more
/// than 0.1 (about 2.39 for a true exponent of 2.5 at `xmin = 2`).
pub fn fit_power_law(degrees: &[usize], strategy: XminStrategy) -> Result<PowerLawFit> {
    match strategy {
        XminStrategy::Fixed(xmin) => fit_fixed(degrees, xmin),
        XminStrategy::Scan => {
            let mut candidates: Vec<usize> = degrees.iter().copied().filter(|&d| d > 0).collect();
            candidates.sort_unstable();
            candidates.dedup();
            let fits: Vec<PowerLawFit> = candidates
                .iter()
                .filter_map(|&x| fit_fixed(degrees, x).ok())
                .collect();
            let big: Vec<&PowerLawFit> = fits.iter().filter(|f| f.n_tail >= MIN_SCAN_TAIL).collect();
            let pool: Vec<&PowerLawFit> = if big.is_empty() { fits.iter().collect() } else { big };
            pool.into_iter()
                .min_by(|a, b| a.ks_distance.total_cmp(&b.ks_distance).then(a.xmin.cmp(&b.xmin)))
                .copied()
                .ok_or_else(|| Error::numeric("no xmin leaves two distinct positive tail values"))
        }
    }
}

fn fit_fixed(degrees: &[usize], xmin: usize) -> Result<PowerLawFit> {
    if xmin == 0 {
        return Err(Error::config("xmin must be at least 1"));
    }
    let mut tail: Vec<usize> = degrees.iter().copied().filter(|&d| d >= xmin).collect();
    if tail.is_empty() {
        return Err(Error::numeric(format!("all degrees are below xmin = {xmin}")));
    }
    tail.sort_unstable();
    if tail[0] == tail[tail.len() - 1] {
        return Err(Error::numeric(format!(
            "tail above xmin = {xmin} has no spread; need two distinct values"
        )));
    }
    let n = tail.len() as f64;
    let shift = xmin as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&x| (x as f64 / shift).ln()).sum();
    let approx = 1.0 + n / log_sum;
    let sum_ln: f64 = tail.iter().map(|&x| (x as f64).ln()).sum();
    let lambda = discrete_mle(n, sum_ln, xmin as f64, approx);

    // KS distance between the empirical tail CDF and the fitted discrete law
    let norm = hurwitz_zeta(lambda, xmin as f64);
    let model_cdf = |x: usize| 1.0 - hurwitz_zeta(lambda, (x + 1) as f64) / norm;
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        let j = tail.partition_point(|&v| v <= x);
        let below = i as f64 / n; // empirical CDF at x - 1
        let at = j as f64 / n;
        ks = ks.max((at - model_cdf(x)).abs());
        if x > xmin {
            ks = ks.max((below - model_cdf(x - 1)).abs());
        }
        i = j;
    }
    Ok(PowerLawFit {
        lambda,
        xmin,
        ks_distance: ks.min(1.0),
        n_tail: tail.len(),
    })
}

/// Maximizes `-n ln zeta(l, xmin) - l sum ln x_i`, which is concave in `l`,
/// by golden-section search on a bracket around the approximate estimate.
fn discrete_mle(n: f64, sum_ln: f64, xmin: f64, approx: f64) -> f64 {
    let nll = |l: f64| n * hurwitz_zeta(l, xmin).ln() + l * sum_ln;
    let mut lo = 1.0 + 1e-9;
    let mut hi = (approx * 2.0).max(approx + 2.0);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (nll(a), nll(b));
    while hi - lo > 1e-10 {
        if fa < fb {
            hi = b;
            (b, fb) = (a, fa);
            a = hi - ratio * (hi - lo);
            fa = nll(a);
        } else {
            lo = a;
            (a, fa) = (b, fb);
            b = lo + ratio * (hi - lo);
            fb = nll(b);
        }
    }
    0.5 * (lo + hi)
}

//! Uniform threshold selection across stages.
//!
//! Three steps narrow the admissible threshold:
//!
//! 1. intersect the per-stage `[mu, mu + 3 sigma]` intervals of |rho|;
//! 2. on a coarse grid, find the cell where the largest connected
//!    component shrinks the most (summed over stages) and intersect it
//!    with the step-1 interval;
//! 3. repeatedly split the current interval on a decimal grid, keep the
//!    cell where the largest component sizes change least, and divide the
//!    step by ten until it reaches `d_final`. The threshold is the lower
//!    end of the last cell.
//!
//! Ties in steps 2 and 3 go to the lowest cell.

use serde::{Deserialize, Serialize};

use crate::correlation::{corr_summary, CorrSummary, CorrelationMatrix};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::numeric(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `[max mu, min (mu + 3 sigma)]` over all stages.
pub fn shared_sigma_interval(summaries: &[CorrSummary]) -> Result<Interval> {
    if summaries.is_empty() {
        return Err(Error::data("need at least one stage summary"));
    }
    let lo = summaries.iter().map(|s| s.mu).fold(f64::NEG_INFINITY, f64::max);
    let hi = summaries.iter().map(|s| s.hi3).fold(f64::INFINITY, f64::min);
    if lo > hi {
        return Err(Error::numeric(format!(
            "stage [mu, mu+3sigma] intervals do not intersect (max mu {lo} > min upper {hi})"
        )));
    }
    Ok(Interval { lo, hi })
}

/// Largest-component size of the `|rho| >= theta` network as a step
/// function of `theta`, built with one union-find sweep over the pairs in
/// descending |rho| order.
#[derive(Debug, Clone)]
pub struct ComponentCurve {
    n: usize,
    // descending |rho| of each merge-order pair, and the largest component after adding it
    values: Vec<f64>,
    largest: Vec<usize>,
}

impl ComponentCurve {
    pub fn new(matrix: &CorrelationMatrix) -> Self {
        let n = matrix.n();
        let mut pairs: Vec<(f64, u32, u32)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((matrix.abs_rho(i, j), i as u32, j as u32));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut parent: Vec<usize> = (0..n).collect();
        let mut size = vec![1usize; n];
        let mut best = usize::from(n > 0);
        let mut values = Vec::with_capacity(pairs.len());
        let mut largest = Vec::with_capacity(pairs.len());
        for (v, a, b) in pairs {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            if ra != rb {
                let (big, small) = if size[ra] >= size[rb] { (ra, rb) } else { (rb, ra) };
                parent[small] = big;
                size[big] += size[small];
                best = best.max(size[big]);
            }
            values.push(v);
            largest.push(best);
        }
        ComponentCurve { n, values, largest }
    }

    /// Largest component node count at `theta` (edges where `|rho| >= theta`).
    pub fn count(&self, theta: f64) -> usize {
        let m = self.values.partition_point(|&v| v >= theta);
        if m == 0 {
            usize::from(self.n > 0)
        } else {
            self.largest[m - 1]
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Largest-component node counts per stage over a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentProfile {
    pub grid: Vec<f64>,
    pub stages: Vec<String>,
    /// `counts[s][k]`: stage `s` at `grid[k]`.
    pub counts: Vec<Vec<usize>>,
}

/// The default coarse grid 0.2, 0.3, ..., 0.9.
pub fn default_grid() -> Vec<f64> {
    (2..=9).map(|k| k as f64 / 10.0).collect()
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::config("threshold grid values must lie in (0, 1)"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("threshold grid must be strictly increasing"));
    }
    Ok(())
}

pub fn component_profile(matrices: &[(&str, &CorrelationMatrix)], grid: &[f64]) -> Result<ComponentProfile> {
    validate_grid(grid)?;
    let curves: Vec<ComponentCurve> = matrices.iter().map(|(_, m)| ComponentCurve::new(m)).collect();
    Ok(profile_from_curves(
        matrices.iter().map(|(s, _)| s.to_string()).collect(),
        &curves,
        grid,
    ))
}

fn profile_from_curves(stages: Vec<String>, curves: &[ComponentCurve], grid: &[f64]) -> ComponentProfile {
    ComponentProfile {
        grid: grid.to_vec(),
        stages,
        counts: curves
            .iter()
            .map(|c| grid.iter().map(|&t| c.count(t)).collect())
            .collect(),
    }
}

fn cell_change(counts: &[Vec<usize>], k: usize) -> usize {
    counts.iter().map(|c| c[k].abs_diff(c[k + 1])).sum()
}

/// Cell `[grid[k], grid[k+1]]` with the largest summed count drop,
/// intersected with `sigma_interval`.
pub fn select_coarse_interval(profile: &ComponentProfile, sigma_interval: &Interval) -> Result<Interval> {
    let g = &profile.grid;
    if g.len() < 2 {
        return Err(Error::config("coarse grid needs at least two thresholds"));
    }
    if g[0] > sigma_interval.lo || g[g.len() - 1] < sigma_interval.hi {
        return Err(Error::config(format!(
            "coarse grid [{}, {}] does not span the sigma interval {sigma_interval}",
            g[0],
            g[g.len() - 1]
        )));
    }
    let mut best = 0;
    let mut best_score = cell_change(&profile.counts, 0);
    for k in 1..g.len() - 1 {
        let s = cell_change(&profile.counts, k);
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    let cell = Interval { lo: g[best], hi: g[best + 1] };
    cell.intersect(sigma_interval).ok_or_else(|| {
        Error::numeric(format!(
            "largest-drop cell {cell} does not meet the sigma interval {sigma_interval}"
        ))
    })
}

/// Index of the cell whose summed absolute count change is smallest;
/// ties go to the lowest index. `counts[s][k]` is stage `s` at boundary `k`.
pub fn most_stable_cell(counts: &[Vec<usize>]) -> Option<(usize, usize)> {
    let len = counts.first().map_or(0, Vec::len);
    (0..len.saturating_sub(1))
        .map(|k| (k, cell_change(counts, k)))
        .min_by_key(|&(k, s)| (s, k))
}

/// One candidate cell of a refinement round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScore {
    pub lo: f64,
    pub hi: f64,
    pub counts_lo: Vec<usize>,
    pub counts_hi: Vec<usize>,
    pub score: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRound {
    pub interval: Interval,
    pub step: f64,
    pub cells: Vec<CellScore>,
    pub chosen: usize,
    /// Number of cells sharing the minimum score; the lowest one is chosen.
    pub tied: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDecision {
    pub theta0: f64,
    pub stages: Vec<String>,
    pub trace: Vec<RefinementRound>,
}

/// Largest `m` such that `10^-m` is strictly below `width` (with a relative
/// tolerance so that e.g. a width of 0.1 yields a 0.01 step).
fn initial_exponent(width: f64) -> i32 {
    let mut m = 0;
    while 10f64.powi(-m) >= width * (1.0 - 1e-9) {
        m += 1;
    }
    m
}

/// Grid boundaries `{lo} U {k / 10^m strictly inside} U {hi}`.
fn decimal_boundaries(iv: &Interval, m: i32) -> Vec<f64> {
    let scale = 10f64.powi(m);
    let tol = 1e-9;
    let mut pts = vec![iv.lo];
    let mut k = (iv.lo * scale).floor() as i64;
    loop {
        let v = k as f64 / scale;
        if v >= iv.hi - tol / scale {
            break;
        }
        if v > iv.lo + tol / scale {
            pts.push(v);
        }
        k += 1;
    }
    pts.push(iv.hi);
    pts
}

pub fn refine_threshold(
    matrices: &[(&str, &CorrelationMatrix)],
    interval: &Interval,
    d_final: f64,
) -> Result<ThresholdDecision> {
    let curves: Vec<ComponentCurve> = matrices.iter().map(|(_, m)| ComponentCurve::new(m)).collect();
    refine_with_curves(
        matrices.iter().map(|(s, _)| s.to_string()).collect(),
        &curves,
        interval,
        d_final,
    )
}

fn refine_with_curves(
    stages: Vec<String>,
    curves: &[ComponentCurve],
    interval: &Interval,
    d_final: f64,
) -> Result<ThresholdDecision> {
    if !(d_final > 0.0) {
        return Err(Error::config("d_final must be positive"));
    }
    if curves.is_empty() {
        return Err(Error::data("refinement needs at least one stage"));
    }
    if !(interval.width() > d_final) {
        return Err(Error::numeric(format!(
            "interval {interval} is degenerate for final step {d_final}"
        )));
    }
    let mut current = *interval;
    let mut m = initial_exponent(current.width());
    let mut trace = Vec::new();
    loop {
        let step = 10f64.powi(-m);
        let bounds = decimal_boundaries(&current, m);
        let counts: Vec<Vec<usize>> = curves
            .iter()
            .map(|c| bounds.iter().map(|&t| c.count(t)).collect())
            .collect();
        let (chosen, min_score) = most_stable_cell(&counts).expect("at least one cell");
        let cells: Vec<CellScore> = (0..bounds.len() - 1)
            .map(|k| CellScore {
                lo: bounds[k],
                hi: bounds[k + 1],
                counts_lo: counts.iter().map(|c| c[k]).collect(),
                counts_hi: counts.iter().map(|c| c[k + 1]).collect(),
                score: cell_change(&counts, k),
            })
            .collect();
        let tied = cells.iter().filter(|c| c.score == min_score).count();
        let next = Interval {
            lo: bounds[chosen],
            hi: bounds[chosen + 1],
        };
        trace.push(RefinementRound {
            interval: current,
            step,
            cells,
            chosen,
            tied,
        });
        current = next;
        if step / 10.0 < d_final * (1.0 - 1e-9) {
            break;
        }
        m += 1;
    }
    Ok(ThresholdDecision {
        theta0: current.lo,
        stages,
        trace,
    })
}

/// Everything produced by the full three-step search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearch {
    pub summaries: Vec<CorrSummary>,
    pub sigma_interval: Interval,
    pub profile: ComponentProfile,
    pub coarse_interval: Interval,
    pub decision: ThresholdDecision,
}

/// Runs all three steps on per-stage correlation matrices.
pub fn search_threshold(
    matrices: &[(&str, &CorrelationMatrix)],
    grid: &[f64],
    d_final: f64,
) -> Result<ThresholdSearch> {
    validate_grid(grid)?;
    let summaries = matrices
        .iter()
        .map(|(_, m)| corr_summary(m))
        .collect::<Result<Vec<_>>>()?;
    let sigma_interval = shared_sigma_interval(&summaries)?;
    let stages: Vec<String> = matrices.iter().map(|(s, _)| s.to_string()).collect();
    let curves: Vec<ComponentCurve> = matrices.iter().map(|(_, m)| ComponentCurve::new(m)).collect();
    let profile = profile_from_curves(stages.clone(), &curves, grid);
    let coarse_interval = select_coarse_interval(&profile, &sigma_interval)?;
    let decision = refine_with_curves(stages, &curves, &coarse_interval, d_final)?;
    Ok(ThresholdSearch {
        summaries,
        sigma_interval,
        profile,
        coarse_interval,
        decision,
    })
}

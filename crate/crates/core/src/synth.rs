//! Seeded synthetic inputs: factor-model price panels with stage-dependent
//! correlation strength, matching sector and fundamentals tables, and a
//! preferential-attachment graph generator.

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::ingest::{Phase, PriceRecord, StageSpec};
use crate::sector::Sector;

/// Loadings for one synthetic stage.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticStage {
    pub name: String,
    pub phase: Phase,
    /// Number of weekly returns in the stage.
    pub weeks: usize,
    /// Average loading on the market factor.
    pub market: f64,
    /// Average loading on the ticker's block factor.
    pub block: f64,
    /// Weekly drift of every log price.
    pub drift: f64,
}

/// A market of `tickers` stocks in `blocks` groups, observed weekly.
///
/// Weekly log returns are `a_i m_t + b_i f_{g(i),t} + e_it` with standard
/// normal factors and idiosyncratic noise scaled by `noise`. Per-ticker
/// loadings are the stage averages times a ticker-specific multiplier drawn
/// once from `[0.5, 1.5]`, so pairwise correlations spread out.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticMarket {
    pub tickers: usize,
    pub blocks: usize,
    pub noise: f64,
    /// Friday of the first price observation.
    pub start: NaiveDate,
    pub stages: Vec<SyntheticStage>,
    /// Append a ticker named with an `ST` prefix.
    pub st_ticker: bool,
    /// Append a ticker with a gap in its price history.
    pub gappy_ticker: bool,
    /// Append a ticker whose price stays flat for this many weeks.
    pub suspended_weeks: Option<usize>,
}

/// Output of [`SyntheticMarket::generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub records: Vec<PriceRecord>,
    pub stages: Vec<StageSpec>,
    /// Tickers in generation order, regular ones first.
    pub tickers: Vec<String>,
    /// Block index of every regular ticker.
    pub blocks: Vec<usize>,
    /// Ticker-specific loading multipliers of the regular tickers.
    pub multipliers: Vec<f64>,
}

impl SyntheticMarket {
    /// Regular-ticker code for index `i`.
    pub fn ticker_name(i: usize) -> String {
        format!("{:06}", 600_000 + i)
    }

    /// Returns per regular ticker as `series[i][t]`, concatenated over
    /// stages, together with block assignment and multipliers.
    pub fn returns(&self, seed: u64) -> Result<(Vec<Vec<f64>>, Vec<usize>, Vec<f64>)> {
        if self.tickers == 0 || self.blocks == 0 || self.stages.is_empty() {
            return Err(Error::config("synthetic market needs tickers, blocks and stages"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks: Vec<usize> = (0..self.tickers).map(|i| i % self.blocks).collect();
        let mult: Vec<f64> = (0..self.tickers).map(|_| rng.random_range(0.5..1.5)).collect();
        let total: usize = self.stages.iter().map(|s| s.weeks).sum();
        let mut series = vec![Vec::with_capacity(total); self.tickers];
        for stage in &self.stages {
            for _ in 0..stage.weeks {
                let m: f64 = rng.sample(StandardNormal);
                let f: Vec<f64> = (0..self.blocks).map(|_| rng.sample(StandardNormal)).collect();
                for i in 0..self.tickers {
                    let e: f64 = rng.sample(StandardNormal);
                    let r = stage.drift
                        + 0.01 * (stage.market * mult[i] * m + stage.block * mult[i] * f[blocks[i]] + self.noise * e);
                    series[i].push(r);
                }
            }
        }
        Ok((series, blocks, mult))
    }

    /// Weekly price records and the matching stage windows. Adjacent stages
    /// share their boundary Friday.
    pub fn generate(&self, seed: u64) -> Result<SyntheticData> {
        let (series, blocks, multipliers) = self.returns(seed)?;
        let total = series[0].len();
        let dates: Vec<NaiveDate> = (0..=total)
            .map(|k| self.start + Days::new(7 * k as u64))
            .collect();

        let mut stages = Vec::with_capacity(self.stages.len());
        let mut offset = 0;
        for s in &self.stages {
            let start = dates[offset];
            offset += s.weeks;
            stages.push(StageSpec::new(s.name.clone(), start, dates[offset], s.phase)?);
        }

        let mut tickers: Vec<String> = (0..self.tickers).map(Self::ticker_name).collect();
        let mut records = Vec::with_capacity((total + 1) * (self.tickers + 3));
        let push_path = |name: &str, rets: &[f64], skip: Option<usize>, records: &mut Vec<PriceRecord>| -> Result<()> {
            let mut log_p = (10.0f64).ln();
            for (k, date) in dates.iter().enumerate() {
                if k > 0 {
                    log_p += rets[k - 1];
                }
                if Some(k) != skip {
                    records.push(PriceRecord::new(*date, name, round_price(log_p.exp()))?);
                }
            }
            Ok(())
        };
        for (i, name) in tickers.iter().enumerate() {
            push_path(name, &series[i], None, &mut records)?;
        }

        // extra tickers reuse the first series so they would otherwise pass
        let mut extra = Vec::new();
        if self.st_ticker {
            extra.push(("ST6001".to_string(), series[0].clone(), None));
        }
        if self.gappy_ticker {
            extra.push(("600998".to_string(), series[1 % self.tickers].clone(), Some(total / 2)));
        }
        if let Some(weeks) = self.suspended_weeks {
            let mut flat = series[2 % self.tickers].clone();
            let begin = 3.min(total);
            for r in flat.iter_mut().skip(begin).take(weeks) {
                *r = 0.0;
            }
            extra.push(("600999".to_string(), flat, None));
        }
        for (name, rets, skip) in &extra {
            push_path(name, rets, *skip, &mut records)?;
            tickers.push(name.clone());
        }
        Ok(SyntheticData {
            records,
            stages,
            tickers,
            blocks,
            multipliers,
        })
    }

    /// The configuration behind the bundled example dataset: 40 tickers over
    /// a bull and a bear stage. 37 regular tickers in 8 blocks, plus one
    /// ST-prefixed, one gappy and one suspended ticker.
    pub fn bundled() -> Self {
        SyntheticMarket {
            tickers: 37,
            blocks: 8,
            noise: 2.0,
            start: NaiveDate::from_ymd_opt(2015, 1, 2).expect("valid date"),
            stages: vec![
                SyntheticStage {
                    name: "BULL A".into(),
                    phase: Phase::Bull,
                    weeks: 104,
                    market: 1.2,
                    block: 1.6,
                    drift: 0.004,
                },
                SyntheticStage {
                    name: "BEAR A".into(),
                    phase: Phase::Bear,
                    weeks: 104,
                    market: 1.8,
                    block: 1.4,
                    drift: -0.003,
                },
            ],
            st_ticker: true,
            gappy_ticker: true,
            suspended_weeks: Some(12),
        }
    }
}

/// Prices are stored to four decimals, like a typical vendor export.
fn round_price(p: f64) -> f64 {
    (p * 1e4).round() / 1e4
}

/// Sector label for each block, cycling through the GICS list.
pub fn block_sector(block: usize) -> Sector {
    Sector::ALL[block % Sector::ALL.len()]
}

/// Firm characteristics loosely tied to the factor loadings, so a regression
/// of centrality on them has something to find. Columns follow
/// [`crate::qap::FUNDAMENTAL_COLUMNS`] plus `financing`.
pub fn fundamentals_table(multipliers: &[f64], seed: u64) -> Vec<[f64; 7]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    multipliers
        .iter()
        .map(|&m| {
            let mut z = || -> f64 { rng.sample(StandardNormal) };
            let current = 1.5 + 0.3 * z();
            let quick = current - 0.4 + 0.1 * z();
            let leverage = 0.5 + 0.1 * z();
            let turnover = 2.0 + 1.5 * (m - 1.0) + 0.3 * z();
            let roe = 0.08 + 0.03 * z();
            let market_value = 50.0 * m + 10.0 * z();
            let financing = 5.0 * m + 1.0 * z();
            [current, quick, leverage, turnover, roe, market_value, financing]
        })
        .collect()
}

/// Barabasi-Albert preferential attachment: start from a clique on
/// `m + 1` nodes, then attach each new node to `m` distinct existing nodes
/// chosen with probability proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Network> {
    if m == 0 || n <= m {
        return Err(Error::config("preferential attachment needs 0 < m < n"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * m);
    // every edge endpoint once; sampling from it is degree-proportional
    let mut ends: Vec<usize> = Vec::with_capacity(2 * n * m);
    for i in 0..=m {
        for j in i + 1..=m {
            edges.push((i, j));
            ends.push(i);
            ends.push(j);
        }
    }
    for v in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let u = ends[rng.random_range(0..ends.len())];
            if !targets.contains(&u) {
                targets.push(u);
            }
        }
        for &u in &targets {
            edges.push((u, v));
            ends.push(u);
            ends.push(v);
        }
    }
    Network::unlabeled(n, false, &edges)
}

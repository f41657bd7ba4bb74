//! Price panel loading, universe filtering, stage slicing and log returns.
//!
//! Prices arrive as long-format CSV (`date,ticker,close`) and are pivoted
//! into a dense date x ticker panel whose cells may be missing. Missing
//! cells are tolerated at load time; after [`filter_universe`] every
//! retained ticker is complete inside every stage window.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One observation from the input stream.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceRecord {
    pub date: NaiveDate,
    pub ticker: String,
    pub close: f64,
}

impl PriceRecord {
    pub fn new(date: NaiveDate, ticker: impl Into<String>, close: f64) -> Result<Self> {
        let ticker = ticker.into();
        if ticker.trim().is_empty() {
            return Err(Error::data("empty ticker"));
        }
        if !(close.is_finite() && close > 0.0) {
            return Err(Error::data(format!(
                "non-positive price {close} for {ticker} on {date}"
            )));
        }
        Ok(PriceRecord {
            date,
            ticker,
            close,
        })
    }
}

/// Dense date x ticker matrix of closing prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    // row-major: prices[t][i]
    prices: Vec<Vec<Option<f64>>>,
}

impl PricePanel {
    /// Builds a panel, checking ordering and shape.
    pub fn new(
        dates: Vec<NaiveDate>,
        tickers: Vec<String>,
        prices: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::data("panel dates must be strictly increasing"));
        }
        let unique: BTreeSet<&String> = tickers.iter().collect();
        if unique.len() != tickers.len() {
            return Err(Error::data("panel tickers must be unique"));
        }
        if prices.len() != dates.len() || prices.iter().any(|row| row.len() != tickers.len()) {
            return Err(Error::data("panel matrix shape does not match date/ticker lists"));
        }
        for row in &prices {
            for p in row.iter().flatten() {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::data(format!("non-positive price {p} in panel")));
                }
            }
        }
        Ok(PricePanel {
            dates,
            tickers,
            prices,
        })
    }

    /// Pivots records into a panel over the union of their dates.
    ///
    /// Exact duplicates collapse; a repeated `(date, ticker)` with a
    /// different price is an error.
    pub fn from_records(records: &[PriceRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::data("no price records"));
        }
        let mut cells: BTreeMap<(NaiveDate, &str), f64> = BTreeMap::new();
        let mut dates = BTreeSet::new();
        let mut tickers = BTreeSet::new();
        for r in records {
            if !(r.close.is_finite() && r.close > 0.0) {
                return Err(Error::data(format!(
                    "non-positive price {} for {} on {}",
                    r.close, r.ticker, r.date
                )));
            }
            dates.insert(r.date);
            tickers.insert(r.ticker.as_str());
            if let Some(prev) = cells.insert((r.date, r.ticker.as_str()), r.close) {
                if prev != r.close {
                    return Err(Error::data(format!(
                        "conflicting prices for {} on {}: {} vs {}",
                        r.ticker, r.date, prev, r.close
                    )));
                }
            }
        }
        let dates: Vec<NaiveDate> = dates.into_iter().collect();
        let tickers: Vec<String> = tickers.into_iter().map(str::to_owned).collect();
        let prices = dates
            .iter()
            .map(|d| {
                tickers
                    .iter()
                    .map(|t| cells.get(&(*d, t.as_str())).copied())
                    .collect()
            })
            .collect();
        Ok(PricePanel {
            dates,
            tickers,
            prices,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn get(&self, t: usize, i: usize) -> Option<f64> {
        self.prices[t][i]
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.prices
    }

    /// Price column for one ticker.
    pub fn column(&self, i: usize) -> Vec<Option<f64>> {
        self.prices.iter().map(|row| row[i]).collect()
    }

    /// Positions of missing cells as `(date index, ticker index)`.
    pub fn missing_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, row) in self.prices.iter().enumerate() {
            for (i, cell) in row.iter().enumerate() {
                if cell.is_none() {
                    out.push((t, i));
                }
            }
        }
        out
    }

    fn select(&self, date_idx: &[usize], ticker_idx: &[usize]) -> PricePanel {
        PricePanel {
            dates: date_idx.iter().map(|&t| self.dates[t]).collect(),
            tickers: ticker_idx.iter().map(|&i| self.tickers[i].clone()).collect(),
            prices: date_idx
                .iter()
                .map(|&t| ticker_idx.iter().map(|&i| self.prices[t][i]).collect())
                .collect(),
        }
    }
}

/// Column names used when reading a price CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub date: String,
    pub ticker: String,
    pub close: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            date: "date".into(),
            ticker: "ticker".into(),
            close: "close".into(),
        }
    }
}

/// A row that could not be parsed. Line numbers are 1-based and count the header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct LoadedPrices {
    pub panel: PricePanel,
    pub rejected: Vec<RejectedRow>,
}

/// Reads a long-format price CSV into a [`PricePanel`].
///
/// Rows with an unparseable date or price, or a blank ticker, are collected
/// in `rejected`. A parsed price that is zero or negative aborts the load.
pub fn load_prices<R: Read>(source: R, schema: &CsvSchema) -> Result<LoadedPrices> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::data(format!("price CSV has no `{name}` column")))
    };
    let (di, ti, ci) = (col(&schema.date)?, col(&schema.ticker)?, col(&schema.close)?);

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k as u64 + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                rejected.push(RejectedRow {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let field = |i: usize| row.get(i).unwrap_or("");
        let date = match NaiveDate::parse_from_str(field(di), "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                rejected.push(RejectedRow {
                    line,
                    reason: format!("unparseable date `{}`", field(di)),
                });
                continue;
            }
        };
        let ticker = field(ti);
        if ticker.is_empty() {
            rejected.push(RejectedRow {
                line,
                reason: "empty ticker".into(),
            });
            continue;
        }
        let close: f64 = match field(ci).parse() {
            Ok(c) => c,
            Err(_) => {
                rejected.push(RejectedRow {
                    line,
                    reason: format!("unparseable close `{}`", field(ci)),
                });
                continue;
            }
        };
        if !close.is_finite() || close <= 0.0 {
            return Err(Error::data(format!(
                "line {line}: non-positive price {close} for {ticker} on {date}"
            )));
        }
        records.push(PriceRecord {
            date,
            ticker: ticker.to_owned(),
            close,
        });
    }
    if records.is_empty() {
        return Err(Error::data("price input contains no usable rows"));
    }
    Ok(LoadedPrices {
        panel: PricePanel::from_records(&records)?,
        rejected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Bull,
    Bear,
}

/// A named analysis window. Both boundary dates are inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSpec {
    pub name: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub phase: Phase,
}

impl StageSpec {
    pub fn new(name: impl Into<String>, start: NaiveDate, end: NaiveDate, phase: Phase) -> Result<Self> {
        let name = name.into();
        if start >= end {
            return Err(Error::config(format!(
                "stage {name}: start {start} must precede end {end}"
            )));
        }
        Ok(StageSpec {
            name,
            start,
            end,
            phase,
        })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

/// The six SSE A-share stages, 2005-06-03 to 2016-01-29.
pub fn default_stages() -> Vec<StageSpec> {
    use Phase::*;
    [
        ("BULL 1", ymd(2005, 6, 3), ymd(2007, 10, 12), Bull),
        ("BEAR 1", ymd(2007, 10, 12), ymd(2008, 10, 31), Bear),
        ("BULL 2", ymd(2008, 10, 31), ymd(2009, 7, 31), Bull),
        ("BEAR 2", ymd(2009, 7, 31), ymd(2014, 3, 14), Bear),
        ("BULL 3", ymd(2014, 3, 14), ymd(2015, 6, 12), Bull),
        ("BEAR 3", ymd(2015, 6, 12), ymd(2016, 1, 29), Bear),
    ]
    .into_iter()
    .map(|(name, start, end, phase)| StageSpec {
        name: name.to_owned(),
        start,
        end,
        phase,
    })
    .collect()
}

/// Checks that stages are well formed, ordered and non-overlapping
/// (adjacent stages may share a boundary date).
pub fn validate_stages(stages: &[StageSpec]) -> Result<()> {
    if stages.is_empty() {
        return Err(Error::config("stage list is empty"));
    }
    let mut names = BTreeSet::new();
    for s in stages {
        if s.start >= s.end {
            return Err(Error::config(format!(
                "stage {}: start {} must precede end {}",
                s.name, s.start, s.end
            )));
        }
        if !names.insert(s.name.as_str()) {
            return Err(Error::config(format!("duplicate stage name {}", s.name)));
        }
    }
    for w in stages.windows(2) {
        if w[1].start < w[0].end {
            return Err(Error::config(format!(
                "stages {} and {} overlap or are out of order",
                w[0].name, w[1].name
            )));
        }
    }
    Ok(())
}

/// Parses a stage config: a JSON array of `{name, start, end, phase}`.
pub fn parse_stages(json: &str) -> Result<Vec<StageSpec>> {
    let stages: Vec<StageSpec> =
        serde_json::from_str(json).map_err(|e| Error::config(format!("stage config: {e}")))?;
    validate_stages(&stages)?;
    Ok(stages)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterRules {
    pub drop_missing: bool,
    pub drop_st_prefixes: Vec<String>,
    /// A run of this many consecutive zero returns inside one stage excludes the ticker.
    pub max_consecutive_zero_returns: usize,
}

impl Default for FilterRules {
    fn default() -> Self {
        FilterRules {
            drop_missing: true,
            drop_st_prefixes: vec!["ST".into(), "*ST".into()],
            max_consecutive_zero_returns: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionRule {
    StPrefix,
    Missing,
    ZeroReturns,
}

impl std::fmt::Display for ExclusionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExclusionRule::StPrefix => "st_prefix",
            ExclusionRule::Missing => "missing",
            ExclusionRule::ZeroReturns => "zero_returns",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exclusion {
    pub ticker: String,
    pub rule: ExclusionRule,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExclusionReport {
    pub excluded: Vec<Exclusion>,
}

impl ExclusionReport {
    pub fn rule_for(&self, ticker: &str) -> Option<ExclusionRule> {
        self.excluded
            .iter()
            .find(|e| e.ticker == ticker)
            .map(|e| e.rule)
    }
}

/// Longest run of consecutive zero log returns in a price column.
/// A missing cell breaks the run.
pub(crate) fn longest_zero_run(prices: &[Option<f64>]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for w in prices.windows(2) {
        match (w[0], w[1]) {
            (Some(a), Some(b)) if a == b => {
                run += 1;
                best = best.max(run);
            }
            _ => run = 0,
        }
    }
    best
}

/// Drops tickers that fail the exclusion rules and restricts dates to the
/// union of the stage windows.
///
/// Rules are checked in the order prefix, missing data, zero-return run; the
/// report records the first one that fires.
pub fn filter_universe(
    panel: &PricePanel,
    rules: &FilterRules,
    stages: &[StageSpec],
) -> Result<(PricePanel, ExclusionReport)> {
    if rules.max_consecutive_zero_returns < 1 {
        return Err(Error::config("max_consecutive_zero_returns must be >= 1"));
    }
    validate_stages(stages)?;

    let windows: Vec<Vec<usize>> = stages
        .iter()
        .map(|s| {
            panel
                .dates
                .iter()
                .enumerate()
                .filter(|(_, d)| s.contains(**d))
                .map(|(t, _)| t)
                .collect()
        })
        .collect();
    for (s, w) in stages.iter().zip(&windows) {
        if w.is_empty() {
            return Err(Error::data(format!(
                "stage {} ({} to {}) contains no panel dates",
                s.name, s.start, s.end
            )));
        }
    }
    let keep_dates: Vec<usize> = (0..panel.dates.len())
        .filter(|&t| stages.iter().any(|s| s.contains(panel.dates[t])))
        .collect();

    let mut report = ExclusionReport::default();
    let mut keep = Vec::new();
    for (i, ticker) in panel.tickers.iter().enumerate() {
        let exclusion = if let Some(p) = rules
            .drop_st_prefixes
            .iter()
            .find(|p| !p.is_empty() && ticker.starts_with(p.as_str()))
        {
            Some((ExclusionRule::StPrefix, format!("prefix `{p}`")))
        } else {
            let column = panel.column(i);
            let missing_in = rules.drop_missing.then(|| {
                stages
                    .iter()
                    .zip(&windows)
                    .find(|(_, w)| w.iter().any(|&t| column[t].is_none()))
                    .map(|(s, _)| s.name.clone())
            });
            if let Some(Some(stage)) = missing_in {
                Some((ExclusionRule::Missing, format!("missing data in {stage}")))
            } else {
                stages.iter().zip(&windows).find_map(|(s, w)| {
                    let slice: Vec<Option<f64>> = w.iter().map(|&t| column[t]).collect();
                    let run = longest_zero_run(&slice);
                    (run >= rules.max_consecutive_zero_returns).then(|| {
                        (
                            ExclusionRule::ZeroReturns,
                            format!("{run} consecutive zero returns in {}", s.name),
                        )
                    })
                })
            }
        };
        match exclusion {
            Some((rule, detail)) => report.excluded.push(Exclusion {
                ticker: ticker.clone(),
                rule,
                detail,
            }),
            None => keep.push(i),
        }
    }
    if keep.is_empty() {
        return Err(Error::data("every ticker was excluded; empty universe"));
    }
    Ok((panel.select(&keep_dates, &keep), report))
}

/// Log returns, column-major: `series[i][t]` is the return of ticker `i`
/// dated at `dates[t]` (the later of the two prices).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    series: Vec<Vec<f64>>,
}

impl ReturnPanel {
    /// Builds from per-ticker series. Every cell must be finite.
    pub fn new(dates: Vec<NaiveDate>, tickers: Vec<String>, series: Vec<Vec<f64>>) -> Result<Self> {
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::data("return dates must be strictly increasing"));
        }
        if series.len() != tickers.len() || series.iter().any(|s| s.len() != dates.len()) {
            return Err(Error::data("return matrix shape does not match date/ticker lists"));
        }
        if series.iter().flatten().any(|r| !r.is_finite()) {
            return Err(Error::data("non-finite return"));
        }
        Ok(ReturnPanel {
            dates,
            tickers,
            series,
        })
    }

    /// Convenience constructor with synthetic consecutive daily dates from 2000-01-01.
    pub fn from_series(tickers: Vec<String>, series: Vec<Vec<f64>>) -> Result<Self> {
        let t = series.first().map_or(0, Vec::len);
        let start = ymd(2000, 1, 1);
        let dates = (0..t).map(|k| start + chrono::Days::new(k as u64)).collect();
        ReturnPanel::new(dates, tickers, series)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    /// Number of periods, T.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.series[i]
    }

    pub fn all_series(&self) -> &[Vec<f64>] {
        &self.series
    }

    pub fn get(&self, t: usize, i: usize) -> f64 {
        self.series[i][t]
    }
}

/// `r[t] = ln P[t] - ln P[t-1]`; the output has one row fewer than the panel.
pub fn log_returns(panel: &PricePanel) -> Result<ReturnPanel> {
    if panel.dates.len() < 2 {
        return Err(Error::data("log returns need at least two dates"));
    }
    let mut series = Vec::with_capacity(panel.tickers.len());
    for (i, ticker) in panel.tickers.iter().enumerate() {
        let mut s = Vec::with_capacity(panel.dates.len() - 1);
        for t in 1..panel.dates.len() {
            let (prev, cur) = match (panel.prices[t - 1][i], panel.prices[t][i]) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::data(format!(
                        "missing price for {ticker} around {}",
                        panel.dates[t]
                    )))
                }
            };
            if prev <= 0.0 || cur <= 0.0 {
                return Err(Error::data(format!("non-positive price for {ticker}")));
            }
            s.push(cur.ln() - prev.ln());
        }
        series.push(s);
    }
    ReturnPanel::new(panel.dates[1..].to_vec(), panel.tickers.clone(), series)
}

/// Rows whose date lies in `[stage.start, stage.end]`.
pub fn slice_stage(returns: &ReturnPanel, stage: &StageSpec) -> Result<ReturnPanel> {
    let rows: Vec<usize> = (0..returns.dates.len())
        .filter(|&t| stage.contains(returns.dates[t]))
        .collect();
    if rows.is_empty() {
        return Err(Error::data(format!(
            "stage {} ({} to {}) has no return dates",
            stage.name, stage.start, stage.end
        )));
    }
    Ok(ReturnPanel {
        dates: rows.iter().map(|&t| returns.dates[t]).collect(),
        tickers: returns.tickers.clone(),
        series: returns
            .series
            .iter()
            .map(|s| rows.iter().map(|&t| s[t]).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn three_rows_one_ticker() {
        let csv = "date,ticker,close\n2020-01-03,A,10\n2020-01-10,A,11\n2020-01-17,A,12\n";
        let loaded = load_prices(csv.as_bytes(), &CsvSchema::default()).unwrap();
        assert_eq!(loaded.panel.dates().len(), 3);
        assert_eq!(loaded.panel.tickers(), ["A"]);
        assert!(loaded.panel.missing_cells().is_empty());
        assert!(loaded.rejected.is_empty());
    }

    #[test]
    fn ragged_tickers_leave_missing_cell() {
        let csv = "date,ticker,close\n\
                   2020-01-03,A,10\n2020-01-10,A,11\n2020-01-17,A,12\n\
                   2020-01-03,B,5\n2020-01-17,B,6\n";
        let panel = load_prices(csv.as_bytes(), &CsvSchema::default()).unwrap().panel;
        assert_eq!(panel.dates().len(), 3);
        assert_eq!(panel.tickers().len(), 2);
        assert_eq!(panel.missing_cells(), vec![(1, 1)]);
    }

    #[test]
    fn bad_rows_are_reported_not_dropped() {
        let csv = "date,ticker,close\n2020-01-03,A,10\n2020/01/10,A,11\n2020-01-17,A,abc\n2020-01-24,,3\n";
        let loaded = load_prices(csv.as_bytes(), &CsvSchema::default()).unwrap();
        let lines: Vec<u64> = loaded.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
        assert_eq!(loaded.panel.dates().len(), 1);
    }

    #[test]
    fn load_errors() {
        let schema = CsvSchema::default();
        assert!(load_prices("date,ticker,close\n".as_bytes(), &schema).is_err());
        assert!(load_prices("".as_bytes(), &schema).is_err());
        let conflict = "date,ticker,close\n2020-01-03,A,10\n2020-01-03,A,11\n";
        assert!(matches!(load_prices(conflict.as_bytes(), &schema), Err(Error::Data(_))));
        let same = "date,ticker,close\n2020-01-03,A,10\n2020-01-03,A,10\n";
        assert!(load_prices(same.as_bytes(), &schema).is_ok());
        let neg = "date,ticker,close\n2020-01-03,A,-1\n";
        assert!(load_prices(neg.as_bytes(), &schema).is_err());
        let zero = "date,ticker,close\n2020-01-03,A,0\n";
        assert!(load_prices(zero.as_bytes(), &schema).is_err());
    }

    #[test]
    fn custom_schema() {
        let csv = "Close,Day,Code\n10,2020-01-03,X\n";
        let schema = CsvSchema {
            date: "Day".into(),
            ticker: "Code".into(),
            close: "Close".into(),
        };
        let panel = load_prices(csv.as_bytes(), &schema).unwrap().panel;
        assert_eq!(panel.get(0, 0), Some(10.0));
    }

    #[test]
    fn log_return_basics() {
        let panel = PricePanel::new(
            vec![d("2020-01-03"), d("2020-01-10"), d("2020-01-17")],
            vec!["A".into(), "B".into()],
            vec![
                vec![Some(100.0), Some(100.0)],
                vec![Some(100.0), Some(100.0 * std::f64::consts::E)],
                vec![Some(50.0), Some(100.0)],
            ],
        )
        .unwrap();
        let r = log_returns(&panel).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.get(0, 0), 0.0);
        assert!((r.get(0, 1) - 1.0).abs() < 1e-15);
        assert!((r.get(1, 0) - (0.5f64).ln()).abs() < 1e-15);
        assert_eq!(r.dates()[0], d("2020-01-10"));
    }

    #[test]
    fn log_returns_reject_missing() {
        let panel = PricePanel::new(
            vec![d("2020-01-03"), d("2020-01-10")],
            vec!["A".into()],
            vec![vec![Some(1.0)], vec![None]],
        )
        .unwrap();
        assert!(log_returns(&panel).is_err());
        let one = PricePanel::new(vec![d("2020-01-03")], vec!["A".into()], vec![vec![Some(1.0)]]).unwrap();
        assert!(log_returns(&one).is_err());
    }

    #[test]
    fn panel_rejects_bad_shapes() {
        assert!(PricePanel::new(vec![d("2020-01-10"), d("2020-01-03")], vec!["A".into()], vec![vec![Some(1.0)], vec![Some(1.0)]]).is_err());
        assert!(PricePanel::new(vec![d("2020-01-03")], vec!["A".into(), "A".into()], vec![vec![Some(1.0), Some(1.0)]]).is_err());
        assert!(PricePanel::new(vec![d("2020-01-03")], vec!["A".into()], vec![vec![Some(0.0)]]).is_err());
        assert!(PriceRecord::new(d("2020-01-03"), "", 1.0).is_err());
        assert!(PriceRecord::new(d("2020-01-03"), "A", 0.0).is_err());
    }

    #[test]
    fn default_stages_match_table() {
        let stages = default_stages();
        assert_eq!(stages.len(), 6);
        validate_stages(&stages).unwrap();
        assert_eq!(stages[0].end, stages[1].start);
        assert_eq!(stages[0].end, d("2007-10-12"));
        assert_eq!(stages[5].end, d("2016-01-29"));
        let json = serde_json::to_string(&stages).unwrap();
        assert_eq!(parse_stages(&json).unwrap(), stages);
    }

    #[test]
    fn stage_config_validation() {
        assert!(parse_stages("[]").is_err());
        let bad = r#"[{"name":"A","start":"2020-02-01","end":"2020-01-01","phase":"bull"}]"#;
        assert!(parse_stages(bad).is_err());
        let overlap = r#"[{"name":"A","start":"2020-01-01","end":"2020-03-01","phase":"bull"},
                          {"name":"B","start":"2020-02-01","end":"2020-04-01","phase":"bear"}]"#;
        assert!(parse_stages(overlap).is_err());
        assert!(StageSpec::new("x", d("2020-01-01"), d("2020-01-01"), Phase::Bull).is_err());
    }

    #[test]
    fn zero_run_lengths() {
        let p = |v: &[f64]| v.iter().map(|x| Some(*x)).collect::<Vec<_>>();
        assert_eq!(longest_zero_run(&p(&[1.0, 2.0, 3.0])), 0);
        assert_eq!(longest_zero_run(&p(&[1.0, 1.0, 1.0, 2.0, 2.0])), 2);
        assert_eq!(longest_zero_run(&[Some(1.0), None, Some(1.0)]), 0);
    }
}

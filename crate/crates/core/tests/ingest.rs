mod common;

use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use stocknet::ingest::{
    default_stages, filter_universe, load_prices, log_returns, parse_stages, slice_stage, CsvSchema, ExclusionRule,
    FilterRules, Phase, PricePanel, PriceRecord, ReturnPanel, StageSpec,
};

fn d(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

fn weekly(start: &str, n: usize) -> Vec<NaiveDate> {
    (0..n).map(|k| d(start) + Duration::weeks(k as i64)).collect()
}

fn panel(dates: &[NaiveDate], columns: &[(&str, Vec<Option<f64>>)]) -> PricePanel {
    let mut records = Vec::new();
    for (name, col) in columns {
        for (t, p) in col.iter().enumerate() {
            if let Some(p) = p {
                records.push(PriceRecord::new(dates[t], *name, *p).unwrap());
            }
        }
    }
    PricePanel::from_records(&records).unwrap()
}

#[test]
fn twelve_row_fixture() {
    let loaded = load_prices(common::TWELVE_ROWS.as_bytes(), &CsvSchema::default()).unwrap();
    let p = &loaded.panel;
    assert_eq!(p.tickers(), &["A".to_string(), "B".to_string()]);
    assert_eq!(p.dates(), weekly("2020-01-03", 6).as_slice());
    assert_eq!(p.column(0), vec![Some(10.0), Some(10.5), Some(11.0), Some(10.8), Some(11.2), Some(11.1)]);
    assert_eq!(p.column(1), vec![Some(20.0), Some(19.0), Some(19.5), None, Some(21.0), Some(20.5)]);
    assert_eq!(p.missing_cells(), vec![(3, 1)]);
    assert_eq!(loaded.rejected.len(), 1);
    assert_eq!(loaded.rejected[0].line, 9);
}

#[test]
fn alignment_flags_missing_cell() {
    let csv = "date,ticker,close\n2020-01-03,A,1\n2020-01-10,A,2\n2020-01-17,A,3\n2020-01-03,B,1\n2020-01-17,B,2\n";
    let p = load_prices(csv.as_bytes(), &CsvSchema::default()).unwrap().panel;
    assert_eq!((p.dates().len(), p.tickers().len()), (3, 2));
    assert_eq!(p.missing_cells(), vec![(1, 1)]);
}

#[test]
fn load_errors() {
    let schema = CsvSchema::default();
    assert!(load_prices("date,ticker,close\n".as_bytes(), &schema).is_err());
    assert!(load_prices("".as_bytes(), &schema).is_err());
    let dup = "date,ticker,close\n2020-01-03,A,1\n2020-01-03,A,2\n";
    assert!(load_prices(dup.as_bytes(), &schema).is_err());
    let neg = "date,ticker,close\n2020-01-03,A,-1\n";
    assert!(load_prices(neg.as_bytes(), &schema).is_err());
    let custom = CsvSchema {
        date: "Date".into(),
        ticker: "Code".into(),
        close: "Adj".into(),
    };
    let ok = "Code,Date,Adj\nA,2020-01-03,5\n";
    assert_eq!(load_prices(ok.as_bytes(), &custom).unwrap().panel.get(0, 0), Some(5.0));
}

fn one_stage(dates: &[NaiveDate]) -> Vec<StageSpec> {
    vec![StageSpec::new("S", dates[0], *dates.last().unwrap(), Phase::Bull).unwrap()]
}

#[test]
fn exclusion_rules() {
    let dates = weekly("2020-01-03", 20);
    let varying: Vec<Option<f64>> = (0..20).map(|t| Some(10.0 + t as f64 * 0.1)).collect();
    // eleven identical closes = ten zero returns
    let flat10: Vec<Option<f64>> = (0..20).map(|t| Some(if (3..14).contains(&t) { 7.0 } else { 8.0 + t as f64 })).collect();
    // ten identical closes = nine zero returns
    let flat9: Vec<Option<f64>> = (0..20).map(|t| Some(if (3..13).contains(&t) { 7.0 } else { 8.0 + t as f64 })).collect();
    let mut gap = varying.clone();
    gap[5] = None;
    let p = panel(
        &dates,
        &[
            ("ST0001", varying.clone()),
            ("600000", varying.clone()),
            ("600001", flat10),
            ("600002", flat9),
            ("600003", gap),
        ],
    );
    let (kept, report) = filter_universe(&p, &FilterRules::default(), &one_stage(&dates)).unwrap();
    assert_eq!(report.rule_for("ST0001"), Some(ExclusionRule::StPrefix));
    assert_eq!(report.rule_for("600001"), Some(ExclusionRule::ZeroReturns));
    assert_eq!(report.rule_for("600003"), Some(ExclusionRule::Missing));
    assert_eq!(report.rule_for("600000"), None);
    assert_eq!(report.rule_for("600002"), None);
    assert_eq!(kept.tickers(), &["600000".to_string(), "600002".to_string()]);

    // filtering is idempotent
    let (again, report2) = filter_universe(&kept, &FilterRules::default(), &one_stage(&dates)).unwrap();
    assert_eq!(again.tickers(), kept.tickers());
    assert_eq!(again.rows(), kept.rows());
    assert!(report2.excluded.is_empty());

    let bad = FilterRules {
        max_consecutive_zero_returns: 0,
        ..FilterRules::default()
    };
    assert!(filter_universe(&p, &bad, &one_stage(&dates)).is_err());
    let only_st = panel(&dates, &[("ST0002", varying)]);
    assert!(filter_universe(&only_st, &FilterRules::default(), &one_stage(&dates)).is_err());
}

#[test]
fn log_return_cases() {
    let dates = weekly("2020-01-03", 5);
    let e = std::f64::consts::E;
    let p = panel(&dates[..2], &[("A", vec![Some(100.0), Some(100.0)]), ("B", vec![Some(100.0), Some(100.0 * e)])]);
    let r = log_returns(&p).unwrap();
    assert_eq!(r.get(0, 0), 0.0);
    assert!((r.get(0, 1) - 1.0).abs() < 1e-15);
    assert_eq!(r.dates(), &dates[1..2]);

    // random-walk fixture against a spreadsheet-style recomputation
    let prices = [12.0, 12.6, 11.9, 12.4, 13.1];
    let p = panel(&dates, &[("A", prices.iter().map(|&x| Some(x)).collect())]);
    let r = log_returns(&p).unwrap();
    for t in 0..4 {
        let expect = (prices[t + 1] / prices[t]).ln();
        assert!((r.get(t, 0) - expect).abs() < 1e-15);
    }
    let mut gap: Vec<Option<f64>> = prices.iter().map(|&x| Some(x)).collect();
    gap[2] = None;
    let full = prices.iter().map(|&x| Some(x)).collect();
    assert!(log_returns(&panel(&dates, &[("A", gap), ("B", full)])).is_err());
}

#[test]
fn stage_slicing() {
    let dates = weekly("2007-09-28", 5); // includes 2007-10-12
    let r = ReturnPanel::new(dates.clone(), vec!["A".into()], vec![vec![0.1, 0.2, 0.3, 0.4, 0.5]]).unwrap();
    let stages = default_stages();
    let bull1 = slice_stage(&r, &stages[0]).unwrap();
    let bear1 = slice_stage(&r, &stages[1]).unwrap();
    assert!(bull1.dates().contains(&d("2007-10-12")));
    assert!(bear1.dates().contains(&d("2007-10-12")));
    let all = StageSpec::new("all", dates[0], dates[4], Phase::Bear).unwrap();
    assert_eq!(slice_stage(&r, &all).unwrap(), r);
    let none = StageSpec::new("none", d("2030-01-01"), d("2030-06-01"), Phase::Bear).unwrap();
    assert!(slice_stage(&r, &none).is_err());
}

#[test]
fn default_stage_table() {
    let s = default_stages();
    assert_eq!(s.len(), 6);
    assert_eq!(s[0].end, d("2007-10-12"));
    assert_eq!(s[1].start, d("2007-10-12"));
    assert_eq!(s[5].end, d("2016-01-29"));
    let json = serde_json::to_string(&s).unwrap();
    assert_eq!(parse_stages(&json).unwrap(), s);
    let overlap = r#"[{"name":"a","start":"2020-01-01","end":"2020-03-01","phase":"bull"},
                      {"name":"b","start":"2020-02-01","end":"2020-04-01","phase":"bear"}]"#;
    assert!(parse_stages(overlap).is_err());
}

proptest! {
    #[test]
    fn returns_round_trip(steps in proptest::collection::vec(-0.2f64..0.2, 2..40), p0 in 1.0f64..500.0) {
        let mut prices = vec![p0];
        for s in &steps {
            prices.push(prices.last().unwrap() * s.exp());
        }
        let dates = weekly("2019-01-04", prices.len());
        let p = panel(&dates, &[("A", prices.iter().map(|&x| Some(x)).collect())]);
        let r = log_returns(&p).unwrap();
        let mut acc = 0.0;
        for (t, price) in prices.iter().enumerate().skip(1) {
            acc += r.get(t - 1, 0);
            let rebuilt = p0 * acc.exp();
            prop_assert!(((rebuilt - price) / price).abs() < 1e-12);
        }
    }

    #[test]
    fn adjacent_stages_partition_rows(n in 6usize..40, cut in 1usize..5) {
        let dates = weekly("2019-01-04", n);
        let cut = cut.min(n - 2);
        let r = ReturnPanel::new(dates.clone(), vec!["A".into()], vec![(0..n).map(|t| t as f64).collect()]).unwrap();
        let a = StageSpec::new("a", dates[0], dates[cut], Phase::Bull).unwrap();
        let b = StageSpec::new("b", dates[cut], dates[n - 1], Phase::Bear).unwrap();
        let (sa, sb) = (slice_stage(&r, &a).unwrap(), slice_stage(&r, &b).unwrap());
        // the shared boundary row is counted twice
        prop_assert_eq!(sa.len() + sb.len(), n + 1);
        prop_assert_eq!(sa.dates().last(), sb.dates().first());
    }

    #[test]
    fn zero_run_exclusion_matches_run_length(run in 1usize..15, max in 1usize..12) {
        let n = 30;
        let dates = weekly("2019-01-04", n);
        let col: Vec<Option<f64>> = (0..n).map(|t| Some(if (5..5 + run + 1).contains(&t) { 3.0 } else { 4.0 + t as f64 })).collect();
        let p = panel(&dates, &[("A", col), ("B", (0..n).map(|t| Some(1.0 + t as f64)).collect())]);
        let rules = FilterRules { max_consecutive_zero_returns: max, ..FilterRules::default() };
        let (_, report) = filter_universe(&p, &rules, &one_stage(&dates)).unwrap();
        let excluded = report.rule_for("A") == Some(ExclusionRule::ZeroReturns);
        prop_assert_eq!(excluded, run >= max);
    }
}

//! CSV/JSON table writers and SVG rendering of the degree-distribution plots.
//!
//! Tables put stages in rows. Floats are written with Rust's shortest
//! round-trip formatting so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use serde::Serialize;

use crate::causality::PValueMatrix;
use crate::centrality::{Centralization, CentralityVector, DegreeDistribution, PowerLawFit};
use crate::correlation::{CorrSummary, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::graph::{Network, TopologySummary};
use crate::ingest::{ExclusionReport, ReturnPanel};
use crate::qap::{stars, QapResult};
use crate::sector::SectorReport;
use crate::threshold::{ComponentProfile, ThresholdDecision};

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::data(format!("csv buffer: {}", e.error())))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn exclusions_csv(report: &ExclusionReport) -> Result<Vec<u8>> {
    table(
        &["ticker", "rule", "detail"],
        report
            .excluded
            .iter()
            .map(|e| vec![e.ticker.clone(), e.rule.to_string(), e.detail.clone()]),
    )
}

/// Long format `date,ticker,return`.
pub fn returns_csv(returns: &ReturnPanel) -> Result<Vec<u8>> {
    let mut rows = Vec::with_capacity(returns.len() * returns.n_tickers());
    for (t, date) in returns.dates().iter().enumerate() {
        for (i, ticker) in returns.tickers().iter().enumerate() {
            rows.push(vec![date.to_string(), ticker.clone(), returns.get(t, i).to_string()]);
        }
    }
    table(&["date", "ticker", "return"], rows)
}

pub fn corr_summary_csv(stages: &[String], summaries: &[CorrSummary]) -> Result<Vec<u8>> {
    table(
        &["stage", "mu", "sigma", "mu_minus_3sigma", "mu_plus_3sigma"],
        stages.iter().zip(summaries).map(|(s, c)| {
            vec![s.clone(), c.mu.to_string(), c.sigma.to_string(), c.lo3.to_string(), c.hi3.to_string()]
        }),
    )
}

/// Upper triangle of every stage matrix: `stage,ticker_a,ticker_b,rho`.
pub fn correlations_csv(stages: &[String], matrices: &[CorrelationMatrix]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (s, m) in stages.iter().zip(matrices) {
        for i in 0..m.n() {
            for j in i + 1..m.n() {
                rows.push(vec![
                    s.clone(),
                    m.tickers()[i].clone(),
                    m.tickers()[j].clone(),
                    m.rho(i, j).to_string(),
                ]);
            }
        }
    }
    table(&["stage", "ticker_a", "ticker_b", "rho"], rows)
}

/// Largest-component sizes: one row per stage, one column per grid value.
pub fn profile_csv(profile: &ComponentProfile) -> Result<Vec<u8>> {
    let mut header = vec!["stage".to_string()];
    header.extend(profile.grid.iter().map(|t| t.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    table(
        &header,
        profile.stages.iter().zip(&profile.counts).map(|(s, counts)| {
            let mut row = vec![s.clone()];
            row.extend(counts.iter().map(usize::to_string));
            row
        }),
    )
}

/// Every scored cell of every refinement round.
pub fn refinement_csv(decision: &ThresholdDecision) -> Result<Vec<u8>> {
    let mut header: Vec<String> = ["round", "step", "lo", "hi", "score", "chosen"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for s in &decision.stages {
        header.push(format!("{s} @lo"));
        header.push(format!("{s} @hi"));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for (r, round) in decision.trace.iter().enumerate() {
        for (c, cell) in round.cells.iter().enumerate() {
            let mut row = vec![
                (r + 1).to_string(),
                round.step.to_string(),
                cell.lo.to_string(),
                cell.hi.to_string(),
                cell.score.to_string(),
                (c == round.chosen).to_string(),
            ];
            for (a, b) in cell.counts_lo.iter().zip(&cell.counts_hi) {
                row.push(a.to_string());
                row.push(b.to_string());
            }
            rows.push(row);
        }
    }
    table(&header, rows)
}

/// `stage,source,target` for every edge (undirected edges once, `source < target`).
pub fn edges_csv(stages: &[String], nets: &[Network]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (s, net) in stages.iter().zip(nets) {
        for (a, b) in net.edges() {
            rows.push(vec![s.clone(), net.tickers()[a].clone(), net.tickers()[b].clone()]);
        }
    }
    table(&["stage", "source", "target"], rows)
}

/// Per-stage topology with heterogeneity appended.
pub fn topology_csv(stages: &[String], topo: &[TopologySummary], heterogeneity: &[Option<f64>]) -> Result<Vec<u8>> {
    table(
        &[
            "stage",
            "nodes",
            "edges",
            "avg_path_length",
            "clustering",
            "diameter",
            "density",
            "components",
            "largest_component",
            "heterogeneity",
        ],
        stages.iter().zip(topo).zip(heterogeneity).map(|((s, t), h)| {
            vec![
                s.clone(),
                t.n_nodes.to_string(),
                t.n_edges.to_string(),
                opt(t.avg_path_length),
                t.clustering.to_string(),
                t.diameter.to_string(),
                t.density.to_string(),
                t.n_components.to_string(),
                t.largest_component.to_string(),
                opt(*h),
            ]
        }),
    )
}

/// `stage,ticker,kind,value`.
pub fn centrality_csv(stages: &[String], vectors: &[Vec<CentralityVector>]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (s, vs) in stages.iter().zip(vectors) {
        for v in vs {
            for (t, x) in v.tickers.iter().zip(&v.values) {
                rows.push(vec![s.clone(), t.clone(), v.kind.as_str().to_string(), x.to_string()]);
            }
        }
    }
    table(&["stage", "ticker", "kind", "value"], rows)
}

/// Footer text documenting the centralization normalizers.
pub const CENTRALIZATION_NOTE: &str = "degree: sum(max - C_RD) / (N - 2); \
betweenness: sum(max - C_RB) / (N - 1); \
closeness: sum(max - C_RC) * (2N - 3) / ((N - 1)(N - 2)); star graph = 1";

pub fn centralization_csv(stages: &[String], cents: &[Option<Centralization>]) -> Result<Vec<u8>> {
    let mut out = table(
        &["stage", "degree", "betweenness", "closeness"],
        stages.iter().zip(cents).map(|(s, c)| {
            vec![
                s.clone(),
                opt(c.map(|c| c.degree)),
                opt(c.map(|c| c.betweenness)),
                opt(c.map(|c| c.closeness)),
            ]
        }),
    )?;
    writeln!(FmtBytes(&mut out), "# {CENTRALIZATION_NOTE}").expect("in-memory write");
    Ok(out)
}

struct FmtBytes<'a>(&'a mut Vec<u8>);

impl std::fmt::Write for FmtBytes<'_> {
    fn write_str(&mut self, s: &str) -> std::fmt::Result {
        self.0.extend_from_slice(s.as_bytes());
        Ok(())
    }
}

pub fn degree_cdf_csv(stages: &[String], dists: &[DegreeDistribution]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (s, d) in stages.iter().zip(dists) {
        for (k, p) in &d.cdf {
            rows.push(vec![s.clone(), k.to_string(), p.to_string()]);
        }
    }
    table(&["stage", "k", "cdf"], rows)
}

pub fn degree_loglog_csv(stages: &[String], dists: &[DegreeDistribution]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (s, d) in stages.iter().zip(dists) {
        for (x, y) in &d.loglog {
            rows.push(vec![s.clone(), x.to_string(), y.to_string()]);
        }
    }
    table(&["stage", "ln_k", "ln_pk"], rows)
}

/// One row per stage; empty fields where no fit was possible.
pub fn power_law_csv(stages: &[String], fits: &[Option<PowerLawFit>]) -> Result<Vec<u8>> {
    table(
        &["stage", "lambda", "xmin", "ks_distance", "n_tail"],
        stages.iter().zip(fits).map(|(s, f)| match f {
            Some(f) => vec![
                s.clone(),
                f.lambda.to_string(),
                f.xmin.to_string(),
                f.ks_distance.to_string(),
                f.n_tail.to_string(),
            ],
            None => vec![s.clone(), String::new(), String::new(), String::new(), String::new()],
        }),
    )
}

pub fn sectors_csv(stages: &[String], reports: &[SectorReport]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (s, rep) in stages.iter().zip(reports) {
        for r in &rep.rows {
            rows.push(vec![
                s.clone(),
                r.sector.name().to_string(),
                r.n_nodes.to_string(),
                r.intra_edges.to_string(),
                r.excluded.to_string(),
                opt(r.clustering),
                opt(r.avg_path_length),
                r.mean_degree.to_string(),
                r.mean_relative_degree.to_string(),
                opt(r.heterogeneity_full),
                opt(r.heterogeneity_intra),
            ]);
        }
    }
    table(
        &[
            "stage",
            "sector",
            "nodes",
            "intra_edges",
            "excluded",
            "clustering",
            "avg_path_length",
            "mean_degree",
            "mean_relative_degree",
            "heterogeneity_full",
            "heterogeneity_intra",
        ],
        rows,
    )
}

/// Long format `stage,test,target,source,p`; `p` tests `source -> target`.
pub fn pvalues_csv(stages: &[String], matrices: &[Vec<PValueMatrix>]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (s, ms) in stages.iter().zip(matrices) {
        for m in ms {
            let kind = serde_json::to_value(m.kind)?.as_str().unwrap_or_default().to_string();
            for i in 0..m.n() {
                for j in 0..m.n() {
                    if i != j {
                        rows.push(vec![
                            s.clone(),
                            kind.clone(),
                            m.tickers[i].clone(),
                            m.tickers[j].clone(),
                            m.p[i][j].to_string(),
                        ]);
                    }
                }
            }
        }
    }
    table(&["stage", "test", "target", "source", "p"], rows)
}

/// Generic wide table: label columns followed by one numeric column per
/// entry of `value_cols` (e.g. one per significance level).
pub fn wide_csv(label_cols: &[&str], value_cols: &[String], rows: &[(Vec<String>, Vec<f64>)]) -> Result<Vec<u8>> {
    let mut header: Vec<&str> = label_cols.to_vec();
    header.extend(value_cols.iter().map(String::as_str));
    table(
        &header,
        rows.iter().map(|(labels, values)| {
            let mut row = labels.clone();
            row.extend(values.iter().map(f64::to_string));
            row
        }),
    )
}

/// Coefficient table: rows `(stage, top_fraction)`, one column per term
/// holding the estimate with significance stars.
pub fn qap_csv(labels: &[(String, f64)], results: &[QapResult]) -> Result<Vec<u8>> {
    let terms: Vec<String> = results
        .first()
        .map(|r| r.coefficients.iter().map(|c| c.name.clone()).collect())
        .unwrap_or_default();
    let mut header = vec!["stage".to_string(), "top_fraction".to_string()];
    header.extend(terms.iter().cloned());
    header.push("r_squared".into());
    header.push("n_used".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = table(
        &header,
        labels.iter().zip(results).map(|((s, f), r)| {
            let mut row = vec![s.clone(), f.to_string()];
            for c in &r.coefficients {
                row.push(format!("{}{}", c.estimate, c.p_value.map_or("", stars)));
            }
            row.push(r.r_squared.to_string());
            row.push(r.n_used.to_string());
            row
        }),
    )?;
    writeln!(FmtBytes(&mut out), "# *** p<0.01, ** p<0.05, * p<0.1").expect("in-memory write");
    Ok(out)
}

// ---- plots ----

pub const CANVAS_WIDTH: f64 = 800.0;
pub const CANVAS_HEIGHT: f64 = 600.0;
pub const MARGIN_LEFT: f64 = 80.0;
pub const MARGIN_RIGHT: f64 = 40.0;
pub const MARGIN_TOP: f64 = 50.0;
pub const MARGIN_BOTTOM: f64 = 70.0;

/// Data-to-pixel mapping of a plot area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axes {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Axes {
    /// Bounds of the points, widened by 0.5 on each side of a degenerate range.
    pub fn fit(points: &[(f64, f64)]) -> Axes {
        let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if points.is_empty() {
            return Axes {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            };
        }
        if x_max == x_min {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if y_max == y_min {
            y_min -= 0.5;
            y_max += 0.5;
        }
        Axes {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn px(&self, x: f64) -> f64 {
        let w = CANVAS_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * w
    }

    pub fn py(&self, y: f64) -> f64 {
        let h = CANVAS_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        CANVAS_HEIGHT - MARGIN_BOTTOM - (y - self.y_min) / (self.y_max - self.y_min) * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Cdf,
    LogLog,
}

impl PlotKind {
    fn labels(&self) -> (&'static str, &'static str, &'static str) {
        match self {
            PlotKind::Cdf => ("degree_cdf", "degree k", "P(K <= k)"),
            PlotKind::LogLog => ("degree_loglog", "ln k", "ln P(k)"),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A standalone 800x600 SVG with axes, tick labels and one `circle` marker
/// per point. Empty input draws the axes and a "no data" note.
pub fn render_svg(points: &[(f64, f64)], kind: PlotKind, title: &str) -> String {
    let (_, xlabel, ylabel) = kind.labels();
    let axes = match kind {
        PlotKind::Cdf if !points.is_empty() => Axes {
            y_min: 0.0,
            y_max: 1.0,
            ..Axes::fit(points)
        },
        _ => Axes::fit(points),
    };
    let left = MARGIN_LEFT;
    let right = CANVAS_WIDTH - MARGIN_RIGHT;
    let top = MARGIN_TOP;
    let bottom = CANVAS_HEIGHT - MARGIN_BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_WIDTH}" height="{CANVAS_HEIGHT}" viewBox="0 0 {CANVAS_WIDTH} {CANVAS_HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#,
        CANVAS_WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>"#
    );
    for k in 0..=4 {
        let fx = axes.x_min + (axes.x_max - axes.x_min) * k as f64 / 4.0;
        let fy = axes.y_min + (axes.y_max - axes.y_min) * k as f64 / 4.0;
        let (x, y) = (axes.px(fx), axes.py(fy));
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{fx:.3}</text>"#,
            bottom + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end" font-family="sans-serif" font-size="12">{fy:.3}</text>"#,
            left - 8.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        (left + right) / 2.0,
        CANVAS_HEIGHT - 20.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 20 {})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(ylabel)
    );
    if points.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="16">no data</text>"#,
            (left + right) / 2.0,
            (top + bottom) / 2.0
        );
    }
    for &(x, y) in points {
        let _ = writeln!(
            s,
            r#"<circle class="marker" cx="{}" cy="{}" r="4" fill="steelblue"/>"#,
            axes.px(x),
            axes.py(y)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Lower-case file-name fragment for a stage label.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// Parses a three-column distribution CSV (`stage,x,y`) into points per
/// stage, keeping the order in which stages first appear.
pub fn read_distribution<R: Read>(source: R) -> Result<Vec<(String, Vec<(f64, f64)>)>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let header = reader.headers()?.clone();
    if header.len() != 3 || &header[0] != "stage" {
        return Err(Error::data("distribution file must have columns stage,<x>,<y>"));
    }
    let mut order: Vec<String> = Vec::new();
    let mut by_stage: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parse = |c: usize| -> Result<f64> {
            rec.get(c)
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::data(format!("distribution line {}: bad number in column {}", k + 2, c + 1)))
        };
        let stage = rec.get(0).unwrap_or("").to_string();
        let point = (parse(1)?, parse(2)?);
        if !by_stage.contains_key(&stage) {
            order.push(stage.clone());
        }
        by_stage.entry(stage).or_default().push(point);
    }
    Ok(order
        .into_iter()
        .map(|s| {
            let pts = by_stage.remove(&s).unwrap_or_default();
            (s, pts)
        })
        .collect())
}

/// Renders one SVG per stage and plot kind. `stages` lists every stage so
/// that stages absent from a file (no points) still get a "no data" plot.
/// Returns `(file name, contents)` pairs.
pub fn render_plots(
    stages: &[String],
    cdf_csv: &[u8],
    loglog_csv: &[u8],
) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for (kind, bytes) in [(PlotKind::Cdf, cdf_csv), (PlotKind::LogLog, loglog_csv)] {
        let parsed = read_distribution(bytes)?;
        let (prefix, _, _) = kind.labels();
        for stage in stages {
            let pts = parsed
                .iter()
                .find(|(s, _)| s == stage)
                .map(|(_, p)| p.as_slice())
                .unwrap_or(&[]);
            let title = format!("{prefix} - {stage}");
            out.push((
                format!("{prefix}_{}.svg", slug(stage)),
                render_svg(pts, kind, &title).into_bytes(),
            ));
        }
    }
    Ok(out)
}

//! Run configuration and the end-to-end driver behind the command-line tool.
//!
//! Every subcommand recomputes what it needs from the configured inputs,
//! writes its tables into the output directory and records each file with
//! a SHA-256 checksum in `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::causality::{
    causality_sweep, granger_linear, granger_nonlinear, NonlinearParams, PValueMatrix, SweepPoint, DEFAULT_ALPHAS,
};
use crate::centrality::{
    centralizations, degree_distribution, fit_power_law, heterogeneity, relative_betweenness,
    relative_closeness, relative_degree, Centralization, CentralityVector, DegreeDistribution, PowerLawFit,
    XminStrategy,
};
use crate::correlation::{pearson_matrix, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::graph::{build_network, topology_summary, Network, TopologySummary};
use crate::ingest::{
    default_stages, filter_universe, load_prices, log_returns, parse_stages, slice_stage, validate_stages,
    CsvSchema, ExclusionReport, FilterRules, RejectedRow, ReturnPanel, StageSpec,
};
use crate::qap::{qap_regress, Fundamentals, QapResult, RegressionSpec, FUNDAMENTAL_COLUMNS};
use crate::report;
use crate::sector::{sector_report, SectorMap, SectorReport};
use crate::threshold::{default_grid, search_threshold, ThresholdSearch};

/// Threshold search settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSettings {
    pub grid: Vec<f64>,
    pub d_final: f64,
    /// Skip the search and use this value.
    pub fixed_theta: Option<f64>,
}

impl Default for ThresholdSettings {
    fn default() -> Self {
        ThresholdSettings {
            grid: default_grid(),
            d_final: 1e-4,
            fixed_theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricSettings {
    /// Fixed power-law `xmin`; scanned when absent.
    pub power_law_xmin: Option<usize>,
}

impl Default for MetricSettings {
    fn default() -> Self {
        MetricSettings { power_law_xmin: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CausalitySettings {
    pub enabled: bool,
    pub lag: usize,
    pub alphas: Vec<f64>,
    pub nonlinear: bool,
    pub nonlinear_params: NonlinearParams,
}

impl Default for CausalitySettings {
    fn default() -> Self {
        CausalitySettings {
            enabled: true,
            lag: 1,
            alphas: DEFAULT_ALPHAS.to_vec(),
            nonlinear: false,
            nonlinear_params: NonlinearParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QapSettings {
    pub enabled: bool,
    pub regressors: Vec<String>,
    pub fractions: Vec<f64>,
    pub permutations: usize,
    pub seed: u64,
}

impl Default for QapSettings {
    fn default() -> Self {
        QapSettings {
            enabled: true,
            regressors: FUNDAMENTAL_COLUMNS.iter().map(|s| s.to_string()).collect(),
            fractions: vec![0.5, 0.75],
            permutations: 1000,
            seed: 42,
        }
    }
}

/// Contents of the JSON config file. Relative paths are resolved against
/// the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub price_csv: PathBuf,
    #[serde(default)]
    pub sector_csv: Option<PathBuf>,
    #[serde(default)]
    pub fundamentals_csv: Option<PathBuf>,
    /// `"builtin"` for the six default stages, otherwise a stage JSON path.
    #[serde(default = "builtin")]
    pub stages: String,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub schema: CsvSchema,
    #[serde(default)]
    pub filter: FilterRules,
    #[serde(default)]
    pub threshold: ThresholdSettings,
    #[serde(default)]
    pub metrics: MetricSettings,
    /// Produce per-sector tables; requires `sector_csv`.
    #[serde(default = "yes")]
    pub sector_reports: bool,
    #[serde(default)]
    pub causality: CausalitySettings,
    #[serde(default)]
    pub qap: QapSettings,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn builtin() -> String {
    "builtin".into()
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

impl RunConfig {
    /// Config with defaults for everything except the input paths.
    pub fn new(price_csv: impl Into<PathBuf>) -> Self {
        RunConfig {
            price_csv: price_csv.into(),
            sector_csv: None,
            fundamentals_csv: None,
            stages: builtin(),
            output_dir: default_out(),
            schema: CsvSchema::default(),
            filter: FilterRules::default(),
            threshold: ThresholdSettings::default(),
            metrics: MetricSettings::default(),
            sector_reports: false,
            causality: CausalitySettings::default(),
            qap: QapSettings {
                enabled: false,
                ..QapSettings::default()
            },
            base_dir: PathBuf::new(),
        }
    }

    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        RunConfig::from_json(&text, base)
    }

    /// Directory that relative paths are resolved against.
    pub fn set_base_dir(&mut self, dir: impl Into<PathBuf>) {
        self.base_dir = dir.into();
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.threshold;
        if !(t.d_final > 0.0 && t.d_final < 1.0) {
            return Err(Error::config("threshold.d_final must lie in (0, 1)"));
        }
        if let Some(theta) = t.fixed_theta {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(Error::config("threshold.fixed_theta must lie in (0, 1)"));
            }
        }
        if self.filter.max_consecutive_zero_returns < 1 {
            return Err(Error::config("filter.max_consecutive_zero_returns must be >= 1"));
        }
        let c = &self.causality;
        if c.lag < 1 {
            return Err(Error::config("causality.lag must be >= 1"));
        }
        if c.alphas.is_empty() || c.alphas.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::config("causality.alphas must be non-empty values in (0, 1]"));
        }
        let p = &c.nonlinear_params;
        if p.lead == 0 || p.embed == 0 || p.var_lag == 0 || !(p.bandwidth > 0.0) {
            return Err(Error::config("causality.nonlinear_params must be positive"));
        }
        let q = &self.qap;
        if q.permutations == 0 {
            return Err(Error::config("qap.permutations must be >= 1"));
        }
        if q.fractions.is_empty() || q.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::config("qap.fractions must be non-empty values in (0, 1]"));
        }
        if q.enabled && q.regressors.is_empty() {
            return Err(Error::config("qap.regressors must not be empty"));
        }
        if let Some(0) = self.metrics.power_law_xmin {
            return Err(Error::config("metrics.power_law_xmin must be >= 1"));
        }
        Ok(())
    }

    /// Stage list from the config (`builtin` or a JSON file).
    pub fn load_stages(&self) -> Result<Vec<StageSpec>> {
        let stages = if self.stages == "builtin" {
            default_stages()
        } else {
            let path = self.resolve(Path::new(&self.stages));
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            parse_stages(&text).map_err(|e| match e {
                Error::Json(j) => Error::config(format!("stage file {}: {j}", path.display())),
                other => other,
            })?
        };
        validate_stages(&stages)?;
        Ok(stages)
    }

    fn echo(&self) -> Result<serde_json::Value> {
        let mut v = serde_json::to_value(self)?;
        if let Some(map) = v.as_object_mut() {
            map.remove("output_dir");
        }
        Ok(v)
    }
}

/// Subcommands of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Ingest,
    Correlate,
    Threshold,
    Network,
    Metrics,
    Sectors,
    Granger,
    Qap,
    Report,
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Correlate => "correlate",
            Command::Threshold => "threshold",
            Command::Network => "network",
            Command::Metrics => "metrics",
            Command::Sectors => "sectors",
            Command::Granger => "granger",
            Command::Qap => "qap",
            Command::Report => "report",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Inventory of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub files: Vec<ManifestEntry>,
    pub theta0: Option<f64>,
    pub notes: Vec<String>,
    pub settings: serde_json::Value,
}

pub const MANIFEST_FILE: &str = "manifest.json";

struct Outputs {
    dir: PathBuf,
    files: Vec<ManifestEntry>,
}

impl Outputs {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Outputs { dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.files.push(ManifestEntry {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }
}

/// Universe after filtering, with the full and per-stage return panels.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub stages: Vec<StageSpec>,
    pub returns: ReturnPanel,
    pub stage_returns: Vec<ReturnPanel>,
    pub exclusions: ExclusionReport,
    pub rejected: Vec<RejectedRow>,
}

impl Prepared {
    pub fn stage_names(&self) -> Vec<String> {
        self.stages.iter().map(|s| s.name.clone()).collect()
    }
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let stages = cfg.load_stages()?;
    let path = cfg.resolve(&cfg.price_csv);
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let loaded = load_prices(std::io::BufReader::new(file), &cfg.schema)?;
    let (panel, exclusions) = filter_universe(&loaded.panel, &cfg.filter, &stages)?;
    let returns = log_returns(&panel)?;
    let stage_returns = stages
        .iter()
        .map(|s| slice_stage(&returns, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        stages,
        returns,
        stage_returns,
        exclusions,
        rejected: loaded.rejected,
    })
}

/// How the threshold was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdOutcome {
    Fixed(f64),
    Searched(Box<ThresholdSearch>),
}

impl ThresholdOutcome {
    pub fn theta0(&self) -> f64 {
        match self {
            ThresholdOutcome::Fixed(t) => *t,
            ThresholdOutcome::Searched(s) => s.decision.theta0,
        }
    }
}

pub fn decide_threshold(cfg: &RunConfig, names: &[String], matrices: &[CorrelationMatrix]) -> Result<ThresholdOutcome> {
    if let Some(theta) = cfg.threshold.fixed_theta {
        return Ok(ThresholdOutcome::Fixed(theta));
    }
    let pairs: Vec<(&str, &CorrelationMatrix)> = names.iter().map(String::as_str).zip(matrices).collect();
    let search = search_threshold(&pairs, &cfg.threshold.grid, cfg.threshold.d_final)?;
    Ok(ThresholdOutcome::Searched(Box::new(search)))
}

/// Per-stage network statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct StageMetrics {
    pub topology: TopologySummary,
    pub heterogeneity: Option<f64>,
    pub centralities: Vec<CentralityVector>,
    pub centralization: Option<Centralization>,
    pub distribution: DegreeDistribution,
    pub power_law: Option<PowerLawFit>,
}

pub fn stage_metrics(net: &Network, xmin: Option<usize>) -> Result<StageMetrics> {
    let degrees = net.degrees();
    let mut centralities = vec![relative_degree(net)?];
    if net.n() >= 3 {
        centralities.push(relative_betweenness(net)?);
    }
    centralities.push(relative_closeness(net)?);
    let strategy = xmin.map_or(XminStrategy::Scan, XminStrategy::Fixed);
    Ok(StageMetrics {
        topology: topology_summary(net)?,
        heterogeneity: heterogeneity(&degrees).ok(),
        centralities,
        centralization: if net.n() >= 3 { Some(centralizations(net)?) } else { None },
        distribution: degree_distribution(net)?,
        power_law: fit_power_law(&degrees, strategy).ok(),
    })
}

fn stage_err(stage: &'static str) -> impl Fn(Error) -> Error {
    move |e| e.in_stage(stage)
}

/// Runs the whole pipeline (`all`).
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunManifest> {
    run_command(cfg, Command::All)
}

/// Runs one subcommand and writes its outputs plus `manifest.json`.
pub fn run_command(cfg: &RunConfig, cmd: Command) -> Result<RunManifest> {
    cfg.validate()?;
    let mut out = Outputs::new(cfg.output_path())?;
    let mut notes = Vec::new();
    let mut theta0 = None;
    let wants = |c: Command| cmd == c || cmd == Command::All;

    let needs_sectors = wants(Command::Sectors) && cfg.sector_reports;
    let sector_map = if needs_sectors {
        let path = cfg
            .sector_csv
            .as_ref()
            .ok_or_else(|| Error::config("sector reports requested but sector_csv is not set"))?;
        let path = cfg.resolve(path);
        let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        Some(SectorMap::from_csv(file).map_err(stage_err("sectors"))?)
    } else {
        None
    };
    let needs_qap = wants(Command::Qap) && cfg.qap.enabled;
    let fundamentals = if needs_qap {
        let path = cfg
            .fundamentals_csv
            .as_ref()
            .ok_or_else(|| Error::config("qap enabled but fundamentals_csv is not set"))?;
        let path = cfg.resolve(path);
        let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        Some(Fundamentals::from_csv(file).map_err(stage_err("qap"))?)
    } else {
        None
    };

    if cmd == Command::Report {
        let stages = cfg.load_stages()?;
        let names: Vec<String> = stages.iter().map(|s| s.name.clone()).collect();
        let dir = cfg.output_path();
        let read = |name: &str| {
            let p = dir.join(name);
            fs::read(&p).map_err(|e| Error::io(&p, e))
        };
        let cdf = read("degree_cdf.csv")?;
        let loglog = read("degree_loglog.csv")?;
        for (name, bytes) in report::render_plots(&names, &cdf, &loglog).map_err(stage_err("report"))? {
            out.write(&name, &bytes)?;
        }
        return finish(cfg, cmd, out, theta0, notes);
    }

    let prep = prepare(cfg).map_err(stage_err("ingest"))?;
    let names = prep.stage_names();
    if !prep.rejected.is_empty() {
        notes.push(format!("rejected_rows:{}", prep.rejected.len()));
    }
    if wants(Command::Ingest) {
        out.write("exclusions.csv", &report::exclusions_csv(&prep.exclusions)?)?;
        out.write("returns.csv", &report::returns_csv(&prep.returns)?)?;
    }

    if wants(Command::Granger) && cfg.causality.enabled {
        run_granger(cfg, &prep, &names, &mut out, &mut notes).map_err(stage_err("granger"))?;
    }
    if cmd == Command::Ingest || cmd == Command::Granger {
        return finish(cfg, cmd, out, theta0, notes);
    }

    let matrices = prep
        .stage_returns
        .iter()
        .zip(&names)
        .map(|(r, n)| pearson_matrix(r).map_err(|e| e.in_stage(format!("correlate/{n}"))))
        .collect::<Result<Vec<_>>>()?;
    if wants(Command::Correlate) {
        let summaries = matrices
            .iter()
            .map(crate::correlation::corr_summary)
            .collect::<Result<Vec<_>>>()?;
        out.write("correlation_summary.csv", &report::corr_summary_csv(&names, &summaries)?)?;
        out.write("correlations.csv", &report::correlations_csv(&names, &matrices)?)?;
    }
    if cmd == Command::Correlate {
        return finish(cfg, cmd, out, theta0, notes);
    }

    let outcome = decide_threshold(cfg, &names, &matrices).map_err(stage_err("threshold"))?;
    let theta = outcome.theta0();
    theta0 = Some(theta);
    match &outcome {
        ThresholdOutcome::Fixed(_) => notes.push("theta:fixed".into()),
        ThresholdOutcome::Searched(_) => notes.push("theta:search".into()),
    }
    if wants(Command::Threshold) {
        out.write("threshold.json", &report::to_json(&threshold_json(&outcome))?)?;
        if let ThresholdOutcome::Searched(search) = &outcome {
            out.write("threshold_profile.csv", &report::profile_csv(&search.profile)?)?;
            out.write("threshold_refinement.csv", &report::refinement_csv(&search.decision)?)?;
        }
    }
    if cmd == Command::Threshold {
        return finish(cfg, cmd, out, theta0, notes);
    }

    let nets: Vec<Network> = matrices.iter().map(|m| build_network(m, theta)).collect();
    if wants(Command::Network) {
        out.write("edges.csv", &report::edges_csv(&names, &nets)?)?;
    }

    if wants(Command::Metrics) {
        let metrics = nets
            .iter()
            .zip(&names)
            .map(|(n, s)| stage_metrics(n, cfg.metrics.power_law_xmin).map_err(|e| e.in_stage(format!("metrics/{s}"))))
            .collect::<Result<Vec<_>>>()?;
        for (m, s) in metrics.iter().zip(&names) {
            if m.power_law.is_none() {
                notes.push(format!("power_law_unavailable:{s}"));
            }
        }
        let topo: Vec<TopologySummary> = metrics.iter().map(|m| m.topology.clone()).collect();
        let het: Vec<Option<f64>> = metrics.iter().map(|m| m.heterogeneity).collect();
        let cents: Vec<Vec<CentralityVector>> = metrics.iter().map(|m| m.centralities.clone()).collect();
        let czs: Vec<Option<Centralization>> = metrics.iter().map(|m| m.centralization).collect();
        let dists: Vec<DegreeDistribution> = metrics.iter().map(|m| m.distribution.clone()).collect();
        let fits: Vec<Option<PowerLawFit>> = metrics.iter().map(|m| m.power_law).collect();
        out.write("topology.csv", &report::topology_csv(&names, &topo, &het)?)?;
        out.write("centrality.csv", &report::centrality_csv(&names, &cents)?)?;
        out.write("centralization.csv", &report::centralization_csv(&names, &czs)?)?;
        let cdf = report::degree_cdf_csv(&names, &dists)?;
        let loglog = report::degree_loglog_csv(&names, &dists)?;
        out.write("degree_cdf.csv", &cdf)?;
        out.write("degree_loglog.csv", &loglog)?;
        out.write("power_law.csv", &report::power_law_csv(&names, &fits)?)?;
        if cmd == Command::All {
            for (name, bytes) in report::render_plots(&names, &cdf, &loglog)? {
                out.write(&name, &bytes)?;
            }
        }
    }

    if let Some(map) = &sector_map {
        let reports = nets
            .iter()
            .zip(&names)
            .map(|(n, s)| sector_report(n, map).map_err(|e| e.in_stage(format!("sectors/{s}"))))
            .collect::<Result<Vec<SectorReport>>>()?;
        out.write("sectors.csv", &report::sectors_csv(&names, &reports)?)?;
    }

    if let Some(fund) = &fundamentals {
        run_qap(cfg, fund, &names, &nets, &mut out).map_err(stage_err("qap"))?;
    }

    finish(cfg, cmd, out, theta0, notes)
}

fn threshold_json(outcome: &ThresholdOutcome) -> serde_json::Value {
    match outcome {
        ThresholdOutcome::Fixed(t) => serde_json::json!({ "source": "fixed", "theta0": t }),
        ThresholdOutcome::Searched(s) => serde_json::json!({
            "source": "search",
            "theta0": s.decision.theta0,
            "summaries": s.summaries,
            "sigma_interval": s.sigma_interval,
            "coarse_interval": s.coarse_interval,
            "rounds": s.decision.trace.len(),
        }),
    }
}

fn run_granger(
    cfg: &RunConfig,
    prep: &Prepared,
    names: &[String],
    out: &mut Outputs,
    notes: &mut Vec<String>,
) -> Result<()> {
    let c = &cfg.causality;
    let mut matrices: Vec<Vec<PValueMatrix>> = Vec::new();
    let mut sweeps: Vec<(Vec<String>, Vec<SweepPoint>)> = Vec::new();
    for (r, name) in prep.stage_returns.iter().zip(names) {
        let mut per_stage = vec![granger_linear(r, c.lag).map_err(|e| e.in_stage(name.clone()))?];
        if c.nonlinear {
            per_stage.push(granger_nonlinear(r, &c.nonlinear_params).map_err(|e| e.in_stage(name.clone()))?);
        }
        for m in &per_stage {
            if !m.degenerate.is_empty() {
                notes.push(format!("degenerate_pairs:{name}:{:?}:{}", m.kind, m.degenerate.len()));
            }
            let kind = if m.kind == crate::causality::TestKind::Linear { "linear" } else { "nonlinear" };
            sweeps.push((vec![name.clone(), kind.to_string()], causality_sweep(m, &c.alphas)?));
        }
        matrices.push(per_stage);
    }
    notes.push(format!("granger_lag:{}", c.lag));
    let alpha_cols: Vec<String> = c.alphas.iter().map(f64::to_string).collect();
    let density: Vec<(Vec<String>, Vec<f64>)> = sweeps
        .iter()
        .map(|(l, pts)| (l.clone(), pts.iter().map(|p| p.density).collect()))
        .collect();
    let mut cz = Vec::new();
    for (l, pts) in &sweeps {
        for (measure, pick) in [
            ("degree", (|p: &SweepPoint| p.degree_centralization) as fn(&SweepPoint) -> f64),
            ("in_degree", |p: &SweepPoint| p.in_degree_centralization),
            ("out_degree", |p: &SweepPoint| p.out_degree_centralization),
        ] {
            let mut labels = l.clone();
            labels.push(measure.to_string());
            cz.push((labels, pts.iter().map(pick).collect()));
        }
    }
    out.write("granger_pvalues.csv", &report::pvalues_csv(names, &matrices)?)?;
    out.write(
        "causality_density.csv",
        &report::wide_csv(&["stage", "test"], &alpha_cols, &density)?,
    )?;
    out.write(
        "causality_centralization.csv",
        &report::wide_csv(&["stage", "test", "measure"], &alpha_cols, &cz)?,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct QapEntry<'a> {
    stage: &'a str,
    top_fraction: f64,
    dependent: &'static str,
    result: &'a QapResult,
}

fn run_qap(cfg: &RunConfig, fund: &Fundamentals, names: &[String], nets: &[Network], out: &mut Outputs) -> Result<()> {
    let q = &cfg.qap;
    let mut labels = Vec::new();
    let mut results = Vec::new();
    for (net, name) in nets.iter().zip(names) {
        let dep = relative_degree(net)?;
        let regressors = fund.aligned(net.tickers(), &q.regressors)?;
        for &frac in &q.fractions {
            let spec = RegressionSpec {
                tickers: net.tickers().to_vec(),
                dependent: dep.values.clone(),
                regressors: regressors.clone(),
                top_fraction: frac,
                permutations: q.permutations,
                seed: q.seed,
            };
            results.push(qap_regress(&spec).map_err(|e| e.in_stage(format!("{name}@{frac}")))?);
            labels.push((name.clone(), frac));
        }
    }
    let entries: Vec<QapEntry> = labels
        .iter()
        .zip(&results)
        .map(|((s, f), r)| QapEntry {
            stage: s,
            top_fraction: *f,
            dependent: "relative_degree",
            result: r,
        })
        .collect();
    out.write("qap.csv", &report::qap_csv(&labels, &results)?)?;
    out.write("qap.json", &report::to_json(&entries)?)?;
    Ok(())
}

fn finish(cfg: &RunConfig, cmd: Command, out: Outputs, theta0: Option<f64>, notes: Vec<String>) -> Result<RunManifest> {
    let manifest = RunManifest {
        command: cmd.name().to_string(),
        files: out.files,
        theta0,
        notes,
        settings: cfg.echo()?,
    };
    let path = out.dir.join(MANIFEST_FILE);
    fs::write(&path, report::to_json(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

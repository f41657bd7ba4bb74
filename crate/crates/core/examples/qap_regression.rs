//! Regresses relative degree centrality on the bundled fundamentals with
//! permutation p-values.
//!
//! ```text
//! cargo run --example qap_regression -- [permutations]
//! ```

use std::fs::File;
use std::path::Path;

use stocknet::centrality::relative_degree;
use stocknet::correlation::pearson_matrix;
use stocknet::graph::build_network;
use stocknet::pipeline::{decide_threshold, prepare, RunConfig};
use stocknet::qap::{qap_regress, stars, Fundamentals, RegressionSpec, FUNDAMENTAL_COLUMNS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let permutations: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(999);
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let cfg = RunConfig::load(&data.join("stocknet.json"))?;
    let prepared = prepare(&cfg)?;
    let names = prepared.stage_names();
    let matrices = prepared
        .stage_returns
        .iter()
        .map(pearson_matrix)
        .collect::<Result<Vec<_>, _>>()?;
    let theta = decide_threshold(&cfg, &names, &matrices)?.theta0();
    let fundamentals = Fundamentals::from_csv(File::open(data.join("fundamentals.csv"))?)?;
    let columns: Vec<String> = FUNDAMENTAL_COLUMNS.iter().map(|c| c.to_string()).collect();

    for (name, m) in names.iter().zip(&matrices) {
        let centrality = relative_degree(&build_network(m, theta))?;
        let regressors = fundamentals.aligned(&centrality.tickers, &columns)?;
        for frac in [1.0, 0.5] {
            let result = qap_regress(&RegressionSpec {
                tickers: centrality.tickers.clone(),
                dependent: centrality.values.clone(),
                regressors: regressors.clone(),
                top_fraction: frac,
                permutations,
                seed: 42,
            })?;
            println!("{name}, top {:.0}% ({} stocks), R^2 {:.3}", frac * 100.0, result.n_used, result.r_squared);
            for c in &result.coefficients {
                match c.p_value {
                    Some(p) => println!("  {:<20} {:>10.4} p {:.3} {}", c.name, c.estimate, p, stars(p)),
                    None => println!("  {:<20} {:>10.4}", c.name, c.estimate),
                }
            }
        }
    }
    Ok(())
}

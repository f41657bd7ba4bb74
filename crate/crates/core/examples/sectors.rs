//! Per-sector statistics of the first bundled stage network.
//!
//! ```text
//! cargo run --example sectors
//! ```

use std::fs::File;
use std::path::Path;

use stocknet::correlation::pearson_matrix;
use stocknet::graph::build_network;
use stocknet::pipeline::{decide_threshold, prepare, RunConfig};
use stocknet::sector::{sector_report, SectorMap};

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3}"))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
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
    let sectors = SectorMap::from_csv(File::open(data.join("sectors.csv"))?)?;

    for (name, m) in names.iter().zip(&matrices) {
        let net = build_network(m, theta);
        println!("{name} at theta0 = {theta}");
        println!("  {:<28} {:>3} {:>5} {:>7} {:>7} {:>7} {:>7}", "sector", "n", "edges", "C", "L", "k/N-1", "H");
        for r in sector_report(&net, &sectors)?.rows {
            println!(
                "  {:<28} {:>3} {:>5} {:>7} {:>7} {:>7.3} {:>7}",
                r.sector.to_string(),
                r.n_nodes,
                r.intra_edges,
                fmt(r.clustering),
                fmt(r.avg_path_length),
                r.mean_relative_degree,
                fmt(r.heterogeneity_full)
            );
        }
    }
    Ok(())
}

//! Builds the stage networks at the searched threshold and prints topology,
//! the top stocks by each centrality and the centralization indices.
//!
//! ```text
//! cargo run --example network_metrics
//! ```

use std::path::Path;

use stocknet::centrality::{centralizations, heterogeneity, relative_betweenness, relative_closeness, relative_degree};
use stocknet::correlation::pearson_matrix;
use stocknet::graph::{build_network, topology_summary};
use stocknet::pipeline::{decide_threshold, prepare, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/stocknet.json"))?;
    let prepared = prepare(&cfg)?;
    let names = prepared.stage_names();
    let matrices = prepared
        .stage_returns
        .iter()
        .map(pearson_matrix)
        .collect::<Result<Vec<_>, _>>()?;
    let theta = decide_threshold(&cfg, &names, &matrices)?.theta0();
    println!("theta0 = {theta}");

    for (name, m) in names.iter().zip(&matrices) {
        let net = build_network(m, theta);
        let t = topology_summary(&net)?;
        println!("\n{name}: {} nodes, {} edges, density {:.4}", t.n_nodes, t.n_edges, t.density);
        println!(
            "  clustering {:.4}, path length {:?}, diameter {}, {} components (largest {})",
            t.clustering, t.avg_path_length, t.diameter, t.n_components, t.largest_component
        );
        if let Ok(h) = heterogeneity(&net.degrees()) {
            println!("  degree heterogeneity {h:.4}");
        }
        for v in [relative_degree(&net)?, relative_betweenness(&net)?, relative_closeness(&net)?] {
            let mut order: Vec<usize> = (0..v.values.len()).collect();
            order.sort_by(|&a, &b| v.values[b].total_cmp(&v.values[a]));
            let top: Vec<String> = order[..3]
                .iter()
                .map(|&i| format!("{} {:.3}", v.tickers[i], v.values[i]))
                .collect();
            println!("  top {:<21} {}", v.kind.as_str(), top.join(", "));
        }
        let c = centralizations(&net)?;
        println!(
            "  centralization: degree {:.4}, betweenness {:.4}, closeness {:.4}",
            c.degree, c.betweenness, c.closeness
        );
    }
    Ok(())
}

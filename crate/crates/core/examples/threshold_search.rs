//! Computes per-stage correlation matrices and runs the shared threshold
//! search, printing every refinement round.
//!
//! ```text
//! cargo run --example threshold_search
//! ```

use std::path::Path;

use stocknet::correlation::{pearson_matrix, CorrelationMatrix};
use stocknet::pipeline::{prepare, RunConfig};
use stocknet::threshold::{default_grid, search_threshold};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/stocknet.json"))?;
    let prepared = prepare(&cfg)?;
    let names = prepared.stage_names();
    let matrices = prepared
        .stage_returns
        .iter()
        .map(pearson_matrix)
        .collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(&str, &CorrelationMatrix)> = names.iter().map(String::as_str).zip(&matrices).collect();

    let search = search_threshold(&pairs, &default_grid(), 1e-4)?;
    for (name, s) in names.iter().zip(&search.summaries) {
        println!("{name:<8} mu {:.4}  sigma {:.4}  mu+3sigma {:.4}", s.mu, s.sigma, s.hi3);
    }
    println!("sigma interval  [{:.4}, {:.4}]", search.sigma_interval.lo, search.sigma_interval.hi);
    println!("largest components on the coarse grid:");
    for (name, row) in names.iter().zip(&search.profile.counts) {
        println!("  {name:<8} {row:?}");
    }
    println!("coarse interval [{:.4}, {:.4}]", search.coarse_interval.lo, search.coarse_interval.hi);
    for round in &search.decision.trace {
        let scores: Vec<usize> = round.cells.iter().map(|c| c.score).collect();
        let cell = &round.cells[round.chosen];
        println!(
            "  step {:<7} scores {scores:?} -> [{:.4}, {:.4}]",
            round.step, cell.lo, cell.hi
        );
    }
    println!("theta0 = {}", search.decision.theta0);
    Ok(())
}

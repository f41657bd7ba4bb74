//! Fits a discrete power law to the degrees of a preferential-attachment
//! graph, with a fixed lower cutoff and with the KS scan.
//!
//! ```text
//! cargo run --example power_law -- [nodes] [edges-per-node] [seed]
//! ```

use stocknet::centrality::{degree_distribution, fit_power_law, XminStrategy};
use stocknet::synth::barabasi_albert;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let n = args.first().copied().unwrap_or(2000) as usize;
    let m = args.get(1).copied().unwrap_or(2) as usize;
    let seed = args.get(2).copied().unwrap_or(7);

    let net = barabasi_albert(n, m, seed)?;
    let degrees = net.degrees();
    println!("preferential attachment: {n} nodes, {} edges", net.n_edges());

    let dist = degree_distribution(&net)?;
    println!("first log-log points (ln k, ln P):");
    for (x, y) in dist.loglog.iter().take(5) {
        println!("  {x:.3} {y:.3}");
    }

    for strategy in [XminStrategy::Fixed(m), XminStrategy::Scan] {
        let fit = fit_power_law(&degrees, strategy)?;
        println!(
            "{strategy:?}: lambda {:.3}, xmin {}, tail {} nodes, KS {:.4}",
            fit.lambda, fit.xmin, fit.n_tail, fit.ks_distance
        );
    }
    Ok(())
}

//! Linear and nonlinear Granger tests on a synthetic lead-lag pair, then
//! the causality network sweep over significance levels for one bundled
//! stage.
//!
//! ```text
//! cargo run --example granger
//! ```

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use stocknet::causality::{causality_sweep, granger_linear, hiemstra_jones, NonlinearParams, DEFAULT_ALPHAS};
use stocknet::ingest::ReturnPanel;
use stocknet::pipeline::{prepare, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = 400;
    let x: Vec<f64> = (0..t).map(|_| rng.sample(StandardNormal)).collect();
    let mut y = vec![0.0];
    for k in 1..t {
        let e: f64 = rng.sample(StandardNormal);
        y.push(0.6 * x[k - 1] + 0.5 * x[k - 1].abs() + e);
    }
    let pair = ReturnPanel::from_series(vec!["x".into(), "y".into()], vec![x.clone(), y.clone()])?;
    let lin = granger_linear(&pair, 1)?;
    println!("linear:    p(x -> y) = {:.3e}, p(y -> x) = {:.3}", lin.get(1, 0), lin.get(0, 1));
    let params = NonlinearParams::default();
    if let (Some((sxy, pxy)), Some((syx, pyx))) = (hiemstra_jones(&y, &x, &params), hiemstra_jones(&x, &y, &params)) {
        println!("nonlinear: x -> y stat {sxy:.2} p {pxy:.3e}; y -> x stat {syx:.2} p {pyx:.3}");
    }

    let cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/stocknet.json"))?;
    let prepared = prepare(&cfg)?;
    let (name, returns) = (&prepared.stages[0].name, &prepared.stage_returns[0]);
    let pv = granger_linear(returns, cfg.causality.lag)?;
    println!("\n{name}: {} stocks, {} returns", returns.n_tickers(), returns.len());
    println!("alpha   edges  density  in-cent  out-cent");
    for s in causality_sweep(&pv, &DEFAULT_ALPHAS)? {
        println!(
            "{:<7} {:>5}  {:.4}   {:.4}   {:.4}",
            s.alpha, s.n_edges, s.density, s.in_degree_centralization, s.out_degree_centralization
        );
    }
    Ok(())
}

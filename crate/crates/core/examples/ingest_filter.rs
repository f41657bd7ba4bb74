//! Loads the bundled price CSV, applies the exclusion rules and prints the
//! per-stage return panels.
//!
//! ```text
//! cargo run --example ingest_filter
//! ```

use std::fs::File;
use std::path::Path;

use stocknet::ingest::{filter_universe, load_prices, log_returns, parse_stages, slice_stage, CsvSchema, FilterRules};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let loaded = load_prices(File::open(data.join("prices.csv"))?, &CsvSchema::default())?;
    let stages = parse_stages(&std::fs::read_to_string(data.join("stages.json"))?)?;
    println!(
        "loaded {} tickers x {} dates ({} rejected rows)",
        loaded.panel.tickers().len(),
        loaded.panel.dates().len(),
        loaded.rejected.len()
    );

    let (panel, report) = filter_universe(&loaded.panel, &FilterRules::default(), &stages)?;
    for e in &report.excluded {
        println!("  excluded {:<10} {:<13} {}", e.ticker, e.rule.to_string(), e.detail);
    }

    let returns = log_returns(&panel)?;
    println!("{} tickers kept, {} weekly returns", returns.n_tickers(), returns.len());
    for stage in &stages {
        let slice = slice_stage(&returns, stage)?;
        println!(
            "  {:<8} {:?} {} .. {}: {} returns",
            stage.name,
            stage.phase,
            stage.start,
            stage.end,
            slice.len()
        );
    }
    Ok(())
}

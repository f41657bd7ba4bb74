//! Writes the bundled synthetic dataset: prices, stages, sectors,
//! fundamentals and a run config.
//!
//! ```text
//! cargo run --example generate_dataset -- [output-dir] [seed]
//! ```

use std::fs;
use std::path::PathBuf;

use stocknet::synth::{block_sector, fundamentals_table, SyntheticMarket};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2024);
    fs::create_dir_all(&dir)?;

    let market = SyntheticMarket::bundled();
    let data = market.generate(seed)?;

    let mut prices = csv::Writer::from_path(dir.join("prices.csv"))?;
    prices.write_record(["date", "ticker", "close"])?;
    for r in &data.records {
        prices.write_record([r.date.to_string(), r.ticker.clone(), format!("{:.4}", r.close)])?;
    }
    prices.flush()?;

    fs::write(
        dir.join("stages.json"),
        serde_json::to_string_pretty(&data.stages)? + "\n",
    )?;

    // extra tickers copy series 0, 1 and 2, so they inherit those blocks
    let block_of = |k: usize| {
        if k < data.blocks.len() {
            data.blocks[k]
        } else {
            data.blocks[(k - data.blocks.len()) % data.blocks.len()]
        }
    };
    let mut sectors = csv::Writer::from_path(dir.join("sectors.csv"))?;
    sectors.write_record(["ticker", "sector"])?;
    for (k, t) in data.tickers.iter().enumerate() {
        sectors.write_record([t.as_str(), block_sector(block_of(k)).name()])?;
    }
    sectors.flush()?;

    let mut mult = data.multipliers.clone();
    for k in data.blocks.len()..data.tickers.len() {
        mult.push(data.multipliers[(k - data.blocks.len()) % data.multipliers.len()]);
    }
    let table = fundamentals_table(&mult, seed + 1);
    let mut fund = csv::Writer::from_path(dir.join("fundamentals.csv"))?;
    fund.write_record([
        "ticker",
        "current_ratio",
        "quick_ratio",
        "leverage",
        "turnover",
        "roe",
        "market_value",
        "financing",
    ])?;
    for (t, row) in data.tickers.iter().zip(&table) {
        let mut rec = vec![t.clone()];
        rec.extend(row.iter().map(|v| format!("{v:.4}")));
        fund.write_record(&rec)?;
    }
    fund.flush()?;

    let config = serde_json::json!({
        "price_csv": "prices.csv",
        "sector_csv": "sectors.csv",
        "fundamentals_csv": "fundamentals.csv",
        "stages": "stages.json",
        "output_dir": "../../../target/stocknet-out",
        "causality": { "lag": 1, "nonlinear": true },
        "qap": { "permutations": 1000, "seed": 42, "fractions": [0.5, 0.75] }
    });
    fs::write(dir.join("stocknet.json"), serde_json::to_string_pretty(&config)? + "\n")?;

    println!(
        "wrote {} price rows for {} tickers and {} stages to {}",
        data.records.len(),
        data.tickers.len(),
        data.stages.len(),
        dir.display()
    );
    Ok(())
}

//! Runs every stage of the pipeline on the bundled data and lists the files
//! in the manifest, SVG plots included.
//!
//! ```text
//! cargo run --example pipeline -- [output-dir]
//! ```

use std::path::{Path, PathBuf};

use stocknet::pipeline::{run_pipeline, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/stocknet.json"))?;
    if let Some(dir) = std::env::args().nth(1) {
        cfg.output_dir = std::env::current_dir()?.join(PathBuf::from(dir));
    }
    let manifest = run_pipeline(&cfg)?;
    println!("theta0 = {:?}", manifest.theta0);
    for note in &manifest.notes {
        println!("note: {note}");
    }
    for f in &manifest.files {
        println!("{:>9}  {}  {}", f.bytes, &f.sha256[..12], f.path);
    }
    println!("written to {}", cfg.output_path().display());
    Ok(())
}

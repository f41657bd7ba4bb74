//! Correlation and causality network analysis for equity price panels.
//!
//! The pipeline loads daily closes, filters the universe, computes per-stage
//! log-return correlation matrices, picks a shared threshold, builds
//! undirected networks and directed Granger-causality networks, and reports
//! topology, centrality, sector and QAP regression results.

pub mod causality;
pub mod centrality;
pub mod correlation;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod qap;
pub mod report;
pub mod sector;
pub mod special;
mod stats;
pub mod synth;
pub mod threshold;

pub use error::{Error, Result};

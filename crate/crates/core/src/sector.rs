//! Sector decomposition of a network: induced sub-networks per GICS sector
//! and per-sector small-world and degree statistics.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::heterogeneity;
use crate::error::{Error, Result};
use crate::graph::{topology_summary, Network};

/// The eleven GICS sectors, in the standard order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    Energy,
    Materials,
    Industrials,
    ConsumerDiscretionary,
    ConsumerStaples,
    HealthCare,
    Financials,
    InformationTechnology,
    TelecommunicationServices,
    Utilities,
    RealEstate,
}

impl Sector {
    pub const ALL: [Sector; 11] = [
        Sector::Energy,
        Sector::Materials,
        Sector::Industrials,
        Sector::ConsumerDiscretionary,
        Sector::ConsumerStaples,
        Sector::HealthCare,
        Sector::Financials,
        Sector::InformationTechnology,
        Sector::TelecommunicationServices,
        Sector::Utilities,
        Sector::RealEstate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Sector::Energy => "Energy",
            Sector::Materials => "Materials",
            Sector::Industrials => "Industrials",
            Sector::ConsumerDiscretionary => "Consumer Discretionary",
            Sector::ConsumerStaples => "Consumer Staples",
            Sector::HealthCare => "Health Care",
            Sector::Financials => "Financials",
            Sector::InformationTechnology => "Information Technology",
            Sector::TelecommunicationServices => "Telecommunication Services",
            Sector::Utilities => "Utilities",
            Sector::RealEstate => "Real Estate",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sector {
    type Err = Error;

    /// Accepts the canonical names case-insensitively plus a few common
    /// spellings ("Healthcare", "IT", "Communication Services", ...).
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        if let Some(found) = Sector::ALL
            .iter()
            .find(|sec| sec.name().replace(' ', "").to_ascii_lowercase() == key)
        {
            return Ok(*found);
        }
        let alias = match key.as_str() {
            "healthcare" => Sector::HealthCare,
            "it" | "infotech" | "technology" => Sector::InformationTechnology,
            "telecom" | "telecommunications" | "communicationservices" | "telecommunication" => {
                Sector::TelecommunicationServices
            }
            "financial" | "finance" => Sector::Financials,
            "realestate" => Sector::RealEstate,
            _ => return Err(Error::data(format!("unknown sector '{s}'"))),
        };
        Ok(alias)
    }
}

/// Ticker to sector assignment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SectorMap {
    map: BTreeMap<String, Sector>,
}

impl SectorMap {
    pub fn new() -> Self {
        SectorMap::default()
    }

    pub fn insert(&mut self, ticker: impl Into<String>, sector: Sector) -> Result<()> {
        let ticker = ticker.into();
        if let Some(prev) = self.map.get(&ticker) {
            if *prev != sector {
                return Err(Error::data(format!(
                    "ticker {ticker} assigned to both {prev} and {sector}"
                )));
            }
        }
        self.map.insert(ticker, sector);
        Ok(())
    }

    pub fn get(&self, ticker: &str) -> Option<Sector> {
        self.map.get(ticker).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Node indices of `net` that belong to `sector`, in network order.
    pub fn members(&self, net: &Network, sector: Sector) -> Vec<usize> {
        (0..net.n())
            .filter(|&i| self.get(&net.tickers()[i]) == Some(sector))
            .collect()
    }

    /// Reads a `ticker,sector` CSV.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
        let headers = reader.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::data(format!("sector file lacks a '{name}' column")))
        };
        let (ti, si) = (col("ticker")?, col("sector")?);
        let mut map = SectorMap::new();
        for (k, rec) in reader.records().enumerate() {
            let rec = rec?;
            let line = k + 2;
            let ticker = rec.get(ti).unwrap_or("");
            if ticker.is_empty() {
                return Err(Error::data(format!("sector file line {line}: empty ticker")));
            }
            let sector: Sector = rec
                .get(si)
                .unwrap_or("")
                .parse()
                .map_err(|e| Error::data(format!("sector file line {line}: {e}")))?;
            map.insert(ticker, sector)?;
        }
        if map.is_empty() {
            return Err(Error::data("sector file has no rows"));
        }
        Ok(map)
    }
}

/// Induced subgraph on the members of `sector`.
pub fn sector_subgraph(net: &Network, sectors: &SectorMap, sector: Sector) -> Result<Network> {
    let members = sectors.members(net, sector);
    if members.is_empty() {
        return Err(Error::data(format!("sector {sector} has no members in the network")));
    }
    Ok(net.subgraph(&members))
}

/// Sectors smaller than this are excluded from the small-world columns.
pub const MIN_SMALL_WORLD_SIZE: usize = 3;

/// One sector's statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorRow {
    pub sector: Sector,
    pub n_nodes: usize,
    /// Edges with both endpoints inside the sector.
    pub intra_edges: usize,
    /// True when the sector is too small for the small-world columns.
    pub excluded: bool,
    pub clustering: Option<f64>,
    pub avg_path_length: Option<f64>,
    /// Mean full-network degree of the members.
    pub mean_degree: f64,
    /// Mean full-network relative degree `k / (N - 1)`.
    pub mean_relative_degree: f64,
    /// Heterogeneity of the members' full-network degrees.
    pub heterogeneity_full: Option<f64>,
    /// Heterogeneity of the degrees inside the induced subgraph.
    pub heterogeneity_intra: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub rows: Vec<SectorRow>,
}

/// Statistics for every sector with at least one member, in GICS order.
pub fn sector_report(net: &Network, sectors: &SectorMap) -> Result<SectorReport> {
    if net.n() < 2 {
        return Err(Error::data("sector report needs at least two nodes"));
    }
    let unmapped: Vec<&str> = net
        .tickers()
        .iter()
        .filter(|t| sectors.get(t).is_none())
        .map(String::as_str)
        .collect();
    if !unmapped.is_empty() {
        return Err(Error::data(format!(
            "tickers without a sector: {}",
            unmapped.join(", ")
        )));
    }
    let full_degrees = net.degrees();
    let denom = (net.n() - 1) as f64;
    let rows: Vec<Option<SectorRow>> = Sector::ALL
        .par_iter()
        .map(|&sector| -> Result<Option<SectorRow>> {
            let members = sectors.members(net, sector);
            if members.is_empty() {
                return Ok(None);
            }
            let sub = net.subgraph(&members);
            let excluded = members.len() < MIN_SMALL_WORLD_SIZE;
            let (clustering, avg_path_length) = if excluded {
                (None, None)
            } else {
                let topo = topology_summary(&sub)?;
                (Some(topo.clustering), topo.avg_path_length)
            };
            let degs: Vec<usize> = members.iter().map(|&i| full_degrees[i]).collect();
            let m = members.len() as f64;
            let mean_degree = degs.iter().sum::<usize>() as f64 / m;
            Ok(Some(SectorRow {
                sector,
                n_nodes: members.len(),
                intra_edges: sub.n_edges(),
                excluded,
                clustering,
                avg_path_length,
                mean_degree,
                mean_relative_degree: mean_degree / denom,
                heterogeneity_full: heterogeneity(&degs).ok(),
                heterogeneity_intra: heterogeneity(&sub.degrees()).ok(),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(SectorReport {
        rows: rows.into_iter().flatten().collect(),
    })
}

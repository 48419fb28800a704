//! Core graph data structures: the country registry, the directed per-year
//! flow network, the undirected infrastructure network, and year-aggregated
//! snapshots that every analysis operates on.
//!
//! Snapshots are immutable once built; mutation only happens while loading.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Country identifier. Node identity is the code string; display names are
/// metadata kept in the registry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CountryCode(pub String);

impl CountryCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CountryCode {
    fn from(s: &str) -> Self {
        CountryCode(s.to_string())
    }
}

impl From<String> for CountryCode {
    fn from(s: String) -> Self {
        CountryCode(s)
    }
}

/// One country: code, display name, centroid coordinates and optional
/// resident population (needed only for population-normalized analyses).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord {
    pub code: CountryCode,
    pub name: String,
    pub centroid_lat: f64,
    pub centroid_lon: f64,
    pub population: Option<u64>,
}

impl CountryRecord {
    pub fn new(
        code: impl Into<CountryCode>,
        name: impl Into<String>,
        centroid_lat: f64,
        centroid_lon: f64,
        population: Option<u64>,
    ) -> Result<Self> {
        if !(-90.0..=90.0).contains(&centroid_lat) {
            return Err(Error::invalid(format!(
                "latitude {centroid_lat} outside [-90, 90]"
            )));
        }
        if !(centroid_lon > -180.0 && centroid_lon <= 180.0) {
            return Err(Error::invalid(format!(
                "longitude {centroid_lon} outside (-180, 180]"
            )));
        }
        if population == Some(0) {
            return Err(Error::invalid("population must be >= 1 when present"));
        }
        Ok(CountryRecord {
            code: code.into(),
            name: name.into(),
            centroid_lat,
            centroid_lon,
            population,
        })
    }

    pub fn centroid(&self) -> (f64, f64) {
        (self.centroid_lat, self.centroid_lon)
    }
}

/// The node universe: all known countries, keyed by code. Codes are unique;
/// countries with no tourism edges are admitted and reported as isolated.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountryRegistry {
    records: BTreeMap<CountryCode, CountryRecord>,
}

impl CountryRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a record, rejecting duplicate codes.
    pub fn insert(&mut self, record: CountryRecord) -> Result<()> {
        if self.records.contains_key(&record.code) {
            return Err(Error::invalid(format!("duplicate country code {}", record.code)));
        }
        self.records.insert(record.code.clone(), record);
        Ok(())
    }

    pub fn get(&self, code: &CountryCode) -> Option<&CountryRecord> {
        self.records.get(code)
    }

    pub fn contains(&self, code: &CountryCode) -> bool {
        self.records.contains_key(code)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn codes(&self) -> impl Iterator<Item = &CountryCode> {
        self.records.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CountryRecord> {
        self.records.values()
    }
}

/// Directed weighted multi-year flow graph. An edge exists only while it has
/// at least one strictly positive yearly flow; zero flows are absent edges.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    nodes: BTreeSet<CountryCode>,
    flows: BTreeMap<(CountryCode, CountryCode), BTreeMap<i32, u64>>,
}

impl FlowNetwork {
    /// Network over the given node universe, with no edges yet.
    pub fn new(nodes: impl IntoIterator<Item = CountryCode>) -> Self {
        FlowNetwork {
            nodes: nodes.into_iter().collect(),
            flows: BTreeMap::new(),
        }
    }

    /// Record the flow for one (origin, destination, year) cell.
    /// Self-loops, non-positive flows, unknown endpoints and duplicate cells
    /// are data errors and rejected.
    pub fn add_flow(
        &mut self,
        origin: &CountryCode,
        destination: &CountryCode,
        year: i32,
        tourists: u64,
    ) -> Result<()> {
        if origin == destination {
            return Err(Error::invalid(format!("self-loop {origin}->{destination}")));
        }
        if tourists == 0 {
            return Err(Error::invalid(format!(
                "non-positive flow {origin}->{destination} in {year}"
            )));
        }
        if !self.nodes.contains(origin) {
            return Err(Error::invalid(format!("unknown origin {origin}")));
        }
        if !self.nodes.contains(destination) {
            return Err(Error::invalid(format!("unknown destination {destination}")));
        }
        let per_year = self
            .flows
            .entry((origin.clone(), destination.clone()))
            .or_default();
        if per_year.contains_key(&year) {
            return Err(Error::invalid(format!(
                "duplicate flow entry {origin}->{destination} in {year}"
            )));
        }
        per_year.insert(year, tourists);
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<CountryCode> {
        &self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.flows.len()
    }

    pub fn flow(&self, origin: &CountryCode, destination: &CountryCode, year: i32) -> Option<u64> {
        self.flows
            .get(&(origin.clone(), destination.clone()))
            .and_then(|m| m.get(&year).copied())
    }

    /// All (origin, destination, per-year flows) entries in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (&CountryCode, &CountryCode, &BTreeMap<i32, u64>)> {
        self.flows.iter().map(|((o, d), m)| (o, d, m))
    }

    /// Years carrying at least one positive flow anywhere in the network.
    pub fn years(&self) -> BTreeSet<i32> {
        self.flows
            .values()
            .flat_map(|m| m.keys().copied())
            .collect()
    }
}

/// Undirected country-level infrastructure graph (coarse-grained routes).
/// Edges are canonical unordered pairs; symmetric and self-loop free.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InfrastructureNetwork {
    nodes: BTreeSet<CountryCode>,
    edges: BTreeSet<(CountryCode, CountryCode)>,
}

impl InfrastructureNetwork {
    pub fn new(nodes: impl IntoIterator<Item = CountryCode>) -> Self {
        InfrastructureNetwork {
            nodes: nodes.into_iter().collect(),
            edges: BTreeSet::new(),
        }
    }

    pub fn add_node(&mut self, node: CountryCode) {
        self.nodes.insert(node);
    }

    /// Add the unordered edge {a, b}; direction of the source route is
    /// irrelevant. Self-loops are rejected.
    pub fn add_edge(&mut self, a: &CountryCode, b: &CountryCode) -> Result<()> {
        if a == b {
            return Err(Error::invalid(format!("self-loop {a}-{b}")));
        }
        self.nodes.insert(a.clone());
        self.nodes.insert(b.clone());
        self.edges.insert(Self::canonical(a, b));
        Ok(())
    }

    fn canonical(a: &CountryCode, b: &CountryCode) -> (CountryCode, CountryCode) {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    pub fn has_edge(&self, a: &CountryCode, b: &CountryCode) -> bool {
        a != b && self.edges.contains(&Self::canonical(a, b))
    }

    pub fn nodes(&self) -> &BTreeSet<CountryCode> {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (&CountryCode, &CountryCode)> {
        self.edges.iter().map(|(a, b)| (a, b))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors<'a>(&'a self, node: &'a CountryCode) -> impl Iterator<Item = &'a CountryCode> {
        self.edges.iter().filter_map(move |(a, b)| {
            if a == node {
                Some(b)
            } else if b == node {
                Some(a)
            } else {
                None
            }
        })
    }
}

/// Which neighborhood a degree query counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    In,
    Out,
}

/// Year-aggregated view of a [`FlowNetwork`]: each retained edge carries the
/// sum of its per-year flows within the inclusive range. Weights of snapshots
/// built from flows are integral counts; derived snapshots (normalized,
/// rewired, synthetic) may carry any strictly positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot {
    nodes: BTreeSet<CountryCode>,
    weights: BTreeMap<(CountryCode, CountryCode), f64>,
    year_range: (i32, i32),
}

/// Sum per-year flows over `[start, end]`; edges with no in-range flow are
/// omitted, the node set is preserved.
pub fn aggregate_years(net: &FlowNetwork, start: i32, end: i32) -> Result<NetworkSnapshot> {
    if start > end {
        return Err(Error::invalid(format!("empty year range [{start}, {end}]")));
    }
    let mut weights = BTreeMap::new();
    for (origin, destination, per_year) in net.edges() {
        let total: u64 = per_year.range(start..=end).map(|(_, f)| f).sum();
        if total > 0 {
            weights.insert((origin.clone(), destination.clone()), total as f64);
        }
    }
    Ok(NetworkSnapshot {
        nodes: net.nodes().clone(),
        weights,
        year_range: (start, end),
    })
}

impl NetworkSnapshot {
    /// Build a snapshot directly from weighted edges. Endpoints must be in the
    /// node set, weights strictly positive, self-loops rejected.
    pub fn from_weighted_edges(
        nodes: impl IntoIterator<Item = CountryCode>,
        edges: impl IntoIterator<Item = (CountryCode, CountryCode, f64)>,
        year_range: (i32, i32),
    ) -> Result<Self> {
        let nodes: BTreeSet<CountryCode> = nodes.into_iter().collect();
        let mut weights = BTreeMap::new();
        for (origin, destination, weight) in edges {
            if origin == destination {
                return Err(Error::invalid(format!("self-loop {origin}->{destination}")));
            }
            if !(weight > 0.0) {
                return Err(Error::invalid(format!(
                    "non-positive weight {weight} on {origin}->{destination}"
                )));
            }
            if !nodes.contains(&origin) || !nodes.contains(&destination) {
                return Err(Error::invalid(format!(
                    "edge {origin}->{destination} has endpoint outside the node set"
                )));
            }
            weights.insert((origin, destination), weight);
        }
        Ok(NetworkSnapshot {
            nodes,
            weights,
            year_range,
        })
    }

    pub fn nodes(&self) -> &BTreeSet<CountryCode> {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn year_range(&self) -> (i32, i32) {
        self.year_range
    }

    pub fn weight(&self, origin: &CountryCode, destination: &CountryCode) -> Option<f64> {
        self.weights.get(&(origin.clone(), destination.clone())).copied()
    }

    pub fn has_edge(&self, origin: &CountryCode, destination: &CountryCode) -> bool {
        self.weights.contains_key(&(origin.clone(), destination.clone()))
    }

    /// All directed edges in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (&CountryCode, &CountryCode, f64)> {
        self.weights.iter().map(|((o, d), w)| (o, d, *w))
    }

    /// Count of distinct in- or out-neighbors with positive aggregated flow.
    pub fn degree(&self, node: &CountryCode, direction: Direction) -> Result<usize> {
        if !self.nodes.contains(node) {
            return Err(Error::NotFound(format!("node {node}")));
        }
        let deg = match direction {
            Direction::Out => self.weights.keys().filter(|(o, _)| o == node).count(),
            Direction::In => self.weights.keys().filter(|(_, d)| d == node).count(),
        };
        Ok(deg)
    }
}

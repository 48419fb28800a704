//! Distance-indexed profiles: how outgoing flow, out-neighborhoods and
//! incoming flow distribute over chemical hop counts or geographic distance
//! bins, plus the per-country argmax matrix and the degree-quadrant
//! classification.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesy::{EARTH_RADIUS_KM, GeoBinning, geo_bin, haversine_km_with_radius};
use crate::model::{CountryCode, CountryRegistry, NetworkSnapshot};
use crate::paths::ChemicalDistanceMatrix;
use crate::util::{csv_field, sig6};
use crate::view::SnapshotView;

/// What a profile index means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexKind {
    /// Hop count on the infrastructure network.
    Chemical,
    /// Centroid great-circle distance, binned at `bin_km`; bin k covers
    /// (k·bin_km, (k+1)·bin_km].
    Geographic { bin_km: f64 },
}

impl IndexKind {
    fn metadata_line(&self) -> String {
        match self {
            IndexKind::Chemical => "# index_kind=chemical\n".to_string(),
            IndexKind::Geographic { bin_km } => {
                format!("# index_kind=geographic,bin_km={bin_km}\n")
            }
        }
    }
}

/// Where edge distance indices come from.
pub enum IndexSource<'a> {
    /// Hop counts from a precomputed all-pairs matrix.
    Chemical(&'a ChemicalDistanceMatrix),
    /// Centroid distances between registered countries.
    Geographic {
        registry: &'a CountryRegistry,
        binning: GeoBinning,
        radius_km: f64,
    },
}

impl<'a> IndexSource<'a> {
    /// Geographic source with the standard Earth radius.
    pub fn geographic(registry: &'a CountryRegistry, binning: GeoBinning) -> Self {
        IndexSource::Geographic {
            registry,
            binning,
            radius_km: EARTH_RADIUS_KM,
        }
    }

    pub fn kind(&self) -> IndexKind {
        match self {
            IndexSource::Chemical(_) => IndexKind::Chemical,
            IndexSource::Geographic { binning, .. } => IndexKind::Geographic {
                bin_km: binning.width_km,
            },
        }
    }

    /// Index for one edge; `None` when no distance is available (country
    /// not covered, pair unreachable, coincident centroids).
    fn index_of(&self, origin: &CountryCode, destination: &CountryCode) -> Option<u32> {
        match self {
            IndexSource::Chemical(matrix) => matrix.distance(origin, destination).ok().flatten(),
            IndexSource::Geographic {
                registry,
                binning,
                radius_km,
            } => {
                let a = registry.get(origin)?.centroid();
                let b = registry.get(destination)?.centroid();
                let d = haversine_km_with_radius(a, b, *radius_km).ok()?;
                geo_bin(d, binning).ok()
            }
        }
    }
}

/// Whether the across-country mean weights every country equally or by its
/// total outgoing volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountryWeighting {
    #[default]
    Equal,
    FlowVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileBucket {
    /// Across-country mean of the per-country fraction at this index.
    pub mean_fraction: f64,
    /// std / sqrt(samples) over the contributing countries.
    pub standard_error: f64,
    /// Countries entering the mean (those with any indexed edge; a country
    /// without edges at this particular index contributes a zero fraction).
    pub samples: usize,
}

/// Across-country distribution of a per-country fraction over distance
/// indices. Per country the fractions sum to 1, and so do the means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceProfile {
    pub kind: IndexKind,
    pub weighting: CountryWeighting,
    pub buckets: BTreeMap<u32, ProfileBucket>,
    /// Countries with at least one indexed outgoing edge.
    pub countries: usize,
    /// Edges skipped because no distance index was available.
    pub excluded_edges: usize,
}

impl DistanceProfile {
    /// `index,mean_fraction,standard_error,samples` rows with metadata
    /// comments.
    pub fn to_csv(&self) -> String {
        let mut out = self.kind.metadata_line();
        out.push_str(&format!("# excluded_edges={}\n", self.excluded_edges));
        out.push_str("index,mean_fraction,standard_error,samples\n");
        for (index, bucket) in &self.buckets {
            out.push_str(&format!(
                "{index},{},{},{}\n",
                sig6(bucket.mean_fraction),
                sig6(bucket.standard_error),
                bucket.samples
            ));
        }
        out
    }
}

/// Per-country share of outgoing tourist volume per distance index,
/// averaged across countries.
pub fn outgoing_flow_profile(
    snapshot: &NetworkSnapshot,
    index_source: &IndexSource,
) -> DistanceProfile {
    outgoing_flow_profile_with(snapshot, index_source, CountryWeighting::default())
}

pub fn outgoing_flow_profile_with(
    snapshot: &NetworkSnapshot,
    index_source: &IndexSource,
    weighting: CountryWeighting,
) -> DistanceProfile {
    per_country_profile(snapshot, index_source, weighting, |_, weight| weight)
}

/// Per-country share of out-neighbors (link counts) per distance index,
/// averaged across countries.
pub fn link_share_profile(
    snapshot: &NetworkSnapshot,
    index_source: &IndexSource,
) -> DistanceProfile {
    link_share_profile_with(snapshot, index_source, CountryWeighting::default())
}

pub fn link_share_profile_with(
    snapshot: &NetworkSnapshot,
    index_source: &IndexSource,
    weighting: CountryWeighting,
) -> DistanceProfile {
    per_country_profile(snapshot, index_source, weighting, |_, _| 1.0)
}

/// Shared aggregation: accumulate `contribution(index, weight)` per edge
/// into per-country fractions, then average the fractions across countries.
fn per_country_profile(
    snapshot: &NetworkSnapshot,
    index_source: &IndexSource,
    weighting: CountryWeighting,
    contribution: impl Fn(u32, f64) -> f64,
) -> DistanceProfile {
    let view = SnapshotView::new(snapshot);
    // per country: (fractions per index, country weight)
    let mut fractions: Vec<(BTreeMap<u32, f64>, f64)> = Vec::new();
    let mut excluded_edges = 0usize;
    for i in 0..view.len() {
        if view.out[i].is_empty() {
            continue;
        }
        let mut per_index: BTreeMap<u32, f64> = BTreeMap::new();
        let mut total = 0.0;
        let mut volume = 0.0;
        for &(j, weight) in &view.out[i] {
            match index_source.index_of(&view.nodes[i], &view.nodes[j]) {
                Some(index) => {
                    let value = contribution(index, weight);
                    *per_index.entry(index).or_insert(0.0) += value;
                    total += value;
                    volume += weight;
                }
                None => excluded_edges += 1,
            }
        }
        if total > 0.0 {
            per_index.values_mut().for_each(|v| *v /= total);
            let country_weight = match weighting {
                CountryWeighting::Equal => 1.0,
                CountryWeighting::FlowVolume => volume,
            };
            fractions.push((per_index, country_weight));
        }
    }

    let countries = fractions.len();
    let indices: std::collections::BTreeSet<u32> = fractions
        .iter()
        .flat_map(|(m, _)| m.keys().copied())
        .collect();
    let total_weight: f64 = fractions.iter().map(|(_, w)| w).sum();
    let mut buckets = BTreeMap::new();
    for index in indices {
        let mean = fractions
            .iter()
            .map(|(m, w)| w * m.get(&index).copied().unwrap_or(0.0))
            .sum::<f64>()
            / total_weight;
        let variance = fractions
            .iter()
            .map(|(m, w)| w * (m.get(&index).copied().unwrap_or(0.0) - mean).powi(2))
            .sum::<f64>()
            / total_weight;
        buckets.insert(
            index,
            ProfileBucket {
                mean_fraction: mean,
                standard_error: (variance / countries as f64).sqrt(),
                samples: countries,
            },
        );
    }
    DistanceProfile {
        kind: index_source.kind(),
        weighting,
        buckets,
        countries,
        excluded_edges,
    }
}

/// One normalized cell of the incoming-flow landscape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncomingCell {
    pub country: CountryCode,
    pub index: u32,
    /// Share of the global landscape; all cells sum to 1.
    pub value: f64,
}

/// Mean tourist inflow per in-neighbor, split by distance index and
/// normalized over the whole (country × index) landscape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncomingProfile {
    pub kind: IndexKind,
    pub cells: Vec<IncomingCell>,
    /// Marginal mass per index; sums to 1.
    pub index_mass: BTreeMap<u32, f64>,
    pub excluded_edges: usize,
}

impl IncomingProfile {
    /// `country,index,value` rows with metadata comments.
    pub fn to_csv(&self) -> String {
        let mut out = self.kind.metadata_line();
        out.push_str(&format!("# excluded_edges={}\n", self.excluded_edges));
        out.push_str("country,index,value\n");
        for cell in &self.cells {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(cell.country.as_str()),
                cell.index,
                sig6(cell.value)
            ));
        }
        out
    }
}

/// For each receiving country and distance index: total inflow from
/// in-neighbors at that index divided by their count, then a global
/// normalization so that every cell is a share of the whole picture.
pub fn incoming_flow_profile(
    snapshot: &NetworkSnapshot,
    index_source: &IndexSource,
) -> IncomingProfile {
    let view = SnapshotView::new(snapshot);
    let mut raw: Vec<(CountryCode, u32, f64)> = Vec::new();
    let mut excluded_edges = 0usize;
    for j in 0..view.len() {
        let mut sums: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
        for &(i, weight) in &view.inc[j] {
            match index_source.index_of(&view.nodes[i], &view.nodes[j]) {
                Some(index) => {
                    let slot = sums.entry(index).or_insert((0.0, 0));
                    slot.0 += weight;
                    slot.1 += 1;
                }
                None => excluded_edges += 1,
            }
        }
        for (index, (total, count)) in sums {
            raw.push((view.nodes[j].clone(), index, total / count as f64));
        }
    }

    let grand: f64 = raw.iter().map(|(_, _, v)| v).sum();
    let mut index_mass: BTreeMap<u32, f64> = BTreeMap::new();
    let cells: Vec<IncomingCell> = raw
        .into_iter()
        .map(|(country, index, value)| {
            let share = if grand > 0.0 { value / grand } else { 0.0 };
            *index_mass.entry(index).or_insert(0.0) += share;
            IncomingCell {
                country,
                index,
                value: share,
            }
        })
        .collect();
    IncomingProfile {
        kind: index_source.kind(),
        cells,
        index_mass,
        excluded_edges,
    }
}

/// Anything with a normalized mass per distance index.
pub trait DistanceMass {
    fn mass_per_index(&self) -> BTreeMap<u32, f64>;
}

impl DistanceMass for DistanceProfile {
    fn mass_per_index(&self) -> BTreeMap<u32, f64> {
        self.buckets
            .iter()
            .map(|(i, b)| (*i, b.mean_fraction))
            .collect()
    }
}

impl DistanceMass for IncomingProfile {
    fn mass_per_index(&self) -> BTreeMap<u32, f64> {
        self.index_mass.clone()
    }
}

/// Total mass at indices `<= up_to_index`. Indices below the observed range
/// sum to 0; asking beyond the observed range is an error because it
/// usually means the caller assumed a wider binning than the data has.
pub fn cumulative_share<P: DistanceMass>(profile: &P, up_to_index: u32) -> Result<f64> {
    let masses = profile.mass_per_index();
    let max = masses
        .keys()
        .next_back()
        .copied()
        .ok_or_else(|| Error::invalid("profile has no indices"))?;
    if up_to_index > max {
        return Err(Error::invalid(format!(
            "index {up_to_index} beyond the observed range (max {max})"
        )));
    }
    Ok(masses.range(..=up_to_index).map(|(_, v)| v).sum())
}

/// Count of countries per (flow-argmax, link-argmax) pair of indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxCell {
    pub flow_index: u32,
    pub link_index: u32,
    pub countries: u32,
}

/// Joint histogram of where each country's flow share and link share peak.
/// The grid spans every observed index in both dimensions, zero cells
/// included, so unregistered combinations are visible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxMatrix {
    pub kind: IndexKind,
    pub indices: Vec<u32>,
    pub cells: Vec<ArgmaxCell>,
    /// Countries that contributed one cell each.
    pub countries: usize,
    pub excluded_edges: usize,
}

impl ArgmaxMatrix {
    pub fn count(&self, flow_index: u32, link_index: u32) -> Option<u32> {
        self.cells
            .iter()
            .find(|c| c.flow_index == flow_index && c.link_index == link_index)
            .map(|c| c.countries)
    }

    /// `flow_index,link_index,countries` rows over the full grid.
    pub fn to_csv(&self) -> String {
        let mut out = self.kind.metadata_line();
        out.push_str(&format!("# excluded_edges={}\n", self.excluded_edges));
        out.push_str("flow_index,link_index,countries\n");
        for cell in &self.cells {
            out.push_str(&format!(
                "{},{},{}\n",
                cell.flow_index, cell.link_index, cell.countries
            ));
        }
        out
    }
}

/// Where each country's outgoing flow fraction and link fraction peak;
/// ties resolve toward the smaller index.
pub fn argmax_matrix(snapshot: &NetworkSnapshot, index_source: &IndexSource) -> ArgmaxMatrix {
    let view = SnapshotView::new(snapshot);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut excluded_edges = 0usize;
    for i in 0..view.len() {
        if view.out[i].is_empty() {
            continue;
        }
        let mut flow: BTreeMap<u32, f64> = BTreeMap::new();
        let mut links: BTreeMap<u32, f64> = BTreeMap::new();
        for &(j, weight) in &view.out[i] {
            match index_source.index_of(&view.nodes[i], &view.nodes[j]) {
                Some(index) => {
                    *flow.entry(index).or_insert(0.0) += weight;
                    *links.entry(index).or_insert(0.0) += 1.0;
                }
                None => excluded_edges += 1,
            }
        }
        match (argmax(&flow), argmax(&links)) {
            (Some(f), Some(l)) => pairs.push((f, l)),
            _ => continue,
        }
    }

    let indices: Vec<u32> = pairs
        .iter()
        .flat_map(|&(f, l)| [f, l])
        .collect::<std::collections::BTreeSet<u32>>()
        .into_iter()
        .collect();
    let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for &(f, l) in &pairs {
        *counts.entry((f, l)).or_insert(0) += 1;
    }
    let cells = indices
        .iter()
        .flat_map(|&f| {
            let counts = &counts;
            indices.iter().map(move |&l| ArgmaxCell {
                flow_index: f,
                link_index: l,
                countries: counts.get(&(f, l)).copied().unwrap_or(0),
            })
        })
        .collect();
    ArgmaxMatrix {
        kind: index_source.kind(),
        indices,
        cells,
        countries: pairs.len(),
        excluded_edges,
    }
}

/// First key with the maximal value, so ties break toward smaller indices.
fn argmax(values: &BTreeMap<u32, f64>) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for (&index, &value) in values {
        match best {
            Some((_, b)) if value <= b => {}
            _ => best = Some((index, value)),
        }
    }
    best.map(|(i, _)| i)
}

/// Quadrant labels for the median split of (in-degree, out-degree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadrantLabel {
    I,
    II,
    III,
    IV,
}

impl QuadrantLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadrantLabel::I => "I",
            QuadrantLabel::II => "II",
            QuadrantLabel::III => "III",
            QuadrantLabel::IV => "IV",
        }
    }
}

impl std::str::FromStr for QuadrantLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" => Ok(QuadrantLabel::I),
            "II" => Ok(QuadrantLabel::II),
            "III" => Ok(QuadrantLabel::III),
            "IV" => Ok(QuadrantLabel::IV),
            other => Err(Error::invalid(format!("unknown quadrant label {other}"))),
        }
    }
}

/// Which label each (in, out) median region gets. The regions are fixed;
/// only the naming is configurable because the figure being reproduced
/// does not pin it down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadrantMapping {
    pub low_in_low_out: QuadrantLabel,
    pub low_in_high_out: QuadrantLabel,
    pub high_in_high_out: QuadrantLabel,
    pub high_in_low_out: QuadrantLabel,
}

impl Default for QuadrantMapping {
    fn default() -> Self {
        QuadrantMapping {
            low_in_low_out: QuadrantLabel::I,
            low_in_high_out: QuadrantLabel::II,
            high_in_high_out: QuadrantLabel::III,
            high_in_low_out: QuadrantLabel::IV,
        }
    }
}

impl QuadrantMapping {
    /// Parse `"I,II,III,IV"`-style lists giving the labels for low/low,
    /// low-in/high-out, high/high, high-in/low-out in that order; the four
    /// labels must be distinct.
    pub fn parse(s: &str) -> Result<Self> {
        let labels: Vec<QuadrantLabel> = s
            .split(',')
            .map(str::parse)
            .collect::<Result<_>>()?;
        if labels.len() != 4 {
            return Err(Error::invalid(format!(
                "quadrant mapping needs 4 labels, got {}",
                labels.len()
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::invalid("quadrant mapping labels must be distinct"));
            }
        }
        Ok(QuadrantMapping {
            low_in_low_out: labels[0],
            low_in_high_out: labels[1],
            high_in_high_out: labels[2],
            high_in_low_out: labels[3],
        })
    }

    fn label(&self, high_in: bool, high_out: bool) -> QuadrantLabel {
        match (high_in, high_out) {
            (false, false) => self.low_in_low_out,
            (false, true) => self.low_in_high_out,
            (true, true) => self.high_in_high_out,
            (true, false) => self.high_in_low_out,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantEntry {
    pub country: CountryCode,
    pub in_degree: usize,
    pub out_degree: usize,
    pub quadrant: QuadrantLabel,
    /// F_out / F_in; `None` when nothing flows in.
    pub flow_ratio: Option<f64>,
    /// Nodes nothing points at, reported separately because their ratio is
    /// undefined and reference plots drop them.
    pub zero_in_degree: bool,
}

/// Median split of all nodes by in- and out-degree. A node exactly at a
/// median counts as low.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantReport {
    pub entries: Vec<QuadrantEntry>,
    pub median_in_degree: f64,
    pub median_out_degree: f64,
    pub mapping: QuadrantMapping,
}

impl QuadrantReport {
    /// `country,in_degree,out_degree,quadrant,flow_ratio,zero_in_degree`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# median_in_degree={},median_out_degree={}\n",
            sig6(self.median_in_degree),
            sig6(self.median_out_degree)
        );
        out.push_str("country,in_degree,out_degree,quadrant,flow_ratio,zero_in_degree\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_field(e.country.as_str()),
                e.in_degree,
                e.out_degree,
                e.quadrant.as_str(),
                e.flow_ratio.map(sig6).unwrap_or_default(),
                e.zero_in_degree
            ));
        }
        out
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn quadrant_classification(snapshot: &NetworkSnapshot) -> Result<QuadrantReport> {
    quadrant_classification_with(snapshot, QuadrantMapping::default())
}

pub fn quadrant_classification_with(
    snapshot: &NetworkSnapshot,
    mapping: QuadrantMapping,
) -> Result<QuadrantReport> {
    let view = SnapshotView::new(snapshot);
    let n = view.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "quadrant classification needs at least 2 nodes, got {n}"
        )));
    }
    let mut in_degrees: Vec<f64> = (0..n).map(|i| view.in_degree(i) as f64).collect();
    let mut out_degrees: Vec<f64> = (0..n).map(|i| view.out_degree(i) as f64).collect();
    in_degrees.sort_by(f64::total_cmp);
    out_degrees.sort_by(f64::total_cmp);
    let median_in = median(&in_degrees);
    let median_out = median(&out_degrees);

    let entries = (0..n)
        .map(|i| {
            let in_degree = view.in_degree(i);
            let out_degree = view.out_degree(i);
            let f_in = view.in_strength(i);
            let f_out = view.out_strength(i);
            QuadrantEntry {
                country: view.nodes[i].clone(),
                in_degree,
                out_degree,
                quadrant: mapping.label(
                    in_degree as f64 > median_in,
                    out_degree as f64 > median_out,
                ),
                flow_ratio: if f_in > 0.0 { Some(f_out / f_in) } else { None },
                zero_in_degree: in_degree == 0,
            }
        })
        .collect();
    Ok(QuadrantReport {
        entries,
        median_in_degree: median_in,
        median_out_degree: median_out,
        mapping,
    })
}

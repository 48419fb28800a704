//! Null models: degree-preserving rewiring of a snapshot, random reference
//! generators, and seeded ensemble statistics over rewired instances.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{
    TriangleKind, basic_stats, clustering_suite, reciprocity_stats, triangle_census,
    triangle_summary,
};
use crate::model::{CountryCode, InfrastructureNetwork, NetworkSnapshot};
use crate::util::{mean_std, sig6};

/// What weights the rewired edges carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightAssignment {
    /// A seeded permutation of the original weight multiset.
    #[default]
    ShuffledOriginals,
    /// Unit weight on every edge (topology-only null model).
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewireOptions {
    /// Accepted double-edge swaps per link before the chain stops.
    pub swaps_per_edge: usize,
    /// Attempt budget as a multiple of the accepted-swap target; exceeding
    /// it aborts with a budget error instead of spinning forever.
    pub attempt_factor: u64,
    pub weights: WeightAssignment,
}

impl Default for RewireOptions {
    fn default() -> Self {
        RewireOptions {
            swaps_per_edge: 10,
            attempt_factor: 100,
            weights: WeightAssignment::default(),
        }
    }
}

/// Degree-preserving randomization with default options: 10·L accepted
/// swaps, weights shuffled.
pub fn configuration_rewire(snapshot: &NetworkSnapshot, seed: u64) -> Result<NetworkSnapshot> {
    configuration_rewire_with(snapshot, seed, &RewireOptions::default())
}

/// Degree-preserving randomization via a double-edge-swap Markov chain.
///
/// Two distinct directed edges (a,b), (c,d) are replaced by (a,d), (c,b)
/// whenever that keeps the graph simple; each accepted swap preserves every
/// node's in- and out-degree. Swaps that would produce a self-loop or a
/// duplicate edge, or that would change nothing, are rejected and only
/// consume attempt budget. Some degree sequences admit no swap at all (a
/// single mutual pair, for instance); those exhaust the budget and fail.
pub fn configuration_rewire_with(
    snapshot: &NetworkSnapshot,
    seed: u64,
    options: &RewireOptions,
) -> Result<NetworkSnapshot> {
    let nodes: Vec<CountryCode> = snapshot.nodes().iter().cloned().collect();
    let index: BTreeMap<&CountryCode, usize> =
        nodes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(snapshot.edge_count());
    let mut weights: Vec<f64> = Vec::with_capacity(snapshot.edge_count());
    for (origin, destination, weight) in snapshot.edges() {
        edges.push((index[origin], index[destination]));
        weights.push(weight);
    }
    let m = edges.len();
    if m < 2 {
        return Err(Error::invalid(format!(
            "rewiring needs at least 2 links, got {m}"
        )));
    }

    let mut present: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = (options.swaps_per_edge * m) as u64;
    let budget = target.saturating_mul(options.attempt_factor);
    let mut accepted = 0u64;
    let mut attempts = 0u64;
    while accepted < target {
        if attempts >= budget {
            return Err(Error::RewireBudget {
                attempts: budget,
                seed,
            });
        }
        attempts += 1;
        let e1 = rng.random_range(0..m);
        let e2 = rng.random_range(0..m);
        if e1 == e2 {
            continue;
        }
        let (a, b) = edges[e1];
        let (c, d) = edges[e2];
        if a == c || b == d || a == d || c == b {
            continue;
        }
        if present.contains(&(a, d)) || present.contains(&(c, b)) {
            continue;
        }
        present.remove(&(a, b));
        present.remove(&(c, d));
        present.insert((a, d));
        present.insert((c, b));
        edges[e1] = (a, d);
        edges[e2] = (c, b);
        accepted += 1;
    }

    match options.weights {
        WeightAssignment::ShuffledOriginals => weights.shuffle(&mut rng),
        WeightAssignment::Unit => weights.iter_mut().for_each(|w| *w = 1.0),
    }

    let weighted: Vec<(CountryCode, CountryCode, f64)> = edges
        .iter()
        .zip(&weights)
        .map(|(&(o, d), &w)| (nodes[o].clone(), nodes[d].clone(), w))
        .collect();
    NetworkSnapshot::from_weighted_edges(nodes.iter().cloned(), weighted, snapshot.year_range())
}

fn synthetic_codes(n: usize) -> Vec<CountryCode> {
    (0..n).map(|i| CountryCode::from(format!("N{i:04}"))).collect()
}

/// Directed random graph: each ordered pair is linked independently with
/// probability `p`, unit weights.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<NetworkSnapshot> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 nodes, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("link probability {p} outside [0, 1]")));
    }
    let nodes = synthetic_codes(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                edges.push((nodes[i].clone(), nodes[j].clone(), 1.0));
            }
        }
    }
    NetworkSnapshot::from_weighted_edges(nodes, edges, (0, 0))
}

/// Undirected preferential-attachment growth. Starts from a complete graph
/// on `m` seed nodes; every later node attaches to `m` distinct existing
/// nodes drawn proportionally to degree. The result has exactly
/// m(m-1)/2 + (n-m)·m edges and minimum degree m: the first newcomer links
/// to the whole seed clique, lifting every seed node to degree m.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<InfrastructureNetwork> {
    if !(1..n).contains(&m) {
        return Err(Error::invalid(format!(
            "attachment count {m} must satisfy 1 <= m < n = {n}"
        )));
    }
    let nodes = synthetic_codes(n);
    let mut infra = InfrastructureNetwork::new(nodes.iter().cloned());
    // one entry per edge endpoint, so sampling an entry is degree-biased
    let mut endpoints: Vec<usize> = Vec::new();
    for i in 0..m {
        for j in 0..i {
            infra.add_edge(&nodes[i], &nodes[j])?;
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in m..n {
        let mut chosen: BTreeSet<usize> = BTreeSet::new();
        while chosen.len() < m {
            // the seed clique guarantees the endpoint pool is never empty
            let pick = if endpoints.is_empty() {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            chosen.insert(pick);
        }
        for &u in &chosen {
            infra.add_edge(&nodes[v], &nodes[u])?;
            endpoints.push(v);
            endpoints.push(u);
        }
    }
    Ok(infra)
}

/// Scalar observables that can be averaged over a rewired ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EnsembleMetric {
    Density,
    MeanOutDegree,
    BidirectionalFraction,
    WeightedReciprocity,
    MeanCyclicClustering,
    WeightedClustering,
    MeanUndirectedClustering,
    /// Share of this class in the four-class triangle total.
    TriangleShare(TriangleKind),
    /// Fraction of nodes touching at least one triangle of this class.
    TriangleParticipation(TriangleKind),
}

impl EnsembleMetric {
    /// Stable string key used in reports.
    pub fn key(&self) -> String {
        match self {
            EnsembleMetric::Density => "density".into(),
            EnsembleMetric::MeanOutDegree => "mean_out_degree".into(),
            EnsembleMetric::BidirectionalFraction => "bidirectional_fraction".into(),
            EnsembleMetric::WeightedReciprocity => "weighted_reciprocity".into(),
            EnsembleMetric::MeanCyclicClustering => "mean_cyclic_clustering".into(),
            EnsembleMetric::WeightedClustering => "weighted_clustering".into(),
            EnsembleMetric::MeanUndirectedClustering => "mean_undirected_clustering".into(),
            EnsembleMetric::TriangleShare(kind) => format!("triangle_share_{}", kind.as_str()),
            EnsembleMetric::TriangleParticipation(kind) => {
                format!("triangle_participation_{}", kind.as_str())
            }
        }
    }

    /// The set used by the standard null-model table: density, reciprocity,
    /// clustering, and both triangle statistics for all four classes.
    pub fn standard_set() -> Vec<EnsembleMetric> {
        let mut set = vec![
            EnsembleMetric::Density,
            EnsembleMetric::MeanOutDegree,
            EnsembleMetric::BidirectionalFraction,
            EnsembleMetric::WeightedReciprocity,
            EnsembleMetric::MeanCyclicClustering,
            EnsembleMetric::WeightedClustering,
            EnsembleMetric::MeanUndirectedClustering,
        ];
        for kind in TriangleKind::ALL {
            set.push(EnsembleMetric::TriangleShare(kind));
        }
        for kind in TriangleKind::ALL {
            set.push(EnsembleMetric::TriangleParticipation(kind));
        }
        set
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    /// Instances where the observable was defined.
    pub samples: usize,
}

/// Per-metric mean and population standard deviation over a rewired
/// ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub instances: usize,
    pub base_seed: u64,
    pub stats: BTreeMap<String, MeanStd>,
}

impl EnsembleStats {
    /// `metric,mean,std,samples` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,mean,std,samples\n");
        for (key, ms) in &self.stats {
            out.push_str(&format!(
                "{key},{},{},{}\n",
                sig6(ms.mean),
                sig6(ms.std),
                ms.samples
            ));
        }
        out
    }

    /// Triangle classes as rows, share and participation columns; the
    /// layout used for side-by-side comparison against the observed
    /// network.
    pub fn triangle_table_csv(&self) -> String {
        let mut out = String::from(
            "triangle_type,share_mean,share_std,participation_mean,participation_std\n",
        );
        for kind in TriangleKind::ALL {
            let share = self.stats.get(&format!("triangle_share_{}", kind.as_str()));
            let part = self
                .stats
                .get(&format!("triangle_participation_{}", kind.as_str()));
            let cell = |ms: Option<&MeanStd>, f: fn(&MeanStd) -> f64| {
                ms.map(|m| sig6(f(m))).unwrap_or_default()
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                kind.as_str(),
                cell(share, |m| m.mean),
                cell(share, |m| m.std),
                cell(part, |m| m.mean),
                cell(part, |m| m.std),
            ));
        }
        out
    }
}

/// Evaluate one metric on one snapshot; `None` when undefined there.
fn evaluate(metric: &EnsembleMetric, snapshot: &NetworkSnapshot) -> Result<Option<f64>> {
    Ok(match metric {
        EnsembleMetric::Density => Some(basic_stats(snapshot)?.density),
        EnsembleMetric::MeanOutDegree => Some(basic_stats(snapshot)?.mean_out_degree),
        EnsembleMetric::BidirectionalFraction => {
            Some(reciprocity_stats(snapshot).bidirectional_link_fraction)
        }
        EnsembleMetric::WeightedReciprocity => reciprocity_stats(snapshot).weighted_reciprocity,
        EnsembleMetric::MeanCyclicClustering => Some(clustering_suite(snapshot).mean_cyclic),
        EnsembleMetric::WeightedClustering => clustering_suite(snapshot).weighted,
        EnsembleMetric::MeanUndirectedClustering => clustering_suite(snapshot).mean_undirected,
        EnsembleMetric::TriangleShare(kind) => {
            let summary = triangle_summary(&triangle_census(snapshot));
            summary.distribution.map(|d| d[kind_index(*kind)])
        }
        EnsembleMetric::TriangleParticipation(kind) => {
            let summary = triangle_summary(&triangle_census(snapshot));
            Some(summary.participation[kind_index(*kind)])
        }
    })
}

fn kind_index(kind: TriangleKind) -> usize {
    TriangleKind::ALL
        .iter()
        .position(|k| *k == kind)
        .expect("kind is one of the four classes")
}

/// Rewire the snapshot with seeds `seed .. seed + n - 1`, evaluate every
/// requested metric on each instance, and average. Metrics undefined on an
/// instance are skipped for that instance; `samples` records how many
/// instances contributed.
pub fn ensemble_stats(
    snapshot: &NetworkSnapshot,
    n: usize,
    seed: u64,
    metrics: &[EnsembleMetric],
) -> Result<EnsembleStats> {
    if n < 1 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for i in 0..n {
        let instance = configuration_rewire(snapshot, seed + i as u64)?;
        for metric in metrics {
            if let Some(value) = evaluate(metric, &instance)? {
                series.entry(metric.key()).or_default().push(value);
            }
        }
    }
    let stats = series
        .into_iter()
        .filter_map(|(key, values)| {
            mean_std(&values).map(|(mean, std)| {
                (
                    key,
                    MeanStd {
                        mean,
                        std,
                        samples: values.len(),
                    },
                )
            })
        })
        .collect();
    Ok(EnsembleStats {
        instances: n,
        base_seed: seed,
        stats,
    })
}

//! Modularity communities on the weighted flow network.
//!
//! Flows are symmetrized (w'_ij = w_ij + w_ji) and partitioned by greedy
//! two-phase modularity maximization with seeded restarts. Everything is
//! deterministic for a given (seed, restarts) pair: node visit order is a
//! seeded shuffle, ties prefer the lowest community id, and the best
//! restart is chosen by modularity with canonical-label comparison as the
//! tie break.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CountryCode, CountryRegistry, NetworkSnapshot};
use crate::util::csv_field;

/// A node-to-community assignment with its modularity and run metadata.
///
/// Labels are canonical: communities are numbered in order of their
/// smallest member node, so equal partitions compare equal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub assignment: BTreeMap<CountryCode, u32>,
    pub modularity: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.assignment
            .values()
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }

    /// `node,community` rows in node order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,community\n");
        for (code, community) in &self.assignment {
            out.push_str(&format!("{},{community}\n", csv_field(code.as_str())));
        }
        out
    }
}

/// Divide every edge weight by the population of the sending country; the
/// topology is untouched. Countries that never send flow do not need a
/// population.
pub fn normalize_by_population(
    snapshot: &NetworkSnapshot,
    registry: &CountryRegistry,
) -> Result<NetworkSnapshot> {
    let mut edges = Vec::with_capacity(snapshot.edge_count());
    for (origin, destination, weight) in snapshot.edges() {
        let population = registry
            .get(origin)
            .and_then(|rec| rec.population)
            .ok_or_else(|| {
                Error::invalid(format!("population missing for sending country {origin}"))
            })?;
        edges.push((origin.clone(), destination.clone(), weight / population as f64));
    }
    NetworkSnapshot::from_weighted_edges(
        snapshot.nodes().iter().cloned(),
        edges,
        snapshot.year_range(),
    )
}

/// Symmetrized weighted graph in index space, with the double-sum total
/// W2 = sum over ordered pairs of w'_ij.
struct SymmetricGraph {
    nodes: Vec<CountryCode>,
    adj: Vec<Vec<(usize, f64)>>,
    strengths: Vec<f64>,
    w2: f64,
}

impl SymmetricGraph {
    fn build(snapshot: &NetworkSnapshot) -> SymmetricGraph {
        let nodes: Vec<CountryCode> = snapshot.nodes().iter().cloned().collect();
        let index: BTreeMap<&CountryCode, usize> =
            nodes.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let n = nodes.len();
        let mut pair: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (origin, destination, weight) in snapshot.edges() {
            let o = index[origin];
            let d = index[destination];
            *pair[o].entry(d).or_insert(0.0) += weight;
            *pair[d].entry(o).or_insert(0.0) += weight;
        }
        let adj: Vec<Vec<(usize, f64)>> = pair
            .into_iter()
            .map(|row| row.into_iter().collect())
            .collect();
        let strengths: Vec<f64> = adj
            .iter()
            .map(|row| row.iter().map(|(_, w)| w).sum())
            .collect();
        let w2 = strengths.iter().sum();
        SymmetricGraph {
            nodes,
            adj,
            strengths,
            w2,
        }
    }

    /// Q for an assignment given as community id per node index.
    fn q(&self, community: &[usize]) -> f64 {
        let mut internal: BTreeMap<usize, f64> = BTreeMap::new();
        let mut tot: BTreeMap<usize, f64> = BTreeMap::new();
        for i in 0..self.nodes.len() {
            *tot.entry(community[i]).or_insert(0.0) += self.strengths[i];
            for &(j, w) in &self.adj[i] {
                if community[j] == community[i] {
                    *internal.entry(community[i]).or_insert(0.0) += w;
                }
            }
        }
        let mut q = 0.0;
        for (c, t) in &tot {
            let inside = internal.get(c).copied().unwrap_or(0.0);
            q += inside / self.w2 - (t / self.w2).powi(2);
        }
        q
    }
}

/// One coarsening level: cross-community edges plus per-node self-loop
/// mass (internal double-sum weight of the super node).
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    selfloop: Vec<f64>,
    strengths: Vec<f64>,
}

impl Level {
    fn from_graph(graph: &SymmetricGraph) -> Level {
        Level {
            adj: graph.adj.clone(),
            selfloop: vec![0.0; graph.nodes.len()],
            strengths: graph.strengths.clone(),
        }
    }

    fn len(&self) -> usize {
        self.strengths.len()
    }
}

/// Local-moving phase. Returns the community per node and whether any node
/// changed community.
fn move_nodes(level: &Level, w2: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = level.len();
    let mut community: Vec<usize> = (0..n).collect();
    let mut tot = level.strengths.clone();
    let mut improved = false;
    loop {
        let mut moved = false;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for &i in &order {
            let old = community[i];
            let s_i = level.strengths[i];
            let mut weight_to: BTreeMap<usize, f64> = BTreeMap::new();
            for &(j, w) in &level.adj[i] {
                *weight_to.entry(community[j]).or_insert(0.0) += w;
            }
            weight_to.entry(old).or_insert(0.0);
            tot[old] -= s_i;
            let mut best = old;
            let mut best_gain = f64::NEG_INFINITY;
            for (&candidate, &k) in &weight_to {
                let gain = k - s_i * tot[candidate] / w2;
                if gain > best_gain {
                    best_gain = gain;
                    best = candidate;
                }
            }
            tot[best] += s_i;
            community[i] = best;
            if best != old {
                moved = true;
                improved = true;
            }
        }
        if !moved {
            break;
        }
    }
    (community, improved)
}

/// Aggregation phase: communities become nodes. Labels are compacted in
/// ascending order so the coarse graph is deterministic.
fn aggregate(level: &Level, community: &[usize]) -> (Level, Vec<usize>) {
    let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in community.iter().collect::<std::collections::BTreeSet<_>>() {
        let next = relabel.len();
        relabel.insert(c, next);
    }
    let compact: Vec<usize> = community.iter().map(|c| relabel[c]).collect();
    let m = relabel.len();

    let mut cross: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); m];
    let mut selfloop = vec![0.0; m];
    let mut strengths = vec![0.0; m];
    for i in 0..level.len() {
        let ci = compact[i];
        strengths[ci] += level.strengths[i];
        selfloop[ci] += level.selfloop[i];
        for &(j, w) in &level.adj[i] {
            let cj = compact[j];
            if ci == cj {
                selfloop[ci] += w;
            } else {
                *cross[ci].entry(cj).or_insert(0.0) += w;
            }
        }
    }
    let adj = cross
        .into_iter()
        .map(|row| row.into_iter().collect())
        .collect();
    (
        Level {
            adj,
            selfloop,
            strengths,
        },
        compact,
    )
}

/// Full two-phase pass stack for one restart.
fn louvain_once(graph: &SymmetricGraph, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(graph);
    let mut membership: Vec<usize> = (0..graph.nodes.len()).collect();
    loop {
        let (community, improved) = move_nodes(&level, graph.w2, &mut rng);
        if !improved {
            break;
        }
        let (coarse, compact) = aggregate(&level, &community);
        for slot in membership.iter_mut() {
            *slot = compact[*slot];
        }
        if coarse.len() == level.len() {
            break;
        }
        level = coarse;
    }
    membership
}

/// Renumber communities by their smallest member node index.
fn canonicalize(membership: &[usize]) -> Vec<u32> {
    let mut relabel: BTreeMap<usize, u32> = BTreeMap::new();
    let mut canonical = Vec::with_capacity(membership.len());
    for &c in membership {
        let next = relabel.len() as u32;
        canonical.push(*relabel.entry(c).or_insert(next));
    }
    canonical
}

/// Best-of-restarts modularity maximization on the symmetrized flows.
///
/// Restart r runs with seed `seed + r`. The winner has the highest Q; exact
/// ties go to the lexicographically smallest canonical labeling. A result
/// worse than putting everything in one community (Q = 0) is replaced by
/// that trivial partition, so Q is never negative.
pub fn detect_communities(
    snapshot: &NetworkSnapshot,
    seed: u64,
    restarts: usize,
) -> Result<Partition> {
    if snapshot.edge_count() == 0 {
        return Err(Error::invalid("community detection needs at least one edge"));
    }
    if restarts == 0 {
        return Err(Error::invalid("at least one restart is required"));
    }
    let graph = SymmetricGraph::build(snapshot);
    let mut best: Option<(f64, Vec<u32>)> = None;
    for r in 0..restarts {
        let membership = louvain_once(&graph, seed + r as u64);
        let canonical = canonicalize(&membership);
        let q = graph.q(&membership);
        let better = match &best {
            None => true,
            Some((best_q, best_labels)) => {
                q > *best_q || (q == *best_q && canonical < *best_labels)
            }
        };
        if better {
            best = Some((q, canonical));
        }
    }
    let (mut q, mut labels) = best.expect("restarts >= 1");
    if q < 0.0 {
        q = 0.0;
        labels = vec![0; graph.nodes.len()];
    }
    let assignment = graph
        .nodes
        .iter()
        .cloned()
        .zip(labels.iter().copied())
        .collect();
    Ok(Partition {
        assignment,
        modularity: q,
        seed,
        restarts,
    })
}

/// Modularity of an externally supplied assignment on the symmetrized
/// graph. Every snapshot node must be assigned.
pub fn modularity(
    snapshot: &NetworkSnapshot,
    assignment: &BTreeMap<CountryCode, u32>,
) -> Result<f64> {
    if snapshot.edge_count() == 0 {
        return Err(Error::invalid("modularity needs at least one edge"));
    }
    let graph = SymmetricGraph::build(snapshot);
    let membership: Vec<usize> = graph
        .nodes
        .iter()
        .map(|node| {
            assignment
                .get(node)
                .map(|c| *c as usize)
                .ok_or_else(|| Error::invalid(format!("node {node} missing from partition")))
        })
        .collect::<Result<_>>()?;
    Ok(graph.q(&membership))
}

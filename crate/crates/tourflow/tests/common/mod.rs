//! Shared fixtures for the integration suites: seeded random graph
//! generators and brute-force oracles that recompute the library's
//! observables from first principles.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use tourflow::metrics::CyclicDenominator;
use tourflow::model::{
    CountryCode, CountryRecord, CountryRegistry, InfrastructureNetwork, NetworkSnapshot,
};

pub fn code(i: usize) -> CountryCode {
    CountryCode::from(format!("C{i:03}"))
}

pub fn codes(n: usize) -> Vec<CountryCode> {
    (0..n).map(code).collect()
}

/// Snapshot from explicit weighted edges over an explicit node universe.
pub fn snapshot(edges: &[(&str, &str, f64)], nodes: &[&str]) -> NetworkSnapshot {
    let universe: BTreeSet<CountryCode> = nodes.iter().map(|&c| CountryCode::from(c)).collect();
    let list: Vec<_> = edges
        .iter()
        .map(|&(o, d, w)| (CountryCode::from(o), CountryCode::from(d), w))
        .collect();
    NetworkSnapshot::from_weighted_edges(universe, list, (2000, 2000)).unwrap()
}

/// Random simple digraph on `n` nodes where each ordered pair carries an
/// edge with probability `p`; weights are dyadic rationals so that scaling
/// by powers of two stays exact.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> NetworkSnapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe: BTreeSet<CountryCode> = codes(n).into_iter().collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                let w = rng.random_range(1..=2000) as f64 / 4.0;
                edges.push((code(i), code(j), w));
            }
        }
    }
    NetworkSnapshot::from_weighted_edges(universe, edges, (2000, 2000)).unwrap()
}

/// Random digraph with exactly `l` directed edges drawn uniformly from the
/// n·(n-1) ordered pairs.
pub fn random_exact_digraph(n: usize, l: usize, seed: u64) -> NetworkSnapshot {
    assert!(l <= n * (n - 1), "cannot place {l} edges on {n} nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = BTreeSet::new();
    while chosen.len() < l {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            chosen.insert((i, j));
        }
    }
    let universe: BTreeSet<CountryCode> = codes(n).into_iter().collect();
    let edges: Vec<_> = chosen
        .into_iter()
        .map(|(i, j)| (code(i), code(j), rng.random_range(1..=5000) as f64))
        .collect();
    NetworkSnapshot::from_weighted_edges(universe, edges, (2000, 2000)).unwrap()
}

/// Random undirected infrastructure on `n` nodes, each pair linked with
/// probability `p`.
pub fn random_infrastructure(n: usize, p: f64, seed: u64) -> InfrastructureNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = InfrastructureNetwork::new(codes(n));
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                net.add_edge(&code(i), &code(j)).unwrap();
            }
        }
    }
    net
}

/// Registry of `n` synthetic countries on a latitude/longitude grid, each
/// with the given population.
pub fn grid_registry(n: usize, population: Option<u64>) -> CountryRegistry {
    let mut registry = CountryRegistry::new();
    for i in 0..n {
        let lat = -60.0 + 120.0 * ((i / 24) as f64) / 9.0;
        let lon = -165.0 + 15.0 * ((i % 24) as f64);
        let record = CountryRecord::new(code(i), format!("Country {i}"), lat, lon, population)
            .expect("grid coordinates are valid");
        registry.insert(record).unwrap();
    }
    registry
}

/// Same snapshot with every weight multiplied by `factor`.
pub fn scale_weights(snap: &NetworkSnapshot, factor: f64) -> NetworkSnapshot {
    let edges: Vec<_> = snap
        .edges()
        .map(|(o, d, w)| (o.clone(), d.clone(), w * factor))
        .collect();
    NetworkSnapshot::from_weighted_edges(snap.nodes().clone(), edges, snap.year_range()).unwrap()
}

fn ordered_nodes(snap: &NetworkSnapshot) -> Vec<CountryCode> {
    snap.nodes().iter().cloned().collect()
}

/// Ordered-triple triangle classifier: for every node i and every ordered
/// pair (j, k) of distinct other nodes, test the four closed patterns
/// directly against the edge set. Returns per-node [cycle, bridge, in, out].
pub fn census_oracle(snap: &NetworkSnapshot) -> BTreeMap<CountryCode, [u64; 4]> {
    let nodes = ordered_nodes(snap);
    let a = |x: &CountryCode, y: &CountryCode| snap.has_edge(x, y);
    let mut counts = BTreeMap::new();
    for i in &nodes {
        let mut c = [0u64; 4];
        for j in &nodes {
            for k in &nodes {
                if i == j || i == k || j == k {
                    continue;
                }
                if a(i, j) && a(j, k) && a(k, i) {
                    c[0] += 1;
                }
                if a(i, j) && a(k, j) && a(k, i) {
                    c[1] += 1;
                }
                if a(j, i) && a(j, k) && a(k, i) {
                    c[2] += 1;
                }
                if a(i, j) && a(j, k) && a(i, k) {
                    c[3] += 1;
                }
            }
        }
        counts.insert(i.clone(), c);
    }
    counts
}

/// Cyclic clustering recomputed from the definition: cycle count over the
/// chosen denominator, zero when the denominator vanishes.
pub fn cyclic_clustering_oracle(
    snap: &NetworkSnapshot,
    denominator: CyclicDenominator,
) -> BTreeMap<CountryCode, f64> {
    let nodes = ordered_nodes(snap);
    let census = census_oracle(snap);
    let a = |x: &CountryCode, y: &CountryCode| snap.has_edge(x, y);
    let mut out = BTreeMap::new();
    for i in &nodes {
        let k_out = nodes.iter().filter(|j| *j != i && a(i, j)).count() as f64;
        let k_in = nodes.iter().filter(|j| *j != i && a(j, i)).count() as f64;
        let mutual = nodes
            .iter()
            .filter(|j| *j != i && a(i, j) && a(j, i))
            .count() as f64;
        let distinct = nodes
            .iter()
            .filter(|j| *j != i && (a(i, j) || a(j, i)))
            .count() as f64;
        let denom = match denominator {
            CyclicDenominator::PotentialCycles => k_out * k_in - mutual,
            CyclicDenominator::DistinctNeighbors => distinct * (distinct - 1.0),
            CyclicDenominator::Fagiolo => {
                (k_in + k_out) * (k_in + k_out - 1.0) - 2.0 * mutual
            }
        };
        let cycles = census[i][0] as f64;
        let value = if denom > 0.0 { cycles / denom } else { 0.0 };
        out.insert(i.clone(), value);
    }
    out
}

/// Weighted clustering recomputed by enumerating every directed two-path
/// i -> j -> k (k distinct from i) and averaging the two link weights.
pub fn weighted_clustering_oracle(snap: &NetworkSnapshot) -> Option<f64> {
    let nodes = ordered_nodes(snap);
    let w = |x: &CountryCode, y: &CountryCode| snap.weight(x, y).unwrap_or(0.0);
    let mut total = 0.0;
    let mut closed = 0.0;
    for i in &nodes {
        for j in &nodes {
            if j == i || !snap.has_edge(i, j) {
                continue;
            }
            for k in &nodes {
                if k == i || k == j || !snap.has_edge(j, k) {
                    continue;
                }
                let value = (w(i, j) + w(j, k)) / 2.0;
                total += value;
                if snap.has_edge(i, k) {
                    closed += value;
                }
            }
        }
    }
    if total > 0.0 { Some(closed / total) } else { None }
}

/// Undirected clustering on the either-direction projection, averaged over
/// nodes with at least two distinct neighbours.
pub fn undirected_clustering_oracle(snap: &NetworkSnapshot) -> Option<f64> {
    let nodes = ordered_nodes(snap);
    let linked =
        |x: &CountryCode, y: &CountryCode| snap.has_edge(x, y) || snap.has_edge(y, x);
    let mut values = Vec::new();
    for i in &nodes {
        let neighbours: Vec<&CountryCode> =
            nodes.iter().filter(|j| *j != i && linked(i, j)).collect();
        let d = neighbours.len();
        if d < 2 {
            continue;
        }
        let mut links = 0usize;
        for x in 0..d {
            for y in x + 1..d {
                if linked(neighbours[x], neighbours[y]) {
                    links += 1;
                }
            }
        }
        values.push(links as f64 / (d * (d - 1) / 2) as f64);
    }
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// All-pairs shortest hop counts by Floyd-Warshall over the infrastructure
/// adjacency, as an independent check on the BFS sweep.
pub fn floyd_warshall(infra: &InfrastructureNetwork) -> BTreeMap<(CountryCode, CountryCode), Option<u32>> {
    let nodes: Vec<CountryCode> = infra.nodes().iter().cloned().collect();
    let n = nodes.len();
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    for (i, a) in nodes.iter().enumerate() {
        dist[i][i] = 0;
        for (j, b) in nodes.iter().enumerate() {
            if i != j && infra.has_edge(a, b) {
                dist[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = if dist[i][j] >= INF {
                None
            } else {
                Some(dist[i][j] as u32)
            };
            out.insert((a.clone(), b.clone()), d);
        }
    }
    out
}

/// Every partition of `k` items, encoded as restricted growth strings.
pub fn all_partitions(k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut labels = vec![0u32; k];
    fn recurse(labels: &mut Vec<u32>, pos: usize, max_used: u32, out: &mut Vec<Vec<u32>>) {
        if pos == labels.len() {
            out.push(labels.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            labels[pos] = label;
            let next_max = max_used.max(label);
            recurse(labels, pos + 1, next_max, out);
        }
    }
    if k > 0 {
        recurse(&mut labels, 1, 0, &mut out);
    }
    out
}

/// Modularity evaluated from the raw double sum over the symmetrised
/// weights, independent of any community bookkeeping.
pub fn modularity_oracle(snap: &NetworkSnapshot, assignment: &BTreeMap<CountryCode, u32>) -> f64 {
    let nodes = ordered_nodes(snap);
    let n = nodes.len();
    let index: BTreeMap<&CountryCode, usize> =
        nodes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut w = vec![vec![0.0; n]; n];
    for (o, d, weight) in snap.edges() {
        let (i, j) = (index[o], index[d]);
        w[i][j] += weight;
        w[j][i] += weight;
    }
    let strength: Vec<f64> = (0..n).map(|i| w[i].iter().sum()).collect();
    let w2: f64 = strength.iter().sum();
    if w2 <= 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[&nodes[i]] == assignment[&nodes[j]] {
                q += w[i][j] - strength[i] * strength[j] / w2;
            }
        }
    }
    q / w2
}

/// Best partition over every possible grouping, scored with the direct
/// modularity double sum. Only feasible for ~10 nodes.
pub fn exhaustive_best_partition(snap: &NetworkSnapshot) -> (BTreeMap<CountryCode, u32>, f64) {
    let nodes = ordered_nodes(snap);
    let n = nodes.len();
    let index: BTreeMap<&CountryCode, usize> =
        nodes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut w = vec![vec![0.0; n]; n];
    for (o, d, weight) in snap.edges() {
        let (i, j) = (index[o], index[d]);
        w[i][j] += weight;
        w[j][i] += weight;
    }
    let strength: Vec<f64> = (0..n).map(|i| w[i].iter().sum()).collect();
    let w2: f64 = strength.iter().sum();
    let mut best_q = f64::NEG_INFINITY;
    let mut best_labels = vec![0u32; n];
    for labels in all_partitions(n) {
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    q += w[i][j] - strength[i] * strength[j] / w2;
                }
            }
        }
        let q = q / w2;
        if q > best_q {
            best_q = q;
            best_labels = labels;
        }
    }
    let assignment = nodes
        .into_iter()
        .zip(best_labels)
        .collect::<BTreeMap<_, _>>();
    (assignment, best_q)
}

/// Groups of node indices induced by an assignment, as comparable sets.
pub fn grouping(assignment: &BTreeMap<CountryCode, u32>) -> BTreeSet<BTreeSet<CountryCode>> {
    let mut by_label: BTreeMap<u32, BTreeSet<CountryCode>> = BTreeMap::new();
    for (node, &label) in assignment {
        by_label.entry(label).or_default().insert(node.clone());
    }
    by_label.into_values().collect()
}

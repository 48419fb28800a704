//! Chemical distances (hop counts) over the coarse-grained infrastructure
//! network, and path-length statistics taken over the links of a flow
//! snapshot.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{CountryCode, InfrastructureNetwork, NetworkSnapshot};

/// All-pairs hop counts on the undirected infrastructure network.
///
/// `None` marks an unreachable pair. The matrix is symmetric and every
/// diagonal entry is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChemicalDistanceMatrix {
    nodes: Vec<CountryCode>,
    index: BTreeMap<CountryCode, usize>,
    dist: Vec<Vec<Option<u32>>>,
}

impl ChemicalDistanceMatrix {
    /// Nodes covered by the matrix, in sorted order.
    pub fn nodes(&self) -> &[CountryCode] {
        &self.nodes
    }

    /// Hop count between two covered countries; `Ok(None)` means no path.
    pub fn distance(&self, a: &CountryCode, b: &CountryCode) -> Result<Option<u32>> {
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        Ok(self.dist[ia][ib])
    }

    pub fn contains(&self, node: &CountryCode) -> bool {
        self.index.contains_key(node)
    }

    fn index_of(&self, node: &CountryCode) -> Result<usize> {
        self.index
            .get(node)
            .copied()
            .ok_or_else(|| Error::NotFound(format!("country {node} not covered by distance matrix")))
    }

    /// Render the matrix as `origin,destination,chemical_distance` rows over
    /// all ordered pairs of distinct countries; unreachable pairs get an
    /// empty distance field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("origin,destination,chemical_distance\n");
        for (i, a) in self.nodes.iter().enumerate() {
            for (j, b) in self.nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                match self.dist[i][j] {
                    Some(d) => out.push_str(&format!("{a},{b},{d}\n")),
                    None => out.push_str(&format!("{a},{b},\n")),
                }
            }
        }
        out
    }
}

/// Breadth-first traversal from every node of the infrastructure network.
pub fn chemical_distances(infra: &InfrastructureNetwork) -> ChemicalDistanceMatrix {
    let nodes: Vec<CountryCode> = infra.nodes().iter().cloned().collect();
    let index: BTreeMap<CountryCode, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let n = nodes.len();

    let adjacency: Vec<Vec<usize>> = nodes
        .iter()
        .map(|node| infra.neighbors(node).map(|nb| index[nb]).collect())
        .collect();

    let mut dist = vec![vec![None; n]; n];
    for source in 0..n {
        let row = &mut dist[source];
        row[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let next = row[u].expect("visited nodes carry a distance") + 1;
            for &v in &adjacency[u] {
                if row[v].is_none() {
                    row[v] = Some(next);
                    queue.push_back(v);
                }
            }
        }
    }

    ChemicalDistanceMatrix { nodes, index, dist }
}

/// Which pairs enter the path-length statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathPopulation {
    /// Directed links of the flow snapshot, each counted once.
    #[default]
    FlowEdges,
    /// Every ordered pair of distinct snapshot nodes.
    AllPairs,
}

/// How much each pair contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathWeighting {
    /// One unit per pair.
    #[default]
    Uniform,
    /// Each flow edge weighted by its tourist volume.
    FlowVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathStatsOptions {
    pub population: PathPopulation,
    pub weighting: PathWeighting,
}

/// Mean and population standard deviation of hop counts, with the mass
/// observed at each hop count and the number of pairs that had no
/// infrastructure path at all.
///
/// `mean` and `std` are `None` when no pair was reachable. Unreachable
/// pairs are a data-quality signal (flow recorded, no route), so they are
/// reported rather than treated as an error.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub histogram: BTreeMap<u32, f64>,
    pub reachable: usize,
    pub unreachable: usize,
}

/// Path-length statistics over the directed links of the snapshot.
pub fn flow_path_stats(
    snapshot: &NetworkSnapshot,
    chem: &ChemicalDistanceMatrix,
) -> Result<PathStats> {
    flow_path_stats_with(snapshot, chem, PathStatsOptions::default())
}

/// As [`flow_path_stats`], with an explicit choice of pair population and
/// weighting. Volume weighting only makes sense over actual flow edges.
pub fn flow_path_stats_with(
    snapshot: &NetworkSnapshot,
    chem: &ChemicalDistanceMatrix,
    options: PathStatsOptions,
) -> Result<PathStats> {
    if options.population == PathPopulation::AllPairs
        && options.weighting == PathWeighting::FlowVolume
    {
        return Err(Error::invalid(
            "flow-volume weighting requires the flow-edge population",
        ));
    }
    for node in snapshot.nodes() {
        if !chem.contains(node) {
            return Err(Error::invalid(format!(
                "snapshot node {node} missing from distance matrix"
            )));
        }
    }

    let pairs: Vec<(CountryCode, CountryCode, f64)> = match options.population {
        PathPopulation::FlowEdges => snapshot
            .edges()
            .map(|(o, d, w)| {
                let mass = match options.weighting {
                    PathWeighting::Uniform => 1.0,
                    PathWeighting::FlowVolume => w,
                };
                (o.clone(), d.clone(), mass)
            })
            .collect(),
        PathPopulation::AllPairs => {
            let nodes: Vec<&CountryCode> = snapshot.nodes().iter().collect();
            let mut pairs = Vec::with_capacity(nodes.len() * nodes.len().saturating_sub(1));
            for a in &nodes {
                for b in &nodes {
                    if a != b {
                        pairs.push(((*a).clone(), (*b).clone(), 1.0));
                    }
                }
            }
            pairs
        }
    };

    let mut histogram: BTreeMap<u32, f64> = BTreeMap::new();
    let mut reachable = 0usize;
    let mut unreachable = 0usize;
    let mut total_mass = 0.0;
    let mut weighted_sum = 0.0;
    for (origin, destination, mass) in &pairs {
        match chem.distance(origin, destination)? {
            Some(d) => {
                *histogram.entry(d).or_insert(0.0) += mass;
                reachable += 1;
                total_mass += mass;
                weighted_sum += mass * f64::from(d);
            }
            None => unreachable += 1,
        }
    }

    let (mean, std) = if total_mass > 0.0 {
        let mean = weighted_sum / total_mass;
        let variance = pairs
            .iter()
            .filter_map(|(o, d, mass)| {
                chem.distance(o, d)
                    .expect("coverage checked above")
                    .map(|hops| mass * (f64::from(hops) - mean).powi(2))
            })
            .sum::<f64>()
            / total_mass;
        (Some(mean), Some(variance.sqrt()))
    } else {
        (None, None)
    };

    Ok(PathStats {
        mean,
        std,
        histogram,
        reachable,
        unreachable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FlowNetwork, aggregate_years};
    use approx::assert_relative_eq;

    fn c(code: &str) -> CountryCode {
        CountryCode::from(code)
    }

    fn chain(codes: &[&str]) -> InfrastructureNetwork {
        let mut infra = InfrastructureNetwork::new(codes.iter().map(|s| c(s)));
        for pair in codes.windows(2) {
            infra.add_edge(&c(pair[0]), &c(pair[1])).unwrap();
        }
        infra
    }

    #[test]
    fn chain_distances() {
        let chem = chemical_distances(&chain(&["A", "B", "C"]));
        assert_eq!(chem.distance(&c("A"), &c("C")).unwrap(), Some(2));
        assert_eq!(chem.distance(&c("A"), &c("B")).unwrap(), Some(1));
        assert_eq!(chem.distance(&c("A"), &c("A")).unwrap(), Some(0));
    }

    #[test]
    fn four_country_chain_spans_three_hops() {
        let chem = chemical_distances(&chain(&["ES", "DE", "KE", "BW"]));
        assert_eq!(chem.distance(&c("ES"), &c("BW")).unwrap(), Some(3));
        assert_eq!(chem.distance(&c("BW"), &c("ES")).unwrap(), Some(3));
    }

    #[test]
    fn disconnected_pair_is_unreachable() {
        let mut infra = InfrastructureNetwork::new([c("A"), c("B"), c("X")]);
        infra.add_edge(&c("A"), &c("B")).unwrap();
        let chem = chemical_distances(&infra);
        assert_eq!(chem.distance(&c("A"), &c("X")).unwrap(), None);
        assert_eq!(chem.distance(&c("X"), &c("X")).unwrap(), Some(0));
    }

    #[test]
    fn unknown_node_is_not_found() {
        let chem = chemical_distances(&chain(&["A", "B"]));
        assert!(chem.distance(&c("A"), &c("Z")).is_err());
    }

    #[test]
    fn csv_lists_ordered_pairs_with_blank_for_unreachable() {
        let mut infra = InfrastructureNetwork::new([c("A"), c("B"), c("X")]);
        infra.add_edge(&c("A"), &c("B")).unwrap();
        let csv = chemical_distances(&infra).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "origin,destination,chemical_distance");
        assert!(lines.contains(&"A,B,1"));
        assert!(lines.contains(&"A,X,"));
        assert_eq!(lines.len(), 1 + 3 * 2);
    }

    fn snapshot_from(flows: &[(&str, &str, u64)], nodes: &[&str]) -> NetworkSnapshot {
        let mut net = FlowNetwork::new(nodes.iter().map(|s| c(s)));
        for (o, d, t) in flows {
            net.add_flow(&c(o), &c(d), 2010, *t).unwrap();
        }
        aggregate_years(&net, 2010, 2010).unwrap()
    }

    #[test]
    fn direct_edges_give_unit_mean() {
        let chem = chemical_distances(&chain(&["A", "B", "C"]));
        let snap = snapshot_from(&[("A", "B", 5), ("B", "C", 7)], &["A", "B", "C"]);
        let stats = flow_path_stats(&snap, &chem).unwrap();
        assert_eq!(stats.mean, Some(1.0));
        assert_eq!(stats.std, Some(0.0));
        assert_eq!(stats.histogram.get(&1), Some(&2.0));
        assert_eq!(stats.unreachable, 0);
    }

    #[test]
    fn two_point_statistics() {
        let chem = chemical_distances(&chain(&["ES", "DE", "KE", "BW"]));
        let snap = snapshot_from(&[("ES", "DE", 9), ("ES", "BW", 4)], &["ES", "DE", "KE", "BW"]);
        let stats = flow_path_stats(&snap, &chem).unwrap();
        assert_relative_eq!(stats.mean.unwrap(), 2.0);
        assert_relative_eq!(stats.std.unwrap(), 1.0);
        assert_eq!(stats.reachable, 2);
    }

    #[test]
    fn unreachable_edges_excluded_from_moments() {
        let mut infra = InfrastructureNetwork::new([c("A"), c("B"), c("X")]);
        infra.add_edge(&c("A"), &c("B")).unwrap();
        let chem = chemical_distances(&infra);
        let snap = snapshot_from(&[("A", "B", 5), ("A", "X", 2)], &["A", "B", "X"]);
        let stats = flow_path_stats(&snap, &chem).unwrap();
        assert_eq!(stats.mean, Some(1.0));
        assert_eq!(stats.unreachable, 1);
        assert_eq!(stats.histogram.values().sum::<f64>(), 1.0);
    }

    #[test]
    fn missing_coverage_is_invalid() {
        let chem = chemical_distances(&chain(&["A", "B"]));
        let snap = snapshot_from(&[("A", "Q", 5)], &["A", "B", "Q"]);
        assert!(flow_path_stats(&snap, &chem).is_err());
    }

    #[test]
    fn volume_weighting_shifts_the_mean() {
        let chem = chemical_distances(&chain(&["ES", "DE", "KE", "BW"]));
        let snap = snapshot_from(&[("ES", "DE", 3), ("ES", "BW", 1)], &["ES", "DE", "KE", "BW"]);
        let stats = flow_path_stats_with(
            &snap,
            &chem,
            PathStatsOptions {
                weighting: PathWeighting::FlowVolume,
                ..Default::default()
            },
        )
        .unwrap();
        // (3*1 + 1*3) / 4
        assert_relative_eq!(stats.mean.unwrap(), 1.5);
    }

    #[test]
    fn all_pairs_population_counts_every_ordered_pair() {
        let chem = chemical_distances(&chain(&["A", "B", "C"]));
        let snap = snapshot_from(&[("A", "B", 5)], &["A", "B", "C"]);
        let stats = flow_path_stats_with(
            &snap,
            &chem,
            PathStatsOptions {
                population: PathPopulation::AllPairs,
                ..Default::default()
            },
        )
        .unwrap();
        // pairs: AB, BA, BC, CB at 1 hop; AC, CA at 2 hops
        assert_eq!(stats.reachable, 6);
        assert_relative_eq!(stats.mean.unwrap(), 8.0 / 6.0);
    }

    #[test]
    fn volume_weighting_rejects_all_pairs() {
        let chem = chemical_distances(&chain(&["A", "B"]));
        let snap = snapshot_from(&[("A", "B", 5)], &["A", "B"]);
        let options = PathStatsOptions {
            population: PathPopulation::AllPairs,
            weighting: PathWeighting::FlowVolume,
        };
        assert!(flow_path_stats_with(&snap, &chem, options).is_err());
    }
}

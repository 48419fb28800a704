//! Directed triangle census over the binarized adjacency.
//!
//! Per node, four diagonal products of the 0/1 adjacency matrix A are
//! counted: cycles (A^3)_ii, middleman "bridge" triangles (A A^T A)_ii,
//! in-triangles (A^T A^2)_ii and out-triangles (A^2 A^T)_ii. Counts are
//! node incidences (closed length-3 walks through the node), not
//! deduplicated triangles, so the network totals of bridge, in and out are
//! always identical: they are cyclic permutations of the same trace.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{CountryCode, NetworkSnapshot};
use crate::view::SnapshotView;

/// The four directed triangle classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleKind {
    /// i -> j -> k -> i.
    Cycle,
    /// Middleman: j -> i -> k with j -> k present.
    Bridge,
    /// Both neighbors point at i: j -> i, k -> i, j -> k.
    In,
    /// i points at both neighbors: i -> j, i -> k, j -> k.
    Out,
}

impl TriangleKind {
    pub const ALL: [TriangleKind; 4] = [
        TriangleKind::Cycle,
        TriangleKind::Bridge,
        TriangleKind::In,
        TriangleKind::Out,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TriangleKind::Cycle => "cycle",
            TriangleKind::Bridge => "bridge",
            TriangleKind::In => "in",
            TriangleKind::Out => "out",
        }
    }

    fn index(self) -> usize {
        match self {
            TriangleKind::Cycle => 0,
            TriangleKind::Bridge => 1,
            TriangleKind::In => 2,
            TriangleKind::Out => 3,
        }
    }
}

/// Per-node triangle counts, ordered cycle, bridge, in, out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleCensus {
    counts: BTreeMap<CountryCode, [u64; 4]>,
}

impl TriangleCensus {
    pub fn count(&self, node: &CountryCode, kind: TriangleKind) -> Option<u64> {
        self.counts.get(node).map(|c| c[kind.index()])
    }

    pub fn node_counts(&self, node: &CountryCode) -> Option<[u64; 4]> {
        self.counts.get(node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CountryCode, [u64; 4])> {
        self.counts.iter().map(|(c, v)| (c, *v))
    }

    /// Network total for one class (sum of the diagonal product).
    pub fn total(&self, kind: TriangleKind) -> u64 {
        self.counts.values().map(|c| c[kind.index()]).sum()
    }

    /// Sum over all four classes.
    pub fn grand_total(&self) -> u64 {
        TriangleKind::ALL.iter().map(|&k| self.total(k)).sum()
    }

    /// `country,cycle,bridge,in,out` rows in code order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("country,cycle,bridge,in,out\n");
        for (code, c) in &self.counts {
            out.push_str(&format!("{code},{},{},{},{}\n", c[0], c[1], c[2], c[3]));
        }
        out
    }
}

/// Count the four diagonal products for every node of the snapshot.
pub fn triangle_census(snapshot: &NetworkSnapshot) -> TriangleCensus {
    let view = SnapshotView::new(snapshot);
    let mut counts = BTreeMap::new();
    for i in 0..view.len() {
        let mut c = [0u64; 4];
        // cycle (A^3)_ii and out (A^2 A^T)_ii share the walk i -> j -> k
        for &(j, _) in &view.out[i] {
            for &(k, _) in &view.out[j] {
                if k == i {
                    continue;
                }
                if view.has_edge(k, i) {
                    c[TriangleKind::Cycle.index()] += 1;
                }
                if view.has_edge(i, k) {
                    c[TriangleKind::Out.index()] += 1;
                }
            }
        }
        // in (A^T A^2)_ii: j -> i with a path j -> k -> i
        for &(j, _) in &view.inc[i] {
            for &(k, _) in &view.out[j] {
                if k != i && view.has_edge(k, i) {
                    c[TriangleKind::In.index()] += 1;
                }
            }
        }
        // bridge (A A^T A)_ii: i -> j and k -> j with k -> i closing
        for &(j, _) in &view.out[i] {
            for &(k, _) in &view.inc[j] {
                if k != i && view.has_edge(k, i) {
                    c[TriangleKind::Bridge.index()] += 1;
                }
            }
        }
        counts.insert(view.nodes[i].clone(), c);
    }
    TriangleCensus { counts }
}

/// Share of each class in the grand total, and the fraction of nodes
/// touching at least one triangle of each class. Shares are undefined on a
/// triangle-free network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleSummary {
    /// Fractions per class (cycle, bridge, in, out); `None` if no triangles.
    pub distribution: Option<[f64; 4]>,
    /// Fraction of nodes with a positive count per class.
    pub participation: [f64; 4],
}

pub fn triangle_summary(census: &TriangleCensus) -> TriangleSummary {
    let totals: [u64; 4] = [
        census.total(TriangleKind::Cycle),
        census.total(TriangleKind::Bridge),
        census.total(TriangleKind::In),
        census.total(TriangleKind::Out),
    ];
    let grand: u64 = totals.iter().sum();
    let distribution = if grand == 0 {
        None
    } else {
        Some(totals.map(|t| t as f64 / grand as f64))
    };

    let n = census.counts.len();
    let mut participation = [0.0; 4];
    if n > 0 {
        for idx in 0..4 {
            let touched = census.counts.values().filter(|c| c[idx] > 0).count();
            participation[idx] = touched as f64 / n as f64;
        }
    }
    TriangleSummary {
        distribution,
        participation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CountryCode, FlowNetwork, aggregate_years};

    fn c(code: &str) -> CountryCode {
        CountryCode::from(code)
    }

    fn snapshot(edges: &[(&str, &str)], nodes: &[&str]) -> NetworkSnapshot {
        let mut net = FlowNetwork::new(nodes.iter().map(|s| c(s)));
        for (o, d) in edges {
            net.add_flow(&c(o), &c(d), 2010, 1).unwrap();
        }
        aggregate_years(&net, 2010, 2010).unwrap()
    }

    #[test]
    fn three_cycle_counts_one_cycle_per_node() {
        let snap = snapshot(&[("A", "B"), ("B", "C"), ("C", "A")], &["A", "B", "C"]);
        let census = triangle_census(&snap);
        for node in ["A", "B", "C"] {
            assert_eq!(census.node_counts(&c(node)), Some([1, 0, 0, 0]));
        }
    }

    #[test]
    fn bidirectional_triangle_counts_two_of_each() {
        let snap = snapshot(
            &[
                ("A", "B"),
                ("B", "A"),
                ("B", "C"),
                ("C", "B"),
                ("A", "C"),
                ("C", "A"),
            ],
            &["A", "B", "C"],
        );
        let census = triangle_census(&snap);
        for node in ["A", "B", "C"] {
            assert_eq!(census.node_counts(&c(node)), Some([2, 2, 2, 2]));
        }
    }

    #[test]
    fn star_without_closures_has_no_triangles() {
        let snap = snapshot(
            &[("S", "A"), ("S", "B"), ("S", "C")],
            &["S", "A", "B", "C"],
        );
        let census = triangle_census(&snap);
        assert_eq!(census.grand_total(), 0);
        let summary = triangle_summary(&census);
        assert_eq!(summary.distribution, None);
        assert_eq!(summary.participation, [0.0; 4]);
    }

    #[test]
    fn feed_forward_motif_assigns_roles() {
        // A -> B, A -> C, B -> C: A is the out corner, C the in corner,
        // B the middleman.
        let snap = snapshot(&[("A", "B"), ("A", "C"), ("B", "C")], &["A", "B", "C"]);
        let census = triangle_census(&snap);
        assert_eq!(census.node_counts(&c("A")), Some([0, 0, 0, 1]));
        assert_eq!(census.node_counts(&c("B")), Some([0, 1, 0, 0]));
        assert_eq!(census.node_counts(&c("C")), Some([0, 0, 1, 0]));
        assert_eq!(census.total(TriangleKind::Bridge), 1);
        assert_eq!(census.total(TriangleKind::In), 1);
        assert_eq!(census.total(TriangleKind::Out), 1);
    }

    #[test]
    fn summary_of_pure_cycle_graph() {
        let snap = snapshot(&[("A", "B"), ("B", "C"), ("C", "A")], &["A", "B", "C"]);
        let summary = triangle_summary(&triangle_census(&snap));
        assert_eq!(summary.distribution, Some([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(summary.participation, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn csv_layout() {
        let snap = snapshot(&[("A", "B"), ("A", "C"), ("B", "C")], &["A", "B", "C"]);
        let csv = triangle_census(&snap).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "country,cycle,bridge,in,out");
        assert_eq!(lines[1], "A,0,0,0,1");
        assert_eq!(lines[2], "B,0,1,0,0");
        assert_eq!(lines[3], "C,0,0,1,0");
    }
}

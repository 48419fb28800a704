//! Index-based adjacency view over a snapshot, shared by the metric
//! implementations. Nodes are numbered in sorted code order so every
//! computation that iterates the view is deterministic.

use std::collections::BTreeMap;

use crate::model::{CountryCode, NetworkSnapshot};

pub(crate) struct SnapshotView {
    pub nodes: Vec<CountryCode>,
    pub out: Vec<Vec<(usize, f64)>>,
    pub inc: Vec<Vec<(usize, f64)>>,
}

impl SnapshotView {
    pub fn new(snapshot: &NetworkSnapshot) -> Self {
        let nodes: Vec<CountryCode> = snapshot.nodes().iter().cloned().collect();
        let index: BTreeMap<&CountryCode, usize> =
            nodes.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let n = nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (origin, destination, weight) in snapshot.edges() {
            let o = index[origin];
            let d = index[destination];
            out[o].push((d, weight));
            inc[d].push((o, weight));
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable_by_key(|(i, _)| *i);
        }
        SnapshotView { nodes, out, inc }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out[from]
            .binary_search_by_key(&to, |(i, _)| *i)
            .is_ok()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out[node].len()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.inc[node].len()
    }

    pub fn out_strength(&self, node: usize) -> f64 {
        self.out[node].iter().map(|(_, w)| w).sum()
    }

    pub fn in_strength(&self, node: usize) -> f64 {
        self.inc[node].iter().map(|(_, w)| w).sum()
    }

    /// Distinct neighbors regardless of direction, in index order.
    pub fn undirected_neighbors(&self, node: usize) -> Vec<usize> {
        let mut merged: Vec<usize> = self.out[node]
            .iter()
            .chain(self.inc[node].iter())
            .map(|(i, _)| *i)
            .collect();
        merged.sort_unstable();
        merged.dedup();
        merged
    }

    /// Neighbors with edges in both directions.
    pub fn mutual_neighbors(&self, node: usize) -> Vec<usize> {
        self.out[node]
            .iter()
            .map(|(i, _)| *i)
            .filter(|&j| self.has_edge(j, node))
            .collect()
    }
}

//! Scalar and per-node structural measures of a flow snapshot: density and
//! degree statistics, weighted reciprocity, the directed triangle census,
//! the clustering suite, in/out balance scores, and the year-over-year
//! evolution of individual flows.

pub mod clustering;
pub mod triangles;

pub use clustering::{ClusteringSuite, CyclicDenominator, clustering_suite, clustering_suite_with};
pub use triangles::{
    TriangleCensus, TriangleKind, TriangleSummary, triangle_census, triangle_summary,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CountryCode, FlowNetwork, NetworkSnapshot};
use crate::util::{csv_field, mean_std, sig6};
use crate::view::SnapshotView;

/// Node count, link count, density and degree moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasicStats {
    pub node_count: usize,
    pub link_count: usize,
    /// L / (N (N - 1)): fraction of ordered country pairs that are linked.
    pub density: f64,
    pub mean_in_degree: f64,
    pub std_in_degree: f64,
    pub mean_out_degree: f64,
    pub std_out_degree: f64,
}

/// Density and population degree statistics; needs at least two nodes for
/// the density denominator.
pub fn basic_stats(snapshot: &NetworkSnapshot) -> Result<BasicStats> {
    let n = snapshot.node_count();
    if n < 2 {
        return Err(Error::invalid(format!(
            "basic stats need at least 2 nodes, got {n}"
        )));
    }
    let view = SnapshotView::new(snapshot);
    let in_degrees: Vec<f64> = (0..n).map(|i| view.in_degree(i) as f64).collect();
    let out_degrees: Vec<f64> = (0..n).map(|i| view.out_degree(i) as f64).collect();
    let (mean_in, std_in) = mean_std(&in_degrees).expect("n >= 2");
    let (mean_out, std_out) = mean_std(&out_degrees).expect("n >= 2");
    let l = snapshot.edge_count();
    Ok(BasicStats {
        node_count: n,
        link_count: l,
        density: l as f64 / (n as f64 * (n as f64 - 1.0)),
        mean_in_degree: mean_in,
        std_in_degree: std_in,
        mean_out_degree: mean_out,
        std_out_degree: std_out,
    })
}

/// Link-level and weighted reciprocity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReciprocityStats {
    /// Fraction of directed links whose reverse link also exists.
    pub bidirectional_link_fraction: f64,
    /// Number of unordered bidirectional pairs.
    pub bidirectional_pairs: usize,
    /// Mean over bidirectional pairs of min/max of the two flows; `None`
    /// when no pair is bidirectional.
    pub weighted_reciprocity: Option<f64>,
}

pub fn reciprocity_stats(snapshot: &NetworkSnapshot) -> ReciprocityStats {
    let view = SnapshotView::new(snapshot);
    let mut bidirectional_links = 0usize;
    let mut ratio_sum = 0.0;
    let mut pairs = 0usize;
    let mut links = 0usize;
    for i in 0..view.len() {
        for &(j, w_ij) in &view.out[i] {
            links += 1;
            if view.has_edge(j, i) {
                bidirectional_links += 1;
                // visit each unordered pair once
                if i < j {
                    let w_ji = view.out[j]
                        .iter()
                        .find(|(k, _)| *k == i)
                        .map(|(_, w)| *w)
                        .expect("reverse edge exists");
                    ratio_sum += w_ij.min(w_ji) / w_ij.max(w_ji);
                    pairs += 1;
                }
            }
        }
    }
    ReciprocityStats {
        bidirectional_link_fraction: if links > 0 {
            bidirectional_links as f64 / links as f64
        } else {
            0.0
        },
        bidirectional_pairs: pairs,
        weighted_reciprocity: if pairs > 0 {
            Some(ratio_sum / pairs as f64)
        } else {
            None
        },
    }
}

/// Per-node balance between what comes in and what goes out, in link counts
/// (structural) and tourist volumes (functional), plus their correlation
/// across nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceScores {
    /// (k_in - k_out) / (k_in + k_out); `None` for isolated nodes.
    pub structural: BTreeMap<CountryCode, Option<f64>>,
    /// (F_in - F_out) / (F_in + F_out); `None` for nodes without flow.
    pub functional: BTreeMap<CountryCode, Option<f64>>,
    /// Pearson correlation over nodes where both scores are defined.
    pub correlation: Option<f64>,
}

impl BalanceScores {
    /// `country,structural,functional` rows; undefined scores stay empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("country,structural,functional\n");
        for (code, s) in &self.structural {
            let t = self.functional.get(code).copied().flatten();
            let fmt = |v: Option<f64>| v.map(sig6).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(code.as_str()),
                fmt(*s),
                fmt(t)
            ));
        }
        out
    }
}

pub fn balance(snapshot: &NetworkSnapshot) -> BalanceScores {
    let view = SnapshotView::new(snapshot);
    let mut structural = BTreeMap::new();
    let mut functional = BTreeMap::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..view.len() {
        let k_in = view.in_degree(i) as f64;
        let k_out = view.out_degree(i) as f64;
        let s = if k_in + k_out > 0.0 {
            Some((k_in - k_out) / (k_in + k_out))
        } else {
            None
        };
        let f_in = view.in_strength(i);
        let f_out = view.out_strength(i);
        let t = if f_in + f_out > 0.0 {
            Some((f_in - f_out) / (f_in + f_out))
        } else {
            None
        };
        if let (Some(s), Some(t)) = (s, t) {
            xs.push(s);
            ys.push(t);
        }
        structural.insert(view.nodes[i].clone(), s);
        functional.insert(view.nodes[i].clone(), t);
    }
    let correlation = pearson(&xs, &ys).expect("equal lengths by construction");
    BalanceScores {
        structural,
        functional,
        correlation,
    }
}

/// Pearson correlation coefficient; `None` when fewer than two points or
/// either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "correlation needs vectors of equal length, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 2 {
        return Ok(None);
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x).powi(2);
        var_y += (y - mean_y).powi(2);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Ok(None);
    }
    Ok(Some(cov / (var_x.sqrt() * var_y.sqrt())))
}

/// Relative change of one edge's flow between the start and end year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaEntry {
    pub origin: CountryCode,
    pub destination: CountryCode,
    pub base_flow: u64,
    pub final_flow: u64,
    /// (F(end) - F(start)) / F(start); at least -1 because flows are
    /// nonnegative.
    pub alpha: f64,
}

/// Flow evolution between two years over every edge alive at the start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaReport {
    pub start_year: i32,
    pub end_year: i32,
    /// One entry per edge with positive flow at the start year, sorted.
    pub entries: Vec<AlphaEntry>,
    /// Edges carrying flow at the end year but absent at the start, for
    /// which the relative change is undefined.
    pub excluded: Vec<(CountryCode, CountryCode)>,
    /// Histogram of alpha, bins of width 0.25 anchored at -1; the key is
    /// the bin index, so bin b covers [-1 + b/4, -1 + (b+1)/4).
    pub histogram: BTreeMap<u32, u64>,
    /// Mean alpha per year between start and end, over the same edges.
    pub yearly_mean: BTreeMap<i32, f64>,
}

/// Width of every histogram bin in [`AlphaReport`].
pub const ALPHA_BIN_WIDTH: f64 = 0.25;

pub fn alpha_evolution(net: &FlowNetwork, start_year: i32, end_year: i32) -> Result<AlphaReport> {
    if start_year >= end_year {
        return Err(Error::invalid(format!(
            "start year {start_year} must precede end year {end_year}"
        )));
    }
    let years = net.years();
    for year in [start_year, end_year] {
        if !years.contains(&year) {
            return Err(Error::invalid(format!("year {year} absent from the dataset")));
        }
    }

    let mut entries = Vec::new();
    let mut excluded = Vec::new();
    let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
    let mut yearly: BTreeMap<i32, (f64, usize)> = BTreeMap::new();
    for (origin, destination, per_year) in net.edges() {
        let base = per_year.get(&start_year).copied().unwrap_or(0);
        if base == 0 {
            if per_year.get(&end_year).copied().unwrap_or(0) > 0 {
                excluded.push((origin.clone(), destination.clone()));
            }
            continue;
        }
        let final_flow = per_year.get(&end_year).copied().unwrap_or(0);
        let alpha = (final_flow as f64 - base as f64) / base as f64;
        let bin = ((alpha + 1.0) / ALPHA_BIN_WIDTH).floor().max(0.0) as u32;
        *histogram.entry(bin).or_insert(0) += 1;
        for &year in years.range(start_year..=end_year) {
            let flow = per_year.get(&year).copied().unwrap_or(0);
            let a = (flow as f64 - base as f64) / base as f64;
            let slot = yearly.entry(year).or_insert((0.0, 0));
            slot.0 += a;
            slot.1 += 1;
        }
        entries.push(AlphaEntry {
            origin: origin.clone(),
            destination: destination.clone(),
            base_flow: base,
            final_flow,
            alpha,
        });
    }

    let yearly_mean = yearly
        .into_iter()
        .map(|(year, (sum, count))| (year, sum / count as f64))
        .collect();
    Ok(AlphaReport {
        start_year,
        end_year,
        entries,
        excluded,
        histogram,
        yearly_mean,
    })
}

/// Bundle of every snapshot-level measure, one key per operation, ready to
/// serialize as JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub basic: BasicStats,
    pub reciprocity: ReciprocityStats,
    pub clustering: ClusteringSuite,
    pub balance: BalanceScores,
    pub triangle_summary: TriangleSummary,
    /// Present when the dataset spans more than one year.
    pub alpha: Option<AlphaReport>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::aggregate_years;
    use approx::assert_relative_eq;

    fn c(code: &str) -> CountryCode {
        CountryCode::from(code)
    }

    fn snapshot(edges: &[(&str, &str, u64)], nodes: &[&str]) -> NetworkSnapshot {
        let mut net = FlowNetwork::new(nodes.iter().map(|s| c(s)));
        for (o, d, w) in edges {
            net.add_flow(&c(o), &c(d), 2010, *w).unwrap();
        }
        aggregate_years(&net, 2010, 2010).unwrap()
    }

    #[test]
    fn complete_digraph_saturates_density() {
        let nodes = ["A", "B", "C", "D", "E"];
        let mut edges = Vec::new();
        for a in nodes {
            for b in nodes {
                if a != b {
                    edges.push((a, b, 1));
                }
            }
        }
        let stats = basic_stats(&snapshot(&edges, &nodes)).unwrap();
        assert_relative_eq!(stats.density, 1.0);
        assert_relative_eq!(stats.mean_out_degree, 4.0);
        assert_relative_eq!(stats.std_out_degree, 0.0);
    }

    #[test]
    fn empty_graph_has_zero_density() {
        let stats = basic_stats(&snapshot(&[], &["A", "B", "C", "D", "E"])).unwrap();
        assert_eq!(stats.link_count, 0);
        assert_eq!(stats.density, 0.0);
        assert_eq!(stats.mean_in_degree, 0.0);
    }

    #[test]
    fn single_node_is_rejected() {
        assert!(basic_stats(&snapshot(&[], &["A"])).is_err());
    }

    #[test]
    fn symmetric_flows_are_fully_reciprocal() {
        let snap = snapshot(&[("A", "B", 7), ("B", "A", 7), ("B", "C", 3), ("C", "B", 3)],
            &["A", "B", "C"]);
        let r = reciprocity_stats(&snap);
        assert_eq!(r.bidirectional_link_fraction, 1.0);
        assert_eq!(r.weighted_reciprocity, Some(1.0));
    }

    #[test]
    fn constructed_pair_gives_44_percent() {
        let snap = snapshot(&[("A", "B", 100), ("B", "A", 44)], &["A", "B"]);
        let r = reciprocity_stats(&snap);
        assert_eq!(r.bidirectional_pairs, 1);
        assert_relative_eq!(r.weighted_reciprocity.unwrap(), 0.44, max_relative = 1e-12);
    }

    #[test]
    fn one_way_network_has_no_reciprocity() {
        let snap = snapshot(&[("A", "B", 5), ("B", "C", 5)], &["A", "B", "C"]);
        let r = reciprocity_stats(&snap);
        assert_eq!(r.bidirectional_link_fraction, 0.0);
        assert_eq!(r.weighted_reciprocity, None);
    }

    #[test]
    fn pure_source_scores_minus_one() {
        let snap = snapshot(&[("S", "A", 10), ("S", "B", 20)], &["S", "A", "B"]);
        let b = balance(&snap);
        assert_eq!(b.structural[&c("S")], Some(-1.0));
        assert_eq!(b.functional[&c("S")], Some(-1.0));
        assert_eq!(b.structural[&c("A")], Some(1.0));
    }

    #[test]
    fn balanced_node_scores_zero() {
        let snap = snapshot(&[("A", "B", 9), ("B", "A", 9)], &["A", "B"]);
        let b = balance(&snap);
        assert_eq!(b.structural[&c("A")], Some(0.0));
        assert_eq!(b.functional[&c("A")], Some(0.0));
    }

    #[test]
    fn isolated_node_is_undefined_and_excluded() {
        let snap = snapshot(&[("A", "B", 2)], &["A", "B", "X"]);
        let b = balance(&snap);
        assert_eq!(b.structural[&c("X")], None);
        assert_eq!(b.functional[&c("X")], None);
        let csv = b.to_csv();
        assert!(csv.lines().any(|l| l == "X,,"), "{csv}");
    }

    #[test]
    fn pearson_is_one_on_linear_data() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 0.5).collect();
        let rho = pearson(&xs, &ys).unwrap().unwrap();
        assert_relative_eq!(rho, 1.0, max_relative = 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -2.0 * x + 1.0).collect();
        assert_relative_eq!(pearson(&xs, &neg).unwrap().unwrap(), -1.0, max_relative = 1e-12);
    }

    #[test]
    fn pearson_degenerate_cases() {
        assert_eq!(pearson(&[1.0], &[2.0]).unwrap(), None);
        assert_eq!(pearson(&[1.0, 1.0], &[2.0, 3.0]).unwrap(), None);
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    fn two_year_net(rows: &[(&str, &str, i32, u64)], nodes: &[&str]) -> FlowNetwork {
        let mut net = FlowNetwork::new(nodes.iter().map(|s| c(s)));
        for (o, d, y, t) in rows {
            net.add_flow(&c(o), &c(d), *y, *t).unwrap();
        }
        net
    }

    #[test]
    fn alpha_matches_relative_change() {
        let net = two_year_net(
            &[
                ("MK", "IL", 2004, 4),
                ("MK", "IL", 2018, 3528),
                ("A", "B", 2004, 10),
                ("A", "B", 2018, 10),
            ],
            &["MK", "IL", "A", "B"],
        );
        let report = alpha_evolution(&net, 2004, 2018).unwrap();
        let mk = report
            .entries
            .iter()
            .find(|e| e.origin == c("MK"))
            .unwrap();
        assert_eq!(mk.alpha, 881.0);
        let ab = report.entries.iter().find(|e| e.origin == c("A")).unwrap();
        assert_eq!(ab.alpha, 0.0);
    }

    #[test]
    fn vanished_flow_bottoms_out_at_minus_one() {
        let net = two_year_net(
            &[("A", "B", 2004, 50), ("C", "D", 2004, 1), ("C", "D", 2018, 1)],
            &["A", "B", "C", "D"],
        );
        let report = alpha_evolution(&net, 2004, 2018).unwrap();
        let ab = report.entries.iter().find(|e| e.origin == c("A")).unwrap();
        assert_eq!(ab.alpha, -1.0);
        assert_eq!(ab.final_flow, 0);
        assert_eq!(report.histogram.get(&0), Some(&1));
    }

    #[test]
    fn newborn_edges_are_excluded_not_scored() {
        let net = two_year_net(
            &[("A", "B", 2004, 5), ("A", "B", 2018, 6), ("X", "Y", 2018, 9)],
            &["A", "B", "X", "Y"],
        );
        let report = alpha_evolution(&net, 2004, 2018).unwrap();
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.excluded, vec![(c("X"), c("Y"))]);
    }

    #[test]
    fn yearly_means_track_intermediate_years() {
        let net = two_year_net(
            &[
                ("A", "B", 2004, 10),
                ("A", "B", 2005, 20),
                ("A", "B", 2006, 30),
                ("C", "D", 2004, 10),
                ("C", "D", 2006, 10),
            ],
            &["A", "B", "C", "D"],
        );
        let report = alpha_evolution(&net, 2004, 2006).unwrap();
        assert_eq!(report.yearly_mean[&2004], 0.0);
        // 2005: A->B at +1.0, C->D absent that year at -1.0
        assert_relative_eq!(report.yearly_mean[&2005], 0.0);
        assert_relative_eq!(report.yearly_mean[&2006], 1.0);
    }

    #[test]
    fn alpha_requires_both_years() {
        let net = two_year_net(&[("A", "B", 2004, 5)], &["A", "B"]);
        assert!(alpha_evolution(&net, 2004, 2018).is_err());
        assert!(alpha_evolution(&net, 2004, 2004).is_err());
    }
}

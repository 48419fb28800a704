//! Loads the configured dataset once, then renders each report artifact as
//! bytes. Artifacts are computed fully before anything is written, and a
//! failed write sweeps up whatever had already landed, so an output
//! directory never holds a partial report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result, bail};
use serde::Serialize;
use tourflow::distributions::{
    CountryWeighting, IndexSource, link_share_profile, argmax_matrix, incoming_flow_profile,
    outgoing_flow_profile_with, quadrant_classification_with,
};
use tourflow::community::{Partition, detect_communities, normalize_by_population};
use tourflow::geodesy::GeoBinning;
use tourflow::ingest::{
    self, AirportRecord, RouteRecord,
};
use tourflow::metrics::{
    AlphaReport, MetricReport, alpha_evolution, balance, basic_stats, clustering_suite,
    reciprocity_stats, triangle_census, triangle_summary,
};
use tourflow::model::{
    CountryRegistry, FlowNetwork, InfrastructureNetwork, NetworkSnapshot, aggregate_years,
};
use tourflow::nullmodels::{EnsembleMetric, ensemble_stats};
use tourflow::paths::{ChemicalDistanceMatrix, chemical_distances, flow_path_stats};
use tourflow::sig6;

use crate::config::RunConfig;

/// Everything the report artifacts are derived from, loaded once.
pub struct Workspace {
    pub registry: CountryRegistry,
    pub net: FlowNetwork,
    pub airports: Vec<AirportRecord>,
    pub routes: Vec<RouteRecord>,
    pub infra: InfrastructureNetwork,
    pub chem: ChemicalDistanceMatrix,
    pub snapshot: NetworkSnapshot,
    /// Resolved aggregation window (config bounds, else the data's extremes).
    pub years: (i32, i32),
}

pub fn load(config: &RunConfig) -> Result<Workspace> {
    config.validate_inputs()?;
    let registry = ingest::load_countries(&config.countries)?;
    let net = ingest::load_flows(&config.flows, &registry)?;
    let airports = ingest::load_airports(&config.airports, &registry)?;
    let routes = ingest::load_routes(&config.routes, &airports)?;
    let infra = ingest::coarse_grain(&airports, &routes)?;
    let chem = chemical_distances(&infra);
    let years = net.years();
    let (Some(&first), Some(&last)) = (years.first(), years.last()) else {
        bail!(
            "flow file {} contains no data rows",
            config.flows.display()
        );
    };
    let start = config.year_start.unwrap_or(first);
    let end = config.year_end.unwrap_or(last);
    let snapshot = aggregate_years(&net, start, end)
        .with_context(|| format!("aggregating years {start}..={end}"))?;
    Ok(Workspace {
        registry,
        net,
        airports,
        routes,
        infra,
        chem,
        snapshot,
        years: (start, end),
    })
}

/// One output file, as a path relative to the output directory plus its
/// full content.
pub struct Artifact {
    pub rel_path: PathBuf,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(rel_path: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) -> Artifact {
        Artifact {
            rel_path: rel_path.into(),
            bytes: bytes.into(),
        }
    }
}

/// Comment header embedded at the top of every CSV artifact.
fn stamp(config: &RunConfig) -> String {
    format!("# seed={}\n# config=sha256:{}\n", config.seed, config.hash())
}

fn alpha_report(ws: &Workspace) -> Result<Option<AlphaReport>> {
    let (start, end) = ws.years;
    let years = ws.net.years();
    if start >= end || !years.contains(&start) || !years.contains(&end) {
        return Ok(None);
    }
    Ok(Some(alpha_evolution(&ws.net, start, end)?))
}

#[derive(Serialize)]
struct MetricsDocument<'a> {
    seed: u64,
    config: String,
    years: (i32, i32),
    #[serde(flatten)]
    report: &'a MetricReport,
}

pub fn metrics_artifact(ws: &Workspace, config: &RunConfig) -> Result<Artifact> {
    let census = triangle_census(&ws.snapshot);
    let report = MetricReport {
        basic: basic_stats(&ws.snapshot)?,
        reciprocity: reciprocity_stats(&ws.snapshot),
        clustering: clustering_suite(&ws.snapshot),
        balance: balance(&ws.snapshot),
        triangle_summary: triangle_summary(&census),
        alpha: alpha_report(ws)?,
    };
    let document = MetricsDocument {
        seed: config.seed,
        config: format!("sha256:{}", config.hash()),
        years: ws.years,
        report: &report,
    };
    let mut bytes = serde_json::to_vec_pretty(&document)?;
    bytes.push(b'\n');
    Ok(Artifact::new("metrics.json", bytes))
}

pub fn triangles_artifact(ws: &Workspace, config: &RunConfig) -> Artifact {
    let census = triangle_census(&ws.snapshot);
    let body = format!("{}{}", stamp(config), census.to_csv());
    Artifact::new("triangles.csv", body)
}

fn detect_both(ws: &Workspace, config: &RunConfig) -> Result<(Partition, Option<Partition>)> {
    let raw = detect_communities(&ws.snapshot, config.seed, config.restarts)?;
    let normalized = match normalize_by_population(&ws.snapshot, &ws.registry) {
        Ok(scaled) => Some(detect_communities(&scaled, config.seed, config.restarts)?),
        Err(_) => None,
    };
    Ok((raw, normalized))
}

pub fn communities_artifact(ws: &Workspace, config: &RunConfig) -> Result<Artifact> {
    let (raw, normalized) = detect_both(ws, config)?;
    let mut body = stamp(config);
    writeln!(body, "# restarts={}", config.restarts).unwrap();
    writeln!(body, "# modularity_raw={}", sig6(raw.modularity)).unwrap();
    match &normalized {
        Some(partition) => {
            writeln!(body, "# modularity_normalized={}", sig6(partition.modularity)).unwrap()
        }
        None => writeln!(
            body,
            "# modularity_normalized=unavailable (population missing for some sender)"
        )
        .unwrap(),
    }
    body.push_str("node,community,normalized_community\n");
    for (node, label) in &raw.assignment {
        let scaled = normalized
            .as_ref()
            .map(|p| p.assignment[node].to_string())
            .unwrap_or_default();
        writeln!(body, "{node},{label},{scaled}").unwrap();
    }
    Ok(Artifact::new("communities.csv", body))
}

pub fn profile_artifacts(ws: &Workspace, config: &RunConfig) -> Result<Vec<Artifact>> {
    let binning = GeoBinning::new(config.bin_km)?;
    let geo = IndexSource::Geographic {
        registry: &ws.registry,
        binning,
        radius_km: config.earth_radius_km,
    };
    let chem = IndexSource::Chemical(&ws.chem);
    let head = stamp(config);
    let mut artifacts = Vec::new();
    for (tag, source) in [("chemical", &chem), ("geographic", &geo)] {
        let outgoing =
            outgoing_flow_profile_with(&ws.snapshot, source, CountryWeighting::Equal);
        artifacts.push(Artifact::new(
            format!("profiles/outgoing_{tag}.csv"),
            format!("{head}{}", outgoing.to_csv()),
        ));
        let links = link_share_profile(&ws.snapshot, source);
        artifacts.push(Artifact::new(
            format!("profiles/links_{tag}.csv"),
            format!("{head}{}", links.to_csv()),
        ));
        let incoming = incoming_flow_profile(&ws.snapshot, source);
        artifacts.push(Artifact::new(
            format!("profiles/incoming_{tag}.csv"),
            format!("{head}{}", incoming.to_csv()),
        ));
        let argmax = argmax_matrix(&ws.snapshot, source);
        artifacts.push(Artifact::new(
            format!("profiles/argmax_{tag}.csv"),
            format!("{head}{}", argmax.to_csv()),
        ));
    }
    let quadrants = quadrant_classification_with(&ws.snapshot, config.quadrants)?;
    artifacts.push(Artifact::new(
        "profiles/quadrants.csv",
        format!("{head}{}", quadrants.to_csv()),
    ));
    Ok(artifacts)
}

pub fn nullmodel_artifact(ws: &Workspace, config: &RunConfig) -> Result<Artifact> {
    let stats = ensemble_stats(
        &ws.snapshot,
        config.ensemble,
        config.seed,
        &EnsembleMetric::standard_set(),
    )?;
    let body = format!("{}{}", stamp(config), stats.to_csv());
    Ok(Artifact::new("nullmodel.csv", body))
}

pub fn balance_artifact(ws: &Workspace, config: &RunConfig) -> Artifact {
    let scores = balance(&ws.snapshot);
    Artifact::new("balance.csv", format!("{}{}", stamp(config), scores.to_csv()))
}

pub fn alpha_artifact(ws: &Workspace, config: &RunConfig) -> Result<Artifact> {
    let Some(report) = alpha_report(ws)? else {
        bail!(
            "flow evolution needs two distinct years with data; the resolved window is \
             {}..={} over data years {:?}",
            ws.years.0,
            ws.years.1,
            ws.net.years()
        );
    };
    let mut body = stamp(config);
    writeln!(body, "# start_year={}", report.start_year).unwrap();
    writeln!(body, "# end_year={}", report.end_year).unwrap();
    body.push_str("origin,destination,base_flow,final_flow,alpha,status\n");
    for entry in &report.entries {
        writeln!(
            body,
            "{},{},{},{},{},tracked",
            entry.origin,
            entry.destination,
            entry.base_flow,
            entry.final_flow,
            sig6(entry.alpha)
        )
        .unwrap();
    }
    for (origin, destination) in &report.excluded {
        writeln!(body, "{origin},{destination},0,,,excluded").unwrap();
    }
    Ok(Artifact::new("alpha.csv", body))
}

pub fn paths_artifact(ws: &Workspace, config: &RunConfig) -> Result<Artifact> {
    let stats = flow_path_stats(&ws.snapshot, &ws.chem)?;
    let mut body = stamp(config);
    let render = |value: Option<f64>| value.map(sig6).unwrap_or_else(|| "none".to_string());
    writeln!(body, "# flow_path_mean={}", render(stats.mean)).unwrap();
    writeln!(body, "# flow_path_std={}", render(stats.std)).unwrap();
    writeln!(body, "# flow_edges_reachable={}", stats.reachable).unwrap();
    writeln!(body, "# flow_edges_unreachable={}", stats.unreachable).unwrap();
    body.push_str(&ws.chem.to_csv());
    Ok(Artifact::new("paths.csv", body))
}

/// The full report: the union of every artifact-producing subcommand.
pub fn all_artifacts(ws: &Workspace, config: &RunConfig) -> Result<Vec<Artifact>> {
    let mut artifacts = vec![
        metrics_artifact(ws, config)?,
        triangles_artifact(ws, config),
        communities_artifact(ws, config)?,
    ];
    artifacts.extend(profile_artifacts(ws, config)?);
    artifacts.push(nullmodel_artifact(ws, config)?);
    artifacts.push(balance_artifact(ws, config));
    artifacts.push(alpha_artifact(ws, config)?);
    artifacts.push(paths_artifact(ws, config)?);
    Ok(artifacts)
}

/// Write artifacts under the output directory. On any failure, files
/// written by this call are removed before the error is returned.
pub fn write_artifacts(out_dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for artifact in artifacts {
        let target = out_dir.join(&artifact.rel_path);
        let result = (|| -> Result<()> {
            if let Some(parent) = target.parent() {
                fs::create_dir_all(parent)
                    .with_context(|| format!("creating directory {}", parent.display()))?;
            }
            fs::write(&target, &artifact.bytes)
                .with_context(|| format!("writing {}", target.display()))
        })();
        match result {
            Ok(()) => written.push(target),
            Err(err) => {
                for path in &written {
                    let _ = fs::remove_file(path);
                }
                return Err(err);
            }
        }
    }
    Ok(written)
}

/// Human-oriented dataset summary for `ingest-check`.
pub fn ingest_summary(ws: &Workspace) -> String {
    let years = ws.net.years();
    let mut out = String::new();
    writeln!(out, "countries: {}", ws.registry.len()).unwrap();
    writeln!(
        out,
        "flow edges: {} over years {:?}",
        ws.net.edge_count(),
        years
    )
    .unwrap();
    writeln!(out, "airports: {}", ws.airports.len()).unwrap();
    writeln!(out, "routes: {}", ws.routes.len()).unwrap();
    writeln!(
        out,
        "infrastructure: {} countries, {} links",
        ws.infra.nodes().len(),
        ws.infra.edge_count()
    )
    .unwrap();
    writeln!(
        out,
        "aggregated snapshot {}..={}: {} links",
        ws.years.0,
        ws.years.1,
        ws.snapshot.edge_count()
    )
    .unwrap();
    out
}

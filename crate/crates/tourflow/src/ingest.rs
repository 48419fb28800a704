//! CSV ingestion for countries, flows, airports and routes, the country-level
//! coarse-graining of the route network, and re-serialization of every table
//! to the same schemas.
//!
//! All files are UTF-8, comma separated, with a header row. Lines starting
//! with `#` are skipped so reports with embedded provenance comments can be
//! read back. Unknown codes, malformed values, self-loops and non-positive
//! flows abort ingestion with an error naming file and row; skipping rows
//! silently would bias every downstream statistic.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    CountryCode, CountryRecord, CountryRegistry, FlowNetwork, InfrastructureNetwork,
    NetworkSnapshot,
};
use crate::util::csv_field;

/// One airport row: identifier, owning country and coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AirportRecord {
    pub airport_id: String,
    pub country_code: CountryCode,
    pub lat: f64,
    pub lon: f64,
}

/// One directed route row between two airports.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteRecord {
    pub source_airport: String,
    pub destination_airport: String,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(input)
}

fn check_header(path: &str, headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::parse(
            path,
            1,
            format!("expected header {:?}, got {:?}", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn row_line(record: &csv::StringRecord, fallback: u64) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(fallback)
}

fn parse_f64(path: &str, row: u64, field: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(path, row, format!("malformed {field} `{value}`")))
}

/// Read the countries table (`code,name,lat,lon,population`). Population may
/// be blank; duplicate codes are rejected.
pub fn load_countries(path: impl AsRef<Path>) -> Result<CountryRegistry> {
    let path = path.as_ref();
    read_countries(open(path)?, &path.display().to_string())
}

fn read_countries<R: Read>(input: R, path: &str) -> Result<CountryRegistry> {
    let mut rdr = reader(input);
    check_header(path, rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?, &[
        "code", "name", "lat", "lon", "population",
    ])?;
    let mut registry = CountryRegistry::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 2;
        let record = record.map_err(|e| Error::parse(path, row, e.to_string()))?;
        let row = row_line(&record, row);
        let code = record[0].trim();
        if code.is_empty() {
            return Err(Error::parse(path, row, "empty country code"));
        }
        let lat = parse_f64(path, row, "lat", &record[2])?;
        let lon = parse_f64(path, row, "lon", &record[3])?;
        let population = match record[4].trim() {
            "" => None,
            raw => Some(raw.parse::<u64>().map_err(|_| {
                Error::parse(path, row, format!("malformed population `{raw}`"))
            })?),
        };
        let rec = CountryRecord::new(code, record[1].trim(), lat, lon, population)
            .map_err(|e| Error::parse(path, row, e.to_string()))?;
        registry
            .insert(rec)
            .map_err(|e| Error::parse(path, row, e.to_string()))?;
    }
    Ok(registry)
}

/// Read the flows table (`origin,destination,year,tourists`) against a
/// registry. The resulting network spans the full registry universe, so
/// countries without any flow stay in the node set as isolated nodes.
pub fn load_flows(path: impl AsRef<Path>, registry: &CountryRegistry) -> Result<FlowNetwork> {
    let path = path.as_ref();
    read_flows(open(path)?, &path.display().to_string(), registry)
}

fn read_flows<R: Read>(input: R, path: &str, registry: &CountryRegistry) -> Result<FlowNetwork> {
    let mut rdr = reader(input);
    check_header(path, rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?, &[
        "origin",
        "destination",
        "year",
        "tourists",
    ])?;
    let mut net = FlowNetwork::new(registry.codes().cloned());
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 2;
        let record = record.map_err(|e| Error::parse(path, row, e.to_string()))?;
        let row = row_line(&record, row);
        let origin = CountryCode::from(record[0].trim());
        let destination = CountryCode::from(record[1].trim());
        for code in [&origin, &destination] {
            if !registry.contains(code) {
                return Err(Error::parse(path, row, format!("unknown country code {code}")));
            }
        }
        let year = record[2]
            .trim()
            .parse::<i32>()
            .map_err(|_| Error::parse(path, row, format!("malformed year `{}`", &record[2])))?;
        let tourists = record[3]
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::parse(path, row, format!("malformed tourists `{}`", &record[3])))?;
        if tourists <= 0 {
            return Err(Error::parse(
                path,
                row,
                format!("non-positive flow {tourists} on {origin}->{destination}"),
            ));
        }
        net.add_flow(&origin, &destination, year, tourists as u64)
            .map_err(|e| Error::parse(path, row, e.to_string()))?;
    }
    Ok(net)
}

/// Read the airports table (`airport_id,country_code,lat,lon`); every country
/// must be resolvable against the registry.
pub fn load_airports(
    path: impl AsRef<Path>,
    registry: &CountryRegistry,
) -> Result<Vec<AirportRecord>> {
    let path = path.as_ref();
    read_airports(open(path)?, &path.display().to_string(), registry)
}

fn read_airports<R: Read>(
    input: R,
    path: &str,
    registry: &CountryRegistry,
) -> Result<Vec<AirportRecord>> {
    let mut rdr = reader(input);
    check_header(path, rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?, &[
        "airport_id",
        "country_code",
        "lat",
        "lon",
    ])?;
    let mut airports = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 2;
        let record = record.map_err(|e| Error::parse(path, row, e.to_string()))?;
        let row = row_line(&record, row);
        let airport_id = record[0].trim().to_string();
        if airport_id.is_empty() {
            return Err(Error::parse(path, row, "empty airport id"));
        }
        if let Some(prev) = seen.insert(airport_id.clone(), row) {
            return Err(Error::parse(
                path,
                row,
                format!("duplicate airport id {airport_id} (first seen at row {prev})"),
            ));
        }
        let country_code = CountryCode::from(record[1].trim());
        if !registry.contains(&country_code) {
            return Err(Error::parse(path, row, format!("unknown country code {country_code}")));
        }
        let lat = parse_f64(path, row, "lat", &record[2])?;
        let lon = parse_f64(path, row, "lon", &record[3])?;
        if !(-90.0..=90.0).contains(&lat) || !(lon > -180.0 && lon <= 180.0) {
            return Err(Error::parse(path, row, format!("coordinates ({lat}, {lon}) out of range")));
        }
        airports.push(AirportRecord {
            airport_id,
            country_code,
            lat,
            lon,
        });
    }
    Ok(airports)
}

/// Read the routes table (`source_airport,destination_airport`); both
/// endpoints must appear in the airports list.
pub fn load_routes(path: impl AsRef<Path>, airports: &[AirportRecord]) -> Result<Vec<RouteRecord>> {
    let path = path.as_ref();
    read_routes(open(path)?, &path.display().to_string(), airports)
}

fn read_routes<R: Read>(input: R, path: &str, airports: &[AirportRecord]) -> Result<Vec<RouteRecord>> {
    let known: std::collections::BTreeSet<&str> =
        airports.iter().map(|a| a.airport_id.as_str()).collect();
    let mut rdr = reader(input);
    check_header(path, rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?, &[
        "source_airport",
        "destination_airport",
    ])?;
    let mut routes = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 2;
        let record = record.map_err(|e| Error::parse(path, row, e.to_string()))?;
        let row = row_line(&record, row);
        let source = record[0].trim();
        let destination = record[1].trim();
        for airport in [source, destination] {
            if !known.contains(airport) {
                return Err(Error::parse(path, row, format!("unresolvable airport {airport}")));
            }
        }
        routes.push(RouteRecord {
            source_airport: source.to_string(),
            destination_airport: destination.to_string(),
        });
    }
    Ok(routes)
}

/// Collapse airports to their countries and routes to unordered country
/// pairs. Intra-country routes are discarded; parallel routes collapse to a
/// single edge; direction is ignored because the underlying route network is
/// bidirectional at the country level.
pub fn coarse_grain(
    airports: &[AirportRecord],
    routes: &[RouteRecord],
) -> Result<InfrastructureNetwork> {
    let country_of: BTreeMap<&str, &CountryCode> = airports
        .iter()
        .map(|a| (a.airport_id.as_str(), &a.country_code))
        .collect();
    let mut infra =
        InfrastructureNetwork::new(airports.iter().map(|a| a.country_code.clone()));
    for route in routes {
        let resolve = |id: &str| {
            country_of
                .get(id)
                .copied()
                .ok_or_else(|| Error::invalid(format!("unresolvable airport {id}")))
        };
        let a = resolve(&route.source_airport)?;
        let b = resolve(&route.destination_airport)?;
        if a != b {
            infra.add_edge(a, b)?;
        }
    }
    Ok(infra)
}

/// Serialize a registry back to the countries schema.
pub fn write_countries(registry: &CountryRegistry, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("code,name,lat,lon,population\n");
    for rec in registry.iter() {
        let population = rec.population.map(|p| p.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(rec.code.as_str()),
            csv_field(&rec.name),
            rec.centroid_lat,
            rec.centroid_lon,
            population
        ));
    }
    write_all(path, &out)
}

/// Serialize a flow network back to the flows schema, rows sorted.
pub fn write_flows(net: &FlowNetwork, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("origin,destination,year,tourists\n");
    for (origin, destination, per_year) in net.edges() {
        for (year, tourists) in per_year {
            out.push_str(&format!("{origin},{destination},{year},{tourists}\n"));
        }
    }
    write_all(path, &out)
}

pub fn write_airports(airports: &[AirportRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("airport_id,country_code,lat,lon\n");
    for a in airports {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_field(&a.airport_id),
            a.country_code,
            a.lat,
            a.lon
        ));
    }
    write_all(path.as_ref(), &out)
}

pub fn write_routes(routes: &[RouteRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("source_airport,destination_airport\n");
    for r in routes {
        out.push_str(&format!(
            "{},{}\n",
            csv_field(&r.source_airport),
            csv_field(&r.destination_airport)
        ));
    }
    write_all(path.as_ref(), &out)
}

/// Serialize a snapshot as an edge list (`origin,destination,weight`).
/// Weights use the shortest exact decimal form, so reading the file back
/// reproduces them bit for bit.
pub fn write_snapshot(snapshot: &NetworkSnapshot, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("origin,destination,weight\n");
    for (origin, destination, weight) in snapshot.edges() {
        out.push_str(&format!("{origin},{destination},{weight}\n"));
    }
    write_all(path.as_ref(), &out)
}

/// Read an edge-list snapshot back. The node universe comes from the
/// registry and the year range from the caller, mirroring how the snapshot
/// was produced in the first place.
pub fn read_snapshot(
    path: impl AsRef<Path>,
    registry: &CountryRegistry,
    year_range: (i32, i32),
) -> Result<NetworkSnapshot> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let mut rdr = reader(open(path)?);
    check_header(&label, rdr.headers().map_err(|e| Error::parse(&label, 1, e.to_string()))?, &[
        "origin",
        "destination",
        "weight",
    ])?;
    let mut edges = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 2;
        let record = record.map_err(|e| Error::parse(&label, row, e.to_string()))?;
        let row = row_line(&record, row);
        let origin = CountryCode::from(record[0].trim());
        let destination = CountryCode::from(record[1].trim());
        for code in [&origin, &destination] {
            if !registry.contains(code) {
                return Err(Error::parse(&label, row, format!("unknown country code {code}")));
            }
        }
        let weight = parse_f64(&label, row, "weight", &record[2])?;
        if !(weight > 0.0) {
            return Err(Error::parse(&label, row, format!("non-positive weight {weight}")));
        }
        edges.push((origin, destination, weight));
    }
    NetworkSnapshot::from_weighted_edges(registry.codes().cloned(), edges, year_range)
}

fn write_all(path: &Path, contents: &str) -> Result<()> {
    let mut file = create(path)?;
    file.write_all(contents.as_bytes()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

//! Run configuration: a small `key = value` file naming the four input
//! files and the analysis parameters. Everything that influences results
//! lives here, so a report is fully described by its config hash.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result, bail};
use sha2::{Digest, Sha256};
use tourflow::distributions::QuadrantMapping;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub countries: PathBuf,
    pub flows: PathBuf,
    pub airports: PathBuf,
    pub routes: PathBuf,
    pub out_dir: PathBuf,
    /// Aggregation window; either bound defaults to the data's extreme year.
    pub year_start: Option<i32>,
    pub year_end: Option<i32>,
    pub bin_km: f64,
    pub earth_radius_km: f64,
    /// Null-model ensemble size.
    pub ensemble: usize,
    pub seed: u64,
    /// Louvain restarts.
    pub restarts: usize,
    pub quadrants: QuadrantMapping,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            countries: PathBuf::from("countries.csv"),
            flows: PathBuf::from("flows.csv"),
            airports: PathBuf::from("airports.csv"),
            routes: PathBuf::from("routes.csv"),
            out_dir: PathBuf::from("report"),
            year_start: None,
            year_end: None,
            bin_km: 1000.0,
            earth_radius_km: 6371.0,
            ensemble: 100,
            seed: 42,
            restarts: 20,
            quadrants: QuadrantMapping::default(),
        }
    }
}

fn mapping_text(mapping: &QuadrantMapping) -> String {
    format!(
        "{},{},{},{}",
        mapping.low_in_low_out.as_str(),
        mapping.low_in_high_out.as_str(),
        mapping.high_in_high_out.as_str(),
        mapping.high_in_low_out.as_str()
    )
}

impl RunConfig {
    /// Parse the `key = value` format. Lines starting with `#` and blank
    /// lines are ignored; values are trimmed; unknown or repeated keys are
    /// rejected. The four input paths are required, everything else has a
    /// default.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        let mut seen = Vec::new();
        let mut required = [false; 4];
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`, got `{raw}`", number + 1);
            };
            let key = key.trim();
            let value = value.trim();
            if seen.contains(&key.to_string()) {
                bail!("config line {}: key `{key}` given twice", number + 1);
            }
            seen.push(key.to_string());
            let parse_ctx = |what: &str| format!("config line {}: {what} `{value}`", number + 1);
            match key {
                "countries" => {
                    config.countries = PathBuf::from(value);
                    required[0] = true;
                }
                "flows" => {
                    config.flows = PathBuf::from(value);
                    required[1] = true;
                }
                "airports" => {
                    config.airports = PathBuf::from(value);
                    required[2] = true;
                }
                "routes" => {
                    config.routes = PathBuf::from(value);
                    required[3] = true;
                }
                "out_dir" => config.out_dir = PathBuf::from(value),
                "year_start" => {
                    config.year_start =
                        Some(value.parse().with_context(|| parse_ctx("bad year"))?)
                }
                "year_end" => {
                    config.year_end = Some(value.parse().with_context(|| parse_ctx("bad year"))?)
                }
                "bin_km" => {
                    config.bin_km = value.parse().with_context(|| parse_ctx("bad width"))?
                }
                "earth_radius_km" => {
                    config.earth_radius_km =
                        value.parse().with_context(|| parse_ctx("bad radius"))?
                }
                "ensemble" => {
                    config.ensemble = value.parse().with_context(|| parse_ctx("bad size"))?
                }
                "seed" => config.seed = value.parse().with_context(|| parse_ctx("bad seed"))?,
                "restarts" => {
                    config.restarts = value.parse().with_context(|| parse_ctx("bad count"))?
                }
                "quadrants" => {
                    config.quadrants =
                        QuadrantMapping::parse(value).with_context(|| parse_ctx("bad mapping"))?
                }
                other => bail!("config line {}: unknown key `{other}`", number + 1),
            }
        }
        let names = ["countries", "flows", "airports", "routes"];
        for (given, name) in required.iter().zip(names) {
            if !given {
                bail!("config is missing the required `{name}` path");
            }
        }
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        RunConfig::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    fn check(&self) -> Result<()> {
        if self.ensemble < 1 {
            bail!("ensemble size must be at least 1");
        }
        if self.restarts < 1 {
            bail!("restarts must be at least 1");
        }
        if !(self.bin_km > 0.0) {
            bail!("bin_km must be positive, got {}", self.bin_km);
        }
        if !(self.earth_radius_km > 0.0) {
            bail!("earth_radius_km must be positive, got {}", self.earth_radius_km);
        }
        if let (Some(start), Some(end)) = (self.year_start, self.year_end) {
            if start > end {
                bail!("year_start {start} is after year_end {end}");
            }
        }
        Ok(())
    }

    /// Verify every input file can actually be opened, naming the offender.
    pub fn validate_inputs(&self) -> Result<()> {
        for path in [&self.countries, &self.flows, &self.airports, &self.routes] {
            fs::File::open(path)
                .map(drop)
                .with_context(|| format!("cannot open input file {}", path.display()))?;
        }
        Ok(())
    }

    /// Serialize back to the file format. `parse(to_text(c)) == c` for any
    /// valid config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let path = |p: &PathBuf| p.display().to_string();
        writeln!(out, "countries = {}", path(&self.countries)).unwrap();
        writeln!(out, "flows = {}", path(&self.flows)).unwrap();
        writeln!(out, "airports = {}", path(&self.airports)).unwrap();
        writeln!(out, "routes = {}", path(&self.routes)).unwrap();
        writeln!(out, "out_dir = {}", path(&self.out_dir)).unwrap();
        if let Some(year) = self.year_start {
            writeln!(out, "year_start = {year}").unwrap();
        }
        if let Some(year) = self.year_end {
            writeln!(out, "year_end = {year}").unwrap();
        }
        writeln!(out, "bin_km = {}", self.bin_km).unwrap();
        writeln!(out, "earth_radius_km = {}", self.earth_radius_km).unwrap();
        writeln!(out, "ensemble = {}", self.ensemble).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        writeln!(out, "restarts = {}", self.restarts).unwrap();
        writeln!(out, "quadrants = {}", mapping_text(&self.quadrants)).unwrap();
        out
    }

    /// Hex digest identifying the analysis: every field that influences
    /// report content, which is the full config minus the output directory.
    pub fn hash(&self) -> String {
        let mut text = String::new();
        for line in self.to_text().lines() {
            if !line.starts_with("out_dir =") {
                text.push_str(line);
                text.push('\n');
            }
        }
        let digest = Sha256::digest(text.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").unwrap();
        }
        hex
    }
}

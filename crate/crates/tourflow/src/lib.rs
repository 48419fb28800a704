//! Analysis toolkit for directed, weighted, multi-year flow networks between
//! countries, layered on an undirected infrastructure network coarse-grained
//! from airline routes.
//!
//! The crate covers structural statistics (density, degrees, reciprocity,
//! directed triangle census, clustering), balance measures, distance-binned
//! flow profiles, modularity communities, temporal flow evolution, and
//! degree-preserving null-model ensembles. Everything is deterministic:
//! randomized analyses take explicit seeds and results are reproducible
//! bit-for-bit.

pub mod community;
pub mod distributions;
mod error;
pub mod geodesy;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod nullmodels;
pub mod paths;
mod view;

pub use error::{Error, Result};
pub use model::{
    aggregate_years, CountryCode, CountryRecord, CountryRegistry, Direction, FlowNetwork,
    InfrastructureNetwork, NetworkSnapshot,
};
pub use util::sig6;

pub(crate) mod util {
    /// Round to 6 significant digits and render with the shortest exact
    /// representation. All CSV emitters use this so that reruns are
    /// byte-identical.
    pub fn sig6(x: f64) -> String {
        if x == 0.0 || !x.is_finite() {
            return format!("{x}");
        }
        let magnitude = x.abs().log10().floor();
        let factor = 10f64.powf(5.0 - magnitude);
        let rounded = (x * factor).round() / factor;
        format!("{rounded}")
    }

    /// Population mean and standard deviation (divide by N).
    pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some((mean, var.sqrt()))
    }

    /// Quote a CSV field only when it needs it.
    pub fn csv_field(s: &str) -> String {
        if s.contains(',') || s.contains('"') || s.contains('\n') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }
}

#[cfg(test)]
mod util_tests {
    use super::util::{mean_std, sig6};

    #[test]
    fn sig6_rounds_to_six_significant_digits() {
        assert_eq!(sig6(19.383177570093458), "19.3832");
        assert_eq!(sig6(0.09100083366241061), "0.0910008");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-1.23456789), "-1.23457");
        assert_eq!(sig6(123456789.0), "123457000");
    }

    #[test]
    fn mean_std_is_population_flavored() {
        let (mean, std) = mean_std(&[1.0, 3.0]).unwrap();
        assert_eq!(mean, 2.0);
        assert_eq!(std, 1.0);
        assert!(mean_std(&[]).is_none());
    }
}

//! Great-circle distances between country centroids and fixed-width distance
//! binning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in kilometers. Overridable via the `_with_radius`
/// variant and the run configuration.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

fn check_coords((lat, lon): (f64, f64)) -> Result<()> {
    if !(-90.0..=90.0).contains(&lat) {
        return Err(Error::invalid(format!("latitude {lat} outside [-90, 90]")));
    }
    if !(lon > -180.0 && lon <= 180.0) {
        return Err(Error::invalid(format!("longitude {lon} outside (-180, 180]")));
    }
    Ok(())
}

/// Great-circle distance between two (lat, lon) points in degrees, on a
/// sphere of radius [`EARTH_RADIUS_KM`].
pub fn haversine_km(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    haversine_km_with_radius(a, b, EARTH_RADIUS_KM)
}

pub fn haversine_km_with_radius(a: (f64, f64), b: (f64, f64), radius_km: f64) -> Result<f64> {
    check_coords(a)?;
    check_coords(b)?;
    if !(radius_km > 0.0) {
        return Err(Error::invalid(format!("radius {radius_km} must be positive")));
    }
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = lon2 - lon1;
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    Ok(2.0 * radius_km * h.sqrt().min(1.0).asin())
}

/// Fixed-width distance bins. Bin `k` is the half-open interval
/// `(k*width, (k+1)*width]`, so a distance sitting exactly on a boundary
/// belongs to the lower bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoBinning {
    pub width_km: f64,
}

impl Default for GeoBinning {
    fn default() -> Self {
        GeoBinning { width_km: 1000.0 }
    }
}

impl GeoBinning {
    pub fn new(width_km: f64) -> Result<Self> {
        if !(width_km > 0.0) {
            return Err(Error::invalid(format!("bin width {width_km} must be positive")));
        }
        Ok(GeoBinning { width_km })
    }

    /// Upper boundary of bin `k`.
    pub fn upper_km(&self, k: u32) -> f64 {
        (k as f64 + 1.0) * self.width_km
    }
}

/// Bin index for a strictly positive distance. Distinct countries cannot sit
/// at distance zero; coincident centroids are a data error.
pub fn geo_bin(d_km: f64, binning: &GeoBinning) -> Result<u32> {
    if !(d_km > 0.0) {
        return Err(Error::invalid(format!("distance {d_km} must be positive")));
    }
    let width = binning.width_km;
    let mut k = (d_km / width).ceil() - 1.0;
    if k < 0.0 {
        k = 0.0;
    }
    // Guard the boundaries against floating-point drift in the division.
    while k > 0.0 && k * width >= d_km {
        k -= 1.0;
    }
    while (k + 1.0) * width < d_km {
        k += 1.0;
    }
    Ok(k as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_are_at_distance_zero() {
        assert_eq!(haversine_km((40.0, -4.0), (40.0, -4.0)).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_equatorial_points_span_half_the_great_circle() {
        let d = haversine_km((0.0, 0.0), (0.0, 180.0)).unwrap();
        assert!((d - std::f64::consts::PI * EARTH_RADIUS_KM).abs() < 1e-9);
        assert!((d - 20015.09).abs() < 0.01);
    }

    #[test]
    fn symmetry_is_exact() {
        let a = (40.0, -4.0);
        let b = (-22.0, 24.0);
        assert_eq!(haversine_km(a, b).unwrap(), haversine_km(b, a).unwrap());
    }

    #[test]
    fn spain_to_botswana_centroids() {
        // Fixture centroids; the value depends on the centroid table used.
        let d = haversine_km((40.0, -4.0), (-22.0, 24.0)).unwrap();
        assert!((d - 7488.0).abs() < 50.0, "got {d}");
    }

    #[test]
    fn rejects_out_of_range_coordinates() {
        assert!(haversine_km((95.0, 0.0), (0.0, 0.0)).is_err());
        assert!(haversine_km((0.0, -180.0), (0.0, 0.0)).is_err());
        assert!(haversine_km((0.0, 200.0), (0.0, 0.0)).is_err());
    }

    #[test]
    fn bin_boundaries_follow_half_open_convention() {
        let binning = GeoBinning::default();
        assert_eq!(geo_bin(1000.0, &binning).unwrap(), 0);
        assert_eq!(geo_bin(1000.01, &binning).unwrap(), 1);
        assert_eq!(geo_bin(0.5, &binning).unwrap(), 0);
        assert_eq!(geo_bin(7488.0, &binning).unwrap(), 7);
        assert!(geo_bin(0.0, &binning).is_err());
        assert!(geo_bin(-3.0, &binning).is_err());
    }

    #[test]
    fn bin_interval_contains_its_distance() {
        let binning = GeoBinning::new(250.0).unwrap();
        for i in 1..8000 {
            let d = i as f64 * 3.17;
            let k = geo_bin(d, &binning).unwrap() as f64;
            assert!(k * 250.0 < d && d <= (k + 1.0) * 250.0, "d={d} k={k}");
        }
    }
}

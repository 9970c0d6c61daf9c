//! Great-circle distances and nearby-restaurant search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Earth radius used for all distance computations.
pub const EARTH_RADIUS_METERS: f64 = 6_371_000.0;

/// Radius of a nearby scan when the caller does not choose one.
pub const DEFAULT_RADIUS_METERS: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeoError {
    #[error("latitude {0} is outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} is outside [-180, 180]")]
    Longitude(f64),
    #[error("radius must be a positive number of meters, got {0}")]
    Radius(f64),
}

/// A WGS84-style coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeoPoint {
    latitude: f64,
    longitude: f64,
}

impl GeoPoint {
    pub fn new(latitude: f64, longitude: f64) -> Result<Self, GeoError> {
        if !latitude.is_finite() || !(-90.0..=90.0).contains(&latitude) {
            return Err(GeoError::Latitude(latitude));
        }
        if !longitude.is_finite() || !(-180.0..=180.0).contains(&longitude) {
            return Err(GeoError::Longitude(longitude));
        }
        Ok(GeoPoint { latitude, longitude })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }
}

impl<'de> Deserialize<'de> for GeoPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            latitude: f64,
            longitude: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        GeoPoint::new(raw.latitude, raw.longitude).map_err(serde::de::Error::custom)
    }
}

/// Haversine distance on a sphere of radius [`EARTH_RADIUS_METERS`].
pub fn distance_meters(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat_a = a.latitude.to_radians();
    let lat_b = b.latitude.to_radians();
    let half_dlat = (b.latitude - a.latitude).to_radians() / 2.0;
    let half_dlon = (b.longitude - a.longitude).to_radians() / 2.0;

    let h = half_dlat.sin().powi(2) + lat_a.cos() * lat_b.cos() * half_dlon.sin().powi(2);
    // Rounding can push h a hair above 1 for antipodal points.
    2.0 * EARTH_RADIUS_METERS * h.sqrt().min(1.0).asin()
}

/// Candidates strictly closer than `radius` meters to `user`, nearest first.
///
/// A key that appears with several locations is reported once, at its
/// closest location. Equal distances are ordered by key.
pub fn nearby<K, I>(user: GeoPoint, candidates: I, radius: f64) -> Result<Vec<(K, f64)>, GeoError>
where
    K: Ord,
    I: IntoIterator<Item = (K, GeoPoint)>,
{
    if !radius.is_finite() || radius <= 0.0 {
        return Err(GeoError::Radius(radius));
    }

    let mut closest: BTreeMap<K, f64> = BTreeMap::new();
    for (key, point) in candidates {
        let d = distance_meters(user, point);
        if d >= radius {
            continue;
        }
        closest
            .entry(key)
            .and_modify(|best| *best = best.min(d))
            .or_insert(d);
    }

    let mut hits: Vec<(K, f64)> = closest.into_iter().collect();
    // BTreeMap iteration is key-ordered, so a stable sort breaks ties by key.
    hits.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(hits)
}

//! Line-oriented seed files.
//!
//! Both formats are UTF-8 text with one entry per line and `|` separating
//! fields. Blank lines and lines starting with `#` are ignored.
//!
//! Locations: `restaurant name | lat,lon ; lat,lon ...`
//!
//! ```text
//! Burger King | 32.2319,-110.9501 ; 32.2290,-110.9550
//! ```
//!
//! Tips: `scope | label | text`, where scope is a food category or `*` for
//! every category and label is `green`, `yellow`, `red` or `unclassified`.
//!
//! ```text
//! *       | red | Ask for sauces and dressings on the side.
//! Burgers | red | Swap the fries for a side salad.
//! ```

use std::collections::HashMap;

use thiserror::Error;

use crate::geo::GeoPoint;
use crate::tld::TrafficLightLabel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SeedError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationEntry {
    pub restaurant_name: String,
    pub locations: Vec<GeoPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TipEntry {
    pub scope: String,
    pub label: TrafficLightLabel,
    pub text: String,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn parse_point(raw: &str) -> Result<GeoPoint, String> {
    let (lat, lon) = raw
        .split_once(',')
        .ok_or_else(|| format!("expected `lat,lon`, found {raw:?}"))?;
    let lat: f64 = lat.trim().parse().map_err(|_| format!("bad latitude {:?}", lat.trim()))?;
    let lon: f64 = lon.trim().parse().map_err(|_| format!("bad longitude {:?}", lon.trim()))?;
    GeoPoint::new(lat, lon).map_err(|e| e.to_string())
}

pub fn parse_locations(text: &str) -> Result<Vec<LocationEntry>, SeedError> {
    let mut entries = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, content) in content_lines(text) {
        let err = |message: String| SeedError { line, message };
        let (name, coords) = content
            .split_once('|')
            .ok_or_else(|| err("expected `name | lat,lon ; ...`".into()))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(err("restaurant name is empty".into()));
        }
        if let Some(first) = seen.insert(name.to_lowercase(), line) {
            return Err(err(format!("{name:?} already listed on line {first}")));
        }
        let locations = coords
            .split(';')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(parse_point)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        if locations.is_empty() {
            return Err(err(format!("no coordinates for {name:?}")));
        }
        entries.push(LocationEntry { restaurant_name: name.to_owned(), locations });
    }
    Ok(entries)
}

pub fn parse_tips(text: &str) -> Result<Vec<TipEntry>, SeedError> {
    let mut entries = Vec::new();
    for (line, content) in content_lines(text) {
        let err = |message: String| SeedError { line, message };
        let mut fields = content.splitn(3, '|').map(str::trim);
        let (Some(scope), Some(label), Some(tip)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected `scope | label | text`".into()));
        };
        if scope.is_empty() {
            return Err(err("scope is empty; use `*` for every category".into()));
        }
        let label = label.parse().map_err(|e: crate::tld::UnknownLabel| err(e.to_string()))?;
        if tip.is_empty() {
            return Err(err("tip text is empty".into()));
        }
        entries.push(TipEntry { scope: scope.to_owned(), label, text: tip.to_owned() });
    }
    Ok(entries)
}

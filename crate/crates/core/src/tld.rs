//! Traffic-light labelling of menu items.
//!
//! Items are labelled from total fat per serving alone:
//!
//! | label  | fat per serving        |
//! |--------|------------------------|
//! | green  | less than 2 g          |
//! | yellow | 2 g up to and including 5 g |
//! | red    | more than 5 g          |
//!
//! Items whose fat content is unknown are [`TrafficLightLabel::Unclassified`]
//! and always sort after red ones, so unknown food is never presented as a
//! healthy choice.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound (exclusive) of the green interval, in grams of fat.
pub const GREEN_BELOW_GRAMS: f64 = 2.0;
/// Upper bound (inclusive) of the yellow interval, in grams of fat.
pub const YELLOW_UP_TO_GRAMS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficLightLabel {
    Green,
    Yellow,
    Red,
    Unclassified,
}

impl TrafficLightLabel {
    pub const ALL: [TrafficLightLabel; 4] = [
        TrafficLightLabel::Green,
        TrafficLightLabel::Yellow,
        TrafficLightLabel::Red,
        TrafficLightLabel::Unclassified,
    ];

    /// Display rank: lower is healthier and is listed first.
    pub fn health_rank(self) -> u8 {
        match self {
            TrafficLightLabel::Green => 0,
            TrafficLightLabel::Yellow => 1,
            TrafficLightLabel::Red => 2,
            TrafficLightLabel::Unclassified => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrafficLightLabel::Green => "green",
            TrafficLightLabel::Yellow => "yellow",
            TrafficLightLabel::Red => "red",
            TrafficLightLabel::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for TrafficLightLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown traffic-light label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for TrafficLightLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "green" => Ok(TrafficLightLabel::Green),
            "yellow" => Ok(TrafficLightLabel::Yellow),
            "red" => Ok(TrafficLightLabel::Red),
            "unclassified" => Ok(TrafficLightLabel::Unclassified),
            _ => Err(UnknownLabel(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("fat content must be finite and non-negative, got {0}")]
pub struct InvalidFat(pub f64);

/// Labels a serving from its total fat content.
///
/// A negative or non-finite amount means the ingested data is corrupt and is
/// rejected rather than labelled.
pub fn classify(fat_grams: Option<f64>) -> Result<TrafficLightLabel, InvalidFat> {
    let Some(fat) = fat_grams else {
        return Ok(TrafficLightLabel::Unclassified);
    };
    if !fat.is_finite() || fat < 0.0 {
        return Err(InvalidFat(fat));
    }
    Ok(if fat < GREEN_BELOW_GRAMS {
        TrafficLightLabel::Green
    } else if fat <= YELLOW_UP_TO_GRAMS {
        TrafficLightLabel::Yellow
    } else {
        TrafficLightLabel::Red
    })
}

/// Anything that can be placed on a green-first menu.
pub trait Labelled {
    fn label(&self) -> TrafficLightLabel;
    fn display_name(&self) -> &str;
}

fn menu_cmp<T: Labelled>(a: &T, b: &T) -> Ordering {
    a.label()
        .health_rank()
        .cmp(&b.label().health_rank())
        .then_with(|| {
            a.display_name()
                .to_lowercase()
                .cmp(&b.display_name().to_lowercase())
        })
}

/// Orders a menu green first, then yellow, red and unclassified; items with
/// the same label are alphabetical, ignoring case. The sort is stable, so
/// identically named items keep their input order.
pub fn order_menu<T: Labelled>(mut items: Vec<T>) -> Vec<T> {
    items.sort_by(menu_cmp);
    items
}

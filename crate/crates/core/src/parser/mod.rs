//! Menu-repository crawler.
//!
//! A repository is an index page linking to one page per restaurant, each
//! holding a nutrition table. Ingestion runs in three steps:
//!
//! 1. fetch the index and collect restaurant links ([`extract_restaurant_links`]);
//! 2. for each link, fetch the page and map its table headers to fields
//!    ([`map_columns`]), then read the data rows ([`parse_menu_table`]);
//! 3. hand each restaurant's records to a [`MenuSink`] as one unit.

mod columns;
mod fetch;
mod ingest;
mod links;
mod numeric;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nutrition::NutritionFacts;

pub use columns::{map_columns, normalize_header, ColumnMap, FieldRole};
pub use fetch::{resolve_root, DefaultFetcher, FetchError, FileFetcher, HttpFetcher, PageFetcher};
pub use ingest::{ingest, IngestError, IngestFailure, IngestReport, MenuSink};
pub use links::{extract_restaurant_links, RestaurantLink};
pub use numeric::parse_quantity;
pub use table::{parse_menu_table, ParsedMenu};

/// Category given to rows that appear before any category cell is filled,
/// or that come from tables with no category column.
pub const DEFAULT_CATEGORY: &str = "Uncategorized";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMenuRecord {
    pub restaurant_name: String,
    pub food_category: String,
    pub item_name: String,
    pub facts: NutritionFacts,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("table rejected: no item-name column")]
    NoItemNameColumn,
    #[error("table rejected: no table with a recognizable item-name header")]
    NoMenuTable,
}

/// Trims and collapses internal whitespace, including non-breaking spaces.
pub(crate) fn normalize_text(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

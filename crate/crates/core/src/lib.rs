//! Menu ingestion and traffic-light food recommendations.
//!
//! - [`tld`] labels items green, yellow or red from fat per serving and
//!   orders menus green first.
//! - [`parser`] crawls an HTML menu repository and extracts nutrition rows
//!   through header-driven column mapping.
//! - [`geo`] finds restaurants within walking distance of a position.
//! - [`store`] persists restaurants, menus, locations, tips and admin users.
//! - [`auth`] verifies admin credentials and tracks sessions.
//! - [`corpus`] generates fixture repositories with a ground-truth manifest.

pub mod auth;
pub mod corpus;
pub mod geo;
pub mod nutrition;
pub mod parser;
pub mod store;
pub mod tld;

pub use geo::GeoPoint;
pub use nutrition::{Nutrient, NutritionFacts};
pub use parser::{IngestReport, RawMenuRecord};
pub use store::{MenuItem, Restaurant, Store, StoreError};
pub use tld::{classify, order_menu, TrafficLightLabel};

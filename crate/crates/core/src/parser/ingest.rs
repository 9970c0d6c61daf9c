use std::fmt::Display;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use super::fetch::{FetchError, PageFetcher};
use super::links::extract_restaurant_links;
use super::table::parse_menu_table;
use super::RawMenuRecord;

/// Destination for parsed menus. A restaurant's records are written as a
/// unit: either all of them replace the previous menu or nothing changes.
pub trait MenuSink {
    type Error: Display;

    fn replace_menu(&self, restaurant_name: &str, records: &[RawMenuRecord]) -> Result<(), Self::Error>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestFailure {
    pub locator: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub restaurants_found: usize,
    pub restaurants_parsed: usize,
    pub items_extracted: usize,
    pub rows_skipped: usize,
    pub failures: Vec<IngestFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("menu repository root is unreachable: {0}")]
    RootUnreachable(#[source] FetchError),
}

/// Crawls a menu repository: fetch the index, discover restaurant pages,
/// then parse and store each page in turn.
///
/// Only an unreachable index aborts the run. A restaurant page that cannot
/// be fetched, has no usable menu table or cannot be stored is recorded in
/// [`IngestReport::failures`] and the crawl moves on.
pub fn ingest<F, S>(root: &Url, fetcher: &F, sink: &S) -> Result<IngestReport, IngestError>
where
    F: PageFetcher + ?Sized,
    S: MenuSink + ?Sized,
{
    let index = fetcher.fetch(root).map_err(IngestError::RootUnreachable)?;
    let links = extract_restaurant_links(&index, root);

    let mut report = IngestReport { restaurants_found: links.len(), ..Default::default() };

    for link in links {
        let fail = |reason: String| IngestFailure { locator: link.locator.to_string(), reason };

        let page = match fetcher.fetch(&link.locator) {
            Ok(page) => page,
            Err(e) => {
                report.failures.push(fail(format!("fetch failed: {}", e.reason)));
                continue;
            }
        };
        let menu = match parse_menu_table(&page, &link.name) {
            Ok(menu) => menu,
            Err(e) => {
                report.failures.push(fail(e.to_string()));
                continue;
            }
        };
        if let Err(e) = sink.replace_menu(&link.name, &menu.records) {
            report.failures.push(fail(format!("store failed: {e}")));
            continue;
        }
        report.restaurants_parsed += 1;
        report.items_extracted += menu.records.len();
        report.rows_skipped += menu.rows_skipped;
    }
    Ok(report)
}

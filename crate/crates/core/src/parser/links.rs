use scraper::{ElementRef, Html, Selector};
use serde::Serialize;
use url::Url;

use super::normalize_text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestaurantLink {
    pub name: String,
    pub locator: Url,
}

fn is_html_page(url: &Url) -> bool {
    let path = url.path().to_ascii_lowercase();
    path.ends_with(".html") || path.ends_with(".htm")
}

fn same_site(a: &Url, b: &Url) -> bool {
    a.scheme() == b.scheme() && a.host_str() == b.host_str() && a.port_or_known_default() == b.port_or_known_default()
}

fn in_page_chrome(anchor: ElementRef<'_>) -> bool {
    anchor
        .ancestors()
        .filter_map(ElementRef::wrap)
        .any(|el| matches!(el.value().name(), "nav" | "header" | "footer"))
}

fn name_from_path(url: &Url) -> String {
    let stem = url
        .path_segments()
        .and_then(|mut segments| segments.next_back())
        .unwrap_or("")
        .rsplit_once('.')
        .map(|(stem, _)| stem)
        .unwrap_or("");
    normalize_text(&stem.replace(['-', '_'], " "))
}

/// Finds the restaurant pages linked from a menu-repository index.
///
/// Only anchors in the main content are considered: inside `<main>` (or a
/// `role="main"` element) when the page has one, otherwise anywhere outside
/// `<nav>`, `<header>` and `<footer>`. A link qualifies when it resolves to an
/// `.html`/`.htm` page on the same site as `base` other than the index itself.
/// Results are in document order, one per distinct target.
pub fn extract_restaurant_links(index_html: &str, base: &Url) -> Vec<RestaurantLink> {
    let document = Html::parse_document(index_html);
    let anchor = Selector::parse("a[href]").unwrap();
    let main = Selector::parse("main, [role=main]").unwrap();

    let mut base_page = base.clone();
    base_page.set_fragment(None);

    let mains: Vec<ElementRef<'_>> = document.select(&main).collect();
    let anchors: Vec<ElementRef<'_>> = if mains.is_empty() {
        document.select(&anchor).filter(|a| !in_page_chrome(*a)).collect()
    } else {
        let mut seen = Vec::new();
        for region in mains {
            for a in region.select(&anchor) {
                if !seen.iter().any(|s: &ElementRef<'_>| s.id() == a.id()) {
                    seen.push(a);
                }
            }
        }
        seen
    };

    let mut links: Vec<RestaurantLink> = Vec::new();
    for a in anchors {
        let Some(href) = a.value().attr("href") else { continue };
        let Ok(mut target) = base.join(href.trim()) else { continue };
        target.set_fragment(None);
        if !same_site(&target, &base_page) || !is_html_page(&target) || target == base_page {
            continue;
        }
        if links.iter().any(|l| l.locator == target) {
            continue;
        }
        let mut name = normalize_text(&a.text().collect::<String>());
        if name.is_empty() {
            name = a.value().attr("title").map(normalize_text).unwrap_or_default();
        }
        if name.is_empty() {
            name = name_from_path(&target);
        }
        if name.is_empty() {
            continue;
        }
        links.push(RestaurantLink { name, locator: target });
    }
    links
}

use std::sync::LazyLock;

use regex::Regex;

// Optional thousands-grouped or plain integer part, optional fraction, then
// optional trailing unit text ("g", "mg", "kcal").
static QUANTITY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\d{1,3}(?:,\d{3})+|\d+)?(\.\d+)?\s*(?:[[:alpha:]µ]+\.?)?$").unwrap()
});

/// Reads a nutrient cell. Anything that is not a plain non-negative amount
/// (blank, dashes, "n/a", "<1", negative numbers) is absent, never zero.
pub fn parse_quantity(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    let caps = QUANTITY.captures(cell)?;
    let int = caps.get(1).map(|m| m.as_str().replace(',', ""));
    let frac = caps.get(2).map(|m| m.as_str());
    let number = match (int, frac) {
        (None, None) => return None,
        (Some(int), None) => int,
        (Some(int), Some(frac)) => format!("{int}{frac}"),
        (None, Some(frac)) => format!("0{frac}"),
    };
    number.parse::<f64>().ok().filter(|v| v.is_finite())
}

use scraper::{ElementRef, Html, Selector};

use crate::nutrition::NutritionFacts;

use super::columns::{map_columns, ColumnMap, FieldRole};
use super::numeric::parse_quantity;
use super::{normalize_text, ParseError, RawMenuRecord, DEFAULT_CATEGORY};

/// Records extracted from one restaurant page.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedMenu {
    pub columns: ColumnMap,
    pub records: Vec<RawMenuRecord>,
    /// Data rows dropped for lacking an item name or carrying impossible facts.
    pub rows_skipped: usize,
}

fn selector(css: &str) -> Selector {
    Selector::parse(css).expect("static selector")
}

/// Rows that belong to `table` itself, not to a table nested inside it.
fn own_rows<'a>(table: ElementRef<'a>, rows: &Selector) -> Vec<ElementRef<'a>> {
    table
        .select(rows)
        .filter(|row| {
            row.ancestors()
                .filter_map(ElementRef::wrap)
                .find(|el| el.value().name() == "table")
                .is_some_and(|owner| owner.id() == table.id())
        })
        .collect()
}

struct Cell {
    header: bool,
    text: String,
}

fn cells(row: ElementRef<'_>) -> Vec<Cell> {
    row.children()
        .filter_map(ElementRef::wrap)
        .filter_map(|el| match el.value().name() {
            "th" => Some(Cell { header: true, text: normalize_text(&el.text().collect::<String>()) }),
            "td" => Some(Cell { header: false, text: normalize_text(&el.text().collect::<String>()) }),
            _ => None,
        })
        .collect()
}

/// Extracts the menu from the first table whose header row yields a valid
/// column map. Column order does not matter; missing nutrient columns leave
/// the corresponding facts absent.
pub fn parse_menu_table(restaurant_html: &str, restaurant_name: &str) -> Result<ParsedMenu, ParseError> {
    let document = Html::parse_document(restaurant_html);
    let tables = selector("table");
    let rows = selector("tr");

    for table in document.select(&tables) {
        let rows = own_rows(table, &rows);
        let Some(header_at) = rows.iter().position(|row| {
            let cells = cells(*row);
            !cells.is_empty() && cells.iter().all(|c| c.header)
        }) else {
            continue;
        };
        let headers: Vec<String> = cells(rows[header_at]).into_iter().map(|c| c.text).collect();
        let Ok(columns) = map_columns(&headers) else {
            continue;
        };
        let (records, rows_skipped) = extract_rows(&rows[header_at + 1..], &columns, restaurant_name);
        return Ok(ParsedMenu { columns, records, rows_skipped });
    }
    Err(ParseError::NoMenuTable)
}

fn extract_rows(rows: &[ElementRef<'_>], columns: &ColumnMap, restaurant_name: &str) -> (Vec<RawMenuRecord>, usize) {
    let item_column = columns.item_name_column();
    let category_column = columns.column_of(FieldRole::FoodCategory);

    let mut records = Vec::new();
    let mut skipped = 0;
    let mut current_category: Option<String> = None;

    for row in rows {
        let cells = cells(*row);
        if !cells.iter().any(|c| !c.header) {
            continue;
        }
        let text = |i: usize| cells.get(i).map(|c| c.text.as_str()).unwrap_or("");

        if let Some(col) = category_column {
            if !text(col).is_empty() {
                current_category = Some(text(col).to_owned());
            }
        }

        let item_name = text(item_column);
        if item_name.is_empty() {
            skipped += 1;
            continue;
        }

        let mut facts = NutritionFacts::default();
        for (i, role) in columns.roles().iter().enumerate() {
            if let FieldRole::Nutrient(nutrient) = role {
                facts.set(*nutrient, parse_quantity(text(i)));
            }
        }
        if facts.validate().is_err() {
            skipped += 1;
            continue;
        }

        records.push(RawMenuRecord {
            restaurant_name: restaurant_name.to_owned(),
            food_category: current_category.clone().unwrap_or_else(|| DEFAULT_CATEGORY.to_owned()),
            item_name: item_name.to_owned(),
            facts,
        });
    }
    (records, skipped)
}

//! Header-driven column mapping.
//!
//! Menu tables from different restaurants list their nutrient columns in
//! different orders and under different names, and some omit columns. Each
//! table's header row is mapped onto field roles through a fixed synonym
//! table before any data row is read.

use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::nutrition::Nutrient;

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRole {
    FoodCategory,
    ItemName,
    Nutrient(Nutrient),
    Ignored,
}

const SYNONYMS: &[(FieldRole, &[&str])] = &[
    (FieldRole::ItemName, &["menu item", "item", "food", "food item"]),
    (FieldRole::FoodCategory, &["food category", "category"]),
    (FieldRole::Nutrient(Nutrient::Calories), &["calories", "cal", "kcal"]),
    (FieldRole::Nutrient(Nutrient::TotalFat), &["total fat", "fat"]),
    (
        FieldRole::Nutrient(Nutrient::SaturatedFat),
        &["saturated fat", "sat fat", "sat. fat"],
    ),
    (
        FieldRole::Nutrient(Nutrient::DietaryFiber),
        &["dietary fiber", "fiber", "fibre"],
    ),
    (FieldRole::Nutrient(Nutrient::Protein), &["protein"]),
    (
        FieldRole::Nutrient(Nutrient::Carbohydrates),
        &["carbohydrates", "carbs", "total carbohydrate"],
    ),
    (FieldRole::Nutrient(Nutrient::Sodium), &["sodium"]),
];

static PARENTHESIZED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\([^)]*\)").unwrap());

/// Lowercases, drops parenthesized unit text and collapses whitespace.
pub fn normalize_header(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let stripped = PARENTHESIZED.replace_all(&lowered, " ");
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn lookup(normalized: &str) -> FieldRole {
    SYNONYMS
        .iter()
        .find(|(_, names)| names.contains(&normalized))
        .map(|(role, _)| *role)
        .unwrap_or(FieldRole::Ignored)
}

/// Assignment of each zero-based column index to a field role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnMap {
    roles: Vec<FieldRole>,
}

impl ColumnMap {
    pub fn roles(&self) -> &[FieldRole] {
        &self.roles
    }

    pub fn role(&self, column: usize) -> FieldRole {
        self.roles.get(column).copied().unwrap_or(FieldRole::Ignored)
    }

    pub fn column_of(&self, role: FieldRole) -> Option<usize> {
        if role == FieldRole::Ignored {
            return None;
        }
        self.roles.iter().position(|r| *r == role)
    }

    pub fn item_name_column(&self) -> usize {
        self.column_of(FieldRole::ItemName)
            .expect("a ColumnMap always has an item-name column")
    }
}

/// Maps header cells to roles. A role claimed by an earlier column is not
/// assigned again; later duplicates are ignored.
pub fn map_columns<S: AsRef<str>>(header_cells: &[S]) -> Result<ColumnMap, ParseError> {
    let mut roles = Vec::with_capacity(header_cells.len());
    for cell in header_cells {
        let role = lookup(&normalize_header(cell.as_ref()));
        if role != FieldRole::Ignored && roles.contains(&role) {
            roles.push(FieldRole::Ignored);
        } else {
            roles.push(role);
        }
    }
    if !roles.contains(&FieldRole::ItemName) {
        return Err(ParseError::NoItemNameColumn);
    }
    Ok(ColumnMap { roles })
}

//! Deterministic menu-repository fixtures.
//!
//! [`generate`] builds an index page, one HTML page per restaurant and a
//! [`Manifest`] describing every record the pages encode. The manifest is
//! produced from the generator's own data model, never by parsing the HTML,
//! so it can serve as ground truth for the parser and for anything reading
//! the store after an ingest.
//!
//! The pages deliberately vary: column order, header spelling and units,
//! missing nutrient columns, blank category cells that must be inherited,
//! thousands separators, dash placeholders, decoy tables, spacer rows and
//! rows whose facts are impossible.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::nutrition::{Nutrient, NutritionFacts};

pub const INDEX_FILE: &str = "index.html";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const LOCATIONS_FILE: &str = "locations.txt";
pub const TIPS_FILE: &str = "tips.txt";

/// Center of the generated location cluster (Tucson, AZ).
pub const CLUSTER_CENTER: (f64, f64) = (32.2319, -110.9501);

const PREFIXES: &[&str] = &[
    "Burger", "Taco", "Bagel", "Pizza", "Salad", "Wrap", "Noodle", "Chicken", "Sandwich", "Grill",
    "Donut", "Sub", "Falafel", "Curry", "Waffle",
];
const SUFFIXES: &[&str] = &[
    "Barn", "Town", "Shack", "Express", "Palace", "Corner", "Stop", "Hut", "Depot", "House",
];
const CATEGORIES: &[&str] = &[
    "Burgers", "Bagels", "Salads", "Sandwiches", "Pizza", "Desserts", "Breakfast", "Sides", "Beverages", "Wraps",
];
const ADJECTIVES: &[&str] = &[
    "Classic", "Spicy", "Grilled", "Crispy", "Double", "Veggie", "Chef's", "Smoky", "Garden", "Deluxe", "Mini",
    "Everything", "Honey", "Mac &", "Southwest",
];
const NOUNS: &[&str] = &[
    "Bagel", "Burger", "Wrap", "Salad", "Melt", "Sandwich", "Slice", "Cookie", "Shake", "Fries", "Muffin",
    "Bowl", "Taco", "Cheese", "Parfait",
];

const TIPS: &str = "\
# scope | label | text
* | red | Split the item with a friend or save half for later.
* | yellow | Choose water or unsweetened tea as your drink.
Burgers | red | Order a single patty and skip the cheese and mayo.
Burgers | yellow | Add lettuce and tomato instead of bacon.
Salads | red | Ask for dressing on the side and skip the crispy toppings.
Sides | red | Swap fries for a side salad or fruit cup.
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Category,
    Item,
    Nutrient(Nutrient),
}

/// One menu table as it will be rendered: a header row and data rows of
/// cell text, column-aligned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureTable {
    pub kinds: Vec<ColumnKind>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Render an unrelated legend table ahead of the menu table.
    pub decoy_table: bool,
}

impl FixtureTable {
    /// The same table with column `i` moved to position `order[i]`'s slot:
    /// output column `j` is input column `order[j]`.
    pub fn permuted(&self, order: &[usize]) -> FixtureTable {
        assert_eq!(order.len(), self.headers.len());
        FixtureTable {
            kinds: order.iter().map(|&i| self.kinds[i]).collect(),
            headers: order.iter().map(|&i| self.headers[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|row| order.iter().map(|&i| row[i].clone()).collect())
                .collect(),
            decoy_table: self.decoy_table,
        }
    }

    /// The same table without column `column`.
    pub fn without_column(&self, column: usize) -> FixtureTable {
        let order: Vec<usize> = (0..self.headers.len()).filter(|&i| i != column).collect();
        FixtureTable {
            kinds: order.iter().map(|&i| self.kinds[i]).collect(),
            headers: order.iter().map(|&i| self.headers[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|row| order.iter().map(|&i| row[i].clone()).collect())
                .collect(),
            decoy_table: self.decoy_table,
        }
    }

    pub fn to_page(&self, title: &str) -> String {
        let mut html = String::new();
        html.push_str("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>");
        html.push_str(&escape(title));
        html.push_str(" nutrition</title></head>\n<body>\n");
        html.push_str("<header><nav><a href=\"../index.html\">All restaurants</a></nav></header>\n<main>\n");
        html.push_str(&format!("<h1>{}</h1>\n", escape(title)));
        if self.decoy_table {
            html.push_str(
                "<table class=\"legend\">\n<tr><th>Symbol</th><th>Meaning</th></tr>\n\
                 <tr><td>*</td><td>Limited time</td></tr>\n</table>\n",
            );
        }
        html.push_str("<table class=\"nutrition\">\n<thead>\n<tr>");
        for header in &self.headers {
            html.push_str(&format!("<th>{}</th>", escape(header)));
        }
        html.push_str("</tr>\n</thead>\n<tbody>\n");
        for row in &self.rows {
            html.push_str("<tr>");
            for cell in row {
                html.push_str(&format!("<td>{}</td>", escape(cell)));
            }
            html.push_str("</tr>\n");
        }
        html.push_str("</tbody>\n</table>\n</main>\n</body></html>\n");
        html
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub food_category: String,
    pub item_name: String,
    pub facts: NutritionFacts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRestaurant {
    pub name: String,
    /// Path of the page relative to the corpus directory.
    pub file: String,
    pub columns: Vec<ColumnKind>,
    pub records: Vec<ManifestRecord>,
    /// Rows present in the table that must not produce a record.
    pub malformed_rows: usize,
    pub locations: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub restaurants: Vec<ManifestRestaurant>,
}

impl Manifest {
    pub fn total_records(&self) -> usize {
        self.restaurants.iter().map(|r| r.records.len()).sum()
    }

    pub fn total_malformed_rows(&self) -> usize {
        self.restaurants.iter().map(|r| r.malformed_rows).sum()
    }

    /// Distinct category names, sorted case-insensitively.
    pub fn categories(&self) -> Vec<String> {
        let set: BTreeSet<(String, String)> = self
            .restaurants
            .iter()
            .flat_map(|r| r.records.iter())
            .map(|rec| (rec.food_category.to_lowercase(), rec.food_category.clone()))
            .collect();
        set.into_iter().map(|(_, c)| c).collect()
    }

    /// Names of restaurants with an item in `category`, sorted case-insensitively.
    pub fn restaurants_in_category(&self, category: &str) -> Vec<String> {
        let mut names: Vec<String> = self
            .restaurants
            .iter()
            .filter(|r| r.records.iter().any(|rec| rec.food_category.eq_ignore_ascii_case(category)))
            .map(|r| r.name.clone())
            .collect();
        names.sort_by_key(|n| n.to_lowercase());
        names
    }

    pub fn restaurant(&self, name: &str) -> Option<&ManifestRestaurant> {
        self.restaurants.iter().find(|r| r.name.eq_ignore_ascii_case(name))
    }

    pub fn load(dir: &Path) -> io::Result<Manifest> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(io::Error::other)
    }
}

#[derive(Debug, Clone)]
pub struct CorpusPage {
    pub file: String,
    pub table: FixtureTable,
    pub html: String,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub index_html: String,
    pub pages: Vec<CorpusPage>,
    pub manifest: Manifest,
    pub locations_text: String,
    pub tips_text: String,
}

impl Corpus {
    /// Writes the corpus under `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(INDEX_FILE), &self.index_html)?;
        for page in &self.pages {
            let path = dir.join(&page.file);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, &page.html)?;
        }
        let manifest = serde_json::to_string_pretty(&self.manifest).map_err(io::Error::other)?;
        fs::write(dir.join(MANIFEST_FILE), manifest)?;
        fs::write(dir.join(LOCATIONS_FILE), &self.locations_text)?;
        fs::write(dir.join(TIPS_FILE), &self.tips_text)?;
        Ok(())
    }
}

pub fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn slug(name: &str) -> String {
    name.to_lowercase()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect()
}

fn restaurant_names(rng: &mut ChaCha8Rng, count: usize) -> Vec<String> {
    let mut all: Vec<String> = PREFIXES
        .iter()
        .flat_map(|p| SUFFIXES.iter().map(move |s| format!("{p} {s}")))
        .collect();
    all.shuffle(rng);
    assert!(count <= all.len(), "at most {} restaurants", all.len());
    all.truncate(count);
    all
}

fn header_for(kind: ColumnKind, rng: &mut ChaCha8Rng) -> String {
    let (names, unit): (&[&str], &str) = match kind {
        ColumnKind::Category => (&["Food Category", "Category"], ""),
        ColumnKind::Item => (&["Menu Item", "Item", "Food", "Food Item"], ""),
        ColumnKind::Nutrient(n) => match n {
            Nutrient::Calories => (&["Calories", "Cal", "kcal"], ""),
            Nutrient::TotalFat => (&["Total Fat", "Fat"], "g"),
            Nutrient::SaturatedFat => (&["Saturated Fat", "Sat Fat", "Sat. Fat"], "g"),
            Nutrient::DietaryFiber => (&["Dietary Fiber", "Fiber", "Fibre"], "g"),
            Nutrient::Protein => (&["Protein"], "g"),
            Nutrient::Carbohydrates => (&["Carbohydrates", "Carbs", "Total Carbohydrate"], "g"),
            Nutrient::Sodium => (&["Sodium"], "mg"),
        },
    };
    let mut header = (*names.choose(rng).unwrap()).to_owned();
    if rng.random_bool(0.3) {
        header = header.to_uppercase();
    }
    if !unit.is_empty() && rng.random_bool(0.6) {
        header = format!("{header} ({unit})");
    }
    header
}

fn tenths(rng: &mut ChaCha8Rng, max_tenths: u32) -> f64 {
    rng.random_range(0..=max_tenths) as f64 / 10.0
}

fn random_facts(rng: &mut ChaCha8Rng, present: &[Nutrient]) -> NutritionFacts {
    let mut facts = NutritionFacts::default();
    for &n in present {
        if rng.random_bool(0.08) {
            continue;
        }
        let value = match n {
            Nutrient::Calories => rng.random_range(0..=1500u32) as f64,
            Nutrient::TotalFat => match rng.random_range(0..10) {
                0 => 2.0,
                1 => 5.0,
                _ => tenths(rng, 400),
            },
            Nutrient::SaturatedFat => tenths(rng, 150),
            Nutrient::DietaryFiber => tenths(rng, 120),
            Nutrient::Protein => tenths(rng, 600),
            Nutrient::Carbohydrates => tenths(rng, 1200),
            Nutrient::Sodium => rng.random_range(0..=3200u32) as f64,
        };
        facts.set(n, Some(value));
    }
    if let (Some(sat), Some(total)) = (facts.saturated_fat, facts.total_fat) {
        if sat > total {
            // Keep tenths resolution so rendering is exact.
            facts.saturated_fat = Some((total * 10.0 * rng.random_range(0.0..=1.0)).floor() / 10.0);
        }
    }
    facts
}

fn render_value(rng: &mut ChaCha8Rng, nutrient: Nutrient, value: Option<f64>) -> String {
    let Some(v) = value else {
        return ["", "—", "-", "n/a"].choose(rng).unwrap().to_string();
    };
    let number = if v >= 1000.0 && v.fract() == 0.0 && rng.random_bool(0.7) {
        let whole = v as u64;
        format!("{},{:03}", whole / 1000, whole % 1000)
    } else {
        format!("{v}")
    };
    let unit = match nutrient {
        Nutrient::Calories => "kcal",
        Nutrient::Sodium => "mg",
        _ => "g",
    };
    match rng.random_range(0..4) {
        0 => format!("{number} {unit}"),
        1 if unit != "kcal" => format!("{number}{unit}"),
        _ => number,
    }
}

/// Nutrient columns dropped by the pages that test missing-column tolerance.
const SPARSE_LAYOUTS: &[&[Nutrient]] = &[
    &[Nutrient::Sodium, Nutrient::DietaryFiber],
    &[Nutrient::SaturatedFat, Nutrient::Protein, Nutrient::Carbohydrates],
    &[Nutrient::TotalFat],
];

/// Generates a corpus of `restaurants` pages from `seed`.
///
/// With ten or more restaurants the corpus always contains at least three
/// distinct column orders and at least three pages with missing nutrient
/// columns (one of them without a fat column at all).
pub fn generate(restaurants: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = restaurant_names(&mut rng, restaurants);

    let mut pages = Vec::new();
    let mut manifest_restaurants = Vec::new();

    for (index, name) in names.iter().enumerate() {
        let dropped: &[Nutrient] = match index % 5 {
            3 => SPARSE_LAYOUTS[(index / 5) % SPARSE_LAYOUTS.len()],
            4 if index % 10 == 9 => SPARSE_LAYOUTS[2],
            _ => &[],
        };
        let nutrients: Vec<Nutrient> = Nutrient::ALL.iter().copied().filter(|n| !dropped.contains(n)).collect();
        let has_category = index % 7 != 6;

        let mut kinds: Vec<ColumnKind> = Vec::new();
        if has_category {
            kinds.push(ColumnKind::Category);
        }
        kinds.push(ColumnKind::Item);
        kinds.extend(nutrients.iter().map(|&n| ColumnKind::Nutrient(n)));
        match index % 3 {
            0 => {}
            1 => kinds.reverse(),
            _ => kinds.shuffle(&mut rng),
        }
        let headers: Vec<String> = kinds.iter().map(|&k| header_for(k, &mut rng)).collect();
        let column = |kind: ColumnKind| kinds.iter().position(|&k| k == kind);

        let mut categories: Vec<&str> = CATEGORIES.to_vec();
        categories.shuffle(&mut rng);
        let category_count = rng.random_range(2..=4);
        let mut chosen: Vec<&str> = categories[..category_count].to_vec();
        if index % 2 == 0 && !chosen.contains(&"Burgers") {
            chosen[0] = "Burgers";
        }

        let inherit = index % 2 == 1;
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut records = Vec::new();
        let mut malformed_rows = 0;
        let mut used = BTreeSet::new();

        for category in chosen.iter().copied() {
            let label = if has_category { category.to_owned() } else { crate::parser::DEFAULT_CATEGORY.to_owned() };
            let item_count = rng.random_range(2..=6);
            for item_no in 0..item_count {
                let item_name = loop {
                    let candidate = format!("{} {}", ADJECTIVES.choose(&mut rng).unwrap(), NOUNS.choose(&mut rng).unwrap());
                    if used.insert((label.clone(), candidate.clone())) {
                        break candidate;
                    }
                };
                let facts = random_facts(&mut rng, &nutrients);
                let mut row = vec![String::new(); kinds.len()];
                if let Some(c) = column(ColumnKind::Category) {
                    if item_no == 0 || !inherit {
                        row[c] = category.to_owned();
                    }
                }
                row[column(ColumnKind::Item).unwrap()] = item_name.clone();
                for &n in &nutrients {
                    row[column(ColumnKind::Nutrient(n)).unwrap()] = render_value(&mut rng, n, facts.get(n));
                }
                rows.push(row);
                records.push(ManifestRecord { food_category: label.clone(), item_name, facts });
            }
            // Spacer row: no item name, must be skipped.
            if rng.random_bool(0.3) {
                rows.push(vec![String::new(); kinds.len()]);
                malformed_rows += 1;
            }
        }

        // Saturated fat above total fat cannot be right; the row is dropped.
        if let (Some(total), Some(sat)) = (
            column(ColumnKind::Nutrient(Nutrient::TotalFat)),
            column(ColumnKind::Nutrient(Nutrient::SaturatedFat)),
        ) {
            if index % 4 == 2 {
                let mut row = vec![String::new(); kinds.len()];
                row[column(ColumnKind::Item).unwrap()] = "Mystery Special".into();
                row[total] = "1".into();
                row[sat] = "4".into();
                if let Some(c) = column(ColumnKind::Category) {
                    row[c] = chosen[0].to_owned();
                }
                rows.push(row);
                malformed_rows += 1;
            }
        }

        let table = FixtureTable { kinds: kinds.clone(), headers, rows, decoy_table: index % 3 == 2 };
        let file = format!("menus/{}.html", slug(name));
        let html = table.to_page(name);

        let (lat0, lon0) = CLUSTER_CENTER;
        let location_count = if index % 6 == 5 { 2 } else { 1 };
        let locations = (0..location_count)
            .map(|_| {
                // Roughly +-2.2 km around the center, rounded to 1e-6 degree.
                let lat = lat0 + rng.random_range(-0.02..0.02);
                let lon = lon0 + rng.random_range(-0.024..0.024);
                ((lat * 1e6).round() / 1e6, (lon * 1e6).round() / 1e6)
            })
            .collect();

        pages.push(CorpusPage { file: file.clone(), table, html });
        manifest_restaurants.push(ManifestRestaurant {
            name: name.clone(),
            file,
            columns: kinds,
            records,
            malformed_rows,
            locations,
        });
    }

    let index_html = render_index(&manifest_restaurants);
    let locations_text = render_locations(&manifest_restaurants);
    Corpus {
        index_html,
        pages,
        manifest: Manifest { seed, restaurants: manifest_restaurants },
        locations_text,
        tips_text: TIPS.to_owned(),
    }
}

fn render_index(restaurants: &[ManifestRestaurant]) -> String {
    let mut html = String::from(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Restaurant nutrition</title></head>\n<body>\n\
         <header><nav><a href=\"about.html\">About</a> <a href=\"index.html\">Home</a></nav></header>\n\
         <main>\n<h1>Restaurant nutrition facts</h1>\n<ul>\n",
    );
    for r in restaurants {
        html.push_str(&format!("<li><a href=\"{}\">{}</a></li>\n", r.file, escape(&r.name)));
    }
    if let Some(first) = restaurants.first() {
        // Same target again, and links that are not restaurant pages.
        html.push_str(&format!("<li><a href=\"./{}#menu\">{} (again)</a></li>\n", first.file, escape(&first.name)));
    }
    html.push_str(
        "<li><a href=\"http://elsewhere.example/menus/other.html\">Elsewhere</a></li>\n\
         <li><a href=\"downloads/all-menus.pdf\">Printable PDF</a></li>\n\
         <li><a href=\"#top\">Back to top</a></li>\n</ul>\n</main>\n\
         <footer><a href=\"contact.html\">Contact</a></footer>\n</body></html>\n",
    );
    html
}

fn render_locations(restaurants: &[ManifestRestaurant]) -> String {
    let mut text = String::from("# restaurant | lat,lon ; lat,lon ...\n");
    for r in restaurants {
        let coords: Vec<String> = r.locations.iter().map(|(lat, lon)| format!("{lat},{lon}")).collect();
        text.push_str(&format!("{} | {}\n", r.name, coords.join(" ; ")));
    }
    text
}

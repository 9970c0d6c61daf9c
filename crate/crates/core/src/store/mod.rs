//! SQLite-backed storage for restaurants, menus, locations, tips and admin
//! users.
//!
//! Writes go through a single connection behind a mutex, one transaction per
//! operation. Reads use a pool of read-only connections; in WAL mode they
//! never block on, or observe part of, an in-flight write.

mod seed;

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rusqlite::{params, Connection, OpenFlags, OptionalExtension, Row, Transaction};
use serde::Serialize;
use thiserror::Error;

use crate::auth::hash_credential;
use crate::geo::GeoPoint;
use crate::nutrition::NutritionFacts;
use crate::parser::{MenuSink, RawMenuRecord};
use crate::tld::{classify, Labelled, TrafficLightLabel};

pub use seed::{parse_locations, parse_tips, LocationEntry, SeedError, TipEntry};

/// Tip scope that applies to every food category.
pub const GLOBAL_SCOPE: &str = "*";

const SCHEMA: &str = r#"
CREATE TABLE IF NOT EXISTS restaurants (
    id    INTEGER PRIMARY KEY,
    name  TEXT NOT NULL UNIQUE COLLATE NOCASE CHECK (length(name) > 0)
);
CREATE TABLE IF NOT EXISTS locations (
    restaurant_id INTEGER NOT NULL REFERENCES restaurants(id) ON DELETE CASCADE,
    latitude      REAL NOT NULL,
    longitude     REAL NOT NULL
);
CREATE INDEX IF NOT EXISTS locations_restaurant ON locations(restaurant_id);
CREATE TABLE IF NOT EXISTS menu_items (
    id            INTEGER PRIMARY KEY,
    restaurant_id INTEGER NOT NULL REFERENCES restaurants(id) ON DELETE CASCADE,
    food_category TEXT NOT NULL,
    name          TEXT NOT NULL CHECK (length(name) > 0),
    calories      REAL,
    total_fat     REAL,
    saturated_fat REAL,
    dietary_fiber REAL,
    protein       REAL,
    carbohydrates REAL,
    sodium        REAL,
    label         TEXT NOT NULL,
    UNIQUE (restaurant_id, food_category, name)
);
CREATE INDEX IF NOT EXISTS menu_items_category ON menu_items(food_category COLLATE NOCASE);
CREATE TABLE IF NOT EXISTS tips (
    id     INTEGER PRIMARY KEY,
    scope  TEXT NOT NULL COLLATE NOCASE,
    label  TEXT NOT NULL,
    text   TEXT NOT NULL CHECK (length(text) > 0),
    UNIQUE (scope, label, text)
);
CREATE TABLE IF NOT EXISTS admin_users (
    username        TEXT PRIMARY KEY,
    credential_hash TEXT NOT NULL
);
"#;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("database error: {0}")]
    Sqlite(#[from] rusqlite::Error),
    #[error("{0} not found")]
    NotFound(String),
    #[error("invalid data: {0}")]
    Invalid(String),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Restaurant {
    pub id: i64,
    pub name: String,
    pub locations: Vec<GeoPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MenuItem {
    pub id: i64,
    pub restaurant_id: i64,
    pub food_category: String,
    pub name: String,
    pub facts: NutritionFacts,
    pub label: TrafficLightLabel,
}

impl Labelled for MenuItem {
    fn label(&self) -> TrafficLightLabel {
        self.label
    }

    fn display_name(&self) -> &str {
        &self.name
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tip {
    pub id: i64,
    pub scope: String,
    pub label: TrafficLightLabel,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RestaurantRef {
    Id(i64),
    Name(String),
}

impl From<&str> for RestaurantRef {
    fn from(name: &str) -> Self {
        RestaurantRef::Name(name.to_owned())
    }
}

impl From<i64> for RestaurantRef {
    fn from(id: i64) -> Self {
        RestaurantRef::Id(id)
    }
}

pub struct Store {
    path: PathBuf,
    writer: Mutex<Connection>,
    readers: Mutex<Vec<Connection>>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("path", &self.path).finish_non_exhaustive()
    }
}

fn configure(conn: &Connection) -> rusqlite::Result<()> {
    conn.busy_timeout(std::time::Duration::from_secs(10))?;
    conn.pragma_update(None, "foreign_keys", true)?;
    Ok(())
}

fn parse_label(raw: String) -> rusqlite::Result<TrafficLightLabel> {
    raw.parse()
        .map_err(|e| rusqlite::Error::FromSqlConversionFailure(0, rusqlite::types::Type::Text, Box::new(e)))
}

fn menu_item_from_row(row: &Row<'_>) -> rusqlite::Result<MenuItem> {
    Ok(MenuItem {
        id: row.get(0)?,
        restaurant_id: row.get(1)?,
        food_category: row.get(2)?,
        name: row.get(3)?,
        facts: NutritionFacts {
            calories: row.get(4)?,
            total_fat: row.get(5)?,
            saturated_fat: row.get(6)?,
            dietary_fiber: row.get(7)?,
            protein: row.get(8)?,
            carbohydrates: row.get(9)?,
            sodium: row.get(10)?,
        },
        label: parse_label(row.get(11)?)?,
    })
}

const ITEM_COLUMNS: &str = "id, restaurant_id, food_category, name, calories, total_fat, saturated_fat, \
     dietary_fiber, protein, carbohydrates, sodium, label";

fn find_restaurant_id(conn: &Connection, name: &str) -> rusqlite::Result<Option<i64>> {
    conn.query_row("SELECT id FROM restaurants WHERE name = ?1", [name], |r| r.get(0))
        .optional()
}

fn find_or_create_restaurant(tx: &Transaction<'_>, name: &str) -> Result<i64> {
    let name = name.trim();
    if name.is_empty() {
        return Err(StoreError::Invalid("restaurant name is empty".into()));
    }
    if let Some(id) = find_restaurant_id(tx, name)? {
        return Ok(id);
    }
    tx.execute("INSERT INTO restaurants (name) VALUES (?1)", [name])?;
    Ok(tx.last_insert_rowid())
}

fn load_restaurant(conn: &Connection, reference: &RestaurantRef) -> Result<Restaurant> {
    let row = match reference {
        RestaurantRef::Id(id) => conn
            .query_row("SELECT id, name FROM restaurants WHERE id = ?1", [id], |r| {
                Ok((r.get::<_, i64>(0)?, r.get::<_, String>(1)?))
            })
            .optional()?,
        RestaurantRef::Name(name) => conn
            .query_row("SELECT id, name FROM restaurants WHERE name = ?1", [name.trim()], |r| {
                Ok((r.get(0)?, r.get(1)?))
            })
            .optional()?,
    };
    let Some((id, name)) = row else {
        let what = match reference {
            RestaurantRef::Id(id) => format!("restaurant #{id}"),
            RestaurantRef::Name(name) => format!("restaurant {name:?}"),
        };
        return Err(StoreError::NotFound(what));
    };
    let locations = load_locations(conn, id)?;
    Ok(Restaurant { id, name, locations })
}

fn load_locations(conn: &Connection, restaurant_id: i64) -> Result<Vec<GeoPoint>> {
    let mut stmt = conn.prepare_cached(
        "SELECT latitude, longitude FROM locations WHERE restaurant_id = ?1 ORDER BY rowid",
    )?;
    let rows = stmt.query_map([restaurant_id], |r| Ok((r.get::<_, f64>(0)?, r.get::<_, f64>(1)?)))?;
    let mut points = Vec::new();
    for row in rows {
        let (lat, lon) = row?;
        points.push(GeoPoint::new(lat, lon).map_err(|e| StoreError::Invalid(e.to_string()))?);
    }
    Ok(points)
}

fn validate_record(record: &RawMenuRecord) -> Result<TrafficLightLabel> {
    if record.item_name.trim().is_empty() {
        return Err(StoreError::Invalid("menu item with empty name".into()));
    }
    record
        .facts
        .validate()
        .map_err(|e| StoreError::Invalid(format!("{}: {e}", record.item_name)))?;
    classify(record.facts.total_fat).map_err(|e| StoreError::Invalid(e.to_string()))
}

impl Store {
    /// Opens or creates the store file at `path`.
    pub fn open(path: impl AsRef<Path>) -> Result<Store> {
        let path = path.as_ref().to_path_buf();
        let writer = Connection::open(&path)?;
        configure(&writer)?;
        writer.pragma_update(None, "journal_mode", "WAL")?;
        writer.pragma_update(None, "synchronous", "NORMAL")?;
        writer.execute_batch(SCHEMA)?;
        Ok(Store { path, writer: Mutex::new(writer), readers: Mutex::new(Vec::new()) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn read<T>(&self, f: impl FnOnce(&Connection) -> Result<T>) -> Result<T> {
        let pooled = self.readers.lock().unwrap().pop();
        let conn = match pooled {
            Some(conn) => conn,
            None => {
                let conn = Connection::open_with_flags(
                    &self.path,
                    OpenFlags::SQLITE_OPEN_READ_ONLY | OpenFlags::SQLITE_OPEN_NO_MUTEX,
                )?;
                configure(&conn)?;
                conn
            }
        };
        // One snapshot for the whole closure.
        conn.execute_batch("BEGIN")?;
        let out = f(&conn);
        let end = conn.execute_batch(if out.is_ok() { "COMMIT" } else { "ROLLBACK" });
        if end.is_ok() && conn.is_autocommit() {
            self.readers.lock().unwrap().push(conn);
        }
        let out = out?;
        end?;
        Ok(out)
    }

    fn write<T>(&self, f: impl FnOnce(&Transaction<'_>) -> Result<T>) -> Result<T> {
        let mut conn = self.writer.lock().unwrap();
        let tx = conn.transaction()?;
        let out = f(&tx)?;
        tx.commit()?;
        Ok(out)
    }

    /// Replaces a restaurant's whole menu in one transaction, creating the
    /// restaurant if needed. Labels are computed from total fat. On any
    /// error the previous menu is left untouched.
    pub fn replace_restaurant_menu(&self, restaurant_name: &str, records: &[RawMenuRecord]) -> Result<Restaurant> {
        self.write(|tx| {
            let id = find_or_create_restaurant(tx, restaurant_name)?;
            tx.execute("DELETE FROM menu_items WHERE restaurant_id = ?1", [id])?;
            let mut insert = tx.prepare_cached(
                "INSERT INTO menu_items (restaurant_id, food_category, name, calories, total_fat, \
                 saturated_fat, dietary_fiber, protein, carbohydrates, sodium, label) \
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)",
            )?;
            for record in records {
                let label = validate_record(record)?;
                let f = &record.facts;
                insert
                    .execute(params![
                        id,
                        record.food_category.trim(),
                        record.item_name.trim(),
                        f.calories,
                        f.total_fat,
                        f.saturated_fat,
                        f.dietary_fiber,
                        f.protein,
                        f.carbohydrates,
                        f.sodium,
                        label.as_str(),
                    ])
                    .map_err(|e| match e {
                        rusqlite::Error::SqliteFailure(err, _)
                            if err.code == rusqlite::ErrorCode::ConstraintViolation =>
                        {
                            StoreError::Invalid(format!(
                                "duplicate item {:?} in category {:?}",
                                record.item_name, record.food_category
                            ))
                        }
                        other => other.into(),
                    })?;
            }
            load_restaurant(tx, &RestaurantRef::Id(id))
        })
    }

    /// Distinct category names, compared case-insensitively, sorted.
    pub fn list_categories(&self) -> Result<Vec<String>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached(
                "SELECT MIN(food_category) FROM menu_items \
                 GROUP BY food_category COLLATE NOCASE ORDER BY food_category COLLATE NOCASE",
            )?;
            let rows = stmt.query_map([], |r| r.get(0))?;
            Ok(rows.collect::<rusqlite::Result<Vec<String>>>()?)
        })
    }

    /// Restaurants with at least one item in `category`, sorted by name.
    pub fn restaurants_by_category(&self, category: &str) -> Result<Vec<Restaurant>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached(
                "SELECT r.id FROM restaurants r WHERE EXISTS (\
                   SELECT 1 FROM menu_items m WHERE m.restaurant_id = r.id \
                   AND m.food_category = ?1 COLLATE NOCASE) \
                 ORDER BY r.name COLLATE NOCASE",
            )?;
            let ids = stmt
                .query_map([category.trim()], |r| r.get::<_, i64>(0))?
                .collect::<rusqlite::Result<Vec<_>>>()?;
            ids.into_iter().map(|id| load_restaurant(conn, &RestaurantRef::Id(id))).collect()
        })
    }

    pub fn restaurant(&self, reference: impl Into<RestaurantRef>) -> Result<Restaurant> {
        let reference = reference.into();
        self.read(|conn| load_restaurant(conn, &reference))
    }

    pub fn list_restaurants(&self) -> Result<Vec<Restaurant>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached("SELECT id FROM restaurants ORDER BY name COLLATE NOCASE")?;
            let ids = stmt
                .query_map([], |r| r.get::<_, i64>(0))?
                .collect::<rusqlite::Result<Vec<_>>>()?;
            ids.into_iter().map(|id| load_restaurant(conn, &RestaurantRef::Id(id))).collect()
        })
    }

    /// The restaurant's menu, green first.
    pub fn menu_for_restaurant(&self, reference: impl Into<RestaurantRef>) -> Result<Vec<MenuItem>> {
        let reference = reference.into();
        let items = self.read(|conn| {
            let restaurant = load_restaurant(conn, &reference)?;
            let mut stmt = conn.prepare_cached(&format!(
                "SELECT {ITEM_COLUMNS} FROM menu_items WHERE restaurant_id = ?1 ORDER BY id"
            ))?;
            let items = stmt
                .query_map([restaurant.id], menu_item_from_row)?
                .collect::<rusqlite::Result<Vec<_>>>()?;
            Ok(items)
        })?;
        Ok(crate::tld::order_menu(items))
    }

    /// Every stored location, keyed by restaurant name.
    pub fn all_locations(&self) -> Result<Vec<(String, GeoPoint)>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached(
                "SELECT r.name, l.latitude, l.longitude FROM locations l \
                 JOIN restaurants r ON r.id = l.restaurant_id ORDER BY l.rowid",
            )?;
            let rows = stmt.query_map([], |r| {
                Ok((r.get::<_, String>(0)?, r.get::<_, f64>(1)?, r.get::<_, f64>(2)?))
            })?;
            let mut out = Vec::new();
            for row in rows {
                let (name, lat, lon) = row?;
                let point = GeoPoint::new(lat, lon).map_err(|e| StoreError::Invalid(e.to_string()))?;
                out.push((name, point));
            }
            Ok(out)
        })
    }

    /// Replaces the locations of each listed restaurant, creating restaurants
    /// that do not exist yet. All entries are applied in one transaction.
    pub fn seed_locations(&self, entries: &[LocationEntry]) -> Result<usize> {
        self.write(|tx| {
            for entry in entries {
                let id = find_or_create_restaurant(tx, &entry.restaurant_name)?;
                tx.execute("DELETE FROM locations WHERE restaurant_id = ?1", [id])?;
                let mut insert = tx.prepare_cached(
                    "INSERT INTO locations (restaurant_id, latitude, longitude) VALUES (?1, ?2, ?3)",
                )?;
                for point in &entry.locations {
                    insert.execute(params![id, point.latitude(), point.longitude()])?;
                }
            }
            Ok(entries.len())
        })
    }

    /// Adds a tip unless an identical one exists; returns the stored tip.
    pub fn upsert_tip(&self, scope: &str, label: TrafficLightLabel, text: &str) -> Result<Tip> {
        self.write(|tx| upsert_tip_in(tx, scope, label, text))
    }

    pub fn seed_tips(&self, entries: &[TipEntry]) -> Result<Vec<Tip>> {
        self.write(|tx| {
            entries
                .iter()
                .map(|e| upsert_tip_in(tx, &e.scope, e.label, &e.text))
                .collect()
        })
    }

    /// Tips for `label` that apply to `category` or to every category, in
    /// the order they were added. `None` selects only global tips.
    pub fn tips_for(&self, category: Option<&str>, label: TrafficLightLabel) -> Result<Vec<Tip>> {
        self.read(|conn| {
            let mut stmt = conn.prepare_cached(
                "SELECT id, scope, label, text FROM tips \
                 WHERE label = ?1 AND (scope = ?2 OR scope = ?3) ORDER BY id",
            )?;
            let rows = stmt.query_map(
                params![label.as_str(), GLOBAL_SCOPE, category.map(str::trim).unwrap_or(GLOBAL_SCOPE)],
                |r| {
                    Ok(Tip {
                        id: r.get(0)?,
                        scope: r.get(1)?,
                        label: parse_label(r.get(2)?)?,
                        text: r.get(3)?,
                    })
                },
            )?;
            Ok(rows.collect::<rusqlite::Result<Vec<_>>>()?)
        })
    }

    /// Creates or updates an admin user, storing only a salted hash.
    pub fn add_admin(&self, username: &str, credential: &str) -> Result<()> {
        let username = username.trim();
        if username.is_empty() {
            return Err(StoreError::Invalid("username is empty".into()));
        }
        if credential.is_empty() {
            return Err(StoreError::Invalid("credential is empty".into()));
        }
        let hash = hash_credential(credential);
        self.write(|tx| {
            tx.execute(
                "INSERT INTO admin_users (username, credential_hash) VALUES (?1, ?2) \
                 ON CONFLICT(username) DO UPDATE SET credential_hash = excluded.credential_hash",
                params![username, hash],
            )?;
            Ok(())
        })
    }

    pub(crate) fn admin_credential_hash(&self, username: &str) -> Result<Option<String>> {
        self.read(|conn| {
            Ok(conn
                .query_row(
                    "SELECT credential_hash FROM admin_users WHERE username = ?1",
                    [username],
                    |r| r.get(0),
                )
                .optional()?)
        })
    }

    /// Ids of menu items whose stored label disagrees with their fat content.
    /// Always empty unless the file was edited behind the store's back.
    pub fn audit_labels(&self) -> Result<Vec<i64>> {
        self.read(|conn| {
            let mut stmt = conn.prepare(&format!("SELECT {ITEM_COLUMNS} FROM menu_items"))?;
            let mut bad = Vec::new();
            for item in stmt.query_map([], menu_item_from_row)? {
                let item = item?;
                if classify(item.facts.total_fat).ok() != Some(item.label) {
                    bad.push(item.id);
                }
            }
            Ok(bad)
        })
    }
}

fn upsert_tip_in(tx: &Transaction<'_>, scope: &str, label: TrafficLightLabel, text: &str) -> Result<Tip> {
    let scope = scope.trim();
    let text = text.trim();
    if scope.is_empty() {
        return Err(StoreError::Invalid("tip scope is empty".into()));
    }
    if text.is_empty() {
        return Err(StoreError::Invalid("tip text is empty".into()));
    }
    tx.execute(
        "INSERT OR IGNORE INTO tips (scope, label, text) VALUES (?1, ?2, ?3)",
        params![scope, label.as_str(), text],
    )?;
    let tip = tx.query_row(
        "SELECT id, scope, label, text FROM tips WHERE scope = ?1 AND label = ?2 AND text = ?3",
        params![scope, label.as_str(), text],
        |r| {
            Ok(Tip {
                id: r.get(0)?,
                scope: r.get(1)?,
                label: parse_label(r.get(2)?)?,
                text: r.get(3)?,
            })
        },
    )?;
    Ok(tip)
}

impl MenuSink for Store {
    type Error = StoreError;

    fn replace_menu(&self, restaurant_name: &str, records: &[RawMenuRecord]) -> Result<()> {
        self.replace_restaurant_menu(restaurant_name, records).map(|_| ())
    }
}

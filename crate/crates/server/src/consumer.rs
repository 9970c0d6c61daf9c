//! Read-only consumer routes. No session is required.

use std::collections::HashMap;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::routing::get;
use axum::{Json, Router};
use foodtracker_core::geo::{self, GeoPoint};
use foodtracker_core::store::MenuItem;
use foodtracker_core::TrafficLightLabel;
use serde::Serialize;

use crate::error::{ApiError, ApiResult};
use crate::state::AppState;

type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

fn params(raw: Params) -> ApiResult<HashMap<String, String>> {
    raw.map(|Query(map)| map).map_err(|e| ApiError::invalid(e.body_text()))
}

fn required<'a>(params: &'a HashMap<String, String>, name: &str) -> ApiResult<&'a str> {
    params
        .get(name)
        .map(String::as_str)
        .ok_or_else(|| ApiError::invalid(format!("missing query parameter `{name}`")))
}

fn number(params: &HashMap<String, String>, name: &str) -> ApiResult<Option<f64>> {
    params
        .get(name)
        .map(|raw| {
            raw.trim()
                .parse::<f64>()
                .map_err(|_| ApiError::invalid(format!("`{name}` must be a number")))
        })
        .transpose()
}

pub fn router() -> Router<AppState> {
    Router::new()
        .route("/api/categories", get(categories))
        .route("/api/restaurants", get(restaurants))
        .route("/api/restaurants/{name}/menu", get(menu))
        .route("/api/nearby", get(nearby))
        .route("/api/tips", get(tips))
}

async fn categories(State(state): State<AppState>) -> ApiResult<Json<Vec<String>>> {
    let store = state.store.clone();
    Ok(Json(state.blocking(move || store.list_categories()).await??))
}

#[derive(Debug, Serialize)]
struct RestaurantName {
    name: String,
}

async fn restaurants(State(state): State<AppState>, raw: Params) -> ApiResult<Json<Vec<RestaurantName>>> {
    let params = params(raw)?;
    let category = required(&params, "category")?.to_owned();
    let store = state.store.clone();
    let found = state.blocking(move || store.restaurants_by_category(&category)).await??;
    Ok(Json(found.into_iter().map(|r| RestaurantName { name: r.name }).collect()))
}

#[derive(Debug, Serialize)]
struct ExtraFacts {
    dietary_fiber: Option<f64>,
    protein: Option<f64>,
    carbohydrates: Option<f64>,
    sodium: Option<f64>,
}

#[derive(Debug, Serialize)]
struct MenuEntry {
    name: String,
    category: String,
    label: TrafficLightLabel,
    calories: Option<f64>,
    total_fat: Option<f64>,
    saturated_fat: Option<f64>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    extra: Option<ExtraFacts>,
}

impl MenuEntry {
    fn new(item: MenuItem, full: bool) -> Self {
        let f = item.facts;
        MenuEntry {
            name: item.name,
            category: item.food_category,
            label: item.label,
            calories: f.calories,
            total_fat: f.total_fat,
            saturated_fat: f.saturated_fat,
            extra: full.then_some(ExtraFacts {
                dietary_fiber: f.dietary_fiber,
                protein: f.protein,
                carbohydrates: f.carbohydrates,
                sodium: f.sodium,
            }),
        }
    }
}

async fn menu(State(state): State<AppState>, Path(name): Path<String>, raw: Params) -> ApiResult<Json<Vec<MenuEntry>>> {
    let params = params(raw)?;
    let full = match params.get("full").map(|s| s.trim().to_ascii_lowercase()) {
        None => false,
        Some(v) if v == "true" || v == "1" => true,
        Some(v) if v == "false" || v == "0" => false,
        Some(_) => return Err(ApiError::invalid("`full` must be true or false")),
    };
    let store = state.store.clone();
    let items = state.blocking(move || store.menu_for_restaurant(name.as_str())).await??;
    Ok(Json(items.into_iter().map(|i| MenuEntry::new(i, full)).collect()))
}

#[derive(Debug, Serialize)]
struct NearbyEntry {
    name: String,
    distance_m: f64,
}

async fn nearby(State(state): State<AppState>, raw: Params) -> ApiResult<Json<Vec<NearbyEntry>>> {
    let params = params(raw)?;
    let lat = number(&params, "lat")?.ok_or_else(|| ApiError::invalid("missing query parameter `lat`"))?;
    let lon = number(&params, "lon")?.ok_or_else(|| ApiError::invalid("missing query parameter `lon`"))?;
    let user = GeoPoint::new(lat, lon).map_err(|e| ApiError::invalid(e.to_string()))?;
    let radius = number(&params, "radius")?.unwrap_or(state.default_radius);
    if !radius.is_finite() || radius <= 0.0 {
        return Err(ApiError::invalid("`radius` must be a positive number of meters"));
    }

    let store = state.store.clone();
    let candidates = state.blocking(move || store.all_locations()).await??;
    let hits = geo::nearby(user, candidates, radius).map_err(|e| ApiError::invalid(e.to_string()))?;
    Ok(Json(
        hits.into_iter()
            .map(|(name, distance_m)| NearbyEntry { name, distance_m })
            .collect(),
    ))
}

#[derive(Debug, Serialize)]
struct TipText {
    text: String,
}

async fn tips(State(state): State<AppState>, raw: Params) -> ApiResult<Json<Vec<TipText>>> {
    let params = params(raw)?;
    let label: TrafficLightLabel = required(&params, "label")?
        .parse()
        .map_err(|e: foodtracker_core::tld::UnknownLabel| ApiError::invalid(e.to_string()))?;
    let category = params.get("category").cloned();
    let store = state.store.clone();
    let tips = state.blocking(move || store.tips_for(category.as_deref(), label)).await??;
    Ok(Json(tips.into_iter().map(|t| TipText { text: t.text }).collect()))
}

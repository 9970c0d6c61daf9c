//! Admin facade.
//!
//! Two routes only: `/admin/login` and `/admin/dispatch`. Every dispatched
//! action travels in the request body next to the session token, and the
//! token is checked before the action is even decoded, so an unauthenticated
//! caller learns nothing about which actions exist.

use axum::body::Bytes;
use axum::extract::State;
use axum::routing::post;
use axum::{Json, Router};
use foodtracker_core::auth::{AuthError, SessionToken};
use foodtracker_core::parser::{ingest, resolve_root, IngestFailure, IngestReport};
use foodtracker_core::store::{parse_locations, parse_tips};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ApiError, ApiResult, ErrorCode};
use crate::state::AppState;

pub fn router() -> Router<AppState> {
    Router::new()
        .route("/admin/login", post(login))
        .route("/admin/dispatch", post(dispatch))
}

#[derive(Debug, Deserialize)]
struct LoginRequest {
    username: String,
    credential: String,
}

#[derive(Debug, Serialize)]
struct LoginResponse {
    token: String,
}

async fn login(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<LoginResponse>> {
    let request: LoginRequest =
        serde_json::from_slice(&body).map_err(|_| ApiError::invalid("expected {username, credential}"))?;
    let store = state.store.clone();
    let sessions = state.sessions.clone();
    let outcome = state
        .blocking(move || sessions.login(&store, &request.username, &request.credential))
        .await?;
    match outcome {
        Ok(token) => Ok(Json(LoginResponse { token: token.as_str().to_owned() })),
        Err(AuthError::InvalidCredentials) => Err(ApiError::unauthorized()),
        Err(AuthError::Store(e)) => Err(e.into()),
    }
}

/// Operations reachable through the facade.
#[derive(Debug, Deserialize)]
#[serde(tag = "action", content = "payload", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdminAction {
    Ingest { root: String },
    SeedLocations { text: String },
    SeedTips { text: String },
    ListFailures,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum DispatchResponse {
    Ingest(IngestReport),
    Seeded { entries: usize },
    Failures { failures: Vec<IngestFailure> },
}

async fn dispatch(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<DispatchResponse>> {
    // Authenticate before looking at anything else in the request.
    let mut request: Value = serde_json::from_slice(&body).map_err(|_| ApiError::unauthorized())?;
    let token = request
        .get("token")
        .and_then(Value::as_str)
        .map(SessionToken::from)
        .ok_or_else(ApiError::unauthorized)?;
    if state.sessions.validate(&token).is_none() {
        return Err(ApiError::unauthorized());
    }

    if let Some(fields) = request.as_object_mut() {
        fields.remove("token");
    }
    let action: AdminAction =
        serde_json::from_value(request).map_err(|_| ApiError::invalid("unknown or malformed action"))?;

    let response = match action {
        AdminAction::Ingest { root } => DispatchResponse::Ingest(run_ingest(&state, root).await?),
        AdminAction::SeedLocations { text } => {
            let entries = parse_locations(&text).map_err(|e| ApiError::invalid(e.to_string()))?;
            let store = state.store.clone();
            let entries = state.blocking(move || store.seed_locations(&entries)).await??;
            DispatchResponse::Seeded { entries }
        }
        AdminAction::SeedTips { text } => {
            let entries = parse_tips(&text).map_err(|e| ApiError::invalid(e.to_string()))?;
            let store = state.store.clone();
            let tips = state.blocking(move || store.seed_tips(&entries)).await??;
            DispatchResponse::Seeded { entries: tips.len() }
        }
        AdminAction::ListFailures => DispatchResponse::Failures {
            failures: state.last_report().map(|r| r.failures).unwrap_or_default(),
        },
    };
    Ok(Json(response))
}

async fn run_ingest(state: &AppState, root: String) -> ApiResult<IngestReport> {
    let slot = state
        .try_start_ingest()
        .ok_or_else(|| ApiError::new(ErrorCode::Conflict, "an ingest is already running"))?;
    let root = resolve_root(&root).map_err(|e| ApiError::new(ErrorCode::RootUnreachable, e.to_string()))?;

    let store = state.store.clone();
    let fetcher = state.fetcher.clone();
    let outcome = state
        .blocking(move || {
            let _slot = slot;
            ingest(&root, &fetcher, &*store)
        })
        .await?;
    let report = outcome.map_err(|e| ApiError::new(ErrorCode::RootUnreachable, e.to_string()))?;
    tracing::info!(
        parsed = report.restaurants_parsed,
        found = report.restaurants_found,
        items = report.items_extracted,
        "ingest finished"
    );
    state.record_report(report.clone());
    Ok(report)
}

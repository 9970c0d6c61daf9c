#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::{Arc, Mutex};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use foodtracker_core::parser::{FetchError, FileFetcher, PageFetcher};
use foodtracker_core::Store;
use foodtracker_server::{app, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use url::Url;

pub const ADMIN_USER: &str = "admin";
pub const ADMIN_CREDENTIAL: &str = "correct horse battery staple";

pub struct Harness {
    pub dir: tempfile::TempDir,
    pub state: AppState,
    pub app: Router,
}

impl Harness {
    pub fn new() -> Self {
        Harness::with(|state| state)
    }

    pub fn with(configure: impl FnOnce(AppState) -> AppState) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path().join("menus.db")).unwrap();
        store.add_admin(ADMIN_USER, ADMIN_CREDENTIAL).unwrap();
        let state = configure(AppState::new(store));
        let app = app(state.clone());
        Harness { dir, state, app }
    }

    pub fn db_path(&self) -> PathBuf {
        self.state.store.path().to_path_buf()
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        send(&self.app, Request::get(uri).body(Body::empty()).unwrap()).await
    }

    pub async fn post(&self, uri: &str, body: &Value) -> (StatusCode, Value) {
        post_raw(&self.app, uri, body.to_string()).await
    }

    pub async fn login(&self) -> String {
        let (status, body) = self
            .post("/admin/login", &json!({"username": ADMIN_USER, "credential": ADMIN_CREDENTIAL}))
            .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        body["token"].as_str().unwrap().to_owned()
    }

    pub async fn dispatch(&self, token: &str, action: Value) -> (StatusCode, Value) {
        let mut body = action;
        body["token"] = Value::String(token.to_owned());
        self.post("/admin/dispatch", &body).await
    }
}

pub async fn post_raw(app: &Router, uri: &str, body: String) -> (StatusCode, Value) {
    let request = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    send(app, request).await
}

pub async fn send(app: &Router, request: Request<Body>) -> (StatusCode, Value) {
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

/// Raw bytes of the database and its write-ahead log.
pub fn store_bytes(db: &Path) -> Vec<Vec<u8>> {
    let mut wal = db.as_os_str().to_owned();
    wal.push("-wal");
    vec![std::fs::read(db).unwrap(), std::fs::read(PathBuf::from(wal)).unwrap_or_default()]
}

/// Percent-encodes a path segment.
pub fn segment(text: &str) -> String {
    let mut url = Url::parse("http://x/").unwrap();
    url.path_segments_mut().unwrap().push(text);
    url.path()[1..].to_owned()
}

/// Lets a test hold an ingest open: the first fetch announces itself and
/// then waits for the release signal.
pub struct GatedFetcher {
    entered: Mutex<Option<Sender<()>>>,
    release: Mutex<Receiver<()>>,
}

impl GatedFetcher {
    pub fn new() -> (Arc<GatedFetcher>, Receiver<()>, Sender<()>) {
        let (entered_tx, entered_rx) = channel();
        let (release_tx, release_rx) = channel();
        let fetcher = GatedFetcher { entered: Mutex::new(Some(entered_tx)), release: Mutex::new(release_rx) };
        (Arc::new(fetcher), entered_rx, release_tx)
    }
}

impl PageFetcher for GatedFetcher {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError> {
        if let Some(tx) = self.entered.lock().unwrap().take() {
            tx.send(()).unwrap();
            self.release.lock().unwrap().recv().unwrap();
        }
        FileFetcher.fetch(locator)
    }
}

/// Counts fetches.
#[derive(Default)]
pub struct CountingFetcher {
    pub calls: Mutex<usize>,
}

impl PageFetcher for CountingFetcher {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError> {
        *self.calls.lock().unwrap() += 1;
        FileFetcher.fetch(locator)
    }
}

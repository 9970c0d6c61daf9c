use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use foodtracker_core::auth::SessionTable;
use foodtracker_core::geo::DEFAULT_RADIUS_METERS;
use foodtracker_core::parser::{DefaultFetcher, IngestReport, PageFetcher};
use foodtracker_core::Store;

use crate::error::{ApiError, ApiResult};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub sessions: Arc<SessionTable>,
    pub fetcher: Arc<dyn PageFetcher>,
    /// Used by nearby scans that do not name a radius.
    pub default_radius: f64,
    ingest_running: Arc<AtomicBool>,
    last_report: Arc<Mutex<Option<IngestReport>>>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState {
            store: Arc::new(store),
            sessions: Arc::new(SessionTable::default()),
            fetcher: Arc::new(DefaultFetcher::default()),
            default_radius: DEFAULT_RADIUS_METERS,
            ingest_running: Arc::new(AtomicBool::new(false)),
            last_report: Arc::new(Mutex::new(None)),
        }
    }

    pub fn with_sessions(mut self, sessions: SessionTable) -> Self {
        self.sessions = Arc::new(sessions);
        self
    }

    pub fn with_fetcher(mut self, fetcher: Arc<dyn PageFetcher>) -> Self {
        self.fetcher = fetcher;
        self
    }

    /// # Panics
    /// If `radius` is not a positive number of meters.
    pub fn with_default_radius(mut self, radius: f64) -> Self {
        assert!(radius.is_finite() && radius > 0.0, "default radius must be positive");
        self.default_radius = radius;
        self
    }

    /// Runs blocking store or crawl work off the async executor.
    pub(crate) async fn blocking<T, F>(&self, f: F) -> ApiResult<T>
    where
        F: FnOnce() -> T + Send + 'static,
        T: Send + 'static,
    {
        tokio::task::spawn_blocking(f).await.map_err(|e| {
            tracing::error!("blocking task failed: {e}");
            ApiError::internal()
        })
    }

    /// Claims the ingest slot; `None` while another ingest is running.
    pub(crate) fn try_start_ingest(&self) -> Option<IngestSlot> {
        self.ingest_running
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .ok()
            .map(|_| IngestSlot(Arc::clone(&self.ingest_running)))
    }

    pub(crate) fn record_report(&self, report: IngestReport) {
        *self.last_report.lock().unwrap() = Some(report);
    }

    pub(crate) fn last_report(&self) -> Option<IngestReport> {
        self.last_report.lock().unwrap().clone()
    }
}

/// Releases the ingest slot when dropped, including on panic.
pub(crate) struct IngestSlot(Arc<AtomicBool>);

impl Drop for IngestSlot {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}

use std::fs;
use std::path::Path;
use std::time::Duration;

use thiserror::Error;
use url::Url;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{locator}: {reason}")]
pub struct FetchError {
    pub locator: String,
    pub reason: String,
}

impl FetchError {
    pub fn new(locator: impl Into<String>, reason: impl Into<String>) -> Self {
        FetchError { locator: locator.into(), reason: reason.into() }
    }
}

/// Retrieves an HTML page by locator. Injected into ingest so corpus tests
/// can run against local files or in-memory pages.
pub trait PageFetcher: Send + Sync {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError>;
}

impl<F: PageFetcher + ?Sized> PageFetcher for &F {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError> {
        (**self).fetch(locator)
    }
}

impl<F: PageFetcher + ?Sized> PageFetcher for std::sync::Arc<F> {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError> {
        (**self).fetch(locator)
    }
}

/// Reads `file://` locators from the local file system.
#[derive(Debug, Clone, Copy, Default)]
pub struct FileFetcher;

impl PageFetcher for FileFetcher {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError> {
        if locator.scheme() != "file" {
            return Err(FetchError::new(locator.as_str(), "not a file locator"));
        }
        let path = locator
            .to_file_path()
            .map_err(|_| FetchError::new(locator.as_str(), "not a local path"))?;
        fs::read_to_string(&path).map_err(|e| FetchError::new(locator.as_str(), e.to_string()))
    }
}

/// Fetches `http://` and `https://` locators.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).build();
        HttpFetcher { agent: config.into() }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher::new(Duration::from_secs(30))
    }
}

impl PageFetcher for HttpFetcher {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError> {
        if !matches!(locator.scheme(), "http" | "https") {
            return Err(FetchError::new(locator.as_str(), "not an http locator"));
        }
        let fail = |e: ureq::Error| FetchError::new(locator.as_str(), e.to_string());
        let mut response = self.agent.get(locator.as_str()).call().map_err(fail)?;
        response.body_mut().read_to_string().map_err(fail)
    }
}

/// Dispatches on the locator scheme to [`FileFetcher`] or [`HttpFetcher`].
#[derive(Default)]
pub struct DefaultFetcher {
    files: FileFetcher,
    http: HttpFetcher,
}

impl PageFetcher for DefaultFetcher {
    fn fetch(&self, locator: &Url) -> Result<String, FetchError> {
        match locator.scheme() {
            "file" => self.files.fetch(locator),
            "http" | "https" => self.http.fetch(locator),
            other => Err(FetchError::new(locator.as_str(), format!("unsupported scheme {other:?}"))),
        }
    }
}

/// Turns a command-line root argument into a locator. `http(s)://` and
/// `file://` strings are taken as URLs; anything else is a local path, and
/// a directory means its `index.html`.
pub fn resolve_root(root: &str) -> Result<Url, FetchError> {
    if let Ok(url) = Url::parse(root) {
        if matches!(url.scheme(), "http" | "https" | "file") {
            return Ok(url);
        }
    }
    let mut path = Path::new(root)
        .canonicalize()
        .map_err(|e| FetchError::new(root, e.to_string()))?;
    if path.is_dir() {
        path.push("index.html");
    }
    Url::from_file_path(&path).map_err(|_| FetchError::new(root, "not an absolute path"))
}

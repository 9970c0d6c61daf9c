//! JSON HTTP service for menus, nearby restaurants and tips, plus an
//! authenticated admin facade.
//!
//! Consumer routes (all `GET`, no session needed):
//!
//! - `/api/categories`
//! - `/api/restaurants?category=<text>`
//! - `/api/restaurants/{name}/menu[?full=true]`
//! - `/api/nearby?lat=<deg>&lon=<deg>[&radius=<m>]`
//! - `/api/tips?label=<green|yellow|red>[&category=<text>]`
//!
//! Admin routes (`POST`, JSON bodies):
//!
//! - `/admin/login` `{username, credential}` returns `{token}`
//! - `/admin/dispatch` `{token, action, payload}` where `action` is one of
//!   `ingest {root}`, `seed_locations {text}`, `seed_tips {text}`,
//!   `list_failures`
//!
//! Errors are JSON `{code, message}` with code one of `invalid_request`,
//! `root_unreachable` (400), `unauthorized` (401), `not_found` (404),
//! `conflict` (409) and `internal` (500).

mod admin;
mod consumer;
pub mod error;
mod state;

use std::io;
use std::net::SocketAddr;

use axum::Router;
use tokio::net::TcpListener;

pub use admin::AdminAction;
pub use error::{ApiError, ErrorCode};
pub use state::AppState;

async fn fallback() -> ApiError {
    ApiError::not_found("no such route")
}

/// Consumer routes only.
pub fn consumer_router(state: AppState) -> Router {
    consumer::router().fallback(fallback).with_state(state)
}

/// Admin facade routes only.
pub fn admin_router(state: AppState) -> Router {
    admin::router().fallback(fallback).with_state(state)
}

/// Both route families on one router.
pub fn app(state: AppState) -> Router {
    consumer::router().merge(admin::router()).fallback(fallback).with_state(state)
}

/// Where to listen. With `admin` set, the facade gets its own listener and
/// is not reachable on the consumer address.
#[derive(Debug, Clone)]
pub struct Bind {
    pub consumer: SocketAddr,
    pub admin: Option<SocketAddr>,
}

pub struct Server {
    consumer: (TcpListener, Router),
    admin: Option<(TcpListener, Router)>,
}

impl Server {
    /// Binds all listeners up front so address errors surface before serving.
    pub async fn bind(bind: &Bind, state: AppState) -> io::Result<Server> {
        match bind.admin {
            None => {
                let listener = TcpListener::bind(bind.consumer).await?;
                Ok(Server { consumer: (listener, app(state)), admin: None })
            }
            Some(admin_addr) => {
                let consumer = TcpListener::bind(bind.consumer).await?;
                let admin = TcpListener::bind(admin_addr).await?;
                Ok(Server {
                    consumer: (consumer, consumer_router(state.clone())),
                    admin: Some((admin, admin_router(state))),
                })
            }
        }
    }

    pub fn consumer_addr(&self) -> io::Result<SocketAddr> {
        self.consumer.0.local_addr()
    }

    pub fn admin_addr(&self) -> io::Result<SocketAddr> {
        match &self.admin {
            Some((listener, _)) => listener.local_addr(),
            None => self.consumer_addr(),
        }
    }

    /// Serves until `shutdown` resolves.
    pub async fn run(self, shutdown: impl std::future::Future<Output = ()> + Send + 'static) -> io::Result<()> {
        let (tx, _) = tokio::sync::broadcast::channel::<()>(1);
        let signal = |tx: &tokio::sync::broadcast::Sender<()>| {
            let mut rx = tx.subscribe();
            async move {
                let _ = rx.recv().await;
            }
        };

        let (listener, router) = self.consumer;
        let consumer = tokio::spawn(axum::serve(listener, router).with_graceful_shutdown(signal(&tx)).into_future());
        let admin = self.admin.map(|(listener, router)| {
            tokio::spawn(axum::serve(listener, router).with_graceful_shutdown(signal(&tx)).into_future())
        });

        shutdown.await;
        let _ = tx.send(());
        consumer.await.map_err(io::Error::other)??;
        if let Some(admin) = admin {
            admin.await.map_err(io::Error::other)??;
        }
        Ok(())
    }
}

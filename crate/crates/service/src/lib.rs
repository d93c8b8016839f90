//! Factsheet store and HTTP API.
//!
//! ```no_run
//! # async fn run() -> Result<(), efs_service::ServeError> {
//! efs_service::serve("127.0.0.1:8080", "./sheets").await
//! # }
//! ```

pub mod api;
pub mod store;

use std::io;
use std::path::PathBuf;
use std::sync::Arc;

pub use api::{router, schema_document, ApiError};
pub use store::{is_valid_id, Filter, FilterError, ListItem, Store, StoreEntry, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("address {0} is already in use")]
    AddressInUse(String),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("server failed: {0}")]
    Io(#[from] io::Error),
}

/// Opens the store at `store_dir` and serves the API on `addr` until
/// interrupted.
pub async fn serve(addr: &str, store_dir: impl Into<PathBuf>) -> Result<(), ServeError> {
    let store = Arc::new(Store::open(store_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| {
        if e.kind() == io::ErrorKind::AddrInUse {
            ServeError::AddressInUse(addr.to_string())
        } else {
            ServeError::Bind {
                addr: addr.to_string(),
                source: e,
            }
        }
    })?;
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

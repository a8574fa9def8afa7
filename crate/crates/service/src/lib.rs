//! HTTP/JSON API over vocabulary expansion sessions.
//!
//! | method | path                              | result                         |
//! |--------|-----------------------------------|--------------------------------|
//! | GET    | `/api/models`                     | loaded models                  |
//! | POST   | `/api/sessions`                   | 201, `{session_id, state}`     |
//! | GET    | `/api/sessions/{id}`              | full session view              |
//! | POST   | `/api/sessions/{id}/accept`       | full view after accepting      |
//! | POST   | `/api/sessions/{id}/reject`       | full view after rejecting      |
//! | POST   | `/api/sessions/{id}/remove`       | full view after removing       |
//! | GET    | `/api/sessions/{id}/export`       | snapshot JSON or term list     |
//! | POST   | `/api/sessions/{id}/import`       | full view after import         |
//!
//! Errors are `{"code", "message"}` bodies with 400, 404 or 409 statuses.

pub mod error;
mod routes;
pub mod store;

use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;
use tower_http::services::ServeDir;
use vocab_expander::{ModelRegistry, SessionParams};

pub use error::{ApiError, ErrorBody};
pub use routes::{CreatedSession, ParamsPatch, TermRequest};
pub use store::{SessionStore, StoreError};

/// Shared, read-mostly service state.
pub struct AppState {
    pub registry: Arc<ModelRegistry>,
    pub store: SessionStore,
    /// Parameters for new sessions; an empty `model_ids` means every loaded
    /// model.
    pub defaults: SessionParams,
}

impl AppState {
    pub fn new(registry: Arc<ModelRegistry>, store: SessionStore, defaults: SessionParams) -> Self {
        AppState {
            registry,
            store,
            defaults,
        }
    }
}

/// The API router, optionally serving a static UI bundle for every other
/// path.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = routes::api(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves `app` on an already bound listener until the task is dropped.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}

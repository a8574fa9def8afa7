use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use vocab_expander::{ModelInfo, Session, SessionParams, SessionSnapshot, SessionView};

use crate::error::ApiError;
use crate::AppState;

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<T, ApiError>;

pub(crate) fn api(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/models", get(list_models))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/accept", post(accept))
        .route("/api/sessions/{id}/reject", post(reject))
        .route("/api/sessions/{id}/remove", post(remove))
        .route("/api/sessions/{id}/export", get(export))
        .route("/api/sessions/{id}/import", post(import))
        .with_state(state)
}

/// Optional overrides for the server's default session parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsPatch {
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub display_threshold: Option<f64>,
    pub graph_edge_threshold: Option<f64>,
    pub per_anchor_display: Option<usize>,
    pub model_ids: Option<Vec<String>>,
}

impl ParamsPatch {
    fn apply(self, mut base: SessionParams) -> SessionParams {
        if let Some(k) = self.k {
            base.k = k;
        }
        if let Some(lambda) = self.lambda {
            base.lambda = lambda;
        }
        if let Some(t) = self.display_threshold {
            base.display_threshold = t;
        }
        if let Some(t) = self.graph_edge_threshold {
            base.graph_edge_threshold = t;
        }
        if let Some(n) = self.per_anchor_display {
            base.per_anchor_display = n;
        }
        if let Some(ids) = self.model_ids {
            base.model_ids = ids;
        }
        base
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    #[serde(default)]
    params: ParamsPatch,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: String,
    pub state: SessionView,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRequest {
    pub term: String,
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(body: &[u8], code: &str) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(code, e.to_string()))
}

/// Runs blocking session work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce() -> ApiResult<T> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

async fn list_models(State(state): Shared) -> Json<Vec<ModelInfo>> {
    Json(state.registry.info())
}

async fn create_session(
    State(state): Shared,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<CreatedSession>)> {
    let request: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        parse_json(&body, "invalid_params")?
    };
    let mut defaults = state.defaults.clone();
    if defaults.model_ids.is_empty() {
        defaults.model_ids = state.registry.ids();
    }
    let params = request.params.apply(defaults);
    let created = blocking(move || {
        let session = Session::new(params, &state.registry)?;
        let view = session.view();
        state.store.insert(session)?;
        Ok(CreatedSession {
            session_id: view.session_id.clone(),
            state: view,
        })
    })
    .await?;
    log::info!("created session {}", created.session_id);
    Ok((StatusCode::CREATED, Json(created)))
}

async fn get_session(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let view = blocking(move || Ok(state.store.read(&id, Session::view)?)).await?;
    Ok(Json(view))
}

async fn mutate(
    state: Arc<AppState>,
    id: String,
    body: Bytes,
    op: fn(&mut Session, &str) -> vocab_expander::Result<()>,
) -> ApiResult<Json<SessionView>> {
    let request: TermRequest = parse_json(&body, "invalid_payload")?;
    let view = blocking(move || {
        Ok(state.store.update(&id, |s| {
            op(s, &request.term)?;
            Ok(s.view())
        })?)
    })
    .await?;
    Ok(Json(view))
}

async fn accept(
    State(state): Shared,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    mutate(state, id, body, Session::accept_term).await
}

async fn reject(
    State(state): Shared,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    mutate(state, id, body, Session::reject_term).await
}

async fn remove(
    State(state): Shared,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    mutate(state, id, body, Session::remove_accepted).await
}

async fn export(
    State(state): Shared,
    Path(id): Path<String>,
    Query(query): Query<ExportQuery>,
) -> ApiResult<Response> {
    let format = query.format.unwrap_or_else(|| "snapshot".into());
    match format.as_str() {
        "snapshot" => {
            let snapshot =
                blocking(move || Ok(state.store.read(&id, Session::export_snapshot)?)).await?;
            Ok(Json(snapshot).into_response())
        }
        "terms" => {
            let text =
                blocking(move || Ok(state.store.read(&id, Session::export_term_list)?)).await?;
            Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
        }
        other => Err(ApiError::bad_request(
            "invalid_format",
            format!("unknown export format {other:?}; use snapshot or terms"),
        )),
    }
}

/// `text/plain` bodies are term lists and extend the session; anything else
/// is parsed as a snapshot that replaces it.
async fn import(
    State(state): Shared,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let is_text = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.trim_start().starts_with("text/plain"));
    let view = if is_text {
        let text = String::from_utf8(body.to_vec())
            .map_err(|_| ApiError::bad_request("invalid_payload", "term list is not UTF-8"))?;
        blocking(move || {
            Ok(state.store.update(&id, |s| {
                s.accept_term_list(&text)?;
                Ok(s.view())
            })?)
        })
        .await?
    } else {
        let text = std::str::from_utf8(&body)
            .map_err(|_| ApiError::bad_request("invalid_payload", "snapshot is not UTF-8"))?;
        let snapshot = SessionSnapshot::from_json(text)?;
        blocking(move || {
            // 404 before validating models so unknown ids are reported first.
            state.store.read(&id, |_| ())?;
            let session = Session::from_snapshot(id.clone(), &snapshot, &state.registry)?;
            let view = session.view();
            state.store.replace(&id, session)?;
            Ok(view)
        })
        .await?
    };
    Ok(Json(view))
}

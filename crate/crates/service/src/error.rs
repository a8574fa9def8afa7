use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use vocab_expander::Error as CoreError;

use crate::store::StoreError;

/// JSON error body: `{"code": ..., "message": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.to_owned(),
                message: message.into(),
            },
        }
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "session_not_found",
            format!("no session with id {id:?}"),
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::InvalidTerm(_) => Self::bad_request("invalid_term", message),
            CoreError::UnknownModel(_) => Self::bad_request("unknown_model", message),
            CoreError::InvalidParams(_)
            | CoreError::EmptyEnsemble
            | CoreError::DuplicateModel(_) => Self::bad_request("invalid_params", message),
            CoreError::AcceptedConflict(_) => {
                Self::new(StatusCode::CONFLICT, "term_conflict", message)
            }
            CoreError::NotAccepted(_) => Self::bad_request("term_not_accepted", message),
            CoreError::UnsupportedVersion(_) => Self::bad_request("unsupported_version", message),
            CoreError::MalformedSnapshot(_) => Self::bad_request("invalid_payload", message),
            CoreError::Io { .. }
            | CoreError::MalformedHeader { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::MalformedRow { .. }
            | CoreError::InvalidFixture(_) => Self::internal(message),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(id) => Self::not_found(&id),
            StoreError::Session(e) => e.into(),
            other => Self::internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

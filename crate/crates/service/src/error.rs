//! API errors and their HTTP mapping.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use livebib::curation::CurationError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    /// The caller's `expectedSeq` is behind the session.
    #[error("stale sequence number: expected {expected}, session is at {current}")]
    StaleSeq { expected: u64, current: u64 },
    #[error("{0}")]
    Internal(String),
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ErrorBody {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    current_seq: Option<u64>,
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::StaleSeq { .. } => StatusCode::CONFLICT,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::BadRequest(_) => "bad_request",
            ApiError::NotFound(_) => "not_found",
            ApiError::StaleSeq { .. } => "stale_seq",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl From<CurationError> for ApiError {
    fn from(e: CurationError) -> Self {
        match e {
            CurationError::InvalidDecision { .. }
            | CurationError::InvalidMonth(_)
            | CurationError::MissingExclusions { .. }
            | CurationError::Eval(_) => ApiError::BadRequest(e.to_string()),
            CurationError::NothingToUndo(_) => ApiError::NotFound(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(msg) = &self {
            log::error!("{msg}");
        }
        let body = ErrorBody {
            error: self.code(),
            message: self.to_string(),
            current_seq: match &self {
                ApiError::StaleSeq { current, .. } => Some(*current),
                _ => None,
            },
        };
        (self.status(), Json(body)).into_response()
    }
}

//! Local HTTP API over a curation session: the triage queue, decisions,
//! search, records, statistics and monthly digests.
//!
//! All bodies are JSON with camelCase keys. Decisions carry an optional
//! `expectedSeq`; a mismatch with the session's sequence number yields 409
//! and leaves the state untouched.

mod error;
mod session;

use std::net::SocketAddr;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::cors::CorsLayer;

pub use error::ApiError;
pub use session::{
    DecisionRequest, DigestView, QueueItem, QueueView, RecordView, SearchRequest, SeqView, Session,
    SessionView, StatsView, UndoRequest, DEFAULT_QUEUE_LIMIT,
};

/// Origin of the development web UI allowed by CORS.
pub const DEFAULT_DEV_ORIGIN: &str = "http://localhost:5173";

pub type SharedSession = Arc<RwLock<Session>>;

type ApiResult<T> = Result<Json<T>, ApiError>;

fn read(s: &SharedSession) -> RwLockReadGuard<'_, Session> {
    s.read().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn write(s: &SharedSession) -> RwLockWriteGuard<'_, Session> {
    s.write().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::BadRequest(e.body_text()))
}

#[derive(Deserialize)]
struct QueueParams {
    limit: Option<usize>,
}

async fn queue(
    State(s): State<SharedSession>,
    Query(p): Query<QueueParams>,
) -> ApiResult<QueueView> {
    read(&s)
        .queue(p.limit.unwrap_or(DEFAULT_QUEUE_LIMIT))
        .map(Json)
}

async fn decision(
    State(s): State<SharedSession>,
    payload: Result<Json<DecisionRequest>, JsonRejection>,
) -> ApiResult<SeqView> {
    let req = body(payload)?;
    write(&s).decide(req).map(Json)
}

async fn undo(
    State(s): State<SharedSession>,
    payload: Result<Json<UndoRequest>, JsonRejection>,
) -> ApiResult<SeqView> {
    let req = body(payload)?;
    write(&s).undo(req).map(Json)
}

async fn stats(State(s): State<SharedSession>) -> ApiResult<StatsView> {
    read(&s).stats().map(Json)
}

async fn search(
    State(s): State<SharedSession>,
    payload: Result<Json<SearchRequest>, JsonRejection>,
) -> ApiResult<livebib::SearchResult> {
    let req = body(payload)?;
    read(&s).search(req).map(Json)
}

async fn record(
    State(s): State<SharedSession>,
    Path(bibcode): Path<String>,
) -> ApiResult<RecordView> {
    read(&s).record_view(&bibcode).map(Json)
}

async fn digest(
    State(s): State<SharedSession>,
    Path(month): Path<String>,
) -> ApiResult<DigestView> {
    read(&s).digest(&month).map(Json)
}

async fn session_info(State(s): State<SharedSession>) -> ApiResult<SessionView> {
    read(&s).info().map(Json)
}

/// The API routes, with CORS opened to `dev_origin` only.
pub fn router(session: SharedSession, dev_origin: &str) -> Router {
    let mut router = Router::new()
        .route("/queue", get(queue))
        .route("/decision", post(decision))
        .route("/undo", post(undo))
        .route("/stats", get(stats))
        .route("/search", post(search))
        .route("/record/{bibcode}", get(record))
        .route("/digest/{month}", get(digest))
        .route("/session", get(session_info))
        .with_state(session);
    if let Ok(origin) = HeaderValue::from_str(dev_origin) {
        router = router.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    router
}

/// Serves the API on `addr` until interrupted.
pub async fn serve(session: Session, addr: SocketAddr, dev_origin: &str) -> std::io::Result<()> {
    let app = router(Arc::new(RwLock::new(session)), dev_origin);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

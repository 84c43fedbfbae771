//! HTTP+JSON front end for a [`SessionStore`].
//!
//! | method | path                         | body / query                                  |
//! |--------|------------------------------|-----------------------------------------------|
//! | GET    | `/session/{id}/candidates`   | `reviewer`, `after`, `limit`, `include_voted` |
//! | POST   | `/session/{id}/votes`        | `{"reviewer", "term", "judgment"}`            |
//! | GET    | `/session/{id}/progress`     |                                               |
//! | GET    | `/session/{id}/verdicts`     |                                               |
//! | GET    | `/session/{id}/result`       |                                               |
//!
//! Errors come back as `{"error": "..."}` with 400 for bad input, 404 for an
//! unknown session and 500 for storage failures.

use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use stopcur_core::annotation::{
    AnnotationError, Judgment, Outcome, Progress, QueueItem, SessionStore, Verdict, VoteRecord,
};
use tower_http::cors::CorsLayer;

pub const DEFAULT_PAGE: usize = 50;
pub const MAX_PAGE: usize = 1000;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<AnnotationError> for ApiError {
    fn from(e: AnnotationError) -> Self {
        let status = match &e {
            AnnotationError::UnknownSession(_) => StatusCode::NOT_FOUND,
            AnnotationError::UnknownReviewer(_)
            | AnnotationError::UnknownTerm(_)
            | AnnotationError::InvalidJudgment(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError {
            status,
            message: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(ErrorBody {
                error: &self.message,
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Deserialize)]
pub struct QueueQuery {
    pub reviewer: String,
    pub after: Option<String>,
    pub limit: Option<usize>,
    #[serde(default)]
    pub include_voted: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QueuePage {
    pub session: String,
    pub reviewer: String,
    pub total_terms: usize,
    /// Terms this reviewer has judged so far.
    pub voted: usize,
    pub items: Vec<QueueItem>,
    /// Pass as `after` to fetch the next page; absent on the last page.
    pub next_after: Option<String>,
}

/// Judgment travels as a plain string so an unknown value maps to a 400
/// with a useful message instead of a generic body rejection.
#[derive(Debug, Serialize, Deserialize)]
pub struct VoteRequest {
    pub reviewer: String,
    pub term: String,
    pub judgment: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerdictsBody {
    pub session: String,
    pub reviewers: usize,
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ResultBody {
    pub session: String,
    /// True once no term is unresolved.
    pub complete: bool,
    pub stopwords: Vec<String>,
    pub non_trivial: Vec<String>,
    pub unresolved: usize,
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/session/{id}/candidates", get(candidates))
        .route("/session/{id}/votes", post(vote))
        .route("/session/{id}/progress", get(progress))
        .route("/session/{id}/verdicts", get(verdicts))
        .route("/session/{id}/result", get(result))
        .with_state(store)
}

/// Binds `addr` and serves the store under `store_dir` until the process exits.
pub async fn serve(store_dir: &Path, addr: SocketAddr, cors: bool) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(listener, store_dir, cors).await
}

/// Like [`serve`] on an already bound listener.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    store_dir: &Path,
    cors: bool,
) -> std::io::Result<()> {
    let store = SessionStore::open(store_dir).map_err(std::io::Error::other)?;
    let mut app = router(Arc::new(store));
    if cors {
        app = app.layer(CorsLayer::permissive());
    }
    axum::serve(listener, app).await
}

async fn candidates(
    State(store): State<Arc<SessionStore>>,
    UrlPath(id): UrlPath<String>,
    query: Result<Query<QueueQuery>, QueryRejection>,
) -> ApiResult<QueuePage> {
    let Query(q) = query?;
    let limit = q.limit.unwrap_or(DEFAULT_PAGE);
    if limit == 0 || limit > MAX_PAGE {
        return Err(ApiError::bad_request(format!(
            "limit must be in 1..={MAX_PAGE}"
        )));
    }
    let handle = store.get(&id)?;
    // One extra item tells us whether another page exists.
    let (mut items, voted) =
        handle.queue(&q.reviewer, q.after.as_deref(), limit + 1, q.include_voted)?;
    let more = items.len() > limit;
    items.truncate(limit);
    let next_after = if more {
        items.last().map(|i| i.term.clone())
    } else {
        None
    };
    Ok(Json(QueuePage {
        session: id,
        reviewer: q.reviewer,
        total_terms: handle.session().candidates.len(),
        voted,
        items,
        next_after,
    }))
}

async fn vote(
    State(store): State<Arc<SessionStore>>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<VoteRequest>, JsonRejection>,
) -> ApiResult<VoteRecord> {
    let Json(req) = body?;
    let judgment: Judgment = req.judgment.parse()?;
    let handle = store.get(&id)?;
    // record_vote fsyncs before returning.
    let record =
        tokio::task::spawn_blocking(move || handle.record_vote(&req.reviewer, &req.term, judgment))
            .await
            .map_err(|e| ApiError {
                status: StatusCode::INTERNAL_SERVER_ERROR,
                message: e.to_string(),
            })??;
    Ok(Json(record))
}

async fn progress(
    State(store): State<Arc<SessionStore>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Progress> {
    Ok(Json(store.get(&id)?.progress()))
}

async fn verdicts(
    State(store): State<Arc<SessionStore>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<VerdictsBody> {
    let handle = store.get(&id)?;
    Ok(Json(VerdictsBody {
        session: id,
        reviewers: handle.session().reviewers.len(),
        verdicts: handle.aggregate().verdicts,
    }))
}

async fn result(
    State(store): State<Arc<SessionStore>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<ResultBody> {
    let agg = store.get(&id)?.aggregate();
    let unresolved = agg
        .verdicts
        .iter()
        .filter(|v| v.outcome == Outcome::Unresolved)
        .count();
    Ok(Json(ResultBody {
        session: id,
        complete: unresolved == 0,
        stopwords: agg.stopwords,
        non_trivial: agg.non_trivial,
        unresolved,
    }))
}

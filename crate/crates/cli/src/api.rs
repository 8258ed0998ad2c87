//! Read-only HTTP API over one immutable index snapshot.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use fuzzyrank_core::engine::Engine;
use fuzzyrank_core::index::{Index, IndexError};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use crate::response::{self, RequestError, SearchParams};

pub struct AppState {
    pub engine: Engine,
    pub index: Index,
}

impl IntoResponse for RequestError {
    fn into_response(self) -> Response {
        let status = match &self {
            RequestError::BadRequest(_) => StatusCode::BAD_REQUEST,
            RequestError::NotFound(_) => StatusCode::NOT_FOUND,
            RequestError::Index(IndexError::ConfigMismatch { .. }) => StatusCode::CONFLICT,
            RequestError::Index(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

fn bad_query(r: QueryRejection) -> RequestError {
    RequestError::BadRequest(r.body_text())
}

async fn search(
    State(state): State<Arc<AppState>>,
    params: Result<Query<SearchParams>, QueryRejection>,
) -> Result<Json<response::SearchResponse>, RequestError> {
    let Query(params) = params.map_err(bad_query)?;
    response::search(&state.engine, &state.index, &params).map(Json)
}

#[derive(Debug, Default, Deserialize)]
struct DocumentParams {
    q: Option<String>,
}

async fn document(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    params: Result<Query<DocumentParams>, QueryRejection>,
) -> Result<Json<response::DocumentResponse>, RequestError> {
    let Query(params) = params.map_err(bad_query)?;
    response::document(&state.engine, &state.index, &id, params.q.as_deref()).map(Json)
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "docs": state.index.len() }))
}

/// API routes, plus static files from `static_dir` for every other path.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/search", get(search))
        .route("/api/document/{id}", get(document))
        .route("/api/health", get(health))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api,
    }
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

//! `POST /code`: code parse trees supplied in the request body.
//!
//! Request: `{"date": "YYYY-MM-DD", "trees": ["(ROOT ...)", ...]}`.
//! Response: `{"records": [...]}`, each record a map of the 27 output
//! columns. The trees are treated as one story with no URL or source.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use chrono::NaiveDate;
use phoenix_core::coder::code_story;
use phoenix_core::enrich::enrich_story;
use phoenix_core::pipeline::{assign_event_ids, EventRecord, RecordJson};
use phoenix_core::treebank::parse_treebank;
use phoenix_core::{DictionarySet, EnrichTables};
use serde::{Deserialize, Serialize};
use tracing::error;

use crate::story_from_trees;

pub struct ServeState {
    pub dicts: DictionarySet,
    pub tables: EnrichTables,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CodeRequest {
    pub date: String,
    pub trees: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApiError {
    BadRequest(String),
    BadDate(String),
    Internal,
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::BadDate(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            ApiError::BadRequest(m) | ApiError::BadDate(m) => m,
            ApiError::Internal => "internal error",
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

#[derive(Serialize)]
struct RecordsBody<'a> {
    records: Vec<RecordJson<'a>>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status(), &ErrorBody { error: self.message() })
    }
}

fn json_response<T: Serialize>(status: StatusCode, body: &T) -> Response {
    match serde_json::to_vec(body) {
        Ok(bytes) => (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response(),
        Err(e) => {
            error!(error = %e, "response serialization failed");
            StatusCode::INTERNAL_SERVER_ERROR.into_response()
        }
    }
}

/// Validates and codes one request. Trees are numbered from 0 in errors.
pub fn code_request(state: &ServeState, request: &CodeRequest) -> Result<Vec<EventRecord>, ApiError> {
    let date = NaiveDate::parse_from_str(&request.date, "%Y-%m-%d")
        .map_err(|_| ApiError::BadDate(format!("invalid date {:?}, expected YYYY-MM-DD", request.date)))?;
    if request.trees.is_empty() {
        return Err(ApiError::BadRequest("no trees supplied".into()));
    }
    let trees = request
        .trees
        .iter()
        .enumerate()
        .map(|(i, raw)| parse_treebank(raw).map_err(|e| ApiError::BadRequest(format!("tree {i}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let doc = story_from_trees(&trees, date, "");
    let events = code_story(&doc, &state.dicts).map_err(|e| {
        error!(error = %e, "coding failed");
        ApiError::Internal
    })?;
    let mut records = enrich_story(&events, &doc, &state.dicts, &state.tables).map_err(|e| {
        error!(error = %e, "enrichment failed");
        ApiError::Internal
    })?;
    assign_event_ids(&mut records, date);
    Ok(records)
}

/// Status and JSON body for a raw request body.
pub fn handle_code(state: &ServeState, body: &[u8]) -> (StatusCode, String) {
    let result = serde_json::from_slice::<CodeRequest>(body)
        .map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
        .and_then(|req| code_request(state, &req));
    let encoded = match &result {
        Ok(records) => serde_json::to_string(&RecordsBody { records: records.iter().map(EventRecord::json).collect() }),
        Err(e) => serde_json::to_string(&ErrorBody { error: e.message() }),
    };
    match (result, encoded) {
        (Ok(_), Ok(body)) => (StatusCode::OK, body),
        (Err(e), Ok(body)) => (e.status(), body),
        (_, Err(e)) => {
            error!(error = %e, "response serialization failed");
            (StatusCode::INTERNAL_SERVER_ERROR, r#"{"error":"internal error"}"#.to_owned())
        }
    }
}

async fn code(State(state): State<Arc<ServeState>>, body: Bytes) -> Response {
    let (status, body) = tokio::task::spawn_blocking(move || handle_code(&state, &body))
        .await
        .unwrap_or_else(|e| {
            error!(error = %e, "coding task panicked");
            (StatusCode::INTERNAL_SERVER_ERROR, r#"{"error":"internal error"}"#.to_owned())
        });
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

#[derive(Serialize)]
struct Health<'a> {
    status: &'a str,
    dictionary_version: &'a str,
    goldstein_version: &'a str,
}

async fn health(State(state): State<Arc<ServeState>>) -> Response {
    json_response(
        StatusCode::OK,
        &Health {
            status: "ok",
            dictionary_version: state.dicts.version(),
            goldstein_version: state.tables.goldstein.version(),
        },
    )
}

pub fn router(state: Arc<ServeState>) -> Router {
    Router::new().route("/code", post(code)).route("/health", get(health)).with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    state: Arc<ServeState>,
    addr: SocketAddr,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

//! HTTP session service for the mutation explorer.
//!
//! Sessions live in memory, keyed by a random id and evicted least recently
//! used first. Requests against one session are serialized by its own lock.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lru::LruCache;
use quivertilt_core::quiver::QuiverJson;
use quivertilt_core::{compute_phi, eligible_steps, mutate, BoundQuiver, MutationKind, MutationStep, PhiInvariant};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{classification, Classification};

pub const DEFAULT_CAPACITY: usize = 256;

struct Session {
    initial: BoundQuiver,
    history: Vec<(MutationStep, BoundQuiver)>,
}

impl Session {
    fn current(&self) -> &BoundQuiver {
        self.history.last().map_or(&self.initial, |(_, q)| q)
    }
}

type Shared = Arc<tokio::sync::Mutex<Session>>;

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<LruCache<String, Shared>>>,
}

impl AppState {
    pub fn new(capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        AppState {
            sessions: Arc::new(Mutex::new(LruCache::new(cap))),
        }
    }

    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        let mut s = self.sessions.lock().expect("session table poisoned");
        s.get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session {id}")))
    }
}

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MutableVertex {
    pub vertex: String,
    pub kinds: Vec<MutationKind>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionView {
    pub id: String,
    pub quiver: BoundQuiver,
    pub phi: Option<PhiInvariant>,
    pub phi_error: Option<String>,
    pub classify: Classification,
    pub mutable_vertices: Vec<MutableVertex>,
    pub history: usize,
}

fn view(id: &str, s: &Session) -> SessionView {
    let q = s.current();
    let (phi, phi_error) = match compute_phi(q) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut mutable_vertices: Vec<MutableVertex> = Vec::new();
    for step in eligible_steps(q) {
        match mutable_vertices.iter_mut().find(|m| m.vertex == step.vertex) {
            Some(m) => m.kinds.push(step.kind),
            None => mutable_vertices.push(MutableVertex {
                vertex: step.vertex,
                kinds: vec![step.kind],
            }),
        }
    }
    SessionView {
        id: id.to_string(),
        quiver: q.clone(),
        phi,
        phi_error,
        classify: classification(q),
        mutable_vertices,
        history: s.history.len(),
    }
}

async fn create(State(st): State<AppState>, Json(body): Json<QuiverJson>) -> Result<impl IntoResponse, ApiError> {
    let q = BoundQuiver::try_from(body).map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session {
        initial: q,
        history: Vec::new(),
    };
    st.sessions
        .lock()
        .expect("session table poisoned")
        .put(id.clone(), Arc::new(tokio::sync::Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))))
}

async fn show(State(st): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let s = st.get(&id)?;
    let s = s.lock().await;
    Ok(Json(view(&id, &s)))
}

async fn apply(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Json(step): Json<MutationStep>,
) -> Result<Json<SessionView>, ApiError> {
    let s = st.get(&id)?;
    let mut s = s.lock().await;
    let next = mutate(s.current(), &step).map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    s.history.push((step, next));
    Ok(Json(view(&id, &s)))
}

async fn undo(State(st): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let s = st.get(&id)?;
    let mut s = s.lock().await;
    if s.history.pop().is_none() {
        return Err(ApiError(StatusCode::CONFLICT, "nothing to undo".into()));
    }
    Ok(Json(view(&id, &s)))
}

async fn trace(State(st): State<AppState>, Path(id): Path<String>) -> Result<Json<serde_json::Value>, ApiError> {
    let s = st.get(&id)?;
    let s = s.lock().await;
    let steps: Vec<&MutationStep> = s.history.iter().map(|(m, _)| m).collect();
    Ok(Json(json!({ "id": id, "steps": steps })))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/session", post(create))
        .route("/session/{id}", get(show))
        .route("/session/{id}/mutate", post(apply))
        .route("/session/{id}/undo", post(undo))
        .route("/session/{id}/trace", get(trace))
        .with_state(state)
}

/// `QUIVERTILT_PORT` wins over the port given on the command line.
pub fn effective_port(cli: u16) -> anyhow::Result<u16> {
    match std::env::var("QUIVERTILT_PORT") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| anyhow::anyhow!("QUIVERTILT_PORT={v:?}: {e}")),
        Err(_) => Ok(cli),
    }
}

pub async fn serve(port: u16) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(DEFAULT_CAPACITY))).await?;
    Ok(())
}

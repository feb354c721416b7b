//! HTTP play service: dungeon creation, game sessions and turn actions.
//!
//! Sessions live in memory and expire after an idle period. Each session has
//! its own async mutex, so actions on one session apply in arrival order while
//! different sessions proceed concurrently.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use uuid::Uuid;
use zdungeon_core::engine::{new_session, ActionInput, Event, GameState, SessionOptions};
use zdungeon_core::gan::WeightBundle;
use zdungeon_core::grammar::{default_backbone, RuleSet};
use zdungeon_core::layout::RoomSource;
use zdungeon_core::model::{Dungeon, Room};
use zdungeon_core::repair::generate_playable;

use crate::commands::Source;

pub const SESSION_IDLE_LIMIT: Duration = Duration::from_secs(30 * 60);

pub struct ServiceConfig {
    pub weights: Option<WeightBundle>,
    pub pool: Option<Vec<Room>>,
    pub idle_limit: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { weights: None, pool: None, idle_limit: SESSION_IDLE_LIMIT }
    }
}

pub struct SessionRecord {
    pub session_id: Uuid,
    pub dungeon_id: Uuid,
    pub state: GameState,
    pub created_at: Instant,
    pub last_action_at: Instant,
}

struct Inner {
    weights: Option<WeightBundle>,
    pool: Option<Vec<Room>>,
    rules: RuleSet,
    idle_limit: Duration,
    dungeons: RwLock<HashMap<Uuid, Arc<Dungeon>>>,
    sessions: Mutex<HashMap<Uuid, Arc<tokio::sync::Mutex<SessionRecord>>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState(Arc::new(Inner {
            weights: config.weights,
            pool: config.pool,
            rules: RuleSet::default_rules(),
            idle_limit: config.idle_limit,
            dungeons: RwLock::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
        }))
    }

    pub fn session_count(&self) -> usize {
        self.0.sessions.lock().unwrap().len()
    }

    /// Drops sessions idle for longer than the limit. Sessions busy with an
    /// action are kept.
    pub fn expire_idle(&self, now: Instant) -> usize {
        let limit = self.0.idle_limit;
        let mut sessions = self.0.sessions.lock().unwrap();
        let before = sessions.len();
        sessions.retain(|_, s| match s.try_lock() {
            Ok(rec) => now.saturating_duration_since(rec.last_action_at) <= limit,
            Err(_) => true,
        });
        before - sessions.len()
    }

    fn session(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<SessionRecord>>, ApiError> {
        let id = parse_id(id)?;
        self.expire_idle(Instant::now());
        self.0.sessions.lock().unwrap().get(&id).cloned().ok_or_else(|| ApiError::not_found("session", id))
    }

    fn dungeon(&self, id: &str) -> Result<(Uuid, Arc<Dungeon>), ApiError> {
        let id = parse_id(id)?;
        let d = self.0.dungeons.read().unwrap().get(&id).cloned().ok_or_else(|| ApiError::not_found("dungeon", id))?;
        Ok((id, d))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }

    fn not_found(what: &str, id: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("unknown {what} {id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

/// Ids that do not parse cannot name anything, so they are reported as unknown.
fn parse_id(raw: &str) -> Result<Uuid, ApiError> {
    Uuid::parse_str(raw).map_err(|_| ApiError::not_found("id", raw))
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed request: {e}")))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateDungeon {
    source: Source,
    seed: Option<u64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DungeonResponse<'a> {
    dungeon_id: Uuid,
    seed: u64,
    dungeon: &'a Dungeon,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateSession {
    dungeon_id: String,
    seed: Option<u64>,
    tier: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionRequest {
    action: ActionInput,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionResponse<'a> {
    session_id: Uuid,
    dungeon_id: Uuid,
    state: &'a GameState,
}

#[derive(Serialize)]
struct ActionResponse<'a> {
    state: &'a GameState,
    events: Vec<Event>,
}

async fn create_dungeon(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateDungeon = parse_body(&body)?;
    let available = match req.source {
        Source::Gan => app.0.weights.is_some(),
        Source::Pool => app.0.pool.is_some(),
    };
    if !available {
        return Err(ApiError::new(StatusCode::SERVICE_UNAVAILABLE, format!("{:?} source is not loaded", req.source)));
    }
    let seed = req.seed.unwrap_or_else(rand::random);
    let worker = app.clone();
    let generated = tokio::task::spawn_blocking(move || {
        let inner = &worker.0;
        let source = match req.source {
            Source::Gan => RoomSource::Gan(inner.weights.as_ref().expect("checked")),
            Source::Pool => RoomSource::Pool(inner.pool.as_ref().expect("checked")),
        };
        generate_playable(&default_backbone(), &inner.rules, source, seed)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("seed {seed}: {e}")))?;
    let id = Uuid::new_v4();
    let dungeon = Arc::new(generated.dungeon);
    app.0.dungeons.write().unwrap().insert(id, dungeon.clone());
    Ok((StatusCode::CREATED, Json(DungeonResponse { dungeon_id: id, seed, dungeon: &dungeon })).into_response())
}

async fn get_dungeon(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (id, dungeon) = app.dungeon(&id)?;
    Ok(Json(DungeonResponse { dungeon_id: id, seed: dungeon.meta.seed, dungeon: &dungeon }).into_response())
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateSession = parse_body(&body)?;
    let (dungeon_id, dungeon) = app.dungeon(&req.dungeon_id)?;
    let seed = req.seed.unwrap_or_else(rand::random);
    let state = new_session(dungeon, req.tier.unwrap_or(0), seed, SessionOptions::default());
    let now = Instant::now();
    let session_id = Uuid::new_v4();
    let body = Json(SessionResponse { session_id, dungeon_id, state: &state }).into_response();
    let record = SessionRecord { session_id, dungeon_id, state, created_at: now, last_action_at: now };
    app.0.sessions.lock().unwrap().insert(session_id, Arc::new(tokio::sync::Mutex::new(record)));
    Ok((StatusCode::CREATED, body).into_response())
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = app.session(&id)?;
    let rec = session.lock().await;
    Ok(Json(SessionResponse { session_id: rec.session_id, dungeon_id: rec.dungeon_id, state: &rec.state }).into_response())
}

async fn act(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let session = app.session(&id)?;
    let req: ActionRequest = parse_body(&body)?;
    let mut rec = session.lock().await;
    let events = rec.state.step(req.action).map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))?;
    rec.last_action_at = Instant::now();
    Ok(Json(ActionResponse { state: &rec.state, events }).into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/dungeons", post(create_dungeon))
        .route("/api/dungeons/{id}", get(get_dungeon))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/action", post(act))
        .with_state(state)
}

/// Binds the port and serves until the process ends.
pub async fn serve(port: u16, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    let state = AppState::new(config);
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.expire_idle(Instant::now());
        }
    });
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

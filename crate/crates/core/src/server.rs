//! HTTP/JSON backend for rating sessions.
//!
//! Stimuli are the pre-generated images of one set, found through their JSON
//! sidecars (`key` and `image` fields). Sessions live in memory; with a
//! journal directory every accepted event is also appended to disk and
//! replayed on startup.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::StimulusKey;
use crate::error::{invalid, Error, Result};
use crate::study::{Journal, JournalEvent, StudySession, SubmitError};
use crate::synth::Sidecar;

/// Page background for stimulus presentation (50 % gray).
pub const BACKGROUND: &str = "#808080";

#[derive(Clone, Debug)]
pub struct StimulusFile {
    pub key: String,
    pub path: PathBuf,
}

/// Reads every sidecar in `dir` that names a stimulus key and image,
/// ordered by key.
pub fn load_stimuli(dir: impl AsRef<Path>) -> Result<Vec<StimulusFile>> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io { path: dir.to_owned(), source })?;
    let mut by_key: HashMap<String, PathBuf> = HashMap::new();
    for entry in entries {
        let path = entry.map_err(|source| Error::Io { path: dir.to_owned(), source })?.path();
        if path.extension().is_none_or(|x| x != "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
        let Ok(side) = serde_json::from_str::<Sidecar>(&text) else {
            continue;
        };
        let (Some(key), Some(image)) = (side.key, side.image) else {
            continue;
        };
        let image = dir.join(image);
        if !image.is_file() {
            return Err(invalid(format!("{}: image {} is missing", path.display(), image.display())));
        }
        if let Some(prev) = by_key.insert(key.clone(), image) {
            return Err(invalid(format!("stimulus key {key} appears twice (also {})", prev.display())));
        }
    }
    if by_key.is_empty() {
        return Err(invalid(format!("no keyed stimulus sidecars in {}", dir.display())));
    }
    let keys = StimulusKey::sorted_unique(by_key.keys().map(String::as_str))?;
    Ok(keys.into_iter().map(|k| StimulusFile { path: by_key[&k.0].clone(), key: k.0 }).collect())
}

struct Inner {
    sessions: HashMap<String, StudySession>,
    created: u64,
}

#[derive(Clone)]
pub struct AppState {
    stimuli: Arc<Vec<StimulusFile>>,
    inner: Arc<Mutex<Inner>>,
    journal: Option<Journal>,
    seed: u64,
}

impl AppState {
    /// `seed` derives the pair order of sessions created without one.
    pub fn new(stimuli: Vec<StimulusFile>, seed: u64, journal: Option<Journal>) -> Result<Self> {
        let mut sessions = HashMap::new();
        if let Some(j) = &journal {
            for s in j.replay()? {
                sessions.insert(s.id.clone(), s);
            }
        }
        let created = sessions.len() as u64;
        Ok(Self {
            stimuli: Arc::new(stimuli),
            inner: Arc::new(Mutex::new(Inner { sessions, created })),
            journal,
            seed,
        })
    }

    fn keys(&self) -> Vec<String> {
        self.stimuli.iter().map(|s| s.key.clone()).collect()
    }

    fn journal(&self, id: &str, event: &JournalEvent) -> std::result::Result<(), ApiError> {
        match &self.journal {
            Some(j) => j.append(id, event).map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())),
            None => Ok(()),
        }
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn not_found(id: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, format!("unknown session {id}"))
}

#[derive(Debug, Default, Deserialize)]
pub struct CreateSession {
    pub participant_id: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub pair_count: usize,
}

async fn create(State(st): State<AppState>, body: Option<Json<CreateSession>>) -> ApiResult<(StatusCode, Json<Created>)> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let mut inner = st.inner.lock().expect("session lock");
    inner.created += 1;
    let n = inner.created;
    let id = format!("s{n:04}");
    let seed = req.seed.unwrap_or(st.seed.wrapping_add(n));
    let participant = req.participant_id.unwrap_or_else(|| format!("participant-{n:04}"));
    let session = StudySession::new(&id, &participant, st.keys(), seed)
        .map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    st.journal(&id, &JournalEvent::Create { id: id.clone(), participant, seed, stimuli: st.keys() })?;
    let pair_count = session.pair_count();
    inner.sessions.insert(id.clone(), session);
    Ok((StatusCode::CREATED, Json(Created { id, pair_count })))
}

fn image_url(st: &AppState, key: &str) -> String {
    let file = st.stimuli.iter().find(|s| s.key == key).expect("session keys come from the stimulus set");
    format!("/stimuli/{}", file.path.file_name().expect("image file name").to_string_lossy())
}

async fn next(State(st): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<serde_json::Value>> {
    let inner = st.inner.lock().expect("session lock");
    let s = inner.sessions.get(&id).ok_or_else(|| not_found(&id))?;
    let Some(task) = s.next_task() else {
        return Err(ApiError(StatusCode::CONFLICT, "session complete".into()));
    };
    Ok(Json(json!({
        "pair_index": task.pair_index,
        "left": { "key": task.left, "url": image_url(&st, &task.left) },
        "right": { "key": task.right, "url": image_url(&st, &task.right) },
        "progress": { "done": s.cursor(), "total": s.pair_count() },
        "background": BACKGROUND,
    })))
}

#[derive(Debug, Deserialize)]
pub struct RatingBody {
    pub pair_index: usize,
    pub rating: i64,
}

async fn rate(
    State(st): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Json(body): Json<RatingBody>,
) -> ApiResult<Json<serde_json::Value>> {
    let mut inner = st.inner.lock().expect("session lock");
    let s = inner.sessions.get_mut(&id).ok_or_else(|| not_found(&id))?;
    let rating = u8::try_from(body.rating)
        .ok()
        .filter(|r| (1..=9).contains(r))
        .ok_or_else(|| ApiError(StatusCode::UNPROCESSABLE_ENTITY, format!("rating {} outside 1..9", body.rating)))?;
    s.submit(body.pair_index, rating).map_err(|e| {
        let code = match e {
            SubmitError::InvalidRating(_) => StatusCode::UNPROCESSABLE_ENTITY,
            SubmitError::OutOfOrder { .. } | SubmitError::Complete => StatusCode::CONFLICT,
        };
        ApiError(code, e.to_string())
    })?;
    let (done, total, complete) = (s.cursor(), s.pair_count(), s.is_complete());
    st.journal(&id, &JournalEvent::Rating { pair_index: body.pair_index, rating })?;
    Ok(Json(json!({ "accepted": true, "progress": { "done": done, "total": total }, "complete": complete })))
}

async fn export(State(st): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let inner = st.inner.lock().expect("session lock");
    let s = inner.sessions.get(&id).ok_or_else(|| not_found(&id))?;
    let csv = s.export_csv().map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}

async fn stimulus(State(st): State<AppState>, UrlPath(name): UrlPath<String>) -> ApiResult<Response> {
    // only files of the loaded set are served, so no path from the URL reaches the filesystem
    let file = st
        .stimuli
        .iter()
        .find(|s| s.path.file_name().is_some_and(|f| f.to_string_lossy() == name))
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no stimulus {name}")))?;
    let bytes = tokio::fs::read(&file.path)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, format!("{}: {e}", file.path.display())))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], bytes).into_response())
}

async fn stimuli(State(st): State<AppState>) -> Json<serde_json::Value> {
    let list: Vec<_> = st.stimuli.iter().map(|s| json!({ "key": s.key, "url": image_url(&st, &s.key) })).collect();
    Json(json!({ "stimuli": list, "background": BACKGROUND }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/session", post(create))
        .route("/session/{id}/next", get(next))
        .route("/session/{id}/rating", post(rate))
        .route("/session/{id}/export", get(export))
        .route("/stimuli", get(stimuli))
        .route("/stimuli/{name}", get(stimulus))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| Error::Io { path: PathBuf::from(addr.to_string()), source })?;
    log::info!("study server listening on {}", addr);
    axum::serve(listener, router(state))
        .await
        .map_err(|source| Error::Io { path: PathBuf::from(addr.to_string()), source })
}

//! Session-based HTTP service for playing the rendezvous game against the
//! engine's optimal play.
//!
//! ```text
//! POST   /v1/games                 {instance, humanRole}   -> {id, state}
//! GET    /v1/games/{id}                                    -> state
//! POST   /v1/games/{id}/placement  {vertices}              -> state
//! POST   /v1/games/{id}/move       {pair} | {agents}       -> state
//! GET    /v1/games/{id}/hints                              -> [hint]
//! DELETE /v1/games/{id}
//! ```

mod session;

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State as AxumState};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rendezvous::game::{WinTable, DEFAULT_POSITION_BUDGET};
use rendezvous::graph::parse_instance;
use rendezvous::{Instance, SolveError, Vertex};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use session::{Action, Annotation, Event, PlayError, Role, Session, State, Status};

#[derive(Debug, Clone)]
pub struct Config {
    /// Cap on win-table positions per instance.
    pub budget: u128,
    /// Append-only JSON-lines event log.
    pub log: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: DEFAULT_POSITION_BUDGET,
            log: None,
        }
    }
}

type TableKey = (usize, Vec<(Vertex, Vertex)>, usize);

/// Shared service state. Sessions are locked one at a time; tables are
/// shared read-only between sessions on the same graph and team size.
pub struct Arena {
    config: Config,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    tables: Mutex<HashMap<TableKey, Arc<WinTable>>>,
    log: Option<Mutex<File>>,
}

/// One line of the event log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogRecord {
    pub session: String,
    pub seq: usize,
    pub event: Event,
}

impl Arena {
    pub fn new(config: Config) -> std::io::Result<Self> {
        let log = match &config.log {
            Some(path) => Some(Mutex::new(
                OpenOptions::new().create(true).append(true).open(path)?,
            )),
            None => None,
        };
        Ok(Arena {
            config,
            sessions: RwLock::default(),
            tables: Mutex::default(),
            log,
        })
    }

    pub fn table(&self, inst: &Instance) -> Result<Arc<WinTable>, PlayError> {
        let key = (inst.graph.n(), inst.graph.edges(), inst.k);
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let table =
            WinTable::build(&inst.graph, inst.k, self.config.budget).map_err(|e| match e {
                SolveError::BudgetExceeded {
                    estimate, budget, ..
                } => PlayError::Budget(format!(
                    "the instance has about {estimate} positions, over the budget of {budget}"
                )),
                other => PlayError::Budget(other.to_string()),
            })?;
        Ok(self
            .tables
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::new(table))
            .clone())
    }

    pub fn create(&self, instance: Instance, human: Role) -> Result<(String, State), PlayError> {
        let table = self.table(&instance)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(id.clone(), instance, human, table);
        let state = session.state();
        self.record(&id, 0, session.events());
        self.sessions
            .write()
            .unwrap()
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok((id, state))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, PlayError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| PlayError::NotFound(id.to_string()))
    }

    /// Runs `op` on a session and logs whatever events it appended.
    pub fn with_session<T>(
        &self,
        id: &str,
        op: impl FnOnce(&mut Session) -> Result<T, PlayError>,
    ) -> Result<T, PlayError> {
        let handle = self.session(id)?;
        let mut session = handle.lock().unwrap();
        let before = session.events().len();
        let out = op(&mut session);
        self.record(id, before, &session.events()[before..]);
        out
    }

    pub fn delete(&self, id: &str) -> Result<(), PlayError> {
        let removed = self
            .sessions
            .write()
            .unwrap()
            .remove(id)
            .ok_or_else(|| PlayError::NotFound(id.to_string()))?;
        let seq = removed.lock().unwrap().events().len();
        self.record(id, seq, &[Event::Deleted]);
        Ok(())
    }

    fn record(&self, id: &str, first: usize, events: &[Event]) {
        let Some(log) = &self.log else { return };
        let mut file = log.lock().unwrap();
        for (i, event) in events.iter().enumerate() {
            let rec = LogRecord {
                session: id.to_string(),
                seq: first + i,
                event: event.clone(),
            };
            let line = serde_json::to_string(&rec).expect("log record serialization");
            // a failed log write must not take the game down
            let _ = writeln!(file, "{line}");
        }
    }

    /// Rebuilds every live session from an event log.
    pub fn replay_log(&self, text: &str) -> Result<HashMap<String, Session>, PlayError> {
        let mut per_session: Vec<(String, Vec<Event>)> = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let rec: LogRecord = serde_json::from_str(line)
                .map_err(|e| PlayError::BadRequest(format!("bad log line: {e}")))?;
            match per_session.iter_mut().find(|(id, _)| *id == rec.session) {
                Some((_, events)) => events.push(rec.event),
                None => per_session.push((rec.session, vec![rec.event])),
            }
        }
        let mut out = HashMap::new();
        for (id, events) in per_session {
            if events.last() == Some(&Event::Deleted) {
                continue;
            }
            let session = Session::replay(id.clone(), &events, |inst| self.table(inst))?;
            out.insert(id, session);
        }
        Ok(out)
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ErrorBody {
    code: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    legal_moves: Option<Vec<Value>>,
}

struct ApiError(PlayError);

impl From<PlayError> for ApiError {
    fn from(e: PlayError) -> Self {
        ApiError(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(PlayError::BadRequest(e.body_text()))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let e = self.0;
        let status = match &e {
            PlayError::NotFound(_) => StatusCode::NOT_FOUND,
            PlayError::WrongTurn(_)
            | PlayError::Illegal { .. }
            | PlayError::Finished
            | PlayError::AwaitingPlacement
            | PlayError::AlreadyPlaced => StatusCode::CONFLICT,
            PlayError::Budget(_) => StatusCode::UNPROCESSABLE_ENTITY,
            PlayError::Instance(_) | PlayError::BadRequest(_) => StatusCode::BAD_REQUEST,
        };
        let legal_moves = match &e {
            PlayError::Illegal { legal, .. } => Some(legal.clone()),
            _ => None,
        };
        (
            status,
            Json(ErrorBody {
                code: e.code(),
                message: e.to_string(),
                legal_moves,
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CreateBody {
    instance: Value,
    human_role: Role,
}

#[derive(Serialize)]
struct Created {
    id: String,
    state: State,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementBody {
    vertices: Vec<Vertex>,
}

async fn create(
    AxumState(arena): AxumState<Arc<Arena>>,
    body: Result<Json<CreateBody>, JsonRejection>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(body) = body?;
    let instance = parse_instance(&body.instance.to_string()).map_err(PlayError::from)?;
    // table construction is CPU-bound
    let (id, state) = tokio::task::spawn_blocking(move || arena.create(instance, body.human_role))
        .await
        .map_err(|e| PlayError::BadRequest(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(Created { id, state })))
}

async fn get_state(
    AxumState(arena): AxumState<Arc<Arena>>,
    Path(id): Path<String>,
) -> ApiResult<State> {
    Ok(Json(arena.with_session(&id, |s| Ok(s.state()))?))
}

async fn place(
    AxumState(arena): AxumState<Arc<Arena>>,
    Path(id): Path<String>,
    body: Result<Json<PlacementBody>, JsonRejection>,
) -> ApiResult<State> {
    let Json(body) = body?;
    Ok(Json(arena.with_session(&id, |s| {
        s.place(body.vertices)?;
        Ok(s.state())
    })?))
}

async fn submit(
    AxumState(arena): AxumState<Arc<Arena>>,
    Path(id): Path<String>,
    body: Result<Json<Action>, JsonRejection>,
) -> ApiResult<State> {
    let Json(action) = body?;
    Ok(Json(arena.with_session(&id, |s| {
        s.submit(action)?;
        Ok(s.state())
    })?))
}

async fn hints(
    AxumState(arena): AxumState<Arc<Arena>>,
    Path(id): Path<String>,
) -> ApiResult<Vec<Value>> {
    Ok(Json(arena.with_session(&id, |s| Ok(s.hints()))?))
}

async fn delete(
    AxumState(arena): AxumState<Arc<Arena>>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    arena.delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

pub fn router(arena: Arc<Arena>) -> Router {
    Router::new()
        .route("/v1/games", post(create))
        .route("/v1/games/{id}", get(get_state).delete(delete))
        .route("/v1/games/{id}/placement", post(place))
        .route("/v1/games/{id}/move", post(submit))
        .route("/v1/games/{id}/hints", get(hints))
        .with_state(arena)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let arena = Arc::new(Arena::new(config)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(arena)).await
}

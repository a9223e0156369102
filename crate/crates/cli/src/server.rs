//! HTTP task serving and label collection.
//!
//! Submitted records go to an append-only line log; on start the log is
//! replayed to rebuild the queue. Mutations take a single mutex around the
//! log append and the queue update.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use rcsplit_core::annotate::{
    validate_record, AnnotationRecord, Relation, Skill, TaskPayload, Validity, Violation,
};
use rcsplit_core::provenance::read_record_lines;
use rcsplit_core::{Error, Result};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub store: PathBuf,
    pub allow_export: bool,
    pub lease: Duration,
}

struct Lease {
    annotator: String,
    expires: Instant,
}

/// Queue and log state; everything behind one lock.
pub struct Session {
    tasks: Vec<TaskPayload>,
    index: HashMap<String, usize>,
    submitted: HashSet<String>,
    leases: HashMap<String, Lease>,
    log: File,
    log_lines: Vec<String>,
}

#[derive(Clone)]
pub struct AppState {
    session: Arc<Mutex<Session>>,
    config: Arc<ServerConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Progress {
    pub total: usize,
    pub remaining: usize,
    pub submitted: usize,
    pub leased: usize,
}

impl Session {
    fn progress(&self, now: Instant) -> Progress {
        let leased = self
            .leases
            .iter()
            .filter(|(id, l)| l.expires > now && !self.submitted.contains(*id))
            .count();
        Progress {
            total: self.tasks.len(),
            remaining: self.tasks.len() - self.submitted.len(),
            submitted: self.submitted.len(),
            leased,
        }
    }

    fn replay(&mut self, line: &str, line_no: usize, path: &std::path::Path) -> Result<()> {
        let r: AnnotationRecord = serde_json::from_str(line).map_err(|e| Error::MalformedFile {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?;
        if !self.index.contains_key(&r.task_id) {
            return Err(Error::UnknownTaskId(r.task_id));
        }
        self.submitted.insert(r.task_id);
        self.log_lines.push(line.to_string());
        Ok(())
    }
}

impl AppState {
    /// Load tasks and replay any existing log at `config.store`.
    pub fn open(tasks: Vec<TaskPayload>, config: ServerConfig) -> Result<Self> {
        let index: HashMap<String, usize> = tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.task_id.clone(), i))
            .collect();
        if index.len() != tasks.len() {
            return Err(Error::InvalidArgument(
                "duplicate task ids in task file".into(),
            ));
        }
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&config.store)
            .map_err(|e| Error::io(&config.store, e))?;
        let mut session = Session {
            tasks,
            index,
            submitted: HashSet::new(),
            leases: HashMap::new(),
            log,
            log_lines: Vec::new(),
        };
        let existing = read_record_lines(&config.store)?;
        for (n, line) in &existing.lines {
            session.replay(line, *n, &config.store)?;
        }
        Ok(Self {
            session: Arc::new(Mutex::new(session)),
            config: Arc::new(config),
        })
    }

    pub fn progress(&self) -> Progress {
        self.session
            .lock()
            .expect("session lock")
            .progress(Instant::now())
    }

    /// Submitted task ids, sorted.
    pub fn submitted(&self) -> Vec<String> {
        let s = self.session.lock().expect("session lock");
        let mut v: Vec<String> = s.submitted.iter().cloned().collect();
        v.sort();
        v
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/tasks/next", get(next_task))
        .route("/api/labels", post(submit))
        .route("/api/progress", get(progress))
        .route("/api/schema", get(schema))
        .route("/api/export", get(export))
        .with_state(state)
}

pub async fn serve(state: AppState, bind: SocketAddr) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| Error::io(format!("bind {bind}"), e))?;
    eprintln!("{}", json!({"listening": bind.to_string()}));
    axum::serve(listener, router(state))
        .await
        .map_err(|e| Error::io("<server>", e))
}

#[derive(Deserialize)]
struct NextQuery {
    annotator: String,
}

async fn next_task(State(state): State<AppState>, Query(q): Query<NextQuery>) -> Response {
    let now = Instant::now();
    let mut s = state.session.lock().expect("session lock");
    s.leases.retain(|_, l| l.expires > now);
    let held = s
        .leases
        .iter()
        .filter(|(id, l)| l.annotator == q.annotator && !s.submitted.contains(*id))
        .map(|(id, _)| s.index[id])
        .min();
    let pick = held.or_else(|| {
        s.tasks
            .iter()
            .position(|t| !s.submitted.contains(&t.task_id) && !s.leases.contains_key(&t.task_id))
    });
    match pick {
        Some(i) => {
            let task = s.tasks[i].clone();
            s.leases.insert(
                task.task_id.clone(),
                Lease {
                    annotator: q.annotator,
                    expires: now + state.config.lease,
                },
            );
            Json(task).into_response()
        }
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

fn unprocessable(violations: Vec<Violation>) -> Response {
    (
        StatusCode::UNPROCESSABLE_ENTITY,
        Json(json!({ "violations": violations })),
    )
        .into_response()
}

async fn submit(State(state): State<AppState>, body: Bytes) -> Response {
    let mut record: AnnotationRecord = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => {
            return unprocessable(vec![Violation {
                field: "body".into(),
                message: e.to_string(),
            }])
        }
    };
    let violations = validate_record(&record);
    if !violations.is_empty() {
        return unprocessable(violations);
    }
    if record.timestamp.is_empty() {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        record.timestamp = secs.to_string();
    }
    let line = serde_json::to_string(&record).expect("record serializes");
    let mut s = state.session.lock().expect("session lock");
    if !s.index.contains_key(&record.task_id) {
        return (
            StatusCode::NOT_FOUND,
            Json(json!({"error": "unknown_task_id"})),
        )
            .into_response();
    }
    if s.submitted.contains(&record.task_id) {
        return (
            StatusCode::CONFLICT,
            Json(json!({"error": "already_submitted"})),
        )
            .into_response();
    }
    let written = writeln!(s.log, "{line}").and_then(|_| s.log.sync_data());
    if let Err(e) = written {
        return (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(json!({"error": "store_unwritable", "message": e.to_string()})),
        )
            .into_response();
    }
    s.leases.remove(&record.task_id);
    s.submitted.insert(record.task_id.clone());
    s.log_lines.push(line);
    let p = s.progress(Instant::now());
    Json(json!({"status": "ok", "remaining": p.remaining})).into_response()
}

async fn progress(State(state): State<AppState>) -> Response {
    Json(state.progress()).into_response()
}

fn names<T: serde::Serialize>(values: &[T]) -> Vec<Value> {
    values
        .iter()
        .map(|v| serde_json::to_value(v).expect("enum serializes"))
        .collect()
}

pub fn label_schema() -> Value {
    json!({
        "validity": names(&Validity::ALL),
        "skill": names(&Skill::ALL),
        "relation": names(&Relation::ALL),
        "fields": {
            "task_id": "string, required",
            "validity": "one of validity, required",
            "skill": "one of skill",
            "multi_sentence": "boolean",
            "relation": "one of relation",
            "annotator_id": "string, required",
            "timestamp": "string, filled by the server when empty",
            "note": "free text",
        },
        "constraints": [
            "skill is present exactly when validity is valid",
            "multi_sentence is present exactly when validity is valid",
            "relation is present exactly when multi_sentence is true",
        ],
    })
}

async fn schema() -> Response {
    Json(label_schema()).into_response()
}

async fn export(State(state): State<AppState>) -> Response {
    if !state.config.allow_export {
        return (
            StatusCode::FORBIDDEN,
            Json(json!({"error": "export_disabled"})),
        )
            .into_response();
    }
    let s = state.session.lock().expect("session lock");
    let mut body = s.log_lines.join("\n");
    if !body.is_empty() {
        body.push('\n');
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

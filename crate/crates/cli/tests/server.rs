use std::path::{Path, PathBuf};
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use rcsplit_cli::server::{router, AppState, ServerConfig};
use rcsplit_core::annotate::{read_key, read_payloads, TaskPayload};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(rel)
}

fn fixture_tasks() -> Vec<TaskPayload> {
    read_payloads(&data("annotation/tasks.jsonl")).unwrap()
}

fn fixture_lines(name: &str) -> Vec<String> {
    std::fs::read_to_string(data(name))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}

fn open(tasks: Vec<TaskPayload>, store: &Path, allow_export: bool) -> AppState {
    AppState::open(
        tasks,
        ServerConfig {
            store: store.to_path_buf(),
            allow_export,
            lease: Duration::from_secs(1800),
        },
    )
    .unwrap()
}

async fn call(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<String>,
) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, bytes)
}

async fn post(app: &Router, body: &str) -> (StatusCode, Vec<u8>) {
    call(app, Method::POST, "/api/labels", Some(body.to_string())).await
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    call(app, Method::GET, uri, None).await
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn log_lines(store: &Path) -> usize {
    std::fs::read_to_string(store)
        .map(|s| s.lines().count())
        .unwrap_or(0)
}

#[tokio::test]
async fn shared_fixture_records_accepted_and_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("records.jsonl");
    let app = router(open(fixture_tasks(), &store, false));
    for line in fixture_lines("annotation/records_invalid.jsonl") {
        let (status, body) = post(&app, &line).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{line}");
        assert!(!json(&body)["violations"].as_array().unwrap().is_empty());
    }
    assert_eq!(log_lines(&store), 0);
    for (i, line) in fixture_lines("annotation/records_valid.jsonl")
        .iter()
        .enumerate()
    {
        let (status, body) = post(&app, line).await;
        assert_eq!(status, StatusCode::OK, "{line}");
        assert_eq!(json(&body)["remaining"], 19 - i);
        assert_eq!(log_lines(&store), i + 1);
    }
}

#[tokio::test]
async fn ambiguous_with_skill_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(open(fixture_tasks(), &dir.path().join("s.jsonl"), false));
    let body = r#"{"task_id":"0000000000000001","validity":"ambiguous","skill":"knowledge","annotator_id":"a"}"#;
    let (status, bytes) = post(&app, body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(json(&bytes)["violations"][0]["field"], "skill");
}

#[tokio::test]
async fn duplicate_and_unknown_submissions() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    let app = router(open(fixture_tasks(), &store, false));
    let body = r#"{"task_id":"0000000000000001","validity":"unsolvable","annotator_id":"a"}"#;
    assert_eq!(post(&app, body).await.0, StatusCode::OK);
    assert_eq!(post(&app, body).await.0, StatusCode::CONFLICT);
    let unknown = r#"{"task_id":"ffffffffffffffff","validity":"unsolvable","annotator_id":"a"}"#;
    assert_eq!(post(&app, unknown).await.0, StatusCode::NOT_FOUND);
    assert_eq!(log_lines(&store), 1);
    let line = std::fs::read_to_string(&store).unwrap();
    assert!(!json(line.trim().as_bytes())["timestamp"]
        .as_str()
        .unwrap()
        .is_empty());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_duplicates_accept_exactly_one() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    let app = router(open(fixture_tasks(), &store, false));
    let body = r#"{"task_id":"0000000000000002","validity":"single_candidate","annotator_id":"a"}"#;
    let handles: Vec<_> = (0..16)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move { post(&app, body).await.0 })
        })
        .collect();
    let mut statuses = Vec::new();
    for h in handles {
        statuses.push(h.await.unwrap());
    }
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::OK).count(), 1);
    assert_eq!(
        statuses
            .iter()
            .filter(|s| **s == StatusCode::CONFLICT)
            .count(),
        15
    );
    assert_eq!(log_lines(&store), 1);
}

#[tokio::test]
async fn restart_replays_log() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    let app = router(open(fixture_tasks(), &store, true));
    let valid = fixture_lines("annotation/records_valid.jsonl");
    for line in &valid[..5] {
        assert_eq!(post(&app, line).await.0, StatusCode::OK);
    }
    let (_, before) = get(&app, "/api/export").await;
    drop(app);

    let reopened = open(fixture_tasks(), &store, true);
    let p = reopened.progress();
    assert_eq!((p.total, p.submitted, p.remaining), (20, 5, 15));
    let app = router(reopened);
    assert_eq!(post(&app, &valid[0]).await.0, StatusCode::CONFLICT);
    let (_, after) = get(&app, "/api/export").await;
    assert_eq!(before, after);

    let again = open(fixture_tasks(), &store, true);
    assert_eq!(
        again.submitted(),
        open(fixture_tasks(), &store, true).submitted()
    );
    assert_eq!(again.progress().submitted, 5);
    assert_eq!(log_lines(&store), 5);
}

#[tokio::test]
async fn next_task_leases_and_exhausts() {
    let dir = tempfile::tempdir().unwrap();
    let tasks: Vec<TaskPayload> = fixture_tasks().into_iter().take(2).collect();
    let app = router(open(tasks, &dir.path().join("s.jsonl"), false));
    let (s, a1) = get(&app, "/api/tasks/next?annotator=a").await;
    assert_eq!(s, StatusCode::OK);
    let (_, a2) = get(&app, "/api/tasks/next?annotator=a").await;
    assert_eq!(a1, a2);
    let (_, b) = get(&app, "/api/tasks/next?annotator=b").await;
    assert_ne!(json(&a1)["task_id"], json(&b)["task_id"]);
    assert_eq!(
        get(&app, "/api/tasks/next?annotator=c").await.0,
        StatusCode::NO_CONTENT
    );
    let (_, progress) = get(&app, "/api/progress").await;
    assert_eq!(json(&progress)["leased"], 2);

    for (who, task) in [("a", &a1), ("b", &b)] {
        let id = json(task)["task_id"].as_str().unwrap().to_string();
        let body =
            format!(r#"{{"task_id":"{id}","validity":"unsolvable","annotator_id":"{who}"}}"#);
        assert_eq!(post(&app, &body).await.0, StatusCode::OK);
    }
    assert_eq!(
        get(&app, "/api/tasks/next?annotator=a").await.0,
        StatusCode::NO_CONTENT
    );
    let (_, progress) = get(&app, "/api/progress").await;
    assert_eq!(json(&progress)["remaining"], 0);
}

#[tokio::test]
async fn export_requires_flag() {
    let dir = tempfile::tempdir().unwrap();
    let closed = router(open(fixture_tasks(), &dir.path().join("a.jsonl"), false));
    assert_eq!(get(&closed, "/api/export").await.0, StatusCode::FORBIDDEN);
    let open_app = router(open(fixture_tasks(), &dir.path().join("b.jsonl"), true));
    let (s, body) = get(&open_app, "/api/export").await;
    assert_eq!(s, StatusCode::OK);
    assert!(body.is_empty());
}

#[tokio::test]
async fn schema_lists_labels() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(open(fixture_tasks(), &dir.path().join("s.jsonl"), false));
    let (s, body) = get(&app, "/api/schema").await;
    assert_eq!(s, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["validity"].as_array().unwrap().len(), 4);
    assert_eq!(v["skill"].as_array().unwrap().len(), 5);
    assert_eq!(v["relation"].as_array().unwrap().len(), 4);
}

/// Sample real tasks from the synthetic pipeline, then scan every response
/// byte for anything held only in the key.
#[tokio::test]
async fn responses_never_leak_key_fields() {
    let dir = tempfile::tempdir().unwrap();
    let d = |f: &str| dir.path().join(f).display().to_string();
    let syn = |f: &str| data("synthetic").join(f).display().to_string();
    let steps: [Vec<String>; 4] = [
        vec![
            "ingest".into(),
            "--input".into(),
            syn("dataset.jsonl"),
            "--out".into(),
            d("ds.jsonl"),
        ],
        vec![
            "similar".into(),
            "--dataset".into(),
            d("ds.jsonl"),
            "--out".into(),
            d("profiles.jsonl"),
        ],
        vec![
            "partition".into(),
            "--dataset".into(),
            d("ds.jsonl"),
            "--k2-predictions".into(),
            syn("predictions_k2.json"),
            "--profiles".into(),
            d("profiles.jsonl"),
            "--out".into(),
            d("a.jsonl"),
        ],
        vec![
            "sample".into(),
            "--dataset".into(),
            d("ds.jsonl"),
            "--assignments".into(),
            d("a.jsonl"),
            "--n".into(),
            "5".into(),
            "--seed".into(),
            "3".into(),
            "--tasks-out".into(),
            d("tasks.jsonl"),
            "--key-out".into(),
            d("key.jsonl"),
        ],
    ];
    for step in steps {
        let argv = std::iter::once("rcsplit".to_string()).chain(step);
        assert_eq!(rcsplit_cli::run(argv), 0);
    }
    let tasks = read_payloads(Path::new(&d("tasks.jsonl"))).unwrap();
    let key = read_key(Path::new(&d("key.jsonl"))).unwrap();
    assert_eq!(tasks.len(), 10);

    let app = router(open(tasks.clone(), &dir.path().join("s.jsonl"), true));
    let mut seen = Vec::new();
    for uri in ["/api/schema", "/api/progress"] {
        seen.push(get(&app, uri).await.1);
    }
    for i in 0..tasks.len() {
        let (s, body) = get(&app, &format!("/api/tasks/next?annotator=a{i}")).await;
        assert_eq!(s, StatusCode::OK);
        let id = json(&body)["task_id"].as_str().unwrap().to_string();
        seen.push(body);
        let rec = format!(r#"{{"task_id":"{id}","validity":"unsolvable","annotator_id":"a{i}"}}"#);
        seen.push(post(&app, &rec).await.1);
    }
    seen.push(post(&app, "{}").await.1);
    seen.push(get(&app, "/api/export").await.1);
    let all = String::from_utf8(seen.concat()).unwrap().to_lowercase();
    let words: std::collections::HashSet<&str> = all
        .split(|c: char| !c.is_alphanumeric() && c != '_')
        .collect();
    for label in [
        "easy",
        "hard",
        "subset",
        "score",
        "scores",
        "item_id",
        "baseline_scores",
        "k2",
    ] {
        assert!(!words.contains(label), "response bytes contain {label:?}");
    }
    for k in &key {
        assert!(
            !all.contains(&k.item_id.to_lowercase()),
            "response bytes contain {:?}",
            k.item_id
        );
    }
}

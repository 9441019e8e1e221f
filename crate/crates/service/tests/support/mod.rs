//! Helpers shared by the service test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use axum::body::{Body, Bytes};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Runs the `mcdm` binary in `dir`.
pub fn mcdm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcdm"))
        .current_dir(dir)
        .env_remove("MCDM_STORE")
        .env_remove("MCDM_PORT")
        .args(args)
        .output()
        .expect("mcdm binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Bytes,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }
}

pub async fn send(
    app: &Router,
    method: Method,
    uri: &str,
    content_type: Option<&str>,
    body: impl Into<Body>,
) -> Reply {
    let mut request = Request::builder().method(method).uri(uri);
    if let Some(ct) = content_type {
        request = request.header("content-type", ct);
    }
    let response = app
        .clone()
        .oneshot(request.body(body.into()).unwrap())
        .await
        .unwrap();
    let status = response.status();
    let body = response.into_body().collect().await.unwrap().to_bytes();
    Reply { status, body }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Method::GET, uri, None, Body::empty()).await
}

pub async fn post_json(app: &Router, uri: &str, body: impl Into<Body>) -> Reply {
    send(app, Method::POST, uri, Some("application/json"), body).await
}

pub async fn put_json(app: &Router, uri: &str, body: impl Into<Body>) -> Reply {
    send(app, Method::PUT, uri, Some("application/json"), body).await
}

/// Creates a session from a criteria document and returns its id.
pub async fn create_session(app: &Router, criteria: Vec<u8>) -> String {
    let reply = post_json(app, "/sessions", criteria).await;
    assert_eq!(
        reply.status,
        StatusCode::CREATED,
        "{}",
        String::from_utf8_lossy(&reply.body)
    );
    reply.json()["session_id"].as_str().unwrap().to_string()
}

/// A session with the canonical criteria and the Table 2 matrix at weighted stage.
pub async fn table2_session(app: &Router) -> String {
    let id = create_session(app, read_fixture("criteria.json")).await;
    let reply = send(
        app,
        Method::PUT,
        &format!("/sessions/{id}/matrix?stage=weighted"),
        Some("text/csv"),
        read_fixture("table2.csv"),
    )
    .await;
    assert_eq!(
        reply.status,
        StatusCode::OK,
        "{}",
        String::from_utf8_lossy(&reply.body)
    );
    id
}

/// Uploads every fixture survey, in file-name order.
pub async fn put_fixture_surveys(app: &Router, id: &str) {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixture("surveys"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    for path in paths {
        let bytes = std::fs::read(&path).unwrap();
        let survey: Value = serde_json::from_slice(&bytes).unwrap();
        let respondent = survey["respondent"].as_str().unwrap();
        let reply = put_json(app, &format!("/sessions/{id}/surveys/{respondent}"), bytes).await;
        assert_eq!(
            reply.status,
            StatusCode::OK,
            "{}",
            String::from_utf8_lossy(&reply.body)
        );
    }
}

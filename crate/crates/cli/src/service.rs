//! In-memory session service under `/api/v1`.
//!
//! Each session holds a net, its current marking and the steps fired so far.
//! Mutations carry the version they were based on; a stale version is
//! answered with 409.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sonet_core::bsa::{bsa_scenario_of, scenario_analysis};
use sonet_core::csa::{csa_maximal_scenarios, csa_scenario_of, csa_scenarios};
use sonet_core::netio::{export_dot, parse, DotOptions};
use sonet_core::scenarios::{enumerate_scenarios, maximal_scenarios, scenario_of};
use sonet_core::semantics::{enabled_step, fire, run};
use sonet_core::{fixtures, AnyNet, Limits, Marking, NetDocument, NodeSet, SemanticsError, Step, StepSequence, StepSystem};
use uuid::Uuid;

use crate::report::{phase_views, state_view, step_view, StateView, STEP_CAP};

#[derive(Debug, Clone)]
pub struct Config {
    pub limits: Limits,
    pub step_cap: usize,
    pub snapshot_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self { limits: Limits::default(), step_cap: STEP_CAP, snapshot_dir: None }
    }
}

#[derive(Debug)]
pub struct Session {
    pub id: Uuid,
    pub document: NetDocument,
    pub net: AnyNet,
    pub current: Marking,
    /// Fired steps with the marking each was fired from.
    pub history: Vec<(Step, Marking)>,
    pub version: u64,
}

impl Session {
    pub fn recorded(&self) -> StepSequence {
        StepSequence(self.history.iter().map(|(u, _)| u.clone()).collect())
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<Uuid, Arc<RwLock<Session>>>>>,
    config: Arc<Config>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        Self { sessions: Arc::default(), config: Arc::new(config) }
    }

    fn session(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        let id = Uuid::parse_str(id).map_err(|_| ApiError::not_found(id))?;
        self.sessions.read().get(&id).cloned().ok_or_else(|| ApiError::not_found(&id.to_string()))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, message: impl Into<String>) -> Self {
        Self { status, body: json!({ "error": error, "message": message.into() }) }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session `{id}`"))
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn stale(expected: u64, current: u64) -> Self {
        let mut e = Self::new(
            StatusCode::CONFLICT,
            "stale_version",
            format!("request was based on version {expected} but the session is at {current}"),
        );
        e.body["version"] = json!(current);
        e
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/fixtures", get(list_fixtures))
        .route("/api/v1/sessions", post(create_session))
        .route("/api/v1/sessions/{id}", get(get_session).delete(delete_session))
        .route("/api/v1/sessions/{id}/fire", post(fire_step))
        .route("/api/v1/sessions/{id}/preview", post(preview_step))
        .route("/api/v1/sessions/{id}/undo", post(undo))
        .route("/api/v1/sessions/{id}/reset", post(reset))
        .route("/api/v1/sessions/{id}/trace", get(trace))
        .route("/api/v1/sessions/{id}/scenario", get(trace_scenario))
        .route("/api/v1/sessions/{id}/scenarios", get(list_scenarios))
        .route("/api/v1/sessions/{id}/dot", get(dot))
        .route("/api/v1/sessions/{id}/snapshot", post(snapshot))
        .with_state(state)
}

#[derive(Serialize)]
struct SessionView {
    id: Uuid,
    version: u64,
    kind: &'static str,
    state: StateView,
    trace: String,
    document: Value,
}

fn view(s: &Session, cap: usize) -> SessionView {
    let text = sonet_core::netio::serialize(&s.document);
    SessionView {
        id: s.id,
        version: s.version,
        kind: s.net.kind().as_str(),
        state: state_view(&s.net, &s.current, cap, false),
        trace: s.recorded().to_string(),
        document: serde_json::from_str(&text).expect("serialized documents are JSON"),
    }
}

async fn list_fixtures() -> Json<Value> {
    let list: Vec<Value> = fixtures::NAMES
        .iter()
        .map(|n| json!({ "name": n, "kind": fixtures::document(n).expect("bundled").kind() }))
        .collect();
    Json(json!({ "fixtures": list }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    fixture: Option<String>,
    document: Option<Value>,
    /// Steps to replay after creation, in step-sequence notation.
    trace: Option<String>,
}

async fn create_session(
    State(app): State<AppState>,
    Json(req): Json<CreateRequest>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let document = match (req.fixture, req.document) {
        (Some(name), None) => fixtures::document(&name)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_fixture", format!("no fixture `{name}`")))?,
        (None, Some(doc)) => parse(&doc.to_string())
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "parse_error", e.to_string()))?,
        _ => return Err(ApiError::bad_request("give exactly one of `fixture` and `document`")),
    };
    let net = document
        .build()
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_net", e.to_string()))?;
    let current = net.initial_marking();
    let mut session = Session { id: Uuid::new_v4(), document, net, current, history: Vec::new(), version: 0 };
    if let Some(trace) = req.trace {
        let seq: StepSequence = trace.parse().map_err(|e: sonet_core::semantics::NotationError| {
            ApiError::bad_request(e.to_string())
        })?;
        let mu = run(&session.net, &session.current, &seq.0).map_err(not_enabled)?;
        session.history = seq.0.iter().cloned().zip(mu.markings().iter().cloned()).collect();
        session.current = mu.last().clone();
    }
    let out = view(&session, app.config.step_cap);
    app.sessions.write().insert(session.id, Arc::new(RwLock::new(session)));
    Ok((StatusCode::CREATED, Json(out)))
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let s = app.session(&id)?;
    let s = s.read();
    Ok(Json(view(&s, app.config.step_cap)))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    let key = Uuid::parse_str(&id).map_err(|_| ApiError::not_found(&id))?;
    app.sessions.write().remove(&key).map(|_| StatusCode::NO_CONTENT).ok_or_else(|| ApiError::not_found(&id))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    /// The step as a list of transitions, or in notation such as `{a,b}`.
    step: StepInput,
    version: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StepInput {
    List(Vec<String>),
    Notation(String),
}

impl StepInput {
    fn into_step(self) -> ApiResult<Step> {
        match self {
            Self::List(ts) => Step::of(ts).map_err(|e| ApiError::bad_request(e.to_string())),
            Self::Notation(s) => s.parse().map_err(|e: sonet_core::semantics::NotationError| {
                ApiError::bad_request(e.to_string())
            }),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct VersionRequest {
    version: Option<u64>,
}

fn check_version(s: &Session, version: Option<u64>) -> ApiResult<()> {
    match version {
        Some(v) if v != s.version => Err(ApiError::stale(v, s.version)),
        _ => Ok(()),
    }
}

fn not_enabled(e: SemanticsError) -> ApiError {
    match e {
        SemanticsError::StepNotEnabled { position, step, refusal } => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "step_not_enabled", refusal.to_string())
                .with("step", json!(step))
                .with("position", json!(position))
                .with("refusal", json!(refusal))
        }
        SemanticsError::UnknownTransition(_) | SemanticsError::NotAStep { .. } => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "not_a_step", e.to_string())
        }
        other => ApiError::bad_request(other.to_string()),
    }
}

async fn fire_step(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<StepRequest>,
) -> ApiResult<Json<SessionView>> {
    let s = app.session(&id)?;
    let mut s = s.write();
    check_version(&s, req.version)?;
    let u = req.step.into_step()?;
    let next = fire(&s.net, &s.current, &u).map_err(not_enabled)?;
    let prior = std::mem::replace(&mut s.current, next);
    s.history.push((u, prior));
    s.version += 1;
    Ok(Json(view(&s, app.config.step_cap)))
}

async fn preview_step(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<StepRequest>,
) -> ApiResult<Json<Value>> {
    let s = app.session(&id)?;
    let s = s.read();
    let u = req.step.into_step()?;
    let enabled = enabled_step(&s.net, &s.current, &u).map_err(not_enabled)?;
    let target = s.net.fire_unchecked(&s.current, &u);
    Ok(Json(json!({
        "version": s.version,
        "step": step_view(&s.net, &s.current, &u),
        "enabled": enabled,
        "refusal": s.net.refusal(&s.current, &u),
        "marking": target,
        "notation": target.to_string(),
        "phases": phase_views(&s.net, &target, !enabled),
    })))
}

async fn undo(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Option<Json<VersionRequest>>,
) -> ApiResult<Json<SessionView>> {
    let s = app.session(&id)?;
    let mut s = s.write();
    check_version(&s, body.unwrap_or_default().version)?;
    let (_, prior) = s
        .history
        .pop()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "nothing_to_undo", "no step has been fired"))?;
    s.current = prior;
    s.version += 1;
    Ok(Json(view(&s, app.config.step_cap)))
}

async fn reset(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Option<Json<VersionRequest>>,
) -> ApiResult<Json<SessionView>> {
    let s = app.session(&id)?;
    let mut s = s.write();
    check_version(&s, body.unwrap_or_default().version)?;
    s.current = s.net.initial_marking();
    s.history.clear();
    s.version += 1;
    Ok(Json(view(&s, app.config.step_cap)))
}

async fn trace(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.session(&id)?;
    let s = s.read();
    let mut markings: Vec<Marking> = s.history.iter().map(|(_, m)| m.clone()).collect();
    markings.push(s.current.clone());
    let steps = s.recorded();
    let mixed = sonet_core::MixedStepSequence::from_parts(markings.clone(), steps.0.clone())
        .map(|mu| mu.to_string())
        .unwrap_or_default();
    Ok(Json(json!({
        "version": s.version,
        "sequence": steps.to_string(),
        "steps": steps,
        "markings": markings,
        "mixed": mixed,
    })))
}

fn scenario_json(transitions: &NodeSet, doc: NetDocument) -> Value {
    let text = sonet_core::netio::serialize(&doc);
    json!({ "transitions": transitions, "document": serde_json::from_str::<Value>(&text).expect("json") })
}

async fn trace_scenario(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.session(&id)?;
    let s = s.read();
    let seq = s.recorded();
    let unprocessable = |e: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "no_scenario", e);
    let payload = match &s.net {
        AnyNet::Acyclic(n) => {
            let sc = scenario_of(n, &seq).map_err(|e| unprocessable(e.to_string()))?;
            scenario_json(sc.transitions(), NetDocument::from_net(&AnyNet::Acyclic(sc.net().clone())))
        }
        AnyNet::Csa(c) => {
            let sc = csa_scenario_of(c, &seq).map_err(|e| unprocessable(e.to_string()))?;
            scenario_json(sc.transitions(), NetDocument::from_net(&AnyNet::Csa(sc.net().clone())))
        }
        AnyNet::Bsa(b) => {
            let sc = bsa_scenario_of(b, &seq).map_err(|e| unprocessable(e.to_string()))?;
            scenario_json(&sc.transitions(), NetDocument::from_net(&AnyNet::Bsa(sc.net)))
        }
    };
    Ok(Json(json!({ "version": s.version, "sequence": seq.to_string(), "scenario": payload })))
}

#[derive(Deserialize)]
struct ScenarioQuery {
    #[serde(default)]
    maximal: bool,
}

async fn list_scenarios(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ScenarioQuery>,
) -> ApiResult<Json<Value>> {
    let s = app.session(&id)?;
    let s = s.read();
    let limits = app.config.limits;
    let bound = |e: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "enumeration_failed", e);
    let list: Vec<Value> = match &s.net {
        AnyNet::Acyclic(n) => {
            let l = if q.maximal { maximal_scenarios(n, limits) } else { enumerate_scenarios(n, limits) };
            l.map_err(|e| bound(e.to_string()))?
                .into_iter()
                .map(|sc| scenario_json(sc.transitions(), NetDocument::from_net(&AnyNet::Acyclic(sc.net().clone()))))
                .collect()
        }
        AnyNet::Csa(c) => {
            let l = if q.maximal { csa_maximal_scenarios(c, limits) } else { csa_scenarios(c, limits) };
            l.map_err(|e| bound(e.to_string()))?
                .into_iter()
                .map(|sc| scenario_json(sc.transitions(), NetDocument::from_net(&AnyNet::Csa(sc.net().clone()))))
                .collect()
        }
        AnyNet::Bsa(b) => {
            let analysis = scenario_analysis(b, limits).map_err(|e| bound(e.to_string()))?;
            let chosen: Vec<_> = if q.maximal { analysis.maximal() } else { analysis.scenarios.iter().collect() };
            chosen
                .into_iter()
                .map(|sc| scenario_json(&sc.transitions(), NetDocument::from_net(&AnyNet::Bsa(sc.net.clone()))))
                .collect()
        }
    };
    Ok(Json(json!({ "version": s.version, "maximal": q.maximal, "scenarios": list })))
}

#[derive(Deserialize)]
struct DotQuery {
    /// `trace` highlights the recorded transitions.
    highlight: Option<String>,
}

async fn dot(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<DotQuery>,
) -> ApiResult<Response> {
    let s = app.session(&id)?;
    let s = s.read();
    let highlight = match q.highlight.as_deref() {
        None => None,
        Some("trace") => Some(s.recorded().occurring()),
        Some(other) => return Err(ApiError::bad_request(format!("unknown highlight `{other}`"))),
    };
    let text = export_dot(&s.net, &DotOptions { marking: Some(s.current.clone()), highlight });
    Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")], text).into_response())
}

/// Writes the document and trace; the file can be posted back to
/// `/api/v1/sessions` to restore the session.
async fn snapshot(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.session(&id)?;
    let s = s.read();
    let Some(dir) = &app.config.snapshot_dir else {
        return Err(ApiError::new(StatusCode::CONFLICT, "snapshots_disabled", "the service runs without a snapshot directory"));
    };
    let text = sonet_core::netio::serialize(&s.document);
    let body = json!({
        "document": serde_json::from_str::<Value>(&text).expect("json"),
        "trace": s.recorded().to_string(),
    });
    let path = dir.join(format!("{}.json", s.id));
    std::fs::write(&path, serde_json::to_string_pretty(&body).expect("json"))
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "io_error", e.to_string()))?;
    Ok(Json(json!({ "version": s.version, "path": path, "snapshot": body })))
}

pub async fn serve(addr: &str, config: Config) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}/api/v1", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config))).await?;
    Ok(())
}

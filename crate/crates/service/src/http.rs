//! JSON-over-HTTP service. Every scalar value travels as a string.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use sigmadb::exec::{effectiveness_report, execute, ResultStatus, StatementOutcome};
use sigmadb::lang::ast::{SelectQuery, Source};
use sigmadb::lang::render_statement;
use sigmadb::plan::{lower_query, optimize, LogicalPlan};
use sigmadb::qa::{start_session, Next, Session};
use sigmadb::{Catalog, RelationResult, SolveBudget};

use crate::config::EngineConfig;
use crate::error::ServiceError;
use crate::persist::{catalog_statements, save_catalog};
use crate::render::{columns, records, tuple_records};
use crate::script::{run_script, Executed};

pub struct AppState {
    catalog: RwLock<Arc<Catalog>>,
    /// Held for the whole of a catalog change so that writers queue.
    writer: tokio::sync::Mutex<()>,
    sessions: Mutex<HashMap<u64, Arc<Mutex<Session>>>>,
    budget: SolveBudget,
    catalog_path: Option<PathBuf>,
}

impl AppState {
    pub fn new(catalog: Catalog, config: &EngineConfig) -> Arc<Self> {
        Arc::new(AppState {
            catalog: RwLock::new(Arc::new(catalog)),
            writer: tokio::sync::Mutex::new(()),
            sessions: Mutex::new(HashMap::new()),
            budget: config.budget,
            catalog_path: config.catalog_path.clone(),
        })
    }

    /// The current catalog. Later writes do not affect it.
    pub fn snapshot(&self) -> Arc<Catalog> {
        self.catalog.read().expect("catalog lock").clone()
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("UnknownSession", format!("no session {id}")))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/ddl", post(ddl))
        .route("/query", post(query))
        .route("/relations", get(relations))
        .route("/relations/{name}", get(relation))
        .route("/qa/start", post(qa_start))
        .route("/qa/{id}", get(qa_get).delete(qa_delete))
        .route("/qa/{id}/answer", post(qa_answer))
        .route("/qa/{id}/undo", post(qa_undo))
        .with_state(state)
}

/// Serves until interrupted, then drains open connections.
pub async fn serve(config: EngineConfig, catalog: Catalog) -> Result<(), ServiceError> {
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|e| ServiceError::Bind {
            addr: config.listen,
            source: e,
        })?;
    let app = router(AppState::new(catalog, &config));
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown_signal())
        .await
        .map_err(|e| ServiceError::io("<listener>", e))
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": kind, "message": message.into() }),
        }
    }

    fn not_found(kind: &str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, kind, message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message)
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

/// HTTP status for an engine error.
pub fn status_for(e: &sigmadb::Error) -> StatusCode {
    match e.kind() {
        "InfiniteExtension" | "BudgetExceeded" | "JoinNotGroundable" | "EmptyRelation" => {
            StatusCode::UNPROCESSABLE_ENTITY
        }
        "DuplicateName" | "TargetNotDataRelation" | "AlreadyAnswered" | "NothingToUndo" => StatusCode::CONFLICT,
        _ => StatusCode::BAD_REQUEST,
    }
}

impl From<sigmadb::Error> for ApiError {
    fn from(e: sigmadb::Error) -> Self {
        let mut err = ApiError::new(status_for(&e), e.kind(), e.to_string());
        if let Some(a) = e.attribute() {
            err = err.with("attribute", json!(a));
        }
        match &e {
            sigmadb::Error::BudgetExceeded(limit) => err.with("limit", json!(limit.to_string())),
            sigmadb::Error::Syntax(s) => err.with("line", json!(s.line)).with("column", json!(s.column)),
            _ => err,
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Statement { index, line, source } => ApiError::from(source)
                .with("statement", json!(index))
                .with("line", json!(line)),
            ServiceError::Syntax(s) => ApiError::from(sigmadb::Error::Syntax(s)),
            other => ApiError::internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T = Json<Value>> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

/// Runs solver work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))
}

#[derive(Deserialize)]
struct SqlRequest {
    sql: String,
}

fn result_json(r: &RelationResult) -> Value {
    let mut v = json!({
        "columns": columns(&r.heading),
        "records": records(r),
        "count": r.len(),
        "status": "complete",
    });
    if let ResultStatus::Truncated { limit } = r.status {
        v["status"] = json!("truncated");
        v["limit"] = json!(limit);
    }
    v
}

fn executed_json(e: &Executed) -> Value {
    let mut v = json!({ "statement": e.index, "line": e.line });
    match &e.outcome {
        StatementOutcome::TypeDefined { name } => {
            v["outcome"] = json!("type_defined");
            v["name"] = json!(name);
        }
        StatementOutcome::RelationDefined { name, kind } => {
            v["outcome"] = json!("relation_defined");
            v["name"] = json!(name);
            v["kind"] = json!(kind.as_str());
        }
        StatementOutcome::Inserted { name, added } => {
            v["outcome"] = json!("inserted");
            v["name"] = json!(name);
            v["added"] = json!(added);
        }
        StatementOutcome::Rows(r) => {
            v["outcome"] = json!("rows");
            v["result"] = result_json(r);
        }
    }
    v
}

/// Runs a script. Either every statement takes effect or none does.
async fn ddl(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: SqlRequest = parse_body(&body)?;
    let _writer = state.writer.lock().await;
    let snapshot = state.snapshot();
    let budget = state.budget;
    let out = blocking(move || run_script(&snapshot, &req.sql, &budget)).await??;
    if out.changed() {
        if let Some(path) = &state.catalog_path {
            save_catalog(&out.catalog, path)?;
        }
        *state.catalog.write().expect("catalog lock") = Arc::new(out.catalog.clone());
    }
    Ok(Json(
        json!({ "results": out.executed.iter().map(executed_json).collect::<Vec<_>>() }),
    ))
}

async fn query(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: SqlRequest = parse_body(&body)?;
    let snapshot = state.snapshot();
    let budget = state.budget;
    let r = blocking(move || sigmadb::exec::query(&snapshot, &req.sql, &budget)).await??;
    Ok(Json(result_json(&r)))
}

fn star(name: &str, catalog: &Catalog) -> sigmadb::Result<LogicalPlan> {
    optimize(&lower_query(
        &SelectQuery::star(Source::Named(name.to_string())),
        catalog,
    )?)
}

/// Summary of one relation: its columns and whether its extension can be
/// listed within the budget.
fn relation_summary(name: &str, kind: &str, catalog: &Catalog, budget: &SolveBudget) -> Value {
    let mut v = json!({ "name": name, "kind": kind, "columns": [] });
    let plan = star(name, catalog);
    if let Ok(h) = plan.as_ref().map_err(Clone::clone).and_then(LogicalPlan::heading) {
        v["columns"] = columns(&h);
    }
    match plan.and_then(|p| execute(&p, catalog, budget)) {
        Ok(r) => {
            v["listable"] = json!(true);
            v["extension"] = json!("finite");
            v["count"] = json!(r.len());
        }
        Err(e) => {
            v["listable"] = json!(false);
            v["extension"] = json!(if e.kind() == "InfiniteExtension" {
                "infinite"
            } else {
                "unknown"
            });
            v["reason"] = json!(e.kind());
            if let Some(a) = e.attribute() {
                v["attribute"] = json!(a);
            }
        }
    }
    v
}

async fn relations(State(state): State<Arc<AppState>>) -> ApiResult {
    let snapshot = state.snapshot();
    let budget = state.budget;
    let list = blocking(move || {
        snapshot
            .relations()
            .map(|(name, def)| relation_summary(name, def.kind().as_str(), &snapshot, &budget))
            .collect::<Vec<_>>()
    })
    .await?;
    Ok(Json(Value::Array(list)))
}

async fn relation(State(state): State<Arc<AppState>>, Path(name): Path<String>) -> ApiResult {
    let snapshot = state.snapshot();
    let Some(def) = snapshot.relation(&name) else {
        return Err(ApiError::not_found("UnknownReference", format!("no relation {name}")));
    };
    let kind = def.kind().as_str();
    let budget = state.budget;
    let definition = catalog_statements(&snapshot)
        .iter()
        .find(|s| statement_name(s) == Some(name.as_str()))
        .map(render_statement);
    blocking(move || {
        let mut v = relation_summary(&name, kind, &snapshot, &budget);
        v["definition"] = json!(definition);
        if let Ok(LogicalPlan::CompleteScan(scan)) = star(&name, &snapshot) {
            let report: Vec<Value> = effectiveness_report(&scan, &budget)
                .into_iter()
                .map(|(grounded, e)| json!({ "grounded": grounded, "extension": e.as_str() }))
                .collect();
            v["effectiveness"] = json!(report);
        }
        Ok(Json(v))
    })
    .await?
}

fn statement_name(s: &sigmadb::lang::ast::Statement) -> Option<&str> {
    use sigmadb::lang::ast::Statement;
    match s {
        Statement::CreateTable { name, .. } | Statement::CreateView { name, .. } => Some(name),
        _ => None,
    }
}

fn session_json(s: &Session) -> Value {
    let pairs = |items: Vec<(&str, String)>| -> Vec<Value> {
        items
            .into_iter()
            .map(|(a, v)| json!({ "attribute": a, "value": v }))
            .collect()
    };
    let mut v = json!({
        "id": s.id(),
        "relation": s.relation(),
        "columns": columns(s.heading()),
        "total": s.full_extension().len(),
        "remaining_count": s.remaining().len(),
        "answers": pairs(s.answers().into_iter().map(|(a, v)| (a, v.to_string())).collect()),
        "determined": pairs(s.determined().into_iter().map(|(a, v)| (a, v.to_string())).collect()),
    });
    match s.next_question() {
        Next::Question { attribute, options } => {
            v["done"] = json!(false);
            v["question"] = json!({
                "attribute": attribute,
                "options": options
                    .iter()
                    .map(|o| json!({ "value": o.value.to_string(), "would_remain": o.would_remain }))
                    .collect::<Vec<_>>(),
            });
        }
        Next::Done { remaining } => {
            v["done"] = json!(true);
            v["question"] = Value::Null;
            v["remaining"] = tuple_records(s.heading(), &remaining);
        }
    }
    v
}

#[derive(Deserialize)]
struct StartRequest {
    relation: String,
}

async fn qa_start(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: StartRequest = parse_body(&body)?;
    let snapshot = state.snapshot();
    let budget = state.budget;
    let session = blocking(move || start_session(&snapshot, &req.relation, &budget)).await??;
    let view = session_json(&session);
    state
        .sessions
        .lock()
        .expect("session table lock")
        .insert(session.id(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn qa_get(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult {
    let s = state.session(id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(session_json(&s)))
}

#[derive(Deserialize)]
struct AnswerRequest {
    attribute: String,
    value: String,
}

async fn qa_answer(State(state): State<Arc<AppState>>, Path(id): Path<u64>, body: Bytes) -> ApiResult {
    let req: AnswerRequest = parse_body(&body)?;
    let s = state.session(id)?;
    let mut s = s.lock().expect("session lock");
    s.answer_text(&req.attribute, &req.value)?;
    Ok(Json(session_json(&s)))
}

async fn qa_undo(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult {
    let s = state.session(id)?;
    let mut s = s.lock().expect("session lock");
    s.undo()?;
    Ok(Json(session_json(&s)))
}

async fn qa_delete(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult<StatusCode> {
    match state.sessions.lock().expect("session table lock").remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::not_found("UnknownSession", format!("no session {id}"))),
    }
}

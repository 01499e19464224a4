use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use sigmadb::Catalog;
use sigmadb_service::http::{router, AppState};
use sigmadb_service::EngineConfig;
use tower::ServiceExt;

fn demo(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../demos")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn app() -> Router {
    router(AppState::new(Catalog::new(), &EngineConfig::default()))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn ddl(app: &Router, sql: &str) -> Value {
    let (status, v) = call(app, Method::POST, "/ddl", Some(json!({ "sql": sql }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v
}

/// Catalog with the GST and colouring definitions, without their queries.
async fn loaded() -> Router {
    let app = app();
    let defs: String = [demo("gst.sql"), demo("colouring.sql")]
        .iter()
        .flat_map(|s| sigmadb::lang::parse_script(s).unwrap())
        .filter(|l| !matches!(l.statement, sigmadb::lang::ast::Statement::Select(_)))
        .map(|l| sigmadb::lang::render_statement(&l.statement) + "\n")
        .collect();
    ddl(&app, &defs).await;
    app
}

#[tokio::test]
async fn empty_catalog_lists_nothing() {
    let (status, v) = call(&app(), Method::GET, "/relations", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, json!([]));
}

#[tokio::test]
async fn grounded_gst_query_returns_one_record() {
    let app = loaded().await;
    let (status, v) = call(
        &app,
        Method::POST,
        "/query",
        Some(json!({ "sql": "SELECT * FROM Australian_GST WHERE Price=110;" })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        v["records"],
        json!([{ "Price": "110", "ExGSTAmount": "100", "GSTAmount": "10" }])
    );
    assert_eq!(v["count"], json!(1));
    assert_eq!(v["status"], json!("complete"));
    assert_eq!(
        v["columns"],
        json!([
            { "name": "Price", "type": "float" },
            { "name": "ExGSTAmount", "type": "float" },
            { "name": "GSTAmount", "type": "float" }
        ])
    );
}

#[tokio::test]
async fn unlistable_query_is_422() {
    let app = loaded().await;
    let (status, v) = call(
        &app,
        Method::POST,
        "/query",
        Some(json!({ "sql": "SELECT * FROM Australian_GST;" })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], json!("InfiniteExtension"));
    assert_eq!(v["attribute"], json!("Price"));
}

#[tokio::test]
async fn query_errors_carry_their_class() {
    let app = loaded().await;
    let (status, v) = call(&app, Method::POST, "/query", Some(json!({ "sql": "SELECT FROM;" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], json!("SyntaxError"));
    assert_eq!((v["line"].clone(), v["column"].clone()), (json!(1), json!(8)));
    let (status, v) = call(
        &app,
        Method::POST,
        "/query",
        Some(json!({ "sql": "CREATE TABLE x (a bool);" })),
    )
    .await;
    assert_eq!(
        (status, v["error"].clone()),
        (StatusCode::BAD_REQUEST, json!("NotAQuery"))
    );
    let (status, v) = call(
        &app,
        Method::POST,
        "/query",
        Some(json!({ "sql": "SELECT * FROM nowhere;" })),
    )
    .await;
    assert_eq!(
        (status, v["error"].clone()),
        (StatusCode::BAD_REQUEST, json!("UnknownReference"))
    );
    let (status, v) = call(&app, Method::POST, "/query", Some(json!({ "query": 1 }))).await;
    assert_eq!(
        (status, v["error"].clone()),
        (StatusCode::BAD_REQUEST, json!("BadRequest"))
    );
    // /query never changes the catalog.
    let (_, list) = call(&app, Method::GET, "/relations", None).await;
    assert_eq!(list.as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn ddl_reports_each_statement_and_is_all_or_nothing() {
    let app = app();
    let v = ddl(
        &app,
        "CREATE TABLE prices (p float); INSERT INTO prices VALUES (22), (110), (22);",
    )
    .await;
    assert_eq!(
        v["results"],
        json!([
            { "statement": 1, "line": 1, "outcome": "relation_defined", "name": "prices", "kind": "data" },
            { "statement": 2, "line": 1, "outcome": "inserted", "name": "prices", "added": 2 }
        ])
    );
    let (status, v) = call(
        &app,
        Method::POST,
        "/ddl",
        Some(json!({ "sql": "CREATE TABLE other (x bool);\nINSERT INTO nowhere VALUES (1);" })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(
        (v["error"].clone(), v["statement"].clone(), v["line"].clone()),
        (json!("UnknownReference"), json!(2), json!(2))
    );
    let (_, list) = call(&app, Method::GET, "/relations", None).await;
    assert_eq!(list.as_array().unwrap().len(), 1, "failed script left no trace");
    let (status, v) = call(
        &app,
        Method::POST,
        "/ddl",
        Some(json!({ "sql": "CREATE TABLE prices (q bool);" })),
    )
    .await;
    assert_eq!(
        (status, v["error"].clone()),
        (StatusCode::CONFLICT, json!("DuplicateName"))
    );
}

#[tokio::test]
async fn relations_are_flagged_by_listability() {
    let app = loaded().await;
    let (status, v) = call(&app, Method::GET, "/relations", None).await;
    assert_eq!(status, StatusCode::OK);
    let by_name = |n: &str| {
        v.as_array()
            .unwrap()
            .iter()
            .find(|r| r["name"] == json!(n))
            .unwrap()
            .clone()
    };
    let gst = by_name("Australian_GST");
    assert_eq!(
        (gst["kind"].clone(), gst["listable"].clone()),
        (json!("sigma"), json!(false))
    );
    assert_eq!(
        (gst["reason"].clone(), gst["attribute"].clone()),
        (json!("InfiniteExtension"), json!("Price"))
    );
    let colours = by_name("colour_Australia");
    assert_eq!(
        (colours["listable"].clone(), colours["count"].clone()),
        (json!(true), json!(12))
    );
    let prices = by_name("prices");
    assert_eq!(
        (prices["kind"].clone(), prices["count"].clone()),
        (json!("data"), json!(3))
    );
}

#[tokio::test]
async fn relation_detail_includes_effectiveness() {
    let app = loaded().await;
    let (status, v) = call(&app, Method::GET, "/relations/Australian_GST", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(v["definition"]
        .as_str()
        .unwrap()
        .starts_with("CREATE VIEW Australian_GST AS SELECT * FROM COMPLETE("));
    let report = v["effectiveness"].as_array().unwrap();
    assert_eq!(report.len(), 8);
    assert_eq!(report[0], json!({ "grounded": [], "extension": "infinite" }));
    assert!(report[1..].iter().all(|r| r["extension"] == json!("finite")));
    let (status, v) = call(&app, Method::GET, "/relations/nowhere", None).await;
    assert_eq!(
        (status, v["error"].clone()),
        (StatusCode::NOT_FOUND, json!("UnknownReference"))
    );
}

#[tokio::test]
async fn question_session_over_the_colouring() {
    let app = loaded().await;
    let (status, s) = call(
        &app,
        Method::POST,
        "/qa/start",
        Some(json!({ "relation": "colour_Australia" })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(
        (s["total"].clone(), s["remaining_count"].clone()),
        (json!(12), json!(12))
    );
    assert_eq!(s["question"]["attribute"], json!("wa"));
    assert_eq!(
        s["question"]["options"],
        json!([
            { "value": "1", "would_remain": 4 },
            { "value": "2", "would_remain": 4 },
            { "value": "3", "would_remain": 4 }
        ])
    );
    let id = s["id"].as_u64().unwrap();
    let uri = |suffix: &str| format!("/qa/{id}{suffix}");

    let (status, s) = call(
        &app,
        Method::POST,
        &uri("/answer"),
        Some(json!({ "attribute": "wa", "value": "1" })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["remaining_count"], json!(4));
    assert_eq!(s["question"]["attribute"], json!("act"));
    assert_eq!(
        s["determined"],
        json!([{ "attribute": "qld", "value": "1" }, { "attribute": "vic", "value": "1" }])
    );

    let (status, e) = call(
        &app,
        Method::POST,
        &uri("/answer"),
        Some(json!({ "attribute": "qld", "value": "3" })),
    )
    .await;
    assert_eq!(
        (status, e["error"].clone()),
        (StatusCode::BAD_REQUEST, json!("InvalidAnswer"))
    );
    let (_, s) = call(&app, Method::GET, &uri(""), None).await;
    assert_eq!(s["remaining_count"], json!(4), "a rejected answer keeps the session");

    let (status, s) = call(&app, Method::POST, &uri("/undo"), None).await;
    assert_eq!((status, s["remaining_count"].clone()), (StatusCode::OK, json!(12)));
    let (status, e) = call(&app, Method::POST, &uri("/undo"), None).await;
    assert_eq!(
        (status, e["error"].clone()),
        (StatusCode::CONFLICT, json!("NothingToUndo"))
    );

    call(
        &app,
        Method::POST,
        &uri("/answer"),
        Some(json!({ "attribute": "wa", "value": "1" })),
    )
    .await;
    let (_, s) = call(
        &app,
        Method::POST,
        &uri("/answer"),
        Some(json!({ "attribute": "act", "value": "2" })),
    )
    .await;
    assert_eq!(s["done"], json!(true));
    assert_eq!(s["question"], Value::Null);
    assert_eq!(
        s["remaining"],
        json!([{ "wa": "1", "nt": "3", "sa": "2", "qld": "1", "nsw": "3", "act": "2", "vic": "1" }])
    );

    let (status, _) = call(&app, Method::DELETE, &uri(""), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, e) = call(&app, Method::GET, &uri(""), None).await;
    assert_eq!(
        (status, e["error"].clone()),
        (StatusCode::NOT_FOUND, json!("UnknownSession"))
    );
}

#[tokio::test]
async fn sessions_over_unlistable_relations_are_refused() {
    let app = loaded().await;
    let (status, e) = call(
        &app,
        Method::POST,
        "/qa/start",
        Some(json!({ "relation": "Australian_GST" })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(
        (e["error"].clone(), e["attribute"].clone()),
        (json!("InfiniteExtension"), json!("Price"))
    );
}

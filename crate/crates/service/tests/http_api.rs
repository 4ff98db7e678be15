use std::sync::Arc;

use askless_core::inference::eliminate;
use askless_core::learning::{fit_mle, hill_climb, HillClimbConfig};
use askless_core::survey::{default_generator_config, default_schema, generate_synthetic};
use askless_core::{BayesianNetwork, Evidence};
use askless_service::{router, ServiceConfig, SurveyService};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn network() -> BayesianNetwork {
    let mut cfg = default_generator_config();
    cfg.rows = 2000;
    let data = generate_synthetic(&default_schema(), &cfg).unwrap();
    fit_mle(
        &hill_climb(&data, &HillClimbConfig::default()).unwrap(),
        &data,
        0.5,
    )
    .unwrap()
}

fn app() -> (Router, Arc<SurveyService>) {
    let svc = Arc::new(SurveyService::new(network(), ServiceConfig::default()).unwrap());
    (router(svc.clone()), svc)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req
        .body(Body::from(body.unwrap_or("").to_string()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes)
            .unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

fn probs(v: &Value) -> Vec<f64> {
    ["S1", "S2", "S3", "S4"]
        .iter()
        .map(|s| v[s].as_f64().unwrap())
        .collect()
}

#[tokio::test]
async fn full_session_over_http() {
    let (app, svc) = app();
    let (status, health) = call(&app, "GET", "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(health["questionPool"], 22);

    let (status, created) = call(&app, "POST", "/sessions", Some(r#"{"k":10,"seed":3}"#)).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = created["id"].as_str().unwrap().to_string();
    let questions = created["questions"].as_array().unwrap().clone();
    assert_eq!(questions.len(), 10);
    let mut abbrs: Vec<&str> = questions
        .iter()
        .map(|q| q["abbr"].as_str().unwrap())
        .collect();
    abbrs.sort_unstable();
    abbrs.dedup();
    assert_eq!(abbrs.len(), 10);
    assert!(abbrs.iter().all(|a| *a != "SGV2" && *a != "DIS"));
    assert!((probs(&created["posterior"]).iter().sum::<f64>() - 1.0).abs() < 1e-9);

    let mut pairs = Vec::new();
    for (i, q) in questions.iter().enumerate() {
        let abbr = q["abbr"].as_str().unwrap();
        let levels = q["levels"].as_array().unwrap();
        let value = levels[i % levels.len()].as_str().unwrap();
        pairs.push((abbr.to_string(), value.to_string()));
        let body = json!({"question": abbr, "value": value}).to_string();
        let (status, out) = call(
            &app,
            "POST",
            &format!("/sessions/{id}/answers"),
            Some(&body),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{out}");
        assert_eq!(out["answeredCount"], i + 1);
        assert_eq!(out["remaining"].as_array().unwrap().len(), 9 - i);
    }

    let (status, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["posteriorTrace"].as_array().unwrap().len(), 11);
    assert!(view["remaining"].as_array().unwrap().is_empty());

    let bn = svc.network();
    let ev = Evidence::from_labels(
        bn.schema(),
        pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )
    .unwrap();
    let batch = eliminate(bn, bn.schema().label_index(), &ev).unwrap();
    for (a, b) in probs(&view["posterior"]).iter().zip(&batch.probs) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(view["segment"], batch.argmax_label());
}

#[tokio::test]
async fn error_statuses() {
    let (app, _) = app();
    let (status, _) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, body) = call(
        &app,
        "POST",
        "/sessions/nope/answers",
        Some(r#"{"question":"PAM","value":"4"}"#),
    )
    .await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::NOT_FOUND, Some("UnknownSession"))
    );

    let (status, body) = call(&app, "POST", "/sessions", Some(r#"{"k":23}"#)).await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::BAD_REQUEST, Some("KTooLarge"))
    );
    let (status, _) = call(&app, "POST", "/sessions", Some("not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", "/sessions", Some(r#"{"k":"ten"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (_, created) = call(&app, "POST", "/sessions", Some(r#"{"k":2,"seed":1}"#)).await;
    let id = created["id"].as_str().unwrap();
    let q = created["questions"][0]["abbr"].as_str().unwrap();
    let uri = format!("/sessions/{id}/answers");
    let bad_level = json!({"question": q, "value": "nope"}).to_string();
    let (status, body) = call(&app, "POST", &uri, Some(&bad_level)).await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::BAD_REQUEST, Some("InvalidLevel"))
    );
    let (status, _) = call(&app, "POST", &uri, Some(r#"{"question":"PAM"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let level = created["questions"][0]["levels"][0].as_str().unwrap();
    let ok = json!({"question": q, "value": level}).to_string();
    assert_eq!(call(&app, "POST", &uri, Some(&ok)).await.0, StatusCode::OK);
    let (status, body) = call(&app, "POST", &uri, Some(&ok)).await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::CONFLICT, Some("AlreadyAnswered"))
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn interleaved_sessions_stay_isolated() {
    let (app, svc) = app();
    let mut ids = Vec::new();
    for seed in 0..6 {
        let body = json!({"k": 5, "seed": seed}).to_string();
        let (_, created) = call(&app, "POST", "/sessions", Some(&body)).await;
        ids.push(created);
    }
    let mut handles = Vec::new();
    for (n, created) in ids.iter().cloned().enumerate() {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let id = created["id"].as_str().unwrap().to_string();
            for q in created["questions"].as_array().unwrap() {
                let levels = q["levels"].as_array().unwrap();
                let value = &levels[n % levels.len()];
                let body = json!({"question": q["abbr"], "value": value}).to_string();
                let (status, _) = call(
                    &app,
                    "POST",
                    &format!("/sessions/{id}/answers"),
                    Some(&body),
                )
                .await;
                assert_eq!(status, StatusCode::OK);
            }
        }));
    }
    for h in handles {
        h.await.unwrap();
    }
    for (n, created) in ids.iter().enumerate() {
        let s = svc.session(created["id"].as_str().unwrap()).unwrap();
        assert_eq!(s.answered.len(), 5);
        for (v, l) in s.answered.iter() {
            assert_eq!(l, n % svc.network().schema().cardinality(v));
        }
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_duplicate_answers_serialize() {
    let (app, _) = app();
    let (_, created) = call(&app, "POST", "/sessions", Some(r#"{"k":3,"seed":8}"#)).await;
    let id = created["id"].as_str().unwrap().to_string();
    let q = &created["questions"][0];
    let body = json!({"question": q["abbr"], "value": q["levels"][0]}).to_string();
    let mut handles = Vec::new();
    for _ in 0..8 {
        let (app, id, body) = (app.clone(), id.clone(), body.clone());
        handles.push(tokio::spawn(async move {
            call(
                &app,
                "POST",
                &format!("/sessions/{id}/answers"),
                Some(&body),
            )
            .await
            .0
        }));
    }
    let mut statuses = Vec::new();
    for h in handles {
        statuses.push(h.await.unwrap());
    }
    assert_eq!(statuses.iter().filter(|&&s| s == StatusCode::OK).count(), 1);
    assert_eq!(
        statuses
            .iter()
            .filter(|&&s| s == StatusCode::CONFLICT)
            .count(),
        7
    );
}

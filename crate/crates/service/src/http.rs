use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use crate::{ServiceError, SurveyService};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownSession => StatusCode::NOT_FOUND,
            ServiceError::AlreadyAnswered(_) => StatusCode::CONFLICT,
            ServiceError::Inference(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        (
            status,
            Json(json!({"error": self.code(), "message": self.to_string()})),
        )
            .into_response()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    k: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerRequest {
    question: String,
    value: String,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::InvalidRequest(e.body_text()))
}

type Shared = Arc<SurveyService>;

async fn create(
    State(svc): State<Shared>,
    payload: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<impl IntoResponse, ServiceError> {
    let req = body(payload)?;
    let created = svc.create_session(req.k, req.seed)?;
    Ok((StatusCode::CREATED, Json(created)))
}

async fn answer(
    State(svc): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<AnswerRequest>, JsonRejection>,
) -> Result<impl IntoResponse, ServiceError> {
    let req = body(payload)?;
    let outcome =
        tokio::task::spawn_blocking(move || svc.submit_answer(&id, &req.question, &req.value))
            .await
            .map_err(|e| ServiceError::InvalidRequest(e.to_string()))??;
    Ok(Json(outcome))
}

async fn view(
    State(svc): State<Shared>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ServiceError> {
    Ok(Json(svc.session_view(&id)?))
}

async fn healthz(State(svc): State<Shared>) -> impl IntoResponse {
    let schema = svc.network().schema();
    Json(json!({
        "status": "ok",
        "variables": schema.len(),
        "questionPool": svc.pool_size(),
        "label": schema.label_var(),
        "engine": svc.config().engine,
        "sessions": svc.session_count(),
    }))
}

pub fn router(service: Arc<SurveyService>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(view))
        .route("/sessions/{id}/answers", post(answer))
        .with_state(service)
}

/// Serves until Ctrl-C.
pub async fn serve(service: Arc<SurveyService>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

//! HTTP front end for the decision engine. Every request carries its own
//! problem document; the server keeps no state between requests.

pub mod api;

use std::net::{Ipv4Addr, SocketAddr};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::api::{Endpoint, Reply};

/// Origins the workbench is served from during development.
pub const DEFAULT_ORIGINS: [&str; 2] = ["http://localhost:5173", "http://127.0.0.1:5173"];

/// Overrides [`DEFAULT_ORIGINS`] with a comma-separated list.
pub const ORIGIN_ENV: &str = "PIVOTAL_UI_ORIGIN";

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot listen on port {port}: {source}")]
    Bind { port: u16, source: std::io::Error },
    #[error("server stopped: {0}")]
    Io(#[from] std::io::Error),
}

pub fn router() -> Router {
    let origins: Vec<String> = match std::env::var(ORIGIN_ENV) {
        Ok(list) => list
            .split(',')
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect(),
        Err(_) => DEFAULT_ORIGINS.iter().map(|s| s.to_string()).collect(),
    };
    router_with_origins(&origins)
}

pub fn router_with_origins(origins: &[String]) -> Router {
    let origins: Vec<HeaderValue> = origins.iter().filter_map(|o| o.parse().ok()).collect();
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::list(origins))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/api/v1/health", get(|| async { reply(api::health()) }))
        .route("/api/v1/taxonomy", get(|| async { reply(api::taxonomy()) }))
        .route("/api/v1/validate", post(compute).with_state(Endpoint::Validate))
        .route("/api/v1/score", post(compute).with_state(Endpoint::Score))
        .route("/api/v1/recommend", post(compute).with_state(Endpoint::Recommend))
        .route("/api/v1/optimize", post(compute).with_state(Endpoint::Optimize))
        .layer(cors)
}

async fn compute(State(endpoint): State<Endpoint>, body: Bytes) -> Response {
    let Ok(text) = String::from_utf8(body.to_vec()) else {
        return reply(api::error_reply(&pivotal_core::Error::Malformed {
            message: "request body is not UTF-8".into(),
            path: String::new(),
            line: 0,
            column: 0,
        }));
    };
    // Engine calls are CPU-bound; keep them off the async workers.
    match tokio::task::spawn_blocking(move || api::respond(endpoint, &text)).await {
        Ok(r) => reply(r),
        Err(e) => reply(api::internal_error(&e.to_string())),
    }
}

fn reply(r: Reply) -> Response {
    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, "application/json")], r.body).into_response()
}

/// Binds the loopback interface; fails if the port is taken.
pub async fn bind(port: u16) -> Result<TcpListener, ServeError> {
    TcpListener::bind(SocketAddr::from((Ipv4Addr::LOCALHOST, port)))
        .await
        .map_err(|source| ServeError::Bind { port, source })
}

pub async fn serve_on(listener: TcpListener) -> Result<(), ServeError> {
    axum::serve(listener, router()).await?;
    Ok(())
}

/// Runs the service until the process is stopped.
pub fn serve(port: u16) -> Result<(), ServeError> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = bind(port).await?;
        if let Ok(addr) = listener.local_addr() {
            eprintln!("listening on http://{addr}");
        }
        serve_on(listener).await
    })
}

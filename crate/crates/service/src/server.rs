use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Body;
use axum::extract::{Request, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::Response;
use axum::Router;

use crate::api::{ApiError, ApiResponse, ApiState};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorsConfig {
    origins: Vec<String>,
}

impl CorsConfig {
    pub fn new(origins: Vec<String>) -> Self {
        Self { origins }
    }

    fn allow_origin(&self, request_origin: Option<&HeaderValue>) -> Option<HeaderValue> {
        if self.origins.iter().any(|o| o == "*") {
            return Some(HeaderValue::from_static("*"));
        }
        let origin = request_origin?.to_str().ok()?;
        self.origins
            .iter()
            .any(|o| o == origin)
            .then(|| HeaderValue::from_str(origin).ok())
            .flatten()
    }
}

struct Shared {
    api: ApiState,
    cors: CorsConfig,
}

fn finish(cors: &CorsConfig, headers: &HeaderMap, status: StatusCode, body: String) -> Response {
    let mut resp = Response::new(Body::from(body));
    *resp.status_mut() = status;
    let h = resp.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    if let Some(origin) = cors.allow_origin(headers.get(header::ORIGIN)) {
        h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, origin);
        h.insert(
            header::ACCESS_CONTROL_ALLOW_METHODS,
            HeaderValue::from_static("GET, OPTIONS"),
        );
        h.insert(
            header::ACCESS_CONTROL_ALLOW_HEADERS,
            HeaderValue::from_static("content-type"),
        );
        h.insert(header::VARY, HeaderValue::from_static("origin"));
    }
    resp
}

async fn dispatch(State(shared): State<Arc<Shared>>, req: Request) -> Response {
    let headers = req.headers().clone();
    let path = req.uri().path().to_string();
    let query = req.uri().query().unwrap_or("").to_string();
    let ApiResponse { status, body } = match *req.method() {
        Method::GET | Method::HEAD => shared.api.handle(&path, &query),
        Method::OPTIONS => return finish(&shared.cors, &headers, StatusCode::NO_CONTENT, String::new()),
        _ => ApiError {
            status: 405,
            code: "method_not_allowed",
            message: format!("{} is not supported", req.method()),
        }
        .into_response(),
    };
    log::debug!("{} {path}?{query} -> {status}", req.method());
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    finish(&shared.cors, &headers, status, body)
}

/// Builds the HTTP router; every path goes through the API dispatcher.
pub fn router(api: ApiState) -> Router {
    let cors = CorsConfig::new(api.limits().cors_origins.clone());
    Router::new()
        .fallback(dispatch)
        .with_state(Arc::new(Shared { api, cors }))
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(api: ApiState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(api)).await
}

//! HTTP front end: `/api/explore`, `/api/suggest`, `/healthz`, and the web
//! UI bundle as static files at `/`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use sere_core::backend::parse_languages;
use sere_core::datasource::LiveConfig;
use sere_core::{
    build_explorer, BackendError, BackendSpec, ExploreError, Explorer, FieldSet, Format,
    LanguageCode, PipelineConfig,
};
use tower_http::services::ServeDir;

pub const DEFAULT_SUGGEST_LIMIT: usize = 10;
pub const MAX_SUGGEST_LIMIT: usize = 25;

/// Server settings. Every flag can also come from the environment.
#[derive(Debug, Clone, clap::Args)]
pub struct ServeArgs {
    /// Address to listen on.
    #[arg(long, env = "SERE_BIND", default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// `live`, `corpus`, `corpus:<path>` or `corpus:<lang>=<path>,...`.
    #[arg(long, env = "SERE_BACKEND", default_value = "live")]
    pub backend: String,
    /// Corpus file used when the backend is a bare `corpus`.
    #[arg(long, env = "SERE_CORPUS_PATH")]
    pub corpus_path: Option<PathBuf>,
    /// Language of an unlabelled corpus file.
    #[arg(long, env = "SERE_CORPUS_LANG", default_value = "en")]
    pub corpus_lang: String,
    /// Languages served by the live backend.
    #[arg(long, env = "SERE_LANGS", default_value = "en,de")]
    pub langs: String,
    /// Directory with the built web UI.
    #[arg(long, env = "SERE_STATIC_DIR")]
    pub static_dir: Option<PathBuf>,
    #[arg(long, env = "SERE_CACHE_TTL_SECS")]
    pub cache_ttl_secs: Option<u64>,
    #[arg(long, env = "SERE_MAX_IN_FLIGHT")]
    pub max_in_flight: Option<usize>,
}

impl ServeArgs {
    pub fn backend_spec(&self) -> Result<BackendSpec, BackendError> {
        match (self.backend.as_str(), &self.corpus_path) {
            ("corpus", Some(path)) => Ok(BackendSpec::Corpus(vec![(None, path.clone())])),
            (spec, _) => spec.parse(),
        }
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        let mut config = PipelineConfig::default();
        if let Some(secs) = self.cache_ttl_secs {
            config.cache_ttl = Duration::from_secs(secs);
        }
        if let Some(n) = self.max_in_flight {
            config.max_in_flight = n;
        }
        config
    }

    pub fn explorer(&self) -> Result<Explorer, BackendError> {
        let languages = parse_languages(&self.langs).map_err(BackendError::InvalidSpec)?;
        let corpus_lang = LanguageCode::new(&self.corpus_lang)
            .map_err(|e| BackendError::InvalidSpec(e.to_string()))?;
        let mut live = LiveConfig::from_env();
        live.inlink_cap = self.pipeline_config().inlink_cap;
        build_explorer(
            &self.backend_spec()?,
            self.pipeline_config(),
            &languages,
            corpus_lang,
            &live,
        )
    }
}

/// The application routes. Unknown paths fall through to `static_dir`.
pub fn router(explorer: Arc<Explorer>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/explore", get(explore))
        .route("/api/suggest", get(suggest))
        .route("/healthz", get(|| async { "ok" }))
        .with_state(explorer);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(args: ServeArgs) -> Result<(), Box<dyn std::error::Error>> {
    let explorer = Arc::new(args.explorer()?);
    let langs: Vec<String> = explorer.languages().map(|l| l.to_string()).collect();
    let listener = tokio::net::TcpListener::bind(args.bind).await?;
    log::info!(
        "listening on {} (backend {}, languages {})",
        listener.local_addr()?,
        args.backend,
        langs.join(",")
    );
    axum::serve(listener, router(explorer, args.static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    format: Format,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>, format: Format) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            format,
        }
    }

    fn bad_request(code: &'static str, message: impl Into<String>, format: Format) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message, format)
    }

    fn from_explore(err: ExploreError, format: Format) -> Self {
        let message = err.to_string();
        let (status, code) = match err {
            ExploreError::EmptyQuery => (StatusCode::BAD_REQUEST, "missing_query"),
            ExploreError::UnsupportedLanguage(_) => (StatusCode::BAD_REQUEST, "unsupported_language"),
            ExploreError::NoMatch(_) => (StatusCode::NOT_FOUND, "no_match"),
            ExploreError::AllSourcesFailed(_) => (StatusCode::BAD_GATEWAY, "all_sources_failed"),
            ExploreError::Provider(_) => (StatusCode::INTERNAL_SERVER_ERROR, "backend_error"),
        };
        if status.is_server_error() {
            log::warn!("{code}: {message}");
        }
        Self::new(status, code, message, format)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = self.format.render_error(self.code, &self.message);
        (
            self.status,
            [(header::CONTENT_TYPE, self.format.content_type())],
            body,
        )
            .into_response()
    }
}

fn language(params: &HashMap<String, String>, format: Format) -> Result<LanguageCode, ApiError> {
    match params.get("lang") {
        None => Ok(LanguageCode::EN),
        Some(raw) => LanguageCode::new(raw)
            .map_err(|e| ApiError::bad_request("invalid_language", e.to_string(), format)),
    }
}

fn query_term(params: &HashMap<String, String>, format: Format) -> Result<&str, ApiError> {
    match params.get("q").map(|q| q.trim()) {
        Some(q) if !q.is_empty() => Ok(q),
        _ => Err(ApiError::bad_request("missing_query", "parameter q is required", format)),
    }
}

async fn explore(
    State(explorer): State<Arc<Explorer>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let format = match params.get("format") {
        None => Format::default(),
        Some(raw) => raw.parse().map_err(|_| {
            ApiError::bad_request(
                "unknown_format",
                format!("unknown format {raw:?}, expected xml or json"),
                Format::default(),
            )
        })?,
    };
    let term = query_term(&params, format)?;
    let lang = language(&params, format)?;
    let fields = match params.get("fields") {
        None => FieldSet::all(),
        Some(csv) => FieldSet::parse_csv(csv)
            .map_err(|e| ApiError::bad_request("unknown_field", e.to_string(), format))?,
    };
    let result = explorer
        .explore(lang, term, fields)
        .await
        .map_err(|e| ApiError::from_explore(e, format))?;
    Ok((
        [(header::CONTENT_TYPE, format.content_type())],
        format.render(&result),
    )
        .into_response())
}

async fn suggest(
    State(explorer): State<Arc<Explorer>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Json<Vec<String>>, ApiError> {
    let format = Format::Json;
    let term = query_term(&params, format)?;
    let lang = language(&params, format)?;
    let limit = match params.get("limit") {
        None => DEFAULT_SUGGEST_LIMIT,
        Some(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => n.min(MAX_SUGGEST_LIMIT),
            _ => {
                return Err(ApiError::bad_request(
                    "invalid_limit",
                    format!("limit must be a positive integer, got {raw:?}"),
                    format,
                ))
            }
        },
    };
    match explorer.suggest(lang, term, limit).await {
        Ok(titles) => Ok(Json(titles)),
        Err(ExploreError::Provider(e)) => {
            log::warn!("suggest failed: {e}");
            Err(ApiError::new(StatusCode::BAD_GATEWAY, "backend_error", e.to_string(), format))
        }
        Err(e) => Err(ApiError::from_explore(e, format)),
    }
}

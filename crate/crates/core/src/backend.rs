//! Backend selection shared by the service and the CLI.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::datasource::{
    ingest_corpus, CorpusError, CorpusProvider, DbpediaProvider, LiveConfig, ReqwestTransport,
    Transport, WikipediaProvider,
};
use crate::model::LanguageCode;
use crate::pipeline::{ConfigError, Explorer, PipelineConfig};

/// `live`, `corpus:<path>` or `corpus:<lang>=<path>,<lang>=<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    Live,
    /// Paths without a language use the default language.
    Corpus(Vec<(Option<LanguageCode>, PathBuf)>),
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("invalid backend {0:?}, expected live, corpus:<path> or corpus:<lang>=<path>,...")]
    InvalidSpec(String),
    #[error("corpus {path}: {source}")]
    Corpus {
        path: PathBuf,
        #[source]
        source: CorpusError,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("http client: {0}")]
    Http(String),
}

impl FromStr for BackendSpec {
    type Err = BackendError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || BackendError::InvalidSpec(s.to_string());
        if s == "live" {
            return Ok(BackendSpec::Live);
        }
        let rest = s.strip_prefix("corpus:").ok_or_else(invalid)?;
        if rest.is_empty() {
            return Err(invalid());
        }
        let labelled: Option<Vec<_>> = rest
            .split(',')
            .map(|part| {
                let (lang, path) = part.split_once('=')?;
                let lang = LanguageCode::new(lang).ok()?;
                (!path.is_empty()).then(|| (Some(lang), PathBuf::from(path)))
            })
            .collect();
        Ok(BackendSpec::Corpus(
            labelled.unwrap_or_else(|| vec![(None, PathBuf::from(rest))]),
        ))
    }
}

impl BackendSpec {
    /// Reads `SERE_BACKEND`, with `SERE_CORPUS_PATH` filling in a bare
    /// `corpus`. Defaults to `live`.
    pub fn from_env() -> Result<Self, BackendError> {
        let backend = std::env::var("SERE_BACKEND").unwrap_or_else(|_| "live".into());
        match (backend.as_str(), std::env::var("SERE_CORPUS_PATH")) {
            ("corpus", Ok(path)) => format!("corpus:{path}").parse(),
            _ => backend.parse(),
        }
    }
}

/// Builds an explorer serving `languages` from the live services, or every
/// language that has a corpus file.
pub fn build_explorer(
    spec: &BackendSpec,
    config: PipelineConfig,
    languages: &[LanguageCode],
    default_lang: LanguageCode,
    live: &LiveConfig,
) -> Result<Explorer, BackendError> {
    let mut explorer = Explorer::new(config)?;
    match spec {
        BackendSpec::Live => {
            let transport: Arc<dyn Transport> = Arc::new(
                ReqwestTransport::new(&live.user_agent, live.timeout)
                    .map_err(|e| BackendError::Http(e.to_string()))?,
            );
            for &lang in languages {
                explorer.register(
                    lang,
                    Arc::new(WikipediaProvider::new(lang, live, Arc::clone(&transport))),
                    Arc::new(DbpediaProvider::new(lang, live, Arc::clone(&transport))),
                );
            }
        }
        BackendSpec::Corpus(files) => {
            for (lang, path) in files {
                let lang = lang.unwrap_or(default_lang);
                let corpus = ingest_corpus(path, lang).map_err(|source| BackendError::Corpus {
                    path: path.clone(),
                    source,
                })?;
                let provider = Arc::new(CorpusProvider::new(Arc::new(corpus)));
                explorer.register(lang, provider.clone(), provider);
            }
        }
    }
    Ok(explorer)
}

/// Parses a comma-separated language list such as `en,de`.
pub fn parse_languages(csv: &str) -> Result<Vec<LanguageCode>, String> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| LanguageCode::new(s).map_err(|e| e.to_string()))
        .collect()
}

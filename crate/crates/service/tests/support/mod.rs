#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use async_trait::async_trait;
use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use sere_core::datasource::{CorpusProvider, LiveConfig, Provider, ProviderError};
use sere_core::{build_explorer, BackendSpec, Explorer, LanguageCode, PipelineConfig};
use tower::ServiceExt;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn demo_explorer() -> Explorer {
    let spec = BackendSpec::Corpus(vec![
        (Some(LanguageCode::EN), fixture("demo.jsonl")),
        (Some(LanguageCode::DE), fixture("demo_de.jsonl")),
    ]);
    build_explorer(
        &spec,
        PipelineConfig::default(),
        &[],
        LanguageCode::EN,
        &LiveConfig::default(),
    )
    .unwrap()
}

pub fn demo_app() -> Router {
    sere_service::router(Arc::new(demo_explorer()), None)
}

/// Resolves titles from the demo corpus but cannot list any relations.
pub struct NoRelations(pub Arc<CorpusProvider>);

#[async_trait]
impl Provider for NoRelations {
    fn name(&self) -> &str {
        "no-relations"
    }

    async fn search(&self, term: &str, limit: usize) -> Result<Vec<String>, ProviderError> {
        self.0.search(term, limit).await
    }

    async fn description(&self, title: &str) -> Result<String, ProviderError> {
        self.0.description(title).await
    }

    async fn thumbnail(&self, title: &str) -> Result<Option<String>, ProviderError> {
        self.0.thumbnail(title).await
    }
}

/// Supports nothing at all.
pub struct Dead;

#[async_trait]
impl Provider for Dead {
    fn name(&self) -> &str {
        "dead"
    }
}

pub fn app_with(wiki: Arc<dyn Provider>) -> Router {
    let mut explorer = Explorer::new(PipelineConfig::default()).unwrap();
    explorer.register(LanguageCode::EN, wiki.clone(), wiki);
    sere_service::router(Arc::new(explorer), None)
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub body: String,
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    let response = app
        .clone()
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = response.status();
    let content_type = response
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        body: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

pub fn explore_uri(q: &str, extra: &str) -> String {
    format!("/api/explore?q={}{extra}", urlencoding::encode(q))
}

/// Every element, attribute and text node as a path such as
/// `/sere/related/entity[2]@sr=0.5693`.
pub fn facts(xml: &str) -> BTreeSet<String> {
    let mut reader = Reader::from_str(xml);
    let mut stack: Vec<(String, HashMap<String, usize>)> = vec![(String::new(), HashMap::new())];
    let mut out = BTreeSet::new();
    let mut open = |e: &BytesStart, stack: &mut Vec<(String, HashMap<String, usize>)>| {
        let name = String::from_utf8(e.name().as_ref().to_vec()).unwrap();
        let (parent, seen) = stack.last_mut().unwrap();
        let n = seen.entry(name.clone()).or_default();
        let path = format!("{parent}/{name}[{n}]");
        *n += 1;
        out.insert(path.clone());
        for a in e.attributes() {
            let a = a.unwrap();
            out.insert(format!(
                "{path}@{}={}",
                String::from_utf8_lossy(a.key.as_ref()),
                a.unescape_value().unwrap()
            ));
        }
        path
    };
    let mut texts = Vec::new();
    loop {
        match reader.read_event().unwrap() {
            Event::Start(e) => {
                let path = open(&e, &mut stack);
                stack.push((path, HashMap::new()));
            }
            Event::Empty(e) => {
                open(&e, &mut stack);
            }
            Event::End(_) => {
                stack.pop();
            }
            Event::Text(t) => {
                let text = t.unescape().unwrap();
                if !text.trim().is_empty() {
                    texts.push(format!("{}#{}", stack.last().unwrap().0, text));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    out.extend(texts);
    out
}

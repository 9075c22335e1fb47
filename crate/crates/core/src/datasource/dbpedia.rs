use std::sync::Arc;

use async_trait::async_trait;
use serde_json::Value;

use super::http::{params, JsonClient, LiveConfig, Transport};
use super::{ErrorKind, Provider, ProviderError};
use crate::model::{canonical_title, LanguageCode};

const SUBJECT: &str = "http://purl.org/dc/terms/subject";
const BROADER: &str = "http://www.w3.org/2004/02/skos/core#broader";
const RESULTS_FORMAT: &str = "application/sparql-results+json";

/// DBpedia SPARQL client answering categories and the category hierarchy.
///
/// * categories: `<resource> dct:subject ?category`
/// * broader: `skos:broader` of those categories
/// * narrower: the inverse `skos:broader`, capped by `LIMIT`
pub struct DbpediaProvider {
    lang: LanguageCode,
    client: JsonClient,
    resource_base: String,
}

impl DbpediaProvider {
    pub fn new(lang: LanguageCode, config: &LiveConfig, transport: Arc<dyn Transport>) -> Self {
        Self {
            lang,
            client: JsonClient::new(transport, config.dbpedia_endpoint(lang), config.retry),
            resource_base: LiveConfig::dbpedia_resource_base(lang),
        }
    }

    pub fn lang(&self) -> LanguageCode {
        self.lang
    }

    /// `<base/Title_with_underscores>`, escaping characters IRIs forbid.
    pub fn resource_iri(&self, title: &str) -> String {
        let mut iri = format!("<{}", self.resource_base);
        for c in title.trim().chars() {
            match c {
                ' ' => iri.push('_'),
                '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                    iri.push_str(&format!("%{:02X}", c as u32))
                }
                c if c.is_control() => {
                    let mut buf = [0u8; 4];
                    for b in c.encode_utf8(&mut buf).bytes() {
                        iri.push_str(&format!("%{b:02X}"));
                    }
                }
                c => iri.push(c),
            }
        }
        iri.push('>');
        iri
    }

    pub fn categories_query(&self, title: &str) -> String {
        format!(
            "SELECT ?category WHERE {{ {} <{SUBJECT}> ?category }} ORDER BY ?category",
            self.resource_iri(title)
        )
    }

    pub fn broader_query(&self, title: &str) -> String {
        format!(
            "SELECT DISTINCT ?broader WHERE {{ {} <{SUBJECT}> ?category . ?category <{BROADER}> ?broader }} ORDER BY ?broader",
            self.resource_iri(title)
        )
    }

    pub fn narrower_query(&self, title: &str, limit: usize) -> String {
        format!(
            "SELECT DISTINCT ?narrower WHERE {{ {} <{SUBJECT}> ?category . ?narrower <{BROADER}> ?category }} ORDER BY ?narrower LIMIT {limit}",
            self.resource_iri(title)
        )
    }

    async fn select(&self, operation: &str, query: String, var: &str) -> Result<Vec<String>, ProviderError> {
        let value = self
            .client
            .get(operation, &params([("query", &query), ("format", RESULTS_FORMAT)]))
            .await?;
        let malformed = |field: &str| {
            ProviderError::new(
                format!("{} [{operation}]", self.client.url()),
                ErrorKind::Malformed {
                    field: field.to_string(),
                },
            )
        };
        let bindings = value
            .pointer("/results/bindings")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("results.bindings"))?;
        let mut names = Vec::with_capacity(bindings.len());
        for binding in bindings {
            let uri = binding[var]["value"]
                .as_str()
                .ok_or_else(|| malformed(&format!("results.bindings[].{var}.value")))?;
            if let Some(name) = name_from_uri(uri) {
                if !names.contains(&name) {
                    names.push(name);
                }
            }
        }
        Ok(names)
    }
}

/// `http://dbpedia.org/resource/Category:Chancellors_of_Germany` becomes
/// `Chancellors of Germany`.
pub(crate) fn name_from_uri(uri: &str) -> Option<String> {
    let last = uri.rsplit('/').next()?;
    let decoded = percent_encoding::percent_decode_str(last).decode_utf8().ok()?;
    let name = decoded
        .strip_prefix("Category:")
        .or_else(|| decoded.strip_prefix("Kategorie:"))
        .unwrap_or(&decoded);
    canonical_title(name).ok()
}

#[async_trait]
impl Provider for DbpediaProvider {
    fn name(&self) -> &str {
        "dbpedia"
    }

    async fn categories(&self, title: &str) -> Result<Vec<String>, ProviderError> {
        self.select("categories", self.categories_query(title), "category")
            .await
    }

    async fn broader(&self, title: &str) -> Result<Vec<String>, ProviderError> {
        self.select("broader", self.broader_query(title), "broader")
            .await
    }

    async fn narrower(&self, title: &str, limit: usize) -> Result<Vec<String>, ProviderError> {
        if limit == 0 {
            return Ok(Vec::new());
        }
        self.select("narrower", self.narrower_query(title, limit), "narrower")
            .await
    }
}

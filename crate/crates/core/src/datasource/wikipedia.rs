use std::sync::Arc;

use async_trait::async_trait;
use serde_json::Value;
use tokio::sync::OnceCell;

use super::http::{params, JsonClient, LiveConfig, Transport};
use super::{ErrorKind, Passage, Provider, ProviderError};
use crate::model::LanguageCode;

/// Continuation rounds followed for link listings.
const MAX_CONTINUATIONS: usize = 20;
/// MediaWiki's per-request ceiling for list limits.
const API_MAX_LIMIT: usize = 500;

/// MediaWiki Action API client.
///
/// Hit counts come from the `totalhits` of a quoted full-text search; the
/// AND co-occurrence count quotes both phrases in one search string.
pub struct WikipediaProvider {
    lang: LanguageCode,
    client: JsonClient,
    inlink_cap: usize,
    article_count: OnceCell<u64>,
}

impl WikipediaProvider {
    pub fn new(lang: LanguageCode, config: &LiveConfig, transport: Arc<dyn Transport>) -> Self {
        Self {
            lang,
            client: JsonClient::new(transport, config.wikipedia_endpoint(lang), config.retry),
            inlink_cap: config.inlink_cap,
            article_count: OnceCell::new(),
        }
    }

    pub fn lang(&self) -> LanguageCode {
        self.lang
    }

    async fn query(&self, operation: &str, extra: Vec<(String, String)>) -> Result<Value, ProviderError> {
        let mut all = params([("action", "query"), ("format", "json"), ("formatversion", "2")]);
        all.extend(extra);
        let value = self.client.get(operation, &all).await?;
        if let Some(error) = value.get("error") {
            let code = error["code"].as_str().unwrap_or("unknown").to_string();
            let info = error["info"].as_str().unwrap_or_default().to_string();
            let kind = match code.as_str() {
                "maxlag" | "ratelimited" => ErrorKind::RateLimited,
                _ => ErrorKind::Api { code, info },
            };
            return Err(self.error(operation, kind));
        }
        Ok(value)
    }

    fn error(&self, operation: &str, kind: ErrorKind) -> ProviderError {
        ProviderError::new(format!("{} [{operation}]", self.client.url()), kind)
    }

    fn malformed(&self, operation: &str, field: &str) -> ProviderError {
        self.error(
            operation,
            ErrorKind::Malformed {
                field: field.to_string(),
            },
        )
    }

    async fn total_hits(&self, operation: &str, search: String) -> Result<u64, ProviderError> {
        let value = self
            .query(
                operation,
                params([
                    ("list", "search"),
                    ("srsearch", &search),
                    ("srnamespace", "0"),
                    ("srlimit", "1"),
                    ("srinfo", "totalhits"),
                    ("srprop", ""),
                ]),
            )
            .await?;
        value
            .pointer("/query/searchinfo/totalhits")
            .and_then(Value::as_u64)
            .ok_or_else(|| self.malformed(operation, "query.searchinfo.totalhits"))
    }

    /// The first entry of `query.pages`, or `None` for a missing page.
    fn first_page<'v>(&self, operation: &str, value: &'v Value) -> Result<Option<&'v Value>, ProviderError> {
        let page = value
            .pointer("/query/pages/0")
            .ok_or_else(|| self.malformed(operation, "query.pages"))?;
        if page.get("missing").is_some_and(|m| m.as_bool() != Some(false)) || page.get("invalid").is_some() {
            return Ok(None);
        }
        Ok(Some(page))
    }

    async fn extract(&self, operation: &str, title: &str, intro: bool) -> Result<String, ProviderError> {
        let mut extra = params([
            ("prop", "extracts"),
            ("explaintext", "1"),
            ("redirects", "1"),
            ("titles", title),
        ]);
        if intro {
            extra.push(("exintro".into(), "1".into()));
        }
        let value = self.query(operation, extra).await?;
        match self.first_page(operation, &value)? {
            None => Ok(String::new()),
            Some(page) => page
                .get("extract")
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| self.malformed(operation, "query.pages[0].extract")),
        }
    }

    /// Follows `continue` blocks, collecting `field` entries from `list_at`.
    async fn collect_titles(
        &self,
        operation: &str,
        base: Vec<(String, String)>,
        list_at: &str,
        limit: usize,
    ) -> Result<Vec<String>, ProviderError> {
        let mut titles = Vec::new();
        let mut cont: Vec<(String, String)> = Vec::new();
        for _ in 0..MAX_CONTINUATIONS {
            let mut request = base.clone();
            request.extend(cont.iter().cloned());
            let value = self.query(operation, request).await?;
            match value.pointer(list_at) {
                Some(Value::Array(items)) => {
                    for item in items {
                        let title = item["title"]
                            .as_str()
                            .ok_or_else(|| self.malformed(operation, "title"))?;
                        titles.push(title.to_string());
                    }
                }
                // A page without links has no list at all.
                None if list_at.starts_with("/query/pages/0/") => {}
                _ => return Err(self.malformed(operation, &list_at[1..].replace('/', "."))),
            }
            if titles.len() >= limit {
                titles.truncate(limit);
                break;
            }
            match value.get("continue").and_then(Value::as_object) {
                Some(next) => {
                    cont = next
                        .iter()
                        .filter_map(|(k, v)| v.as_str().map(|v| (k.clone(), v.to_string())))
                        .collect();
                }
                None => break,
            }
        }
        Ok(titles)
    }
}

/// Strips the highlight markup MediaWiki puts in search snippets.
fn strip_markup(snippet: &str) -> String {
    let mut text = String::with_capacity(snippet.len());
    let mut in_tag = false;
    for c in snippet.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => in_tag = false,
            _ if !in_tag => text.push(c),
            _ => {}
        }
    }
    let text = text
        .replace("&quot;", "\"")
        .replace("&#039;", "'")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&");
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_namespace(title: &str) -> &str {
    title.split_once(':').map_or(title, |(_, rest)| rest)
}

#[async_trait]
impl Provider for WikipediaProvider {
    fn name(&self) -> &str {
        "wikipedia"
    }

    async fn search(&self, term: &str, limit: usize) -> Result<Vec<String>, ProviderError> {
        let op = "search";
        let limit = limit.clamp(1, API_MAX_LIMIT).to_string();
        let value = self
            .query(
                op,
                params([
                    ("list", "search"),
                    ("srsearch", term),
                    ("srnamespace", "0"),
                    ("srlimit", &limit),
                    ("srprop", ""),
                ]),
            )
            .await?;
        let hits = value
            .pointer("/query/search")
            .and_then(Value::as_array)
            .ok_or_else(|| self.malformed(op, "query.search"))?;
        hits.iter()
            .map(|h| {
                h["title"]
                    .as_str()
                    .map(str::to_string)
                    .ok_or_else(|| self.malformed(op, "query.search[].title"))
            })
            .collect()
    }

    async fn hit_count(&self, phrase: &str) -> Result<u64, ProviderError> {
        self.total_hits("hit_count", format!("\"{phrase}\"")).await
    }

    async fn cooccurrence_count(&self, a: &str, b: &str) -> Result<u64, ProviderError> {
        self.total_hits("cooccurrence_count", format!("\"{a}\" \"{b}\"")).await
    }

    async fn article_count(&self) -> Result<u64, ProviderError> {
        let op = "article_count";
        self.article_count
            .get_or_try_init(|| async {
                let value = self
                    .query(op, params([("meta", "siteinfo"), ("siprop", "statistics")]))
                    .await?;
                value
                    .pointer("/query/statistics/articles")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| self.malformed(op, "query.statistics.articles"))
            })
            .await
            .copied()
    }

    async fn full_text(&self, title: &str) -> Result<String, ProviderError> {
        self.extract("full_text", title, false).await
    }

    async fn description(&self, title: &str) -> Result<String, ProviderError> {
        self.extract("description", title, true).await
    }

    async fn out_links(&self, title: &str) -> Result<Vec<String>, ProviderError> {
        let base = params([
            ("prop", "links"),
            ("plnamespace", "0"),
            ("pllimit", "max"),
            ("redirects", "1"),
            ("titles", title),
        ]);
        self.collect_titles("out_links", base, "/query/pages/0/links", usize::MAX)
            .await
    }

    async fn in_links(&self, title: &str, limit: usize) -> Result<Vec<String>, ProviderError> {
        let limit = limit.min(self.inlink_cap);
        if limit == 0 {
            return Ok(Vec::new());
        }
        let batch = limit.min(API_MAX_LIMIT).to_string();
        let base = params([
            ("list", "backlinks"),
            ("bltitle", title),
            ("blnamespace", "0"),
            ("bllimit", &batch),
        ]);
        self.collect_titles("in_links", base, "/query/backlinks", limit)
            .await
    }

    async fn categories(&self, title: &str) -> Result<Vec<String>, ProviderError> {
        let base = params([
            ("prop", "categories"),
            ("clshow", "!hidden"),
            ("cllimit", "max"),
            ("redirects", "1"),
            ("titles", title),
        ]);
        let raw = self
            .collect_titles("categories", base, "/query/pages/0/categories", usize::MAX)
            .await?;
        Ok(raw.iter().map(|t| strip_namespace(t).to_string()).collect())
    }

    async fn thumbnail(&self, title: &str) -> Result<Option<String>, ProviderError> {
        let op = "thumbnail";
        let value = self
            .query(
                op,
                params([
                    ("prop", "pageimages"),
                    ("piprop", "thumbnail"),
                    ("pithumbsize", "320"),
                    ("redirects", "1"),
                    ("titles", title),
                ]),
            )
            .await?;
        Ok(self
            .first_page(op, &value)?
            .and_then(|page| page.pointer("/thumbnail/source"))
            .and_then(Value::as_str)
            .map(str::to_string))
    }

    async fn search_snippets(
        &self,
        a: &str,
        b: &str,
        limit: usize,
    ) -> Result<Vec<Passage>, ProviderError> {
        let op = "search_snippets";
        let search = format!("\"{a}\" \"{b}\"");
        let limit = limit.clamp(1, API_MAX_LIMIT).to_string();
        let value = self
            .query(
                op,
                params([
                    ("list", "search"),
                    ("srsearch", &search),
                    ("srnamespace", "0"),
                    ("srlimit", &limit),
                    ("srprop", "snippet"),
                ]),
            )
            .await?;
        let hits = value
            .pointer("/query/search")
            .and_then(Value::as_array)
            .ok_or_else(|| self.malformed(op, "query.search"))?;
        Ok(hits
            .iter()
            .filter_map(|h| {
                let title = h["title"].as_str()?;
                let text = strip_markup(h["snippet"].as_str()?);
                (!text.is_empty()).then(|| Passage {
                    title: title.to_string(),
                    text,
                })
            })
            .collect())
    }
}

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::index::PhraseIndex;
use super::{phrase, Passage};
use crate::enrich::split_sentences;
use crate::model::{canonical_title, LanguageCode};

const REQUIRED_KEYS: [&str; 4] = ["title", "text", "links", "categories"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: missing required field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: title is blank")]
    BlankTitle { line: usize },
    #[error("line {line}: duplicate title {title:?} (first defined on line {first_line})")]
    DuplicateTitle {
        title: String,
        line: usize,
        first_line: usize,
    },
}

impl CorpusError {
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::Io { .. } => None,
            CorpusError::Parse { line, .. }
            | CorpusError::MissingField { line, .. }
            | CorpusError::BlankTitle { line }
            | CorpusError::DuplicateTitle { line, .. } => Some(*line),
        }
    }
}

/// One article of an offline corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusArticle {
    pub title: String,
    pub text: String,
    pub links: Vec<String>,
    pub categories: Vec<String>,
    pub broader: Vec<String>,
    pub narrower: Vec<String>,
    pub description: String,
    pub thumbnail: Option<String>,
}

#[derive(Deserialize)]
struct ArticleLine {
    title: String,
    text: String,
    links: Vec<String>,
    categories: Vec<String>,
    #[serde(default)]
    broader: Vec<String>,
    #[serde(default)]
    narrower: Vec<String>,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    thumbnail: Option<String>,
}

impl CorpusArticle {
    fn from_line(raw: ArticleLine, line: usize) -> Result<Self, CorpusError> {
        let title = canonical_title(&raw.title).map_err(|_| CorpusError::BlankTitle { line })?;
        let titles = |list: Vec<String>| -> Vec<String> {
            list.iter().filter_map(|t| canonical_title(t).ok()).collect()
        };
        let categories = raw
            .categories
            .iter()
            .filter_map(|c| canonical_title(c).ok())
            .collect();
        let description = raw
            .description
            .unwrap_or_else(|| first_paragraph(&raw.text).to_string());
        Ok(Self {
            title,
            links: titles(raw.links),
            categories,
            broader: titles(raw.broader),
            narrower: titles(raw.narrower),
            description,
            thumbnail: raw.thumbnail.filter(|t| !t.trim().is_empty()),
            text: raw.text,
        })
    }
}

fn first_paragraph(text: &str) -> &str {
    text.split("\n\n")
        .map(str::trim)
        .find(|p| !p.is_empty())
        .unwrap_or("")
}

/// Index sizes reported by `ingest-check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusStats {
    pub articles: usize,
    pub distinct_tokens: usize,
    pub postings: usize,
    pub links: usize,
    pub linked_targets: usize,
    pub categories: usize,
}

/// An immutable offline encyclopedia with a phrase index and reverse links.
#[derive(Debug, Clone)]
pub struct Corpus {
    lang: LanguageCode,
    articles: Vec<CorpusArticle>,
    by_title: HashMap<String, usize>,
    index: PhraseIndex,
    inlinks: HashMap<String, Vec<String>>,
}

/// Reads a JSON Lines corpus file.
pub fn ingest_corpus(path: &Path, lang: LanguageCode) -> Result<Corpus, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Corpus::from_reader(BufReader::new(file), lang).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

impl Corpus {
    pub fn from_reader(reader: impl BufRead, lang: LanguageCode) -> Result<Self, CorpusError> {
        let mut articles = Vec::new();
        let mut lines = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|source| CorpusError::Io {
                path: PathBuf::new(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value =
                serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            let Some(object) = value.as_object() else {
                return Err(CorpusError::Parse {
                    line: line_no,
                    message: "expected a JSON object".into(),
                });
            };
            if let Some(field) = REQUIRED_KEYS.into_iter().find(|k| !object.contains_key(*k)) {
                return Err(CorpusError::MissingField {
                    line: line_no,
                    field,
                });
            }
            let raw: ArticleLine =
                serde_json::from_value(value).map_err(|e| CorpusError::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            articles.push(CorpusArticle::from_line(raw, line_no)?);
            lines.push(line_no);
        }
        Self::build(lang, articles, &lines)
    }

    /// Builds a corpus from in-memory articles. Titles must already be
    /// canonical and unique.
    pub fn from_articles(
        lang: LanguageCode,
        articles: Vec<CorpusArticle>,
    ) -> Result<Self, CorpusError> {
        let lines: Vec<usize> = (1..=articles.len()).collect();
        Self::build(lang, articles, &lines)
    }

    fn build(
        lang: LanguageCode,
        articles: Vec<CorpusArticle>,
        lines: &[usize],
    ) -> Result<Self, CorpusError> {
        let mut by_title = HashMap::with_capacity(articles.len());
        for (i, article) in articles.iter().enumerate() {
            if let Some(first) = by_title.insert(article.title.clone(), i) {
                return Err(CorpusError::DuplicateTitle {
                    title: article.title.clone(),
                    line: lines[i],
                    first_line: lines[first],
                });
            }
        }

        let mut reverse: HashMap<String, BTreeSet<String>> = HashMap::new();
        for article in &articles {
            for target in &article.links {
                reverse
                    .entry(target.clone())
                    .or_default()
                    .insert(article.title.clone());
            }
        }
        let inlinks = reverse
            .into_iter()
            .map(|(target, sources)| (target, sources.into_iter().collect()))
            .collect();

        let index = PhraseIndex::build(articles.iter().map(|a| a.text.as_str()));
        Ok(Self {
            lang,
            articles,
            by_title,
            index,
            inlinks,
        })
    }

    pub fn lang(&self) -> LanguageCode {
        self.lang
    }

    pub fn article_count(&self) -> usize {
        self.articles.len()
    }

    pub fn articles(&self) -> &[CorpusArticle] {
        &self.articles
    }

    pub fn article(&self, title: &str) -> Option<&CorpusArticle> {
        let key = canonical_title(title).ok()?;
        self.by_title.get(&key).map(|&i| &self.articles[i])
    }

    pub fn index(&self) -> &PhraseIndex {
        &self.index
    }

    /// Titles of articles linking to `title`, ascending.
    pub fn in_links(&self, title: &str) -> &[String] {
        canonical_title(title)
            .ok()
            .and_then(|t| self.inlinks.get(&t))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn hit_count(&self, phrase_text: &str) -> u64 {
        self.index.count_docs(phrase_text) as u64
    }

    pub fn cooccurrence(&self, a: &str, b: &str) -> u64 {
        self.both(a, b).len() as u64
    }

    fn both(&self, a: &str, b: &str) -> Vec<usize> {
        let left: BTreeSet<usize> = self.index.docs(a).into_iter().collect();
        self.index
            .docs(b)
            .into_iter()
            .filter(|d| left.contains(d))
            .collect()
    }

    /// Three-tier ranking: exact title, title prefix, then full-text
    /// matches by descending frequency. Ties break on title bytes.
    pub fn search(&self, term: &str, limit: usize) -> Vec<String> {
        let needle = phrase::fold(term);
        if needle.is_empty() || limit == 0 {
            return Vec::new();
        }
        let text_hits: HashMap<usize, usize> = self.index.matches(term).into_iter().collect();

        let mut ranked: Vec<(u8, usize, &str)> = self
            .articles
            .iter()
            .enumerate()
            .filter_map(|(i, article)| {
                let folded_title = phrase::fold(&article.title);
                if folded_title == needle {
                    Some((0, 0, article.title.as_str()))
                } else if folded_title.starts_with(&needle) {
                    Some((1, 0, article.title.as_str()))
                } else {
                    text_hits
                        .get(&i)
                        .map(|&freq| (2, usize::MAX - freq, article.title.as_str()))
                }
            })
            .collect();
        ranked.sort_unstable_by(|x, y| (x.0, x.1, x.2.as_bytes()).cmp(&(y.0, y.1, y.2.as_bytes())));
        ranked
            .into_iter()
            .take(limit)
            .map(|(_, _, t)| t.to_string())
            .collect()
    }

    /// One passage per article matching both phrases, in title order: the
    /// first sentence containing `b`, else the first containing `a`.
    pub fn search_snippets(&self, a: &str, b: &str, limit: usize) -> Vec<Passage> {
        let mut docs = self.both(a, b);
        docs.sort_by(|x, y| {
            self.articles[*x]
                .title
                .as_bytes()
                .cmp(self.articles[*y].title.as_bytes())
        });
        let (fa, fb) = (phrase::fold(a), phrase::fold(b));
        docs.into_iter()
            .filter_map(|d| {
                let article = &self.articles[d];
                let sentences = split_sentences(&article.text);
                let pick = |needle: &str| {
                    sentences
                        .iter()
                        .find(|s| phrase::contains_folded(&phrase::fold(s), needle))
                        .cloned()
                };
                pick(&fb).or_else(|| pick(&fa)).map(|text| Passage {
                    title: article.title.clone(),
                    text,
                })
            })
            .take(limit)
            .collect()
    }

    pub fn stats(&self) -> CorpusStats {
        CorpusStats {
            articles: self.articles.len(),
            distinct_tokens: self.index.distinct_tokens(),
            postings: self.index.posting_count(),
            links: self.articles.iter().map(|a| a.links.len()).sum(),
            linked_targets: self.inlinks.len(),
            categories: self
                .articles
                .iter()
                .flat_map(|a| a.categories.iter())
                .collect::<BTreeSet<_>>()
                .len(),
        }
    }
}

//! Domain types shared by every stage of the exploration pipeline.
//!
//! Everything here is an immutable value once constructed; no I/O happens in
//! this module.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of the reserved category bucket for entities without categories.
pub const UNCATEGORIZED: &str = "(uncategorized)";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("title is empty")]
    EmptyTitle,
    #[error("invalid language code {0:?}: expected two lowercase ASCII letters")]
    InvalidLanguage(String),
    #[error("article total must be at least 1")]
    EmptyCollection,
    #[error("hit count {hits} exceeds article total {total}")]
    HitsExceedTotal { hits: u64, total: u64 },
    #[error("unknown field {0:?}")]
    UnknownField(String),
}

/// Two-letter Wikipedia edition tag such as `en` or `de`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguageCode([u8; 2]);

impl LanguageCode {
    pub const EN: LanguageCode = LanguageCode(*b"en");
    pub const DE: LanguageCode = LanguageCode(*b"de");

    pub fn new(code: &str) -> Result<Self, ModelError> {
        match code.as_bytes() {
            [a, b] if a.is_ascii_lowercase() && b.is_ascii_lowercase() => Ok(Self([*a, *b])),
            _ => Err(ModelError::InvalidLanguage(code.to_string())),
        }
    }

    pub fn as_str(&self) -> &str {
        // Both bytes are ASCII lowercase letters by construction.
        std::str::from_utf8(&self.0).unwrap_or("??")
    }
}

impl FromStr for LanguageCode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LanguageCode({})", self.as_str())
    }
}

impl Serialize for LanguageCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LanguageCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LanguageCode::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Full-text hit counts feeding the distance formula.
///
/// `both` is clamped to `min(a, b)` when a backend reports an inconsistent
/// larger value; [`HitCounts::was_clamped`] records that it happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HitCounts {
    a: u64,
    b: u64,
    both: u64,
    total: u64,
    clamped: bool,
}

impl HitCounts {
    pub fn new(a: u64, b: u64, both: u64, total: u64) -> Result<Self, ModelError> {
        if total == 0 {
            return Err(ModelError::EmptyCollection);
        }
        let max = a.max(b);
        if max > total {
            return Err(ModelError::HitsExceedTotal { hits: max, total });
        }
        let min = a.min(b);
        let clamped = both > min;
        if clamped {
            log::warn!("co-occurrence count {both} exceeds min({a}, {b}); clamping");
        }
        Ok(Self {
            a,
            b,
            both: both.min(min),
            total,
            clamped,
        })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn both(&self) -> u64 {
        self.both
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn was_clamped(&self) -> bool {
        self.clamped
    }
}

/// Distance and the derived higher-is-closer relatedness for a concept pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelatednessScore {
    /// `f64::INFINITY` when the two terms never co-occur.
    pub distance: f64,
    pub relatedness: f64,
    pub cooccurring: bool,
}

/// A resolved encyclopedia article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub title: String,
    pub url: String,
    pub lang: LanguageCode,
    pub description: String,
    pub thumbnail: Option<String>,
}

impl Concept {
    /// Builds a concept with a canonicalized title and its derived URL.
    pub fn new(lang: LanguageCode, title: &str) -> Result<Self, ModelError> {
        let title = canonical_title(title)?;
        let url = article_url(lang, &title);
        Ok(Self {
            title,
            url,
            lang,
            description: String::new(),
            thumbnail: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationOrigin {
    InLink,
    OutLink,
    Broader,
    Narrower,
    CategorySibling,
}

impl RelationOrigin {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelationOrigin::InLink => "in_link",
            RelationOrigin::OutLink => "out_link",
            RelationOrigin::Broader => "broader",
            RelationOrigin::Narrower => "narrower",
            RelationOrigin::CategorySibling => "category_sibling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnippetTrack {
    /// A sentence taken from the query concept's own article.
    ArticleSentence,
    /// A passage returned by an AND-search over both titles.
    SearchSnippet,
}

impl SnippetTrack {
    pub fn as_str(&self) -> &'static str {
        match self {
            SnippetTrack::ArticleSentence => "article_sentence",
            SnippetTrack::SearchSnippet => "search_snippet",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "article_sentence" => Some(SnippetTrack::ArticleSentence),
            "search_snippet" => Some(SnippetTrack::SearchSnippet),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub text: String,
    pub track: SnippetTrack,
    pub source_title: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatedEntity {
    pub concept: Concept,
    pub score: RelatednessScore,
    pub origins: BTreeSet<RelationOrigin>,
    pub categories: Vec<String>,
    pub assigned_category: Option<String>,
    pub snippets: Vec<Snippet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub name: String,
    pub count: usize,
}

/// Output fields a caller can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Category,
    Description,
    Snippets,
    Sr,
    Thumbnail,
}

impl Field {
    pub const ALL: [Field; 5] = [
        Field::Category,
        Field::Description,
        Field::Snippets,
        Field::Sr,
        Field::Thumbnail,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Field::Category => "category",
            Field::Description => "description",
            Field::Snippets => "snippets",
            Field::Sr => "sr",
            Field::Thumbnail => "thumbnail",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl FromStr for Field {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| ModelError::UnknownField(s.to_string()))
    }
}

/// A selection of output fields. Iteration and display order is sorted by name.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSet(u8);

impl FieldSet {
    pub fn all() -> Self {
        Field::ALL.into_iter().collect()
    }

    pub fn empty() -> Self {
        FieldSet(0)
    }

    /// Parses a comma-separated list. Blank entries are ignored, so an empty
    /// string selects nothing; callers default an absent list to [`FieldSet::all`].
    pub fn parse_csv(csv: &str) -> Result<Self, ModelError> {
        let mut set = FieldSet::empty();
        for name in csv.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            set.insert(name.parse()?);
        }
        Ok(set)
    }

    pub fn insert(&mut self, field: Field) {
        self.0 |= field.bit();
    }

    pub fn contains(&self, field: Field) -> bool {
        self.0 & field.bit() != 0
    }

    pub fn is_subset(&self, other: &FieldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Field> + '_ {
        Field::ALL.into_iter().filter(|f| self.contains(*f))
    }

    pub fn to_csv(&self) -> String {
        self.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(",")
    }
}

impl Default for FieldSet {
    fn default() -> Self {
        FieldSet::all()
    }
}

impl FromIterator<Field> for FieldSet {
    fn from_iter<I: IntoIterator<Item = Field>>(iter: I) -> Self {
        let mut set = FieldSet::empty();
        for f in iter {
            set.insert(f);
        }
        set
    }
}

impl fmt::Debug for FieldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSet({})", self.to_csv())
    }
}

impl fmt::Display for FieldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// The full ranked answer for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationResult {
    pub query: String,
    pub concept: Concept,
    pub entities: Vec<RelatedEntity>,
    pub category_index: Vec<CategoryCount>,
    pub generated_at: DateTime<Utc>,
    pub from_cache: bool,
    pub fields: FieldSet,
    pub warnings: Vec<String>,
}

/// Normalizes a raw page title: underscores become spaces, whitespace runs
/// collapse to one space, the ends are trimmed and the first character is
/// uppercased. The remainder keeps its case.
pub fn canonical_title(raw: &str) -> Result<String, ModelError> {
    let spaced = raw.replace('_', " ");
    let mut words = spaced.split_whitespace();
    let first = words.next().ok_or(ModelError::EmptyTitle)?;

    let mut out = String::with_capacity(spaced.len());
    let mut chars = first.chars();
    if let Some(c) = chars.next() {
        out.extend(c.to_uppercase());
        out.push_str(chars.as_str());
    }
    for word in words {
        out.push(' ');
        out.push_str(word);
    }
    Ok(out)
}

/// Bytes kept verbatim in article URLs: the RFC 3986 unreserved set.
const URL_TITLE: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~');

/// `https://<lang>.wikipedia.org/wiki/<Title_with_underscores>`, with every
/// byte outside the RFC 3986 unreserved set percent-encoded.
pub fn article_url(lang: LanguageCode, title: &str) -> String {
    format!(
        "https://{lang}.wikipedia.org/wiki/{}",
        utf8_percent_encode(&title.replace(' ', "_"), URL_TITLE)
    )
}

/// Checks the ordering and category invariants of a result.
///
/// Returns every violation found; an empty list means the result is valid.
pub fn validate_result(result: &ExplorationResult) -> Vec<String> {
    let mut problems = Vec::new();

    for pair in result.entities.windows(2) {
        let (x, y) = (&pair[0], &pair[1]);
        let ordered = match y.score.relatedness.total_cmp(&x.score.relatedness) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => x.concept.title.as_bytes() < y.concept.title.as_bytes(),
            std::cmp::Ordering::Greater => false,
        };
        if !ordered {
            problems.push(format!(
                "{:?} ranked before {:?}",
                x.concept.title, y.concept.title
            ));
        }
    }

    for entity in &result.entities {
        let r = entity.score.relatedness;
        if !(r > 0.0 && r <= 1.0) {
            problems.push(format!(
                "{:?} has relatedness {r} outside (0, 1]",
                entity.concept.title
            ));
        }
        if let Some(assigned) = &entity.assigned_category {
            if !entity.categories.contains(assigned) {
                problems.push(format!(
                    "{:?} assigned to {assigned:?} which it does not list",
                    entity.concept.title
                ));
            }
        }
        if entity.concept.title == result.concept.title {
            problems.push(format!("{:?} relates to itself", entity.concept.title));
        }
    }

    for pair in result.category_index.windows(2) {
        let (x, y) = (&pair[0], &pair[1]);
        if (y.count, &x.name) > (x.count, &y.name) {
            problems.push(format!("category {:?} listed before {:?}", x.name, y.name));
        }
    }

    if result.fields.contains(Field::Category) {
        for cat in &result.category_index {
            let expected = result
                .entities
                .iter()
                .filter(|e| match &e.assigned_category {
                    Some(name) => *name == cat.name,
                    None => cat.name == UNCATEGORIZED,
                })
                .count();
            if expected != cat.count {
                problems.push(format!(
                    "category {:?} counts {} but {} entities are assigned",
                    cat.name, cat.count, expected
                ));
            }
        }
        let total: usize = result.category_index.iter().map(|c| c.count).sum();
        if total != result.entities.len() {
            problems.push(format!(
                "category index covers {total} of {} entities",
                result.entities.len()
            ));
        }
    }

    problems
}

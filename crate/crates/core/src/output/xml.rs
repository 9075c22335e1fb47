use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use crate::model::{ExplorationResult, Field, SnippetTrack};

use super::format_half_up;

pub const SCHEMA_VERSION: &str = "1";
pub const SR_PLACES: usize = 4;
pub const DISTANCE_PLACES: usize = 6;
pub const MAX_SNIPPETS: usize = 3;

const DECLARATION: &str = r#"<?xml version="1.0" encoding="UTF-8"?>"#;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid document at byte {position}: {message}")]
pub struct XmlError {
    pub position: u64,
    pub message: String,
}

/// The XML response as a tree of already-formatted strings.
///
/// Rendering and parsing are inverse: `parse(render(d)) == d` and therefore
/// `render(parse(s)) == s` for every `s` produced by `render`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlDocument {
    pub lang: String,
    pub query: String,
    pub from_cache: bool,
    pub concept: XmlConcept,
    pub related: Vec<XmlEntity>,
    /// Absent unless categories were selected.
    pub categories: Option<Vec<XmlCategory>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlConcept {
    pub title: String,
    pub url: String,
    pub thumbnail: Option<String>,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlEntity {
    pub title: String,
    pub url: String,
    pub sr: Option<String>,
    pub distance: Option<String>,
    pub category: Option<String>,
    pub thumbnail: Option<String>,
    pub snippets: Vec<XmlSnippet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlSnippet {
    pub track: String,
    pub source: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlCategory {
    pub name: String,
    pub size: usize,
}

impl XmlDocument {
    /// Projects a result onto the document, keeping only its selected fields.
    pub fn from_result(result: &ExplorationResult) -> Self {
        let fields = result.fields;
        let has = |f| fields.contains(f);
        let concept = &result.concept;
        XmlDocument {
            lang: concept.lang.to_string(),
            query: result.query.clone(),
            from_cache: result.from_cache,
            concept: XmlConcept {
                title: concept.title.clone(),
                url: concept.url.clone(),
                thumbnail: concept.thumbnail.clone().filter(|_| has(Field::Thumbnail)),
                description: has(Field::Description).then(|| concept.description.clone()),
            },
            related: result
                .entities
                .iter()
                .map(|e| XmlEntity {
                    title: e.concept.title.clone(),
                    url: e.concept.url.clone(),
                    sr: has(Field::Sr).then(|| format_half_up(e.score.relatedness, SR_PLACES)),
                    distance: has(Field::Sr)
                        .then(|| format_half_up(e.score.distance, DISTANCE_PLACES)),
                    category: e.assigned_category.clone().filter(|_| has(Field::Category)),
                    thumbnail: e.concept.thumbnail.clone().filter(|_| has(Field::Thumbnail)),
                    snippets: if has(Field::Snippets) {
                        e.snippets
                            .iter()
                            .take(MAX_SNIPPETS)
                            .map(|s| XmlSnippet {
                                track: s.track.as_str().to_string(),
                                source: s.source_title.clone(),
                                text: s.text.clone(),
                            })
                            .collect()
                    } else {
                        Vec::new()
                    },
                })
                .collect(),
            categories: has(Field::Category).then(|| {
                result
                    .category_index
                    .iter()
                    .map(|c| XmlCategory {
                        name: c.name.clone(),
                        size: c.count,
                    })
                    .collect()
            }),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(DECLARATION);
        out.push('\n');
        let _ = write!(
            out,
            r#"<sere version="{SCHEMA_VERSION}" lang="{}" query="{}" from_cache="{}">"#,
            escape(&self.lang),
            escape(&self.query),
            self.from_cache
        );
        out.push('\n');

        let c = &self.concept;
        let _ = write!(out, r#"  <concept title="{}" url="{}""#, escape(&c.title), escape(&c.url));
        optional_attr(&mut out, "thumbnail", c.thumbnail.as_deref());
        match &c.description {
            Some(d) if !d.is_empty() => {
                let _ = write!(out, ">\n    <description>{}</description>\n  </concept>\n", escape(d));
            }
            Some(_) => out.push_str(">\n    <description/>\n  </concept>\n"),
            None => out.push_str("/>\n"),
        }

        if self.related.is_empty() {
            out.push_str("  <related count=\"0\"/>\n");
        } else {
            let _ = writeln!(out, r#"  <related count="{}">"#, self.related.len());
            for e in &self.related {
                let _ = write!(out, r#"    <entity title="{}" url="{}""#, escape(&e.title), escape(&e.url));
                optional_attr(&mut out, "sr", e.sr.as_deref());
                optional_attr(&mut out, "distance", e.distance.as_deref());
                optional_attr(&mut out, "category", e.category.as_deref());
                optional_attr(&mut out, "thumbnail", e.thumbnail.as_deref());
                if e.snippets.is_empty() {
                    out.push_str("/>\n");
                    continue;
                }
                out.push_str(">\n");
                for s in &e.snippets {
                    let _ = writeln!(
                        out,
                        r#"      <snippet track="{}" source="{}">{}</snippet>"#,
                        escape(&s.track),
                        escape(&s.source),
                        escape(&s.text)
                    );
                }
                out.push_str("    </entity>\n");
            }
            out.push_str("  </related>\n");
        }

        match &self.categories {
            None => {}
            Some(list) if list.is_empty() => out.push_str("  <categories/>\n"),
            Some(list) => {
                out.push_str("  <categories>\n");
                for cat in list {
                    let _ = writeln!(
                        out,
                        r#"    <category name="{}" size="{}"/>"#,
                        escape(&cat.name),
                        cat.size
                    );
                }
                out.push_str("  </categories>\n");
            }
        }
        out.push_str("</sere>\n");
        out
    }

    /// Parses and validates a document. Unknown elements or attributes,
    /// missing required attributes, malformed numbers, a `count` that
    /// disagrees with the entity list and more than three snippets per
    /// entity are all errors.
    pub fn parse(xml: &str) -> Result<Self, XmlError> {
        Parser::new(xml).document()
    }
}

/// Serializes a result's selected fields as XML.
pub fn to_xml(result: &ExplorationResult) -> String {
    XmlDocument::from_result(result).render()
}

/// `<error code=".." message=".."/>`
pub fn error_xml(code: &str, message: &str) -> String {
    format!(
        "{DECLARATION}\n<error code=\"{}\" message=\"{}\"/>\n",
        escape(code),
        escape(message)
    )
}

fn optional_attr(out: &mut String, name: &str, value: Option<&str>) {
    if let Some(v) = value {
        let _ = write!(out, r#" {name}="{}""#, escape(v));
    }
}

struct Parser<'a> {
    reader: Reader<&'a [u8]>,
}

struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    empty: bool,
}

impl Element {
    fn take(&mut self, key: &str) -> Option<String> {
        let i = self.attrs.iter().position(|(k, _)| k == key)?;
        Some(self.attrs.remove(i).1)
    }
}

impl<'a> Parser<'a> {
    fn new(xml: &'a str) -> Self {
        let reader = Reader::from_str(xml);
        Self { reader }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, XmlError> {
        Err(XmlError {
            position: self.reader.buffer_position(),
            message: message.into(),
        })
    }

    fn element(&self, start: &BytesStart, empty: bool) -> Result<Element, XmlError> {
        let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
        let mut attrs = Vec::new();
        for attr in start.attributes() {
            let attr = match attr {
                Ok(a) => a,
                Err(e) => return self.fail(e.to_string()),
            };
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = match attr.unescape_value() {
                Ok(v) => v.into_owned(),
                Err(e) => return self.fail(e.to_string()),
            };
            if attrs.iter().any(|(k, _)| *k == key) {
                return self.fail(format!("duplicate attribute {key} on <{name}>"));
            }
            attrs.push((key, value));
        }
        Ok(Element { name, attrs, empty })
    }

    /// Next start or empty element, skipping whitespace; `None` at an end tag.
    fn next_element(&mut self) -> Result<Option<Element>, XmlError> {
        loop {
            let event = match self.reader.read_event() {
                Ok(e) => e,
                Err(e) => return self.fail(e.to_string()),
            };
            match event {
                Event::Start(s) => return self.element(&s, false).map(Some),
                Event::Empty(s) => return self.element(&s, true).map(Some),
                Event::End(_) => return Ok(None),
                Event::Text(t) if t.iter().all(u8::is_ascii_whitespace) => {}
                Event::Decl(_) | Event::Comment(_) => {}
                Event::Eof => return self.fail("unexpected end of document"),
                _ => return self.fail("unexpected content"),
            }
        }
    }

    /// Text content up to the closing tag of a leaf element.
    fn text(&mut self) -> Result<String, XmlError> {
        let mut text = String::new();
        loop {
            let event = match self.reader.read_event() {
                Ok(e) => e,
                Err(e) => return self.fail(e.to_string()),
            };
            match event {
                Event::Text(t) => match t.unescape() {
                    Ok(s) => text.push_str(&s),
                    Err(e) => return self.fail(e.to_string()),
                },
                Event::End(_) => return Ok(text),
                _ => return self.fail("expected text"),
            }
        }
    }

    fn finish(&self, el: &Element) -> Result<(), XmlError> {
        match el.attrs.first() {
            Some((k, _)) => self.fail(format!("unknown attribute {k} on <{}>", el.name)),
            None => Ok(()),
        }
    }

    fn required(&self, el: &mut Element, key: &str) -> Result<String, XmlError> {
        match el.take(key) {
            Some(v) => Ok(v),
            None => self.fail(format!("<{}> lacks {key}", el.name)),
        }
    }

    fn expect(&mut self, name: &str) -> Result<Element, XmlError> {
        match self.next_element()? {
            Some(el) if el.name == name => Ok(el),
            Some(el) => self.fail(format!("expected <{name}>, found <{}>", el.name)),
            None => self.fail(format!("expected <{name}>")),
        }
    }

    fn document(mut self) -> Result<XmlDocument, XmlError> {
        let mut root = self.expect("sere")?;
        if root.empty {
            return self.fail("<sere> is empty");
        }
        let version = self.required(&mut root, "version")?;
        if version != SCHEMA_VERSION {
            return self.fail(format!("unsupported version {version}"));
        }
        let lang = self.required(&mut root, "lang")?;
        if lang.len() != 2 || !lang.bytes().all(|b| b.is_ascii_lowercase()) {
            return self.fail(format!("invalid lang {lang:?}"));
        }
        let query = self.required(&mut root, "query")?;
        let from_cache = match self.required(&mut root, "from_cache")?.as_str() {
            "true" => true,
            "false" => false,
            other => return self.fail(format!("invalid from_cache {other:?}")),
        };
        self.finish(&root)?;

        let concept = self.concept()?;
        let related = self.related()?;
        let categories = match self.next_element()? {
            None => None,
            Some(el) if el.name == "categories" => {
                let list = self.categories(el)?;
                if self.next_element()?.is_some() {
                    return self.fail("unexpected element after <categories>");
                }
                Some(list)
            }
            Some(el) => return self.fail(format!("unexpected <{}>", el.name)),
        };
        loop {
            match self.reader.read_event() {
                Ok(Event::Eof) => break,
                Ok(Event::Text(t)) if t.iter().all(u8::is_ascii_whitespace) => {}
                Ok(_) => return self.fail("content after root element"),
                Err(e) => return self.fail(e.to_string()),
            }
        }
        Ok(XmlDocument {
            lang,
            query,
            from_cache,
            concept,
            related,
            categories,
        })
    }

    fn concept(&mut self) -> Result<XmlConcept, XmlError> {
        let mut el = self.expect("concept")?;
        let title = self.required(&mut el, "title")?;
        let url = self.required(&mut el, "url")?;
        let thumbnail = el.take("thumbnail");
        self.finish(&el)?;
        let mut description = None;
        if !el.empty {
            if let Some(child) = self.next_element()? {
                if child.name != "description" || !child.attrs.is_empty() {
                    return self.fail(format!("unexpected <{}> in <concept>", child.name));
                }
                description = Some(if child.empty { String::new() } else { self.text()? });
                if self.next_element()?.is_some() {
                    return self.fail("<concept> holds one <description>");
                }
            }
        }
        Ok(XmlConcept {
            title,
            url,
            thumbnail,
            description,
        })
    }

    fn related(&mut self) -> Result<Vec<XmlEntity>, XmlError> {
        let mut el = self.expect("related")?;
        let count = self.required(&mut el, "count")?;
        self.finish(&el)?;
        let Ok(count) = count.parse::<usize>() else {
            return self.fail(format!("invalid count {count:?}"));
        };
        let mut entities = Vec::new();
        if !el.empty {
            while let Some(child) = self.next_element()? {
                if child.name != "entity" {
                    return self.fail(format!("unexpected <{}> in <related>", child.name));
                }
                entities.push(self.entity(child)?);
            }
        }
        if entities.len() != count {
            return self.fail(format!("count {count} but {} entities", entities.len()));
        }
        Ok(entities)
    }

    fn entity(&mut self, mut el: Element) -> Result<XmlEntity, XmlError> {
        let title = self.required(&mut el, "title")?;
        let url = self.required(&mut el, "url")?;
        let sr = el.take("sr");
        let distance = el.take("distance");
        let category = el.take("category");
        let thumbnail = el.take("thumbnail");
        self.finish(&el)?;
        if let Some(sr) = &sr {
            if !is_fixed(sr, SR_PLACES) {
                return self.fail(format!("sr {sr:?} is not a {SR_PLACES}-place decimal"));
            }
        }
        if let Some(d) = &distance {
            if !is_fixed(d, DISTANCE_PLACES) && d != "INF" {
                return self.fail(format!("distance {d:?} is not a {DISTANCE_PLACES}-place decimal"));
            }
        }
        let mut snippets = Vec::new();
        if !el.empty {
            while let Some(mut child) = self.next_element()? {
                if child.name != "snippet" {
                    return self.fail(format!("unexpected <{}> in <entity>", child.name));
                }
                let track = self.required(&mut child, "track")?;
                if SnippetTrack::parse(&track).is_none() {
                    return self.fail(format!("unknown snippet track {track:?}"));
                }
                let source = self.required(&mut child, "source")?;
                self.finish(&child)?;
                let text = if child.empty { String::new() } else { self.text()? };
                snippets.push(XmlSnippet { track, source, text });
            }
        }
        if snippets.len() > MAX_SNIPPETS {
            return self.fail(format!("{} snippets for {title:?}", snippets.len()));
        }
        Ok(XmlEntity {
            title,
            url,
            sr,
            distance,
            category,
            thumbnail,
            snippets,
        })
    }

    fn categories(&mut self, el: Element) -> Result<Vec<XmlCategory>, XmlError> {
        self.finish(&el)?;
        let mut list = Vec::new();
        if el.empty {
            return Ok(list);
        }
        while let Some(mut child) = self.next_element()? {
            if child.name != "category" || !child.empty {
                return self.fail(format!("unexpected <{}> in <categories>", child.name));
            }
            let name = self.required(&mut child, "name")?;
            let size = self.required(&mut child, "size")?;
            self.finish(&child)?;
            let Ok(size) = size.parse() else {
                return self.fail(format!("invalid size {size:?}"));
            };
            list.push(XmlCategory { name, size });
        }
        Ok(list)
    }
}

/// `digits "." exactly places digits`, no sign.
fn is_fixed(s: &str, places: usize) -> bool {
    let Some((int, frac)) = s.split_once('.') else {
        return false;
    };
    !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.len() == places
        && frac.bytes().all(|b| b.is_ascii_digit())
}

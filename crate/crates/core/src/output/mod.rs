//! Wire formats for exploration results. The service and the CLI both
//! serialize through here, so their bodies are identical for equal inputs.

mod json;
mod xml;

pub use json::{error_json, to_json, JsonConcept, JsonDocument, JsonEntity, JsonScore};
pub use xml::{
    error_xml, to_xml, XmlCategory, XmlConcept, XmlDocument, XmlEntity, XmlError, XmlSnippet,
    DISTANCE_PLACES, MAX_SNIPPETS, SCHEMA_VERSION, SR_PLACES,
};

use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Xml,
    Json,
}

impl Format {
    pub fn content_type(&self) -> &'static str {
        match self {
            Format::Xml => "application/xml; charset=utf-8",
            Format::Json => "application/json",
        }
    }

    pub fn render(&self, result: &crate::model::ExplorationResult) -> String {
        match self {
            Format::Xml => to_xml(result),
            Format::Json => to_json(result),
        }
    }

    pub fn render_error(&self, code: &str, message: &str) -> String {
        match self {
            Format::Xml => error_xml(code, message),
            Format::Json => error_json(code, message),
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "xml" => Ok(Format::Xml),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// Fixed-point decimal with `places` digits, rounding half away from zero.
///
/// Rounding works on the shortest decimal form that reads back as `x`, so
/// `0.67445` becomes `0.6745` even though the nearest double lies just
/// below it. Non-finite values print as `INF`, `-INF` or `NaN`.
pub fn format_half_up(x: f64, places: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "INF".into() } else { "-INF".into() };
    }
    let shortest = format!("{}", x.abs());
    let (int, frac) = shortest.split_once('.').unwrap_or((&shortest, ""));
    let mut digits: Vec<u8> = int
        .bytes()
        .chain(frac.bytes().chain(std::iter::repeat(b'0')).take(places))
        .map(|b| b - b'0')
        .collect();
    if frac.as_bytes().get(places).is_some_and(|&d| d >= b'5') {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let int_len = digits.len() - places;
    let mut out = String::with_capacity(digits.len() + 2);
    if x < 0.0 && digits.iter().any(|&d| d != 0) {
        out.push('-');
    }
    for (i, d) in digits.iter().enumerate() {
        if i == int_len {
            out.push('.');
        }
        out.push((b'0' + d) as char);
    }
    if places == 0 {
        out.truncate(int_len);
    }
    out
}

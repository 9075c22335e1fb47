/// Abbreviations whose final period never ends a sentence.
pub const PROTECTED_ABBREVIATIONS: [&str; 6] = ["e.g.", "i.e.", "z.B.", "Dr.", "St.", "Nr."];

/// Splits plain text into sentences.
///
/// A `.`, `!` or `?` ends a sentence when it is followed by whitespace and an
/// uppercase letter, or by nothing but whitespace. A period closing one of
/// [`PROTECTED_ABBREVIATIONS`] never ends a sentence. Sentences are trimmed
/// and empty ones dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let end = i + c.len_utf8();
        let rest = &text[end..];
        let next = rest.trim_start();
        let boundary = match next.chars().next() {
            None => true,
            Some(n) => rest.starts_with(char::is_whitespace) && n.is_uppercase(),
        };
        if !boundary || (c == '.' && ends_with_abbreviation(&text[start..end])) {
            continue;
        }
        push_trimmed(&mut sentences, &text[start..end]);
        start = end;
    }
    push_trimmed(&mut sentences, &text[start..]);
    sentences
}

fn ends_with_abbreviation(segment: &str) -> bool {
    PROTECTED_ABBREVIATIONS.iter().any(|abbr| {
        segment.strip_suffix(abbr).is_some_and(|before| {
            before
                .chars()
                .next_back()
                .is_none_or(|p| !p.is_alphanumeric())
        })
    })
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

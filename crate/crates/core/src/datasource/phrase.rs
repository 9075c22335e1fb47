//! The phrase match rule shared by hit counting, search and snippet
//! extraction.
//!
//! Text and phrase are folded (per-character lowercase, whitespace runs
//! collapsed to one space, ends trimmed). A phrase matches at a position when
//! it is not embedded inside a longer alphanumeric token: if the phrase starts
//! (ends) with an alphanumeric character, the character before (after) the
//! match must not be alphanumeric.

/// Case- and whitespace-folds text for matching.
pub fn fold(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.extend(c.to_lowercase());
    }
    out
}

/// Counts match positions of an already folded phrase in folded text.
/// Overlapping occurrences are counted separately.
pub fn count_folded(haystack: &str, needle: &str) -> usize {
    let mut count = 0;
    for_each_match(haystack, needle, |_| {
        count += 1;
        true
    });
    count
}

pub fn contains_folded(haystack: &str, needle: &str) -> bool {
    let mut found = false;
    for_each_match(haystack, needle, |_| {
        found = true;
        false
    });
    found
}

/// Convenience wrapper folding both sides.
pub fn contains_phrase(text: &str, phrase: &str) -> bool {
    contains_folded(&fold(text), &fold(phrase))
}

/// Alphanumeric tokens of folded text, in order.
pub fn tokens(folded: &str) -> impl Iterator<Item = &str> {
    folded
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
}

/// Whether the folded `needle` occurs at byte offset `at` of `haystack`
/// under the boundary rule.
pub fn matches_at(haystack: &str, needle: &str, at: usize) -> bool {
    let (Some(first), Some(last)) = (needle.chars().next(), needle.chars().next_back()) else {
        return false;
    };
    let Some(rest) = haystack.get(at..) else {
        return false;
    };
    if !rest.starts_with(needle) {
        return false;
    }
    let end = at + needle.len();
    let clear_before = !first.is_alphanumeric()
        || haystack[..at].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
    let clear_after = !last.is_alphanumeric()
        || haystack[end..].chars().next().is_none_or(|c| !c.is_alphanumeric());
    clear_before && clear_after
}

fn for_each_match(haystack: &str, needle: &str, mut visit: impl FnMut(usize) -> bool) {
    let (Some(first), Some(last)) = (needle.chars().next(), needle.chars().next_back()) else {
        return;
    };
    let guard_start = first.is_alphanumeric();
    let guard_end = last.is_alphanumeric();

    let mut from = 0;
    while let Some(offset) = haystack[from..].find(needle) {
        let start = from + offset;
        let end = start + needle.len();
        let clear_before = !guard_start
            || haystack[..start]
                .chars()
                .next_back()
                .is_none_or(|c| !c.is_alphanumeric());
        let clear_after = !guard_end
            || haystack[end..]
                .chars()
                .next()
                .is_none_or(|c| !c.is_alphanumeric());
        if clear_before && clear_after && !visit(start) {
            return;
        }
        from = start + first.len_utf8();
    }
}

use sere_core::output::format_half_up;
use sere_core::output::SR_PLACES;
use sere_core::{ExplorationResult, Field};

const TITLE_WIDTH: usize = 36;
const CATEGORY_WIDTH: usize = 32;
const SNIPPET_WIDTH: usize = 60;

/// Cuts `text` to `width` characters, marking the cut with "...".
pub fn truncate(text: &str, width: usize) -> String {
    if text.chars().count() <= width {
        return text.to_string();
    }
    let kept: String = text.chars().take(width.saturating_sub(3)).collect();
    format!("{}...", kept.trim_end())
}

fn pad(text: &str, width: usize) -> String {
    let text = truncate(text, width);
    let fill = width.saturating_sub(text.chars().count());
    format!("{text}{}", " ".repeat(fill))
}

pub fn render(result: &ExplorationResult, top: usize) -> String {
    let mut out = format!("{} <{}>\n", result.concept.title, result.concept.url);
    let show_sr = result.fields.contains(Field::Sr);
    let show_category = result.fields.contains(Field::Category);
    let show_snippet = result.fields.contains(Field::Snippets);

    let mut header = format!("{:>4}  {}", "rank", pad("title", TITLE_WIDTH));
    if show_sr {
        header.push_str("  sr    ");
    }
    if show_category {
        header.push_str(&format!("  {}", pad("category", CATEGORY_WIDTH)));
    }
    if show_snippet {
        header.push_str("  snippet");
    }
    out.push_str(header.trim_end());
    out.push('\n');

    for (i, entity) in result.entities.iter().take(top).enumerate() {
        let mut row = format!("{:>4}  {}", i + 1, pad(&entity.concept.title, TITLE_WIDTH));
        if show_sr {
            row.push_str(&format!(
                "  {}",
                format_half_up(entity.score.relatedness, SR_PLACES)
            ));
        }
        if show_category {
            let category = entity.assigned_category.as_deref().unwrap_or("-");
            row.push_str(&format!("  {}", pad(category, CATEGORY_WIDTH)));
        }
        if show_snippet {
            if let Some(s) = entity.snippets.first() {
                row.push_str(&format!("  {}", truncate(&s.text, SNIPPET_WIDTH)));
            }
        }
        out.push_str(row.trim_end());
        out.push('\n');
    }
    if result.entities.len() > top {
        out.push_str(&format!("({} more)\n", result.entities.len() - top));
    }
    out
}

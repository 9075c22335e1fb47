use std::collections::HashMap;

use crate::model::{CategoryCount, RelatedEntity, UNCATEGORIZED};

/// Gives every entity the category whose group is largest within this
/// result set, and returns the per-category entry counts.
///
/// A group holds every entity listing that category. Ties between groups of
/// equal size go to the alphabetically first name. Entities without
/// categories stay unassigned and are counted under [`UNCATEGORIZED`]. The
/// index is ordered by count descending, then name ascending.
pub fn assign_categories(entities: &mut [RelatedEntity]) -> Vec<CategoryCount> {
    let mut group_size: HashMap<String, usize> = HashMap::new();
    for entity in entities.iter_mut() {
        dedup_in_place(&mut entity.categories);
        for category in &entity.categories {
            *group_size.entry(category.clone()).or_default() += 1;
        }
    }

    let mut assigned: HashMap<String, usize> = HashMap::new();
    for entity in entities.iter_mut() {
        entity.assigned_category = entity
            .categories
            .iter()
            .max_by(|x, y| group_size[*x].cmp(&group_size[*y]).then_with(|| y.cmp(x)))
            .cloned();
        let bucket = entity.assigned_category.as_deref().unwrap_or(UNCATEGORIZED);
        *assigned.entry(bucket.to_string()).or_default() += 1;
    }

    let mut index: Vec<CategoryCount> = assigned
        .into_iter()
        .map(|(name, count)| CategoryCount { name, count })
        .collect();
    index.sort_by(|x, y| y.count.cmp(&x.count).then_with(|| x.name.cmp(&y.name)));
    index
}

fn dedup_in_place(list: &mut Vec<String>) {
    let mut seen = std::collections::HashSet::new();
    list.retain(|c| seen.insert(c.clone()));
}

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases, folds diacritics to their base letters, turns every
/// non-alphanumeric character into a separator and collapses whitespace.
pub fn normalize(text: &str) -> String {
    let folded: String = text
        .chars()
        .flat_map(char::to_lowercase)
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Drops leading honorific tokens from an already normalized string.
/// `honorifics` must themselves be normalized.
pub fn strip_honorifics(normalized: &str, honorifics: &[String]) -> String {
    let mut rest: Vec<&str> = normalized.split(' ').filter(|t| !t.is_empty()).collect();
    loop {
        let hit = honorifics.iter().find(|h| {
            let tokens: Vec<&str> = h.split(' ').collect();
            !h.is_empty() && rest.len() > tokens.len() && rest[..tokens.len()] == tokens[..]
        });
        match hit {
            Some(h) => {
                rest.drain(..h.split(' ').count());
            }
            None => return rest.join(" "),
        }
    }
}

/// Sorted, deduplicated character trigrams of `##s##`. Empty for an empty string.
pub fn trigrams(s: &str) -> Vec<[char; 3]> {
    if s.is_empty() {
        return Vec::new();
    }
    let padded: Vec<char> = "##".chars().chain(s.chars()).chain("##".chars()).collect();
    let mut grams: Vec<[char; 3]> = padded.windows(3).map(|w| [w[0], w[1], w[2]]).collect();
    grams.sort_unstable();
    grams.dedup();
    grams
}

/// Dice coefficient of two sorted trigram sets.
pub fn dice(a: &[[char; 3]], b: &[[char; 3]]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (2 * common) as f64 / (a.len() + b.len()) as f64
}

/// Trigram Dice similarity of two strings, compared as given.
pub fn similarity(a: &str, b: &str) -> f64 {
    dice(&trigrams(a), &trigrams(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_case_accents_and_spacing() {
        assert_eq!(normalize("Fray Bartolomé de Miranda"), "fray bartolome de miranda");
        assert_eq!(normalize("  PEDRO   de Cazalla "), "pedro de cazalla");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("Doña María, (la) O'Neil."), "dona maria la o neil");
    }

    #[test]
    fn strips_only_leading_honorifics() {
        let h: Vec<String> = ["fray", "don", "dona", "fr"].iter().map(|s| s.to_string()).collect();
        assert_eq!(strip_honorifics("fray bartolome de miranda", &h), "bartolome de miranda");
        assert_eq!(strip_honorifics("don fr juan", &h), "juan");
        assert_eq!(strip_honorifics("juan don", &h), "juan don");
        // never strips a name down to nothing
        assert_eq!(strip_honorifics("don", &h), "don");
    }

    #[test]
    fn padded_trigrams() {
        assert_eq!(trigrams("ab"), vec![['#', '#', 'a'], ['#', 'a', 'b'], ['a', 'b', '#'], ['b', '#', '#']]);
        assert!(trigrams("").is_empty());
    }

    #[test]
    fn dice_edge_values() {
        assert_eq!(similarity("", ""), 0.0);
        assert_eq!(similarity("miranda", "miranda"), 1.0);
        assert_eq!(similarity("abc", "xyz"), 0.0);
    }
}

//! Caption-text keyword features.

use std::path::Path;

/// Keywords that recur in 2-D plot captions.
pub fn default_lexicon() -> Vec<String> {
    ["distribution", "slope", "axes", "plot", "range"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Loads a newline-separated lexicon file; blank lines are skipped and words
/// are lowercased.
pub fn load_lexicon(path: impl AsRef<Path>) -> std::io::Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

/// One boolean per lexicon word: true when the word occurs as a token of the
/// caption. Matching is case-insensitive, punctuation splits tokens, and a
/// trailing-"s" plural matches its stem ("plots" matches "plot"; "axes" only
/// matches exactly).
pub fn caption_features(caption: &str, lexicon: &[String]) -> Vec<bool> {
    let lowered = caption.to_lowercase();
    let tokens: Vec<&str> = lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect();
    lexicon
        .iter()
        .map(|word| {
            tokens
                .iter()
                .any(|t| *t == word.as_str() || t.strip_suffix('s') == Some(word.as_str()))
        })
        .collect()
}

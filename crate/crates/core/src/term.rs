//! Term key normalization.
//!
//! Embedding models key multiword expressions with underscores
//! (`smart_cities`), so user input and model vocabularies are both mapped
//! onto the same canonical form.

use crate::error::{Error, Result};

/// Trims, lowercases and joins internal whitespace runs with a single `_`.
///
/// ```
/// use vocab_expander::normalize_term;
/// assert_eq!(normalize_term("  Smart   Home ").unwrap(), "smart_home");
/// ```
pub fn normalize_term(raw: &str) -> Result<String> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(Error::InvalidTerm(raw.to_owned()));
    }
    let mut out = String::with_capacity(trimmed.len());
    for (i, word) in trimmed.split_whitespace().enumerate() {
        if i > 0 {
            out.push('_');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    Ok(out)
}

/// Human-readable form of a normalized key.
pub(crate) fn display_form(key: &str) -> String {
    key.replace('_', " ")
}

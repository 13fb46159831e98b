//! Tokenization, stopword filtering, and target masking.
//!
//! Every augmentation runs on sentences whose target span has been replaced
//! by the atomic placeholder token [`TARGET_PLACEHOLDER`], so no transform
//! can delete, split, or rewrite the aspect expression.

use std::collections::HashSet;
use std::sync::OnceLock;

use thiserror::Error;

use crate::corpus::OpinionRecord;

/// Placeholder substituted for the target span before tokenization.
pub const TARGET_PLACEHOLDER: &str = "$t$";

const STOPWORDS_EN: &str = include_str!("../resources/stopwords_en.txt");

#[derive(Debug, Error, PartialEq)]
pub enum MaskError {
    #[error("record {id}: text does not contain target {target:?} at chars {from}..{to}")]
    TargetMismatch {
        id: String,
        target: String,
        from: usize,
        to: usize,
    },
    #[error("record {id}: offsets {from}..{to} out of bounds for text of length {len}")]
    OffsetOutOfBounds {
        id: String,
        from: usize,
        to: usize,
        len: usize,
    },
    #[error("expected exactly one {placeholder} token, found {found}", placeholder = TARGET_PLACEHOLDER)]
    PlaceholderCount { found: usize },
}

/// A tokenized sentence with the target collapsed into one placeholder token.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSentence {
    pub tokens: Vec<String>,
    pub target: String,
    pub placeholder_index: usize,
}

/// Left context / target / right context token split of a sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextTriple {
    pub left: Vec<String>,
    pub target: Vec<String>,
    pub right: Vec<String>,
}

fn stopword_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_EN
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect()
    })
}

/// Splits on whitespace with every non-alphanumeric character detached as a
/// single-character token. The `$t$` placeholder is never split. Surface case
/// is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut first = true;
    for segment in text.split(TARGET_PLACEHOLDER) {
        if !first {
            tokens.push(TARGET_PLACEHOLDER.to_string());
        }
        first = false;
        tokenize_segment(segment, &mut tokens);
    }
    tokens
}

fn tokenize_segment(segment: &str, out: &mut Vec<String>) {
    let mut word = String::new();
    for ch in segment.chars() {
        if ch.is_alphanumeric() {
            word.push(ch);
        } else {
            if !word.is_empty() {
                out.push(std::mem::take(&mut word));
            }
            if !ch.is_whitespace() {
                out.push(ch.to_string());
            }
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
}

/// True for tokens on the embedded English stopword list, for the target
/// placeholder, and for tokens without any alphanumeric character. Stopwords
/// are never replaced, never looked up in WordNet, and never counted in Lesk
/// context sets.
pub fn is_stopword(token: &str) -> bool {
    if token == TARGET_PLACEHOLDER {
        return true;
    }
    if !token.chars().any(char::is_alphanumeric) {
        return true;
    }
    stopword_set().contains(token.to_lowercase().as_str())
}

/// Replaces the record's target span with `$t$` and tokenizes.
pub fn mask_target(record: &OpinionRecord) -> Result<MaskedSentence, MaskError> {
    let chars: Vec<char> = record.text.chars().collect();
    if record.target_from > record.target_to || record.target_to > chars.len() {
        return Err(MaskError::OffsetOutOfBounds {
            id: record.id.clone(),
            from: record.target_from,
            to: record.target_to,
            len: chars.len(),
        });
    }
    let span: String = chars[record.target_from..record.target_to].iter().collect();
    if span != record.target {
        return Err(MaskError::TargetMismatch {
            id: record.id.clone(),
            target: record.target.clone(),
            from: record.target_from,
            to: record.target_to,
        });
    }
    let mut masked = String::new();
    masked.extend(&chars[..record.target_from]);
    masked.push_str(TARGET_PLACEHOLDER);
    masked.extend(&chars[record.target_to..]);
    let tokens = tokenize(&masked);
    let found = tokens.iter().filter(|t| *t == TARGET_PLACEHOLDER).count();
    if found != 1 {
        return Err(MaskError::PlaceholderCount { found });
    }
    let placeholder_index = tokens
        .iter()
        .position(|t| t == TARGET_PLACEHOLDER)
        .expect("checked above");
    Ok(MaskedSentence {
        tokens,
        target: record.target.clone(),
        placeholder_index,
    })
}

/// Rebuilds sentence text from a masked sentence, substituting `new_target`
/// (or the original target) for the placeholder. Returns the text together
/// with the half-open character offsets of the target span.
pub fn unmask_target(
    ms: &MaskedSentence,
    new_target: Option<&str>,
) -> Result<(String, usize, usize), MaskError> {
    let found = ms
        .tokens
        .iter()
        .filter(|t| *t == TARGET_PLACEHOLDER)
        .count();
    if found != 1 {
        return Err(MaskError::PlaceholderCount { found });
    }
    let target = new_target.unwrap_or(&ms.target);
    let mut text = String::new();
    let mut target_from = 0;
    let mut target_to = 0;
    let mut prev: Option<&str> = None;
    for token in &ms.tokens {
        let emitted: &str = if token == TARGET_PLACEHOLDER { target } else { token };
        if let Some(prev) = prev {
            if !glue_before(emitted) && !glue_after(prev) {
                text.push(' ');
            }
        }
        if token == TARGET_PLACEHOLDER {
            target_from = text.chars().count();
            target_to = target_from + target.chars().count();
        }
        text.push_str(emitted);
        prev = Some(emitted);
    }
    Ok((text, target_from, target_to))
}

impl MaskedSentence {
    /// Splits tokens around the placeholder into left / target / right parts.
    pub fn context_triple(&self) -> ContextTriple {
        ContextTriple {
            left: self.tokens[..self.placeholder_index].to_vec(),
            target: tokenize(&self.target),
            right: self.tokens[self.placeholder_index + 1..].to_vec(),
        }
    }
}

fn is_punct(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

fn is_apostrophe(token: &str) -> bool {
    matches!(token, "'" | "\u{2019}")
}

// Detokenization spacing: no space before closing punctuation, none after an
// opening bracket, none around apostrophes.
fn glue_before(token: &str) -> bool {
    if is_apostrophe(token) {
        return true;
    }
    is_punct(token)
        && !token
            .chars()
            .next()
            .map(|c| matches!(c, '(' | '[' | '{' | '\u{00ab}' | '\u{201c}' | '\u{2018}'))
            .unwrap_or(false)
}

fn glue_after(token: &str) -> bool {
    if is_apostrophe(token) {
        return true;
    }
    is_punct(token)
        && token
            .chars()
            .next()
            .map(|c| matches!(c, '(' | '[' | '{' | '\u{00ab}' | '\u{201c}' | '\u{2018}'))
            .unwrap_or(false)
}

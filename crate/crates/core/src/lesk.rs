//! Simplified-Lesk word sense disambiguation: pick the synset whose
//! gloss+examples signature shares the most words with the sentence context.
//!
//! All-zero overlap falls back to the most frequent sense, and ties at
//! positive overlap go to the lower sense rank. The context is the full
//! sentence minus stopwords, punctuation, the target placeholder, and the
//! word being disambiguated.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::text::{is_stopword, MaskedSentence};
use crate::wordnet::{StopwordPolicy, Synset, WnPos, WordNetDb};

#[derive(Debug, Error, PartialEq)]
pub enum LeskError {
    #[error("word {0:?} has no WordNet sense, even after inflection fallback")]
    AbsentSense(String),
}

/// A disambiguation request: the word, its sentence context set, and an
/// optional part-of-speech filter from the tagger.
#[derive(Debug, Clone)]
pub struct LeskQuery {
    pub word: String,
    pub context: BTreeSet<String>,
    pub pos: Option<WnPos>,
}

impl LeskQuery {
    /// Builds the context set from a masked sentence, excluding the word at
    /// `word_index` itself.
    pub fn from_masked(ms: &MaskedSentence, word_index: usize, pos: Option<WnPos>) -> LeskQuery {
        let word = ms.tokens[word_index].clone();
        let word_lower = word.to_lowercase();
        let context = ms
            .tokens
            .iter()
            .enumerate()
            .filter(|(i, token)| *i != word_index && !is_stopword(token) && token.to_lowercase() != word_lower)
            .map(|(_, token)| token.to_lowercase())
            .collect();
        LeskQuery {
            word,
            context,
            pos,
        }
    }
}

/// The winning sense with its overlap score. `fallback_used` is set when
/// every overlap was zero or no synset matched the part-of-speech filter.
#[derive(Debug, Clone)]
pub struct SenseChoice<'a> {
    pub synset: &'a Synset,
    pub overlap: usize,
    pub sense_rank: usize,
    pub fallback_used: bool,
}

/// Signature/context overlap: the size of the intersection.
pub fn overlap(signature: &BTreeSet<String>, context: &BTreeSet<String>) -> usize {
    signature.intersection(context).count()
}

/// Chooses the sense of `query.word` with maximum signature overlap against
/// the context, under the stated fallback and tie rules.
pub fn disambiguate<'a>(
    db: &'a WordNetDb,
    query: &LeskQuery,
    policy: StopwordPolicy,
) -> Result<SenseChoice<'a>, LeskError> {
    let mut pos_filter_missed = false;
    let mut candidates = db.synsets(&query.word, query.pos);
    if candidates.is_empty() && query.pos.is_some() {
        pos_filter_missed = true;
        candidates = db.synsets(&query.word, None);
    }
    if candidates.is_empty() {
        return Err(LeskError::AbsentSense(query.word.clone()));
    }
    let mut best_index = 0;
    let mut best_overlap = 0;
    for (index, synset) in candidates.iter().enumerate() {
        let score = overlap(&synset.signature(policy), &query.context);
        // Strictly greater keeps the earlier (more frequent) sense on ties.
        if score > best_overlap {
            best_overlap = score;
            best_index = index;
        }
    }
    Ok(SenseChoice {
        synset: candidates[best_index],
        overlap: best_overlap,
        sense_rank: best_index + 1,
        fallback_used: best_overlap == 0 || pos_filter_missed,
    })
}

//! The four easy-data-augmentation transforms adapted for target
//! preservation: synonym replacement, random insertion, random swap, and
//! random deletion, all operating on masked sentences so the aspect
//! expression is a single untouchable token.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::corpus::{AugmentRun, AugmentedRecord, Method, OpinionRecord, SkipNote};
use crate::seed::record_stream;
use crate::text::{is_stopword, mask_target, tokenize, unmask_target, MaskedSentence};
use crate::wordnet::WordNetDb;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdaMethod {
    Sr,
    Ri,
    Rs,
    Rd,
}

impl EdaMethod {
    pub const ORDER: [EdaMethod; 4] = [EdaMethod::Sr, EdaMethod::Ri, EdaMethod::Rs, EdaMethod::Rd];

    pub fn method(self) -> Method {
        match self {
            EdaMethod::Sr => Method::Sr,
            EdaMethod::Ri => Method::Ri,
            EdaMethod::Rs => Method::Rs,
            EdaMethod::Rd => Method::Rd,
        }
    }

    pub fn parse(tag: &str) -> Option<EdaMethod> {
        match tag {
            "sr" => Some(EdaMethod::Sr),
            "ri" => Some(EdaMethod::Ri),
            "rs" => Some(EdaMethod::Rs),
            "rd" => Some(EdaMethod::Rd),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdaConfig {
    /// Share of tokens changed per sentence.
    pub alpha: f64,
    pub seed: u64,
    pub methods: Vec<EdaMethod>,
    /// Apply at least one edit even when `alpha * len` floors to zero.
    pub floor_one: bool,
    /// Force exactly one swap per sentence instead of `alpha * len` swaps.
    pub single_swap: bool,
    pub parallel: bool,
}

impl Default for EdaConfig {
    fn default() -> Self {
        EdaConfig {
            alpha: 0.1,
            seed: crate::seed::DEFAULT_SEED,
            methods: EdaMethod::ORDER.to_vec(),
            floor_one: true,
            single_swap: false,
            parallel: false,
        }
    }
}

/// A transformed sentence plus whether anything actually changed. Unchanged
/// outputs are still emitted, flagged as no-ops in provenance.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub sentence: MaskedSentence,
    pub changed: bool,
}

fn num_ops(alpha: f64, len: usize, floor_one: bool) -> usize {
    let n = (alpha * len as f64).floor() as usize;
    if floor_one {
        n.max(1)
    } else {
        n
    }
}

fn eligible_indices(tokens: &[String]) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !is_stopword(t))
        .map(|(i, _)| i)
        .collect()
}

/// Union of lemmas over every synset of `word` (any part of speech), minus
/// the word itself. Sorted so a seeded draw is stable.
pub fn synonym_pool(db: &WordNetDb, word: &str) -> Vec<String> {
    let mut pool: Vec<String> = db
        .synsets(word, None)
        .iter()
        .flat_map(|synset| synset.synonyms(word))
        .collect();
    pool.sort();
    pool.dedup();
    pool
}

/// Replaces `max(1, floor(alpha * len))` eligible tokens with a uniformly
/// random WordNet synonym drawn across all senses. Words without synonyms
/// are skipped; multiword synonyms expand in place.
pub fn synonym_replacement<R: Rng>(
    ms: &MaskedSentence,
    db: &WordNetDb,
    alpha: f64,
    floor_one: bool,
    rng: &mut R,
) -> Transformed {
    let n = num_ops(alpha, ms.tokens.len(), floor_one);
    let mut tokens = ms.tokens.clone();
    let mut placeholder = ms.placeholder_index;
    let mut candidates = eligible_indices(&tokens);
    candidates.shuffle(rng);
    let mut replaced = 0;
    let mut cursor = 0;
    while cursor < candidates.len() && replaced < n {
        let position = candidates[cursor];
        let pool = synonym_pool(db, &tokens[position]);
        if pool.is_empty() {
            cursor += 1;
            continue;
        }
        let synonym = &pool[rng.random_range(0..pool.len())];
        let new_tokens = tokenize(synonym);
        let width = new_tokens.len().max(1);
        tokens.splice(position..position + 1, new_tokens);
        for other in candidates.iter_mut().skip(cursor + 1) {
            if *other > position {
                *other += width - 1;
            }
        }
        if placeholder > position {
            placeholder += width - 1;
        }
        replaced += 1;
        cursor += 1;
    }
    Transformed {
        sentence: MaskedSentence {
            tokens,
            target: ms.target.clone(),
            placeholder_index: placeholder,
        },
        changed: replaced > 0,
    }
}

/// Performs `n` insertions; each picks a random eligible word with at least
/// one synonym and inserts a random synonym of it at a uniformly random
/// position. Placeholder atomicity keeps insertions out of the target.
pub fn random_insertion<R: Rng>(
    ms: &MaskedSentence,
    db: &WordNetDb,
    alpha: f64,
    floor_one: bool,
    rng: &mut R,
) -> Transformed {
    let n = num_ops(alpha, ms.tokens.len(), floor_one);
    let mut tokens = ms.tokens.clone();
    let mut placeholder = ms.placeholder_index;
    let mut inserted = 0;
    for _ in 0..n {
        let mut order = eligible_indices(&tokens);
        if order.is_empty() {
            break;
        }
        order.shuffle(rng);
        let mut done = false;
        for &position in &order {
            let pool = synonym_pool(db, &tokens[position]);
            if pool.is_empty() {
                continue;
            }
            let synonym = &pool[rng.random_range(0..pool.len())];
            let at = rng.random_range(0..=tokens.len());
            let new_tokens = tokenize(synonym);
            let width = new_tokens.len();
            tokens.splice(at..at, new_tokens);
            if at <= placeholder {
                placeholder += width;
            }
            done = true;
            break;
        }
        if !done {
            break;
        }
        inserted += 1;
    }
    Transformed {
        sentence: MaskedSentence {
            tokens,
            target: ms.target.clone(),
            placeholder_index: placeholder,
        },
        changed: inserted > 0,
    }
}

/// Exchanges two distinct uniformly chosen token positions, `n` times. The
/// placeholder moves as a unit, so the full target expression is swapped.
pub fn random_swap<R: Rng>(
    ms: &MaskedSentence,
    alpha: f64,
    floor_one: bool,
    single_swap: bool,
    rng: &mut R,
) -> Transformed {
    if ms.tokens.len() < 2 {
        return Transformed {
            sentence: ms.clone(),
            changed: false,
        };
    }
    let n = if single_swap {
        1
    } else {
        num_ops(alpha, ms.tokens.len(), floor_one)
    };
    let mut tokens = ms.tokens.clone();
    let mut placeholder = ms.placeholder_index;
    for _ in 0..n {
        let a = rng.random_range(0..tokens.len());
        let b = loop {
            let b = rng.random_range(0..tokens.len());
            if b != a {
                break b;
            }
        };
        tokens.swap(a, b);
        if placeholder == a {
            placeholder = b;
        } else if placeholder == b {
            placeholder = a;
        }
    }
    Transformed {
        sentence: MaskedSentence {
            tokens,
            target: ms.target.clone(),
            placeholder_index: placeholder,
        },
        changed: n > 0,
    }
}

/// Deletes each non-placeholder token independently with probability
/// `alpha`. If everything would be deleted, one uniformly chosen survivor is
/// kept. The placeholder is never deleted.
pub fn random_deletion<R: Rng>(ms: &MaskedSentence, alpha: f64, rng: &mut R) -> Transformed {
    if alpha <= 0.0 {
        return Transformed {
            sentence: ms.clone(),
            changed: false,
        };
    }
    let mut keep = vec![true; ms.tokens.len()];
    let mut removable: Vec<usize> = Vec::new();
    for (index, slot) in keep.iter_mut().enumerate() {
        if index == ms.placeholder_index {
            continue;
        }
        removable.push(index);
        if rng.random_bool(alpha.min(1.0)) {
            *slot = false;
        }
    }
    if !removable.is_empty() && removable.iter().all(|&i| !keep[i]) {
        let survivor = removable[rng.random_range(0..removable.len())];
        keep[survivor] = true;
    }
    let mut tokens = Vec::new();
    let mut placeholder = 0;
    let mut deleted = false;
    for (index, token) in ms.tokens.iter().enumerate() {
        if keep[index] {
            if index == ms.placeholder_index {
                placeholder = tokens.len();
            }
            tokens.push(token.clone());
        } else {
            deleted = true;
        }
    }
    Transformed {
        sentence: MaskedSentence {
            tokens,
            target: ms.target.clone(),
            placeholder_index: placeholder,
        },
        changed: deleted,
    }
}

/// Runs every enabled method over every record, one augmented record per
/// (record, method) pair in method order sr, ri, rs, rd. Records that cannot
/// be masked are skipped with a note.
pub fn eda_augment(records: &[OpinionRecord], db: &WordNetDb, config: &EdaConfig) -> AugmentRun {
    let per_record = |record: &OpinionRecord| -> Result<Vec<AugmentedRecord>, SkipNote> {
        let ms = mask_target(record).map_err(|e| SkipNote {
            record_id: record.id.clone(),
            method: None,
            reason: e.to_string(),
        })?;
        let mut out = Vec::new();
        for m in EdaMethod::ORDER {
            if !config.methods.contains(&m) {
                continue;
            }
            let method = m.method();
            let mut rng = record_stream(config.seed, &record.id, &method.tag());
            let transformed = match m {
                EdaMethod::Sr => synonym_replacement(&ms, db, config.alpha, config.floor_one, &mut rng),
                EdaMethod::Ri => random_insertion(&ms, db, config.alpha, config.floor_one, &mut rng),
                EdaMethod::Rs => {
                    random_swap(&ms, config.alpha, config.floor_one, config.single_swap, &mut rng)
                }
                EdaMethod::Rd => random_deletion(&ms, config.alpha, &mut rng),
            };
            out.push(finish(record, &method, config.alpha, config.seed, transformed)?);
        }
        Ok(out)
    };

    let results: Vec<Result<Vec<AugmentedRecord>, SkipNote>> = if config.parallel {
        records.par_iter().map(per_record).collect()
    } else {
        records.iter().map(per_record).collect()
    };

    let mut run = AugmentRun::default();
    for result in results {
        match result {
            Ok(records) => run.records.extend(records),
            Err(skip) => run.skips.push(skip),
        }
    }
    run
}

pub(crate) fn finish(
    source: &OpinionRecord,
    method: &Method,
    alpha: f64,
    seed: u64,
    transformed: Transformed,
) -> Result<AugmentedRecord, SkipNote> {
    let (text, target_from, target_to) =
        unmask_target(&transformed.sentence, None).map_err(|e| SkipNote {
            record_id: source.id.clone(),
            method: Some(method.tag()),
            reason: e.to_string(),
        })?;
    let mut params = BTreeMap::new();
    params.insert("alpha".to_string(), format!("{alpha}"));
    params.insert("seed".to_string(), seed.to_string());
    if !transformed.changed {
        params.insert("noop".to_string(), "true".to_string());
    }
    Ok(AugmentedRecord {
        record: OpinionRecord {
            id: format!("{}:{}", source.id, method.tag()),
            text,
            target: source.target.clone(),
            target_from,
            target_to,
            category: source.category.clone(),
            polarity: source.polarity,
            sentence_attrs: Vec::new(),
            opinion_attrs: Vec::new(),
        },
        method: method.clone(),
        sources: vec![source.id.clone()],
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Polarity;
    use crate::seed::record_stream;
    use std::collections::HashMap;
    use std::path::Path;

    fn db() -> WordNetDb {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/wndb");
        WordNetDb::load(&dir).unwrap()
    }

    fn record(id: &str, text: &str, target: &str) -> OpinionRecord {
        let from = text.find(target).map(|b| text[..b].chars().count()).unwrap();
        OpinionRecord {
            id: id.into(),
            text: text.into(),
            target: target.into(),
            target_from: from,
            target_to: from + target.chars().count(),
            category: "SERVICE#GENERAL".into(),
            polarity: Polarity::Negative,
            sentence_attrs: vec![],
            opinion_attrs: vec![],
        }
    }

    fn hostess() -> OpinionRecord {
        record(
            "h1",
            "the hostess is rude to the point of being offensive",
            "hostess",
        )
    }

    #[test]
    fn sr_replaces_and_preserves_placeholder() {
        let db = db();
        let ms = mask_target(&hostess()).unwrap();
        let mut rng = record_stream(7, "h1", "sr");
        let out = synonym_replacement(&ms, &db, 0.3, true, &mut rng);
        assert!(out.changed);
        assert_eq!(
            out.sentence.tokens.iter().filter(|t| *t == "$t$").count(),
            1
        );
        assert_ne!(out.sentence.tokens, ms.tokens);
    }

    #[test]
    fn sr_pool_spans_all_senses_and_parts_of_speech() {
        let db = db();
        let pool = synonym_pool(&db, "point");
        assert!(pool.contains(&"breaker point".to_string()));
        let pool = synonym_pool(&db, "us");
        assert!(pool.contains(&"atomic number 92".to_string()));
        let pool = synonym_pool(&db, "offensive");
        assert!(pool.contains(&"nauseous".to_string()));
    }

    #[test]
    fn sr_alpha_zero_without_floor_is_identity() {
        let db = db();
        let ms = mask_target(&hostess()).unwrap();
        let mut rng = record_stream(7, "h1", "sr");
        let out = synonym_replacement(&ms, &db, 0.0, false, &mut rng);
        assert!(!out.changed);
        assert_eq!(out.sentence, ms);
    }

    #[test]
    fn sr_no_synonyms_is_flagged_noop() {
        let db = db();
        // None of these words are in the fixture lexicon.
        let ms = mask_target(&record("x", "zzz qqq vvv", "qqq")).unwrap();
        let mut rng = record_stream(7, "x", "sr");
        let out = synonym_replacement(&ms, &db, 0.5, true, &mut rng);
        assert!(!out.changed);
        assert_eq!(out.sentence.tokens, ms.tokens);
    }

    #[test]
    fn ri_grows_length_and_keeps_one_placeholder() {
        let db = db();
        let ms = mask_target(&hostess()).unwrap();
        let mut rng = record_stream(7, "h1", "ri");
        let out = random_insertion(&ms, &db, 0.05, true, &mut rng);
        assert!(out.changed);
        assert!(out.sentence.tokens.len() > ms.tokens.len());
        assert_eq!(
            out.sentence.tokens.iter().filter(|t| *t == "$t$").count(),
            1
        );
        assert_eq!(
            out.sentence.tokens[out.sentence.placeholder_index], "$t$",
            "placeholder index must track the moved placeholder"
        );
    }

    #[test]
    fn ri_is_deterministic_under_seed() {
        let db = db();
        let ms = mask_target(&hostess()).unwrap();
        let run = |seed| {
            let mut rng = record_stream(seed, "h1", "ri");
            random_insertion(&ms, &db, 0.2, true, &mut rng).sentence
        };
        assert_eq!(run(11), run(11));
    }

    #[test]
    fn rs_preserves_token_multiset() {
        let ms = mask_target(&hostess()).unwrap();
        let mut rng = record_stream(3, "h1", "rs");
        let out = random_swap(&ms, 0.3, true, false, &mut rng);
        let mut before = ms.tokens.clone();
        let mut after = out.sentence.tokens.clone();
        before.sort();
        after.sort();
        assert_eq!(before, after);
        assert_eq!(out.sentence.tokens[out.sentence.placeholder_index], "$t$");
    }

    #[test]
    fn rs_double_swap_is_identity() {
        let ms = mask_target(&hostess()).unwrap();
        let mut tokens = ms.tokens.clone();
        tokens.swap(2, 5);
        tokens.swap(2, 5);
        assert_eq!(tokens, ms.tokens);
    }

    #[test]
    fn rs_short_sentence_unchanged() {
        let ms = MaskedSentence {
            tokens: vec!["$t$".into()],
            target: "x".into(),
            placeholder_index: 0,
        };
        let mut rng = record_stream(3, "s", "rs");
        let out = random_swap(&ms, 0.3, true, false, &mut rng);
        assert!(!out.changed);
    }

    #[test]
    fn rd_alpha_zero_is_identity() {
        let ms = mask_target(&hostess()).unwrap();
        let mut rng = record_stream(3, "h1", "rd");
        let out = random_deletion(&ms, 0.0, &mut rng);
        assert!(!out.changed);
        assert_eq!(out.sentence, ms);
    }

    #[test]
    fn rd_alpha_one_keeps_placeholder_plus_one_survivor() {
        let ms = mask_target(&hostess()).unwrap();
        let mut rng = record_stream(3, "h1", "rd");
        let out = random_deletion(&ms, 1.0, &mut rng);
        assert_eq!(out.sentence.tokens.len(), 2);
        assert!(out.sentence.tokens.contains(&"$t$".to_string()));
    }

    #[test]
    fn rd_survival_rate_matches_expectation() {
        // Mean surviving non-placeholder tokens over many trials should be
        // close to (1 - alpha) * (L - 1), within 3%.
        let ms = mask_target(&hostess()).unwrap();
        let alpha = 0.3;
        let trials = 10_000;
        let mut total = 0usize;
        for trial in 0..trials {
            let mut rng = record_stream(trial as u64, "h1", "rd");
            let out = random_deletion(&ms, alpha, &mut rng);
            total += out.sentence.tokens.len() - 1;
        }
        let mean = total as f64 / trials as f64;
        let expected = (1.0 - alpha) * (ms.tokens.len() as f64 - 1.0);
        assert!(
            (mean - expected).abs() / expected < 0.03,
            "mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn rd_output_tokens_subset_of_input() {
        let ms = mask_target(&hostess()).unwrap();
        let mut rng = record_stream(5, "h1", "rd");
        let out = random_deletion(&ms, 0.5, &mut rng);
        let mut remaining: HashMap<&String, isize> = HashMap::new();
        for token in &ms.tokens {
            *remaining.entry(token).or_insert(0) += 1;
        }
        for token in &out.sentence.tokens {
            let count = remaining.get_mut(token).expect("token came from input");
            *count -= 1;
            assert!(*count >= 0, "deletion introduced token {token:?}");
        }
    }

    #[test]
    fn eda_augment_count_contract() {
        let db = db();
        let records: Vec<OpinionRecord> = (0..10)
            .map(|k| {
                record(
                    &format!("r{k}"),
                    "the food is phenomenal and the service is slow",
                    "food",
                )
            })
            .collect();
        let run = eda_augment(&records, &db, &EdaConfig::default());
        assert_eq!(run.records.len(), 4 * records.len());
        assert!(run.skips.is_empty());
        let first_four: Vec<String> = run.records[..4]
            .iter()
            .map(|a| a.method.tag())
            .collect();
        assert_eq!(first_four, ["sr", "ri", "rs", "rd"], "method order per record");
        let sr_only = EdaConfig {
            methods: vec![EdaMethod::Sr],
            ..EdaConfig::default()
        };
        let run = eda_augment(&records, &db, &sr_only);
        assert_eq!(run.records.len(), records.len());
    }

    #[test]
    fn eda_augment_is_deterministic_and_parallel_agrees() {
        let db = db();
        let records: Vec<OpinionRecord> = (0..8)
            .map(|k| {
                record(
                    &format!("r{k}"),
                    "the waitress was very patient with us and the food is phenomenal!",
                    "waitress",
                )
            })
            .collect();
        let sequential = eda_augment(&records, &db, &EdaConfig::default());
        let parallel = eda_augment(
            &records,
            &db,
            &EdaConfig {
                parallel: true,
                ..EdaConfig::default()
            },
        );
        assert_eq!(sequential.records, parallel.records);
    }

    #[test]
    fn eda_augment_preserves_targets() {
        let db = db();
        let records = vec![hostess(), record("w1", "we enjoyed the fish and chips here", "fish and chips")];
        let run = eda_augment(&records, &db, &EdaConfig { alpha: 0.4, ..EdaConfig::default() });
        for augmented in &run.records {
            augmented.validate().unwrap();
            assert_eq!(augmented.record.target, records
                .iter()
                .find(|r| r.id == augmented.sources[0])
                .unwrap()
                .target);
        }
    }

    #[test]
    fn bad_offsets_become_skip_notes() {
        let db = db();
        let mut bad = hostess();
        bad.target_from += 1;
        let run = eda_augment(&[bad], &db, &EdaConfig::default());
        assert!(run.records.is_empty());
        assert_eq!(run.skips.len(), 1);
        assert_eq!(run.skips[0].record_id, "h1");
    }
}

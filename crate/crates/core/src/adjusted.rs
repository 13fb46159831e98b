//! Sense-aware EDA: synonym replacement and insertion draw only from the
//! synset chosen by simplified-Lesk disambiguation over the tagged sentence,
//! and random swap is replaced by swapping targets between records of the
//! same category.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::corpus::{AugmentRun, AugmentedRecord, Method, OpinionRecord, SkipNote};
use crate::eda::{finish, Transformed};
use crate::lesk::{disambiguate, LeskError, LeskQuery};
use crate::seed::{labeled_stream, record_stream};
use crate::tagger::PerceptronModel;
use crate::text::{is_stopword, mask_target, tokenize, MaskedSentence};
use crate::wordnet::{StopwordPolicy, WordNetDb};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjustedMethod {
    SrWsd,
    RiWsd,
    Ts,
}

impl AdjustedMethod {
    pub const ORDER: [AdjustedMethod; 3] =
        [AdjustedMethod::SrWsd, AdjustedMethod::RiWsd, AdjustedMethod::Ts];

    pub fn method(self) -> Method {
        match self {
            AdjustedMethod::SrWsd => Method::SrWsd,
            AdjustedMethod::RiWsd => Method::RiWsd,
            AdjustedMethod::Ts => Method::Ts,
        }
    }

    pub fn parse(tag: &str) -> Option<AdjustedMethod> {
        match tag {
            "sr_wsd" => Some(AdjustedMethod::SrWsd),
            "ri_wsd" => Some(AdjustedMethod::RiWsd),
            "ts" => Some(AdjustedMethod::Ts),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdjustedConfig {
    pub alpha: f64,
    pub seed: u64,
    pub methods: Vec<AdjustedMethod>,
    pub floor_one: bool,
    /// Pair targets within a category in seeded-shuffle order instead of
    /// sorted-id order.
    pub shuffle_pairs: bool,
    pub lesk_stopwords: StopwordPolicy,
    pub parallel: bool,
}

impl Default for AdjustedConfig {
    fn default() -> Self {
        AdjustedConfig {
            alpha: 0.1,
            seed: crate::seed::DEFAULT_SEED,
            methods: AdjustedMethod::ORDER.to_vec(),
            floor_one: true,
            shuffle_pairs: false,
            lesk_stopwords: StopwordPolicy::Drop,
            parallel: false,
        }
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

fn num_ops(alpha: f64, len: usize, floor_one: bool) -> usize {
    let n = (alpha * len as f64).floor() as usize;
    if floor_one {
        n.max(1)
    } else {
        n
    }
}

/// Synonyms of `word` restricted to its disambiguated synset in this
/// sentence. `None` when the word is absent from WordNet or the sense has no
/// other lemma.
fn sense_synonyms(
    db: &WordNetDb,
    ms: &MaskedSentence,
    tagged_pos: Option<crate::wordnet::WnPos>,
    word_index: usize,
    policy: StopwordPolicy,
) -> Option<Vec<String>> {
    let query = LeskQuery::from_masked(ms, word_index, tagged_pos);
    let choice = match disambiguate(db, &query, policy) {
        Ok(choice) => choice,
        Err(LeskError::AbsentSense(_)) => return None,
    };
    let pool = choice.synset.synonyms(&query.word);
    if pool.is_empty() {
        None
    } else {
        Some(pool)
    }
}

/// Replaces `max(1, floor(alpha * len))` eligible tokens with a random
/// synonym from each word's disambiguated synset. Words absent from WordNet
/// or whose best sense has no other lemma are skipped.
pub fn wsd_synonym_replacement<R: Rng>(
    ms: &MaskedSentence,
    db: &WordNetDb,
    model: &PerceptronModel,
    alpha: f64,
    floor_one: bool,
    policy: StopwordPolicy,
    rng: &mut R,
) -> Transformed {
    let tagged = model.tag(&ms.tokens);
    let n = num_ops(alpha, ms.tokens.len(), floor_one);
    let mut tokens = ms.tokens.clone();
    let mut placeholder = ms.placeholder_index;
    // (original index for tagging/context, current splice position)
    let mut candidates: Vec<(usize, usize)> =
        eligible_indices(&ms.tokens).into_iter().map(|i| (i, i)).collect();
    candidates.shuffle(rng);
    let mut replaced = 0;
    let mut cursor = 0;
    while cursor < candidates.len() && replaced < n {
        let (original, position) = candidates[cursor];
        cursor += 1;
        let Some(pool) = sense_synonyms(db, ms, tagged[original].wn_pos, original, policy) else {
            continue;
        };
        let synonym = &pool[rng.random_range(0..pool.len())];
        let new_tokens = tokenize(synonym);
        let width = new_tokens.len().max(1);
        tokens.splice(position..position + 1, new_tokens);
        for (_, other) in candidates.iter_mut().skip(cursor) {
            if *other > position {
                *other += width - 1;
            }
        }
        if placeholder > position {
            placeholder += width - 1;
        }
        replaced += 1;
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

/// As [`crate::eda::random_insertion`], but the inserted synonym comes from
/// the disambiguated synset of the chosen word. Words whose sense offers no
/// synonym are skipped in favor of another word.
pub fn wsd_random_insertion<R: Rng>(
    ms: &MaskedSentence,
    db: &WordNetDb,
    model: &PerceptronModel,
    alpha: f64,
    floor_one: bool,
    policy: StopwordPolicy,
    rng: &mut R,
) -> Transformed {
    let tagged = model.tag(&ms.tokens);
    let n = num_ops(alpha, ms.tokens.len(), floor_one);
    let mut tokens = ms.tokens.clone();
    let mut placeholder = ms.placeholder_index;
    let mut inserted = 0;
    for _ in 0..n {
        let mut order = eligible_indices(&ms.tokens);
        if order.is_empty() {
            break;
        }
        order.shuffle(rng);
        let mut done = false;
        for &original in &order {
            let Some(pool) = sense_synonyms(db, ms, tagged[original].wn_pos, original, policy)
            else {
                continue;
            };
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

/// Swaps targets between records of the same category: records are paired in
/// deterministic order (sorted by id, consecutive pairs), each member gets
/// its partner's target substituted at its own offsets, exactly one output
/// per input record. An odd leftover swaps with the first record of its
/// category; a singleton category swaps with itself, flagged as a no-op.
pub fn target_swap(records: &[OpinionRecord], shuffle_pairs: bool, seed: u64) -> AugmentRun {
    let (outputs, skips) = target_swap_by_index(records, shuffle_pairs, seed);
    let mut run = AugmentRun {
        records: Vec::with_capacity(outputs.len()),
        skips,
    };
    for index in 0..records.len() {
        if let Some(augmented) = outputs.get(&index) {
            run.records.push(augmented.clone());
        }
    }
    run
}

fn target_swap_by_index(
    records: &[OpinionRecord],
    shuffle_pairs: bool,
    seed: u64,
) -> (HashMap<usize, AugmentedRecord>, Vec<SkipNote>) {
    let mut skips = Vec::new();
    let mut by_category: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (index, record) in records.iter().enumerate() {
        if let Err(error) = record.validate() {
            skips.push(SkipNote {
                record_id: record.id.clone(),
                method: Some(Method::Ts.tag()),
                reason: error.to_string(),
            });
            continue;
        }
        by_category.entry(&record.category).or_default().push(index);
    }

    let mut partner_of: HashMap<usize, usize> = HashMap::new();
    for (category, mut members) in by_category {
        if shuffle_pairs {
            let mut rng = labeled_stream(seed, &format!("ts:{category}"));
            members.shuffle(&mut rng);
        } else {
            members.sort_by(|&a, &b| records[a].id.cmp(&records[b].id));
        }
        if members.len() == 1 {
            partner_of.insert(members[0], members[0]);
            continue;
        }
        let mut chunks = members.chunks_exact(2);
        for pair in &mut chunks {
            partner_of.insert(pair[0], pair[1]);
            partner_of.insert(pair[1], pair[0]);
        }
        if let [leftover] = chunks.remainder() {
            partner_of.insert(*leftover, members[0]);
        }
    }

    let mut outputs = HashMap::with_capacity(partner_of.len());
    for (&index, &partner_index) in &partner_of {
        let record = &records[index];
        let partner = &records[partner_index];
        let chars: Vec<char> = record.text.chars().collect();
        let mut text = String::new();
        text.extend(&chars[..record.target_from]);
        text.push_str(&partner.target);
        text.extend(&chars[record.target_to..]);
        let target_to = record.target_from + partner.target.chars().count();
        let mut params = BTreeMap::new();
        params.insert(
            "pairing".to_string(),
            if shuffle_pairs { "shuffled" } else { "sorted" }.to_string(),
        );
        if shuffle_pairs {
            params.insert("seed".to_string(), seed.to_string());
        }
        if partner_index == index {
            params.insert("noop".to_string(), "true".to_string());
        }
        outputs.insert(
            index,
            AugmentedRecord {
                record: OpinionRecord {
                    id: format!("{}:ts", record.id),
                    text,
                    target: partner.target.clone(),
                    target_from: record.target_from,
                    target_to,
                    category: record.category.clone(),
                    polarity: record.polarity,
                    sentence_attrs: Vec::new(),
                    opinion_attrs: Vec::new(),
                },
                method: Method::Ts,
                sources: vec![record.id.clone(), partner.id.clone()],
                params,
            },
        );
    }
    (outputs, skips)
}

/// Runs the enabled adjusted methods over the corpus, one output per
/// (record, method) in order sr_wsd, ri_wsd, ts.
pub fn adjusted_eda_augment(
    records: &[OpinionRecord],
    db: &WordNetDb,
    model: &PerceptronModel,
    config: &AdjustedConfig,
) -> AugmentRun {
    let (ts_outputs, ts_skips) = if config.methods.contains(&AdjustedMethod::Ts) {
        target_swap_by_index(records, config.shuffle_pairs, config.seed)
    } else {
        (HashMap::new(), Vec::new())
    };

    let per_record = |(index, record): (usize, &OpinionRecord)| {
        let mut out = Vec::new();
        let mut skips = Vec::new();
        let masked = mask_target(record);
        for m in AdjustedMethod::ORDER {
            if !config.methods.contains(&m) {
                continue;
            }
            match m {
                AdjustedMethod::SrWsd | AdjustedMethod::RiWsd => {
                    let ms = match &masked {
                        Ok(ms) => ms,
                        Err(error) => {
                            skips.push(SkipNote {
                                record_id: record.id.clone(),
                                method: Some(m.method().tag()),
                                reason: error.to_string(),
                            });
                            continue;
                        }
                    };
                    let method = m.method();
                    let mut rng = record_stream(config.seed, &record.id, &method.tag());
                    let transformed = if m == AdjustedMethod::SrWsd {
                        wsd_synonym_replacement(
                            ms,
                            db,
                            model,
                            config.alpha,
                            config.floor_one,
                            config.lesk_stopwords,
                            &mut rng,
                        )
                    } else {
                        wsd_random_insertion(
                            ms,
                            db,
                            model,
                            config.alpha,
                            config.floor_one,
                            config.lesk_stopwords,
                            &mut rng,
                        )
                    };
                    match finish(record, &method, config.alpha, config.seed, transformed) {
                        Ok(augmented) => out.push(augmented),
                        Err(skip) => skips.push(skip),
                    }
                }
                AdjustedMethod::Ts => {
                    if let Some(augmented) = ts_outputs.get(&index) {
                        out.push(augmented.clone());
                    }
                }
            }
        }
        (out, skips)
    };

    let results: Vec<(Vec<AugmentedRecord>, Vec<SkipNote>)> = if config.parallel {
        records.par_iter().enumerate().map(per_record).collect()
    } else {
        records.iter().enumerate().map(per_record).collect()
    };

    let mut run = AugmentRun {
        records: Vec::new(),
        skips: ts_skips,
    };
    for (records, skips) in results {
        run.records.extend(records);
        run.skips.extend(skips);
    }
    run
}

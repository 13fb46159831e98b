//! Greedy averaged perceptron part-of-speech tagger.
//!
//! Tags are assigned left to right from the standard contextual feature set
//! (surrounding words, word shape, prefixes/suffixes, the two previously
//! predicted tags). Words the training corpus tags unambiguously bypass
//! prediction through a tag dictionary, and the `$t$` placeholder is always
//! tagged `NN`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::text::TARGET_PLACEHOLDER;
use crate::wordnet::WnPos;

const MODEL_MAGIC: &[u8; 8] = b"ABSAPOS\0";
const MODEL_VERSION: u32 = 1;
const EMBEDDED_MODEL: &[u8] = include_bytes!("../resources/pos.model");

/// The tagged-corpus resource the embedded model is trained on
/// (`cargo run --example train_pos_model` regenerates the model file).
pub const TRAINING_CORPUS: &str = include_str!("../resources/pos_train.txt");

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("corpus line {0}: token {1:?} has no _TAG suffix")]
    BadCorpusToken(usize, String),
    #[error("sentence {0}: {1} tokens but {2} tags")]
    LengthMismatch(usize, usize, usize),
    #[error("model file: bad magic header")]
    BadMagic,
    #[error("model file: unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("model file: truncated")]
    Truncated,
    #[error("model file: checksum mismatch (corrupt payload)")]
    ChecksumMismatch,
    #[error("model file: {0}")]
    BadPayload(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A token with its Penn-Treebank-style tag and, when the tag is one of
/// NN*/VB*/JJ*/RB*, the corresponding WordNet part of speech.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedToken {
    pub token: String,
    pub tag: String,
    pub wn_pos: Option<WnPos>,
}

/// Maps a Penn Treebank tag prefix onto a WordNet part of speech.
pub fn wn_pos_for_tag(tag: &str) -> Option<WnPos> {
    if tag.starts_with("NN") {
        Some(WnPos::Noun)
    } else if tag.starts_with("VB") {
        Some(WnPos::Verb)
    } else if tag.starts_with("JJ") {
        Some(WnPos::Adjective)
    } else if tag.starts_with("RB") {
        Some(WnPos::Adverb)
    } else {
        None
    }
}

/// Finalized averaged-perceptron weights plus the unambiguous-word tag
/// dictionary. Training counters are not persisted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronModel {
    weights: BTreeMap<String, BTreeMap<String, f64>>,
    tagdict: BTreeMap<String, String>,
    classes: BTreeSet<String>,
    default_tag: String,
}

impl PerceptronModel {
    /// Tags a token sequence greedily, left to right.
    pub fn tag<T: AsRef<str>>(&self, tokens: &[T]) -> Vec<TaggedToken> {
        let words: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let context = build_context(&words);
        let mut output = Vec::with_capacity(words.len());
        let mut prev = START[0].to_string();
        let mut prev2 = START[1].to_string();
        for (i, word) in words.iter().enumerate() {
            let tag = if *word == TARGET_PLACEHOLDER {
                "NN".to_string()
            } else if let Some(tag) = self.tagdict.get(&normalize(word)) {
                tag.clone()
            } else {
                let features = extract_features(i, word, &context, &prev, &prev2);
                self.predict(&features)
            };
            output.push(TaggedToken {
                token: word.to_string(),
                tag: tag.clone(),
                wn_pos: wn_pos_for_tag(&tag),
            });
            prev2 = std::mem::replace(&mut prev, tag);
        }
        output
    }

    fn predict(&self, features: &[String]) -> String {
        let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
        for feature in features {
            if let Some(tag_weights) = self.weights.get(feature) {
                for (tag, weight) in tag_weights {
                    *scores.entry(tag).or_insert(0.0) += weight;
                }
            }
        }
        scores
            .iter()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(tag, _)| tag.to_string())
            .unwrap_or_else(|| self.default_tag.clone())
    }
}

const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

fn normalize(word: &str) -> String {
    if word.contains('-') && !word.starts_with('-') {
        "!HYPHEN".to_string()
    } else if word.chars().all(|c| c.is_ascii_digit()) && word.chars().count() == 4 {
        "!YEAR".to_string()
    } else if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        "!DIGIT".to_string()
    } else {
        word.to_lowercase()
    }
}

fn build_context(words: &[&str]) -> Vec<String> {
    let mut context = Vec::with_capacity(words.len() + 4);
    context.push(START[0].to_string());
    context.push(START[1].to_string());
    context.extend(words.iter().map(|w| normalize(w)));
    context.push(END[0].to_string());
    context.push(END[1].to_string());
    context
}

fn suffix(s: &str, n: usize) -> String {
    let chars: Vec<char> = s.chars().collect();
    chars[chars.len().saturating_sub(n)..].iter().collect()
}

fn extract_features(i: usize, word: &str, context: &[String], prev: &str, prev2: &str) -> Vec<String> {
    let i = i + 2; // offset for the two start markers
    let mut features = Vec::with_capacity(14);
    let mut add = |parts: &[&str]| features.push(parts.join(" "));
    add(&["bias"]);
    add(&["i suffix", &suffix(word, 3)]);
    add(&["i pref1", &word.chars().next().map(String::from).unwrap_or_default()]);
    add(&["i-1 tag", prev]);
    add(&["i-2 tag", prev2]);
    add(&["i tag+i-2 tag", prev, prev2]);
    add(&["i word", &context[i]]);
    add(&["i-1 tag+i word", prev, &context[i]]);
    add(&["i-1 word", &context[i - 1]]);
    add(&["i-1 suffix", &suffix(&context[i - 1], 3)]);
    add(&["i-2 word", &context[i - 2]]);
    add(&["i+1 word", &context[i + 1]]);
    add(&["i+1 suffix", &suffix(&context[i + 1], 3)]);
    add(&["i+2 word", &context[i + 2]]);
    features
}

/// One training sentence: tokens and their gold tags.
pub type TaggedSentence = (Vec<String>, Vec<String>);

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub iterations: usize,
    pub seed: u64,
    /// Minimum corpus frequency for a word to enter the tag dictionary.
    pub tagdict_min_freq: usize,
    /// Minimum share of one tag for a word to count as unambiguous.
    pub tagdict_ambiguity: f64,
    /// Fraction of sentences held out for the accuracy report.
    pub heldout_fraction: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            iterations: 5,
            seed: crate::seed::DEFAULT_SEED,
            tagdict_min_freq: 5,
            tagdict_ambiguity: 0.97,
            heldout_fraction: 0.1,
        }
    }
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub model: PerceptronModel,
    pub train_accuracy: f64,
    pub heldout_accuracy: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct TrainWeight {
    weight: f64,
    total: f64,
    timestamp: u64,
}

/// Trains an averaged perceptron on a tagged corpus. Sentences are shuffled
/// between iterations with a seeded generator, so identical inputs produce
/// identical models.
pub fn train(corpus: &[TaggedSentence], options: &TrainOptions) -> Result<TrainOutcome, TaggerError> {
    if corpus.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    for (n, (tokens, tags)) in corpus.iter().enumerate() {
        if tokens.len() != tags.len() {
            return Err(TaggerError::LengthMismatch(n, tokens.len(), tags.len()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut rng);
    let heldout_len = ((corpus.len() as f64) * options.heldout_fraction).floor() as usize;
    let (train_idx, heldout_idx) = order.split_at(corpus.len() - heldout_len);
    let train_set: Vec<&TaggedSentence> = train_idx.iter().map(|&k| &corpus[k]).collect();
    let heldout_set: Vec<&TaggedSentence> = heldout_idx.iter().map(|&k| &corpus[k]).collect();
    if train_set.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }

    let (tagdict, classes, default_tag) = build_tagdict(&train_set, options);
    let mut weights: HashMap<String, HashMap<String, TrainWeight>> = HashMap::new();
    let mut instances: u64 = 0;

    let mut epoch_order: Vec<usize> = (0..train_set.len()).collect();
    for _ in 0..options.iterations {
        for &s in &epoch_order {
            let (tokens, tags) = train_set[s];
            let words: Vec<&str> = tokens.iter().map(String::as_str).collect();
            let context = build_context(&words);
            let mut prev = START[0].to_string();
            let mut prev2 = START[1].to_string();
            for (i, word) in words.iter().enumerate() {
                let truth = &tags[i];
                let guess = if let Some(tag) = tagdict.get(&normalize(word)) {
                    tag.clone()
                } else {
                    instances += 1;
                    let features = extract_features(i, word, &context, &prev, &prev2);
                    let guess = predict_training(&weights, &classes, &default_tag, &features);
                    if &guess != truth {
                        for feature in &features {
                            update(&mut weights, feature, truth, 1.0, instances);
                            update(&mut weights, feature, &guess, -1.0, instances);
                        }
                    }
                    guess
                };
                prev2 = std::mem::replace(&mut prev, guess);
            }
        }
        epoch_order.shuffle(&mut rng);
    }

    let averaged = average_weights(weights, instances);
    let model = PerceptronModel {
        weights: averaged,
        tagdict,
        classes,
        default_tag,
    };
    let train_accuracy = accuracy(&model, &train_set);
    let heldout_accuracy = if heldout_set.is_empty() {
        None
    } else {
        Some(accuracy(&model, &heldout_set))
    };
    Ok(TrainOutcome {
        model,
        train_accuracy,
        heldout_accuracy,
    })
}

fn build_tagdict(
    corpus: &[&TaggedSentence],
    options: &TrainOptions,
) -> (BTreeMap<String, String>, BTreeSet<String>, String) {
    let mut counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut tag_totals: BTreeMap<String, usize> = BTreeMap::new();
    let mut classes = BTreeSet::new();
    for (tokens, tags) in corpus {
        for (token, tag) in tokens.iter().zip(tags) {
            *counts
                .entry(normalize(token))
                .or_default()
                .entry(tag.clone())
                .or_insert(0) += 1;
            *tag_totals.entry(tag.clone()).or_insert(0) += 1;
            classes.insert(tag.clone());
        }
    }
    let default_tag = tag_totals
        .iter()
        .max_by_key(|(tag, count)| (*count, std::cmp::Reverse(tag.as_str())))
        .map(|(tag, _)| tag.clone())
        .unwrap_or_else(|| "NN".to_string());
    let mut tagdict = BTreeMap::new();
    for (word, tag_counts) in counts {
        let total: usize = tag_counts.values().sum();
        let (best_tag, best) = tag_counts
            .iter()
            .max_by_key(|(tag, count)| (*count, std::cmp::Reverse(tag.as_str())))
            .expect("non-empty");
        if total >= options.tagdict_min_freq
            && (*best as f64) / (total as f64) >= options.tagdict_ambiguity
        {
            tagdict.insert(word, best_tag.clone());
        }
    }
    // The placeholder rule overrides everything else at tag time.
    tagdict.remove(TARGET_PLACEHOLDER);
    (tagdict, classes, default_tag)
}

fn predict_training(
    weights: &HashMap<String, HashMap<String, TrainWeight>>,
    classes: &BTreeSet<String>,
    default_tag: &str,
    features: &[String],
) -> String {
    let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
    for feature in features {
        if let Some(tag_weights) = weights.get(feature) {
            for (tag, w) in tag_weights {
                *scores.entry(tag).or_insert(0.0) += w.weight;
            }
        }
    }
    let mut best: Option<(&str, f64)> = None;
    for class in classes {
        let score = scores.get(class.as_str()).copied().unwrap_or(0.0);
        if best.map(|(_, s)| score > s).unwrap_or(true) {
            best = Some((class, score));
        }
    }
    best.map(|(tag, _)| tag.to_string())
        .unwrap_or_else(|| default_tag.to_string())
}

fn update(
    weights: &mut HashMap<String, HashMap<String, TrainWeight>>,
    feature: &str,
    tag: &str,
    delta: f64,
    instances: u64,
) {
    let entry = weights
        .entry(feature.to_string())
        .or_default()
        .entry(tag.to_string())
        .or_default();
    entry.total += (instances - entry.timestamp) as f64 * entry.weight;
    entry.timestamp = instances;
    entry.weight += delta;
}

fn average_weights(
    weights: HashMap<String, HashMap<String, TrainWeight>>,
    instances: u64,
) -> BTreeMap<String, BTreeMap<String, f64>> {
    let mut averaged = BTreeMap::new();
    if instances == 0 {
        return averaged;
    }
    for (feature, tag_weights) in weights {
        let mut out = BTreeMap::new();
        for (tag, w) in tag_weights {
            let total = w.total + (instances - w.timestamp) as f64 * w.weight;
            let mean = (total / instances as f64 * 1000.0).round() / 1000.0;
            if mean != 0.0 {
                out.insert(tag, mean);
            }
        }
        if !out.is_empty() {
            averaged.insert(feature, out);
        }
    }
    averaged
}

fn accuracy(model: &PerceptronModel, corpus: &[&TaggedSentence]) -> f64 {
    let mut correct = 0usize;
    let mut total = 0usize;
    for (tokens, tags) in corpus {
        for (tagged, gold) in model.tag(tokens).iter().zip(tags.iter()) {
            if &tagged.tag == gold {
                correct += 1;
            }
            total += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

/// Parses `word_TAG word_TAG ...` lines, one sentence per line.
pub fn parse_tagged_corpus(text: &str) -> Result<Vec<TaggedSentence>, TaggerError> {
    let mut corpus = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = Vec::new();
        let mut tags = Vec::new();
        for chunk in line.split_whitespace() {
            let (word, tag) = chunk
                .rsplit_once('_')
                .ok_or_else(|| TaggerError::BadCorpusToken(line_no + 1, chunk.to_string()))?;
            tokens.push(word.to_string());
            tags.push(tag.to_string());
        }
        corpus.push((tokens, tags));
    }
    Ok(corpus)
}

/// Serializes a model as magic + version + checksummed JSON payload.
pub fn save_model(model: &PerceptronModel, path: &Path) -> Result<(), TaggerError> {
    fs::write(path, model_to_bytes(model)?)?;
    Ok(())
}

pub fn model_to_bytes(model: &PerceptronModel) -> Result<Vec<u8>, TaggerError> {
    let payload = serde_json::to_vec(model)?;
    let mut out = Vec::with_capacity(payload.len() + 52);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&Sha256::digest(&payload));
    out.extend_from_slice(&payload);
    Ok(out)
}

pub fn load_model(path: &Path) -> Result<PerceptronModel, TaggerError> {
    model_from_bytes(&fs::read(path)?)
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<PerceptronModel, TaggerError> {
    if bytes.len() < 52 {
        return Err(TaggerError::Truncated);
    }
    if &bytes[..8] != MODEL_MAGIC {
        return Err(TaggerError::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("sized"));
    if version != MODEL_VERSION {
        return Err(TaggerError::UnsupportedVersion(version));
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().expect("sized")) as usize;
    let payload = bytes
        .get(52..52 + len)
        .ok_or(TaggerError::Truncated)?;
    if Sha256::digest(payload).as_slice() != &bytes[20..52] {
        return Err(TaggerError::ChecksumMismatch);
    }
    Ok(serde_json::from_slice(payload)?)
}

/// The model shipped with the crate, trained on the embedded tagged corpus.
pub fn pretrained() -> &'static PerceptronModel {
    static MODEL: OnceLock<PerceptronModel> = OnceLock::new();
    MODEL.get_or_init(|| model_from_bytes(EMBEDDED_MODEL).expect("embedded POS model is valid"))
}

//! Backtranslation with the target span held fixed: the left and right
//! contexts are routed English → pivot → English independently and the
//! results are concatenated around the unchanged target.
//!
//! Backends implement [`TranslationClient`]. Deterministic stub backends
//! cover testing and offline runs; the HTTP backend posts single strings to
//! a configurable endpoint. All translations go through a persistent
//! JSON-lines cache so reruns make no backend calls.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AugmentRun, AugmentedRecord, Method, OpinionRecord, SkipNote};

/// Default pivot languages: two Latin-alphabet pivots and one non-Latin.
pub const DEFAULT_PIVOTS: [&str; 3] = ["nl", "es", "ja"];

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("language {lang:?} is not supported by backend {backend}")]
    UnsupportedLanguage { lang: String, backend: String },
    #[error("backend {backend} failed after {attempts} attempt(s): {message}")]
    Backend {
        backend: String,
        attempts: u32,
        message: String,
    },
    #[error("record {record_id}: {message}")]
    InvalidRecord { record_id: String, message: String },
    #[error("cache {path} line {line}: {message}")]
    CacheFormat {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Backend capability metadata.
#[derive(Debug, Clone, Default)]
pub struct Capabilities {
    /// `None` means unconstrained.
    pub supported_languages: Option<BTreeSet<String>>,
    pub requests_per_minute: Option<u32>,
}

pub trait TranslationClient: Send + Sync {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String, TranslateError>;
    fn capabilities(&self) -> Capabilities;
    fn name(&self) -> &str;
}

/// Retries with exponential backoff, then gives up.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            initial_backoff: Duration::from_secs(1),
        }
    }
}

fn translate_with_retry(
    client: &dyn TranslationClient,
    retry: &RetryPolicy,
    text: &str,
    source: &str,
    target: &str,
) -> Result<String, TranslateError> {
    let mut backoff = retry.initial_backoff;
    let mut last = String::new();
    for attempt in 1..=retry.attempts.max(1) {
        match client.translate(text, source, target) {
            Ok(out) => return Ok(out),
            Err(TranslateError::Backend { message, .. }) => {
                last = message;
                if attempt < retry.attempts {
                    std::thread::sleep(backoff);
                    backoff *= 2;
                }
            }
            Err(other) => return Err(other),
        }
    }
    Err(TranslateError::Backend {
        backend: client.name().to_string(),
        attempts: retry.attempts,
        message: last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StubMode {
    /// Returns the input unchanged.
    Identity,
    /// Wraps each whitespace chunk in a language marker, so a round trip is
    /// a visible deterministic rewrite.
    Marker,
    /// Fixed toy bilingual lexicon with mild round-trip drift;
    /// out-of-lexicon tokens pass through.
    Dictionary,
}

impl StubMode {
    pub fn parse(s: &str) -> Option<StubMode> {
        match s {
            "identity" => Some(StubMode::Identity),
            "marker" => Some(StubMode::Marker),
            "dictionary" => Some(StubMode::Dictionary),
            _ => None,
        }
    }
}

/// Deterministic in-process backend for tests and offline runs. Counts its
/// calls so cache behavior can be asserted.
pub struct StubClient {
    mode: StubMode,
    calls: AtomicUsize,
}

impl StubClient {
    pub fn new(mode: StubMode) -> StubClient {
        StubClient {
            mode,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn call_count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

fn map_trimmed(text: &str, f: impl Fn(&str) -> String) -> String {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return text.to_string();
    }
    let start = text.len() - text.trim_start().len();
    let end = text.trim_end().len();
    format!("{}{}{}", &text[..start], f(trimmed), &text[end..])
}

fn dictionary_lookup(token: &str, source: &str, target: &str) -> Option<&'static str> {
    let entries: &[(&str, &str)] = match (source, target) {
        ("en", "nl") => &[
            ("the", "de"),
            ("food", "eten"),
            ("good", "goed"),
            ("slow", "langzaam"),
            ("service", "bediening"),
            ("cold", "koud"),
            ("place", "plek"),
            ("very", "erg"),
        ],
        ("nl", "en") => &[
            ("de", "the"),
            ("eten", "meal"),
            ("goed", "good"),
            ("langzaam", "slow"),
            ("bediening", "service"),
            ("koud", "cold"),
            ("plek", "place"),
            ("erg", "very"),
        ],
        ("en", "es") => &[
            ("the", "el"),
            ("food", "comida"),
            ("good", "buena"),
            ("slow", "lenta"),
            ("service", "servicio"),
            ("cold", "fría"),
            ("place", "lugar"),
        ],
        ("es", "en") => &[
            ("el", "the"),
            ("comida", "food"),
            ("buena", "nice"),
            ("lenta", "slow"),
            ("servicio", "service"),
            ("fría", "cold"),
            ("lugar", "place"),
        ],
        ("en", "ja") => &[
            ("the", "その"),
            ("food", "食べ物"),
            ("good", "良い"),
            ("slow", "遅い"),
            ("was", "だった"),
        ],
        ("ja", "en") => &[
            ("その", "of"),
            ("食べ物", "food"),
            ("良い", "good"),
            ("遅い", "slow"),
            ("だった", "was"),
        ],
        _ => &[],
    };
    entries
        .iter()
        .find(|(from, _)| *from == token)
        .map(|(_, to)| *to)
}

impl TranslationClient for StubClient {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String, TranslateError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let out = match self.mode {
            StubMode::Identity => text.to_string(),
            StubMode::Marker => map_trimmed(text, |core| {
                core.split_whitespace()
                    .map(|chunk| format!("\u{27e8}{target}\u{27e9}{chunk}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            }),
            StubMode::Dictionary => map_trimmed(text, |core| {
                core.split_whitespace()
                    .map(|token| {
                        dictionary_lookup(&token.to_lowercase(), source, target)
                            .map(str::to_string)
                            .unwrap_or_else(|| token.to_string())
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            }),
        };
        Ok(out)
    }

    fn capabilities(&self) -> Capabilities {
        let supported_languages = match self.mode {
            StubMode::Dictionary => Some(
                ["en", "nl", "es", "ja"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            ),
            _ => None,
        };
        Capabilities {
            supported_languages,
            requests_per_minute: None,
        }
    }

    fn name(&self) -> &str {
        match self.mode {
            StubMode::Identity => "stub:identity",
            StubMode::Marker => "stub:marker",
            StubMode::Dictionary => "stub:dictionary",
        }
    }
}

/// Vendor-neutral HTTP backend. Posts
/// `{"q": text, "source": source, "target": target, "format": "text"}` and
/// reads `translatedText` (or `translation`) from the JSON response.
/// Endpoint and key come from `ABSA_TRANSLATE_ENDPOINT` /
/// `ABSA_TRANSLATE_KEY` unless given explicitly.
pub struct HttpClient {
    endpoint: String,
    api_key: Option<String>,
    agent: reqwest::blocking::Client,
}

impl HttpClient {
    pub fn new(endpoint: String, api_key: Option<String>) -> HttpClient {
        let agent = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(15))
            .build()
            .expect("default TLS backend available");
        HttpClient {
            endpoint,
            api_key,
            agent,
        }
    }

    pub fn from_env() -> Option<HttpClient> {
        let endpoint = std::env::var("ABSA_TRANSLATE_ENDPOINT").ok()?;
        let api_key = std::env::var("ABSA_TRANSLATE_KEY").ok();
        Some(HttpClient::new(endpoint, api_key))
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }
}

impl TranslationClient for HttpClient {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String, TranslateError> {
        let backend = self.name().to_string();
        let failure = |message: String| TranslateError::Backend {
            backend: backend.clone(),
            attempts: 1,
            message,
        };
        let mut request = self.agent.post(&self.endpoint).json(&serde_json::json!({
            "q": text,
            "source": source,
            "target": target,
            "format": "text",
        }));
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| failure(e.to_string()))?;
        if !response.status().is_success() {
            return Err(failure(format!("HTTP {}", response.status())));
        }
        let body: serde_json::Value = response.json().map_err(|e| failure(e.to_string()))?;
        body.get("translatedText")
            .or_else(|| body.get("translation"))
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or_else(|| failure("response carries no translated text".to_string()))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::default()
    }

    fn name(&self) -> &str {
        "http"
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    src_lang: String,
    dst_lang: String,
    input: String,
    output: String,
}

/// Persistent (text, source, target) → translation map, stored as one JSON
/// object per line. Hits never touch the backend.
pub struct TranslationCache {
    map: HashMap<(String, String, String), String>,
    file: Option<File>,
}

impl TranslationCache {
    pub fn in_memory() -> TranslationCache {
        TranslationCache {
            map: HashMap::new(),
            file: None,
        }
    }

    /// Opens (or creates) a cache file and loads existing entries.
    pub fn open(path: &Path) -> Result<TranslationCache, TranslateError> {
        let mut map = HashMap::new();
        if path.is_file() {
            let reader = BufReader::new(File::open(path)?);
            for (line_no, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: CacheEntry =
                    serde_json::from_str(&line).map_err(|e| TranslateError::CacheFormat {
                        path: path.display().to_string(),
                        line: line_no + 1,
                        message: e.to_string(),
                    })?;
                map.insert((entry.input, entry.src_lang, entry.dst_lang), entry.output);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(TranslationCache {
            map,
            file: Some(file),
        })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn get(&self, text: &str, source: &str, target: &str) -> Option<&String> {
        self.map
            .get(&(text.to_string(), source.to_string(), target.to_string()))
    }

    fn insert(
        &mut self,
        text: &str,
        source: &str,
        target: &str,
        output: &str,
    ) -> Result<(), TranslateError> {
        if let Some(file) = &mut self.file {
            let line = serde_json::to_string(&CacheEntry {
                src_lang: source.to_string(),
                dst_lang: target.to_string(),
                input: text.to_string(),
                output: output.to_string(),
            })
            .expect("cache entries serialize");
            writeln!(file, "{line}")?;
        }
        self.map.insert(
            (text.to_string(), source.to_string(), target.to_string()),
            output.to_string(),
        );
        Ok(())
    }
}

fn cached_translate(
    cache: &mut TranslationCache,
    client: &dyn TranslationClient,
    retry: &RetryPolicy,
    text: &str,
    source: &str,
    target: &str,
) -> Result<String, TranslateError> {
    if text.is_empty() {
        return Ok(String::new());
    }
    if let Some(hit) = cache.get(text, source, target) {
        return Ok(hit.clone());
    }
    let output = translate_with_retry(client, retry, text, source, target)?;
    cache.insert(text, source, target, &output)?;
    Ok(output)
}

/// Backtranslates one record through `lang`: left and right contexts go
/// en → lang → en independently, the target stays byte-identical, offsets
/// are recomputed from the translated left context.
pub fn backtranslate(
    record: &OpinionRecord,
    lang: &str,
    client: &dyn TranslationClient,
    cache: &mut TranslationCache,
    retry: &RetryPolicy,
) -> Result<AugmentedRecord, TranslateError> {
    record
        .validate()
        .map_err(|e| TranslateError::InvalidRecord {
            record_id: record.id.clone(),
            message: e.to_string(),
        })?;
    let chars: Vec<char> = record.text.chars().collect();
    let left: String = chars[..record.target_from].iter().collect();
    let right: String = chars[record.target_to..].iter().collect();

    let pivot_left = cached_translate(cache, client, retry, &left, "en", lang)?;
    let back_left = cached_translate(cache, client, retry, &pivot_left, lang, "en")?;
    let pivot_right = cached_translate(cache, client, retry, &right, "en", lang)?;
    let back_right = cached_translate(cache, client, retry, &pivot_right, lang, "en")?;

    let text = format!("{back_left}{}{back_right}", record.target);
    let target_from = back_left.chars().count();
    let target_to = target_from + record.target.chars().count();
    let mut params = BTreeMap::new();
    params.insert("lang".to_string(), lang.to_string());
    params.insert("backend".to_string(), client.name().to_string());
    if text == record.text {
        params.insert("noop".to_string(), "true".to_string());
    }
    Ok(AugmentedRecord {
        record: OpinionRecord {
            id: format!("{}:bt_{lang}", record.id),
            text,
            target: record.target.clone(),
            target_from,
            target_to,
            category: record.category.clone(),
            polarity: record.polarity,
            sentence_attrs: Vec::new(),
            opinion_attrs: Vec::new(),
        },
        method: Method::Bt(lang.to_string()),
        sources: vec![record.id.clone()],
        params,
    })
}

/// One output per record per pivot language, in record-major order.
/// Unsupported languages are a configuration error; per-record backend
/// failures become skip notes.
pub fn backtranslate_corpus(
    records: &[OpinionRecord],
    langs: &[String],
    client: &dyn TranslationClient,
    cache: &mut TranslationCache,
    retry: &RetryPolicy,
) -> Result<AugmentRun, TranslateError> {
    if let Some(supported) = client.capabilities().supported_languages {
        for lang in langs {
            if !supported.contains(lang) {
                return Err(TranslateError::UnsupportedLanguage {
                    lang: lang.clone(),
                    backend: client.name().to_string(),
                });
            }
        }
    }
    let mut run = AugmentRun::default();
    for record in records {
        for lang in langs {
            match backtranslate(record, lang, client, cache, retry) {
                Ok(augmented) => run.records.push(augmented),
                Err(TranslateError::UnsupportedLanguage { lang, backend }) => {
                    return Err(TranslateError::UnsupportedLanguage { lang, backend })
                }
                Err(error) => run.skips.push(SkipNote {
                    record_id: record.id.clone(),
                    method: Some(Method::Bt(lang.clone()).tag()),
                    reason: error.to_string(),
                }),
            }
        }
    }
    Ok(run)
}

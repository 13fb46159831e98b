//! SemEval-style corpus I/O: parsing annotated review XML into opinion
//! records, dataset statistics, and serialization of augmented output as
//! XML or the three-line triple exchange format.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use thiserror::Error;
use xml::common::Position;
use xml::reader::{EventReader, XmlEvent};
use xml::writer::{EmitterConfig, XmlEvent as WriterEvent};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("xml parse error at line {line}, column {column}: {message}")]
    Xml {
        line: u64,
        column: u64,
        message: String,
    },
    #[error("record {record_id}: {message}")]
    Validation { record_id: String, message: String },
    #[error("write error: {0}")]
    Io(#[from] std::io::Error),
    #[error("xml write error: {0}")]
    XmlWrite(String),
}

/// Sentiment polarity of an opinion. One-hot order is fixed as
/// (positive, neutral, negative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Neutral,
    Negative,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Positive, Polarity::Neutral, Polarity::Negative];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
        }
    }

    pub fn parse(s: &str) -> Option<Polarity> {
        match s {
            "positive" => Some(Polarity::Positive),
            "neutral" => Some(Polarity::Neutral),
            "negative" => Some(Polarity::Negative),
            _ => None,
        }
    }

    /// One-hot encoding over (positive, neutral, negative).
    pub fn one_hot(self) -> [f64; 3] {
        match self {
            Polarity::Positive => [1.0, 0.0, 0.0],
            Polarity::Neutral => [0.0, 1.0, 0.0],
            Polarity::Negative => [0.0, 0.0, 1.0],
        }
    }

    /// Encoding used by the triple text format: 1 / 0 / -1.
    pub fn triple_code(self) -> i8 {
        match self {
            Polarity::Positive => 1,
            Polarity::Neutral => 0,
            Polarity::Negative => -1,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One annotated training instance: a sentence, the aspect expression inside
/// it, and the category/polarity labels. Offsets are half-open character
/// offsets into `text`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionRecord {
    pub id: String,
    pub text: String,
    pub target: String,
    pub target_from: usize,
    pub target_to: usize,
    pub category: String,
    pub polarity: Polarity,
    /// Unrecognized sentence-level attributes, preserved opaquely on write.
    pub sentence_attrs: Vec<(String, String)>,
    /// Unrecognized opinion-level attributes, preserved opaquely on write.
    pub opinion_attrs: Vec<(String, String)>,
}

impl OpinionRecord {
    /// Checks that the target appears exactly at the recorded char offsets.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let chars: Vec<char> = self.text.chars().collect();
        if self.target_from > self.target_to || self.target_to > chars.len() {
            return Err(CorpusError::Validation {
                record_id: self.id.clone(),
                message: format!(
                    "offsets {}..{} out of bounds for text of {} chars",
                    self.target_from,
                    self.target_to,
                    chars.len()
                ),
            });
        }
        let span: String = chars[self.target_from..self.target_to].iter().collect();
        if span != self.target {
            return Err(CorpusError::Validation {
                record_id: self.id.clone(),
                message: format!("text span {:?} does not match target {:?}", span, self.target),
            });
        }
        if !valid_category(&self.category) {
            return Err(CorpusError::Validation {
                record_id: self.id.clone(),
                message: format!("category {:?} does not match ENTITY#ATTRIBUTE", self.category),
            });
        }
        Ok(())
    }
}

fn valid_category(category: &str) -> bool {
    match category.split_once('#') {
        Some((entity, attribute)) => {
            !entity.is_empty()
                && !attribute.is_empty()
                && entity.chars().all(|c| c.is_ascii_uppercase() || c == '_')
                && attribute.chars().all(|c| c.is_ascii_uppercase() || c == '_')
        }
        None => false,
    }
}

/// Augmentation method tag carried in provenance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Synonym replacement (original EDA).
    Sr,
    /// Random insertion (original EDA).
    Ri,
    /// Random swap (original EDA).
    Rs,
    /// Random deletion (original EDA).
    Rd,
    /// Sense-disambiguated synonym replacement (adjusted EDA).
    SrWsd,
    /// Sense-disambiguated random insertion (adjusted EDA).
    RiWsd,
    /// Category-constrained target swap (adjusted EDA).
    Ts,
    /// Backtranslation through the named pivot language.
    Bt(String),
    /// Embedding-space interpolation.
    Mixup,
}

impl Method {
    pub fn tag(&self) -> String {
        match self {
            Method::Sr => "sr".into(),
            Method::Ri => "ri".into(),
            Method::Rs => "rs".into(),
            Method::Rd => "rd".into(),
            Method::SrWsd => "sr_wsd".into(),
            Method::RiWsd => "ri_wsd".into(),
            Method::Ts => "ts".into(),
            Method::Bt(lang) => format!("bt_{lang}"),
            Method::Mixup => "mixup".into(),
        }
    }

    pub fn parse(tag: &str) -> Option<Method> {
        match tag {
            "sr" => Some(Method::Sr),
            "ri" => Some(Method::Ri),
            "rs" => Some(Method::Rs),
            "rd" => Some(Method::Rd),
            "sr_wsd" => Some(Method::SrWsd),
            "ri_wsd" => Some(Method::RiWsd),
            "ts" => Some(Method::Ts),
            "mixup" => Some(Method::Mixup),
            other => other.strip_prefix("bt_").map(|l| Method::Bt(l.to_string())),
        }
    }

    /// Methods that combine two source records.
    pub fn is_pairwise(&self) -> bool {
        matches!(self, Method::Ts | Method::Mixup)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// An augmented record plus its provenance: how it was produced, from which
/// source record ids, and with which parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedRecord {
    pub record: OpinionRecord,
    pub method: Method,
    pub sources: Vec<String>,
    pub params: BTreeMap<String, String>,
}

impl AugmentedRecord {
    pub fn validate(&self) -> Result<(), CorpusError> {
        self.record.validate()?;
        let want_two = self.method.is_pairwise();
        if self.sources.is_empty() || (want_two != (self.sources.len() == 2)) {
            return Err(CorpusError::Validation {
                record_id: self.record.id.clone(),
                message: format!(
                    "method {} expects {} source(s), got {}",
                    self.method,
                    if want_two { "exactly 2" } else { "1+" },
                    self.sources.len()
                ),
            });
        }
        Ok(())
    }

    pub fn is_noop(&self) -> bool {
        self.params.get("noop").map(String::as_str) == Some("true")
    }
}

/// A record that could not be augmented, with the reason. Collected into the
/// run report instead of aborting the batch.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SkipNote {
    pub record_id: String,
    pub method: Option<String>,
    pub reason: String,
}

/// Output of one augmentation family over a corpus.
#[derive(Debug, Default)]
pub struct AugmentRun {
    pub records: Vec<AugmentedRecord>,
    pub skips: Vec<SkipNote>,
}

/// A record destined for an output file: either an original passed through
/// or an augmentation carrying provenance.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputRecord {
    Original(OpinionRecord),
    Augmented(AugmentedRecord),
}

impl OutputRecord {
    pub fn record(&self) -> &OpinionRecord {
        match self {
            OutputRecord::Original(r) => r,
            OutputRecord::Augmented(a) => &a.record,
        }
    }

    pub fn provenance(&self) -> Option<&AugmentedRecord> {
        match self {
            OutputRecord::Original(_) => None,
            OutputRecord::Augmented(a) => Some(a),
        }
    }
}

/// Polarity and category frequency counts with integer percentages.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StatsReport {
    pub total: usize,
    pub polarity_counts: BTreeMap<String, usize>,
    pub polarity_percent: BTreeMap<String, u32>,
    pub category_counts: BTreeMap<String, usize>,
}

/// Counts polarities and categories. Percentages are rounded half up; an
/// empty input yields all-zero counts.
pub fn dataset_stats(records: &[OpinionRecord]) -> StatsReport {
    let mut polarity_counts: BTreeMap<String, usize> = Polarity::ALL
        .iter()
        .map(|p| (p.as_str().to_string(), 0))
        .collect();
    let mut category_counts = BTreeMap::new();
    for record in records {
        *polarity_counts
            .entry(record.polarity.as_str().to_string())
            .or_insert(0) += 1;
        *category_counts.entry(record.category.clone()).or_insert(0) += 1;
    }
    let total = records.len();
    let polarity_percent = polarity_counts
        .iter()
        .map(|(name, &count)| {
            let pct = (count * 100 + total / 2).checked_div(total).unwrap_or(0) as u32;
            (name.clone(), pct)
        })
        .collect();
    StatsReport {
        total,
        polarity_counts,
        polarity_percent,
        category_counts,
    }
}

const SENTENCE_KNOWN_ATTRS: [&str; 3] = ["id", "augmentation", "sources"];
const OPINION_KNOWN_ATTRS: [&str; 5] = ["target", "category", "polarity", "from", "to"];

#[derive(Default)]
struct PendingOpinion {
    target: Option<String>,
    category: Option<String>,
    polarity: Option<String>,
    from: Option<String>,
    to: Option<String>,
    extra: Vec<(String, String)>,
}

/// Parses SemEval 2015/2016-shaped review XML into one record per opinion
/// annotation, in document order. A sentence with several opinions fans out
/// into that many records sharing the sentence text. Opinions with the
/// `NULL` implicit target carry no usable span and are skipped.
pub fn parse_semeval_xml<R: Read>(reader: R) -> Result<Vec<OpinionRecord>, CorpusError> {
    let mut parser = EventReader::new(reader);
    let mut records = Vec::new();

    let mut in_sentence = false;
    let mut in_text = false;
    let mut sentence_no = 0usize;
    let mut sentence_id = String::new();
    let mut sentence_attrs: Vec<(String, String)> = Vec::new();
    let mut text = String::new();
    let mut opinions: Vec<PendingOpinion> = Vec::new();

    loop {
        let event = parser.next().map_err(|e| {
            let pos = e.position();
            CorpusError::Xml {
                line: pos.row + 1,
                column: pos.column + 1,
                message: e.msg().to_string(),
            }
        })?;
        match event {
            XmlEvent::StartElement { name, attributes, .. } => match name.local_name.as_str() {
                "sentence" => {
                    in_sentence = true;
                    sentence_no += 1;
                    sentence_id = format!("s{sentence_no}");
                    sentence_attrs.clear();
                    text.clear();
                    opinions.clear();
                    for attr in attributes {
                        let key = attr.name.local_name;
                        if key == "id" {
                            sentence_id = attr.value;
                        } else if !SENTENCE_KNOWN_ATTRS.contains(&key.as_str()) {
                            sentence_attrs.push((key, attr.value));
                        }
                    }
                }
                "text" if in_sentence => {
                    in_text = true;
                    text.clear();
                }
                "Opinion" if in_sentence => {
                    let mut pending = PendingOpinion::default();
                    for attr in attributes {
                        let key = attr.name.local_name;
                        match key.as_str() {
                            "target" => pending.target = Some(attr.value),
                            "category" => pending.category = Some(attr.value),
                            "polarity" => pending.polarity = Some(attr.value),
                            "from" => pending.from = Some(attr.value),
                            "to" => pending.to = Some(attr.value),
                            _ if !OPINION_KNOWN_ATTRS.contains(&key.as_str()) => {
                                pending.extra.push((key, attr.value));
                            }
                            _ => {}
                        }
                    }
                    opinions.push(pending);
                }
                _ => {}
            },
            XmlEvent::Characters(chunk) | XmlEvent::CData(chunk) => {
                if in_text {
                    text.push_str(&chunk);
                }
            }
            XmlEvent::EndElement { name } => match name.local_name.as_str() {
                "text" => in_text = false,
                "sentence" => {
                    in_sentence = false;
                    finalize_sentence(
                        &sentence_id,
                        &sentence_attrs,
                        &text,
                        std::mem::take(&mut opinions),
                        &mut records,
                    )?;
                }
                _ => {}
            },
            XmlEvent::EndDocument => break,
            _ => {}
        }
    }
    Ok(records)
}

fn finalize_sentence(
    sentence_id: &str,
    sentence_attrs: &[(String, String)],
    text: &str,
    opinions: Vec<PendingOpinion>,
    records: &mut Vec<OpinionRecord>,
) -> Result<(), CorpusError> {
    let kept: Vec<PendingOpinion> = opinions
        .into_iter()
        .filter(|o| o.target.as_deref() != Some("NULL"))
        .collect();
    let many = kept.len() > 1;
    for (ordinal, opinion) in kept.into_iter().enumerate() {
        let record_id = if many {
            format!("{sentence_id}:{ordinal}")
        } else {
            sentence_id.to_string()
        };
        let require = |field: Option<String>, what: &str| {
            field.ok_or_else(|| CorpusError::Validation {
                record_id: record_id.clone(),
                message: format!("opinion missing {what} attribute"),
            })
        };
        let target = require(opinion.target, "target")?;
        let category = require(opinion.category, "category")?;
        let polarity_raw = require(opinion.polarity, "polarity")?;
        let from_raw = require(opinion.from, "from")?;
        let to_raw = require(opinion.to, "to")?;
        let polarity = Polarity::parse(&polarity_raw).ok_or_else(|| CorpusError::Validation {
            record_id: record_id.clone(),
            message: format!("unknown polarity {polarity_raw:?}"),
        })?;
        let parse_offset = |raw: &str, what: &str| {
            raw.parse::<usize>().map_err(|_| CorpusError::Validation {
                record_id: record_id.clone(),
                message: format!("{what} offset {raw:?} is not a number"),
            })
        };
        let record = OpinionRecord {
            id: record_id.clone(),
            text: text.to_string(),
            target,
            target_from: parse_offset(&from_raw, "from")?,
            target_to: parse_offset(&to_raw, "to")?,
            category,
            polarity,
            sentence_attrs: sentence_attrs.to_vec(),
            opinion_attrs: opinion.extra,
        };
        record.validate()?;
        records.push(record);
    }
    Ok(())
}

/// Writes records as SemEval-shaped XML. Augmented records additionally
/// carry `augmentation` and `sources` attributes on their sentence element.
/// Output from unaugmented input re-parses to semantically identical records.
pub fn write_xml<W: Write>(entries: &[OutputRecord], sink: W) -> Result<(), CorpusError> {
    let mut writer = EmitterConfig::new()
        .perform_indent(true)
        .create_writer(sink);
    let emit = |e: Result<(), xml::writer::Error>| {
        e.map_err(|err| CorpusError::XmlWrite(err.to_string()))
    };
    emit(writer.write(WriterEvent::start_element("sentences")))?;
    for entry in entries {
        let record = entry.record();
        record.validate()?;
        let mut sentence = WriterEvent::start_element("sentence").attr("id", &record.id);
        for (key, value) in &record.sentence_attrs {
            sentence = sentence.attr(key.as_str(), value);
        }
        let tag;
        let sources;
        if let Some(augmented) = entry.provenance() {
            augmented.validate()?;
            tag = augmented.method.tag();
            sources = augmented.sources.join(" ");
            sentence = sentence.attr("augmentation", &tag).attr("sources", &sources);
        }
        emit(writer.write(sentence))?;
        emit(writer.write(WriterEvent::start_element("text")))?;
        emit(writer.write(WriterEvent::characters(&record.text)))?;
        emit(writer.write(WriterEvent::end_element()))?;
        emit(writer.write(WriterEvent::start_element("Opinions")))?;
        let from = record.target_from.to_string();
        let to = record.target_to.to_string();
        let mut opinion = WriterEvent::start_element("Opinion")
            .attr("target", &record.target)
            .attr("category", &record.category)
            .attr("polarity", record.polarity.as_str())
            .attr("from", &from)
            .attr("to", &to);
        for (key, value) in &record.opinion_attrs {
            opinion = opinion.attr(key.as_str(), value);
        }
        emit(writer.write(opinion))?;
        emit(writer.write(WriterEvent::end_element()))?; // Opinion
        emit(writer.write(WriterEvent::end_element()))?; // Opinions
        emit(writer.write(WriterEvent::end_element()))?; // sentence
    }
    emit(writer.write(WriterEvent::end_element()))?;
    Ok(())
}

/// Writes the three-line exchange format: sentence with the target replaced
/// by `$T$`, the target, and the polarity as 1/0/-1. UTF-8, LF endings.
pub fn write_triple_format<W: Write>(entries: &[OutputRecord], mut sink: W) -> Result<(), CorpusError> {
    for entry in entries {
        let record = entry.record();
        record.validate()?;
        let chars: Vec<char> = record.text.chars().collect();
        let mut line = String::new();
        line.extend(&chars[..record.target_from]);
        line.push_str("$T$");
        line.extend(&chars[record.target_to..]);
        writeln!(sink, "{line}")?;
        writeln!(sink, "{}", record.target)?;
        writeln!(sink, "{}", record.polarity.triple_code())?;
    }
    Ok(())
}

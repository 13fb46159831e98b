//! Embedding-space mixup over the left/target/right split.
//!
//! Each part is embedded column-wise, zero-padded on the right to the corpus
//! maximum length for that part, and interpolated pairwise with a
//! Beta(α, α)-distributed weight λ; the one-hot polarity vectors are
//! interpolated with the same λ. Output is a binary columnar file (or a
//! λ/label TSV for auditing).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use thiserror::Error;

use crate::corpus::OpinionRecord;
use crate::seed::labeled_stream;
use crate::text::mask_target;

const BINARY_MAGIC: &[u8; 8] = b"ABSAMIXB";
const BINARY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MixupError {
    #[error("{file}:{line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        file: String,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("embedding table is empty")]
    EmptyTable,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("mixup needs at least 2 records, got {0}")]
    TooFewRecords(usize),
    #[error("record {record_id}: {message}")]
    InvalidRecord { record_id: String, message: String },
    #[error("shape mismatch between interpolation inputs: {0}")]
    ShapeMismatch(String),
    #[error("mixup file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What an out-of-vocabulary word embeds to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OovPolicy {
    /// The zero vector.
    Zero,
    /// A per-word deterministic vector with components uniform in
    /// [-0.25, 0.25], derived from the given seed and the word.
    Random { seed: u64 },
}

/// Word → d-dimensional vector table loaded from a GloVe-style text file.
#[derive(Debug)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    oov: OovPolicy,
}

impl EmbeddingTable {
    pub fn load(path: &Path, dim: usize, oov: OovPolicy) -> Result<EmbeddingTable, MixupError> {
        let file = File::open(path)?;
        EmbeddingTable::from_reader(BufReader::new(file), dim, oov, &path.display().to_string())
    }

    /// Parses one `word c1 c2 ... cd` line per row.
    pub fn from_reader<R: BufRead>(
        reader: R,
        dim: usize,
        oov: OovPolicy,
        source: &str,
    ) -> Result<EmbeddingTable, MixupError> {
        let mut vectors = HashMap::new();
        for (line_no, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields
                .next()
                .ok_or_else(|| MixupError::Parse {
                    file: source.to_string(),
                    line: line_no + 1,
                    message: "missing word".to_string(),
                })?
                .to_lowercase();
            let components = fields
                .map(|raw| {
                    raw.parse::<f64>().map_err(|_| MixupError::Parse {
                        file: source.to_string(),
                        line: line_no + 1,
                        message: format!("bad float {raw:?}"),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if components.len() != dim {
                return Err(MixupError::DimensionMismatch {
                    file: source.to_string(),
                    line: line_no + 1,
                    expected: dim,
                    found: components.len(),
                });
            }
            vectors.insert(word, components);
        }
        if vectors.is_empty() {
            return Err(MixupError::EmptyTable);
        }
        Ok(EmbeddingTable { dim, vectors, oov })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Case-insensitive lookup; misses follow the OOV policy.
    pub fn lookup(&self, word: &str) -> Vec<f64> {
        let key = word.to_lowercase();
        if let Some(hit) = self.vectors.get(&key) {
            return hit.clone();
        }
        match self.oov {
            OovPolicy::Zero => vec![0.0; self.dim],
            OovPolicy::Random { seed } => {
                let mut rng = labeled_stream(seed, &format!("oov:{key}"));
                (0..self.dim).map(|_| rng.random_range(-0.25..0.25)).collect()
            }
        }
    }
}

/// A record embedded as three d×Q matrices, zero-padded on the right beyond
/// each part's true token length.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedTriple {
    pub record_id: String,
    pub label: [f64; 3],
    pub left: Array2<f64>,
    pub target: Array2<f64>,
    pub right: Array2<f64>,
    pub left_len: usize,
    pub target_len: usize,
    pub right_len: usize,
}

#[derive(Debug)]
pub struct PaddedCorpus {
    pub triples: Vec<EmbeddedTriple>,
    pub q_left: usize,
    pub q_target: usize,
    pub q_right: usize,
    pub dim: usize,
}

fn embed_part(tokens: &[String], table: &EmbeddingTable, width: usize) -> Array2<f64> {
    let mut matrix = Array2::zeros((table.dim(), width));
    for (column, token) in tokens.iter().enumerate() {
        let vector = table.lookup(token);
        for (row, value) in vector.iter().enumerate() {
            matrix[(row, column)] = *value;
        }
    }
    matrix
}

/// Embeds every record and pads each part to the corpus-wide maximum length
/// of that part.
pub fn embed_and_pad(
    records: &[OpinionRecord],
    table: &EmbeddingTable,
) -> Result<PaddedCorpus, MixupError> {
    if records.is_empty() {
        return Err(MixupError::EmptyCorpus);
    }
    let mut split = Vec::with_capacity(records.len());
    for record in records {
        let ms = mask_target(record).map_err(|e| MixupError::InvalidRecord {
            record_id: record.id.clone(),
            message: e.to_string(),
        })?;
        split.push((record, ms.context_triple()));
    }
    let q_left = split.iter().map(|(_, t)| t.left.len()).max().unwrap_or(0);
    let q_target = split.iter().map(|(_, t)| t.target.len()).max().unwrap_or(0);
    let q_right = split.iter().map(|(_, t)| t.right.len()).max().unwrap_or(0);
    let triples = split
        .into_iter()
        .map(|(record, triple)| EmbeddedTriple {
            record_id: record.id.clone(),
            label: record.polarity.one_hot(),
            left: embed_part(&triple.left, table, q_left),
            target: embed_part(&triple.target, table, q_target),
            right: embed_part(&triple.right, table, q_right),
            left_len: triple.left.len(),
            target_len: triple.target.len(),
            right_len: triple.right.len(),
        })
        .collect();
    Ok(PaddedCorpus {
        triples,
        q_left,
        q_target,
        q_right,
        dim: table.dim(),
    })
}

/// One draw from Beta(α, α) via the two-Gamma ratio
/// X/(X+Y), X,Y ~ Gamma(α, 1). Redraws until the value is strictly inside
/// (0, 1).
pub fn sample_lambda<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha > 0");
    loop {
        let x: f64 = gamma.sample(rng);
        let y: f64 = gamma.sample(rng);
        if x + y == 0.0 {
            continue;
        }
        let lambda = x / (x + y);
        if lambda > 0.0 && lambda < 1.0 {
            return lambda;
        }
    }
}

/// An interpolated pair: three matrices, a soft label on the polarity
/// simplex, the λ used, and the two source record ids.
#[derive(Debug, Clone, PartialEq)]
pub struct MixupRecord {
    pub left: Array2<f64>,
    pub target: Array2<f64>,
    pub right: Array2<f64>,
    pub label: [f64; 3],
    pub lambda: f64,
    pub sources: [String; 2],
}

/// Elementwise λ·a + (1−λ)·b over all three parts and the labels. Inputs
/// must already be padded to identical shapes.
pub fn mixup_pair(
    a: &EmbeddedTriple,
    b: &EmbeddedTriple,
    lambda: f64,
) -> Result<MixupRecord, MixupError> {
    for (name, left, right) in [
        ("left", a.left.dim(), b.left.dim()),
        ("target", a.target.dim(), b.target.dim()),
        ("right", a.right.dim(), b.right.dim()),
    ] {
        if left != right {
            return Err(MixupError::ShapeMismatch(format!(
                "{name}: {left:?} vs {right:?}"
            )));
        }
    }
    let blend = |x: &Array2<f64>, y: &Array2<f64>| x * lambda + y * (1.0 - lambda);
    let mut label = [0.0; 3];
    for (out, (x, y)) in label.iter_mut().zip(a.label.iter().zip(b.label.iter())) {
        *out = lambda * x + (1.0 - lambda) * y;
    }
    Ok(MixupRecord {
        left: blend(&a.left, &b.left),
        target: blend(&a.target, &b.target),
        right: blend(&a.right, &b.right),
        label,
        lambda,
        sources: [a.record_id.clone(), b.record_id.clone()],
    })
}

#[derive(Debug, Clone)]
pub struct MixupConfig {
    /// Shape of the symmetric Beta(α, α); the useful range is α ∈ [0.1, 0.4].
    pub alpha: f64,
    pub seed: u64,
}

impl Default for MixupConfig {
    fn default() -> Self {
        MixupConfig {
            alpha: 0.2,
            seed: crate::seed::DEFAULT_SEED,
        }
    }
}

#[derive(Debug)]
pub struct MixupRun {
    pub records: Vec<MixupRecord>,
    pub q_left: usize,
    pub q_target: usize,
    pub q_right: usize,
    pub dim: usize,
}

/// Shuffles the corpus with a seeded generator and interpolates each record
/// with its shuffled successor, cyclically: exactly one output per input
/// record.
pub fn mixup_augment(
    records: &[OpinionRecord],
    table: &EmbeddingTable,
    config: &MixupConfig,
) -> Result<MixupRun, MixupError> {
    if records.len() < 2 {
        return Err(MixupError::TooFewRecords(records.len()));
    }
    let padded = embed_and_pad(records, table)?;
    let mut rng = labeled_stream(config.seed, "mixup");
    let mut order: Vec<usize> = (0..padded.triples.len()).collect();
    order.shuffle(&mut rng);
    let mut out = Vec::with_capacity(order.len());
    for k in 0..order.len() {
        let a = &padded.triples[order[k]];
        let b = &padded.triples[order[(k + 1) % order.len()]];
        let lambda = sample_lambda(config.alpha, &mut rng);
        out.push(mixup_pair(a, b, lambda)?);
    }
    Ok(MixupRun {
        records: out,
        q_left: padded.q_left,
        q_target: padded.q_target,
        q_right: padded.q_right,
        dim: padded.dim,
    })
}

fn write_matrix<W: Write>(sink: &mut W, matrix: &Array2<f64>) -> std::io::Result<()> {
    for value in matrix.iter() {
        sink.write_all(&value.to_le_bytes())?;
    }
    Ok(())
}

/// Binary layout: magic, version, then u32 Q_l/Q_c/Q_r/d and u64 N, then per
/// record λ (f64), two length-prefixed source ids, the 3-component label,
/// and the three d×Q matrices row-major — all little-endian IEEE-754.
pub fn write_mixup_binary<W: Write>(run: &MixupRun, mut sink: W) -> Result<(), MixupError> {
    sink.write_all(BINARY_MAGIC)?;
    sink.write_all(&BINARY_VERSION.to_le_bytes())?;
    for q in [run.q_left, run.q_target, run.q_right, run.dim] {
        sink.write_all(&(q as u32).to_le_bytes())?;
    }
    sink.write_all(&(run.records.len() as u64).to_le_bytes())?;
    for record in &run.records {
        sink.write_all(&record.lambda.to_le_bytes())?;
        for source in &record.sources {
            sink.write_all(&(source.len() as u32).to_le_bytes())?;
            sink.write_all(source.as_bytes())?;
        }
        for component in record.label {
            sink.write_all(&component.to_le_bytes())?;
        }
        write_matrix(&mut sink, &record.left)?;
        write_matrix(&mut sink, &record.target)?;
        write_matrix(&mut sink, &record.right)?;
    }
    Ok(())
}

/// Human-auditable view: one row of λ, source ids, and label per record.
pub fn write_lambda_tsv<W: Write>(run: &MixupRun, mut sink: W) -> Result<(), MixupError> {
    writeln!(
        sink,
        "lambda\tsource_a\tsource_b\ty_positive\ty_neutral\ty_negative"
    )?;
    for record in &run.records {
        writeln!(
            sink,
            "{}\t{}\t{}\t{}\t{}\t{}",
            record.lambda,
            record.sources[0],
            record.sources[1],
            record.label[0],
            record.label[1],
            record.label[2]
        )?;
    }
    Ok(())
}

fn read_exact_vec<R: Read>(reader: &mut R, len: usize) -> Result<Vec<u8>, MixupError> {
    let mut buffer = vec![0u8; len];
    reader.read_exact(&mut buffer)?;
    Ok(buffer)
}

fn read_u32<R: Read>(reader: &mut R) -> Result<u32, MixupError> {
    let bytes = read_exact_vec(reader, 4)?;
    Ok(u32::from_le_bytes(bytes.try_into().expect("sized")))
}

fn read_f64<R: Read>(reader: &mut R) -> Result<f64, MixupError> {
    let bytes = read_exact_vec(reader, 8)?;
    Ok(f64::from_le_bytes(bytes.try_into().expect("sized")))
}

fn read_matrix<R: Read>(reader: &mut R, dim: usize, width: usize) -> Result<Array2<f64>, MixupError> {
    let mut matrix = Array2::zeros((dim, width));
    for row in 0..dim {
        for column in 0..width {
            matrix[(row, column)] = read_f64(reader)?;
        }
    }
    Ok(matrix)
}

/// Reads the binary format back; the inverse of [`write_mixup_binary`].
pub fn read_mixup_binary<R: Read>(mut reader: R) -> Result<MixupRun, MixupError> {
    let magic = read_exact_vec(&mut reader, 8)?;
    if magic != BINARY_MAGIC {
        return Err(MixupError::Format("bad magic".to_string()));
    }
    let version = read_u32(&mut reader)?;
    if version != BINARY_VERSION {
        return Err(MixupError::Format(format!("unsupported version {version}")));
    }
    let q_left = read_u32(&mut reader)? as usize;
    let q_target = read_u32(&mut reader)? as usize;
    let q_right = read_u32(&mut reader)? as usize;
    let dim = read_u32(&mut reader)? as usize;
    let count = {
        let bytes = read_exact_vec(&mut reader, 8)?;
        u64::from_le_bytes(bytes.try_into().expect("sized")) as usize
    };
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let lambda = read_f64(&mut reader)?;
        let mut sources = [String::new(), String::new()];
        for source in &mut sources {
            let len = read_u32(&mut reader)? as usize;
            let bytes = read_exact_vec(&mut reader, len)?;
            *source = String::from_utf8(bytes)
                .map_err(|e| MixupError::Format(format!("source id not utf-8: {e}")))?;
        }
        let mut label = [0.0; 3];
        for component in &mut label {
            *component = read_f64(&mut reader)?;
        }
        records.push(MixupRecord {
            lambda,
            sources,
            label,
            left: read_matrix(&mut reader, dim, q_left)?,
            target: read_matrix(&mut reader, dim, q_target)?,
            right: read_matrix(&mut reader, dim, q_right)?,
        });
    }
    Ok(MixupRun {
        records,
        q_left,
        q_target,
        q_right,
        dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Polarity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_table() -> EmbeddingTable {
        let text = "\
the 0.1 0.2 0.3 0.4
food 0.5 0.6 0.7 0.8
was 0.9 1.0 1.1 1.2
good -0.1 -0.2 -0.3 -0.4
slow 0.25 0.5 0.75 1.0
service 1.0 0.0 -1.0 0.5
";
        EmbeddingTable::from_reader(text.as_bytes(), 4, OovPolicy::Zero, "toy").unwrap()
    }

    fn record(id: &str, text: &str, target: &str, polarity: Polarity) -> OpinionRecord {
        let from = text.find(target).map(|b| text[..b].chars().count()).unwrap();
        OpinionRecord {
            id: id.into(),
            text: text.into(),
            target: target.into(),
            target_from: from,
            target_to: from + target.chars().count(),
            category: "FOOD#QUALITY".into(),
            polarity,
            sentence_attrs: vec![],
            opinion_attrs: vec![],
        }
    }

    #[test]
    fn loads_toy_table() {
        let table = toy_table();
        assert_eq!(table.dim(), 4);
        assert_eq!(table.len(), 6);
        assert_eq!(table.lookup("FOOD"), vec![0.5, 0.6, 0.7, 0.8]);
    }

    #[test]
    fn dimension_mismatch_names_line() {
        let text = "the 0.1 0.2 0.3 0.4\nfood 0.5 0.6 0.7\n";
        let err = EmbeddingTable::from_reader(text.as_bytes(), 4, OovPolicy::Zero, "toy").unwrap_err();
        match err {
            MixupError::DimensionMismatch { line, found, .. } => {
                assert_eq!(line, 2);
                assert_eq!(found, 3);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn oov_zero_policy() {
        let table = toy_table();
        assert_eq!(table.lookup("zzz"), vec![0.0; 4]);
    }

    #[test]
    fn oov_random_policy_is_deterministic_per_word() {
        let text = "the 0.1 0.2 0.3 0.4\n";
        let table =
            EmbeddingTable::from_reader(text.as_bytes(), 4, OovPolicy::Random { seed: 5 }, "toy")
                .unwrap();
        let a = table.lookup("mystery");
        let b = table.lookup("mystery");
        assert_eq!(a, b);
        assert_ne!(a, table.lookup("other"));
        assert!(a.iter().all(|v| (-0.25..0.25).contains(v)));
    }

    #[test]
    fn embed_and_pad_uses_corpus_maxima() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the slow service was not good at all", "service", Polarity::Negative),
        ];
        let padded = embed_and_pad(&records, &table).unwrap();
        assert_eq!(padded.q_left, 2); // "the slow"
        assert_eq!(padded.q_target, 1);
        assert_eq!(padded.q_right, 5); // "was not good at all"
        for triple in &padded.triples {
            assert_eq!(triple.left.dim(), (4, 2));
            assert_eq!(triple.right.dim(), (4, 5));
            // Columns beyond the true length are exactly zero.
            for column in triple.left_len..padded.q_left {
                for row in 0..4 {
                    assert_eq!(triple.left[(row, column)], 0.0);
                }
            }
        }
        let lens: Vec<usize> = padded
            .triples
            .iter()
            .map(|t| t.left_len + t.target_len + t.right_len)
            .collect();
        assert_eq!(lens, vec![4, 8]);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let table = toy_table();
        assert!(matches!(
            embed_and_pad(&[], &table),
            Err(MixupError::EmptyCorpus)
        ));
    }

    #[test]
    fn lambda_draws_stay_inside_open_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let lambda = sample_lambda(0.2, &mut rng);
            assert!(lambda > 0.0 && lambda < 1.0);
        }
    }

    #[test]
    fn mixup_pair_boundary_identities() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the service was slow", "service", Polarity::Negative),
        ];
        let padded = embed_and_pad(&records, &table).unwrap();
        let one = mixup_pair(&padded.triples[0], &padded.triples[1], 1.0).unwrap();
        assert_eq!(one.left, padded.triples[0].left);
        assert_eq!(one.label, padded.triples[0].label);
        let zero = mixup_pair(&padded.triples[0], &padded.triples[1], 0.0).unwrap();
        assert_eq!(zero.right, padded.triples[1].right);
        assert_eq!(zero.label, padded.triples[1].label);
    }

    #[test]
    fn mixup_pair_label_midpoint() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the service was slow", "service", Polarity::Neutral),
        ];
        let padded = embed_and_pad(&records, &table).unwrap();
        let mixed = mixup_pair(&padded.triples[0], &padded.triples[1], 0.5).unwrap();
        assert_eq!(mixed.label, [0.5, 0.5, 0.0]);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let table = toy_table();
        let a = embed_and_pad(
            &[record("a", "the food was good", "food", Polarity::Positive)],
            &table,
        )
        .unwrap();
        let b = embed_and_pad(
            &[record("b", "the slow service was not good", "service", Polarity::Negative)],
            &table,
        )
        .unwrap();
        assert!(matches!(
            mixup_pair(&a.triples[0], &b.triples[0], 0.5),
            Err(MixupError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn augment_emits_one_record_per_input() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the service was slow", "service", Polarity::Negative),
            record("c", "the food was slow", "food", Polarity::Neutral),
        ];
        let run = mixup_augment(&records, &table, &MixupConfig::default()).unwrap();
        assert_eq!(run.records.len(), records.len());
        for mixed in &run.records {
            assert!(mixed.lambda > 0.0 && mixed.lambda < 1.0);
            let sum: f64 = mixed.label.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_records_pair_cyclically() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the service was slow", "service", Polarity::Negative),
        ];
        let run = mixup_augment(&records, &table, &MixupConfig::default()).unwrap();
        assert_eq!(run.records.len(), 2);
        let pairs: Vec<[&str; 2]> = run
            .records
            .iter()
            .map(|m| [m.sources[0].as_str(), m.sources[1].as_str()])
            .collect();
        assert!(pairs.contains(&["a", "b"]));
        assert!(pairs.contains(&["b", "a"]));
    }

    #[test]
    fn single_record_corpus_is_an_error() {
        let table = toy_table();
        let records = vec![record("a", "the food was good", "food", Polarity::Positive)];
        assert!(matches!(
            mixup_augment(&records, &table, &MixupConfig::default()),
            Err(MixupError::TooFewRecords(1))
        ));
    }

    #[test]
    fn seeded_run_repeats_exactly() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the service was slow", "service", Polarity::Negative),
            record("c", "the food was slow", "food", Polarity::Neutral),
        ];
        let run_a = mixup_augment(&records, &table, &MixupConfig::default()).unwrap();
        let run_b = mixup_augment(&records, &table, &MixupConfig::default()).unwrap();
        assert_eq!(run_a.records, run_b.records);
    }

    #[test]
    fn binary_round_trip() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the service was slow", "service", Polarity::Negative),
        ];
        let run = mixup_augment(&records, &table, &MixupConfig::default()).unwrap();
        let mut buffer = Vec::new();
        write_mixup_binary(&run, &mut buffer).unwrap();
        let loaded = read_mixup_binary(buffer.as_slice()).unwrap();
        assert_eq!(loaded.records, run.records);
        assert_eq!(
            (loaded.q_left, loaded.q_target, loaded.q_right, loaded.dim),
            (run.q_left, run.q_target, run.q_right, run.dim)
        );
    }

    #[test]
    fn tsv_mode_lists_lambda_and_labels() {
        let table = toy_table();
        let records = vec![
            record("a", "the food was good", "food", Polarity::Positive),
            record("b", "the service was slow", "service", Polarity::Negative),
        ];
        let run = mixup_augment(&records, &table, &MixupConfig::default()).unwrap();
        let mut buffer = Vec::new();
        write_lambda_tsv(&run, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert!(text.starts_with("lambda\t"));
        assert_eq!(text.lines().count(), 1 + run.records.len());
    }
}

//! Batch orchestration: reads a corpus, runs one augmentation family with
//! ratio control and derived per-pass seeds, writes the output artifact, and
//! produces a machine-readable run report.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::adjusted::{adjusted_eda_augment, AdjustedConfig};
use crate::backtranslate::{
    backtranslate_corpus, HttpClient, RetryPolicy, StubClient, StubMode, TranslationCache,
    TranslationClient,
};
use crate::corpus::{
    dataset_stats, parse_semeval_xml, write_triple_format, write_xml, AugmentRun, OpinionRecord,
    OutputRecord, SkipNote,
};
use crate::eda::{eda_augment, EdaConfig};
use crate::mixup::{
    mixup_augment, write_lambda_tsv, write_mixup_binary, EmbeddingTable, MixupConfig, OovPolicy,
};
use crate::seed::derived_seed;
use crate::tagger::{self, PerceptronModel};
use crate::wordnet::WordNetDb;

pub const WORDNET_ENV: &str = "ABSA_WORDNET_DIR";
pub const TRANSLATE_ENDPOINT_ENV: &str = "ABSA_TRANSLATE_ENDPOINT";
pub const TRANSLATE_KEY_ENV: &str = "ABSA_TRANSLATE_KEY";

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Bad flag combinations or option values. Exit code 1.
    #[error("configuration: {0}")]
    Config(String),
    /// Missing or unloadable external resources and I/O trouble. Exit code 2.
    #[error("resource: {0}")]
    Resource(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Resource(_) => 2,
        }
    }
}

fn resource<E: std::fmt::Display>(error: E) -> PipelineError {
    PipelineError::Resource(error.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Xml,
    Triple,
    MixupBin,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<OutputFormat> {
        match s {
            "xml" => Some(OutputFormat::Xml),
            "triple" => Some(OutputFormat::Triple),
            "mixup-bin" => Some(OutputFormat::MixupBin),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Xml => "xml",
            OutputFormat::Triple => "triple",
            OutputFormat::MixupBin => "mixup-bin",
        }
    }
}

/// Originals-to-augmentations mix of the emitted dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ratio {
    OneToOne,
    ThreeToOne,
    OneToThree,
}

impl Ratio {
    pub fn parse(s: &str) -> Option<Ratio> {
        match s {
            "1:1" => Some(Ratio::OneToOne),
            "3:1" => Some(Ratio::ThreeToOne),
            "1:3" => Some(Ratio::OneToThree),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Ratio::OneToOne => "1:1",
            Ratio::ThreeToOne => "3:1",
            Ratio::OneToThree => "1:3",
        }
    }

    /// (original replication count, augmentation pass count). The 1:3 mode
    /// reruns each stochastic method with per-pass derived seeds.
    pub fn passes(&self) -> (usize, usize) {
        match self {
            Ratio::OneToOne => (1, 1),
            Ratio::ThreeToOne => (3, 1),
            Ratio::OneToThree => (1, 3),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingSpec {
    pub path: PathBuf,
    pub dims: usize,
    pub oov: OovPolicy,
}

#[derive(Debug, Clone)]
pub enum BackendChoice {
    Stub(StubMode),
    Http,
}

/// External resource locations. Unset fields fall back to environment
/// variables where one is defined.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub wordnet_dir: Option<PathBuf>,
    pub pos_model: Option<PathBuf>,
    pub embeddings: Option<EmbeddingSpec>,
    pub backend: Option<BackendChoice>,
}

impl Resources {
    pub fn wordnet_dir(&self) -> Option<PathBuf> {
        self.wordnet_dir
            .clone()
            .or_else(|| std::env::var(WORDNET_ENV).ok().map(PathBuf::from))
    }

    fn load_wordnet(&self) -> Result<WordNetDb, PipelineError> {
        let dir = self.wordnet_dir().ok_or_else(|| {
            PipelineError::Resource(format!(
                "WordNet directory not configured (--wordnet or {WORDNET_ENV})"
            ))
        })?;
        WordNetDb::load(&dir).map_err(resource)
    }

    fn load_tagger(&self) -> Result<PerceptronModel, PipelineError> {
        match &self.pos_model {
            Some(path) => tagger::load_model(path).map_err(resource),
            None => Ok(tagger::pretrained().clone()),
        }
    }

    fn load_embeddings(&self) -> Result<EmbeddingTable, PipelineError> {
        let spec = self.embeddings.as_ref().ok_or_else(|| {
            PipelineError::Config("mixup requires --embeddings and --dims".to_string())
        })?;
        EmbeddingTable::load(&spec.path, spec.dims, spec.oov).map_err(resource)
    }

    fn make_client(&self) -> Result<Box<dyn TranslationClient>, PipelineError> {
        match self.backend.clone().unwrap_or(BackendChoice::Http) {
            BackendChoice::Stub(mode) => Ok(Box::new(StubClient::new(mode))),
            BackendChoice::Http => HttpClient::from_env()
                .map(|c| Box::new(c) as Box<dyn TranslationClient>)
                .ok_or_else(|| {
                    PipelineError::Resource(format!(
                        "translation endpoint not configured ({TRANSLATE_ENDPOINT_ENV}), \
                         or select --stub"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Task {
    Stats,
    Eda(EdaConfig),
    Adjusted(AdjustedConfig),
    Backtranslate {
        langs: Vec<String>,
        cache: Option<PathBuf>,
        retry: RetryPolicy,
    },
    Mixup {
        config: MixupConfig,
        lambda_tsv: Option<PathBuf>,
    },
}

impl Task {
    fn name(&self) -> &'static str {
        match self {
            Task::Stats => "stats",
            Task::Eda(_) => "eda",
            Task::Adjusted(_) => "eda-adj",
            Task::Backtranslate { .. } => "backtranslate",
            Task::Mixup { .. } => "mixup",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub ratio: Ratio,
    pub task: Task,
    pub resources: Resources,
}

/// Machine-readable summary of one run. `emitted_total` always equals
/// `originals_emitted + augmented_emitted`, and `augmented_emitted` is the
/// sum of the per-method counts.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub task: String,
    pub input_count: usize,
    pub originals_emitted: usize,
    pub augmented_emitted: usize,
    pub emitted_total: usize,
    pub per_method: BTreeMap<String, usize>,
    pub noop_count: usize,
    pub skips: Vec<SkipNote>,
    pub wall_time_ms: u128,
    pub config: serde_json::Value,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn read_input(path: &Path) -> Result<Vec<OpinionRecord>, PipelineError> {
    let file = File::open(path)
        .map_err(|e| PipelineError::Resource(format!("{}: {e}", path.display())))?;
    parse_semeval_xml(BufReader::new(file)).map_err(resource)
}

fn open_output(path: &Path) -> Result<BufWriter<File>, PipelineError> {
    let file = File::create(path)
        .map_err(|e| PipelineError::Resource(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn config_echo(config: &RunConfig, seed: Option<u64>, alpha: Option<f64>) -> serde_json::Value {
    serde_json::json!({
        "task": config.task.name(),
        "input": config.input.display().to_string(),
        "output": config.output.as_ref().map(|p| p.display().to_string()),
        "format": config.format.as_str(),
        "ratio": config.ratio.as_str(),
        "seed": seed,
        "alpha": alpha,
    })
}

/// Replays a family over `passes` derived seeds and tags repeated-pass ids.
fn run_passes(
    passes: usize,
    mut one_pass: impl FnMut(u64) -> Result<AugmentRun, PipelineError>,
    base_seed: u64,
) -> Result<AugmentRun, PipelineError> {
    let mut combined = AugmentRun::default();
    for pass in 0..passes {
        let mut run = one_pass(derived_seed(base_seed, pass as u32))?;
        if pass > 0 {
            for augmented in &mut run.records {
                augmented.record.id = format!("{}:p{pass}", augmented.record.id);
                augmented
                    .params
                    .insert("pass".to_string(), pass.to_string());
            }
        }
        combined.records.extend(run.records);
        combined.skips.extend(run.skips);
    }
    Ok(combined)
}

fn write_text_artifact(
    config: &RunConfig,
    entries: &[OutputRecord],
) -> Result<(), PipelineError> {
    let path = config.output.as_ref().ok_or_else(|| {
        PipelineError::Config("this task writes an output file; pass --output".to_string())
    })?;
    let mut sink = open_output(path)?;
    match config.format {
        OutputFormat::Xml => write_xml(entries, &mut sink).map_err(resource)?,
        OutputFormat::Triple => write_triple_format(entries, &mut sink).map_err(resource)?,
        OutputFormat::MixupBin => {
            return Err(PipelineError::Config(
                "mixup-bin format applies to the mixup task only".to_string(),
            ))
        }
    }
    sink.flush().map_err(resource)?;
    Ok(())
}

/// Executes one batch run end to end and returns its report.
pub fn run(config: &RunConfig) -> Result<RunReport, PipelineError> {
    let started = Instant::now();
    let records = read_input(&config.input)?;
    let (original_copies, augment_passes) = config.ratio.passes();

    let mut report = RunReport {
        task: config.task.name().to_string(),
        input_count: records.len(),
        originals_emitted: 0,
        augmented_emitted: 0,
        emitted_total: 0,
        per_method: BTreeMap::new(),
        noop_count: 0,
        skips: Vec::new(),
        wall_time_ms: 0,
        config: serde_json::Value::Null,
    };

    match &config.task {
        Task::Stats => {
            if config.ratio != Ratio::OneToOne {
                return Err(PipelineError::Config(
                    "stats does not take a ratio".to_string(),
                ));
            }
            let stats = dataset_stats(&records);
            let rendered =
                serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n";
            match &config.output {
                Some(path) => {
                    let mut sink = open_output(path)?;
                    sink.write_all(rendered.as_bytes()).map_err(resource)?;
                    sink.flush().map_err(resource)?;
                }
                None => print!("{rendered}"),
            }
            report.config = config_echo(config, None, None);
        }
        Task::Eda(eda_config) => {
            let db = config.resources.load_wordnet()?;
            let augmented = run_passes(
                augment_passes,
                |seed| {
                    let pass_config = EdaConfig {
                        seed,
                        ..eda_config.clone()
                    };
                    Ok(eda_augment(&records, &db, &pass_config))
                },
                eda_config.seed,
            )?;
            finish_text_task(config, &records, original_copies, augmented, &mut report)?;
            report.config = config_echo(config, Some(eda_config.seed), Some(eda_config.alpha));
        }
        Task::Adjusted(adjusted_config) => {
            let db = config.resources.load_wordnet()?;
            let model = config.resources.load_tagger()?;
            let augmented = run_passes(
                augment_passes,
                |seed| {
                    let pass_config = AdjustedConfig {
                        seed,
                        ..adjusted_config.clone()
                    };
                    Ok(adjusted_eda_augment(&records, &db, &model, &pass_config))
                },
                adjusted_config.seed,
            )?;
            finish_text_task(config, &records, original_copies, augmented, &mut report)?;
            report.config = config_echo(
                config,
                Some(adjusted_config.seed),
                Some(adjusted_config.alpha),
            );
        }
        Task::Backtranslate { langs, cache, retry } => {
            if langs.is_empty() {
                return Err(PipelineError::Config("no pivot languages given".to_string()));
            }
            let client = config.resources.make_client()?;
            let mut cache = match cache {
                Some(path) => TranslationCache::open(path).map_err(resource)?,
                None => TranslationCache::in_memory(),
            };
            let augmented = run_passes(
                augment_passes,
                |_| {
                    backtranslate_corpus(&records, langs, client.as_ref(), &mut cache, retry)
                        .map_err(|e| match e {
                            crate::backtranslate::TranslateError::UnsupportedLanguage {
                                ..
                            } => PipelineError::Config(e.to_string()),
                            other => PipelineError::Resource(other.to_string()),
                        })
                },
                0,
            )?;
            finish_text_task(config, &records, original_copies, augmented, &mut report)?;
            report.config = config_echo(config, None, None);
        }
        Task::Mixup { config: mixup_config, lambda_tsv } => {
            if config.ratio != Ratio::OneToOne {
                return Err(PipelineError::Config(
                    "mixup emits interpolated records only; ratios do not apply".to_string(),
                ));
            }
            if config.format != OutputFormat::MixupBin {
                return Err(PipelineError::Config(
                    "mixup output must use --format mixup-bin".to_string(),
                ));
            }
            let table = config.resources.load_embeddings()?;
            let run = mixup_augment(&records, &table, mixup_config)
                .map_err(|e| PipelineError::Config(e.to_string()))?;
            let path = config.output.as_ref().ok_or_else(|| {
                PipelineError::Config("mixup writes a binary file; pass --output".to_string())
            })?;
            let mut sink = open_output(path)?;
            write_mixup_binary(&run, &mut sink).map_err(resource)?;
            sink.flush().map_err(resource)?;
            if let Some(tsv_path) = lambda_tsv {
                let mut sink = open_output(tsv_path)?;
                write_lambda_tsv(&run, &mut sink).map_err(resource)?;
                sink.flush().map_err(resource)?;
            }
            report.augmented_emitted = run.records.len();
            report.emitted_total = run.records.len();
            report
                .per_method
                .insert("mixup".to_string(), run.records.len());
            report.config = config_echo(
                config,
                Some(mixup_config.seed),
                Some(mixup_config.alpha),
            );
        }
    }

    report.wall_time_ms = started.elapsed().as_millis();
    Ok(report)
}

fn finish_text_task(
    config: &RunConfig,
    records: &[OpinionRecord],
    original_copies: usize,
    augmented: AugmentRun,
    report: &mut RunReport,
) -> Result<(), PipelineError> {
    let mut entries: Vec<OutputRecord> = Vec::new();
    for _ in 0..original_copies {
        entries.extend(records.iter().cloned().map(OutputRecord::Original));
    }
    report.originals_emitted = entries.len();
    for augmented_record in &augmented.records {
        *report
            .per_method
            .entry(augmented_record.method.tag())
            .or_insert(0) += 1;
        if augmented_record.is_noop() {
            report.noop_count += 1;
        }
    }
    report.augmented_emitted = augmented.records.len();
    entries.extend(augmented.records.into_iter().map(OutputRecord::Augmented));
    report.emitted_total = entries.len();
    report.skips = augmented.skips;
    write_text_artifact(config, &entries)?;
    Ok(())
}

/// One named diagnostic from [`selfcheck`].
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Verifies that the configured resources load: the WordNet directory, the
/// POS model, the embeddings file when given, and the translation backend.
/// Any failed entry means a nonzero exit for the CLI.
pub fn selfcheck(resources: &Resources) -> Vec<CheckOutcome> {
    let mut checks = Vec::new();

    checks.push(match resources.load_wordnet() {
        Ok(db) => CheckOutcome {
            name: "wordnet".to_string(),
            ok: true,
            detail: format!("{} synsets", db.synset_count()),
        },
        Err(error) => CheckOutcome {
            name: "wordnet".to_string(),
            ok: false,
            detail: error.to_string(),
        },
    });

    checks.push(match &resources.pos_model {
        Some(path) => match tagger::load_model(path) {
            Ok(_) => CheckOutcome {
                name: "pos-model".to_string(),
                ok: true,
                detail: path.display().to_string(),
            },
            Err(error) => CheckOutcome {
                name: "pos-model".to_string(),
                ok: false,
                detail: error.to_string(),
            },
        },
        None => CheckOutcome {
            name: "pos-model".to_string(),
            ok: true,
            detail: "embedded model".to_string(),
        },
    });

    match &resources.embeddings {
        Some(spec) => {
            // Verify the declared dimension against the first row without
            // loading the whole table.
            let outcome = File::open(&spec.path)
                .map_err(|e| e.to_string())
                .and_then(|file| {
                    let mut reader = BufReader::new(file);
                    let mut line = String::new();
                    reader
                        .read_line(&mut line)
                        .map_err(|e| e.to_string())
                        .and_then(|_| {
                            let found = line.split_whitespace().count().saturating_sub(1);
                            if found == spec.dims {
                                Ok(format!("{} ({} dims)", spec.path.display(), spec.dims))
                            } else {
                                Err(format!(
                                    "first row has {found} components, expected {}",
                                    spec.dims
                                ))
                            }
                        })
                });
            checks.push(match outcome {
                Ok(detail) => CheckOutcome {
                    name: "embeddings".to_string(),
                    ok: true,
                    detail,
                },
                Err(detail) => CheckOutcome {
                    name: "embeddings".to_string(),
                    ok: false,
                    detail,
                },
            });
        }
        None => checks.push(CheckOutcome {
            name: "embeddings".to_string(),
            ok: true,
            detail: "not configured (only needed for mixup)".to_string(),
        }),
    }

    checks.push(match resources.backend.clone().unwrap_or(BackendChoice::Http) {
        BackendChoice::Stub(_) => CheckOutcome {
            name: "translation".to_string(),
            ok: true,
            detail: "stub backend".to_string(),
        },
        BackendChoice::Http => match resources.make_client() {
            Ok(_) => CheckOutcome {
                name: "translation".to_string(),
                ok: true,
                detail: "endpoint configured".to_string(),
            },
            Err(error) => CheckOutcome {
                name: "translation".to_string(),
                ok: false,
                detail: error.to_string(),
            },
        },
    });

    checks
}

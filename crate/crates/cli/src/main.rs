//! Batch front end for the augmentation library.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 missing or
//! unloadable resource, 3 run finished but skipped records (see the report).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use absa_augment::adjusted::{AdjustedConfig, AdjustedMethod};
use absa_augment::backtranslate::{RetryPolicy, StubMode, DEFAULT_PIVOTS};
use absa_augment::eda::{EdaConfig, EdaMethod};
use absa_augment::mixup::{MixupConfig, OovPolicy};
use absa_augment::pipeline::{
    run, selfcheck, BackendChoice, EmbeddingSpec, OutputFormat, PipelineError, Ratio, Resources,
    RunConfig, RunReport, Task,
};
use absa_augment::seed::DEFAULT_SEED;
use absa_augment::wordnet::StopwordPolicy;

#[derive(Parser)]
#[command(
    name = "absa-augment",
    version,
    about = "Target-preserving data augmentation for aspect-based sentiment corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print polarity and category statistics for a corpus
    Stats {
        #[command(flatten)]
        io: InputArgs,
        /// Write the statistics JSON here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Original EDA: synonym replacement, insertion, swap, deletion
    Eda(EdaArgs),
    /// Adjusted EDA: sense-disambiguated replacement/insertion, target swap
    EdaAdj(EdaAdjArgs),
    /// Backtranslate contexts through pivot languages, target fixed
    Backtranslate(BacktranslateArgs),
    /// Interpolate record pairs in embedding space
    Mixup(MixupArgs),
    /// Verify that configured resources load
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct InputArgs {
    /// SemEval-style review XML
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct OutputArgs {
    /// Output artifact path
    #[arg(long)]
    output: PathBuf,
    /// Output format
    #[arg(long, default_value = "xml", value_parser = parse_format)]
    format: OutputFormat,
    /// Originals-to-augmentations mix: 1:1, 3:1, or 1:3
    #[arg(long, default_value = "1:1", value_parser = parse_ratio)]
    ratio: Ratio,
}

#[derive(Args)]
struct ReportArgs {
    /// Write the JSON run report here instead of stderr
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct WordnetArgs {
    /// WordNet database directory (or set ABSA_WORDNET_DIR)
    #[arg(long)]
    wordnet: Option<PathBuf>,
}

#[derive(Args)]
struct EdaArgs {
    #[command(flatten)]
    io: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Share of tokens changed per sentence
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Comma-separated subset of sr,ri,rs,rd
    #[arg(long, value_delimiter = ',', default_values_t = ["sr".to_string(), "ri".to_string(), "rs".to_string(), "rd".to_string()])]
    methods: Vec<String>,
    /// Force exactly one swap per sentence
    #[arg(long)]
    single_swap: bool,
    /// Process records in parallel (output is identical either way)
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    wordnet: WordnetArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct EdaAdjArgs {
    #[command(flatten)]
    io: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Comma-separated subset of sr_wsd,ri_wsd,ts
    #[arg(long, value_delimiter = ',', default_values_t = ["sr_wsd".to_string(), "ri_wsd".to_string(), "ts".to_string()])]
    methods: Vec<String>,
    /// Pair swap targets in seeded-shuffle order instead of sorted ids
    #[arg(long)]
    shuffle_pairs: bool,
    /// Keep or drop stopwords in Lesk signatures
    #[arg(long, default_value = "drop", value_parser = parse_stopword_policy)]
    lesk_stopwords: StopwordPolicy,
    /// Part-of-speech model file (defaults to the embedded model)
    #[arg(long)]
    pos_model: Option<PathBuf>,
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    wordnet: WordnetArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct BacktranslateArgs {
    #[command(flatten)]
    io: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Pivot language code; repeat for several (default: nl, es, ja)
    #[arg(long = "lang")]
    langs: Vec<String>,
    /// Translation cache file (JSON lines), created if absent
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Use a deterministic stub backend instead of HTTP
    #[arg(long, value_parser = parse_stub)]
    stub: Option<StubMode>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct MixupArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Output file for the binary interpolation records
    #[arg(long)]
    output: PathBuf,
    /// GloVe-style embeddings text file
    #[arg(long)]
    embeddings: PathBuf,
    /// Embedding dimension
    #[arg(long)]
    dims: usize,
    /// Beta(alpha, alpha) shape for the interpolation weight
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Out-of-vocabulary policy: zero or random
    #[arg(long, default_value = "zero")]
    oov: String,
    /// Also write a lambda/label TSV for auditing
    #[arg(long)]
    lambda_tsv: Option<PathBuf>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct SelfcheckArgs {
    #[command(flatten)]
    wordnet: WordnetArgs,
    #[arg(long)]
    pos_model: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long, value_parser = parse_stub)]
    stub: Option<StubMode>,
}

fn parse_format(raw: &str) -> Result<OutputFormat, String> {
    OutputFormat::parse(raw).ok_or_else(|| format!("unknown format {raw:?} (xml, triple, mixup-bin)"))
}

fn parse_ratio(raw: &str) -> Result<Ratio, String> {
    Ratio::parse(raw).ok_or_else(|| format!("unknown ratio {raw:?} (1:1, 3:1, 1:3)"))
}

fn parse_stub(raw: &str) -> Result<StubMode, String> {
    StubMode::parse(raw)
        .ok_or_else(|| format!("unknown stub {raw:?} (identity, marker, dictionary)"))
}

fn parse_stopword_policy(raw: &str) -> Result<StopwordPolicy, String> {
    match raw {
        "drop" => Ok(StopwordPolicy::Drop),
        "keep" => Ok(StopwordPolicy::Keep),
        _ => Err(format!("unknown policy {raw:?} (keep, drop)")),
    }
}

fn build_config(command: &Command) -> Result<(RunConfig, Option<PathBuf>), PipelineError> {
    let config = match command {
        Command::Stats { io, output, report } => (
            RunConfig {
                input: io.input.clone(),
                output: output.clone(),
                format: OutputFormat::Xml,
                ratio: Ratio::OneToOne,
                task: Task::Stats,
                resources: Resources::default(),
            },
            report.report.clone(),
        ),
        Command::Eda(args) => {
            let methods = args
                .methods
                .iter()
                .map(|tag| {
                    EdaMethod::parse(tag)
                        .ok_or_else(|| PipelineError::Config(format!("unknown method {tag:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (
                RunConfig {
                    input: args.io.input.clone(),
                    output: Some(args.out.output.clone()),
                    format: args.out.format,
                    ratio: args.out.ratio,
                    task: Task::Eda(EdaConfig {
                        alpha: args.alpha,
                        seed: args.seed,
                        methods,
                        floor_one: true,
                        single_swap: args.single_swap,
                        parallel: args.parallel,
                    }),
                    resources: Resources {
                        wordnet_dir: args.wordnet.wordnet.clone(),
                        ..Resources::default()
                    },
                },
                args.report.report.clone(),
            )
        }
        Command::EdaAdj(args) => {
            let methods = args
                .methods
                .iter()
                .map(|tag| {
                    AdjustedMethod::parse(tag)
                        .ok_or_else(|| PipelineError::Config(format!("unknown method {tag:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (
                RunConfig {
                    input: args.io.input.clone(),
                    output: Some(args.out.output.clone()),
                    format: args.out.format,
                    ratio: args.out.ratio,
                    task: Task::Adjusted(AdjustedConfig {
                        alpha: args.alpha,
                        seed: args.seed,
                        methods,
                        floor_one: true,
                        shuffle_pairs: args.shuffle_pairs,
                        lesk_stopwords: args.lesk_stopwords,
                        parallel: args.parallel,
                    }),
                    resources: Resources {
                        wordnet_dir: args.wordnet.wordnet.clone(),
                        pos_model: args.pos_model.clone(),
                        ..Resources::default()
                    },
                },
                args.report.report.clone(),
            )
        }
        Command::Backtranslate(args) => {
            let langs = if args.langs.is_empty() {
                DEFAULT_PIVOTS.iter().map(|s| s.to_string()).collect()
            } else {
                args.langs.clone()
            };
            (
                RunConfig {
                    input: args.io.input.clone(),
                    output: Some(args.out.output.clone()),
                    format: args.out.format,
                    ratio: args.out.ratio,
                    task: Task::Backtranslate {
                        langs,
                        cache: args.cache.clone(),
                        retry: RetryPolicy::default(),
                    },
                    resources: Resources {
                        backend: Some(match args.stub {
                            Some(mode) => BackendChoice::Stub(mode),
                            None => BackendChoice::Http,
                        }),
                        ..Resources::default()
                    },
                },
                args.report.report.clone(),
            )
        }
        Command::Mixup(args) => {
            let oov = match args.oov.as_str() {
                "zero" => OovPolicy::Zero,
                "random" => OovPolicy::Random { seed: args.seed },
                other => {
                    return Err(PipelineError::Config(format!(
                        "unknown oov policy {other:?} (zero, random)"
                    )))
                }
            };
            (
                RunConfig {
                    input: args.io.input.clone(),
                    output: Some(args.output.clone()),
                    format: OutputFormat::MixupBin,
                    ratio: Ratio::OneToOne,
                    task: Task::Mixup {
                        config: MixupConfig {
                            alpha: args.alpha,
                            seed: args.seed,
                        },
                        lambda_tsv: args.lambda_tsv.clone(),
                    },
                    resources: Resources {
                        embeddings: Some(EmbeddingSpec {
                            path: args.embeddings.clone(),
                            dims: args.dims,
                            oov,
                        }),
                        ..Resources::default()
                    },
                },
                args.report.report.clone(),
            )
        }
        Command::Selfcheck(_) => unreachable!("selfcheck handled separately"),
    };
    Ok(config)
}

fn emit_report(report: &RunReport, path: Option<&PathBuf>) -> Result<(), PipelineError> {
    let rendered = report.to_json() + "\n";
    match path {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| PipelineError::Resource(format!("{}: {e}", path.display()))),
        None => {
            eprint!("{rendered}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = match error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = error.print();
            return ExitCode::from(code);
        }
    };

    if let Command::Selfcheck(args) = &cli.command {
        let resources = Resources {
            wordnet_dir: args.wordnet.wordnet.clone(),
            pos_model: args.pos_model.clone(),
            embeddings: args.embeddings.as_ref().map(|path| EmbeddingSpec {
                path: path.clone(),
                dims: args.dims.unwrap_or(300),
                oov: OovPolicy::Zero,
            }),
            backend: args.stub.map(BackendChoice::Stub),
        };
        let checks = selfcheck(&resources);
        let mut all_ok = true;
        for check in &checks {
            println!(
                "{} {}: {}",
                if check.ok { "ok  " } else { "FAIL" },
                check.name,
                check.detail
            );
            all_ok &= check.ok;
        }
        return if all_ok { ExitCode::SUCCESS } else { ExitCode::from(2) };
    }

    let (config, report_path) = match build_config(&cli.command) {
        Ok(pair) => pair,
        Err(error) => {
            eprintln!("{error}");
            return ExitCode::from(error.exit_code() as u8);
        }
    };

    match run(&config) {
        Ok(report) => {
            if let Err(error) = emit_report(&report, report_path.as_ref()) {
                eprintln!("{error}");
                return ExitCode::from(error.exit_code() as u8);
            }
            if report.skips.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "warning: {} record(s) skipped; see report",
                    report.skips.len()
                );
                ExitCode::from(3)
            }
        }
        Err(error) => {
            eprintln!("{error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}

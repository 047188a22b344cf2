//! Command-line surface: `extract`, `select`, `subset`, `coverage-validate`
//! and `analyze {dedup,overlap,average}`.
//!
//! Failures print exactly one line, `error[<code>]: <message>`, to stderr and
//! exit nonzero. Flags may also come from a TOML file passed with
//! `--config`; explicit flags win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::analysis::{self, CrashRecord};
use crate::corpus::{budget_size, load_manifest, save_subset};
use crate::coverage;
use crate::error::{Error, Result};
use crate::features::{self, output, FeatureKind};
use crate::io;
use crate::selection::{fps_order, order_corpus, Method, SelectionOrder};

#[derive(Debug, Parser)]
#[command(
    name = "seeddistill",
    version,
    about = "Order and distill fuzzing seed corpora"
)]
pub struct Cli {
    /// TOML file with default values for manifest, kind, method, budget, rng_seed, jobs, out
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (0 = one per core)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract feature vectors to <out>/<kind>.jsonl and <out>/<kind>.registry.json
    Extract(ExtractArgs),
    /// Order a corpus and write <out>/order.json and <out>/subset.json
    Select(SelectArgs),
    /// Cut a budgeted subset manifest from an existing order file
    Subset(SubsetArgs),
    /// Check coverage files and print a summary
    CoverageValidate(CoverageArgs),
    /// Crash deduplication, overlap and averaging reports
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// ts | ast3gram | cfg3gram | embedding
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// fiss | ciss-p | ciss-m | piss | random
    #[arg(long)]
    pub method: Option<String>,
    /// Feature kind for fiss: ts | ast3gram | cfg3gram | embedding
    #[arg(long)]
    pub kind: Option<String>,
    /// Use precomputed vectors (JSONL from `extract`) instead of extracting
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Fraction of the corpus to keep, in (0, 1]
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubsetArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub order: PathBuf,
    #[arg(long)]
    pub budget: Option<f64>,
    /// Output manifest path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Optional JSON summary path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Count unique inconsistencies in a JSON Lines crash log
    Dedup {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print an aligned table of keys and record counts
        #[arg(long)]
        table: bool,
    },
    /// Venn overlap between 2 or 3 key files (dedup reports or JSON string arrays)
    Overlap {
        #[arg(required = true, num_args = 2..=3)]
        sets: Vec<PathBuf>,
        /// Comma-separated set names (default: file stems)
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean of per-run counts, printed to one decimal
    Average {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Values a `--config` TOML file may provide.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub kind: Option<String>,
    pub method: Option<String>,
    pub budget: Option<f64>,
    pub rng_seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = io::read_text(path)?;
        toml::from_str(&text).map_err(|e| Error::parse(format!("config {}", path.display()), e))
    }
}

fn required<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T> {
    flag.or(config)
        .ok_or_else(|| Error::Parameter(format!("missing --{name}")))
}

/// `--method` plus optional `--kind` to a [`Method`]; checks compatibility.
pub fn resolve_method(method: &str, kind: Option<&str>) -> Result<Method> {
    let kind = kind.map(str::parse::<FeatureKind>).transpose()?;
    match (method, kind) {
        ("fiss", Some(k)) => Ok(Method::Fiss(k)),
        ("fiss", None) => Err(Error::Parameter("--method fiss requires --kind".into())),
        (m, Some(_)) if !m.starts_with("fiss") => Err(Error::Parameter(format!(
            "--kind only applies to fiss, not {m}"
        ))),
        (m, _) => m.parse(),
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    io::write_atomic(path, s.as_bytes())
}

fn cmd_extract(args: ExtractArgs, cfg: &RunConfig) -> Result<()> {
    let manifest = required(args.manifest, cfg.manifest.clone(), "manifest")?;
    let kind: FeatureKind = required(args.kind, cfg.kind.clone(), "kind")?.parse()?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let corpus = load_manifest(&manifest)?;
    let (registry, vectors) = features::extract(&corpus, kind)?;
    let path = output::write_features(&out, kind, registry.as_ref(), &vectors)?;
    println!(
        "extracted {} {} vectors ({} dimensions) to {}",
        vectors.len(),
        kind,
        registry
            .as_ref()
            .map(|r| r.len())
            .unwrap_or_else(|| vectors.first().map_or(0, |v| v.dimension_bound())),
        path.display()
    );
    Ok(())
}

fn cmd_select(args: SelectArgs, cfg: &RunConfig) -> Result<()> {
    let manifest = required(args.manifest, cfg.manifest.clone(), "manifest")?;
    let method_name = required(args.method, cfg.method.clone(), "method")?;
    // a config-file kind is a default for fiss only; an explicit flag is checked
    let kind = args
        .kind
        .or_else(|| (method_name == "fiss").then(|| cfg.kind.clone()).flatten());
    let method = resolve_method(&method_name, kind.as_deref())?;
    let budget = required(args.budget, cfg.budget, "budget")?;
    let rng_seed = args.rng_seed.or(cfg.rng_seed).unwrap_or(0);
    let out = required(args.out, cfg.out.clone(), "out")?;

    let corpus = load_manifest(&manifest)?;
    budget_size(corpus.n(), budget)?;
    let order = match (&method, &args.features) {
        (Method::Fiss(kind), Some(path)) => {
            let vectors = output::read_features(path)?;
            if let Some(v) = vectors.iter().find(|v| v.kind != *kind) {
                return Err(Error::Parameter(format!(
                    "{} holds {} vectors but --kind is {kind}",
                    path.display(),
                    v.kind
                )));
            }
            fps_order(&corpus, &vectors, rng_seed)?
        }
        (_, Some(_)) => {
            return Err(Error::Parameter("--features only applies to fiss".into()));
        }
        (_, None) => order_corpus(&corpus, method, rng_seed)?,
    };
    order.save(&out.join("order.json"))?;
    let kept = save_subset(&corpus, &order, budget, out.join("subset.json"))?;
    println!(
        "selected {} of {} seeds (method {}, rng_seed {})",
        kept.len(),
        corpus.n(),
        order.method,
        rng_seed
    );
    Ok(())
}

fn cmd_subset(args: SubsetArgs, cfg: &RunConfig) -> Result<()> {
    let manifest = required(args.manifest, cfg.manifest.clone(), "manifest")?;
    let budget = required(args.budget, cfg.budget, "budget")?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let corpus = load_manifest(&manifest)?;
    let order = SelectionOrder::load(&args.order)?;
    if order.corpus != corpus.name {
        return Err(Error::Validation(format!(
            "order is for corpus {:?} but manifest is {:?}",
            order.corpus, corpus.name
        )));
    }
    let kept = save_subset(&corpus, &order, budget, &out)?;
    println!("selected {} of {} seeds", kept.len(), corpus.n());
    Ok(())
}

fn cmd_coverage(args: CoverageArgs, cfg: &RunConfig) -> Result<()> {
    let manifest = required(args.manifest, cfg.manifest.clone(), "manifest")?;
    let corpus = load_manifest(&manifest)?;
    let bitmaps = coverage::load_coverage(&corpus)?;
    let summary = coverage::summarize(&bitmaps)?;
    println!(
        "ok: {} seeds, width {}, union covers {} units (per-seed {}..{})",
        summary.seeds,
        summary.width,
        summary.union_popcount,
        summary.min_popcount,
        summary.max_popcount
    );
    if let Some(out) = args.out {
        write_json(&out, &summary)?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct DedupReport<'a> {
    normalization_version: u32,
    records: usize,
    unique: usize,
    keys: &'a [String],
}

fn read_keys(path: &Path) -> Result<Vec<String>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum KeyFile {
        Plain(Vec<String>),
        Report { keys: Vec<String> },
    }
    let text = io::read_text(path)?;
    let parsed: KeyFile = serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("key file {}", path.display()), e))?;
    Ok(match parsed {
        KeyFile::Plain(keys) | KeyFile::Report { keys } => keys,
    })
}

fn read_counts(path: &Path) -> Result<Vec<u64>> {
    let text = io::read_text(path)?;
    let ctx = || format!("counts file {}", path.display());
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| Error::parse(ctx(), e))
    } else {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::parse(ctx(), format!("{t:?}: {e}")))
            })
            .collect()
    }
}

fn cmd_analyze(cmd: AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Dedup { input, out, table } => {
            let records: Vec<CrashRecord> = analysis::read_crash_records(&input)?;
            let keys = analysis::dedup(&records);
            println!("{} unique", keys.len());
            if table {
                let counts: Vec<usize> = keys
                    .iter()
                    .map(|k| {
                        records
                            .iter()
                            .filter(|r| analysis::normalize_message(&r.message) == *k)
                            .count()
                    })
                    .collect();
                println!("{:>7}  key", "records");
                for (k, c) in keys.iter().zip(counts) {
                    println!("{c:>7}  {k}");
                }
            }
            if let Some(out) = out {
                write_json(
                    &out,
                    &DedupReport {
                        normalization_version: analysis::NORMALIZATION_VERSION,
                        records: records.len(),
                        unique: keys.len(),
                        keys: &keys,
                    },
                )?;
            }
        }
        AnalyzeCommand::Overlap { sets, names, out } => {
            let names = match names {
                Some(n) if n.len() != sets.len() => {
                    return Err(Error::Parameter(format!(
                        "{} names given for {} sets",
                        n.len(),
                        sets.len()
                    )))
                }
                Some(n) => n,
                None => sets
                    .iter()
                    .map(|p| {
                        p.file_stem().map_or_else(
                            || p.display().to_string(),
                            |s| s.to_string_lossy().into_owned(),
                        )
                    })
                    .collect(),
            };
            let named = names
                .into_iter()
                .zip(&sets)
                .map(|(n, p)| read_keys(p).map(|k| (n, k)))
                .collect::<Result<Vec<_>>>()?;
            let report = analysis::overlap(&named)?;
            print!("{}", report.to_table());
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
        }
        AnalyzeCommand::Average {
            input,
            repetitions,
            out,
        } => {
            let counts = read_counts(&input)?;
            let reps = repetitions.unwrap_or(counts.len());
            let mean = analysis::average_runs(&counts, reps)?;
            let shown = analysis::format_mean(mean);
            println!("{shown}");
            if let Some(out) = out {
                write_json(
                    &out,
                    &serde_json::json!({
                        "repetitions": reps,
                        "counts": counts,
                        "mean": shown.parse::<f64>().unwrap_or(mean),
                        "display": shown,
                    }),
                )?;
            }
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(jobs) = cli.jobs.or(cfg.jobs) {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.command {
        Command::Extract(a) => cmd_extract(a, &cfg),
        Command::Select(a) => cmd_select(a, &cfg),
        Command::Subset(a) => cmd_subset(a, &cfg),
        Command::CoverageValidate(a) => cmd_coverage(a, &cfg),
        Command::Analyze(a) => cmd_analyze(a),
    }
}

/// Single-line diagnostic for an error.
pub fn diagnostic(err: &Error) -> String {
    let msg = err.to_string().replace(['\n', '\r'], " ");
    format!("error[{}]: {msg}", err.code())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    2
                } else {
                    0
                };
            }
            let rendered = e.render().to_string();
            let first = rendered
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return 2;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            e.status()
        }
    }
}

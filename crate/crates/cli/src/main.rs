use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use jptense_core::ablation::{self, AblationCondition};
use jptense_core::dataset::{emit_labeled_tsv, emit_tsv, generate_synthetic, parse_tsv, split, stats};
use jptense_core::metrics::{parse_predictions, report_json_schema, subgroup_report, write_predictions, DEFAULT_UNK};
use jptense_core::runner::{self, oracle_predict, ExperimentConfig, OracleMode};
use jptense_core::taxonomy::{taxonomy_report, ErrorClassifier};
use jptense_core::{
    classify_dataset, conjugate_past, segment_moras, Dataset, Error, ExactRatio, SplitKind, SplitSpec, TypeCounts,
    VerbType,
};

#[derive(Parser)]
#[command(name = "jptense", version, about = "Japanese past-tense inflection evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the past-tense form of a lemma.
    Conjugate {
        lemma: String,
        /// Verb type: 1, 2, 4-1, 4-2 or 4-3.
        #[arg(long = "type")]
        vtype: VerbType,
    },
    /// Label (lemma, past) pairs with their verb type.
    Classify {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset.
    Gen {
        /// `reference` or explicit counts such as `1=100,2=50,4-2=5`.
        #[arg(long, default_value = "reference")]
        counts: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a dataset into train.tsv and test.tsv.
    Split {
        file: PathBuf,
        #[arg(long, default_value = "lemma")]
        kind: SplitKind,
        #[arg(long, default_value_t = 0.1)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print the verb-type distribution of a dataset.
    Stats {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build one ablation condition from a train/test pair.
    Ablate {
        /// Preset name, e.g. `regular-only` or `regular+4-2`.
        #[arg(long)]
        condition: String,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Accuracy and per-type disparity report for a prediction file.
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Output path; `.json` writes JSON, anything else Markdown.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Categorize prediction errors.
    Errors {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Output path; `.json` writes JSON, anything else Markdown.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_UNK)]
        unk: String,
    },
    /// Write predictions from a built-in oracle.
    OraclePredict {
        #[arg(long)]
        test: PathBuf,
        /// `perfect` or `over-regularize`.
        #[arg(long, default_value = "over-regularize")]
        mode: OracleMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the JSON Schema of evaluation reports.
    Schema,
}

fn load(path: &Path) -> Result<Dataset> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_tsv(BufReader::new(f), path.display().to_string()).with_context(|| format!("reading {}", path.display()))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn is_json(p: Option<&Path>) -> bool {
    p.and_then(Path::extension).is_some_and(|e| e == "json")
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn json_text(v: &serde_json::Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn write_dataset(path: &Path, d: &Dataset) -> Result<()> {
    let mut w = sink(Some(path))?;
    emit_tsv(d, &mut w)?;
    w.flush()?;
    Ok(())
}

fn classify(file: &Path, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
        let mut fields = line.split('\t');
        let (Some(lemma), Some(past)) = (fields.next(), fields.next()) else {
            bail!("line {}: expected `lemma<TAB>past`", i + 1);
        };
        let word = |s: &str| segment_moras(s).with_context(|| format!("line {}", i + 1));
        pairs.push((word(lemma)?, word(past)?));
    }
    match classify_dataset(pairs) {
        Ok(labeled) => {
            let mut w = sink(out)?;
            emit_labeled_tsv(&Dataset::new(labeled, file.display().to_string()), &mut w)?;
            w.flush()?;
            Ok(())
        }
        Err(Error::Batch(failures)) => {
            for (row, e) in &failures {
                eprintln!("row {}: {e}", row + 1);
            }
            bail!("{} unclassifiable row(s)", failures.len())
        }
        Err(e) => Err(e.into()),
    }
}

fn predictions(gold: &Path, pred: &Path) -> Result<Vec<jptense_core::metrics::PredictionRecord>> {
    let gold = load(gold)?;
    let f = fs::File::open(pred).with_context(|| format!("opening {}", pred.display()))?;
    parse_predictions(BufReader::new(f), &gold).with_context(|| format!("joining {}", pred.display()))
}

fn execute(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Conjugate { lemma, vtype } => {
            let past = conjugate_past(&segment_moras(&lemma)?, vtype)?;
            println!("{past}");
        }
        Command::Classify { file, out } => classify(&file, out.as_deref())?,
        Command::Gen { counts, seed, out } => {
            let d = generate_synthetic(&TypeCounts::parse(&counts)?, seed)?;
            let mut w = sink(out.as_deref())?;
            emit_tsv(&d, &mut w)?;
            w.flush()?;
        }
        Command::Split { file, kind, fraction, seed, out_dir } => {
            let d = load(&file)?;
            let (train, test) = split(&d, &SplitSpec { kind, test_fraction: fraction, seed })?;
            fs::create_dir_all(&out_dir)?;
            write_dataset(&out_dir.join("train.tsv"), &train)?;
            write_dataset(&out_dir.join("test.tsv"), &test)?;
            eprintln!("train {} / test {}", train.len(), test.len());
        }
        Command::Stats { file, json } => {
            let s = stats::<ExactRatio>(&load(&file)?);
            let text = if json { json_text(&s.to_json())? } else { s.to_markdown() };
            print!("{text}");
        }
        Command::Ablate { condition, train, test, out_dir } => {
            let cond = AblationCondition::preset(&condition)?;
            let (tr, te) = ablation::apply(&cond, &load(&train)?, &load(&test)?)?;
            fs::create_dir_all(&out_dir)?;
            write_dataset(&out_dir.join("train.tsv"), &tr)?;
            write_dataset(&out_dir.join("test.tsv"), &te)?;
            eprintln!("{}: train {} / test {}", cond.name, tr.len(), te.len());
        }
        Command::Evaluate { gold, pred, report } => {
            let rep = subgroup_report::<ExactRatio>(&predictions(&gold, &pred)?)?;
            let text = if is_json(report.as_deref()) { json_text(&rep.to_json())? } else { rep.to_markdown() };
            emit_text(report.as_deref(), &text)?;
        }
        Command::Errors { gold, pred, out, unk } => {
            let classified = ErrorClassifier::new(unk).classify_all(&predictions(&gold, &pred)?)?;
            let rep = taxonomy_report(&classified);
            let text = if is_json(out.as_deref()) { json_text(&rep.to_json())? } else { rep.to_markdown() };
            emit_text(out.as_deref(), &text)?;
        }
        Command::OraclePredict { test, mode, out } => {
            let recs = oracle_predict(&load(&test)?, mode);
            let mut w = sink(out.as_deref())?;
            write_predictions(&recs, &mut w)?;
            w.flush()?;
        }
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let manifest = runner::run(&cfg)?;
            for n in &manifest.notices {
                eprintln!("notice: {n}");
            }
            eprintln!("manifest written to {}", cfg.output_dir.join("manifest.json").display());
            if !manifest.complete {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Schema => print!("{}", json_text(&report_json_schema())?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Argument parsing and subcommand dispatch.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use numorph_core::evaluation::{run_benchmark, Averaging, BenchmarkError, EvalReport};
use numorph_core::metrics::{all_stats, correlation_report, LanguageStats};
use numorph_core::models::{train_for, ModelError, ModelKind, ModelOptions, TargetSize};
use numorph_core::report::{
    alpha_note, cells_table, correlation_table, model_table, morphoseg_table, overview_table,
    stats_table, subword_table, Format, Table,
};
use numorph_core::segmentation::gold_boundaries;
use numorph_core::wordlist::{validate, Delimiter, Level, Wordlist};
use serde::Serialize;
use thiserror::Error;

use crate::service::{self, AppState};
use crate::session::{load, Session, SessionError};

#[derive(Debug, Parser)]
#[command(name = "numorph", version, about = "Numeral morphology workbench")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Wordlist file (tab-separated unless --comma).
    #[arg(long)]
    input: PathBuf,
    /// Read and write comma-separated values.
    #[arg(long)]
    comma: bool,
}

impl Input {
    fn delimiter(&self) -> Delimiter {
        if self.comma {
            Delimiter::Comma
        } else {
            Delimiter::Tab
        }
    }

    fn load(&self) -> Result<Wordlist, CliError> {
        Ok(load(&self.input, self.delimiter())?)
    }
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, default_value = "table")]
    format: Format,
    /// Write to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelFlags {
    /// Threshold for the LSV-family models (default: mean positive score).
    #[arg(long)]
    threshold: Option<f64>,
    /// Subword vocabulary size: "gold" or an integer.
    #[arg(long, default_value = "gold")]
    target_size: TargetSize,
}

impl ModelFlags {
    fn options(&self) -> ModelOptions {
        ModelOptions {
            threshold: self.threshold,
            target: self.target_size,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    #[arg(long)]
    model: ModelKind,
    #[arg(long, default_value = "underlying")]
    level: Level,
    /// Restrict to one language.
    #[arg(long)]
    language: Option<String>,
    #[command(flatten)]
    flags: ModelFlags,
    /// Print the vocabulary-size trajectory of subword models to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a wordlist and list violations.
    Validate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Per-language statistics.
    Stats {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        language: Option<String>,
        /// Also print rank correlations between the statistics.
        #[arg(long)]
        correlations: bool,
    },
    /// Segment every word with a morpheme segmentation model.
    Segment(SegmentArgs),
    /// Segment every word with a subword tokenizer.
    Tokenize(SegmentArgs),
    /// Boundary precision/recall of models against the annotation.
    Evaluate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long, value_delimiter = ',', default_value = "affix,mdl,lspe")]
        models: Vec<ModelKind>,
        #[arg(long, value_delimiter = ',', default_value = "surface,underlying")]
        levels: Vec<Level>,
        #[command(flatten)]
        flags: ModelFlags,
        /// Pool boundary counts across languages instead of averaging.
        #[arg(long)]
        micro: bool,
    },
    /// Statistics, segmentation and tokenization summaries, and correlations.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        flags: ModelFlags,
        #[arg(long)]
        micro: bool,
    },
    /// Run the annotation HTTP service.
    Serve {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        #[command(flatten)]
        flags: ModelFlags,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    /// Already reported; exit with failure.
    #[error("{0} violation(s)")]
    Violations(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn write_out(output: &Output, text: &str) -> Result<(), CliError> {
    match &output.output {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn render<T: Serialize>(output: &Output, value: &T, table: &Table) -> Result<String, CliError> {
    Ok(match output.format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        f => table.render(f),
    })
}

fn languages<'a>(w: &'a Wordlist, only: &Option<String>) -> Result<Vec<&'a str>, CliError> {
    match only {
        Some(l) if !w.has_language(l) => Err(CliError::Usage(format!("unknown language {l:?}"))),
        Some(l) => Ok(vec![w.languages().find(|x| x == l).expect("checked")]),
        None => Ok(w.languages().collect()),
    }
}

fn cmd_validate(input: &Input, output: &Output) -> Result<(), CliError> {
    let w = input.load()?;
    let report = validate(&w);
    let mut t = Table::new(["Severity", "Kind", "Language", "Rows", "Message"]);
    for (sev, v) in report
        .violations
        .iter()
        .map(|v| ("error", v))
        .chain(report.warnings.iter().map(|v| ("warning", v)))
    {
        t.push(vec![
            sev.into(),
            v.kind.as_str().into(),
            v.language.clone(),
            v.rows.join(" "),
            v.message.clone(),
        ]);
    }
    let mut text = render(output, &report, &t)?;
    if output.format != Format::Json {
        if t.rows.is_empty() {
            text.clear();
        }
        text.push_str(&format!(
            "{} violations, {} warnings\n",
            report.violations.len(),
            report.warnings.len()
        ));
    }
    write_out(output, &text)?;
    match report.violations.len() {
        0 => Ok(()),
        n => Err(CliError::Violations(n)),
    }
}

#[derive(Serialize)]
struct StatsJson<'a> {
    languages: Vec<LangStats<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlations: Option<Vec<numorph_core::metrics::CorrelationRow>>,
}

#[derive(Serialize)]
struct LangStats<'a> {
    language: &'a str,
    #[serde(flatten)]
    stats: &'a LanguageStats,
}

fn cmd_stats(
    input: &Input,
    output: &Output,
    language: &Option<String>,
    correlations: bool,
) -> Result<(), CliError> {
    let w = input.load()?;
    let keep = languages(&w, language)?;
    let stats: Vec<(String, LanguageStats)> =
        all_stats(&w).into_iter().filter(|(l, _)| keep.contains(&l.as_str())).collect();
    let corr = correlations.then(|| correlation_report(&stats));
    let json = StatsJson {
        languages: stats
            .iter()
            .map(|(l, s)| LangStats {
                language: l,
                stats: s,
            })
            .collect(),
        correlations: corr.clone(),
    };
    let mut text = render(output, &json, &stats_table(&stats))?;
    if let (Some(rows), false) = (&corr, output.format == Format::Json) {
        text.push('\n');
        text.push_str(&correlation_table(rows).render(output.format));
        text.push_str(&alpha_note());
        text.push('\n');
    }
    write_out(output, &text)
}

#[derive(Serialize)]
struct SegmentedRow {
    id: String,
    language: String,
    level: Level,
    predicted: String,
    gold: String,
}

#[derive(Serialize)]
struct Trajectory {
    language: String,
    target_size: usize,
    reached_target: bool,
    trajectory: Vec<usize>,
}

fn cmd_segment(args: &SegmentArgs, subword: bool) -> Result<(), CliError> {
    if args.model.is_subword() != subword {
        let which = if subword { "tokenize" } else { "segment" };
        return Err(CliError::Usage(format!("{} is not a {which} model", args.model)));
    }
    let w = args.input.load()?;
    let options = args.flags.options();
    let mut rows = Vec::new();
    let mut trajectories = Vec::new();
    for lang in languages(&w, &args.language)? {
        let (corpus, trained) = train_for(&w, lang, args.level, args.model, &options)?;
        let gold = gold_boundaries(&w, lang, args.level).expect("corpus extracted above");
        for ((id, word), g) in corpus.row_ids.iter().zip(&corpus.words).zip(&gold) {
            rows.push(SegmentedRow {
                id: id.clone(),
                language: lang.to_string(),
                level: args.level,
                predicted: trained.segmenter.segment(word).to_string(),
                gold: g.to_string(),
            });
        }
        if let Some(v) = trained.vocabulary {
            trajectories.push(Trajectory {
                language: lang.to_string(),
                target_size: v.target_size,
                reached_target: v.reached_target(),
                trajectory: v.trajectory,
            });
        }
    }
    if args.trace {
        let mut err = io::stderr().lock();
        for t in &trajectories {
            let steps: Vec<String> = t.trajectory.iter().map(usize::to_string).collect();
            writeln!(
                err,
                "{} {}: target {}{}, vocabulary {}",
                t.language,
                args.model,
                t.target_size,
                if t.reached_target { "" } else { " (not reached)" },
                steps.join(" -> ")
            )?;
        }
    }
    let mut t = Table::new(["ID", "Language", "Predicted", "Gold"]);
    for r in &rows {
        t.push(vec![r.id.clone(), r.language.clone(), r.predicted.clone(), r.gold.clone()]);
    }
    let text = if args.output.format == Format::Json && subword {
        serde_json::to_string_pretty(&serde_json::json!({
            "rows": rows,
            "trajectories": trajectories,
        }))? + "\n"
    } else {
        render(&args.output, &rows, &t)?
    };
    write_out(&args.output, &text)
}

fn averaging(micro: bool) -> Averaging {
    if micro {
        Averaging::Micro
    } else {
        Averaging::Macro
    }
}

fn cmd_evaluate(
    input: &Input,
    output: &Output,
    models: &[ModelKind],
    levels: &[Level],
    flags: &ModelFlags,
    micro: bool,
) -> Result<(), CliError> {
    let w = input.load()?;
    let report = run_benchmark(&w, models, levels, &flags.options(), averaging(micro))?;
    let text = match output.format {
        Format::Json => render(output, &report, &cells_table(&report))?,
        f => {
            let label = match report.averaging {
                Averaging::Macro => "macro-averaged over languages",
                Averaging::Micro => "micro-averaged over languages",
            };
            format!(
                "{}\n# {label}, S / U\n{}",
                cells_table(&report).render(f),
                model_table(&report, models).render(f)
            )
        }
    };
    write_out(output, &text)
}

#[derive(Serialize)]
struct ReportJson<'a> {
    statistics: Vec<LangStats<'a>>,
    evaluation: &'a EvalReport,
    correlations: Vec<numorph_core::metrics::CorrelationRow>,
}

fn cmd_report(
    input: &Input,
    output: &Output,
    flags: &ModelFlags,
    micro: bool,
) -> Result<(), CliError> {
    let w = input.load()?;
    let stats = all_stats(&w);
    let models: Vec<ModelKind> = ModelKind::MORPHOSEG
        .iter()
        .chain(&ModelKind::SUBWORD)
        .copied()
        .collect();
    let report = run_benchmark(&w, &models, &Level::ALL, &flags.options(), averaging(micro))?;
    let correlations = correlation_report(&stats);
    let text = match output.format {
        Format::Json => {
            let json = ReportJson {
                statistics: stats
                    .iter()
                    .map(|(l, s)| LangStats {
                        language: l,
                        stats: s,
                    })
                    .collect(),
                evaluation: &report,
                correlations,
            };
            serde_json::to_string_pretty(&json)? + "\n"
        }
        f => {
            let overview =
                overview_table(&stats, &report, &[ModelKind::Mdl, ModelKind::Lspe, ModelKind::Affix]);
            let sections = [
                ("Languages (S / U; model columns are F1)", overview),
                ("Morpheme segmentation (S / U)", morphoseg_table(&report)),
                ("Subword tokenization, gold vocabulary size (S / U)", subword_table(&report)),
                ("Rank correlations", correlation_table(&correlations)),
            ];
            let mut text = String::new();
            for (title, table) in sections {
                text.push_str(&format!("# {title}\n{}\n", table.render(f)));
            }
            text.push_str(&format!("# {}\n", alpha_note()));
            text
        }
    };
    write_out(output, &text)
}

fn cmd_serve(input: &Input, bind: &str, flags: &ModelFlags) -> Result<(), CliError> {
    let session = Session::open(&input.input, input.delimiter())?;
    let state = AppState::new(session, flags.options());
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(bind).await?;
        eprintln!("serving {} on http://{}", input.input.display(), listener.local_addr()?);
        service::serve(state, listener).await
    })?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate { input, output } => cmd_validate(input, output),
        Command::Stats {
            input,
            output,
            language,
            correlations,
        } => cmd_stats(input, output, language, *correlations),
        Command::Segment(args) => cmd_segment(args, false),
        Command::Tokenize(args) => cmd_segment(args, true),
        Command::Evaluate {
            input,
            output,
            models,
            levels,
            flags,
            micro,
        } => cmd_evaluate(input, output, models, levels, flags, *micro),
        Command::Report {
            input,
            output,
            flags,
            micro,
        } => cmd_report(input, output, flags, *micro),
        Command::Serve { input, bind, flags } => cmd_serve(input, bind, flags),
    }
}

/// Parses arguments, runs, and maps failures to exit codes: 1 for data
/// errors, 2 for usage errors.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violations(_)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn list_flags_split_on_commas() {
        let cli = Cli::try_parse_from([
            "numorph", "evaluate", "--input", "x.tsv", "--models", "affix,mdl", "--levels", "u",
        ])
        .unwrap();
        let Command::Evaluate { models, levels, .. } = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(models, [ModelKind::Affix, ModelKind::Mdl]);
        assert_eq!(levels, [Level::Underlying]);
    }

    #[test]
    fn bad_values_are_usage_errors() {
        for argv in [
            &["numorph", "segment", "--input", "x", "--model", "nope"][..],
            &["numorph", "stats"],
            &["numorph", "tokenize", "--input", "x", "--model", "bpe", "--target-size", "big"],
        ] {
            let e = Cli::try_parse_from(argv).unwrap_err();
            assert_eq!(e.exit_code(), 2);
        }
    }

    #[test]
    fn model_family_mismatch_is_a_usage_error() {
        let cli = Cli::try_parse_from([
            "numorph", "tokenize", "--input", "missing.tsv", "--model", "affix",
        ])
        .unwrap();
        assert_eq!(run(cli).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn missing_file_is_a_data_error() {
        let cli = Cli::try_parse_from(["numorph", "validate", "--input", "/nonexistent.tsv"]).unwrap();
        let e = run(cli).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(matches!(e, CliError::Session(_)));
    }
}

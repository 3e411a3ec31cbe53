mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alphaforge_core::backtest::{alpha_to_weights, compute_stats, simulate, AlphaStats};
use alphaforge_core::corpus::{self, compile_source, AlphaDef};
use alphaforge_core::data::{generate_synthetic, load_market_csv, IngestOptions};
use alphaforge_core::eval::{evaluate_corpus, EvalConfig, EvalError};
use alphaforge_core::report::{
    render_text_report, write_corr_csv, write_regressions_csv, write_stats_csv, write_values_csv,
    AnalysisReport, StatsRow,
};
use alphaforge_core::{IndustryLevel, MarketData};
use clap::{Parser, Subcommand};
use thiserror::Error;

use manifest::{AlphaSelection, DataSource, RunManifest, SyntheticSpec};

/// Environment variable bounding the worker pool size.
const THREADS_ENV: &str = "ALPHAFORGE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "alphaforge", version, about = "Evaluate and backtest formulaic alphas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate every expression in an alpha source file.
    Validate { file: PathBuf },
    /// Evaluate alphas, backtest them and write statistics and reports.
    Run(RunArgs),
    /// Write the built-in 101-alpha corpus in source-file format.
    ExportCorpus {
        /// Destination file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List each corpus alpha's inputs, industry levels and lookback.
    Deps,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Daily bar CSV file.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    data: Option<PathBuf>,
    /// Synthetic market: seed=S,days=D,assets=N[,groups=G].
    #[arg(long)]
    synthetic: Option<String>,
    /// `all`, comma-separated ids, or an alpha source file.
    #[arg(long, visible_alias = "corpus", default_value = "all")]
    alphas: String,
    /// Constant book size in currency.
    #[arg(long, default_value_t = 1e6)]
    book: f64,
    /// Output directory.
    #[arg(long, default_value = "alphaforge-out")]
    out: PathBuf,
    /// Also write each alpha's value panel.
    #[arg(long)]
    emit_values: bool,
    /// Neutralize at this level regardless of what the formulas request.
    #[arg(long)]
    industry_level: Option<IndustryLevel>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the validation exit code.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Run(args) => manifest_from(args).and_then(|m| with_pool(|| cmd_run(&m))),
        Command::ExportCorpus { out } => cmd_export(out.as_deref()),
        Command::Deps => cmd_deps(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn with_pool<T: Send>(f: impl FnOnce() -> Result<T, CliError> + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))
            })?;
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn cmd_validate(file: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(file)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", file.display())))?;
    let entries = compile_source(&text).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut stdout = io::stdout().lock();
    let mut failures = 0;
    for (entry, compiled) in &entries {
        let label = entry.id.map_or_else(String::new, |id| format!(" Alpha#{id}"));
        let line = match compiled {
            Ok(v) => format!("line {}{label}: OK (lookback {})", entry.line, v.max_lookback),
            Err(e) => {
                failures += 1;
                format!("line {}{label}: {e}", entry.line)
            }
        };
        let _ = writeln!(stdout, "{line}");
    }
    let _ = writeln!(stdout, "{} of {} expressions valid", entries.len() - failures, entries.len());
    if failures > 0 {
        return Err(CliError::Validation(format!("{failures} invalid expression(s)")));
    }
    Ok(())
}

fn cmd_export(out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, corpus::CORPUS_SOURCE)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(corpus::CORPUS_SOURCE.as_bytes())
            .map_err(|e| CliError::Internal(e.to_string())),
    }
}

fn cmd_deps() -> Result<(), CliError> {
    let mut stdout = io::stdout().lock();
    let _ = writeln!(stdout, "id\tdelay\tlookback\tinputs\tindustry_levels");
    for row in corpus::corpus_dependency_report() {
        let join = |items: Vec<String>| if items.is_empty() { "-".into() } else { items.join(",") };
        let _ = writeln!(
            stdout,
            "{}\t{}\t{}\t{}\t{}",
            row.id,
            row.delay_class,
            row.max_lookback,
            join(row.inputs.iter().map(ToString::to_string).collect()),
            join(row.industry_levels.iter().map(ToString::to_string).collect()),
        );
    }
    Ok(())
}

fn manifest_from(args: RunArgs) -> Result<RunManifest, CliError> {
    let data = match (args.data, args.synthetic) {
        (Some(path), None) => DataSource::Csv(path),
        (None, Some(spec)) => DataSource::Synthetic(
            spec.parse::<SyntheticSpec>()
                .map_err(|e| CliError::Validation(format!("--synthetic: {e}")))?,
        ),
        _ => {
            return Err(CliError::Validation(
                "specify exactly one of --data or --synthetic".into(),
            ))
        }
    };
    if !(args.book > 0.0 && args.book.is_finite()) {
        return Err(CliError::Validation(format!(
            "--book must be positive, got {}",
            args.book
        )));
    }
    Ok(RunManifest {
        data,
        alphas: AlphaSelection::parse(&args.alphas)?,
        book_size: args.book,
        out_dir: args.out,
        emit_values: args.emit_values,
        industry_level: args.industry_level,
    })
}

fn load_market(source: &DataSource) -> Result<MarketData, CliError> {
    match source {
        DataSource::Csv(path) => load_market_csv(path, &IngestOptions::default())
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        DataSource::Synthetic(s) => generate_synthetic(s.seed, s.days, s.assets, s.groups)
            .map_err(|e| CliError::Data(e.to_string())),
    }
}

fn select_alphas(selection: &AlphaSelection) -> Result<Vec<AlphaDef>, CliError> {
    Ok(match selection {
        AlphaSelection::All => corpus::load_corpus(),
        AlphaSelection::Ids(ids) => corpus::load_corpus()
            .into_iter()
            .filter(|d| ids.contains(&d.id))
            .collect(),
        AlphaSelection::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
            corpus::defs_from_source(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        }
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<(), io::Error>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(buf)
}

fn cmd_run(manifest: &RunManifest) -> Result<(), CliError> {
    let market = load_market(&manifest.data)?;
    let defs = select_alphas(&manifest.alphas)?;
    let config = EvalConfig {
        industry_level_override: manifest.industry_level,
        ..EvalConfig::default()
    };
    let evaluated = evaluate_corpus(&defs, &market, &config);

    fs::create_dir_all(&manifest.out_dir).map_err(|e| {
        CliError::Data(format!("cannot create {}: {e}", manifest.out_dir.display()))
    })?;
    if manifest.emit_values {
        fs::create_dir_all(manifest.out_dir.join("values"))
            .map_err(|e| CliError::Data(e.to_string()))?;
    }

    let mut rows = Vec::new();
    let mut daily_returns = BTreeMap::new();
    let mut worst: Option<CliError> = None;
    let mut note = |err: CliError| {
        eprintln!("{err}");
        let replace = worst.as_ref().is_none_or(|w| err.exit_code() > w.exit_code());
        if replace {
            worst = Some(err);
        }
    };
    for def in &defs {
        let report = match &evaluated[&def.id] {
            Ok(r) => r,
            Err(e) => {
                let msg = format!("Alpha#{}: {e}", def.id);
                note(match e {
                    EvalError::Internal(_) | EvalError::Kernel(_) => CliError::Internal(msg),
                    _ => CliError::Data(msg),
                });
                continue;
            }
        };
        if manifest.emit_values {
            let bytes = csv_bytes(|buf| write_values_csv(buf, &report.values))?;
            write_file(
                &manifest.out_dir.join("values").join(format!("alpha_{:03}.csv", def.id)),
                &bytes,
            )?;
        }
        let weights = alpha_to_weights(&report.values);
        let sim = simulate(&weights, &market, def.delay_class, manifest.book_size)
            .map_err(|e| CliError::Internal(format!("Alpha#{}: {e}", def.id)))?;
        let stats = match compute_stats(&sim) {
            Ok(stats) => {
                daily_returns.insert(def.id, sim.daily_returns());
                stats
            }
            Err(e) => {
                log::warn!("Alpha#{}: statistics undefined: {e}", def.id);
                AlphaStats::undefined()
            }
        };
        rows.push(StatsRow {
            id: def.id,
            delay: def.delay_class,
            stats,
        });
    }

    let analysis = AnalysisReport::build(rows.clone(), &daily_returns);
    let out = &manifest.out_dir;
    write_file(&out.join("manifest.txt"), manifest.describe().as_bytes())?;
    write_file(&out.join("stats.csv"), &csv_bytes(|b| write_stats_csv(b, &rows))?)?;
    if let Some(psi) = &analysis.psi {
        write_file(&out.join("correlation.csv"), &csv_bytes(|b| write_corr_csv(b, psi))?)?;
    }
    write_file(&out.join("regressions.csv"), &csv_bytes(|b| write_regressions_csv(b, &analysis))?)?;
    write_file(&out.join("report.txt"), render_text_report(&analysis).as_bytes())?;
    println!(
        "{} of {} alphas backtested; outputs in {}",
        rows.len(),
        defs.len(),
        out.display()
    );
    match worst {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

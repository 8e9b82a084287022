//! Command-line front end: equivalence checking, cause classification,
//! repository tracing, and provenance manifests over Java source archives.
//!
//! Exit codes: 0 = equivalent / pass, 1 = non-equivalent / check failed,
//! 2 = usage or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use srceq::classify::classify_archive;
use srceq::config::HeuristicsConfig;
use srceq::equivalence::compare_archives;
use srceq::provenance::{check_manifest, emit_manifest, GeneratorHints, Manifest};
use srceq::report::{Report, ReportInput};
use srceq::source::{load_archive, SourceArchive};
use srceq::trace::{trace, TraceResult};

#[derive(Parser)]
#[command(
    name = "srceq",
    version,
    about = "Compare Java source archives modulo comments and formatting, explain differences, trace sources to a repository, and manage generator provenance manifests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two archives are source-equivalent.
    Equiv {
        /// First archive: a zip/jar of sources or a directory.
        a: PathBuf,
        /// Second archive.
        b: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Equivalence plus per-file cause classification.
    Classify {
        a: PathBuf,
        b: PathBuf,
        /// Repository checkout; enables commit-consistency evidence.
        #[arg(long)]
        repo: Option<PathBuf>,
        /// Heuristics overrides (key = value file).
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Trace archive classes to a repository checkout.
    Trace {
        archive: PathBuf,
        #[arg(long)]
        repo: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Emit or verify per-file provenance manifests.
    Provenance {
        #[command(subcommand)]
        action: ProvenanceAction,
    },
}

#[derive(Subcommand)]
enum ProvenanceAction {
    /// Write a manifest for an archive.
    Emit {
        archive: PathBuf,
        /// Manifest output path.
        #[arg(long)]
        out: PathBuf,
        /// Path-glob to generator-id hints file.
        #[arg(long)]
        hints: Option<PathBuf>,
        /// Repository checkout for origin detection.
        #[arg(long)]
        repo: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Verify an archive against a manifest.
    Check {
        archive: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonFlags {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Input labels as a=<name>,b=<name>.
    #[arg(long)]
    labels: Option<String>,
    /// Repository paths to skip (repeatable glob).
    #[arg(long)]
    exclude: Vec<String>,
    /// Include a wall-clock timestamp in the report (off by default so
    /// repeated runs are byte-identical).
    #[arg(long)]
    stamp: bool,
}

impl CommonFlags {
    fn label_pair(&self) -> Result<(String, String), String> {
        let (mut la, mut lb) = ("a".to_string(), "b".to_string());
        if let Some(arg) = &self.labels {
            for part in arg.split(',') {
                match part.split_once('=') {
                    Some(("a", v)) => la = v.to_string(),
                    Some(("b", v)) => lb = v.to_string(),
                    _ => {
                        return Err(format!(
                            "bad --labels entry {part:?}, expected a=NAME,b=NAME"
                        ))
                    }
                }
            }
        }
        Ok((la, lb))
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("srceq: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<u8, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Equiv { a, b, common } => cmd_equiv(&a, &b, &common),
        Command::Classify {
            a,
            b,
            repo,
            config,
            common,
        } => cmd_classify(&a, &b, repo.as_deref(), config.as_deref(), &common),
        Command::Trace {
            archive,
            repo,
            common,
        } => cmd_trace(&archive, &repo, &common),
        Command::Provenance { action } => match action {
            ProvenanceAction::Emit {
                archive,
                out,
                hints,
                repo,
                common,
            } => cmd_provenance_emit(&archive, &out, hints.as_deref(), repo.as_deref(), &common),
            ProvenanceAction::Check {
                archive,
                manifest,
                common,
            } => cmd_provenance_check(&archive, &manifest, &common),
        },
    }
}

fn load_labeled(path: &Path, label: &str) -> Result<SourceArchive, String> {
    load_archive(path, label).map_err(|e| e.to_string())
}

fn emit(report: Report, common: &CommonFlags) {
    let report = if common.stamp {
        report.stamped()
    } else {
        report
    };
    match common.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
}

fn inputs_for(a: &SourceArchive, b: Option<&SourceArchive>) -> Vec<ReportInput> {
    let mut v = vec![ReportInput {
        origin: a.origin.display().to_string(),
        label: a.label.clone(),
    }];
    if let Some(b) = b {
        v.push(ReportInput {
            origin: b.origin.display().to_string(),
            label: b.label.clone(),
        });
    }
    v
}

fn cmd_equiv(a: &Path, b: &Path, common: &CommonFlags) -> Result<u8, String> {
    let (la, lb) = common.label_pair()?;
    let archive_a = load_labeled(a, &la)?;
    let archive_b = load_labeled(b, &lb)?;
    let verdict = compare_archives(&archive_a, &archive_b);

    let mut report = Report::new("equiv", inputs_for(&archive_a, Some(&archive_b)))
        .with_archive_verdict(&verdict);
    report.warnings.extend(archive_a.warnings.iter().cloned());
    report.warnings.extend(archive_b.warnings.iter().cloned());
    let equivalent = verdict.equivalent;
    emit(report, common);
    Ok(u8::from(!equivalent))
}

fn cmd_classify(
    a: &Path,
    b: &Path,
    repo: Option<&Path>,
    config_path: Option<&Path>,
    common: &CommonFlags,
) -> Result<u8, String> {
    let (la, lb) = common.label_pair()?;
    let config = match config_path {
        Some(p) => HeuristicsConfig::load(p).map_err(|e| e.to_string())?,
        None => HeuristicsConfig::default(),
    };
    let archive_a = load_labeled(a, &la)?;
    let archive_b = load_labeled(b, &lb)?;
    let verdict = compare_archives(&archive_a, &archive_b);

    let trace_result: Option<TraceResult> = match repo {
        Some(root) => Some(trace(&archive_a, root, &common.exclude).map_err(|e| e.to_string())?),
        None => None,
    };
    let causes = classify_archive(
        &verdict,
        &archive_a,
        &archive_b,
        trace_result.as_ref(),
        &config,
    );

    let mut report = Report::new("classify", inputs_for(&archive_a, Some(&archive_b)))
        .with_archive_verdict(&verdict)
        .with_causes(&causes);
    if let Some(t) = &trace_result {
        report = report.with_trace(t);
    }
    report.warnings.extend(archive_a.warnings.iter().cloned());
    report.warnings.extend(archive_b.warnings.iter().cloned());
    let equivalent = verdict.equivalent;
    emit(report, common);
    Ok(u8::from(!equivalent))
}

fn cmd_trace(archive: &Path, repo: &Path, common: &CommonFlags) -> Result<u8, String> {
    let (la, _) = common.label_pair()?;
    let archive = load_labeled(archive, &la)?;
    let result = trace(&archive, repo, &common.exclude).map_err(|e| e.to_string())?;

    let mut report = Report::new("trace", inputs_for(&archive, None)).with_trace(&result);
    report.warnings.extend(archive.warnings.iter().cloned());
    emit(report, common);
    Ok(0)
}

fn cmd_provenance_emit(
    archive_path: &Path,
    out: &Path,
    hints: Option<&Path>,
    repo: Option<&Path>,
    common: &CommonFlags,
) -> Result<u8, String> {
    let (la, _) = common.label_pair()?;
    let archive = load_labeled(archive_path, &la)?;
    let hints = match hints {
        Some(p) => GeneratorHints::load(p).map_err(|e| e.to_string())?,
        None => GeneratorHints::default(),
    };
    let trace_result = match repo {
        Some(root) => Some(trace(&archive, root, &common.exclude).map_err(|e| e.to_string())?),
        None => None,
    };
    let manifest =
        emit_manifest(&archive, trace_result.as_ref(), &hints).map_err(|e| e.to_string())?;
    std::fs::write(out, manifest.to_json())
        .map_err(|e| format!("cannot write {}: {e}", out.display()))?;

    let mut report =
        Report::new("provenance-emit", inputs_for(&archive, None)).with_provenance(&manifest);
    if let Some(t) = &trace_result {
        report = report.with_trace(t);
    }
    report.warnings.extend(archive.warnings.iter().cloned());
    emit(report, common);
    Ok(0)
}

fn cmd_provenance_check(
    archive_path: &Path,
    manifest_path: &Path,
    common: &CommonFlags,
) -> Result<u8, String> {
    let (la, _) = common.label_pair()?;
    let archive = load_labeled(archive_path, &la)?;
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| format!("cannot read {}: {e}", manifest_path.display()))?;
    let manifest = Manifest::parse(&text).map_err(|e| e.to_string())?;
    let result = check_manifest(&archive, &manifest);

    let report = Report::new("provenance-check", inputs_for(&archive, None)).with_check(&result);
    let pass = result.pass;
    emit(report, common);
    Ok(u8::from(!pass))
}

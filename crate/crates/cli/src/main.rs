//! `plgb`: load geometry specs, run identity checks, induce bundle bases.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails, 2 on
//! input or usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use plgb_core::spec::base_spec;
use plgb_core::{run_checks, CheckOptions, Format, Geometry, Selection};

#[derive(Parser)]
#[command(name = "plgb", version, about = "Exact checks for Poisson principal bundle data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity checks on a spec.
    Check {
        spec: PathBuf,
        /// Comma-separated check ids, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Largest monomial degree in random instances and corpora.
        #[arg(long, default_value_t = 4)]
        degree_bound: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record per-check wall time in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Induce the base of a bundle spec and write it as a new spec.
    Induce {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Spec whose action on the total space is pushed down to the base.
        #[arg(long)]
        action: Option<PathBuf>,
    },
    /// Load a spec and run its load-time validation only.
    Validate { spec: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Geometry> {
    Geometry::load(path).with_context(|| format!("loading {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check {
            spec,
            checks,
            degree_bound,
            seed,
            format,
            out,
            timings,
        } => {
            let selection = Selection::parse(&checks)?;
            let g = load(&spec)?;
            let opts = CheckOptions {
                selection,
                degree_bound,
                seed,
                timings,
            };
            let report = run_checks(&g, &opts)?;
            let format = match format {
                OutputFormat::Text => Format::Text,
                OutputFormat::Json => Format::Json,
            };
            write_out(out.as_deref(), &report.emit(format))?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Induce { spec, out, action } => {
            let g = load(&spec)?;
            let base = g.induce_base()?;
            let emitted = match action {
                None => base_spec(&base, None),
                Some(path) => {
                    let source = load(&path)?;
                    let fibre = source.require_fibre()?;
                    let descended = base.descend_action(g.manifold(), source.require_action()?)?;
                    base_spec(&base, Some((fibre, source.xi(), &descended)))
                }
            };
            let mut emitted = emitted;
            emitted.name = Some(format!("{} base", g.name()));
            let text = emitted.to_json();
            Geometry::from_spec(emitted).context("induced base spec does not reload")?;
            write_out(Some(&out), &text)?;
            Ok(0)
        }
        Command::Validate { spec } => {
            let g = load(&spec)?;
            let m = g.manifold();
            println!(
                "{}: valid ({} generators, {} frame elements{})",
                spec.display(),
                m.ring().declared(),
                m.frame().dim(),
                g.fibre()
                    .map(|l| format!(", {} fibre basis elements", l.dim()))
                    .unwrap_or_default()
            );
            Ok(0)
        }
    }
}

//! The `prymscope` command line.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{analyze, Analysis, AnalysisOptions};
use crate::canonical::SymmetryLevel;
use crate::catalog::{CatalogRecord, Job, JobOutcome};
use crate::certify::BoundMode;
use crate::cover::CoverMatrix;
use crate::error::{Error, Result};
use crate::residue::ResidueVector;
use crate::search::SearchSpec;
use crate::verify::{run_suite, Suite, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "prymscope", version, about = "Prym families of abelian covers of the line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Unitary,
    Symplectic,
}

impl From<ModeArg> for BoundMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Unitary => BoundMode::UnitaryOnly,
            ModeArg::Symplectic => BoundMode::WithSymplectic,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SymmetryArg {
    Full,
    Hash,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SuiteArg {
    Trichotomy,
    CyclicSums,
    AbelianThm,
    Invariants,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analyze one cover matrix and involution.
    Analyze {
        #[arg(long)]
        modulus: u32,
        /// Rows separated by `;`, entries by `,`; or `@path` to a file.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Comma-separated residues.
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long)]
        strict_etale: bool,
        #[arg(long, value_enum, default_value = "unitary")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Enumerate all data within bounds and write a catalog.
    Enumerate {
        #[arg(long)]
        modulus: u32,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols_min: usize,
        #[arg(long)]
        cols_max: usize,
        #[arg(long)]
        strict_etale: bool,
        #[arg(long, value_enum, default_value = "unitary")]
        mode: ModeArg,
        #[arg(long, env = "PRYMSCOPE_WORKERS", default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value = "full")]
        symmetry: SymmetryArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        resume: bool,
    },
    /// Check the non-specialness results against the certifier.
    VerifyPaper {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, env = "PRYMSCOPE_WORKERS", default_value_t = 1)]
        workers: usize,
    },
}

/// Parses a matrix given as `r;r;...` with comma-separated entries.
/// Whitespace is ignored. Entries must already be residues mod `modulus`.
pub fn parse_matrix(modulus: u32, spec: &str) -> Result<CoverMatrix> {
    let text = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?,
        None => spec.to_string(),
    };
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.strip_suffix(';').unwrap_or(&compact);
    if compact.is_empty() {
        return Err(Error::Syntax("empty matrix".into()));
    }
    let rows = compact
        .split(';')
        .map(|row| parse_residues(modulus, row))
        .collect::<Result<Vec<_>>>()?;
    CoverMatrix::from_rows(modulus, &rows)
}

fn parse_residues(modulus: u32, csv: &str) -> Result<Vec<u32>> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    csv.split(',')
        .map(|t| {
            let t = t.trim();
            let v: i64 = t.parse().map_err(|_| Error::Syntax(format!("not an integer: {t:?}")))?;
            if v < 0 || v >= modulus as i64 {
                return Err(Error::EntryOutOfRange { entry: v, modulus });
            }
            Ok(v as u32)
        })
        .collect()
}

pub fn parse_sigma(modulus: u32, csv: &str) -> Result<ResidueVector> {
    ResidueVector::new(modulus, parse_residues(modulus, csv)?)
}

/// Human-readable summary of an analysis.
pub fn summary(a: &Analysis) -> String {
    let m = a.cover.matrix();
    let dec = &a.decomposition;
    let cert = &a.certificate;
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("cover      {m} over Z/{}", m.modulus()));
    line(format!("degree     {}", a.cover.degree()));
    line(format!("genus      {}", a.cover.genus()));
    let dims: Vec<String> = a.cover.characters().iter().map(|c| format!("{}:{}", c.alpha, c.dim)).collect();
    line(format!("characters {}", dims.join(" ")));
    line(format!("sigma      {} ({}, {} fixed points)", dec.datum.sigma, dec.datum.ramification, dec.datum.fixed_points));
    line(format!("prym dim   {}", dec.prym_dim));
    line(format!("quotient   genus {}", dec.quotient_genus));
    for t in &dec.types {
        let sd = if t.self_dual { " self-dual" } else { "" };
        line(format!("minus type {{{},{}}}{sd} zeros {} x{}", t.a, t.b, t.zeros, t.multiplicity));
    }
    line(format!(
        "bounds     unitary {}, with symplectic {}, family dimension {}",
        cert.bound_unitary, cert.bound_with_symplectic, cert.family_dim
    ));
    line(format!("verdict    {} ({} mode)", cert.verdict, cert.mode.as_str()));
    line(format!(
        "checks     trichotomy {}, cyclic sums {}, abelian {}",
        a.trichotomy.branch.map_or("not applicable", |b| b.as_str()),
        if a.cyclic_sums.applicable { "applicable" } else { "not applicable" },
        if a.abelian.applicable { "applicable" } else { "not applicable" },
    ));
    line(format!("key        {}", a.key));
    out
}

/// `3` for invariant violations, `2` for every other error.
pub fn exit_code(e: &Error) -> u8 {
    if e.is_internal() {
        3
    } else {
        2
    }
}

/// Runs a parsed command line, writing to the given streams.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode {
    let result = match cli.command {
        Command::Analyze { modulus, matrix, sigma, strict_etale, mode, format } => (|| {
            let a = parse_matrix(modulus, &matrix)?;
            let sigma = parse_sigma(modulus, &sigma)?;
            let options = AnalysisOptions { strict_etale, mode: mode.into(), symmetry: SymmetryLevel::Full };
            let report = analyze(a, &sigma, options)?;
            let text = match format {
                FormatArg::Json => CatalogRecord::from_analysis(&report).to_line() + "\n",
                FormatArg::Text => summary(&report),
            };
            stdout.write_all(text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Enumerate {
            modulus,
            rows,
            cols_min,
            cols_max,
            strict_etale,
            mode,
            workers,
            symmetry,
            out,
            resume,
        } => (|| {
            let spec = SearchSpec {
                modulus,
                rows,
                cols_min,
                cols_max,
                strict_etale,
                mode: mode.into(),
                workers,
                symmetry: match symmetry {
                    SymmetryArg::Full => SymmetryLevel::Full,
                    SymmetryArg::Hash => SymmetryLevel::InvariantHash,
                },
            };
            let job = Job { spec, out: out.as_deref(), resume, shard_budget: None };
            match job.run(&mut *stdout)? {
                JobOutcome::Complete(footer) => {
                    if out.is_some() {
                        writeln!(stderr, "{} covers, {} records, sha256 {}", footer.covers, footer.records, footer.sha256)?;
                    }
                }
                JobOutcome::Suspended { .. } => unreachable!("no shard budget was set"),
            }
            Ok(ExitCode::SUCCESS)
        })(),
        Command::VerifyPaper { suite, samples, seed, workers } => (|| {
            let suites: Vec<Suite> = match suite {
                SuiteArg::Trichotomy => vec![Suite::Trichotomy],
                SuiteArg::CyclicSums => vec![Suite::CyclicSums],
                SuiteArg::AbelianThm => vec![Suite::AbelianThm],
                SuiteArg::Invariants => vec![Suite::Invariants],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let config = VerifyConfig { samples, seed, workers: workers.max(1), ..VerifyConfig::default() };
            let mut ok = true;
            for s in suites {
                let report = run_suite(s, &config)?;
                write!(stdout, "{report}")?;
                ok &= report.passed();
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        })(),
    };
    result.unwrap_or_else(|e: Error| {
        let _ = stdout.flush();
        let _ = writeln!(stderr, "error[{}]: {e}", e.code());
        ExitCode::from(exit_code(&e))
    })
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(cli, &mut stdout.lock(), &mut stderr.lock())
}

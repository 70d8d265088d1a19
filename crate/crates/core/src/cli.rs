//! Command-line surface: `validate`, `query` and `explain`.
//!
//! Results go to standard output, diagnostics to standard error. Every
//! command ends with one of the [`ExitStatus`] codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::adaptation::adaptation_measure;
use crate::case_model::{Case, CaseBase};
use crate::codec::{decode_case_base, decode_target, encode_outcome, DecodeError};
use crate::error::Error;
use crate::measures::{retrieval_measure, ScoringContext, ScoringMode};
use crate::pipeline::{diagnose_with_mode, prepare_target, retrieval_outcome, DiagnosisOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// Validation or domain error.
    Invalid = 1,
    /// I/O or syntax error.
    Io = 2,
    /// Missing profile, unknown mode or format.
    Configuration = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Machine,
    Table,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "machine" => Ok(OutputFormat::Machine),
            "table" => Ok(OutputFormat::Table),
            other => Err(format!(
                "unknown output format `{other}` (expected table|machine)"
            )),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cbr-diag",
    version,
    about = "Case-based fault diagnosis under imperfect knowledge"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a case-base document and list every violation.
    Validate {
        #[arg(long = "case-base")]
        case_base: PathBuf,
    },
    /// Rank source cases for a target, optionally refining by adaptation.
    Query {
        #[arg(long = "case-base")]
        case_base: PathBuf,
        /// Case id inside the case base, or path to a target document.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value = "enhanced")]
        mode: String,
        #[arg(long = "top-k", default_value = "3")]
        top_k: NonZeroUsize,
        #[arg(long)]
        adapt: bool,
        #[arg(long, default_value = "machine")]
        format: String,
    },
    /// Per-descriptor breakdown of both measures for one source case.
    Explain {
        #[arg(long = "case-base")]
        case_base: PathBuf,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        source: String,
        #[arg(long, default_value = "enhanced")]
        mode: String,
        #[arg(long, default_value = "machine")]
        format: String,
    },
}

struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<DecodeError> for Failure {
    fn from(e: DecodeError) -> Self {
        let status = match e {
            DecodeError::Syntax { .. } => ExitStatus::Io,
            DecodeError::Version(_) | DecodeError::Invalid(_) => ExitStatus::Invalid,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_configuration() {
            ExitStatus::Configuration
        } else {
            ExitStatus::Invalid
        };
        Failure::new(status, e.to_string())
    }
}

type CmdResult = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::new(
            ExitStatus::Io,
            format!("cannot read {}: {e}", path.display()),
        )
    })
}

fn load_case_base(path: &Path) -> Result<CaseBase, Failure> {
    Ok(decode_case_base(&read(path)?)?)
}

fn resolve_target(case_base: &CaseBase, target: Option<&str>) -> Result<Case, Failure> {
    match target {
        None => {
            let mut targets = case_base.targets();
            match (targets.next(), targets.next()) {
                (Some(t), None) => Ok(t.clone()),
                _ => Err(Failure::new(
                    ExitStatus::Invalid,
                    "case base does not hold exactly one target case; pass --target",
                )),
            }
        }
        Some(id) => {
            if let Some(case) = case_base.case(id) {
                return Ok(case.clone());
            }
            let path = Path::new(id);
            if path.is_file() {
                return Ok(decode_target(&read(path)?, case_base)?);
            }
            Err(Failure::new(
                ExitStatus::Invalid,
                format!("unknown target `{id}`: not a case id and not a readable file"),
            ))
        }
    }
}

fn parse_mode(mode: &str) -> Result<ScoringMode, Failure> {
    mode.parse()
        .map_err(|m: String| Failure::new(ExitStatus::Configuration, m))
}

fn parse_format(format: &str) -> Result<OutputFormat, Failure> {
    format
        .parse()
        .map_err(|m: String| Failure::new(ExitStatus::Configuration, m))
}

fn cmd_validate(path: &Path) -> CmdResult {
    let cb = load_case_base(path)?;
    Ok(format!(
        "OK: {} source case(s), {} target case(s), {} taxonomy node(s), {} fuzzy profile(s)\n",
        cb.sources().count(),
        cb.targets().count(),
        cb.taxonomy().len(),
        cb.profiles().len()
    ))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

fn outcome_table(outcome: &DiagnosisOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode: {}", outcome.mode.as_str());
    for c in &outcome.corrections_applied {
        let _ = writeln!(
            s,
            "corrected {}: {} -> {}",
            c.descriptor_id, c.original, c.corrected
        );
    }
    let _ = writeln!(s, "{:<6}{:<16}{:>12}{:>12}", "rank", "case", "M_R", "M_A");
    for (i, r) in outcome.ranking.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:<6}{:<16}{:>12}{:>12}",
            i + 1,
            r.case_id,
            r.m_r,
            fmt_opt(r.m_a)
        );
    }
    match &outcome.selected_case_id {
        Some(id) => {
            let _ = write!(s, "selected: {id}");
            if let Some(sol) = &outcome.solution {
                let _ = write!(
                    s,
                    " (failing component: {}; action: {})",
                    sol.failing_component, sol.action
                );
            }
            s.push('\n');
        }
        None => s.push_str("selected: none\n"),
    }
    s
}

fn cmd_query(
    path: &Path,
    target: Option<&str>,
    mode: &str,
    top_k: NonZeroUsize,
    adapt: bool,
    format: &str,
) -> CmdResult {
    let mode = parse_mode(mode)?;
    let format = parse_format(format)?;
    let cb = load_case_base(path)?;
    let target = resolve_target(&cb, target)?;
    let outcome = if adapt {
        diagnose_with_mode(&target, &cb, mode, top_k)?
    } else {
        retrieval_outcome(&target, &cb, mode, top_k)?
    };
    Ok(match format {
        OutputFormat::Machine => encode_outcome(&outcome),
        OutputFormat::Table => outcome_table(&outcome),
    })
}

fn cmd_explain(
    path: &Path,
    target: Option<&str>,
    source_id: &str,
    mode: &str,
    format: &str,
) -> CmdResult {
    let mode = parse_mode(mode)?;
    let format = parse_format(format)?;
    let cb = load_case_base(path)?;
    let target = resolve_target(&cb, target)?;
    let source = cb.case(source_id).ok_or_else(|| {
        Failure::new(
            ExitStatus::Invalid,
            format!("unknown source case `{source_id}`"),
        )
    })?;
    let prepared = match mode {
        ScoringMode::Enhanced => prepare_target(&target, cb.profiles())?.0,
        ScoringMode::Typical => target.clone(),
    };
    let ctx = ScoringContext::new(cb.taxonomy(), cb.profiles(), mode);
    let retrieval = retrieval_measure(&prepared, source, &ctx)?;
    let adaptation = adaptation_measure(&prepared, source, cb.taxonomy(), cb.profiles())?;

    let mut r_rows = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    for l in &retrieval.breakdown {
        num += l.product;
        den += l.phi_presence;
        r_rows.push((l, num, den));
    }
    let r_total = if den == 0.0 { 0.0 } else { num / den };

    let mut a_rows = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    for t in &adaptation.breakdown {
        num += t.weighted;
        den += t.phi_presence;
        a_rows.push((t, num, den));
    }
    let a_total = if den == 0.0 { 0.0 } else { num / den };

    Ok(match format {
        OutputFormat::Machine => {
            let value = json!({
                "target_id": target.id,
                "source_id": source.id,
                "mode": mode.as_str(),
                "retrieval": {
                    "score": r_total,
                    "rows": r_rows.iter().map(|(l, n, d)| json!({
                        "descriptor_id": l.descriptor_id,
                        "phi_value": l.phi_value,
                        "phi_state": l.phi_state,
                        "phi_presence": l.phi_presence,
                        "phi_om": l.phi_om,
                        "product": l.product,
                        "running_product": n,
                        "running_presence": d,
                    })).collect::<Vec<_>>(),
                },
                "adaptation": {
                    "score": a_total,
                    "rows": a_rows.iter().map(|(t, n, d)| json!({
                        "descriptor_id": t.descriptor_id,
                        "lambda": t.lambda,
                        "phi_presence": t.phi_presence,
                        "phi_value": t.phi_value,
                        "weighted": t.weighted,
                        "running_weighted": n,
                        "running_presence": d,
                    })).collect::<Vec<_>>(),
                },
            });
            let mut text = serde_json::to_string_pretty(&value).expect("json values serialize");
            text.push('\n');
            text
        }
        OutputFormat::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "{} vs {} ({})", target.id, source.id, mode.as_str());
            let _ = writeln!(s, "\nretrieval measure");
            let _ = writeln!(
                s,
                "{:<12}{:>10}{:>8}{:>10}{:>6}{:>10}{:>12}{:>12}",
                "descriptor",
                "value",
                "state",
                "presence",
                "O.M",
                "product",
                "sum prod",
                "sum pres"
            );
            for (l, n, d) in &r_rows {
                let _ = writeln!(
                    s,
                    "{:<12}{:>10}{:>8}{:>10}{:>6}{:>10}{:>12}{:>12}",
                    l.descriptor_id,
                    l.phi_value,
                    l.phi_state,
                    l.phi_presence,
                    l.phi_om,
                    l.product,
                    n,
                    d
                );
            }
            let _ = writeln!(s, "M_R = {r_total}");
            let _ = writeln!(s, "\nadaptation measure");
            let _ = writeln!(
                s,
                "{:<12}{:>8}{:>10}{:>10}{:>10}{:>12}{:>12}",
                "descriptor", "lambda", "presence", "value", "weighted", "sum wt", "sum pres"
            );
            for (t, n, d) in &a_rows {
                let _ = writeln!(
                    s,
                    "{:<12}{:>8}{:>10}{:>10}{:>10}{:>12}{:>12}",
                    t.descriptor_id, t.lambda, t.phi_presence, t.phi_value, t.weighted, n, d
                );
            }
            let _ = writeln!(s, "M_A = {a_total}");
            s
        }
    })
}

/// Run the command line with the given arguments (including the program
/// name) and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if help {
                let _ = write!(out, "{e}");
                return ExitStatus::Success;
            }
            let _ = write!(err, "{e}");
            return ExitStatus::Io;
        }
    };
    let result = match &cli.command {
        Command::Validate { case_base } => cmd_validate(case_base),
        Command::Query {
            case_base,
            target,
            mode,
            top_k,
            adapt,
            format,
        } => cmd_query(case_base, target.as_deref(), mode, *top_k, *adapt, format),
        Command::Explain {
            case_base,
            target,
            source,
            mode,
            format,
        } => cmd_explain(case_base, target.as_deref(), source, mode, format),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            ExitStatus::Success
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.status
        }
    }
}

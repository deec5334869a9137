// SPDX-License-Identifier: Apache-2.0

//! `olive`: batch checks over the olive-core constructions.
//!
//! Every subcommand prints one JSON report to standard output. The exit
//! code is 0 when every contract checked by the run holds, 1 when one
//! fails and 2 for usage errors. Reports depend only on the flags and the
//! seed; `OLIVE_THREADS` caps the worker pool without changing output.

mod commands;
mod oracle;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use olive_core::SigmaVariant;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "olive", version, about = "Finite checks for the olive property of groups and relational classes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// The word used as sigma*: repaired, paper-literal or raw-printed.
    #[arg(long, global = true, default_value = "repaired", value_parser = parse_variant)]
    pub variant: SigmaVariant,
    /// Tuple width of the tiered group.
    #[arg(long, global = true, default_value_t = 6)]
    pub m: usize,
    /// Which model of the tiered group to compute in.
    #[arg(long, global = true, value_enum, default_value_t = ModelKind::Truncated)]
    pub model: ModelKind,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Units of a truncated free algebra over F2 (a genuine group).
    Truncated,
    /// The printed three-level presentation with its collection product.
    Printed,
}

fn parse_variant(s: &str) -> Result<SigmaVariant, String> {
    s.parse().map_err(|e: olive_core::words::UnknownVariant| e.to_string())
}

/// eta as given on the command line; a newtype so clap takes the list as
/// one value.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Eta(pub Vec<u8>);

fn parse_eta(s: &str) -> Result<Eta, String> {
    s.split(',').map(|t| t.trim().parse::<u8>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>().map(Eta)
}

fn parse_k(s: &str) -> Result<[usize; 2], String> {
    let v: Vec<usize> =
        s.split(',').map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "k takes exactly two values, e.g. 2,2".to_owned())
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SigArgs {
    /// eta as comma-separated 0/1 values.
    #[arg(long, default_value = "0,1,0,1", value_parser = parse_eta)]
    pub eta: Eta,
    /// k_0,k_1.
    #[arg(long, default_value = "2,2", value_parser = parse_k)]
    pub k: [usize; 2],
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Vanishing certificates and a non-vanishing witness for sigma*, and its
    /// two values in K2.
    SigmaCheck {
        /// Degree of the symmetric group searched for a witness.
        #[arg(long, default_value_t = 4)]
        degree: usize,
    },
    /// Closure size, defining relations and associativity of both models.
    KgroupSelftest {
        /// Use the toy parameters (three generators per level).
        #[arg(long)]
        toy: bool,
        /// Associativity samples for the printed model.
        #[arg(long)]
        samples: Option<u64>,
        /// Associativity samples for the truncated model.
        #[arg(long)]
        consistent_samples: Option<u64>,
    },
    /// Checks pi_s for every s in S* and rejects the excluded pair.
    PartialIsoCheck {
        /// Random products per map.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Builds and verifies conjugators on the toy K2 for every toy partial
    /// isomorphism.
    ToyConjugator {
        /// Random products per map in the preliminary check.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Builds the witness families and verifies clause (b) and the forbidden
    /// configuration on every ladder of length lambda.
    WitnessVerify {
        #[arg(long)]
        lambda: usize,
        /// All ladders of length lambda.
        #[arg(long, conflicts_with = "count", required_unless_present = "count")]
        exhaustive: bool,
        /// Number of seeded random ladders.
        #[arg(long)]
        count: Option<u64>,
    },
    /// Certifies the inequalities of G5 by free retractions and checks the
    /// maps F_beta.
    G5NegativeCheck {
        /// Every ladder of length at most this.
        #[arg(long, default_value_t = 6)]
        lambda_max: usize,
        /// Additional seeded ladders.
        #[arg(long, default_value_t = 0)]
        count: u64,
        /// Maximum length of the seeded ladders.
        #[arg(long, default_value_t = 12)]
        seeded_lambda_max: usize,
    },
    /// The symbolic certificate, planted random search in small groups, and
    /// optionally a scan of the witness families.
    ForbiddenScan {
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Also scan the families of every ladder of this length.
        #[arg(long)]
        lambda: Option<usize>,
    },
    /// Every ladder up to lambda-max: clause (b) and omission of N*.
    RelationalOlive {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, default_value_t = 5)]
        lambda_max: usize,
    },
    /// Prints N* for the signature.
    NstarBuild {
        #[command(flatten)]
        sig: SigArgs,
    },
    /// Embedding oracle agreement, unions and four-cycle amalgams on random
    /// instances.
    AmalgamCheck {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, default_value_t = 500)]
        oracle_pairs: u64,
        #[arg(long, default_value_t = 200)]
        unions: u64,
        #[arg(long, default_value_t = 200)]
        amalgams: u64,
    },
    /// Validates an expanded tree file and derives its flat structure.
    EtrValidate { file: PathBuf },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::SigmaCheck { .. } => "sigma-check",
            Cmd::KgroupSelftest { .. } => "kgroup-selftest",
            Cmd::PartialIsoCheck { .. } => "partial-iso-check",
            Cmd::ToyConjugator { .. } => "toy-conjugator",
            Cmd::WitnessVerify { .. } => "witness-verify",
            Cmd::G5NegativeCheck { .. } => "g5-negative-check",
            Cmd::ForbiddenScan { .. } => "forbidden-scan",
            Cmd::RelationalOlive { .. } => "relational-olive",
            Cmd::NstarBuild { .. } => "nstar-build",
            Cmd::AmalgamCheck { .. } => "amalgam-check",
            Cmd::EtrValidate { .. } => "etr-validate",
        }
    }
}

/// A finished run: the report body and whether every contract held.
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable input.
    Usage(String),
    /// A construction the run depends on failed.
    Contract(String),
}

pub type CmdResult = Result<Outcome, CliError>;

fn run(cmd: &Cmd, c: &Common) -> CmdResult {
    use commands::*;
    match cmd {
        Cmd::SigmaCheck { degree } => sigma_check(c, *degree),
        Cmd::KgroupSelftest { toy, samples, consistent_samples } => kgroup_selftest(c, *toy, *samples, *consistent_samples),
        Cmd::PartialIsoCheck { samples } => partial_iso_check(c, *samples),
        Cmd::ToyConjugator { samples } => toy_conjugator(c, *samples),
        Cmd::WitnessVerify { lambda, exhaustive, count } => witness_verify(c, *lambda, *exhaustive, *count),
        Cmd::G5NegativeCheck { lambda_max, count, seeded_lambda_max } => g5_negative(c, *lambda_max, *count, *seeded_lambda_max),
        Cmd::ForbiddenScan { samples, lambda } => forbidden_scan(c, *samples, *lambda),
        Cmd::RelationalOlive { sig, lambda_max } => relational_olive(sig, *lambda_max),
        Cmd::NstarBuild { sig } => nstar_build(sig),
        Cmd::AmalgamCheck { sig, oracle_pairs, unions, amalgams } => amalgam_check(c, sig, *oracle_pairs, *unions, *amalgams),
        Cmd::EtrValidate { file } => etr_validate(file),
    }
}

fn config(cmd: &Cmd) -> Value {
    match cmd {
        Cmd::SigmaCheck { degree } => json!({ "degree": degree }),
        Cmd::KgroupSelftest { toy, samples, consistent_samples } => {
            json!({ "toy": toy, "samples": samples, "consistent_samples": consistent_samples })
        }
        Cmd::PartialIsoCheck { samples } | Cmd::ToyConjugator { samples } => json!({ "samples": samples }),
        Cmd::WitnessVerify { lambda, exhaustive, count } => json!({ "lambda": lambda, "exhaustive": exhaustive, "count": count }),
        Cmd::G5NegativeCheck { lambda_max, count, seeded_lambda_max } => {
            json!({ "lambda_max": lambda_max, "count": count, "seeded_lambda_max": seeded_lambda_max })
        }
        Cmd::ForbiddenScan { samples, lambda } => json!({ "samples": samples, "lambda": lambda }),
        Cmd::RelationalOlive { sig, lambda_max } => json!({ "eta": sig.eta, "k": sig.k, "lambda_max": lambda_max }),
        Cmd::NstarBuild { sig } => json!({ "eta": sig.eta, "k": sig.k }),
        Cmd::AmalgamCheck { sig, oracle_pairs, unions, amalgams } => {
            json!({ "eta": sig.eta, "k": sig.k, "oracle_pairs": oracle_pairs, "unions": unions, "amalgams": amalgams })
        }
        Cmd::EtrValidate { file } => json!({ "file": file }),
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("OLIVE_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("OLIVE_THREADS must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn emit(text: &str, output: Option<&PathBuf>) -> std::io::Result<()> {
    match output {
        Some(p) => std::fs::write(p, format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": "usage", "message": msg }));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(CliError::Usage(m) | CliError::Contract(m)) = init_threads() {
        return usage(&m);
    }
    let (body, pass) = match run(&cli.cmd, &cli.common) {
        Ok(o) => (o.report, o.pass),
        Err(CliError::Usage(m)) => return usage(&m),
        Err(CliError::Contract(m)) => (json!({ "error": m }), false),
    };
    let envelope = json!({
        "command": cli.cmd.name(),
        "seed": cli.common.seed,
        "common": cli.common,
        "config": config(&cli.cmd),
        "pass": pass,
        "report": body,
    });
    let text = serde_json::to_string_pretty(&envelope).expect("reports serialise");
    if let Err(e) = emit(&text, cli.common.output.as_ref()) {
        return usage(&format!("cannot write report: {e}"));
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

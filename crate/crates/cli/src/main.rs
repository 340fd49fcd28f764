use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use ambigraph_core::classify::invariance_audit;
use ambigraph_core::diagram::{export_dot, partition_graph, Method};
use ambigraph_core::harness::{checked_partition, summarize_classes, TheoremCase, TheoremId};
use ambigraph_core::report::{
    AmbiguousReport, CfReport, CheckWordReport, CircuitReport, ClassifyReport, EquivalenceReport,
    OrbitsReport,
};
use ambigraph_core::words::check_word_fixes;
use ambigraph_core::{
    check_paper_examples, enumerate_ambiguous, parse_word, partition_cf, serialize_report, sweep,
    verify_case, Classifier, Element, Error, Format, Limits, Report,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

const EXIT_USAGE: u8 = 1;
const EXIT_ERRATA: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ambigraph",
    version,
    about = "Orbits of the modular group on ambiguous numbers of Q*(√n)"
)]
struct Cli {
    /// Refuse any n above this bound.
    #[arg(long, global = true, default_value = "100000000", value_parser = parse_big)]
    max_n: BigInt,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Output {
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long)]
    csv: bool,
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl Output {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Human
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Graph,
    Cf,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the ambiguous numbers of Q*(√n).
    Ambiguous {
        #[arg(value_parser = parse_big)]
        n: BigInt,
        /// Print only how many there are.
        #[arg(long)]
        count_only: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Partition the ambiguous numbers into orbits.
    Orbits {
        #[arg(value_parser = parse_big)]
        n: BigInt,
        #[arg(long, value_enum, default_value = "graph")]
        method: MethodArg,
        #[command(flatten)]
        out: Output,
    },
    /// Residue classes of each orbit, with optional invariance audits.
    Classify {
        #[arg(value_parser = parse_big)]
        n: BigInt,
        /// Legendre classifier for this odd prime divisor of n (repeatable).
        #[arg(long = "mod-p", value_parser = parse_big)]
        mod_p: Vec<BigInt>,
        /// Residue classifier mod 8 (needs 8 | n).
        #[arg(long)]
        mod8: bool,
        /// Random walk depth for the invariance audit.
        #[arg(long)]
        audit_depth: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Continued fraction of (a+√n)/c, written a,c|n.
    Cf {
        #[arg(allow_hyphen_values = true)]
        element: String,
        #[command(flatten)]
        out: Output,
    },
    /// Whether two elements of Q*(√n) are PSL(2,Z)-equivalent.
    Equivalent {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        #[arg(long, value_parser = parse_big)]
        n: BigInt,
        #[command(flatten)]
        out: Output,
    },
    /// Circuit and stabilizer word of the orbit through a representative.
    Circuit {
        #[arg(value_parser = parse_big)]
        n: BigInt,
        /// Ambiguous element given as a,c.
        #[arg(long, allow_hyphen_values = true)]
        rep: String,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate a word in (yx)/(y^2x) block notation on an element.
    CheckWord {
        #[arg(value_parser = parse_big)]
        n: BigInt,
        word: String,
        /// Ambiguous element given as a,c.
        #[arg(long, allow_hyphen_values = true)]
        rep: String,
        #[command(flatten)]
        out: Output,
    },
    /// Check an orbit-count statement, or every worked example.
    Verify {
        #[arg(
            long,
            required_unless_present = "examples",
            conflicts_with = "examples"
        )]
        /// Statement label, 2.1 through 2.9.
        theorem: Option<String>,
        /// Odd prime.
        #[arg(long, required_unless_present = "examples", value_parser = parse_big)]
        p: Option<BigInt>,
        /// Odd exponent of p, at least 3.
        #[arg(long, required_unless_present = "examples")]
        k: Option<u32>,
        /// Power of 2; defaults to the least value the statement allows.
        #[arg(long)]
        l: Option<u32>,
        /// Check the worked examples instead of one statement.
        #[arg(long)]
        examples: bool,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Verify every combination of the given parameters.
    Sweep {
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_big)]
        p: Vec<BigInt>,
        /// Comma-separated exponents of p.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        /// Comma-separated exponents of 2.
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<u32>,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Write the coset diagram of one orbit in Graphviz DOT.
    ExportDot {
        #[arg(value_parser = parse_big)]
        n: BigInt,
        /// Ambiguous element given as a,c.
        #[arg(long, allow_hyphen_values = true)]
        rep: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_big(text: &str) -> Result<BigInt, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("{text:?} is not an integer"))
}

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Outcome = Result<u8, Failure>;

fn exit_for(error: &Error) -> u8 {
    match error {
        Error::InternalInconsistency(_)
        | Error::DichotomyViolation(_)
        | Error::CycleLimitExceeded { .. } => EXIT_INCONSISTENT,
        _ => EXIT_USAGE,
    }
}

fn emit(bytes: &[u8], path: Option<&PathBuf>) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn write_report<R: Report>(report: &R, out: &Output) -> Result<(), Failure> {
    let bytes = serialize_report(report, out.format())?;
    emit(&bytes, out.output.as_ref())
}

fn limits(cli: &Cli) -> Result<Limits, Failure> {
    if cli.max_n < BigInt::from(2) {
        return Err(Failure::Usage("--max-n must be at least 2".into()));
    }
    Ok(Limits {
        max_n: cli.max_n.clone(),
    })
}

/// Parses `a,c|n` or `a,b,c|n`.
fn parse_full(text: &str) -> Result<Element, Failure> {
    let (body, n) = text
        .split_once('|')
        .ok_or_else(|| Failure::Usage(format!("expected a,c|n, got {text:?}")))?;
    let n = parse_big(n).map_err(Failure::Usage)?;
    Ok(Element::parse_short(body, &n)?)
}

fn run(cli: Cli) -> Outcome {
    let limits = limits(&cli)?;
    match &cli.command {
        Command::Ambiguous { n, count_only, out } => {
            let set = enumerate_ambiguous(n, &limits)?;
            write_report(&AmbiguousReport::new(&set, *count_only), out)?;
            Ok(0)
        }
        Command::Orbits { n, method, out } => {
            let set = enumerate_ambiguous(n, &limits)?;
            let (partition, methods) = match method {
                MethodArg::Graph => (partition_graph(&set)?, vec![Method::Graph]),
                MethodArg::Cf => (partition_cf(&set)?, vec![Method::Cf]),
                MethodArg::Both => (checked_partition(&set)?, vec![Method::Graph, Method::Cf]),
            };
            write_report(&OrbitsReport::new(&partition, methods)?, out)?;
            Ok(0)
        }
        Command::Classify {
            n,
            mod_p,
            mod8,
            audit_depth,
            out,
        } => {
            let mut classifiers: Vec<Classifier> = mod_p
                .iter()
                .map(|p| Classifier::ModP { p: p.clone() })
                .collect();
            if *mod8 {
                classifiers.push(Classifier::Mod8);
            }
            if classifiers.is_empty() {
                classifiers = Classifier::applicable_to(n);
            }
            for c in &classifiers {
                c.check_applicable(n)?;
            }
            let set = enumerate_ambiguous(n, &limits)?;
            let partition = partition_graph(&set)?;
            let mut summaries = Vec::new();
            let mut audits = Vec::new();
            for c in &classifiers {
                summaries.push(summarize_classes(&partition, c)?);
                if let Some(depth) = audit_depth {
                    audits.push(invariance_audit(&set, c, *depth, cli.seed)?);
                }
            }
            let report = ClassifyReport {
                schema: 1,
                n: n.clone(),
                reps: partition
                    .orbits()
                    .iter()
                    .map(|o| o.representative().clone())
                    .collect(),
                summaries,
                audits,
            };
            write_report(&report, out)?;
            Ok(if report.passed() { 0 } else { EXIT_ERRATA })
        }
        Command::Cf { element, out } => {
            let e = parse_full(element)?;
            write_report(&CfReport::new(&e)?, out)?;
            Ok(0)
        }
        Command::Equivalent {
            left,
            right,
            n,
            out,
        } => {
            limits.check(n)?;
            let left = Element::parse_short(left, n)?;
            let right = Element::parse_short(right, n)?;
            write_report(&EquivalenceReport::new(&left, &right)?, out)?;
            Ok(0)
        }
        Command::Circuit { n, rep, out } => {
            limits.check(n)?;
            let rep = ambiguous_rep(rep, n)?;
            write_report(&CircuitReport::new(&rep)?, out)?;
            Ok(0)
        }
        Command::CheckWord { n, word, rep, out } => {
            limits.check(n)?;
            let e = Element::parse_short(rep, n)?;
            let parsed = parse_word(word)?;
            let verdict = check_word_fixes(&parsed.word, &e)?;
            let report = CheckWordReport {
                schema: 1,
                input: word.clone(),
                notices: parsed.notices,
                verdict,
            };
            write_report(&report, out)?;
            Ok(0)
        }
        Command::Verify {
            theorem,
            p,
            k,
            l,
            examples,
            timings,
            out,
        } => {
            if *examples {
                let report = check_paper_examples()?;
                write_report(&report, out)?;
                return Ok(if report.has_errata() { EXIT_ERRATA } else { 0 });
            }
            let (Some(theorem), Some(p), Some(k)) = (theorem, p, k) else {
                return Err(Failure::Usage("--theorem, --p and --k are required".into()));
            };
            let theorem: TheoremId = theorem.parse()?;
            let l = l.unwrap_or(theorem.l_range().0);
            let case = TheoremCase::new(theorem, p.clone(), *k, l)?;
            let mut report = verify_case(&case, &limits)?;
            if !timings {
                report = report.without_timing();
            }
            write_report(&report, out)?;
            Ok(if report.has_errata() { EXIT_ERRATA } else { 0 })
        }
        Command::Sweep {
            p,
            k,
            l,
            timings,
            out,
        } => {
            let mut table = sweep(p, k, l, &limits);
            if !timings {
                table = table.without_timing();
            }
            write_report(&table, out)?;
            Ok(if table.has_inconsistency() {
                EXIT_INCONSISTENT
            } else if table.has_errata() {
                EXIT_ERRATA
            } else {
                0
            })
        }
        Command::ExportDot { n, rep, output } => {
            let set = enumerate_ambiguous(n, &limits)?;
            let rep = ambiguous_rep(rep, n)?;
            let dot = export_dot(&partition_graph(&set)?, &rep)?;
            emit(dot.as_bytes(), output.as_ref())?;
            Ok(0)
        }
    }
}

fn ambiguous_rep(text: &str, n: &BigInt) -> Result<Element, Failure> {
    let e = Element::parse_short(text, n)?;
    if !e.is_ambiguous() {
        return Err(Error::NotAmbiguous(e).into());
    }
    Ok(e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Engine(error)) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_for(&error))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_for(&Error::InternalInconsistency("x".into())),
            EXIT_INCONSISTENT
        );
        assert_eq!(exit_for(&Error::ZeroDenominator), EXIT_USAGE);
        assert_eq!(exit_for(&Error::SquareN(16.into())), EXIT_USAGE);
    }

    #[test]
    fn full_element_syntax() {
        assert!(parse_full("0,1|5").is_ok());
        assert!(parse_full("0,-5,1|5").is_ok());
        assert!(parse_full("0,1").is_err());
        assert!(parse_full("0,1|x").is_err());
    }
}

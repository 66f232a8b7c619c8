//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on input or domain errors (including usage
//! errors), 2 when an audit reports violations.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::automorphism::{automorphism_group, induce_hom, verify_one_step, SearchOptions, TargetDocument};
use crate::error::Error;
use crate::graph::{explore, ExchangeGraph, Limits, DEFAULT_MAX_DEPTH, DEFAULT_MAX_NODES};
use crate::json::{read_matrix, write_matrix};
use crate::lab::{positivity_audit, scalar_rigidity_audit, theorem_audit, AuditReport};
use crate::matrix::{ExchangeMatrix, SignPattern};
use crate::perm::Permutation;
use crate::seed::Seed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATIONS: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "clusterlab", version, about = "Seed mutation, exchange graphs and cluster automorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mutate the matrix along a sequence of directions.
    Mutate {
        input: String,
        /// Comma-separated one-based directions, applied left to right.
        #[arg(short = 'k', long = "mutations", value_delimiter = ',', required = true)]
        mutations: Vec<usize>,
    },
    /// Enumerate the exchange graph.
    Graph {
        input: String,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// List the cluster variables of a finite exchange graph.
    Variables {
        input: String,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Compute the cluster automorphism group and its composition table.
    Autos {
        input: String,
        /// Only try bijections that preserve entry magnitudes.
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check the homomorphism sending the initial cluster to a target cluster.
    CheckHom {
        input: String,
        /// One-based mutation path from the initial seed to the target seed.
        #[arg(long, value_delimiter = ',', default_value = "")]
        target: Vec<String>,
        /// One-based bijection: initial position i goes to target position perm[i].
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
    },
    /// Run an audit; exits with status 2 if it finds violations.
    Audit {
        input: String,
        #[arg(long, value_enum)]
        subject: AuditSubject,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AuditSubject {
    Scalar,
    Positivity,
    Theorem,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Worker threads; 1 is the sequential reference mode, 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl SearchArgs {
    fn limits(&self) -> Limits {
        Limits { max_nodes: self.max_nodes, max_depth: self.max_depth }
    }
}

#[derive(Serialize)]
struct HomCheck {
    images: Vec<String>,
    sigma: Vec<usize>,
    sign: Option<SignPattern>,
    one_step_commutes: bool,
    cluster_automorphism: bool,
    target: TargetDocument,
}

enum Failure {
    Domain(String),
    Violations,
    /// The reader closed stdout early, as `| head` does.
    ClosedOutput,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::ClosedOutput;
        }
        Failure::Domain(e.to_string())
    }
}

fn load(input: &str) -> Result<ExchangeMatrix, Failure> {
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| Failure::Domain(format!("{input}: {e}")))?
    };
    read_matrix(&text).map_err(|e| Failure::Domain(format!("{input}: {e}")))
}

fn zero_based(directions: &[usize], rank: usize) -> Result<Vec<usize>, Failure> {
    directions
        .iter()
        .map(|&k| match k.checked_sub(1) {
            Some(z) if z < rank => Ok(z),
            _ => Err(Failure::Domain(format!("direction {k} is outside 1..={rank}"))),
        })
        .collect()
}

fn enumerate(m: ExchangeMatrix, search: &SearchArgs, err: &mut dyn Write) -> Result<ExchangeGraph, Failure> {
    let g = explore(&Seed::initial(m), search.limits(), search.jobs)?;
    if !g.is_complete() {
        writeln!(err, "warning: enumeration bound reached after {} seeds; the exchange graph is partial", g.len())?;
    }
    Ok(g)
}

fn emit_report(report: &AuditReport, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    writeln!(out, "{}", report.to_json())?;
    writeln!(
        err,
        "instances: {}, violations: {}, elapsed: {:.3}s",
        report.instances_checked,
        report.violation_count,
        report.elapsed.as_secs_f64()
    )?;
    if report.partial {
        writeln!(err, "warning: enumeration bound reached; the audit covers a partial class")?;
    }
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure::Violations)
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Mutate { input, mutations } => {
            let m = load(&input)?;
            let path = zero_based(&mutations, m.rank())?;
            writeln!(out, "{}", write_matrix(&m.mutate_sequence(&path)?))?;
        }
        Command::Graph { input, dot, json: _, search } => {
            let g = enumerate(load(&input)?, &search, err)?;
            if dot {
                write!(out, "{}", g.to_dot())?;
            } else {
                writeln!(out, "{}", g.to_json())?;
            }
        }
        Command::Variables { input, json, search } => {
            let g = enumerate(load(&input)?, &search, err)?;
            let vars: Vec<String> = g.cluster_variables()?.iter().map(ToString::to_string).collect();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&vars).expect("strings serialize"))?;
            } else {
                for v in vars {
                    writeln!(out, "{v}")?;
                }
            }
        }
        Command::Autos { input, prune, search } => {
            let g = enumerate(load(&input)?, &search, err)?;
            let group = automorphism_group(&g, SearchOptions { prune, jobs: search.jobs })?;
            let report = serde_json::to_string_pretty(&group.report()).expect("report serializes");
            writeln!(out, "{report}")?;
        }
        Command::CheckHom { input, target, perm } => {
            let m = load(&input)?;
            let n = m.rank();
            let directions = target
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>().map_err(|_| Failure::Domain(format!("bad direction {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let s0 = Seed::initial(m);
            let t = s0.mutate_sequence(&zero_based(&directions, n)?)?;
            let sigma = match perm {
                Some(p) => Permutation::from_one_based(&p)?,
                None => Permutation::identity(n),
            };
            let mut h = induce_hom(&s0, &t, &sigma)?;
            let commutes = verify_one_step(&mut h, &s0)?;
            let check = HomCheck {
                images: h.images.iter().map(ToString::to_string).collect(),
                sigma: sigma.images().iter().map(|v| v + 1).collect(),
                cluster_automorphism: commutes && h.sign.is_some(),
                sign: h.sign,
                one_step_commutes: commutes,
                target: TargetDocument::new(&t),
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&check).expect("check serializes"))?;
        }
        Command::Audit { input, subject, search } => {
            let m = load(&input)?;
            let report = match subject {
                AuditSubject::Scalar => scalar_rigidity_audit(&m, search.limits(), search.jobs)?,
                AuditSubject::Positivity => positivity_audit(&enumerate(m, &search, err)?),
                AuditSubject::Theorem => theorem_audit(&enumerate(m, &search, err)?, search.jobs)?,
            };
            emit_report(&report, out, err)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_ERROR
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) | Err(Failure::ClosedOutput) => EXIT_OK,
        Err(Failure::Violations) => EXIT_VIOLATIONS,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{Subject, Violation};

    #[test]
    fn violations_map_to_exit_status_two() {
        let report = AuditReport {
            subject: Subject::Positivity,
            instances_checked: 1,
            violation_count: 1,
            violations: vec![Violation::NegativeCoefficient { node: 0, path: vec![], variable: "1 - x1".into() }],
            partial: false,
            counters: Default::default(),
            elapsed: Default::default(),
        };
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert!(matches!(emit_report(&report, &mut out, &mut err), Err(Failure::Violations)));
        assert!(String::from_utf8(err).unwrap().contains("violations: 1"));
    }

    #[test]
    fn help_goes_to_stdout() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["clusterlab", "--help"], &mut out, &mut err), EXIT_OK);
        assert!(String::from_utf8(out).unwrap().contains("Usage"));
    }

    #[test]
    fn in_process_mutation() {
        let dir = std::env::temp_dir().join(format!("clusterlab-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a2.json");
        std::fs::write(&path, r#"{"rank":2,"matrix":[[0,1],[-1,0]]}"#).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["clusterlab", "mutate", path.to_str().unwrap(), "-k", "1,2"], &mut out, &mut err);
        assert_eq!(code, EXIT_OK, "{}", String::from_utf8_lossy(&err));
        assert_eq!(String::from_utf8(out).unwrap(), "{\"rank\":2,\"matrix\":[[0,1],[-1,0]]}\n");
        let code = run(["clusterlab", "graph", dir.join("missing.json").to_str().unwrap()], &mut Vec::new(), &mut err);
        assert_eq!(code, EXIT_ERROR);
        std::fs::remove_dir_all(dir).ok();
    }
}

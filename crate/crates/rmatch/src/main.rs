//! Command-line front end: classify and solve restricted matchings, run the
//! brute-force oracles, build the two formula-to-graph constructions,
//! convert witnesses, and replay the counting and equivalence claims on
//! instance corpora.
//!
//! Exit codes: 0 success (or verified/positive verdict), 1 negative verdict
//! or failed verification, 2 usage or input errors, 3 resource limits.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use rmatch::{
    assignment_to_matching_t1, assignment_to_matching_t2, brute_force_sat, brute_force_xsat,
    build_t1, build_t2, classify, matching_to_assignment_t1, matching_to_assignment_t2,
    max_matching_number_with_limit, normalize_xsat, run_corpus, Assignment, CheckKind, CnfFormula,
    CorpusSource, CorpusSpec, Graph, GraphError, Matching, MatchingError, MatchingKind,
    NormalizeOutcome, NormalizeStrictness, ReduceError, ReductionGraph, SatError, SolveError,
    VerifyError, DEFAULT_T1_EXHAUSTIVE, DEFAULT_T2_EXHAUSTIVE, DEFAULT_VERTEX_LIMIT,
};

#[derive(Parser)]
#[command(
    name = "rmatch",
    version,
    about = "Restricted graph matchings: classification, exact maxima, CNF constructions, and claim verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print which restricted-matching kinds an edge set satisfies in its
    /// host graph.
    Classify {
        /// DIMACS graph file (`p edge`, `e u v` lines, 1-based).
        #[arg(long)]
        graph: PathBuf,
        /// Matching file (`m u v` lines, 1-based).
        #[arg(long)]
        matching: PathBuf,
    },
    /// Compute a maximum matching of the requested kind with a witness.
    Solve {
        /// DIMACS graph file.
        #[arg(long)]
        graph: PathBuf,
        /// Matching kind: ordinary (nu), uniquely restricted (ur),
        /// acyclic (ac), or induced (s).
        #[arg(long, value_enum, required_unless_present = "all", conflicts_with = "all")]
        kind: Option<KindArg>,
        /// Solve all four kinds instead of just --kind.
        #[arg(long)]
        all: bool,
        /// Override the default vertex cap (hard maximum 64).
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Rewrite a positive clause-size-three formula so that every clause
    /// has three distinct variables, preserving exact satisfiability.
    NormalizeXsat {
        /// Input DIMACS CNF file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output DIMACS CNF file for the rewritten formula.
        #[arg(long = "out")]
        output: PathBuf,
        /// Output JSON file mapping input variables to the rewrite
        /// (forced values, renames, padding blocks).
        #[arg(long = "map")]
        map: PathBuf,
        /// Accept variables occurring fewer than three times (the default
        /// requires exactly three occurrences each).
        #[arg(long)]
        relaxed: bool,
    },
    /// Decide satisfiability or exact satisfiability by exhaustive search.
    Oracle {
        /// sat: some literal true per clause; xsat: exactly one true
        /// variable per clause (positive formulas).
        #[arg(long, value_enum)]
        mode: OracleMode,
        /// Input DIMACS CNF file.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build one of the two formula-to-graph constructions.
    Reduce {
        /// t1: max-degree-four graph from clauses of size two or three;
        /// t2: bipartite graph from positive clauses of size three.
        #[arg(long, value_enum)]
        which: Which,
        /// Input DIMACS CNF file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output DIMACS graph file.
        #[arg(long = "out")]
        output: PathBuf,
        /// Output JSON file mapping 1-based vertex ids to their roles.
        #[arg(long)]
        roles: PathBuf,
    },
    /// Convert between assignments and matchings over a construction.
    Witness {
        /// a2m: assignment to matching; m2a: matching to assignment.
        #[arg(long, value_enum)]
        dir: WitnessDir,
        /// Which construction the witness lives on.
        #[arg(long, value_enum)]
        which: Which,
        /// The formula the construction was built from (DIMACS CNF).
        #[arg(long)]
        cnf: PathBuf,
        /// Assignment file (`v <lit>.. 0`): input for a2m, output for m2a
        /// (stdout when omitted as an output).
        #[arg(long)]
        assignment: Option<PathBuf>,
        /// Matching file (`m u v` lines): output for a2m (stdout when
        /// omitted), input for m2a.
        #[arg(long)]
        matching: Option<PathBuf>,
    },
    /// Replay the counting and equivalence claims on an instance corpus.
    Verify {
        /// Which claim to check; `all` runs every one.
        #[arg(long, value_enum)]
        which: VerifyWhich,
        /// Exhaustive corpus bounds: max variables, max clauses.
        #[arg(long, num_args = 2, value_names = ["N", "M"], conflicts_with = "random")]
        exhaustive: Option<Vec<u32>>,
        /// Seeded random corpus: instance count, seed.
        #[arg(long, num_args = 2, value_names = ["COUNT", "SEED"])]
        random: Option<Vec<u64>>,
        /// Emit machine-readable JSON instead of line records.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    /// Ordinary matching.
    Nu,
    /// Uniquely restricted matching.
    Ur,
    /// Acyclic matching.
    Ac,
    /// Induced (strong) matching.
    S,
}

impl KindArg {
    fn to_kind(self) -> MatchingKind {
        match self {
            KindArg::Nu => MatchingKind::Ordinary,
            KindArg::Ur => MatchingKind::UniquelyRestricted,
            KindArg::Ac => MatchingKind::Acyclic,
            KindArg::S => MatchingKind::Induced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Sat,
    Xsat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    T1,
    T2,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessDir {
    A2m,
    M2a,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhich {
    Lemma1,
    Thm1,
    Lemma4,
    Thm2,
    All,
}

#[derive(Debug, Error)]
enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

impl AppError {
    /// 3 for resource limits, 2 for everything else.
    fn exit_code(&self) -> u8 {
        let limited = matches!(
            self,
            AppError::Solve(SolveError::TooManyVertices { .. })
                | AppError::Sat(SatError::TooManyVariables { .. })
                | AppError::Verify(VerifyError::Solve(SolveError::TooManyVertices { .. }))
                | AppError::Verify(VerifyError::Sat(SatError::TooManyVariables { .. }))
        );
        if limited {
            3
        } else {
            2
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), AppError> {
    fs::write(path, contents)
        .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn kind_name(kind: MatchingKind) -> &'static str {
    match kind {
        MatchingKind::Ordinary => "ordinary",
        MatchingKind::UniquelyRestricted => "uniquely-restricted",
        MatchingKind::Acyclic => "acyclic",
        MatchingKind::Induced => "induced",
    }
}

fn kind_short(kind: MatchingKind) -> &'static str {
    match kind {
        MatchingKind::Ordinary => "nu",
        MatchingKind::UniquelyRestricted => "ur",
        MatchingKind::Acyclic => "ac",
        MatchingKind::Induced => "s",
    }
}

fn run(command: Command) -> Result<u8, AppError> {
    match command {
        Command::Classify { graph, matching } => {
            let g = Graph::from_dimacs(&read_file(&graph)?)?;
            let m = Matching::from_text(&read_file(&matching)?)?;
            let result = classify(&g, &m);
            if let Some(diag) = result.diagnostic {
                say(format!("not a matching: {diag}"));
                return Ok(1);
            }
            let kinds: Vec<&str> = MatchingKind::ALL
                .iter()
                .rev()
                .filter(|k| result.kinds.contains(k))
                .map(|&k| kind_name(k))
                .collect();
            say(format!("kinds: {}", kinds.join(" ")));
            Ok(0)
        }
        Command::Solve {
            graph,
            kind,
            all,
            limit,
        } => {
            let g = Graph::from_dimacs(&read_file(&graph)?)?;
            let limit = limit.unwrap_or(DEFAULT_VERTEX_LIMIT);
            let kinds: Vec<MatchingKind> = if all {
                MatchingKind::ALL.iter().rev().copied().collect()
            } else {
                vec![kind.expect("clap requires --kind without --all").to_kind()]
            };
            for k in kinds {
                let result = max_matching_number_with_limit(&g, k, limit)?;
                say(format!("{} {}", kind_short(k), result.value));
                say_raw(&result.witness.to_text());
            }
            Ok(0)
        }
        Command::NormalizeXsat {
            input,
            output,
            map,
            relaxed,
        } => {
            let f = CnfFormula::from_dimacs(&read_file(&input)?)?;
            let strictness = if relaxed {
                NormalizeStrictness::AtMostThreeOccurrences
            } else {
                NormalizeStrictness::ExactlyThreeOccurrences
            };
            match normalize_xsat(&f, strictness)? {
                NormalizeOutcome::Normalized {
                    formula,
                    provenance,
                } => {
                    write_file(&output, &formula.to_dimacs())?;
                    let json = serde_json::to_string_pretty(&provenance)?;
                    write_file(&map, &(json + "\n"))?;
                    say(format!(
                        "normalized: {} vars, {} clauses ({} forced, {} padding blocks)",
                        formula.num_vars(),
                        formula.num_clauses(),
                        provenance.forced.len(),
                        provenance.gadgets.len()
                    ));
                    Ok(0)
                }
                NormalizeOutcome::Unsatisfiable { reason } => {
                    say(format!("not-exact-satisfiable: {reason}"));
                    Ok(1)
                }
            }
        }
        Command::Oracle { mode, input } => {
            let f = CnfFormula::from_dimacs(&read_file(&input)?)?;
            let (model, yes, no) = match mode {
                OracleMode::Sat => (brute_force_sat(&f)?, "satisfiable", "unsatisfiable"),
                OracleMode::Xsat => (
                    brute_force_xsat(&f)?,
                    "exact-satisfiable",
                    "not-exact-satisfiable",
                ),
            };
            match model {
                Some(a) => {
                    say(yes.to_string());
                    say(a.to_text());
                    Ok(0)
                }
                None => {
                    say(no.to_string());
                    Ok(1)
                }
            }
        }
        Command::Reduce {
            which,
            input,
            output,
            roles,
        } => {
            let f = CnfFormula::from_dimacs(&read_file(&input)?)?;
            let rg = build(which, &f)?;
            write_file(&output, &rg.graph().to_dimacs())?;
            // Keys are 1-based to match the vertex ids in the DIMACS file.
            let role_map: BTreeMap<u32, _> = rg
                .roles()
                .iter()
                .enumerate()
                .map(|(i, r)| (i as u32 + 1, r))
                .collect();
            let json = serde_json::to_string_pretty(&role_map)?;
            write_file(&roles, &(json + "\n"))?;
            say(format!(
                "built: {} vertices, {} edges, max degree {}",
                rg.graph().vertex_count(),
                rg.graph().edge_count(),
                rg.graph().max_degree()
            ));
            Ok(0)
        }
        Command::Witness {
            dir,
            which,
            cnf,
            assignment,
            matching,
        } => {
            let f = CnfFormula::from_dimacs(&read_file(&cnf)?)?;
            let rg = build(which, &f)?;
            match dir {
                WitnessDir::A2m => {
                    let path = assignment.ok_or_else(|| {
                        AppError::Usage("--dir a2m needs --assignment as input".into())
                    })?;
                    let a = Assignment::from_text(&read_file(&path)?)?;
                    let m = match which {
                        Which::T1 => assignment_to_matching_t1(&rg, &a)?,
                        Which::T2 => assignment_to_matching_t2(&rg, &a)?,
                    };
                    emit(matching.as_deref(), &m.to_text())?;
                }
                WitnessDir::M2a => {
                    let path = matching.ok_or_else(|| {
                        AppError::Usage("--dir m2a needs --matching as input".into())
                    })?;
                    let m = Matching::from_text(&read_file(&path)?)?;
                    let a = match which {
                        Which::T1 => matching_to_assignment_t1(&rg, &m)?,
                        Which::T2 => matching_to_assignment_t2(&rg, &m)?,
                    };
                    emit(assignment.as_deref(), &(a.to_text() + "\n"))?;
                }
            }
            Ok(0)
        }
        Command::Verify {
            which,
            exhaustive,
            random,
            json,
        } => {
            let checks: Vec<CheckKind> = match which {
                VerifyWhich::Lemma1 => vec![CheckKind::Lemma1],
                VerifyWhich::Thm1 => vec![CheckKind::Theorem1],
                VerifyWhich::Lemma4 => vec![CheckKind::Lemma4],
                VerifyWhich::Thm2 => vec![CheckKind::Theorem2],
                VerifyWhich::All => vec![
                    CheckKind::Lemma1,
                    CheckKind::Theorem1,
                    CheckKind::Lemma4,
                    CheckKind::Theorem2,
                ],
            };
            let mut reports = Vec::new();
            let mut all_pass = true;
            for check in checks {
                let source = if let Some(bounds) = &exhaustive {
                    CorpusSource::Exhaustive {
                        max_vars: bounds[0],
                        max_clauses: bounds[1] as usize,
                    }
                } else if let Some(params) = &random {
                    CorpusSource::Random {
                        count: params[0] as usize,
                        seed: params[1],
                    }
                } else {
                    let (max_vars, max_clauses) = if check.uses_t1() {
                        DEFAULT_T1_EXHAUSTIVE
                    } else {
                        DEFAULT_T2_EXHAUSTIVE
                    };
                    CorpusSource::Exhaustive {
                        max_vars,
                        max_clauses,
                    }
                };
                let report = run_corpus(&CorpusSpec { check, source })?;
                all_pass &= report.pass;
                reports.push(report);
            }
            if json {
                say(serde_json::to_string_pretty(&reports)?);
            } else {
                for report in &reports {
                    say_raw(&report.to_lines());
                }
            }
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

fn build(which: Which, f: &CnfFormula) -> Result<ReductionGraph, ReduceError> {
    match which {
        Which::T1 => build_t1(f),
        Which::T2 => build_t2(f),
    }
}

/// Write to the given path, or to stdout when no path was given.
fn emit(path: Option<&Path>, contents: &str) -> Result<(), AppError> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            say_raw(contents);
            Ok(())
        }
    }
}

/// Print a line to stdout, exiting quietly if the consumer closed the pipe.
fn say(line: String) {
    say_raw(&(line + "\n"));
}

fn say_raw(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(2);
    }
}

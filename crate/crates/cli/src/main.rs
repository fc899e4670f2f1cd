//! `aspic-ground`: ground, solve, compare and generate ASPIC+ theories.
//!
//! Exit codes: 0 ok, 1 input error, 2 budget exceeded, 3 comparison mismatch.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aspic_ground::analysis::pred_dependencies;
use aspic_ground::argumentation::{
    induced_af, weak_points, ArgumentBudgetExceeded, AttackGraph, DEFAULT_ARGUMENT_BUDGET,
};
use aspic_ground::generator::{generate, GenConfig, GenConfigError};
use aspic_ground::grounder::{ground, GroundError, GroundingMode};
use aspic_ground::naive::DEFAULT_INSTANCE_CAP;
use aspic_ground::semantics::{extensions, BudgetExceeded, Semantics, DEFAULT_EXTENSION_BUDGET};
use aspic_ground::syntax::ParseError;
use aspic_ground::transform::{transform1_theory, transform2_theory};
use aspic_ground::{parse_theory, GroundTheory, Theory};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "aspic-ground", version, about = "Datalog-driven grounding of ASPIC+ theories")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Maximum number of arguments constructed
    #[arg(long, global = true, default_value_t = DEFAULT_ARGUMENT_BUDGET)]
    arg_budget: usize,
    /// Maximum number of arguments searched when enumerating extensions
    #[arg(long, global = true, default_value_t = DEFAULT_EXTENSION_BUDGET)]
    ext_budget: usize,
    /// Maximum number of instances the naive grounder may produce
    #[arg(long, global = true, default_value_t = DEFAULT_INSTANCE_CAP)]
    rule_budget: usize,
    /// Print the predicate dependency graph (DOT) to stderr
    #[arg(long, global = true)]
    dump_deps: bool,
    /// Print the auxiliary Datalog program to stderr
    #[arg(long, global = true)]
    dump_datalog: bool,
    /// Print the induced framework (ICCMA style) to stderr
    #[arg(long, global = true)]
    dump_af: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Ground a theory
    Ground {
        input: PathBuf,
        #[arg(long, default_value = "full", value_parser = parse_mode)]
        mode: GroundingMode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Ground a theory and enumerate the extensions of its framework
    Solve {
        input: PathBuf,
        #[arg(long, default_value = "full", value_parser = parse_mode)]
        mode: GroundingMode,
        #[arg(long, default_value = "com", value_parser = parse_semantics)]
        semantics: Semantics,
        /// Print only the claim sets
        #[arg(long)]
        claims_only: bool,
    },
    /// Compare the naive grounding with the Datalog-based ones
    Compare {
        input: PathBuf,
        #[arg(long, default_value = "com", value_parser = parse_semantics)]
        semantics: Semantics,
        #[arg(long, value_enum, default_value_t = Level::Extensions)]
        level: Level,
        /// Groundings compared against the naive one
        #[arg(long, value_delimiter = ',', default_value = "t1,t2,full", value_parser = parse_mode)]
        against: Vec<GroundingMode>,
    },
    /// Generate a random theory
    Gen(GenArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    strict: usize,
    #[arg(long, default_value_t = 5)]
    defeasible: usize,
    #[arg(long, default_value_t = 7)]
    contraries: usize,
    #[arg(long, default_value_t = 10)]
    predicates: usize,
    #[arg(long, default_value_t = 3)]
    max_vars: usize,
    /// Number of facts and assumptions
    #[arg(long, default_value_t = 20)]
    kb: usize,
    #[arg(long, default_value_t = 0)]
    min_constant: u32,
    #[arg(long, default_value_t = 30)]
    max_constant: u32,
    /// Probability that a knowledge-base atom is an assumption
    #[arg(long, default_value_t = 0.5)]
    assumption_ratio: f64,
    /// Only let rule bodies use lower-numbered predicates than the head
    #[arg(long)]
    acyclic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Extensions,
    Claims,
}

fn parse_mode(s: &str) -> Result<GroundingMode, String> {
    s.parse()
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    s.parse()
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Arguments(#[from] ArgumentBudgetExceeded),
    #[error(transparent)]
    Extensions(#[from] BudgetExceeded),
    #[error(transparent)]
    Config(#[from] GenConfigError),
    #[error("groundings differ")]
    Mismatch,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Ground(GroundError::InstanceCap(_))
            | CliError::Arguments(_)
            | CliError::Extensions(_) => 2,
            CliError::Mismatch => 3,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Mismatch) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Ground {
            input,
            mode,
            out,
            format,
        } => {
            let theory = read_theory(&input)?;
            let gt = ground_with_dumps(&theory, mode, g)?;
            if g.dump_af {
                eprint!("{}", induced_af(&gt, g.arg_budget)?.to_iccma());
            }
            let text = match format {
                Format::Text => gt.to_string(),
                Format::Json => pretty(&ground_json(&gt)) + "\n",
            };
            write_output(out.as_deref(), &text)
        }
        Command::Solve {
            input,
            mode,
            semantics,
            claims_only,
        } => {
            let theory = read_theory(&input)?;
            let gt = ground_with_dumps(&theory, mode, g)?;
            let af = af_with_dump(&gt, g)?;
            let es = extensions(&af, semantics, g.ext_budget)?;
            let claims: Vec<Vec<String>> = es.claims.iter().map(strings).collect();
            let value = if claims_only {
                json!(claims)
            } else {
                json!({
                    "semantics": semantics.as_str(),
                    "mode": mode.as_str(),
                    "arguments": arguments_json(&af),
                    "extensions": es
                        .extensions
                        .iter()
                        .map(|e| e.iter().map(|&a| AttackGraph::name(a)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "claims": claims,
                })
            };
            println!("{}", pretty(&value));
            Ok(())
        }
        Command::Compare {
            input,
            semantics,
            level,
            against,
        } => {
            let theory = read_theory(&input)?;
            if g.dump_deps {
                eprint!("{}", pred_dependencies(&theory).to_dot());
            }
            let reference = family(&theory, GroundingMode::Naive, semantics, level, g)?;
            let mut results = Vec::new();
            let mut all_equal = true;
            for mode in against {
                let other = family(&theory, mode, semantics, level, g)?;
                let missing: Vec<&BTreeSet<String>> = reference.difference(&other).collect();
                let extra: Vec<&BTreeSet<String>> = other.difference(&reference).collect();
                let equal = missing.is_empty() && extra.is_empty();
                all_equal &= equal;
                results.push(json!({
                    "mode": mode.as_str(),
                    "equal": equal,
                    "missing": missing,
                    "extra": extra,
                }));
            }
            let value = json!({
                "semantics": semantics.as_str(),
                "level": match level {
                    Level::Extensions => "extensions",
                    Level::Claims => "claims",
                },
                "reference": "naive",
                "results": results,
            });
            println!("{}", pretty(&value));
            if all_equal {
                Ok(())
            } else {
                Err(CliError::Mismatch)
            }
        }
        Command::Gen(args) => {
            let cfg = GenConfig {
                seed: args.seed,
                n_strict: args.strict,
                n_defeasible: args.defeasible,
                n_contraries: args.contraries,
                n_predicates: args.predicates,
                max_vars_per_rule: args.max_vars,
                n_atoms_in_kb: args.kb,
                constant_range: args.min_constant..=args.max_constant,
                assumption_ratio: args.assumption_ratio,
                acyclic: args.acyclic,
                ..GenConfig::default()
            };
            let theory = generate(&cfg)?;
            write_output(args.out.as_deref(), &theory.to_string())
        }
    }
}

fn read_theory(path: &Path) -> Result<Theory, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_theory(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ground_with_dumps(theory: &Theory, mode: GroundingMode, g: &Global) -> Result<GroundTheory, CliError> {
    if g.dump_deps {
        eprint!("{}", pred_dependencies(theory).to_dot());
    }
    let gt = ground(theory, mode, g.rule_budget)?;
    if g.dump_datalog {
        // Grounding succeeded, so the theory is valid and translatable.
        let program = match mode {
            GroundingMode::Naive => None,
            GroundingMode::Plain => Some(transform1_theory(theory).0),
            GroundingMode::Pruned | GroundingMode::Full => Some(transform2_theory(theory).0),
        };
        match program {
            Some(p) => eprint!("{p}"),
            None => eprintln!("% naive grounding uses no Datalog program"),
        }
    }
    Ok(gt)
}

fn af_with_dump(gt: &GroundTheory, g: &Global) -> Result<AttackGraph, CliError> {
    let af = induced_af(gt, g.arg_budget)?;
    if g.dump_af {
        eprint!("{}", af.to_iccma());
    }
    Ok(af)
}

/// Extensions (as sets of argument encodings) or claim sets of `theory`
/// grounded by `mode`.
fn family(
    theory: &Theory,
    mode: GroundingMode,
    semantics: Semantics,
    level: Level,
    g: &Global,
) -> Result<BTreeSet<BTreeSet<String>>, CliError> {
    let gt = ground(theory, mode, g.rule_budget)?;
    let af = induced_af(&gt, g.arg_budget)?;
    let es = extensions(&af, semantics, g.ext_budget)?;
    Ok(match level {
        Level::Extensions => es.encoded(&af),
        Level::Claims => es
            .claim_family()
            .into_iter()
            .map(|c| c.iter().map(|a| a.to_string()).collect())
            .collect(),
    })
}

/// Printed forms, sorted.
fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    let mut v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    v.sort();
    v
}

fn ground_json(gt: &GroundTheory) -> Value {
    json!({
        "facts": strings(&gt.facts),
        "assumptions": strings(&gt.assumptions),
        "strict": strings(&gt.strict),
        "defeasible": strings(&gt.defeasible),
        "contraries": strings(&gt.contraries),
    })
}

fn arguments_json(af: &AttackGraph) -> Value {
    af.arguments
        .iter()
        .enumerate()
        .map(|(i, a)| {
            json!({
                "id": AttackGraph::name(i),
                "encoding": a.encoding,
                "conclusion": a.conclusion.to_string(),
                "premises": strings(&a.premises),
                "rules": strings(&a.rules),
                "weak_points": strings(weak_points(a)),
                "attackers": af
                    .edges()
                    .iter()
                    .filter(|(_, t)| *t == i)
                    .map(|(s, _)| AttackGraph::name(*s))
                    .collect::<Vec<_>>(),
            })
        })
        .collect()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

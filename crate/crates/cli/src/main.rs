//! `topomu`: command-line front end.
//!
//! Exit codes: 0 and 1 report a semantic outcome (found / not found, valid /
//! invalid), 2 a spent time budget, 64 bad usage and 65 bad input data.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, value::RawValue, Value};

use topomu::decision::{
    bounded_sat, bounded_valid, SatResult, SearchConfig, SearchError, ValidResult, Witness,
};
use topomu::frames::io::{model_to_json, parse_model, to_json_value, NamedModel, RelationKey};
use topomu::frames::{fmp_bound, irreflexive_unfold, FrameClass, TowerInt};
use topomu::morphisms::{compute_bisimilarity, quotient_model, sigma_atoms, BisimMode};
use topomu::proofs::{check_proof, parse_proof, soundness_fuzz, FuzzConfig, ProofVerdict, Schema};
use topomu::semantics::eval_closed;
use topomu::syntax::{closure_set, parse, print_core};
use topomu::tangle::expressivity_experiment;
use topomu::topology::{
    closure_frame, closure_space, derivative_frame, derivative_space, parse_space, space_to_json_value,
    FiniteSpace, NamedSpace,
};
use topomu::{Formula, Model};

const USAGE: u8 = 64;
const DATA: u8 = 65;
const BUDGET: u8 = 2;

/// Exact integers are written as JSON numbers, larger ones as a sum of
/// powers of two in a string.
#[derive(Serialize)]
#[serde(untagged)]
enum BoundNumber {
    Exact(Box<RawValue>),
    Symbolic(String),
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BoundReport {
    per_depth: Vec<BoundNumber>,
    total: BoundNumber,
    depth_bound: usize,
}

#[derive(Parser)]
#[command(name = "topomu", version, about = "Topological mu-calculus toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Emit::Text)]
    emit: Emit,
    /// Master seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Space file to its specialization preorder, as a model file.
    ClosureFrame,
    /// Reflexive transitive model file to a space file.
    ClosureSpace,
    /// Space file to its irreflexive derivative frame, as a model file.
    DerivativeFrame,
    /// Irreflexive weakly transitive model file to a space file.
    DerivativeSpace,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its surface and core forms.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Worlds of a model where a formula holds.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Search for a small model of a formula.
    Sat(SearchArgs),
    /// Search for a small counterexample to a formula.
    Valid(SearchArgs),
    /// Quotient a model by bisimilarity.
    Quotient {
        #[arg(long)]
        model: PathBuf,
        /// Atoms the quotient must respect (default: all atoms of the model).
        #[arg(long, value_delimiter = ',', conflicts_with = "sigma")]
        atoms: Option<Vec<String>>,
        /// Respect the closure set of this formula instead of atoms.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Replace reflexive worlds by irreflexive two-point clusters.
    Unfold {
        #[arg(long)]
        model: PathBuf,
    },
    /// Move between finite spaces and frames.
    Translate {
        #[arg(long, value_enum)]
        to: Direction,
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the expressivity experiment on the spine model.
    Spine {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 5)]
        size_bound: usize,
    },
    /// Check a proof file.
    Prove {
        #[arg(long)]
        proof: PathBuf,
    },
    /// Quotient-size bounds for a closure set of the given size.
    Bound {
        #[arg(long)]
        sigma_size: usize,
    },
    /// Randomized soundness check of axiom schemas on a frame class.
    Fuzz {
        /// Built-in schema names.
        #[arg(long, value_delimiter = ',', default_value = "Taut,K,W,Fix")]
        schemas: Vec<String>,
        /// Extra schemas as NAME=TEMPLATE; free names are metavariables.
        #[arg(long = "user")]
        user: Vec<String>,
        #[arg(long, default_value = "WK4")]
        class: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_worlds: usize,
    },
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long)]
    formula: String,
    #[arg(long, default_value = "WK4")]
    class: String,
    #[arg(long, default_value_t = 4)]
    max_worlds: usize,
    #[arg(long)]
    time_budget_ms: Option<u64>,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        message: message.into(),
    }
}

fn data(message: impl ToString) -> Failure {
    Failure {
        code: DATA,
        message: message.to_string(),
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    topomu::parse_formula(text).map_err(data)
}

fn class(name: &str) -> Result<FrameClass, Failure> {
    name.parse()
        .map_err(|e: topomu::frames::FrameError| usage(e.to_string()))
}

fn load_model(path: &Path) -> Result<NamedModel, Failure> {
    parse_model(&read(path)?).map_err(data)
}

fn emit_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn no_csv(emit: Emit) -> Result<(), Failure> {
    match emit {
        Emit::Csv => Err(usage("--emit csv is only available for spine")),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Outcome {
    let emit = cli.emit;
    if !matches!(cli.command, Command::Spine { .. }) {
        no_csv(emit)?;
    }
    match cli.command {
        Command::Parse { formula: text } => {
            let surface = parse(&text).map_err(data)?;
            let core = surface.normalize().map_err(data)?;
            let free: Vec<&str> = core.free_vars().iter().map(|x| x.as_str()).collect();
            if emit == Emit::Json {
                emit_json(&json!({
                    "surface": surface.to_string(),
                    "core": print_core(&core),
                    "size": surface.size(),
                    "freeVars": free,
                }));
            } else {
                println!("surface: {surface}");
                println!("core:    {}", print_core(&core));
            }
            Ok(0)
        }
        Command::Check { model, formula: text } => {
            let nm = load_model(&model)?;
            let f = formula(&text)?;
            let truth = eval_closed(&nm.model, &f).map_err(data)?;
            let worlds = nm.names_of(&truth);
            if emit == Emit::Json {
                emit_json(&json!({ "formula": print_core(&f), "worlds": worlds }));
            } else {
                println!("{}", worlds.join(" "));
            }
            Ok(0)
        }
        Command::Sat(args) => search(args, emit, true),
        Command::Valid(args) => search(args, emit, false),
        Command::Quotient { model, atoms, sigma } => {
            let nm = load_model(&model)?;
            let (mode, keep) = match (atoms, sigma) {
                (_, Some(text)) => {
                    let s = closure_set(&formula(&text)?);
                    let keep = sigma_atoms(&s);
                    (BisimMode::Sigma(s), keep)
                }
                (Some(names), None) => {
                    let keep: BTreeSet<_> = names.iter().map(|a| topomu::Symbol::new(a)).collect();
                    (BisimMode::Atoms(keep.clone()), keep)
                }
                (None, None) => {
                    let keep: BTreeSet<_> = nm.model.atoms().collect();
                    (BisimMode::Atoms(keep.clone()), keep)
                }
            };
            let part = compute_bisimilarity(&nm.model, &mode);
            let (q, proj) = quotient_model(&nm.model, &part, &keep).map_err(data)?;
            let names: Vec<String> = part
                .blocks()
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|w| nm.names[w].as_str())
                        .collect::<Vec<_>>()
                        .join("+")
                })
                .collect();
            let out = NamedModel { names, model: q };
            let map: serde_json::Map<String, Value> = (0..nm.model.len())
                .map(|w| (nm.names[w].clone(), json!(out.names[proj.image(w)])))
                .collect();
            if emit == Emit::Json {
                emit_json(&json!({ "model": to_json_value(&out, RelationKey::Edges), "projection": map }));
            } else {
                println!("{}", model_to_json(&out));
            }
            Ok(0)
        }
        Command::Unfold { model } => {
            let nm = load_model(&model)?;
            let (u, proj) = irreflexive_unfold(&nm.model).map_err(data)?;
            let mut copies = vec![0usize; nm.model.len()];
            let names = proj
                .as_slice()
                .iter()
                .map(|&w| {
                    copies[w] += 1;
                    format!("{}.{}", nm.names[w], copies[w] - 1)
                })
                .collect();
            let out = NamedModel { names, model: u };
            if emit == Emit::Json {
                emit_json(&json!({ "model": to_json_value(&out, RelationKey::Edges) }));
            } else {
                println!("{}", model_to_json(&out));
            }
            Ok(0)
        }
        Command::Translate { to, input } => {
            let text = read(&input)?;
            let v = match to {
                Direction::ClosureFrame | Direction::DerivativeFrame => {
                    let s = parse_space(&text).map_err(data)?;
                    let frame = match to {
                        Direction::ClosureFrame => closure_frame(&s.space),
                        _ => derivative_frame(&s.space),
                    };
                    to_json_value(
                        &NamedModel {
                            names: s.names,
                            model: Model::new(frame),
                        },
                        RelationKey::Edges,
                    )
                }
                Direction::ClosureSpace | Direction::DerivativeSpace => {
                    let nm = parse_model(&text).map_err(data)?;
                    let space: FiniteSpace = match to {
                        Direction::ClosureSpace => closure_space(&nm.model.frame),
                        _ => derivative_space(&nm.model.frame),
                    }
                    .map_err(data)?;
                    space_to_json_value(&NamedSpace {
                        names: nm.names,
                        space,
                    })
                }
            };
            emit_json(&v);
            Ok(0)
        }
        Command::Spine { m, size_bound } => {
            let r = expressivity_experiment(m, size_bound).map_err(data)?;
            match emit {
                Emit::Json => emit_json(&serde_json::to_value(&r).expect("json")),
                Emit::Csv => print!("{}", r.csv()),
                Emit::Text => {
                    println!("formulas:        {}", r.formula_count);
                    println!("{} holds at:  {:?}", r.separator, r.separator_extension);
                    println!("agree at m, m+2: {} of {}", r.omega_agreement, r.formula_count);
                    println!("parity violations: {}", r.total_violations);
                }
            }
            let ok = r.all_agree()
                && r.total_violations == 0
                && r.separator_at_omega != r.separator_at_omega_plus2;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Prove { proof } => {
            let pf = parse_proof(&read(&proof)?).map_err(data)?;
            let verdict = check_proof(&pf.proof, &pf.logic);
            let v = match &verdict {
                ProofVerdict::Valid => json!({ "valid": true }),
                ProofVerdict::Invalid { step, reason } => {
                    json!({ "valid": false, "step": step, "reason": reason })
                }
            };
            if emit == Emit::Json {
                emit_json(&v);
            } else {
                match &verdict {
                    ProofVerdict::Valid => println!("valid"),
                    ProofVerdict::Invalid { step, reason } => println!("invalid at step {step}: {reason}"),
                }
            }
            Ok(if verdict.is_valid() { 0 } else { 1 })
        }
        Command::Bound { sigma_size } => {
            let b = fmp_bound(sigma_size).map_err(data)?;
            let number = |t: &TowerInt| -> BoundNumber {
                if t.is_printable() {
                    BoundNumber::Exact(RawValue::from_string(t.render()).expect("decimal digits"))
                } else {
                    BoundNumber::Symbolic(t.render())
                }
            };
            let v = BoundReport {
                per_depth: b.per_depth.iter().map(number).collect(),
                total: number(&b.total),
                depth_bound: b.depth_bound,
            };
            // The bound is a JSON document in every output mode.
            println!("{}", serde_json::to_string(&v).expect("json"));
            Ok(0)
        }
        Command::Fuzz {
            schemas,
            user,
            class: c,
            trials,
            max_worlds,
        } => {
            let mut logic = Vec::new();
            for name in &schemas {
                logic.push(Schema::built_in(name).ok_or_else(|| usage(format!("unknown schema {name:?}")))?);
            }
            for spec in &user {
                let (name, template) = spec
                    .split_once('=')
                    .ok_or_else(|| usage(format!("--user expects NAME=TEMPLATE, got {spec:?}")))?;
                logic.push(Schema::user(name.trim(), template).map_err(data)?);
            }
            if max_worlds == 0 {
                return Err(usage("--max-worlds must be positive"));
            }
            let cfg = FuzzConfig::new(class(&c)?, trials, max_worlds, cli.seed);
            let r = soundness_fuzz(&logic, &cfg);
            if emit == Emit::Json {
                emit_json(&serde_json::to_value(&r).expect("json"));
            } else {
                for (name, t) in &r.schemas {
                    println!("{name}: {} instances, {} failures", t.instances, t.failures);
                }
                for (name, t) in &r.rules {
                    println!(
                        "rule {name}: premises held on {} models, {} failures",
                        t.premises_held, t.failures
                    );
                }
                for f in &r.examples {
                    println!(
                        "trial {} ({}): {} fails at world {} of {:?}",
                        f.trial, f.origin, f.formula, f.world, f.edges
                    );
                }
            }
            Ok(if r.passed() { 0 } else { 1 })
        }
    }
}

fn witness_json(w: &Witness) -> Value {
    let nm = NamedModel::with_default_names(w.model.clone());
    json!({ "model": to_json_value(&nm, RelationKey::Edges), "world": nm.names[w.world] })
}

fn search(args: SearchArgs, emit: Emit, sat: bool) -> Outcome {
    if args.max_worlds == 0 {
        return Err(usage("--max-worlds must be positive"));
    }
    let f = formula(&args.formula)?;
    let mut cfg = SearchConfig::new(class(&args.class)?, args.max_worlds);
    cfg.time_budget = args.time_budget_ms.map(Duration::from_millis);
    let found = if sat {
        bounded_sat(&f, &cfg).map(|r| match r {
            SatResult::Satisfiable(w) => Some(w),
            SatResult::NoneUpToBound { .. } => None,
        })
    } else {
        bounded_valid(&f, &cfg).map(|r| match r {
            ValidResult::Counterexample(w) => Some(w),
            ValidResult::NoCounterexampleUpToBound { .. } => None,
        })
    };
    let found = match found {
        Ok(w) => w,
        Err(SearchError::TimeBudgetExceeded(p)) => {
            if emit == Emit::Json {
                emit_json(&json!({ "result": "budgetExceeded", "progress": p }));
            } else {
                println!(
                    "time budget exceeded at {} worlds ({} of {} frames)",
                    p.worlds, p.frames_checked, p.frames_at_size
                );
            }
            return Ok(BUDGET);
        }
        Err(e @ SearchError::InvalidInput(_)) => return Err(usage(e.to_string())),
        Err(e) => return Err(data(e)),
    };
    let (label, code) = match (&found, sat) {
        (Some(_), true) => ("satisfiable", 0),
        (None, true) => ("noneUpToBound", 1),
        (Some(_), false) => ("counterexample", 1),
        (None, false) => ("noCounterexampleUpToBound", 0),
    };
    if emit == Emit::Json {
        let mut v = json!({ "result": label, "maxWorlds": args.max_worlds });
        if let Some(w) = &found {
            v["witness"] = witness_json(w);
        }
        emit_json(&v);
    } else {
        println!("{label}");
        if let Some(w) = &found {
            let nm = NamedModel::with_default_names(w.model.clone());
            println!("at world {}", nm.names[w.world]);
            println!("{}", model_to_json(&nm));
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0
            || rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .is_err()
        {
            eprintln!("error: --jobs must be a positive thread count");
            return ExitCode::from(USAGE);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

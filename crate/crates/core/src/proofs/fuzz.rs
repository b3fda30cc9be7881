//! Randomized soundness checks: schema instances must be valid on every
//! sampled model of the class, and the rules must preserve validity on each
//! sampled model.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{as_implication, fix_instance, instantiate, is_tautology, Schema};
use crate::frames::random::random_model;
use crate::frames::{FrameClass, Model};
use crate::semantics::eval_closed;
use crate::symbol::Symbol;
use crate::syntax::random::FormulaGen;
use crate::syntax::Formula;

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub class: FrameClass,
    pub trials: usize,
    pub max_worlds: usize,
    pub seed: u64,
    /// Models sampled per trial.
    pub models_per_trial: usize,
    /// Depth of random metavariable fillings.
    pub filler_depth: usize,
}

impl FuzzConfig {
    pub fn new(class: FrameClass, trials: usize, max_worlds: usize, seed: u64) -> FuzzConfig {
        FuzzConfig {
            class,
            trials,
            max_worlds,
            seed,
            models_per_trial: 3,
            filler_depth: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzFailure {
    pub trial: usize,
    /// Schema name, or the rule name for a rule-soundness failure.
    pub origin: String,
    pub formula: String,
    pub worlds: usize,
    pub edges: Vec<(usize, usize)>,
    pub valuation: BTreeMap<String, Vec<usize>>,
    /// A world where the formula is false.
    pub world: usize,
    #[serde(skip)]
    pub model: Model,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SchemaTally {
    pub instances: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleTally {
    /// Sampled models on which every premise was valid.
    pub premises_held: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzReport {
    pub class: FrameClass,
    pub trials: usize,
    pub max_worlds: usize,
    pub seed: u64,
    pub failures: usize,
    pub rule_failures: usize,
    pub schemas: BTreeMap<String, SchemaTally>,
    pub rules: BTreeMap<String, RuleTally>,
    /// The first few failures in trial order.
    pub examples: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.rule_failures == 0
    }
}

const MAX_EXAMPLES: usize = 10;
const RULES: [&str; 3] = ["MP", "Nec", "Induction"];

fn atoms() -> [Symbol; 2] {
    [Symbol::new("p"), Symbol::new("q")]
}

fn failure(trial: usize, origin: &str, f: &Formula, m: &Model, world: usize) -> FuzzFailure {
    FuzzFailure {
        trial,
        origin: origin.to_string(),
        formula: f.to_string(),
        worlds: m.len(),
        edges: m.frame.edges().collect(),
        valuation: m
            .valuation
            .iter()
            .map(|(k, v)| (k.as_str().to_string(), v.to_vec()))
            .collect(),
        world,
        model: m.clone(),
    }
}

/// First world refuting `f`, if any.
fn refuted_at(m: &Model, f: &Formula) -> Option<usize> {
    let t = eval_closed(m, f).expect("fuzz formulas are closed over atoms");
    t.complement().first()
}

/// A propositional skeleton over `?a`, `?b`, `?c` that is a tautology.
fn tautology_skeleton<R: Rng>(rng: &mut R) -> Formula {
    let letters: Vec<Formula> = ["?a", "?b", "?c"].iter().map(|s| Formula::var(s)).collect();
    for _ in 0..30 {
        let s = boolean(rng, &letters, 4);
        if is_tautology(&s).unwrap_or(false) {
            return s;
        }
    }
    let (a, b, c) = (letters[0].clone(), letters[1].clone(), letters[2].clone());
    let imp = Formula::implies;
    let fixed = [
        imp(a.clone(), imp(b.clone(), a.clone())),
        imp(
            imp(a.clone(), imp(b.clone(), c.clone())),
            imp(imp(a.clone(), b.clone()), imp(a.clone(), c)),
        ),
        imp(
            imp(Formula::neg(b.clone()), Formula::neg(a.clone())),
            imp(a.clone(), b.clone()),
        ),
        Formula::or(a.clone(), Formula::neg(a.clone())),
        imp(Formula::and(a.clone(), b), a.clone()),
        Formula::iff(Formula::neg(Formula::neg(a.clone())), a),
    ];
    fixed.choose(rng).expect("nonempty").clone()
}

fn boolean<R: Rng>(rng: &mut R, letters: &[Formula], depth: usize) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 3) {
        return letters.choose(rng).expect("nonempty").clone();
    }
    match rng.gen_range(0..4) {
        0 => Formula::neg(boolean(rng, letters, depth - 1)),
        1 => Formula::and(boolean(rng, letters, depth - 1), boolean(rng, letters, depth - 1)),
        2 => Formula::or(boolean(rng, letters, depth - 1), boolean(rng, letters, depth - 1)),
        _ => Formula::implies(boolean(rng, letters, depth - 1), boolean(rng, letters, depth - 1)),
    }
}

fn random_instance<R: Rng>(rng: &mut R, s: &Schema, gen: &FormulaGen) -> Formula {
    match s {
        Schema::Taut => {
            let skeleton = tautology_skeleton(rng);
            let fill = skeleton
                .free_vars()
                .into_iter()
                .map(|m| (m, gen.formula(rng)))
                .collect();
            instantiate(&skeleton, &fill)
        }
        Schema::Fix => {
            let x = Symbol::new("Y");
            fix_instance(x, &gen.positive_in(rng, x))
        }
        _ => {
            let template = s.template().expect("template schema");
            let fill = s
                .metavariables()
                .into_iter()
                .map(|m| (m, gen.formula(rng)))
                .collect();
            instantiate(&template, &fill)
        }
    }
}

struct Outcome {
    schema: String,
    failures: Vec<FuzzFailure>,
    rule: &'static str,
    premises_held: usize,
    rule_failures: Vec<FuzzFailure>,
}

/// Premises and conclusion of one random rule application.
fn rule_application<R: Rng>(
    rng: &mut R,
    rule: &str,
    instance: &Formula,
    gen: &FormulaGen,
) -> (Vec<Formula>, Formula) {
    match rule {
        "Nec" => (
            vec![instance.clone()],
            Formula::boxed(instance.clone()).alpha_normalize(),
        ),
        "MP" => match as_implication(instance) {
            Some((a, b)) => (vec![a.clone(), instance.clone()], b.clone()),
            None => {
                let psi = gen.formula(rng);
                let imp = Formula::implies(instance.clone(), psi.clone()).alpha_normalize();
                (vec![instance.clone(), imp], psi)
            }
        },
        _ => {
            let x = Symbol::new("Y");
            let theta = gen.positive_in(rng, x);
            let phi = gen.formula(rng);
            let premise = Formula::implies(phi.clone(), theta.substitute_one(x, &phi)).alpha_normalize();
            let conclusion = Formula::implies(phi, Formula::nu(x, theta)).alpha_normalize();
            (vec![premise], conclusion)
        }
    }
}

fn run_trial(cfg: &FuzzConfig, logic: &[Schema], trial: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let gen = FormulaGen::new(&["p", "q"], cfg.filler_depth);
    let schema = &logic[trial % logic.len()];
    let instance = random_instance(&mut rng, schema, &gen);
    let rule = RULES[trial % RULES.len()];
    let (premises, conclusion) = rule_application(&mut rng, rule, &instance, &gen);
    let mut out = Outcome {
        schema: schema.name().to_string(),
        failures: Vec::new(),
        rule,
        premises_held: 0,
        rule_failures: Vec::new(),
    };
    for _ in 0..cfg.models_per_trial {
        let m = random_model(&mut rng, cfg.class, cfg.max_worlds, &atoms());
        if let Some(w) = refuted_at(&m, &instance) {
            out.failures.push(failure(trial, schema.name(), &instance, &m, w));
        }
        if premises.iter().all(|p| refuted_at(&m, p).is_none()) {
            out.premises_held += 1;
            if let Some(w) = refuted_at(&m, &conclusion) {
                out.rule_failures.push(failure(trial, rule, &conclusion, &m, w));
            }
        }
    }
    out
}

/// Trial `t` uses schema `logic[t mod |logic|]` and its own random stream,
/// so the report depends only on the configuration.
pub fn soundness_fuzz(logic: &[Schema], cfg: &FuzzConfig) -> FuzzReport {
    let mut report = FuzzReport {
        class: cfg.class,
        trials: cfg.trials,
        max_worlds: cfg.max_worlds,
        seed: cfg.seed,
        failures: 0,
        rule_failures: 0,
        schemas: BTreeMap::new(),
        rules: BTreeMap::new(),
        examples: Vec::new(),
    };
    if logic.is_empty() {
        return report;
    }
    let outcomes: Vec<Outcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, logic, t))
        .collect();
    for o in outcomes {
        let tally = report.schemas.entry(o.schema).or_default();
        tally.instances += 1;
        tally.failures += o.failures.len();
        report.failures += o.failures.len();
        let rt = report.rules.entry(o.rule.to_string()).or_default();
        rt.premises_held += o.premises_held;
        rt.failures += o.rule_failures.len();
        report.rule_failures += o.rule_failures.len();
        for f in o.failures.into_iter().chain(o.rule_failures) {
            if report.examples.len() < MAX_EXAMPLES {
                report.examples.push(f);
            }
        }
    }
    report
}

//! Model checking over finite models.
//!
//! `◇` is the relational derivative and `νx.φ` is computed by downward
//! iteration from the full world set, `X_{k+1} = X_k ∩ ∥φ∥_{x:=X_k}`. For a
//! body positive in `x` the intersection is redundant and this is the plain
//! Kleene iteration; keeping it makes termination unconditional.

use std::collections::HashMap;

use thiserror::Error;

use crate::frames::Model;
use crate::symbol::Symbol;
use crate::syntax::Formula;
use crate::worldset::WorldSet;

/// Values for variables. Entries shadow the model's valuation.
pub type Environment = HashMap<Symbol, WorldSet>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(Symbol),
    #[error("formula is not a greatest fixpoint")]
    NotAFixpoint,
    #[error("environment entry for {0} has width {1}, model has {2} worlds")]
    WidthMismatch(Symbol, usize, usize),
}

struct Evaluator<'a> {
    model: &'a Model,
    env: &'a Environment,
    scope: Vec<(Symbol, WorldSet)>,
}

impl Evaluator<'_> {
    fn lookup(&self, x: Symbol) -> Result<WorldSet, EvalError> {
        if let Some((_, s)) = self.scope.iter().rev().find(|(y, _)| *y == x) {
            return Ok(s.clone());
        }
        if let Some(s) = self.env.get(&x) {
            return Ok(s.clone());
        }
        if let Some(s) = self.model.valuation.get(&x) {
            return Ok(s.clone());
        }
        if x.is_atom() {
            Ok(WorldSet::empty(self.model.len()))
        } else {
            Err(EvalError::UnboundVariable(x))
        }
    }

    fn eval(&mut self, f: &Formula) -> Result<WorldSet, EvalError> {
        Ok(match f {
            Formula::Top => WorldSet::full(self.model.len()),
            Formula::Var(x) => self.lookup(*x)?,
            Formula::Neg(a) => self.eval(a)?.complement(),
            Formula::And(a, b) => {
                let mut s = self.eval(a)?;
                if !s.is_empty() {
                    s.intersect_with(&self.eval(b)?);
                }
                s
            }
            Formula::Dia(a) => {
                let s = self.eval(a)?;
                self.model.frame.derivative(&s)
            }
            Formula::Nu(x, body) => {
                let mut cur = WorldSet::full(self.model.len());
                loop {
                    let next = self.step(*x, body, &cur)?;
                    if next == cur {
                        break cur;
                    }
                    cur = next;
                }
            }
        })
    }

    fn step(&mut self, x: Symbol, body: &Formula, cur: &WorldSet) -> Result<WorldSet, EvalError> {
        self.scope.push((x, cur.clone()));
        let r = self.eval(body);
        self.scope.pop();
        Ok(r?.intersection(cur))
    }
}

fn check_env(m: &Model, env: &Environment) -> Result<(), EvalError> {
    for (x, s) in env {
        if s.universe_len() != m.len() {
            return Err(EvalError::WidthMismatch(*x, s.universe_len(), m.len()));
        }
    }
    Ok(())
}

/// The set of worlds where `f` holds.
///
/// Names are resolved in the environment, then the valuation; an atom
/// (lowercase name) missing from both is false everywhere, any other missing
/// name is an error.
pub fn evaluate(m: &Model, f: &Formula, env: &Environment) -> Result<WorldSet, EvalError> {
    check_env(m, env)?;
    Evaluator {
        model: m,
        env,
        scope: Vec::new(),
    }
    .eval(f)
}

/// Evaluation with an empty environment.
pub fn eval_closed(m: &Model, f: &Formula) -> Result<WorldSet, EvalError> {
    evaluate(m, f, &Environment::new())
}

/// Evaluation treating every unresolved name as false everywhere, so open
/// formulas can be compared across models.
pub fn eval_lenient(m: &Model, f: &Formula) -> WorldSet {
    let mut env = Environment::new();
    for x in f.free_vars() {
        if !m.valuation.contains_key(&x) {
            env.insert(x, WorldSet::empty(m.len()));
        }
    }
    evaluate(m, f, &env).expect("every free name is bound")
}

/// Approximants of a greatest fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalTrace {
    /// `approximants[0]` is every world and the last two entries are equal.
    pub approximants: Vec<WorldSet>,
    /// The first `k` with `approximants[k] == approximants[k + 1]`.
    pub stabilization: usize,
}

impl EvalTrace {
    pub fn fixpoint(&self) -> &WorldSet {
        self.approximants.last().expect("trace is never empty")
    }
}

pub fn gfp_trace(m: &Model, f: &Formula, env: &Environment) -> Result<EvalTrace, EvalError> {
    let Formula::Nu(x, body) = f else {
        return Err(EvalError::NotAFixpoint);
    };
    check_env(m, env)?;
    let mut ev = Evaluator {
        model: m,
        env,
        scope: Vec::new(),
    };
    let mut approximants = vec![WorldSet::full(m.len())];
    loop {
        let cur = approximants.last().unwrap().clone();
        let next = ev.step(*x, body, &cur)?;
        let done = next == cur;
        approximants.push(next);
        if done {
            break;
        }
    }
    let stabilization = approximants.len() - 2;
    Ok(EvalTrace {
        approximants,
        stabilization,
    })
}

/// The d-neighbourhood filter of a world: `U` belongs to it iff `x↑ ⊆ U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DNeighborhoods {
    minimal: WorldSet,
}

impl DNeighborhoods {
    pub fn minimal(&self) -> &WorldSet {
        &self.minimal
    }

    pub fn contains(&self, u: &WorldSet) -> bool {
        self.minimal.is_subset(u)
    }
}

pub fn d_neighborhoods(m: &Model, x: usize) -> DNeighborhoods {
    DNeighborhoods {
        minimal: m.frame.successors(x).clone(),
    }
}

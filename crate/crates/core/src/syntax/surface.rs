use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::formula::{replace_free_unchecked, Formula, Freshener};
use crate::symbol::Symbol;

/// Formulas as written, including every abbreviation the grammar accepts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceFormula {
    Top,
    Bot,
    Var(Symbol),
    Neg(Box<SurfaceFormula>),
    And(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Or(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Implies(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Iff(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Dia(Box<SurfaceFormula>),
    BoxOp(Box<SurfaceFormula>),
    StarDia(Box<SurfaceFormula>),
    StarBox(Box<SurfaceFormula>),
    Nu(Symbol, Box<SurfaceFormula>),
    Mu(Symbol, Box<SurfaceFormula>),
    TangleD(Vec<SurfaceFormula>),
    TangleC(Vec<SurfaceFormula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("variable {variable} occurs negatively under its binder (path {path})")]
    NotPositive { variable: Symbol, path: String },
}

use SurfaceFormula as S;

impl SurfaceFormula {
    pub fn var(name: &str) -> S {
        S::Var(Symbol::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: S) -> S {
        S::Neg(Box::new(a))
    }

    pub fn and(a: S, b: S) -> S {
        S::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: S, b: S) -> S {
        S::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: S, b: S) -> S {
        S::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: S, b: S) -> S {
        S::Iff(Box::new(a), Box::new(b))
    }

    pub fn dia(a: S) -> S {
        S::Dia(Box::new(a))
    }

    pub fn boxed(a: S) -> S {
        S::BoxOp(Box::new(a))
    }

    pub fn star_dia(a: S) -> S {
        S::StarDia(Box::new(a))
    }

    pub fn star_box(a: S) -> S {
        S::StarBox(Box::new(a))
    }

    pub fn nu(x: &str, a: S) -> S {
        S::Nu(Symbol::new(x), Box::new(a))
    }

    pub fn mu(x: &str, a: S) -> S {
        S::Mu(Symbol::new(x), Box::new(a))
    }

    /// Number of nodes as written. A tangle counts one node plus its arguments.
    pub fn size(&self) -> usize {
        match self {
            S::Top | S::Bot | S::Var(_) => 1,
            S::Neg(a)
            | S::Dia(a)
            | S::BoxOp(a)
            | S::StarDia(a)
            | S::StarBox(a)
            | S::Nu(_, a)
            | S::Mu(_, a) => 1 + a.size(),
            S::And(a, b) | S::Or(a, b) | S::Implies(a, b) | S::Iff(a, b) => 1 + a.size() + b.size(),
            S::TangleD(items) | S::TangleC(items) => 1 + items.iter().map(S::size).sum::<usize>(),
        }
    }

    /// Embeds a core formula without changing its shape.
    pub fn from_core(f: &Formula) -> S {
        match f {
            Formula::Top => S::Top,
            Formula::Var(x) => S::Var(*x),
            Formula::Neg(a) => S::neg(S::from_core(a)),
            Formula::And(a, b) => S::and(S::from_core(a), S::from_core(b)),
            Formula::Dia(a) => S::dia(S::from_core(a)),
            Formula::Nu(x, a) => S::Nu(*x, Box::new(S::from_core(a))),
        }
    }

    /// Expands abbreviations, checks that every binder is positive in its
    /// variable and alpha-normalizes the result.
    pub fn normalize(&self) -> Result<Formula, NormalizeError> {
        let core = self.expand();
        if let Some((variable, path)) = core.positivity_violation() {
            return Err(NormalizeError::NotPositive { variable, path });
        }
        Ok(core.alpha_normalize())
    }

    /// Abbreviation expansion only; the result may repeat binder names.
    pub fn expand(&self) -> Formula {
        match self {
            S::Top => Formula::Top,
            S::Bot => Formula::bot(),
            S::Var(x) => Formula::Var(*x),
            S::Neg(a) => Formula::neg(a.expand()),
            S::And(a, b) => Formula::and(a.expand(), b.expand()),
            S::Or(a, b) => Formula::or(a.expand(), b.expand()),
            S::Implies(a, b) => Formula::implies(a.expand(), b.expand()),
            S::Iff(a, b) => Formula::iff(a.expand(), b.expand()),
            S::Dia(a) => Formula::dia(a.expand()),
            S::BoxOp(a) => Formula::boxed(a.expand()),
            S::StarDia(a) => Formula::star_dia(a.expand()),
            S::StarBox(a) => Formula::star_box(a.expand()),
            S::Nu(x, a) => Formula::nu(*x, a.expand()),
            S::Mu(x, a) => {
                let body = replace_free_unchecked(&a.expand(), *x, &Formula::neg(Formula::Var(*x)));
                Formula::neg(Formula::nu(*x, Formula::neg(body)))
            }
            S::TangleD(items) => tangle(items, Formula::dia),
            S::TangleC(items) => tangle(items, Formula::star_dia),
        }
    }
}

/// `νx. ⋀_γ m(x ∧ γ)` with `x` fresh for the arguments.
fn tangle(items: &[S], modality: fn(Formula) -> Formula) -> Formula {
    let args: Vec<Formula> = items.iter().map(S::expand).collect();
    let mut names: HashSet<Symbol> = HashSet::new();
    for a in &args {
        names.extend(a.names());
    }
    let base = Symbol::new("X");
    let x = if names.contains(&base) {
        Freshener::new(names).next(base)
    } else {
        base
    };
    let body = Formula::conj(
        args.into_iter()
            .map(|g| modality(Formula::and(Formula::Var(x), g))),
    );
    Formula::nu(x, body)
}

impl fmt::Display for SurfaceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print(self))
    }
}

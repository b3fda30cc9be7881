//! Seeded random generation of well-formed core formulas.

use rand::Rng;

use super::formula::Formula;
use crate::symbol::Symbol;

#[derive(Clone, Debug)]
pub struct FormulaGen {
    pub atoms: Vec<Symbol>,
    pub max_depth: usize,
    /// Probability weight of a fixpoint node relative to the other connectives.
    pub fixpoint_weight: u32,
}

impl FormulaGen {
    pub fn new(atoms: &[&str], max_depth: usize) -> FormulaGen {
        FormulaGen {
            atoms: atoms.iter().map(|a| Symbol::new(a)).collect(),
            max_depth,
            fixpoint_weight: 1,
        }
    }

    pub fn without_fixpoints(mut self) -> FormulaGen {
        self.fixpoint_weight = 0;
        self
    }

    /// A closed-over-atoms formula: every variable occurrence is an atom or
    /// positively bound. The result is alpha-normal.
    pub fn formula<R: Rng>(&self, rng: &mut R) -> Formula {
        let mut st = State::default();
        self.go(rng, self.max_depth, &mut st).alpha_normalize()
    }

    /// A formula in which `x` occurs only positively and may occur free.
    pub fn positive_in<R: Rng>(&self, rng: &mut R, x: Symbol) -> Formula {
        let mut st = State::default();
        st.vars.push((x, false));
        self.go(rng, self.max_depth, &mut st).alpha_normalize()
    }

    fn go<R: Rng>(&self, rng: &mut R, depth: usize, st: &mut State) -> Formula {
        if depth == 0 || rng.gen_ratio(1, 4) {
            return self.leaf(rng, st);
        }
        let weights = [2u32, 2, 3, 2, self.fixpoint_weight];
        let total: u32 = weights.iter().sum();
        let mut pick = rng.gen_range(0..total);
        let mut choice = 0;
        while pick >= weights[choice] {
            pick -= weights[choice];
            choice += 1;
        }
        match choice {
            0 => {
                st.negated = !st.negated;
                let a = self.go(rng, depth - 1, st);
                st.negated = !st.negated;
                Formula::neg(a)
            }
            1 => Formula::dia(self.go(rng, depth - 1, st)),
            2 => {
                let a = self.go(rng, depth - 1, st);
                Formula::and(a, self.go(rng, depth - 1, st))
            }
            3 => {
                st.negated = !st.negated;
                let a = self.go(rng, depth - 1, st);
                let b = self.go(rng, depth - 1, st);
                st.negated = !st.negated;
                Formula::neg(Formula::and(a, b))
            }
            _ => {
                st.counter += 1;
                let x = Symbol::new(&format!("X{}", st.counter));
                st.vars.push((x, st.negated));
                let body = self.go(rng, depth - 1, st);
                st.vars.pop();
                Formula::nu(x, body)
            }
        }
    }

    fn leaf<R: Rng>(&self, rng: &mut R, st: &State) -> Formula {
        let usable: Vec<Symbol> = st
            .vars
            .iter()
            .filter(|(_, parity)| *parity == st.negated)
            .map(|(x, _)| *x)
            .collect();
        let n = self.atoms.len() + usable.len() + 1;
        let k = rng.gen_range(0..n);
        if k < self.atoms.len() {
            Formula::Var(self.atoms[k])
        } else if k < self.atoms.len() + usable.len() {
            Formula::Var(usable[k - self.atoms.len()])
        } else if rng.gen_bool(0.5) {
            Formula::Top
        } else {
            Formula::bot()
        }
    }
}

#[derive(Default)]
struct State {
    vars: Vec<(Symbol, bool)>,
    negated: bool,
    counter: usize,
}

//! The spine model and the gap between the tangled-derivative fragment and
//! the full calculus.
//!
//! The spine has worlds `0..m` for finite ordinals followed by `m`, `m+1`,
//! `m+2` standing for `ω`, `ω+1`, `ω+2`. A world sees every world of smaller
//! index, odd worlds (and `ω+1`) see themselves, and `ω+1` sees `ω+2`. The
//! atom `p` holds exactly at the odd worlds.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::frames::{Frame, Model};
use crate::semantics::eval_closed;
use crate::symbol::Symbol;
use crate::syntax::{print, SurfaceFormula};
use crate::worldset::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TangleError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    FiniteEven,
    FiniteOdd,
    Omega,
    OmegaPlus1,
    OmegaPlus2,
}

impl Role {
    /// Parity by ordinal, not by index: `ω` and `ω+2` are even.
    pub fn is_odd(self) -> bool {
        matches!(self, Role::FiniteOdd | Role::OmegaPlus1)
    }
}

pub fn role(m: usize, w: usize) -> Role {
    match w.checked_sub(m) {
        None if w.is_multiple_of(2) => Role::FiniteEven,
        None => Role::FiniteOdd,
        Some(0) => Role::Omega,
        Some(1) => Role::OmegaPlus1,
        Some(2) => Role::OmegaPlus2,
        Some(_) => panic!("world {w} is outside the spine of size {}", m + 3),
    }
}

pub fn build_spine(m: usize) -> Result<Model, TangleError> {
    if m < 2 {
        return Err(TangleError::InvalidInput(format!("spine needs m >= 2, got {m}")));
    }
    let n = m + 3;
    let mut f = Frame::new(n);
    for a in 0..n {
        for b in 0..a {
            f.add_edge(a, b);
        }
        if role(m, a).is_odd() {
            f.add_edge(a, a);
        }
    }
    f.add_edge(m + 1, m + 2);
    let odd = WorldSet::from_worlds(n, (0..n).filter(|&w| role(m, w).is_odd()));
    let mut model = Model::new(f);
    model.valuation.insert(Symbol::new("p"), odd);
    Ok(model)
}

/// `⟨*⟩∞{p, ¬p}`
pub fn separating_formula() -> SurfaceFormula {
    let p = SurfaceFormula::var("p");
    SurfaceFormula::TangleC(vec![p.clone(), SurfaceFormula::neg(p)])
}

/// Formulas built from the atoms, `⊤`, `¬`, `∧`, `∨`, `◇` and nonempty
/// `◇∞{...}`, one per class under double negation, commutativity and
/// idempotence of `∧`, `∨`, and set semantics of tangle arguments. The empty
/// tangle is left out, being equivalent to `⊤`. Ordered by size, then by
/// construction.
pub fn enumerate_tangle_fragment(atoms: &[&str], size_bound: usize) -> Vec<SurfaceFormula> {
    let mut e = Enumeration {
        all: Vec::new(),
        by_size: vec![Vec::new(); size_bound + 1],
    };
    if size_bound == 0 {
        return e.all;
    }
    let mut base: Vec<&str> = atoms.to_vec();
    base.sort_unstable();
    base.dedup();
    for a in base {
        e.push(SurfaceFormula::var(a));
    }
    e.push(SurfaceFormula::Top);
    for s in 2..=size_bound {
        for i in e.by_size[s - 1].clone() {
            if !matches!(e.all[i], SurfaceFormula::Neg(_)) {
                e.push(SurfaceFormula::neg(e.all[i].clone()));
            }
        }
        for i in e.by_size[s - 1].clone() {
            e.push(SurfaceFormula::dia(e.all[i].clone()));
        }
        let binary: [fn(SurfaceFormula, SurfaceFormula) -> SurfaceFormula; 2] =
            [SurfaceFormula::and, SurfaceFormula::or];
        for make in binary {
            for left in 1..=(s - 1) / 2 {
                let right = s - 1 - left;
                for i in e.by_size[left].clone() {
                    for j in e.by_size[right].clone() {
                        if i < j {
                            e.push(make(e.all[i].clone(), e.all[j].clone()));
                        }
                    }
                }
            }
        }
        let mut lists = Vec::new();
        e.tangle_args(s - 1, 0, &mut Vec::new(), &mut lists);
        for ids in lists {
            let items = ids.iter().map(|&i| e.all[i].clone()).collect();
            e.push(SurfaceFormula::TangleD(items));
        }
    }
    e.all
}

struct Enumeration {
    all: Vec<SurfaceFormula>,
    /// Ids of the formulas of each size.
    by_size: Vec<Vec<usize>>,
}

impl Enumeration {
    fn push(&mut self, f: SurfaceFormula) {
        self.by_size[f.size()].push(self.all.len());
        self.all.push(f);
    }

    /// Strictly increasing id lists whose sizes sum to `remaining`.
    fn tangle_args(
        &self,
        remaining: usize,
        min_id: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            if !chosen.is_empty() {
                out.push(chosen.clone());
            }
            return;
        }
        let mut candidates: Vec<(usize, usize)> = (1..=remaining)
            .flat_map(|s| self.by_size[s].iter().map(move |&i| (i, s)))
            .filter(|&(i, _)| i >= min_id)
            .collect();
        candidates.sort_unstable();
        for (i, s) in candidates {
            chosen.push(i);
            self.tangle_args(remaining - s, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FormulaRow {
    pub formula: String,
    pub size: usize,
    /// `2|φ|`: pairs strictly above this index are compared.
    pub cutoff: usize,
    /// Same-parity pairs above the cutoff that disagree.
    pub violations: usize,
    pub value_at_omega: bool,
    pub value_at_omega_plus2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub m: usize,
    pub size_bound: usize,
    pub formula_count: usize,
    pub separator: String,
    pub separator_extension: Vec<usize>,
    pub separator_at_omega: bool,
    pub separator_at_omega_plus2: bool,
    /// Formulas taking the same value at `ω` and `ω+2`.
    pub omega_agreement: usize,
    pub total_violations: usize,
    pub rows: Vec<FormulaRow>,
}

impl ExperimentReport {
    pub fn extension_is_top_pair(&self) -> bool {
        self.separator_extension == vec![self.m + 1, self.m + 2]
    }

    pub fn all_agree(&self) -> bool {
        self.omega_agreement == self.formula_count
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("formula,size,cutoff,violations,valueAtOmega,valueAtOmegaPlus2\n");
        for r in &self.rows {
            out.push_str(&format!(
                "\"{}\",{},{},{},{},{}\n",
                r.formula.replace('"', "\"\""),
                r.size,
                r.cutoff,
                r.violations,
                r.value_at_omega,
                r.value_at_omega_plus2
            ));
        }
        out
    }
}

fn row(spine: &Model, m: usize, f: &SurfaceFormula) -> FormulaRow {
    let core = f.normalize().expect("enumerated formulas are positive");
    let truth = eval_closed(spine, &core).expect("enumerated formulas are closed over p");
    let cutoff = 2 * f.size();
    let mut counts = [[0usize; 2]; 2];
    for w in cutoff + 1..m + 3 {
        counts[role(m, w).is_odd() as usize][truth.contains(w) as usize] += 1;
    }
    let violations = counts.iter().map(|c| c[0] * c[1]).sum();
    FormulaRow {
        formula: print(f),
        size: f.size(),
        cutoff,
        violations,
        value_at_omega: truth.contains(m),
        value_at_omega_plus2: truth.contains(m + 2),
    }
}

/// Evaluates every enumerated formula over `{p}` on the spine of size `m`.
pub fn expressivity_experiment(m: usize, size_bound: usize) -> Result<ExperimentReport, TangleError> {
    if size_bound == 0 {
        return Err(TangleError::InvalidInput("size bound must be at least 1".into()));
    }
    if m < 4 * size_bound + 2 {
        return Err(TangleError::PreconditionViolated(format!(
            "m = {m} is below 4 * {size_bound} + 2"
        )));
    }
    let spine = build_spine(m)?;
    let formulas = enumerate_tangle_fragment(&["p"], size_bound);
    let rows: Vec<FormulaRow> = formulas.par_iter().map(|f| row(&spine, m, f)).collect();
    let sep = separating_formula();
    let ext = eval_closed(&spine, &sep.normalize().expect("separator is positive"))
        .expect("separator is closed over p");
    Ok(ExperimentReport {
        m,
        size_bound,
        formula_count: rows.len(),
        separator: print(&sep),
        separator_extension: ext.to_vec(),
        separator_at_omega: ext.contains(m),
        separator_at_omega_plus2: ext.contains(m + 2),
        omega_agreement: rows
            .iter()
            .filter(|r| r.value_at_omega == r.value_at_omega_plus2)
            .count(),
        total_violations: rows.iter().map(|r| r.violations).sum(),
        rows,
    })
}

/// Truth values at `ω`, `ω+1`, `ω+2`.
pub fn top_values(m: usize, f: &SurfaceFormula) -> Result<[bool; 3], crate::Error> {
    let spine = build_spine(m)?;
    let t = eval_closed(&spine, &f.normalize()?)?;
    Ok([t.contains(m), t.contains(m + 1), t.contains(m + 2)])
}

/// Distinct formulas by printed form; enumeration never repeats one.
pub fn distinct_count(fs: &[SurfaceFormula]) -> usize {
    fs.iter().map(print).collect::<BTreeSet<_>>().len()
}

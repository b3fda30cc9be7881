//! The finite set Σ generated from a seed formula: subformulas and `⊤`,
//! closed under `¬` and `⟨*⟩`.
//!
//! Elements are stored as a modal prefix over `{¬, ⟨*⟩}` applied to a base
//! formula. Prefixes are kept in normal form by the rewrites `¬¬ → ε`,
//! `⟨*⟩⟨*⟩ → ⟨*⟩` and `⟨*⟩¬⟨*⟩¬⟨*⟩¬⟨*⟩ → ⟨*⟩¬⟨*⟩`. The last one is the
//! identity `◇□◇□ = ◇□` for the closure operator with a trailing negation
//! absorbed, and it leaves exactly fourteen normal prefixes. Bases never
//! start with a negation.

use std::collections::HashMap;
use std::fmt;

use super::formula::Formula;

/// A letter of a modal prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Neg,
    Star,
}

/// A normalized word over `{¬, ⟨*⟩}`, outermost letter first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Prefix(Vec<Letter>);

impl Prefix {
    pub fn empty() -> Prefix {
        Prefix(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn normalized(letters: &[Letter]) -> Prefix {
        let mut word: Vec<Letter> = Vec::with_capacity(letters.len());
        for &l in letters {
            word.push(l);
            loop {
                let n = word.len();
                if n >= 2 && word[n - 1] == word[n - 2] {
                    if word[n - 1] == Letter::Neg {
                        word.truncate(n - 2);
                    } else {
                        word.pop();
                    }
                    continue;
                }
                if n >= 7 && word[n - 7] == Letter::Star && alternating(&word[n - 7..]) {
                    word.truncate(n - 4);
                    continue;
                }
                break;
            }
        }
        Prefix(word)
    }

    /// Prepends a letter and renormalizes.
    pub fn apply(&self, l: Letter) -> Prefix {
        let mut letters = vec![l];
        letters.extend_from_slice(&self.0);
        Prefix::normalized(&letters)
    }

    /// All fourteen normal prefixes, shortest first.
    pub fn all() -> Vec<Prefix> {
        let mut out = vec![Prefix::empty()];
        let mut frontier = vec![Prefix::empty()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for l in [Letter::Neg, Letter::Star] {
                    let q = p.apply(l);
                    if !out.contains(&q) {
                        out.push(q.clone());
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.cmp(b)));
        out
    }

    pub fn wrap(&self, base: &Formula) -> Formula {
        let mut f = base.clone();
        for l in self.0.iter().rev() {
            f = match l {
                Letter::Neg => Formula::neg(f),
                Letter::Star => Formula::star_dia(f),
            };
        }
        f.alpha_normalize()
    }
}

fn alternating(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] != p[1])
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::Neg => "~",
                Letter::Star => "<*>",
            })?;
        }
        Ok(())
    }
}

/// Splits a formula into a normal prefix and a base that does not start with
/// a negation. `⟨*⟩` is recognized through its expansion `¬(¬ψ ∧ ¬◇ψ)`.
pub fn split_prefix(f: &Formula) -> (Prefix, Formula) {
    let mut letters = Vec::new();
    let mut cur = f.clone();
    loop {
        let next = match &cur {
            Formula::Neg(inner) => match &**inner {
                Formula::And(l, r) => match (&**l, &**r) {
                    (Formula::Neg(a), Formula::Neg(d)) => match &**d {
                        Formula::Dia(b) if a.alpha_eq(b) => Some((Letter::Star, (**a).clone())),
                        _ => None,
                    },
                    _ => None,
                }
                .or(Some((Letter::Neg, (**inner).clone()))),
                _ => Some((Letter::Neg, (**inner).clone())),
            },
            _ => None,
        };
        match next {
            Some((l, g)) => {
                letters.push(l);
                cur = g;
            }
            None => break,
        }
    }
    (Prefix::normalized(&letters), cur)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigmaElement {
    pub prefix: Prefix,
    /// Index into [`SigmaSet::bases`].
    pub base: usize,
}

#[derive(Clone, Debug)]
pub struct SigmaSet {
    seed: Formula,
    bases: Vec<Formula>,
    base_index: HashMap<Formula, usize>,
    elements: Vec<SigmaElement>,
    formulas: Vec<Formula>,
}

impl SigmaSet {
    pub fn new(seed: &Formula) -> SigmaSet {
        let mut bases = Vec::new();
        let mut base_index = HashMap::new();
        let prefixes = Prefix::all();
        let mut candidates = vec![Formula::Top];
        candidates.extend(seed.subformulas());
        for sub in candidates {
            let (_, base) = split_prefix(&sub);
            let key = base.alpha_key();
            if let std::collections::hash_map::Entry::Vacant(slot) = base_index.entry(key) {
                slot.insert(bases.len());
                bases.push(base);
            }
        }
        let mut elements = Vec::new();
        let mut formulas = Vec::new();
        for (i, base) in bases.iter().enumerate() {
            for p in &prefixes {
                formulas.push(p.wrap(base));
                elements.push(SigmaElement {
                    prefix: p.clone(),
                    base: i,
                });
            }
        }
        SigmaSet {
            seed: seed.clone(),
            bases,
            base_index,
            elements,
            formulas,
        }
    }

    pub fn seed(&self) -> &Formula {
        &self.seed
    }

    pub fn bases(&self) -> &[Formula] {
        &self.bases
    }

    pub fn elements(&self) -> &[SigmaElement] {
        &self.elements
    }

    /// Materialized members, aligned with [`SigmaSet::elements`].
    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_of(&self, f: &Formula) -> Option<SigmaElement> {
        let (prefix, base) = split_prefix(f);
        let base = *self.base_index.get(&base.alpha_key())?;
        Some(SigmaElement { prefix, base })
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.element_of(f).is_some()
    }

    pub fn materialize(&self, e: &SigmaElement) -> Formula {
        e.prefix.wrap(&self.bases[e.base])
    }

    pub fn apply(&self, e: &SigmaElement, l: Letter) -> SigmaElement {
        SigmaElement {
            prefix: e.prefix.apply(l),
            base: e.base,
        }
    }
}

/// `closureSet`: builds Σ for a seed.
pub fn closure_set(seed: &Formula) -> SigmaSet {
    SigmaSet::new(seed)
}

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::symbol::Symbol;

/// Core formulas: `⊤`, variables, `¬`, `∧`, `◇` and greatest fixpoints.
///
/// Every other connective is an abbreviation over these six. Values are
/// immutable and children are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Var(Symbol),
    Neg(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Dia(Arc<Formula>),
    Nu(Symbol, Arc<Formula>),
}

use Formula::*;

impl Formula {
    pub fn var(name: &str) -> Formula {
        Var(Symbol::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Neg(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Arc::new(a), Arc::new(b))
    }

    pub fn dia(f: Formula) -> Formula {
        Dia(Arc::new(f))
    }

    pub fn nu(x: Symbol, body: Formula) -> Formula {
        Nu(x, Arc::new(body))
    }

    pub fn bot() -> Formula {
        Formula::neg(Top)
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::neg(Formula::and(Formula::neg(a), Formula::neg(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::neg(Formula::and(a, Formula::neg(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::neg(Formula::dia(Formula::neg(f)))
    }

    /// `φ ∨ ◇φ`
    pub fn star_dia(f: Formula) -> Formula {
        Formula::or(f.clone(), Formula::dia(f))
    }

    /// `φ ∧ □φ`
    pub fn star_box(f: Formula) -> Formula {
        Formula::and(f.clone(), Formula::boxed(f))
    }

    /// Right-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Top;
        };
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Top | Var(_) => 1,
            Neg(a) | Dia(a) | Nu(_, a) => 1 + a.size(),
            And(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        fn go(f: &Formula, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
            match f {
                Top => {}
                Var(x) => {
                    if !bound.contains(x) {
                        out.insert(*x);
                    }
                }
                Neg(a) | Dia(a) => go(a, bound, out),
                And(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Nu(x, a) => {
                    bound.push(*x);
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Binder names in pre-order, with repetitions.
    pub fn binders(&self) -> Vec<Symbol> {
        fn go(f: &Formula, out: &mut Vec<Symbol>) {
            match f {
                Top | Var(_) => {}
                Neg(a) | Dia(a) => go(a, out),
                And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Nu(x, a) => {
                    out.push(*x);
                    go(a, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Every name occurring anywhere, free or bound.
    pub fn names(&self) -> HashSet<Symbol> {
        fn go(f: &Formula, out: &mut HashSet<Symbol>) {
            match f {
                Top => {}
                Var(x) => {
                    out.insert(*x);
                }
                Neg(a) | Dia(a) => go(a, out),
                And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Nu(x, a) => {
                    out.insert(*x);
                    go(a, out);
                }
            }
        }
        let mut out = HashSet::new();
        go(self, &mut out);
        out
    }

    /// Distinct subformulas in pre-order of first occurrence, the formula itself first.
    pub fn subformulas(&self) -> Vec<Formula> {
        fn go(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
            if !seen.insert(f.clone()) {
                return;
            }
            out.push(f.clone());
            match f {
                Top | Var(_) => {}
                Neg(a) | Dia(a) | Nu(_, a) => go(a, seen, out),
                And(a, b) => {
                    go(a, seen, out);
                    go(b, seen, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut HashSet::new(), &mut out);
        out
    }

    /// Bound variables pairwise distinct and disjoint from the free variables.
    pub fn is_alpha_normal(&self) -> bool {
        let free = self.free_vars();
        let mut seen = HashSet::new();
        self.binders()
            .into_iter()
            .all(|x| !free.contains(&x) && seen.insert(x))
    }

    /// Renames binders so the result is alpha-normal. Already alpha-normal
    /// formulas come back unchanged; fresh names use a counter suffix `_k`.
    pub fn alpha_normalize(&self) -> Formula {
        let free = self.free_vars();
        let mut fresh = Freshener::new(self.names());
        let mut seen = HashSet::new();
        let mut scope = Vec::new();
        rename(self, &mut scope, &mut |x| {
            if free.contains(&x) || seen.contains(&x) {
                let y = fresh.next(x);
                seen.insert(y);
                y
            } else {
                seen.insert(x);
                x
            }
        })
    }

    /// Capture-avoiding simultaneous substitution of free occurrences.
    /// The result is alpha-normal.
    pub fn substitute(&self, binding: &BTreeMap<Symbol, Formula>) -> Formula {
        let mut avoid: HashSet<Symbol> = binding.keys().copied().collect();
        for theta in binding.values() {
            avoid.extend(theta.names());
        }
        let mut taken = avoid.clone();
        taken.extend(self.names());
        let mut fresh = Freshener::new(taken);
        let mut scope = Vec::new();
        let renamed = rename(self, &mut scope, &mut |x| {
            if avoid.contains(&x) {
                fresh.next(x)
            } else {
                x
            }
        });
        replace_free(&renamed, binding, &mut Vec::new()).alpha_normalize()
    }

    /// Single-variable substitution `self[x := theta]`.
    pub fn substitute_one(&self, x: Symbol, theta: &Formula) -> Formula {
        let mut binding = BTreeMap::new();
        binding.insert(x, theta.clone());
        self.substitute(&binding)
    }

    /// A representative of the alpha-equivalence class: binders are renamed
    /// by nesting depth to names no parser can produce.
    pub fn alpha_key(&self) -> Formula {
        fn go(f: &Formula, scope: &mut Vec<(Symbol, Symbol)>) -> Formula {
            match f {
                Top => Top,
                Var(x) => Var(lookup(scope, *x)),
                Neg(a) => Formula::neg(go(a, scope)),
                Dia(a) => Formula::dia(go(a, scope)),
                And(a, b) => Formula::and(go(a, scope), go(b, scope)),
                Nu(x, a) => {
                    let y = Symbol::new(&format!("#{}", scope.len()));
                    scope.push((*x, y));
                    let body = go(a, scope);
                    scope.pop();
                    Formula::nu(y, body)
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || self.alpha_key() == other.alpha_key()
    }

    /// Finds a bound variable with a free occurrence under an odd number of
    /// negations. Returns the variable and the path of node labels from its binder.
    pub fn positivity_violation(&self) -> Option<(Symbol, String)> {
        fn occurrence(f: &Formula, x: Symbol, negs: usize, path: &mut Vec<&'static str>) -> bool {
            match f {
                Top => false,
                Var(y) => *y == x && negs % 2 == 1,
                Neg(a) => {
                    path.push("~");
                    let hit = occurrence(a, x, negs + 1, path);
                    if !hit {
                        path.pop();
                    }
                    hit
                }
                Dia(a) => {
                    path.push("<>");
                    let hit = occurrence(a, x, negs, path);
                    if !hit {
                        path.pop();
                    }
                    hit
                }
                And(a, b) => {
                    path.push("&.0");
                    if occurrence(a, x, negs, path) {
                        return true;
                    }
                    path.pop();
                    path.push("&.1");
                    if occurrence(b, x, negs, path) {
                        return true;
                    }
                    path.pop();
                    false
                }
                Nu(y, a) => {
                    if *y == x {
                        return false;
                    }
                    path.push("nu");
                    let hit = occurrence(a, x, negs, path);
                    if !hit {
                        path.pop();
                    }
                    hit
                }
            }
        }
        for sub in self.subformulas() {
            if let Nu(x, body) = &sub {
                let mut path = Vec::new();
                if occurrence(body, *x, 0, &mut path) {
                    path.push(x.as_str());
                    let rendered = format!("nu {x}/{}", path.join("/"));
                    return Some((*x, rendered));
                }
            }
        }
        None
    }
}

fn lookup(scope: &[(Symbol, Symbol)], x: Symbol) -> Symbol {
    scope
        .iter()
        .rev()
        .find(|(from, _)| *from == x)
        .map_or(x, |(_, to)| *to)
}

/// Rebuilds `f`, choosing each binder's new name with `choose` and renaming
/// its bound occurrences accordingly.
fn rename(
    f: &Formula,
    scope: &mut Vec<(Symbol, Symbol)>,
    choose: &mut dyn FnMut(Symbol) -> Symbol,
) -> Formula {
    match f {
        Top => Top,
        Var(x) => Var(lookup(scope, *x)),
        Neg(a) => Formula::neg(rename(a, scope, choose)),
        Dia(a) => Formula::dia(rename(a, scope, choose)),
        And(a, b) => {
            let a = rename(a, scope, choose);
            Formula::and(a, rename(b, scope, choose))
        }
        Nu(x, a) => {
            let y = choose(*x);
            scope.push((*x, y));
            let body = rename(a, scope, choose);
            scope.pop();
            Formula::nu(y, body)
        }
    }
}

fn replace_free(f: &Formula, binding: &BTreeMap<Symbol, Formula>, bound: &mut Vec<Symbol>) -> Formula {
    match f {
        Top => Top,
        Var(x) => {
            if !bound.contains(x) {
                if let Some(theta) = binding.get(x) {
                    return theta.clone();
                }
            }
            f.clone()
        }
        Neg(a) => Formula::neg(replace_free(a, binding, bound)),
        Dia(a) => Formula::dia(replace_free(a, binding, bound)),
        And(a, b) => {
            let a = replace_free(a, binding, bound);
            Formula::and(a, replace_free(b, binding, bound))
        }
        Nu(x, a) => {
            bound.push(*x);
            let body = replace_free(a, binding, bound);
            bound.pop();
            Formula::nu(*x, body)
        }
    }
}

/// Replaces free occurrences of `x` without renaming any binder. Only safe when
/// no free variable of `theta` is bound on the way to an occurrence.
pub(crate) fn replace_free_unchecked(f: &Formula, x: Symbol, theta: &Formula) -> Formula {
    let mut binding = BTreeMap::new();
    binding.insert(x, theta.clone());
    replace_free(f, &binding, &mut Vec::new())
}

/// Generates names `base_1`, `base_2`, ... avoiding a taken set.
pub(crate) struct Freshener {
    taken: HashSet<Symbol>,
    counter: usize,
}

impl Freshener {
    pub(crate) fn new(taken: HashSet<Symbol>) -> Freshener {
        Freshener { taken, counter: 0 }
    }

    pub(crate) fn next(&mut self, base: Symbol) -> Symbol {
        loop {
            self.counter += 1;
            let candidate = Symbol::new(&format!("{}_{}", base.as_str(), self.counter));
            if self.taken.insert(candidate) {
                return candidate;
            }
        }
    }
}

/// Memoizes `alpha_key` for repeated comparisons against the same formulas.
#[derive(Default)]
pub struct AlphaIndex {
    keys: HashMap<Formula, usize>,
}

impl AlphaIndex {
    /// Returns the class id, allocating a new one for unseen classes.
    pub fn class_of(&mut self, f: &Formula) -> usize {
        let key = f.alpha_key();
        let next = self.keys.len();
        *self.keys.entry(key).or_insert(next)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_core(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Top => write!(f, "Top"),
            Var(x) => write!(f, "Var({x})"),
            Neg(a) => write!(f, "Neg({a:?})"),
            Dia(a) => write!(f, "Dia({a:?})"),
            And(a, b) => write!(f, "And({a:?}, {b:?})"),
            Nu(x, a) => write!(f, "Nu({x}, {a:?})"),
        }
    }
}

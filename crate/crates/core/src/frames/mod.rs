//! Finite Kripke frames and models, frame-class membership, clusters and
//! depth, the irreflexive unfolding, cofinal subsets and the size bound of
//! the finite model property.

mod bound;
pub mod io;
pub mod random;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bound::{fmp_bound, Exponent, FmpBound, TowerInt};

use crate::morphisms::{Partition, WorldMap};
use crate::symbol::Symbol;
use crate::worldset::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("frame is not weakly transitive: {0} -> {1} -> {2} but neither equal nor related")]
    NotWeaklyTransitive(usize, usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A finite relational frame. Class membership is checked, never assumed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    succ: Vec<WorldSet>,
}

impl Frame {
    pub fn new(n: usize) -> Frame {
        Frame {
            succ: vec![WorldSet::empty(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Frame {
        let mut f = Frame::new(n);
        for (a, b) in edges {
            f.add_edge(a, b);
        }
        f
    }

    pub fn from_successors(succ: Vec<WorldSet>) -> Frame {
        let n = succ.len();
        assert!(succ.iter().all(|s| s.universe_len() == n));
        Frame { succ }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.succ[a].insert(b);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.succ[a].remove(b);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    pub fn is_reflexive_at(&self, w: usize) -> bool {
        self.has_edge(w, w)
    }

    /// `w↑`
    pub fn successors(&self, w: usize) -> &WorldSet {
        &self.succ[w]
    }

    /// `w↑* = w↑ ∪ {w}`
    pub fn up_star(&self, w: usize) -> WorldSet {
        let mut s = self.succ[w].clone();
        s.insert(w);
        s
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(WorldSet::count).sum()
    }

    pub fn all(&self) -> WorldSet {
        WorldSet::full(self.len())
    }

    /// Relational derivative `d(X) = {w : w↑ ∩ X ≠ ∅}`, the meaning of `◇`.
    pub fn derivative(&self, x: &WorldSet) -> WorldSet {
        let mut out = WorldSet::empty(self.len());
        for (w, s) in self.succ.iter().enumerate() {
            if s.intersects(x) {
                out.insert(w);
            }
        }
        out
    }

    /// `c(X) = X ∪ d(X)`
    pub fn closure(&self, x: &WorldSet) -> WorldSet {
        x.union(&self.derivative(x))
    }

    /// `i(X) = W − c(W − X)`
    pub fn interior(&self, x: &WorldSet) -> WorldSet {
        self.closure(&x.complement()).complement()
    }

    /// `X↓* = X ∪ {w : w → x for some x ∈ X}`
    pub fn down_star(&self, x: &WorldSet) -> WorldSet {
        self.closure(x)
    }

    /// `X↑ = ⋃ x↑`
    pub fn up(&self, x: &WorldSet) -> WorldSet {
        let mut out = WorldSet::empty(self.len());
        for w in x {
            out.union_with(&self.succ[w]);
        }
        out
    }

    /// First violation `(w, s, t)` of weak transitivity in lexicographic order.
    pub fn weak_transitivity_violation(&self) -> Option<(usize, usize, usize)> {
        for w in 0..self.len() {
            for s in &self.succ[w] {
                for t in &self.succ[s] {
                    if t != w && !self.has_edge(w, t) {
                        return Some((w, s, t));
                    }
                }
            }
        }
        None
    }

    pub fn is_weakly_transitive(&self) -> bool {
        self.weak_transitivity_violation().is_none()
    }

    /// `w ⟷* v`: equal, or related both ways.
    pub fn same_cluster(&self, w: usize, v: usize) -> bool {
        w == v || (self.has_edge(w, v) && self.has_edge(v, w))
    }

    /// Strict part `w ⊏ v`: `w → v` and not `v → w`.
    pub fn strictly_below(&self, w: usize, v: usize) -> bool {
        self.has_edge(w, v) && !self.has_edge(v, w)
    }

    /// Subframe on `keep`, renumbered in increasing order.
    pub fn induced(&self, keep: &WorldSet) -> (Frame, Vec<usize>) {
        let old: Vec<usize> = keep.to_vec();
        let mut index = vec![usize::MAX; self.len()];
        for (i, &w) in old.iter().enumerate() {
            index[w] = i;
        }
        let mut f = Frame::new(old.len());
        for (i, &w) in old.iter().enumerate() {
            for t in &self.succ[w] {
                if index[t] != usize::MAX {
                    f.add_edge(i, index[t]);
                }
            }
        }
        (f, old)
    }

    /// Worlds reachable from `w` in zero or more steps.
    pub fn generated(&self, w: usize) -> WorldSet {
        let mut seen = WorldSet::singleton(self.len(), w);
        let mut stack = vec![w];
        while let Some(v) = stack.pop() {
            for t in &self.succ[v] {
                if !seen.contains(t) {
                    seen.insert(t);
                    stack.push(t);
                }
            }
        }
        seen
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({}; ", self.len())?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

/// A frame together with an atomic valuation. Atoms missing from the map are
/// false everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub frame: Frame,
    pub valuation: BTreeMap<Symbol, WorldSet>,
}

impl Model {
    pub fn new(frame: Frame) -> Model {
        Model {
            frame,
            valuation: BTreeMap::new(),
        }
    }

    pub fn with_atom(mut self, atom: &str, worlds: impl IntoIterator<Item = usize>) -> Model {
        let n = self.frame.len();
        self.valuation
            .insert(Symbol::new(atom), WorldSet::from_worlds(n, worlds));
        self
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn atom(&self, p: Symbol) -> WorldSet {
        self.valuation
            .get(&p)
            .cloned()
            .unwrap_or_else(|| WorldSet::empty(self.len()))
    }

    pub fn atoms(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.valuation.keys().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameClass {
    #[serde(rename = "WK4")]
    Wk4,
    #[serde(rename = "WK4T0")]
    Wk4T0,
    #[serde(rename = "K4")]
    K4,
    #[serde(rename = "S4")]
    S4,
    #[serde(rename = "IRR_WK4")]
    IrrWk4,
    #[serde(rename = "ALL")]
    All,
}

impl FrameClass {
    pub const VALUES: [FrameClass; 6] = [
        FrameClass::Wk4,
        FrameClass::Wk4T0,
        FrameClass::K4,
        FrameClass::S4,
        FrameClass::IrrWk4,
        FrameClass::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameClass::Wk4 => "WK4",
            FrameClass::Wk4T0 => "WK4T0",
            FrameClass::K4 => "K4",
            FrameClass::S4 => "S4",
            FrameClass::IrrWk4 => "IRR_WK4",
            FrameClass::All => "ALL",
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameClass {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<FrameClass, FrameError> {
        FrameClass::VALUES
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FrameError::InvalidInput(format!("unknown frame class {s:?}")))
    }
}

/// Outcome of a class check; a failure carries a shortest violating tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassVerdict {
    Member,
    Counterexample(Vec<usize>),
}

impl ClassVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, ClassVerdict::Member)
    }
}

fn first_reflexivity_failure(f: &Frame) -> Option<usize> {
    (0..f.len()).find(|&w| !f.is_reflexive_at(w))
}

fn first_loop(f: &Frame) -> Option<usize> {
    (0..f.len()).find(|&w| f.is_reflexive_at(w))
}

fn first_weak_reflexivity_failure(f: &Frame) -> Option<(usize, usize)> {
    for w in 0..f.len() {
        for v in f.successors(w) {
            if v != w && f.has_edge(v, w) && !f.is_reflexive_at(w) && !f.is_reflexive_at(v) {
                return Some((w, v));
            }
        }
    }
    None
}

fn first_transitivity_failure(f: &Frame) -> Option<(usize, usize, usize)> {
    for w in 0..f.len() {
        for s in f.successors(w) {
            for t in f.successors(s) {
                if !f.has_edge(w, t) {
                    return Some((w, s, t));
                }
            }
        }
    }
    None
}

/// Decides class membership. Shorter witnesses are preferred: a single world
/// for (ir)reflexivity, a pair for weak reflexivity, a triple for the
/// transitivity conditions.
pub fn check_frame_class(f: &Frame, class: FrameClass) -> ClassVerdict {
    let triple = |t: Option<(usize, usize, usize)>| t.map(|(a, b, c)| vec![a, b, c]);
    let witness = match class {
        FrameClass::All => None,
        FrameClass::Wk4 => triple(f.weak_transitivity_violation()),
        FrameClass::Wk4T0 => first_weak_reflexivity_failure(f)
            .map(|(a, b)| vec![a, b])
            .or_else(|| triple(f.weak_transitivity_violation())),
        FrameClass::K4 => triple(first_transitivity_failure(f)),
        FrameClass::S4 => first_reflexivity_failure(f)
            .map(|w| vec![w])
            .or_else(|| triple(first_transitivity_failure(f))),
        FrameClass::IrrWk4 => first_loop(f)
            .map(|w| vec![w])
            .or_else(|| triple(f.weak_transitivity_violation())),
    };
    match witness {
        None => ClassVerdict::Member,
        Some(w) => ClassVerdict::Counterexample(w),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameAnalysis {
    pub clusters: Partition,
    pub depth: Vec<usize>,
    pub frame_depth: usize,
}

/// Clusters (`⟷*`-classes) and depths (longest strict chains upward).
pub fn analyze(f: &Frame) -> Result<FrameAnalysis, FrameError> {
    if let Some((a, b, c)) = f.weak_transitivity_violation() {
        return Err(FrameError::NotWeaklyTransitive(a, b, c));
    }
    let n = f.len();
    let labels: Vec<usize> = (0..n)
        .map(|w| (0..n).find(|&v| f.same_cluster(w, v)).unwrap())
        .collect();
    let clusters = Partition::from_labels(&labels);
    let mut depth = vec![usize::MAX; n];
    fn visit(f: &Frame, w: usize, depth: &mut [usize]) -> usize {
        if depth[w] != usize::MAX {
            return depth[w];
        }
        let mut best = 0;
        for v in f.successors(w) {
            if f.strictly_below(w, v) {
                best = best.max(visit(f, v, depth) + 1);
            }
        }
        depth[w] = best;
        best
    }
    for w in 0..n {
        visit(f, w, &mut depth);
    }
    let frame_depth = depth.iter().copied().max().unwrap_or(0);
    Ok(FrameAnalysis {
        clusters,
        depth,
        frame_depth,
    })
}

/// Replaces every reflexive world `x` by an irreflexive two-point cluster
/// `(x,0), (x,1)`. New worlds are numbered in order of their origin, copies
/// of one world adjacent.
pub fn irreflexive_unfold(m: &Model) -> Result<(Model, WorldMap), FrameError> {
    let f = &m.frame;
    if let Some((a, b, c)) = f.weak_transitivity_violation() {
        return Err(FrameError::NotWeaklyTransitive(a, b, c));
    }
    let mut projection = Vec::new();
    for w in 0..f.len() {
        projection.push(w);
        if f.is_reflexive_at(w) {
            projection.push(w);
        }
    }
    let n = projection.len();
    let mut out = Frame::new(n);
    for a in 0..n {
        for b in 0..n {
            if a != b && f.has_edge(projection[a], projection[b]) {
                out.add_edge(a, b);
            }
        }
    }
    let valuation = m
        .valuation
        .iter()
        .map(|(p, set)| {
            let pre = WorldSet::from_worlds(n, (0..n).filter(|&i| set.contains(projection[i])));
            (*p, pre)
        })
        .collect();
    let model = Model {
        frame: out,
        valuation,
    };
    Ok((model, WorldMap::new(projection, f.len())))
}

/// `X↑ ⊆ X↓*`
pub fn is_cofinal(f: &Frame, subset: &WorldSet) -> bool {
    f.up(subset).is_subset(&f.down_star(subset))
}

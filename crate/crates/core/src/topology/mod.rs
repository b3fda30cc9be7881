//! Finite topological spaces and the infinite space built over a frame.
//!
//! A finite space is Alexandroff, so it is determined by its specialization
//! preorder `x → y iff x ∈ c{y}`. Open sets are the up-sets of that preorder
//! and `c(X)` is the down-set of `X`.

mod lazy;

use thiserror::Error;

pub use lazy::{
    lazy_verify, GateStatus, LazyFrameSpace, LazyReport, LazyViolation, Level, Levels, Point, PointSet,
    SymbolicOpen, VerifyConfig, ViolationKind,
};

use crate::frames::io::{parse_relational, to_json_value, FormatError, RelationKey};
use crate::frames::{check_frame_class, ClassVerdict, Frame, FrameClass, FrameError, Model};
use crate::worldset::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("frame is not in class {class}: witness {witness:?}")]
    WrongClass { class: FrameClass, witness: Vec<usize> },
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// A finite space, stored as its specialization preorder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    order: Frame,
}

fn reflexive_transitive_closure(f: &Frame) -> Frame {
    let n = f.len();
    let mut succ: Vec<WorldSet> = (0..n).map(|w| f.up_star(w)).collect();
    for k in 0..n {
        for a in 0..n {
            if succ[a].contains(k) {
                let row = succ[k].clone();
                succ[a].union_with(&row);
            }
        }
    }
    Frame::from_successors(succ)
}

impl FiniteSpace {
    /// The space whose specialization preorder is the reflexive-transitive
    /// closure of `pairs`.
    pub fn from_preorder(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> FiniteSpace {
        FiniteSpace {
            order: reflexive_transitive_closure(&Frame::from_edges(n, pairs)),
        }
    }

    /// The space of an explicit family of open sets.
    pub fn from_opens(n: usize, opens: &[WorldSet]) -> Result<FiniteSpace, TopologyError> {
        let has = |s: &WorldSet| opens.iter().any(|o| o == s);
        if !has(&WorldSet::empty(n)) || !has(&WorldSet::full(n)) {
            return Err(TopologyError::NotATopology(
                "missing the empty set or the whole space".into(),
            ));
        }
        for a in opens {
            if a.universe_len() != n {
                return Err(TopologyError::NotATopology("open set of the wrong width".into()));
            }
            for b in opens {
                if !has(&a.union(b)) || !has(&a.intersection(b)) {
                    return Err(TopologyError::NotATopology(format!(
                        "not closed under union and intersection: {:?}, {:?}",
                        a.to_vec(),
                        b.to_vec()
                    )));
                }
            }
        }
        let mut order = Frame::new(n);
        for x in 0..n {
            for y in 0..n {
                // x ∈ c{y} iff every open set around x contains y.
                if opens.iter().all(|o| !o.contains(x) || o.contains(y)) {
                    order.add_edge(x, y);
                }
            }
        }
        Ok(FiniteSpace { order })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `x ∈ c{y}`
    pub fn specializes(&self, x: usize, y: usize) -> bool {
        self.order.has_edge(x, y)
    }

    pub fn preorder(&self) -> &Frame {
        &self.order
    }

    pub fn all(&self) -> WorldSet {
        WorldSet::full(self.len())
    }

    /// The least open set containing `x`.
    pub fn minimal_open(&self, x: usize) -> &WorldSet {
        self.order.successors(x)
    }

    pub fn closure(&self, x: &WorldSet) -> WorldSet {
        self.order.derivative(x)
    }

    pub fn interior(&self, x: &WorldSet) -> WorldSet {
        self.closure(&x.complement()).complement()
    }

    /// Limit points: `{y : y ∈ c(X − {y})}`.
    pub fn cantor_derivative(&self, x: &WorldSet) -> WorldSet {
        WorldSet::from_worlds(
            self.len(),
            (0..self.len()).filter(|&y| {
                let mut punctured = x.clone();
                punctured.remove(y);
                self.closure(&punctured).contains(y)
            }),
        )
    }

    pub fn is_open(&self, x: &WorldSet) -> bool {
        self.order.up(x).is_subset(x)
    }

    pub fn is_closed(&self, x: &WorldSet) -> bool {
        self.is_open(&x.complement())
    }

    /// Every open set, in increasing bit order. Exponential; small spaces only.
    pub fn opens(&self) -> Vec<WorldSet> {
        let n = self.len();
        assert!(n <= 20, "open-set enumeration is limited to 20 points");
        (0u64..1 << n)
            .map(|mask| WorldSet::from_mask(n, mask))
            .filter(|s| self.is_open(s))
            .collect()
    }

    pub fn separation(&self, axiom: Separation) -> SeparationVerdict {
        let n = self.len();
        match axiom {
            Separation::T0 => {
                for x in 0..n {
                    for y in x + 1..n {
                        if self.specializes(x, y) && self.specializes(y, x) {
                            return SeparationVerdict::FailsPair(x, y);
                        }
                    }
                }
            }
            Separation::TD => {
                // x is isolated in c{x} iff its least open set meets c{x} in x alone.
                for x in 0..n {
                    let single = WorldSet::singleton(n, x);
                    if self.minimal_open(x).intersection(&self.closure(&single)) != single {
                        return SeparationVerdict::FailsAt(x);
                    }
                }
            }
        }
        SeparationVerdict::Holds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separation {
    T0,
    TD,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationVerdict {
    Holds,
    /// Two distinct points with the same neighbourhoods.
    FailsPair(usize, usize),
    /// A point not isolated in its own closure.
    FailsAt(usize),
}

impl SeparationVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SeparationVerdict::Holds)
    }
}

fn require(f: &Frame, class: FrameClass) -> Result<(), TopologyError> {
    match check_frame_class(f, class) {
        ClassVerdict::Member => Ok(()),
        ClassVerdict::Counterexample(witness) => Err(TopologyError::WrongClass { class, witness }),
    }
}

/// Closure semantics: the specialization preorder, an S4 frame.
pub fn closure_frame(s: &FiniteSpace) -> Frame {
    s.order.clone()
}

/// The Alexandroff space of an S4 frame.
pub fn closure_space(f: &Frame) -> Result<FiniteSpace, TopologyError> {
    require(f, FrameClass::S4)?;
    Ok(FiniteSpace { order: f.clone() })
}

/// Derivative semantics: `x → y iff x ∈ c{y} − {y}`, an irreflexive weakly
/// transitive frame whose derivative is the Cantor derivative.
pub fn derivative_frame(s: &FiniteSpace) -> Frame {
    let mut f = s.order.clone();
    for x in 0..f.len() {
        f.remove_edge(x, x);
    }
    f
}

/// The Alexandroff space of an irreflexive weakly transitive frame, closed
/// sets being the down-sets of the reflexive closure.
pub fn derivative_space(f: &Frame) -> Result<FiniteSpace, TopologyError> {
    require(f, FrameClass::IrrWk4)?;
    let mut order = f.clone();
    for x in 0..order.len() {
        order.add_edge(x, x);
    }
    Ok(FiniteSpace { order })
}

/// A space with the world names from its file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSpace {
    pub names: Vec<String>,
    pub space: FiniteSpace,
}

/// Reads a space file: the model format with the relation under `"preorder"`.
/// The listed pairs are closed off reflexively and transitively; a
/// valuation, if present, is ignored.
pub fn parse_space(text: &str) -> Result<NamedSpace, FormatError> {
    let nm = parse_relational(text, RelationKey::Preorder)?;
    let n = nm.model.len();
    Ok(NamedSpace {
        names: nm.names,
        space: FiniteSpace::from_preorder(n, nm.model.frame.edges()),
    })
}

pub fn space_to_json_value(s: &NamedSpace) -> serde_json::Value {
    let nm = crate::frames::io::NamedModel {
        names: s.names.clone(),
        model: Model::new(s.space.order.clone()),
    };
    to_json_value(&nm, RelationKey::Preorder)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski() -> FiniteSpace {
        let opens = [WorldSet::empty(2), WorldSet::singleton(2, 1), WorldSet::full(2)];
        FiniteSpace::from_opens(2, &opens).unwrap()
    }

    #[test]
    fn sierpinski_translations() {
        let s = sierpinski();
        assert_eq!(closure_frame(&s), Frame::from_edges(2, [(0, 0), (0, 1), (1, 1)]));
        assert_eq!(derivative_frame(&s), Frame::from_edges(2, [(0, 1)]));
        assert_eq!(s.cantor_derivative(&WorldSet::singleton(2, 1)).to_vec(), vec![0]);
        assert!(s.separation(Separation::T0).holds());
        assert!(s.separation(Separation::TD).holds());
    }

    #[test]
    fn discrete_and_indiscrete() {
        let discrete = FiniteSpace::from_preorder(2, []);
        assert_eq!(derivative_frame(&discrete).edge_count(), 0);
        assert!(discrete.separation(Separation::T0).holds());
        assert!(discrete.separation(Separation::TD).holds());
        let indiscrete = FiniteSpace::from_preorder(2, [(0, 1), (1, 0)]);
        assert_eq!(
            indiscrete.separation(Separation::T0),
            SeparationVerdict::FailsPair(0, 1)
        );
        assert_eq!(
            indiscrete.separation(Separation::TD),
            SeparationVerdict::FailsAt(0)
        );
    }

    #[test]
    fn round_trips() {
        let s = sierpinski();
        assert_eq!(closure_space(&closure_frame(&s)).unwrap(), s);
        assert_eq!(derivative_space(&derivative_frame(&s)).unwrap(), s);
        assert!(matches!(
            closure_space(&Frame::from_edges(1, [])),
            Err(TopologyError::WrongClass { .. })
        ));
        assert!(matches!(
            derivative_space(&Frame::from_edges(1, [(0, 0)])),
            Err(TopologyError::WrongClass { .. })
        ));
    }

    #[test]
    fn operators() {
        let s = sierpinski();
        assert!(s.closure(&WorldSet::empty(2)).is_empty());
        let x = WorldSet::singleton(2, 0);
        assert_eq!(s.interior(&x), s.closure(&x.complement()).complement());
        assert_eq!(s.opens().len(), 3);
    }

    #[test]
    fn bad_topology_rejected() {
        let opens = [
            WorldSet::empty(2),
            WorldSet::singleton(2, 0),
            WorldSet::singleton(2, 1),
        ];
        assert!(FiniteSpace::from_opens(2, &opens).is_err());
    }

    #[test]
    fn space_file_closes_preorder() {
        let text = r#"{"worlds":["a","b","c"],"preorder":[["a","b"],["b","c"]]}"#;
        let s = parse_space(text).unwrap();
        assert!(s.space.specializes(0, 2));
        assert!(s.space.specializes(1, 1));
        let back = parse_space(&space_to_json_value(&s).to_string()).unwrap();
        assert_eq!(back, s);
    }
}

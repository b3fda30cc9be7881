//! Partitions, world maps, P-morphism checking, bisimilarity by partition
//! refinement, and quotient models.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::frames::{Frame, Model};
use crate::semantics::eval_lenient;
use crate::symbol::Symbol;
use crate::syntax::SigmaSet;
use crate::worldset::WorldSet;

/// An equivalence relation on worlds, as dense block ids. Blocks are
/// numbered in order of their least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<WorldSet>,
}

impl Partition {
    /// Groups worlds with equal labels.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: &[L]) -> Partition {
        let n = labels.len();
        let mut ids: HashMap<&L, usize> = HashMap::new();
        let mut block_of = Vec::with_capacity(n);
        let mut blocks: Vec<WorldSet> = Vec::new();
        for (w, l) in labels.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(l).or_insert(next);
            if id == blocks.len() {
                blocks.push(WorldSet::empty(n));
            }
            blocks[id].insert(w);
            block_of.push(id);
        }
        Partition { block_of, blocks }
    }

    pub fn discrete(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn trivial(n: usize) -> Partition {
        Partition::from_labels(&vec![0u8; n])
    }

    pub fn block_of(&self, w: usize) -> usize {
        self.block_of[w]
    }

    pub fn block(&self, b: usize) -> &WorldSet {
        &self.blocks[b]
    }

    pub fn blocks(&self) -> &[WorldSet] {
        &self.blocks
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn universe_len(&self) -> usize {
        self.block_of.len()
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|w| coarser.same_block(w, b.first().unwrap())))
    }

    /// The projection onto blocks.
    pub fn projection(&self) -> WorldMap {
        WorldMap::new(self.block_of.clone(), self.len())
    }
}

/// A total map from the worlds of one model to those of another.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldMap {
    map: Vec<usize>,
    target_len: usize,
}

impl WorldMap {
    pub fn new(map: Vec<usize>, target_len: usize) -> WorldMap {
        WorldMap { map, target_len }
    }

    pub fn identity(n: usize) -> WorldMap {
        WorldMap::new((0..n).collect(), n)
    }

    pub fn image(&self, w: usize) -> usize {
        self.map[w]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn source_len(&self) -> usize {
        self.map.len()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn preimage(&self, set: &WorldSet) -> WorldSet {
        WorldSet::from_worlds(
            self.map.len(),
            (0..self.map.len()).filter(|&w| set.contains(self.map[w])),
        )
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = WorldSet::empty(self.target_len);
        for &t in &self.map {
            hit.insert(t);
        }
        hit.count() == self.target_len
    }
}

/// Why a map fails to be a P-morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    /// The map's shape does not fit the two models.
    Malformed(String),
    /// `world` and its image disagree on `atom`.
    Atom { atom: Symbol, world: usize },
    /// `world` lies in exactly one of `π⁻¹d′{target}` and `d π⁻¹{target}`.
    Derivative { world: usize, target: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismVerdict {
    Yes,
    No(MorphismViolation),
}

impl MorphismVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, MorphismVerdict::Yes)
    }
}

/// Decides `π⁻¹∥p∥′ = ∥p∥` for the given atoms and `π⁻¹d′(X′) = dπ⁻¹(X′)`
/// for all `X′`. Both sides of the latter are unions over singletons, so
/// singletons suffice.
pub fn check_p_morphism(
    f: &WorldMap,
    source: &Model,
    target: &Model,
    atoms: &BTreeSet<Symbol>,
) -> MorphismVerdict {
    if f.source_len() != source.len() || f.target_len() != target.len() {
        return MorphismVerdict::No(MorphismViolation::Malformed(format!(
            "map is {} -> {}, models have {} and {} worlds",
            f.source_len(),
            f.target_len(),
            source.len(),
            target.len()
        )));
    }
    if let Some(w) = f.as_slice().iter().position(|&t| t >= target.len()) {
        return MorphismVerdict::No(MorphismViolation::Malformed(format!(
            "world {w} maps outside the target"
        )));
    }
    for &p in atoms {
        let lhs = f.preimage(&target.atom(p));
        let rhs = source.atom(p);
        if let Some(w) = lhs.difference(&rhs).union(&rhs.difference(&lhs)).first() {
            return MorphismVerdict::No(MorphismViolation::Atom { atom: p, world: w });
        }
    }
    for y in 0..target.len() {
        let single = WorldSet::singleton(target.len(), y);
        let lhs = f.preimage(&target.frame.derivative(&single));
        let rhs = source.frame.derivative(&f.preimage(&single));
        if let Some(w) = lhs.difference(&rhs).union(&rhs.difference(&lhs)).first() {
            return MorphismVerdict::No(MorphismViolation::Derivative { world: w, target: y });
        }
    }
    MorphismVerdict::Yes
}

/// What worlds in one block must agree on.
#[derive(Clone, Debug)]
pub enum BisimMode {
    Atoms(BTreeSet<Symbol>),
    /// Truth of every member of the set; unresolved names count as false.
    Sigma(SigmaSet),
}

/// The partition by agreement on the mode's atomic clause.
pub fn agreement_partition(m: &Model, mode: &BisimMode) -> Partition {
    let truth: Vec<WorldSet> = match mode {
        BisimMode::Atoms(atoms) => atoms.iter().map(|&p| m.atom(p)).collect(),
        BisimMode::Sigma(sigma) => sigma.formulas().iter().map(|f| eval_lenient(m, f)).collect(),
    };
    let labels: Vec<Vec<bool>> = (0..m.len())
        .map(|w| truth.iter().map(|s| s.contains(w)).collect())
        .collect();
    Partition::from_labels(&labels)
}

/// One round of refinement: worlds stay together iff they share a block and
/// see the same set of blocks.
pub fn refine_once(f: &Frame, part: &Partition) -> Partition {
    let labels: Vec<(usize, Vec<usize>)> = (0..f.len())
        .map(|w| {
            let seen: BTreeSet<usize> = f.successors(w).iter().map(|v| part.block_of(v)).collect();
            (part.block_of(w), seen.into_iter().collect())
        })
        .collect();
    Partition::from_labels(&labels)
}

/// The coarsest bisimulation partition refining the agreement partition.
pub fn compute_bisimilarity(m: &Model, mode: &BisimMode) -> Partition {
    let mut part = agreement_partition(m, mode);
    loop {
        let next = refine_once(&m.frame, &part);
        if next.len() == part.len() {
            return part;
        }
        part = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("partition is not a bisimulation: {0:?}")]
    NotABisimulation(MorphismViolation),
}

/// The quotient by `part`: blocks are related iff some members are, and a
/// block satisfies an atom iff some member does. Only `atoms` are kept, and
/// the projection must be a P-morphism for them.
pub fn quotient_model(
    m: &Model,
    part: &Partition,
    atoms: &BTreeSet<Symbol>,
) -> Result<(Model, WorldMap), QuotientError> {
    if part.universe_len() != m.len() {
        return Err(QuotientError::NotABisimulation(MorphismViolation::Malformed(
            format!(
                "partition covers {} worlds, model has {}",
                part.universe_len(),
                m.len()
            ),
        )));
    }
    let k = part.len();
    let mut frame = Frame::new(k);
    for (a, b) in m.frame.edges() {
        frame.add_edge(part.block_of(a), part.block_of(b));
    }
    let mut q = Model::new(frame);
    for &p in atoms {
        let set = m.atom(p);
        let blocks = WorldSet::from_worlds(k, set.iter().map(|w| part.block_of(w)));
        q.valuation.insert(p, blocks);
    }
    let proj = part.projection();
    match check_p_morphism(&proj, m, &q, atoms) {
        MorphismVerdict::Yes => Ok((q, proj)),
        MorphismVerdict::No(v) => Err(QuotientError::NotABisimulation(v)),
    }
}

/// Atoms occurring free in the members of a closure set.
pub fn sigma_atoms(sigma: &SigmaSet) -> BTreeSet<Symbol> {
    sigma
        .formulas()
        .iter()
        .flat_map(|f| f.free_vars())
        .filter(|x| x.is_atom())
        .collect()
}

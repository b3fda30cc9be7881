//! The infinite space over a weakly transitive frame.
//!
//! Points are `(w, n)` for reflexive `w` and every `n ∈ ℕ`, and `(w, ω)` for
//! irreflexive `w`; `π(w, α) = w`. A set `U` is open when each of its points
//! `(w, α)` satisfies
//!
//! 1. for some `n`, every `(v, β)` with `v ⟷ w` and `β ≥ n` lies in `U`;
//! 2. every `(v, β)` with `w ⊏ v` lies in `U`.
//!
//! Sets are kept per world as finite or cofinite level sets, which is enough
//! to decide openness exactly. Verification of the d-morphism and separation
//! properties is sampled.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TopologyError;
use crate::frames::{check_frame_class, ClassVerdict, Frame, FrameClass, FrameError};

/// A level: a natural number, or `ω` above all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(u64),
    Omega,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub world: usize,
    pub level: Level,
}

impl Point {
    pub fn new(world: usize, level: Level) -> Point {
        Point { world, level }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Level::Finite(n) => write!(f, "({}, {})", self.world, n),
            Level::Omega => write!(f, "({}, ω)", self.world),
        }
    }
}

/// The levels of one world that belong to a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Levels {
    /// Irreflexive world: whether its single point is in.
    Omega(bool),
    /// Reflexive world: exactly these levels.
    Finite(BTreeSet<u64>),
    /// Reflexive world: every level except these.
    Cofinite(BTreeSet<u64>),
}

impl Levels {
    fn none(reflexive: bool) -> Levels {
        if reflexive {
            Levels::Finite(BTreeSet::new())
        } else {
            Levels::Omega(false)
        }
    }

    fn all(reflexive: bool) -> Levels {
        if reflexive {
            Levels::Cofinite(BTreeSet::new())
        } else {
            Levels::Omega(true)
        }
    }

    /// Levels `n, n+1, ...` (the single point, for an irreflexive world).
    fn from_level(reflexive: bool, n: u64) -> Levels {
        if reflexive {
            Levels::Cofinite((0..n).collect())
        } else {
            Levels::Omega(true)
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Levels::Omega(false)) || matches!(self, Levels::Finite(s) if s.is_empty())
    }

    pub fn is_all(&self) -> bool {
        matches!(self, Levels::Omega(true)) || matches!(self, Levels::Cofinite(s) if s.is_empty())
    }

    /// Contains every level from some point on.
    pub fn is_eventually_all(&self) -> bool {
        matches!(self, Levels::Omega(true) | Levels::Cofinite(_))
    }

    pub fn contains(&self, l: Level) -> bool {
        match (self, l) {
            (Levels::Omega(b), Level::Omega) => *b,
            (Levels::Finite(s), Level::Finite(n)) => s.contains(&n),
            (Levels::Cofinite(s), Level::Finite(n)) => !s.contains(&n),
            _ => false,
        }
    }

    /// Has a member other than `l`.
    fn has_other_than(&self, l: Level) -> bool {
        match self {
            Levels::Omega(b) => *b && l != Level::Omega,
            Levels::Finite(s) => s.iter().any(|&n| Level::Finite(n) != l),
            Levels::Cofinite(_) => true,
        }
    }

    fn insert(&mut self, l: Level) {
        match (self, l) {
            (Levels::Omega(b), Level::Omega) => *b = true,
            (Levels::Finite(s), Level::Finite(n)) => {
                s.insert(n);
            }
            (Levels::Cofinite(s), Level::Finite(n)) => {
                s.remove(&n);
            }
            _ => panic!("level kind does not match the world"),
        }
    }

    fn remove(&mut self, l: Level) {
        match (self, l) {
            (Levels::Omega(b), Level::Omega) => *b = false,
            (Levels::Finite(s), Level::Finite(n)) => {
                s.remove(&n);
            }
            (Levels::Cofinite(s), Level::Finite(n)) => {
                s.insert(n);
            }
            _ => panic!("level kind does not match the world"),
        }
    }

    fn complement(&self) -> Levels {
        match self {
            Levels::Omega(b) => Levels::Omega(!b),
            Levels::Finite(s) => Levels::Cofinite(s.clone()),
            Levels::Cofinite(s) => Levels::Finite(s.clone()),
        }
    }

    fn union(&self, other: &Levels) -> Levels {
        match (self, other) {
            (Levels::Omega(a), Levels::Omega(b)) => Levels::Omega(*a || *b),
            (Levels::Finite(a), Levels::Finite(b)) => Levels::Finite(a | b),
            (Levels::Cofinite(a), Levels::Cofinite(b)) => Levels::Cofinite(a & b),
            (Levels::Finite(f), Levels::Cofinite(c)) | (Levels::Cofinite(c), Levels::Finite(f)) => {
                Levels::Cofinite(c - f)
            }
            _ => panic!("level kinds differ"),
        }
    }

    fn intersection(&self, other: &Levels) -> Levels {
        self.complement().union(&other.complement()).complement()
    }
}

/// A set of points, as one [`Levels`] per base world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    levels: Vec<Levels>,
}

impl PointSet {
    pub fn levels(&self, w: usize) -> &Levels {
        &self.levels[w]
    }

    pub fn contains(&self, p: Point) -> bool {
        self.levels[p.world].contains(p.level)
    }

    pub fn insert(&mut self, p: Point) {
        self.levels[p.world].insert(p.level);
    }

    pub fn remove(&mut self, p: Point) {
        self.levels[p.world].remove(p.level);
    }

    pub fn complement(&self) -> PointSet {
        PointSet {
            levels: self.levels.iter().map(Levels::complement).collect(),
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(a, b)| a.union(b))
                .collect(),
        }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        }
    }

    /// Base worlds with at least one point in the set.
    pub fn worlds(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.levels.len()).filter(|&w| !self.levels[w].is_empty())
    }
}

/// A union of basic regions minus finitely many points, where
/// `B(w, n) = {(v, β) : w ⟷* v, β ≥ n} ∪ {(v, β) : w ⊏ v}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicOpen {
    pub regions: Vec<(usize, u64)>,
    pub exceptions: Vec<Point>,
}

impl SymbolicOpen {
    pub fn basic(w: usize, n: u64) -> SymbolicOpen {
        SymbolicOpen {
            regions: vec![(w, n)],
            exceptions: Vec::new(),
        }
    }

    pub fn to_point_set(&self, ls: &LazyFrameSpace) -> PointSet {
        let mut set = ls.empty_set();
        for &(w, n) in &self.regions {
            set = set.union(&ls.region(w, n));
        }
        for &p in &self.exceptions {
            if ls.is_point(p) {
                set.remove(p);
            }
        }
        set
    }

    pub fn contains(&self, ls: &LazyFrameSpace, p: Point) -> bool {
        ls.is_point(p)
            && !self.exceptions.contains(&p)
            && self.regions.iter().any(|&(w, n)| ls.region(w, n).contains(p))
    }
}

/// Where openness fails: a member at `world` needs more points at `other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpenFailure {
    pub world: usize,
    pub other: usize,
    /// 1 for the cofinite-cluster condition, 2 for strict successors.
    pub condition: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LazyFrameSpace {
    frame: Frame,
}

impl LazyFrameSpace {
    pub fn build(f: &Frame) -> Result<LazyFrameSpace, TopologyError> {
        if let Some((a, b, c)) = f.weak_transitivity_violation() {
            return Err(FrameError::NotWeaklyTransitive(a, b, c).into());
        }
        Ok(LazyFrameSpace { frame: f.clone() })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn is_point(&self, p: Point) -> bool {
        p.world < self.frame.len()
            && (self.frame.is_reflexive_at(p.world) == matches!(p.level, Level::Finite(_)))
    }

    pub fn project(&self, p: Point) -> usize {
        p.world
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet {
            levels: (0..self.frame.len())
                .map(|w| Levels::none(self.frame.is_reflexive_at(w)))
                .collect(),
        }
    }

    pub fn full_set(&self) -> PointSet {
        self.empty_set().complement()
    }

    pub fn singleton(&self, p: Point) -> PointSet {
        let mut s = self.empty_set();
        s.insert(p);
        s
    }

    /// Every copy of the worlds in `worlds`.
    pub fn over_worlds(&self, worlds: impl IntoIterator<Item = usize>) -> PointSet {
        let mut s = self.empty_set();
        for w in worlds {
            s.levels[w] = Levels::all(self.frame.is_reflexive_at(w));
        }
        s
    }

    /// The basic region `B(w, n)`.
    pub fn region(&self, w: usize, n: u64) -> PointSet {
        let f = &self.frame;
        PointSet {
            levels: (0..f.len())
                .map(|v| {
                    let refl = f.is_reflexive_at(v);
                    if f.same_cluster(w, v) {
                        Levels::from_level(refl, n)
                    } else if f.strictly_below(w, v) {
                        Levels::all(refl)
                    } else {
                        Levels::none(refl)
                    }
                })
                .collect(),
        }
    }

    /// The first failure of the open-set conditions, if any.
    pub fn open_failure(&self, u: &PointSet) -> Option<OpenFailure> {
        let f = &self.frame;
        for w in u.worlds() {
            for v in 0..f.len() {
                if f.strictly_below(w, v) && !u.levels[v].is_all() {
                    return Some(OpenFailure {
                        world: w,
                        other: v,
                        condition: 2,
                    });
                }
                if f.has_edge(w, v) && f.has_edge(v, w) && !u.levels[v].is_eventually_all() {
                    return Some(OpenFailure {
                        world: w,
                        other: v,
                        condition: 1,
                    });
                }
            }
        }
        None
    }

    pub fn is_open(&self, u: &PointSet) -> bool {
        self.open_failure(u).is_none()
    }

    pub fn is_closed(&self, c: &PointSet) -> bool {
        self.is_open(&c.complement())
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R, level_cap: u64) -> Point {
        let w = rng.gen_range(0..self.frame.len());
        let level = if self.frame.is_reflexive_at(w) {
            Level::Finite(rng.gen_range(0..level_cap.max(1)))
        } else {
            Level::Omega
        };
        Point::new(w, level)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    /// Sampled finite levels lie below this.
    pub level_cap: u64,
    /// Random neighbourhoods tried per sample for the back condition.
    pub neighbourhoods: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 200,
            seed: 0,
            level_cap: 64,
            neighbourhoods: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A constructed set that should be open is not.
    NotOpen,
    Forth,
    Back,
    T0,
    TD,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LazyViolation {
    pub sample: usize,
    pub kind: ViolationKind,
    pub points: Vec<Point>,
    pub detail: String,
}

/// Whether a class-gated check ran.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateStatus {
    /// Number of checks performed.
    Checked(usize),
    /// The base frame is not in the class; the witness is the class check's.
    NotAttempted { class: FrameClass, witness: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LazyReport {
    pub samples: usize,
    pub forth_checks: usize,
    pub back_checks: usize,
    pub t0: GateStatus,
    pub td: GateStatus,
    pub violations: Vec<LazyViolation>,
}

impl LazyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Sampler<'a> {
    ls: &'a LazyFrameSpace,
    cfg: VerifyConfig,
    violations: Vec<LazyViolation>,
}

impl Sampler<'_> {
    fn violation(&mut self, sample: usize, kind: ViolationKind, points: Vec<Point>, detail: String) {
        self.violations.push(LazyViolation {
            sample,
            kind,
            points,
            detail,
        });
    }

    fn expect_open(&mut self, i: usize, p: Point, set: &PointSet, what: &str) -> bool {
        match self.ls.open_failure(set) {
            None => true,
            Some(fail) => {
                self.violation(i, ViolationKind::NotOpen, vec![p], format!("{what}: {fail:?}"));
                false
            }
        }
    }

    /// `O = {(v, β) : w →* v}` is a neighbourhood of `p` and `O − {p}` projects into `w↑`.
    fn forth(&mut self, i: usize, p: Point) {
        let f = self.ls.frame();
        let o = self.ls.region(p.world, 0);
        if !self.expect_open(i, p, &o, "forth witness") {
            return;
        }
        if !o.contains(p) {
            self.violation(
                i,
                ViolationKind::Forth,
                vec![p],
                "witness misses the point".into(),
            );
            return;
        }
        let mut punctured = o;
        punctured.remove(p);
        let stray = punctured.worlds().find(|&v| !f.has_edge(p.world, v));
        if let Some(v) = stray {
            self.violation(
                i,
                ViolationKind::Forth,
                vec![p],
                format!("punctured witness reaches world {v} outside the successors"),
            );
        }
    }

    fn random_neighbourhood<R: Rng>(&mut self, rng: &mut R, p: Point) -> SymbolicOpen {
        let cap = self.cfg.level_cap.max(1);
        let n = match p.level {
            Level::Finite(a) => rng.gen_range(0..=a),
            Level::Omega => rng.gen_range(0..cap),
        };
        let mut open = SymbolicOpen::basic(p.world, n);
        if rng.gen_bool(0.5) {
            let v = rng.gen_range(0..self.ls.frame().len());
            open.regions.push((v, rng.gen_range(0..cap)));
        }
        for _ in 0..3 {
            let q = self.ls.random_point(rng, cap);
            if q == p || !matches!(q.level, Level::Finite(_)) {
                continue;
            }
            open.exceptions.push(q);
            if !self.ls.is_open(&open.to_point_set(self.ls)) {
                open.exceptions.pop();
            }
        }
        open
    }

    /// Every neighbourhood of `p` minus `p` projects onto all of `w↑`.
    fn back<R: Rng>(&mut self, i: usize, rng: &mut R, p: Point) -> usize {
        let f = self.ls.frame().clone();
        let mut checks = 0;
        for _ in 0..self.cfg.neighbourhoods {
            let open = self.random_neighbourhood(rng, p);
            let u = open.to_point_set(self.ls);
            if !self.expect_open(i, p, &u, "sampled neighbourhood") {
                continue;
            }
            if !u.contains(p) {
                self.violation(
                    i,
                    ViolationKind::Back,
                    vec![p],
                    format!("{open:?} misses the point"),
                );
                continue;
            }
            for v in f.successors(p.world) {
                checks += 1;
                let lv = u.levels(v);
                let hit = if v == p.world {
                    lv.has_other_than(p.level)
                } else {
                    !lv.is_empty()
                };
                if !hit {
                    self.violation(
                        i,
                        ViolationKind::Back,
                        vec![p],
                        format!("{open:?} minus the point has no copy of successor {v}"),
                    );
                }
            }
        }
        checks
    }

    fn separating_open(&self, p: Point, q: Point) -> Option<PointSet> {
        let f = self.ls.frame();
        let (w, v) = (p.world, q.world);
        let reach = |a: usize, b: usize| a == b || f.has_edge(a, b);
        if !reach(w, v) {
            Some(self.ls.region(w, 0))
        } else if !reach(v, w) {
            Some(self.ls.region(v, 0))
        } else if q.level != Level::Omega {
            let mut u = self.ls.region(w, 0);
            u.remove(q);
            Some(u)
        } else if p.level != Level::Omega {
            let mut u = self.ls.region(v, 0);
            u.remove(p);
            Some(u)
        } else {
            None
        }
    }

    fn t0<R: Rng>(&mut self, i: usize, rng: &mut R, p: Point) -> bool {
        let q = self.ls.random_point(rng, self.cfg.level_cap);
        if q == p {
            return false;
        }
        match self.separating_open(p, q) {
            None => self.violation(i, ViolationKind::T0, vec![p, q], "no separating open".into()),
            Some(u) => {
                if self.expect_open(i, p, &u, "separating set") && u.contains(p) == u.contains(q) {
                    self.violation(i, ViolationKind::T0, vec![p, q], "set does not separate".into());
                }
            }
        }
        true
    }

    /// `U = B(w, α)` and `F = {(v, β) : v ⊏ w} ∪ {(w, β) : β ≤ α}` meet in `p`.
    fn td(&mut self, i: usize, p: Point) {
        let ls = self.ls;
        let f = ls.frame();
        let w = p.world;
        let alpha = match p.level {
            Level::Finite(a) => a,
            Level::Omega => 0,
        };
        let u = ls.region(w, alpha);
        let mut closed = ls.over_worlds((0..f.len()).filter(|&v| f.strictly_below(v, w)));
        match p.level {
            Level::Finite(a) => (0..=a).for_each(|b| closed.insert(Point::new(w, Level::Finite(b)))),
            Level::Omega => closed.insert(p),
        }
        if !self.expect_open(i, p, &u, "isolating open") {
            return;
        }
        if let Some(fail) = ls.open_failure(&closed.complement()) {
            self.violation(
                i,
                ViolationKind::TD,
                vec![p],
                format!("witness is not closed: {fail:?}"),
            );
            return;
        }
        if u.intersection(&closed) != ls.singleton(p) {
            self.violation(
                i,
                ViolationKind::TD,
                vec![p],
                "witnesses meet beyond the point".into(),
            );
        }
    }
}

fn gate(f: &Frame, class: FrameClass) -> Result<(), GateStatus> {
    match check_frame_class(f, class) {
        ClassVerdict::Member => Ok(()),
        ClassVerdict::Counterexample(witness) => Err(GateStatus::NotAttempted { class, witness }),
    }
}

/// Sampled check that `π` is a d-morphism onto the base frame, and that the
/// space is T₀ over a weakly reflexive base and T_D over a transitive one.
/// Sample `i` draws from its own stream of the seeded generator.
pub fn lazy_verify(ls: &LazyFrameSpace, cfg: VerifyConfig) -> LazyReport {
    let f = ls.frame();
    let t0_gate = gate(f, FrameClass::Wk4T0);
    let td_gate = gate(f, FrameClass::K4);
    let mut s = Sampler {
        ls,
        cfg,
        violations: Vec::new(),
    };
    let (mut forth, mut back, mut t0, mut td) = (0, 0, 0, 0);
    if !f.is_empty() {
        for i in 0..cfg.samples {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let p = ls.random_point(&mut rng, cfg.level_cap);
            s.forth(i, p);
            forth += 1;
            back += s.back(i, &mut rng, p);
            if t0_gate.is_ok() && s.t0(i, &mut rng, p) {
                t0 += 1;
            }
            if td_gate.is_ok() {
                s.td(i, p);
                td += 1;
            }
        }
    }
    LazyReport {
        samples: cfg.samples,
        forth_checks: forth,
        back_checks: back,
        t0: t0_gate.map(|_| GateStatus::Checked(t0)).unwrap_or_else(|g| g),
        td: td_gate.map(|_| GateStatus::Checked(td)).unwrap_or_else(|g| g),
        violations: s.violations,
    }
}

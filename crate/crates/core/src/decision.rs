//! Bounded satisfiability and validity: an exhaustive sweep over the frames
//! of a class up to a world count, one frame per isomorphism class, with all
//! valuations of the query's atoms.
//!
//! Frames are generated by augmentation: every class here is closed under
//! induced subframes, so each `n`-world frame of the class extends some
//! `(n-1)`-world frame of the class by one world. Extensions are reduced to
//! a canonical code (the least adjacency code over all relabellings) and
//! deduplicated.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::frames::{check_frame_class, Frame, FrameClass, Model};
use crate::semantics::{eval_closed, EvalError};
use crate::symbol::Symbol;
use crate::syntax::Formula;
use crate::worldset::WorldSet;

/// Canonical codes are packed into a `u64`.
pub const MAX_SEARCH_WORLDS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchProgress {
    /// World count being swept when the budget ran out.
    pub worlds: usize,
    /// Frames fully checked at that size.
    pub frames_checked: usize,
    pub frames_at_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("time budget exceeded while checking {}-world frames ({} of {} done)", .0.worlds, .0.frames_checked, .0.frames_at_size)]
    TimeBudgetExceeded(SearchProgress),
    #[error("invalid search: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub class: FrameClass,
    pub max_worlds: usize,
    /// Largest number of atoms in the query.
    pub max_atoms: usize,
    pub time_budget: Option<Duration>,
}

impl SearchConfig {
    pub fn new(class: FrameClass, max_worlds: usize) -> SearchConfig {
        SearchConfig {
            class,
            max_worlds,
            max_atoms: 4,
            time_budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub model: Model,
    pub world: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Satisfiable(Witness),
    NoneUpToBound { max_worlds: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidResult {
    Counterexample(Witness),
    NoCounterexampleUpToBound { max_worlds: usize },
}

fn code_of(f: &Frame, perm: &[usize]) -> u64 {
    let n = f.len();
    f.edges()
        .fold(0u64, |acc, (a, b)| acc | 1 << (perm[a] * n + perm[b]))
}

fn frame_of_code(n: usize, code: u64) -> Frame {
    Frame::from_edges(
        n,
        (0..n * n).filter(|i| code >> i & 1 == 1).map(|i| (i / n, i % n)),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// The least adjacency code over all relabellings of `f`.
pub fn canonical_code(f: &Frame) -> u64 {
    assert!(
        f.len() <= MAX_SEARCH_WORLDS,
        "canonical codes need at most {MAX_SEARCH_WORLDS} worlds"
    );
    permutations(f.len())
        .iter()
        .map(|p| code_of(f, p))
        .min()
        .unwrap_or(0)
}

type FrameCache = Mutex<HashMap<(FrameClass, usize), Arc<Vec<u64>>>>;

fn cache() -> &'static FrameCache {
    static CACHE: OnceLock<FrameCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn canonical_codes(class: FrameClass, n: usize) -> Arc<Vec<u64>> {
    if let Some(hit) = cache().lock().expect("cache lock").get(&(class, n)) {
        return hit.clone();
    }
    let codes: Vec<u64> = if n == 0 {
        vec![0]
    } else {
        let smaller = canonical_codes(class, n - 1);
        let perms = permutations(n);
        let found: BTreeSet<u64> = smaller
            .par_iter()
            .flat_map_iter(|&code| {
                let base = frame_of_code(n - 1, code);
                let perms = &perms;
                (0u64..1 << (2 * n - 1)).filter_map(move |ext| {
                    let mut f = Frame::new(n);
                    for (a, b) in base.edges() {
                        f.add_edge(a, b);
                    }
                    let new = n - 1;
                    for v in 0..new {
                        if ext >> v & 1 == 1 {
                            f.add_edge(new, v);
                        }
                        if ext >> (new + v) & 1 == 1 {
                            f.add_edge(v, new);
                        }
                    }
                    if ext >> (2 * new) & 1 == 1 {
                        f.add_edge(new, new);
                    }
                    check_frame_class(&f, class)
                        .is_member()
                        .then(|| perms.iter().map(|p| code_of(&f, p)).min().unwrap_or(0))
                })
            })
            .collect::<Vec<u64>>()
            .into_iter()
            .collect();
        found.into_iter().collect()
    };
    let codes = Arc::new(codes);
    cache()
        .lock()
        .expect("cache lock")
        .insert((class, n), codes.clone());
    codes
}

/// One frame per isomorphism class of `n`-world frames in `class`, in
/// increasing canonical code.
pub fn canonical_frames(class: FrameClass, n: usize) -> Vec<Frame> {
    assert!(
        n <= MAX_SEARCH_WORLDS,
        "frame enumeration is limited to {MAX_SEARCH_WORLDS} worlds"
    );
    canonical_codes(class, n)
        .iter()
        .map(|&c| frame_of_code(n, c))
        .collect()
}

fn query_atoms(f: &Formula, cfg: &SearchConfig) -> Result<Vec<Symbol>, SearchError> {
    let free = f.free_vars();
    if let Some(x) = free.iter().find(|x| !x.is_atom()) {
        return Err(SearchError::Eval(EvalError::UnboundVariable(*x)));
    }
    if free.len() > cfg.max_atoms {
        return Err(SearchError::InvalidInput(format!(
            "{} atoms exceed the atom budget {}",
            free.len(),
            cfg.max_atoms
        )));
    }
    Ok(free.into_iter().collect())
}

/// Valuation number `mask`: atom `i` holds at world `w` iff bit `i*n + w` is set.
fn valuation(frame: &Frame, atoms: &[Symbol], mask: u64) -> Model {
    let n = frame.len();
    let mut m = Model::new(frame.clone());
    for (i, &p) in atoms.iter().enumerate() {
        m.valuation.insert(
            p,
            WorldSet::from_worlds(n, (0..n).filter(|w| mask >> (i * n + w) & 1 == 1)),
        );
    }
    m
}

fn search_frame(f: &Formula, frame: &Frame, atoms: &[Symbol]) -> Option<Witness> {
    let bits = atoms.len() * frame.len();
    (0u64..1 << bits).find_map(|mask| {
        let model = valuation(frame, atoms, mask);
        let truth = eval_closed(&model, f).expect("atoms checked before the sweep");
        truth.first().map(|world| Witness { model, world })
    })
}

/// Finds a model of `f` with the fewest worlds, taking the least canonical
/// frame and then the least valuation at that size.
pub fn bounded_sat(f: &Formula, cfg: &SearchConfig) -> Result<SatResult, SearchError> {
    if cfg.max_worlds == 0 || cfg.max_worlds > MAX_SEARCH_WORLDS {
        return Err(SearchError::InvalidInput(format!(
            "max worlds must be between 1 and {MAX_SEARCH_WORLDS}"
        )));
    }
    let atoms = query_atoms(f, cfg)?;
    if atoms.len() * cfg.max_worlds > 24 {
        return Err(SearchError::InvalidInput(format!(
            "{} atoms over {} worlds is too many valuations",
            atoms.len(),
            cfg.max_worlds
        )));
    }
    let start = Instant::now();
    let over = |t: &Instant| cfg.time_budget.is_some_and(|b| t.elapsed() > b);
    for n in 1..=cfg.max_worlds {
        let codes = canonical_codes(cfg.class, n);
        if over(&start) {
            return Err(SearchError::TimeBudgetExceeded(SearchProgress {
                worlds: n,
                frames_checked: 0,
                frames_at_size: codes.len(),
            }));
        }
        let expired = AtomicBool::new(false);
        let done = AtomicUsize::new(0);
        let hit = codes.par_iter().find_map_first(|&code| {
            if expired.load(Ordering::Relaxed) {
                return None;
            }
            if over(&start) {
                expired.store(true, Ordering::Relaxed);
                return None;
            }
            let w = search_frame(f, &frame_of_code(n, code), &atoms);
            done.fetch_add(1, Ordering::Relaxed);
            w
        });
        if expired.load(Ordering::Relaxed) {
            return Err(SearchError::TimeBudgetExceeded(SearchProgress {
                worlds: n,
                frames_checked: done.load(Ordering::Relaxed),
                frames_at_size: codes.len(),
            }));
        }
        if let Some(w) = hit {
            return Ok(SatResult::Satisfiable(w));
        }
    }
    Ok(SatResult::NoneUpToBound {
        max_worlds: cfg.max_worlds,
    })
}

/// Searches for a refutation: a model of `¬f`.
pub fn bounded_valid(f: &Formula, cfg: &SearchConfig) -> Result<ValidResult, SearchError> {
    Ok(match bounded_sat(&Formula::neg(f.clone()), cfg)? {
        SatResult::Satisfiable(w) => ValidResult::Counterexample(w),
        SatResult::NoneUpToBound { max_worlds } => ValidResult::NoCounterexampleUpToBound { max_worlds },
    })
}

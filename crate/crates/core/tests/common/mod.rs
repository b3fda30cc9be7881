//! Seeded generators shared by the property suites. Proptest draws a seed
//! and these helpers grow formulas and models from it, so shrinking acts on
//! the seed and failures replay exactly.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topomu::frames::random::{random_frame, random_valuation};
use topomu::frames::{FrameClass, Model};
use topomu::syntax::random::FormulaGen;
use topomu::{Formula, Symbol, WorldSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atoms() -> Vec<Symbol> {
    vec![Symbol::new("p"), Symbol::new("q")]
}

pub fn formula(r: &mut ChaCha8Rng, depth: usize) -> Formula {
    FormulaGen::new(&["p", "q"], depth).formula(r)
}

/// A formula with at most `max_size` nodes.
pub fn small_formula(r: &mut ChaCha8Rng, depth: usize, max_size: usize) -> Formula {
    let gen = FormulaGen::new(&["p", "q"], depth);
    loop {
        let f = gen.formula(r);
        if f.size() <= max_size {
            return f;
        }
    }
}

pub fn positive_in(r: &mut ChaCha8Rng, x: Symbol, depth: usize) -> Formula {
    FormulaGen::new(&["p", "q"], depth).positive_in(r, x)
}

pub fn model(r: &mut ChaCha8Rng, class: FrameClass, max_worlds: usize) -> Model {
    let n = r.gen_range(1..=max_worlds);
    let frame = random_frame(r, class, n);
    random_valuation(r, frame, &atoms())
}

pub fn any_class(r: &mut ChaCha8Rng) -> FrameClass {
    FrameClass::VALUES[r.gen_range(0..FrameClass::VALUES.len())]
}

pub fn subset(r: &mut ChaCha8Rng, n: usize) -> WorldSet {
    WorldSet::from_worlds(n, (0..n).filter(|_| r.gen_bool(0.5)))
}

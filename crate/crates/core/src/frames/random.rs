//! Seeded random frames and models of a given class.
//!
//! Every class except `ALL` is sampled as a random preorder with some loops
//! removed: a relation is weakly transitive exactly when its reflexive
//! closure is a preorder.

use rand::Rng;

use super::{Frame, FrameClass, Model};
use crate::symbol::Symbol;
use crate::worldset::WorldSet;

fn random_preorder<R: Rng>(rng: &mut R, n: usize) -> Frame {
    let density = rng.gen_range(0.05..0.6);
    let mut f = Frame::new(n);
    for a in 0..n {
        f.add_edge(a, a);
        for b in 0..n {
            if a != b && rng.gen_bool(density) {
                f.add_edge(a, b);
            }
        }
    }
    // Warshall closure.
    for k in 0..n {
        for a in 0..n {
            if f.has_edge(a, k) {
                let row = f.successors(k).clone();
                f.succ[a].union_with(&row);
            }
        }
    }
    f
}

pub fn random_frame<R: Rng>(rng: &mut R, class: FrameClass, n: usize) -> Frame {
    if class == FrameClass::All {
        let density = rng.gen_range(0.1..0.6);
        let mut f = Frame::new(n);
        for a in 0..n {
            for b in 0..n {
                if rng.gen_bool(density) {
                    f.add_edge(a, b);
                }
            }
        }
        return f;
    }
    let mut f = random_preorder(rng, n);
    let cluster_size = |f: &Frame, w: usize| (0..n).filter(|&v| f.same_cluster(w, v)).count();
    match class {
        FrameClass::S4 | FrameClass::All => {}
        FrameClass::IrrWk4 => {
            for w in 0..n {
                f.remove_edge(w, w);
            }
        }
        FrameClass::Wk4 => {
            for w in 0..n {
                if rng.gen_bool(0.5) {
                    f.remove_edge(w, w);
                }
            }
        }
        FrameClass::K4 => {
            for w in 0..n {
                if cluster_size(&f, w) == 1 && rng.gen_bool(0.5) {
                    f.remove_edge(w, w);
                }
            }
        }
        FrameClass::Wk4T0 => {
            let mut done = vec![false; n];
            for w in 0..n {
                if done[w] {
                    continue;
                }
                let members: Vec<usize> = (0..n).filter(|&v| f.same_cluster(w, v)).collect();
                for &v in &members {
                    done[v] = true;
                }
                if rng.gen_bool(0.5) {
                    let v = members[rng.gen_range(0..members.len())];
                    f.remove_edge(v, v);
                }
            }
        }
    }
    f
}

/// A random valuation of `atoms` on `frame`, each world in each atom with probability 1/2.
pub fn random_valuation<R: Rng>(rng: &mut R, frame: Frame, atoms: &[Symbol]) -> Model {
    let n = frame.len();
    let mut m = Model::new(frame);
    for &p in atoms {
        let set = WorldSet::from_worlds(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        m.valuation.insert(p, set);
    }
    m
}

/// A random model with between 1 and `max_worlds` worlds.
pub fn random_model<R: Rng>(rng: &mut R, class: FrameClass, max_worlds: usize, atoms: &[Symbol]) -> Model {
    let n = rng.gen_range(1..=max_worlds.max(1));
    let frame = random_frame(rng, class, n);
    random_valuation(rng, frame, atoms)
}

//! Tools for the modal μ-calculus read over derivative spaces: finite
//! weakly transitive Kripke frames and finite topological spaces.
//!
//! * [`syntax`]: formulas, the concrete grammar, normalization, closure sets.
//! * [`frames`]: frames, models, frame classes, depth, unfolding, file format.
//! * [`semantics`]: model checking and fixpoint traces.
//! * [`morphisms`]: P-morphisms, bisimilarity and quotients.
//! * [`topology`]: finite spaces and the symbolic space over a frame.
//! * [`tangle`]: the spine model and the tangled-fragment experiment.
//! * [`proofs`]: axiom schemas, proof checking and soundness fuzzing.
//! * [`decision`]: bounded satisfiability and validity.

pub mod decision;
pub mod frames;
pub mod morphisms;
pub mod proofs;
pub mod semantics;
pub mod symbol;
pub mod syntax;
pub mod tangle;
pub mod topology;
pub mod worldset;

pub use frames::{Frame, FrameClass, Model};
pub use symbol::Symbol;
pub use syntax::{parse_formula, Formula, SurfaceFormula};
pub use worldset::WorldSet;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] syntax::SyntaxError),
    #[error(transparent)]
    Normalize(#[from] syntax::NormalizeError),
    #[error(transparent)]
    Eval(#[from] semantics::EvalError),
    #[error(transparent)]
    Frame(#[from] frames::FrameError),
    #[error(transparent)]
    Format(#[from] frames::io::FormatError),
    #[error(transparent)]
    Quotient(#[from] morphisms::QuotientError),
    #[error(transparent)]
    Topology(#[from] topology::TopologyError),
    #[error(transparent)]
    Tangle(#[from] tangle::TangleError),
    #[error(transparent)]
    Proof(#[from] proofs::ProofError),
    #[error(transparent)]
    Search(#[from] decision::SearchError),
}

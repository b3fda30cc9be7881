//! Formulas: the core language, its surface abbreviations, the concrete
//! grammar and the finite closure set used by the finite model arguments.

pub mod closure;
mod formula;
pub mod parser;
pub mod printer;
pub mod random;
mod surface;

pub use closure::{closure_set, Letter, Prefix, SigmaElement, SigmaSet};
pub use formula::{AlphaIndex, Formula};
pub use parser::{parse, SyntaxError};
pub use printer::{print, print_core};
pub use surface::{NormalizeError, SurfaceFormula};

/// Parses and normalizes in one step.
pub fn parse_formula(input: &str) -> Result<Formula, crate::Error> {
    Ok(parse(input)?.normalize()?)
}

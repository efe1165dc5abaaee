//! Collage systems: grammar compression with repetition and truncation
//! rules.
//!
//! * [`model`]: rules, parsing, validation, expansion, grammar trees and
//!   typed factorizations.
//! * [`internalize`]: conversion of any collage system into an internal one
//!   of at most nine times the size.
//! * [`encode`], [`decode`]: the MAX-SAT formulation of the smallest
//!   internal collage system and the certified reconstruction of a
//!   solver's model.
//! * [`oracle`]: a direct factorization checker and exhaustive search.
//! * [`solve`]: end-to-end runs through an external MAX-SAT solver.

pub mod decode;
pub mod encode;
pub mod generate;
pub mod internalize;
pub mod model;
pub mod oracle;
pub mod solve;

pub use model::{CollageSystem, NtId, Rule};

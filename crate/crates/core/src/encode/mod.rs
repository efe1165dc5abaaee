//! The MAX-SAT formulation of the smallest internal collage system.
//!
//! A feasible assignment describes a factorization `T = F_1 ⋯ F_h` in
//! which every factor longer than one character copies an earlier factor
//! range, repeats the range right before it, or is a substring of a
//! disjoint range; the ranges form a tree and references are acyclic.
//! Soft clauses `¬p_i` and `¬refC` make the optimum minimize `h + m_tr`.

mod catalog;
mod cnf;
mod encoder;
mod wcnf;

pub use catalog::{CatalogError, VarName, VariableCatalog};
pub use cnf::{at_most_one, Clause, Family, Formula, Lit, Var};
pub use encoder::{encode, encode_with, EncodeOptions, MaxSatInstance};
pub use wcnf::{read_wcnf, write_formula, write_wcnf, WcnfError, WcnfFormat, WeightedFormula};

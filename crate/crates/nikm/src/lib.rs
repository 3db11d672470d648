//! Nested sequent calculi for intuitionistic grammar logics.
//!
//! The crate covers formulas and axiom grammars, nested sequents, the rules
//! of the calculus with an independent checker, bounded proof search,
//! height-preserving proof transformations including cut elimination,
//! Lyndon interpolation with side proofs, and a finite Kripke-model oracle.

pub mod calculus;
pub mod formula;
pub mod grammar;
pub mod interpolate;
pub mod par;
pub mod search;
pub mod semantics;
pub mod transform;
pub mod sequent;

pub use calculus::{apply_backward, check_proof, Proof, RuleId, RuleInstance};
pub use formula::{parse_formula, Character, Formula, Polarity};
pub use grammar::{build_grammar, AxiomSet, Grammar, Logic};
pub use sequent::{Name, NestedSequent};

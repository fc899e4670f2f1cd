//! Grounding of first-order ASPIC+ argumentation theories via Datalog.
//!
//! The pipeline translates a theory into a (stratified) Datalog program,
//! evaluates it, and instantiates each rule and contrary expression only with
//! the substitutions the program derives. A naive grounder over the Herbrand
//! universe, an argument constructor and an extension enumerator are included
//! so that groundings can be checked against each other.

pub mod analysis;
pub mod argumentation;
pub mod datalog;
pub mod fixtures;
pub mod generator;
pub mod grounder;
pub mod naive;
pub mod semantics;
pub mod syntax;
pub mod transform;

pub use syntax::{parse_theory, validate, Atom, GroundTheory, Rule, Term, Theory};

//! Small theories used throughout the tests and documentation.

use crate::syntax::{parse_theory, Theory};

/// Assumptions `a(1)`, `a(2)`, one fact, two strict rules and one defeasible
/// rule whose head is undercut by a strict consequence of itself.
pub const RUNNING_EXAMPLE: &str = "\
contrary a(X): b(X).
contrary n_d(X): e(X).
contrary c(X): d(X).
b(X) <- f(X,Y).
e(X) <- c(X).
n_d(X): c(X) <= a(X).
assume a(1).
assume a(2).
fact f(1,2).
";

/// A propositional theory on which Datalog pruning of assumptions changes
/// the admissible sets: fact `a` attacks assumption `b`, which attacks `c`.
pub const ADMISSIBILITY_COUNTEREXAMPLE: &str = "\
contrary b: a.
contrary c: b.
fact a.
assume b.
assume c.
";

pub fn running_example() -> Theory {
    parse_theory(RUNNING_EXAMPLE).expect("fixture parses")
}

pub fn admissibility_counterexample() -> Theory {
    parse_theory(ADMISSIBILITY_COUNTEREXAMPLE).expect("fixture parses")
}

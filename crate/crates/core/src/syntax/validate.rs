use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Atom, Rule, Theory, RESERVED_PREFIX};

/// A violated well-formedness condition, with the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Head (or name) variables not bound by the body.
    UnsafeRule { rule: String, unbound: Vec<String> },
    /// Variables in the contraries that do not occur in the subject.
    UnsafeContrary { expr: String, unbound: Vec<String> },
    ConstantInContrary { expr: String },
    NonGroundFact { atom: String },
    NonGroundAssumption { atom: String },
    FactIsAssumption { atom: String },
    ArityClash { predicate: String, arities: Vec<usize> },
    ReservedPredicate { predicate: String },
    /// A name predicate shared by several defeasible rules.
    SharedRuleName { predicate: String, rules: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnsafeRule { rule, unbound } => write!(
                f,
                "unsafe rule `{rule}`: variables {} do not occur in the body",
                unbound.join(", ")
            ),
            Violation::UnsafeContrary { expr, unbound } => write!(
                f,
                "unsafe contrary expression `{expr}`: variables {} do not occur in the subject",
                unbound.join(", ")
            ),
            Violation::ConstantInContrary { expr } => {
                write!(f, "contrary expression `{expr}` contains a constant")
            }
            Violation::NonGroundFact { atom } => write!(f, "fact `{atom}` is not ground"),
            Violation::NonGroundAssumption { atom } => {
                write!(f, "assumption `{atom}` is not ground")
            }
            Violation::FactIsAssumption { atom } => {
                write!(f, "`{atom}` is both a fact and an assumption")
            }
            Violation::ArityClash { predicate, arities } => write!(
                f,
                "predicate `{predicate}` is used with arities {arities:?}"
            ),
            Violation::ReservedPredicate { predicate } => {
                write!(f, "predicate `{predicate}` uses the reserved prefix `__`")
            }
            Violation::SharedRuleName { predicate, rules } => write!(
                f,
                "name predicate `{predicate}` is shared by rules {}",
                rules.join(" ")
            ),
        }
    }
}

/// Checks every well-formedness condition; an empty result means valid.
pub fn validate(theory: &Theory) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut arities: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for atom in theory.atoms() {
        arities
            .entry(atom.predicate.as_str())
            .or_default()
            .insert(atom.arity());
    }
    for (predicate, set) in &arities {
        if predicate.starts_with(RESERVED_PREFIX) {
            out.push(Violation::ReservedPredicate {
                predicate: predicate.to_string(),
            });
        }
        if set.len() > 1 {
            out.push(Violation::ArityClash {
                predicate: predicate.to_string(),
                arities: set.iter().copied().collect(),
            });
        }
    }

    for rule in theory.rules() {
        let body_vars: BTreeSet<&str> = rule.body().iter().flat_map(Atom::variables).collect();
        let mut unbound: Vec<String> = rule
            .head()
            .variables()
            .chain(rule.name().into_iter().flat_map(Atom::variables))
            .filter(|v| !body_vars.contains(v))
            .map(str::to_string)
            .collect();
        unbound.sort();
        unbound.dedup();
        if !unbound.is_empty() {
            out.push(Violation::UnsafeRule {
                rule: rule.to_string(),
                unbound,
            });
        }
    }

    let mut names: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for r in &theory.defeasible {
        names
            .entry(r.name.predicate.as_str())
            .or_default()
            .push(Rule::Defeasible(r.clone()).to_string());
    }
    for (predicate, rules) in names {
        if rules.len() > 1 {
            out.push(Violation::SharedRuleName {
                predicate: predicate.to_string(),
                rules,
            });
        }
    }

    for c in &theory.contraries {
        let atoms = || std::iter::once(&c.subject).chain(&c.contraries);
        if atoms().any(|a| a.constants().next().is_some()) {
            out.push(Violation::ConstantInContrary {
                expr: c.to_string(),
            });
        }
        let subject_vars: BTreeSet<&str> = c.subject.variables().collect();
        let unbound: BTreeSet<&str> = c
            .contraries
            .iter()
            .flat_map(Atom::variables)
            .filter(|v| !subject_vars.contains(v))
            .collect();
        if !unbound.is_empty() {
            out.push(Violation::UnsafeContrary {
                expr: c.to_string(),
                unbound: unbound.into_iter().map(str::to_string).collect(),
            });
        }
    }

    for a in &theory.facts {
        if !a.is_ground() {
            out.push(Violation::NonGroundFact {
                atom: a.to_string(),
            });
        }
        if theory.assumptions.contains(a) {
            out.push(Violation::FactIsAssumption {
                atom: a.to_string(),
            });
        }
    }
    for a in &theory.assumptions {
        if !a.is_ground() {
            out.push(Violation::NonGroundAssumption {
                atom: a.to_string(),
            });
        }
    }
    out
}

//! Reference grounding by exhaustive substitution over the Herbrand universe.
//!
//! Every rule and contrary expression is instantiated with every total map
//! from its variables into the constants of the theory. This is slow on
//! purpose and serves as the oracle the Datalog-based groundings are checked
//! against.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{ContraryExpr, GroundTheory, Rule, Substitution, Term, Theory};

pub const DEFAULT_INSTANCE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("naive grounding would produce more than {cap} ground instances")]
pub struct InstanceCapExceeded {
    pub cap: usize,
}

/// Anything that can be instantiated by substituting its variables.
pub trait Instantiable: Sized + Ord {
    fn variables(&self) -> Vec<String>;
    fn apply(&self, subst: &Substitution) -> Self;
}

impl Instantiable for Rule {
    fn variables(&self) -> Vec<String> {
        Rule::variables(self)
    }

    fn apply(&self, subst: &Substitution) -> Self {
        Rule::apply(self, subst)
    }
}

impl Instantiable for ContraryExpr {
    fn variables(&self) -> Vec<String> {
        ContraryExpr::variables(self)
    }

    fn apply(&self, subst: &Substitution) -> Self {
        ContraryExpr::apply(self, subst)
    }
}

/// Number of instances `item` has over a universe of the given size, or
/// `None` on overflow.
pub fn instance_count<T: Instantiable>(item: &T, universe_size: usize) -> Option<usize> {
    universe_size.checked_pow(u32::try_from(item.variables().len()).ok()?)
}

/// All ground instances of `item` over `universe`.
pub fn naive_ground_rule<T: Instantiable>(item: &T, universe: &BTreeSet<String>) -> BTreeSet<T> {
    let vars = item.variables();
    let consts: Vec<&String> = universe.iter().collect();
    let mut out = BTreeSet::new();
    if vars.is_empty() {
        out.insert(item.apply(&Substitution::new()));
        return out;
    }
    if consts.is_empty() {
        return out;
    }
    // Odometer over |universe|^|vars| assignments.
    let mut digits = vec![0usize; vars.len()];
    loop {
        let subst: Substitution = vars
            .iter()
            .zip(&digits)
            .map(|(v, &d)| (v.clone(), Term::Const(consts[d].clone())))
            .collect();
        out.insert(item.apply(&subst));
        let mut i = 0;
        loop {
            if i == digits.len() {
                return out;
            }
            digits[i] += 1;
            if digits[i] < consts.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Grounds every rule and contrary expression over the theory's Herbrand
/// universe; facts and assumptions pass through unchanged.
pub fn naive_ground_theory(
    theory: &Theory,
    cap: usize,
) -> Result<GroundTheory, InstanceCapExceeded> {
    let universe = theory.herbrand_universe();
    let mut total = 0usize;
    let mut charge = |n: Option<usize>| -> Result<(), InstanceCapExceeded> {
        total = n
            .and_then(|n| total.checked_add(n))
            .filter(|&t| t <= cap)
            .ok_or(InstanceCapExceeded { cap })?;
        Ok(())
    };
    for rule in theory.rules() {
        charge(instance_count(&rule, universe.len()))?;
    }
    for c in &theory.contraries {
        charge(instance_count(c, universe.len()))?;
    }

    let mut out = Theory {
        facts: theory.facts.clone(),
        assumptions: theory.assumptions.clone(),
        ..Theory::default()
    };
    for rule in theory.rules() {
        for g in naive_ground_rule(&rule, &universe) {
            out.add_rule(g);
        }
    }
    for c in &theory.contraries {
        out.contraries.extend(naive_ground_rule(c, &universe));
    }
    Ok(GroundTheory::new(out).expect("all variables were substituted"))
}

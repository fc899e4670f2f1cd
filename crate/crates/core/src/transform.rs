//! Translation of a theory into the auxiliary Datalog program whose model
//! tells the grounder which rule instances are needed.
//!
//! Every rule `r` with body `B(X)` gets a fresh predicate `__r<k>` carrying
//! exactly the body variables, and is rewritten to
//!
//! ```text
//! __r<k>(X) :- B(X).
//! head      :- __r<k>(X).
//! name      :- __r<k>(X).      % defeasible rules only
//! ```
//!
//! Facts and assumptions become bodiless rules. The pruning variant adds,
//! to the first rule, a negated literal for every contrary of the rule's
//! defeasible elements whose predicate is non-approximated, and guards each
//! assumption by the negation of its non-approximated contraries. Only
//! non-approximated predicates are negated, so the result is stratified.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::non_approximated_predicates;
use crate::datalog::{DatalogProgram, DatalogRule};
use crate::syntax::{Atom, ContraryExpr, Rule, Term, Theory};

pub const AUX_PREFIX: &str = "__r";

/// Bijection between rules and their auxiliary predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuxNaming {
    pub aux_of: BTreeMap<Rule, String>,
    pub rule_of: BTreeMap<String, Rule>,
}

impl AuxNaming {
    /// `__r<k>` for the k-th rule (1-based) in canonical order.
    pub fn for_theory(theory: &Theory) -> Self {
        let mut naming = AuxNaming::default();
        for (k, rule) in theory.canonical_rules().into_iter().enumerate() {
            let name = format!("{AUX_PREFIX}{}", k + 1);
            naming.aux_of.insert(rule.clone(), name.clone());
            naming.rule_of.insert(name, rule);
        }
        naming
    }

    pub fn aux(&self, rule: &Rule) -> Option<&str> {
        self.aux_of.get(rule).map(String::as_str)
    }
}

/// The auxiliary atom of `rule`: `aux` applied to the body variables in
/// order of first occurrence.
pub fn aux_atom(rule: &Rule, aux: &str) -> Atom {
    Atom::new(aux, rule.body_variables().into_iter().map(Term::Var).collect())
}

pub fn transform1_rule(rule: &Rule, aux: &str) -> Vec<DatalogRule> {
    translate_rule(rule, aux, Vec::new())
}

fn translate_rule(rule: &Rule, aux: &str, negated: Vec<Atom>) -> Vec<DatalogRule> {
    let aux = aux_atom(rule, aux);
    let mut out = vec![
        DatalogRule::new(aux.clone(), rule.body().iter().cloned().collect(), negated),
        DatalogRule::new(rule.head().clone(), vec![aux.clone()], Vec::new()),
    ];
    if let Some(name) = rule.name() {
        out.push(DatalogRule::new(name.clone(), vec![aux], Vec::new()));
    }
    out
}

/// Contrary atoms of `element` under every expression whose subject matches
/// it, restricted to predicates in `keep`.
///
/// The subject is matched one way onto the element, so the contraries come
/// out in the element's own variables. An expression whose subject is more
/// specific than the element (say `p(X,X)` against `p(Y,Z)`) contributes
/// nothing, which only weakens the pruning.
pub fn filtered_contraries(
    element: &Atom,
    contraries: &BTreeSet<ContraryExpr>,
    keep: &BTreeSet<String>,
) -> BTreeSet<Atom> {
    contraries
        .iter()
        .filter(|c| c.subject.predicate == element.predicate)
        .filter_map(|c| c.contraries_of(element))
        .flatten()
        .filter(|a| keep.contains(&a.predicate))
        .collect()
}

pub fn transform2_rule(
    rule: &Rule,
    aux: &str,
    non_approx: &BTreeSet<String>,
    contraries: &BTreeSet<ContraryExpr>,
) -> Vec<DatalogRule> {
    let negated: BTreeSet<Atom> = rule
        .defeasible_elements()
        .into_iter()
        .flat_map(|e| filtered_contraries(e, contraries, non_approx))
        .collect();
    translate_rule(rule, aux, negated.into_iter().collect())
}

pub fn transform2_assumption(
    atom: &Atom,
    non_approx: &BTreeSet<String>,
    contraries: &BTreeSet<ContraryExpr>,
) -> DatalogRule {
    let negated = filtered_contraries(atom, contraries, non_approx);
    DatalogRule::new(atom.clone(), Vec::new(), negated.into_iter().collect())
}

/// The plain translation; the result is negation-free.
pub fn transform1_theory(theory: &Theory) -> (DatalogProgram, AuxNaming) {
    let naming = AuxNaming::for_theory(theory);
    let mut rules: Vec<DatalogRule> = theory
        .facts
        .iter()
        .chain(&theory.assumptions)
        .cloned()
        .map(DatalogRule::fact)
        .collect();
    for (rule, aux) in &naming.aux_of {
        rules.extend(transform1_rule(rule, aux));
    }
    (DatalogProgram::new(rules), naming)
}

/// The pruning translation, using the non-approximated predicates of
/// `theory`.
///
/// # Panics
///
/// If the resulting program is not stratifiable, which would mean the
/// approximation analysis missed a negative cycle.
pub fn transform2_theory(theory: &Theory) -> (DatalogProgram, AuxNaming) {
    let naming = AuxNaming::for_theory(theory);
    let non_approx = non_approximated_predicates(theory);
    let mut rules: Vec<DatalogRule> = theory
        .facts
        .iter()
        .cloned()
        .map(DatalogRule::fact)
        .collect();
    rules.extend(
        theory
            .assumptions
            .iter()
            .map(|a| transform2_assumption(a, &non_approx, &theory.contraries)),
    );
    for (rule, aux) in &naming.aux_of {
        rules.extend(transform2_rule(rule, aux, &non_approx, &theory.contraries));
    }
    let program = DatalogProgram::new(rules);
    if let Err(e) = program.stratify() {
        panic!("pruning translation is not stratified ({e}); approximation analysis is wrong");
    }
    (program, naming)
}

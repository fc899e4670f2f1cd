//! Grounding by querying the auxiliary Datalog program.
//!
//! Each answer `__r<k>(a)` to the auxiliary predicate of a rule yields the
//! instance of that rule with its body variables mapped to `a`. Contrary
//! expressions are instantiated from the answers for their subject
//! predicate. One model is computed per program and shared by all queries.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::analysis::rule_scc_order;
use crate::datalog::{DatalogError, DatalogProgram};
use crate::naive::{naive_ground_theory, InstanceCapExceeded};
use crate::syntax::{
    validate, Atom, ContraryExpr, GroundTheory, Rule, Substitution, Theory, Violation,
};
use crate::transform::{transform1_theory, transform2_theory, AuxNaming};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("invalid theory: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Datalog(#[from] DatalogError),
    #[error(transparent)]
    InstanceCap(#[from] InstanceCapExceeded),
}

/// Which Datalog translation drives the grounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Translation {
    /// Negation-free; keeps every instance that occurs in some argument.
    Plain,
    /// Stratified; drops instances whose applicability is already refuted.
    Pruned,
}

/// The four groundings, from the exhaustive oracle to the fully simplified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroundingMode {
    Naive,
    Plain,
    Pruned,
    Full,
}

impl GroundingMode {
    pub const ALL: [GroundingMode; 4] = [
        GroundingMode::Naive,
        GroundingMode::Plain,
        GroundingMode::Pruned,
        GroundingMode::Full,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroundingMode::Naive => "naive",
            GroundingMode::Plain => "t1",
            GroundingMode::Pruned => "t2",
            GroundingMode::Full => "full",
        }
    }
}

impl fmt::Display for GroundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GroundingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        GroundingMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown grounding mode `{s}` (naive, t1, t2, full)"))
    }
}

/// Instances of `rule` given by the answers to its auxiliary predicate.
pub fn ground_rule_via_queries(
    rule: &Rule,
    program: &DatalogProgram,
    naming: &AuxNaming,
) -> Result<BTreeSet<Rule>, DatalogError> {
    let Some(aux) = naming.aux(rule) else {
        return Ok(BTreeSet::new());
    };
    let vars = rule.body_variables();
    Ok(program
        .query(aux)?
        .into_iter()
        .map(|answer| {
            let subst: Substitution = vars.iter().cloned().zip(answer.args).collect();
            rule.apply(&subst)
        })
        .collect())
}

pub fn ground_contraries(
    contraries: &BTreeSet<ContraryExpr>,
    program: &DatalogProgram,
) -> Result<BTreeSet<ContraryExpr>, DatalogError> {
    let mut out = BTreeSet::new();
    for c in contraries {
        for answer in program.query(&c.subject.predicate)? {
            if let Some(subst) = c.subject.match_onto(&answer) {
                out.insert(c.apply(&subst));
            }
        }
    }
    Ok(out)
}

/// Assumptions derivable from the program.
pub fn ground_assumptions(
    assumptions: &BTreeSet<Atom>,
    program: &DatalogProgram,
) -> Result<BTreeSet<Atom>, DatalogError> {
    let model = program.model()?;
    Ok(assumptions
        .iter()
        .filter(|a| model.contains(a))
        .cloned()
        .collect())
}

/// Grounds `theory` through the chosen translation. Facts pass through; under
/// [`Translation::Plain`] so do assumptions.
pub fn ground_theory(theory: &Theory, translation: Translation) -> Result<GroundTheory, GroundError> {
    check(theory)?;
    let (program, naming) = match translation {
        Translation::Plain => transform1_theory(theory),
        Translation::Pruned => transform2_theory(theory),
    };
    let mut out = Theory {
        facts: theory.facts.clone(),
        assumptions: match translation {
            Translation::Plain => theory.assumptions.clone(),
            Translation::Pruned => ground_assumptions(&theory.assumptions, &program)?,
        },
        contraries: ground_contraries(&theory.contraries, &program)?,
        ..Theory::default()
    };
    for rule in theory.rules() {
        for g in ground_rule_via_queries(&rule, &program, &naming)? {
            out.add_rule(g);
        }
    }
    Ok(into_ground(out))
}

/// Pruned grounding plus fact promotion: walking the rule components in
/// topological order, every ground strict rule whose body consists of facts
/// (and whose head is not an assumption) is removed and its head becomes a
/// fact, until no new facts appear.
pub fn ground_theory_full(theory: &Theory) -> Result<GroundTheory, GroundError> {
    check(theory)?;
    let (program, naming) = transform2_theory(theory);
    let mut facts = theory.facts.clone();
    let mut out = Theory::default();

    for component in rule_scc_order(theory).components {
        let mut grounded = BTreeSet::new();
        for rule in &component {
            grounded.extend(ground_rule_via_queries(rule, &program, &naming)?);
        }
        loop {
            let before = facts.len();
            let promotable: Vec<Rule> = grounded
                .iter()
                .filter(|r| match r {
                    Rule::Strict(s) => {
                        s.body.iter().all(|b| facts.contains(b))
                            && !theory.assumptions.contains(&s.head)
                    }
                    Rule::Defeasible(_) => false,
                })
                .cloned()
                .collect();
            for r in promotable {
                facts.insert(r.head().clone());
                grounded.remove(&r);
            }
            if facts.len() == before {
                break;
            }
        }
        for r in grounded {
            out.add_rule(r);
        }
    }

    out.facts = facts;
    out.assumptions = ground_assumptions(&theory.assumptions, &program)?;
    out.contraries = ground_contraries(&theory.contraries, &program)?;
    Ok(into_ground(out))
}

/// Dispatches on `mode`. `rule_budget` caps the number of ground rules and
/// contrary expressions the naive grounder may produce.
pub fn ground(theory: &Theory, mode: GroundingMode, rule_budget: usize) -> Result<GroundTheory, GroundError> {
    match mode {
        GroundingMode::Naive => {
            check(theory)?;
            Ok(naive_ground_theory(theory, rule_budget)?)
        }
        GroundingMode::Plain => ground_theory(theory, Translation::Plain),
        GroundingMode::Pruned => ground_theory(theory, Translation::Pruned),
        GroundingMode::Full => ground_theory_full(theory),
    }
}

/// Validation, relaxed so that ground output can be grounded again: fully
/// ground contrary expressions are accepted (they are their own only
/// instance), and ground defeasible rules may share a name predicate as
/// long as their name atoms differ.
fn check(theory: &Theory) -> Result<(), GroundError> {
    let ground_exprs: BTreeSet<String> = theory
        .contraries
        .iter()
        .filter(|c| c.is_ground())
        .map(|c| c.to_string())
        .collect();
    let distinct_ground_names = |pred: &str| {
        let rules: Vec<_> = theory
            .defeasible
            .iter()
            .filter(|r| r.name.predicate == pred)
            .collect();
        let names: BTreeSet<_> = rules.iter().map(|r| &r.name).collect();
        rules.iter().all(|r| Rule::from((*r).clone()).is_ground()) && names.len() == rules.len()
    };
    let violations: Vec<Violation> = validate(theory)
        .into_iter()
        .filter(|v| match v {
            Violation::ConstantInContrary { expr } => !ground_exprs.contains(expr),
            Violation::SharedRuleName { predicate, .. } => !distinct_ground_names(predicate),
            _ => true,
        })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(GroundError::Invalid(violations))
    }
}

fn into_ground(theory: Theory) -> GroundTheory {
    GroundTheory::new(theory).expect("safe rules are fully instantiated by their body variables")
}

//! Seeded random first-order theories.
//!
//! Randomness comes from xoshiro256++ seeded through `seed_from_u64` (the
//! PCG32 seed expansion of `rand_core`), so a seed reproduces the same
//! theory on every platform.
//!
//! Shape of a generated theory:
//!
//! * predicates `p0, p1, ...`, each with an arity drawn from `arity_dist`;
//! * a knowledge base of distinct ground atoms over those predicates, each
//!   an assumption with probability `assumption_ratio` and a fact otherwise;
//! * rules whose body length is drawn from `body_len_dist`. Each rule draws
//!   a pool of `1..=max_vars_per_rule` variables; every argument position is
//!   a pool variable with probability 0.7 and a constant otherwise. Head
//!   arguments are body variables (or constants), so rules are safe. A
//!   defeasible rule `k` is named `d<k>(V)` over its body variables `V`;
//! * contrary expressions whose subject is a predicate that can be attacked
//!   (of an assumption, a defeasible head or a rule name) applied to distinct
//!   variables, and whose contraries, `contrary_size_dist` many, use only
//!   those variables.
//!
//! All choices among candidates are uniform. With `acyclic` set, a rule with
//! head `p_i` only uses `p_j`, `j < i`, in its body.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::syntax::{Atom, ContraryExpr, DefeasibleRule, Rule, StrictRule, Term, Theory};

const VAR_PROBABILITY: f64 = 0.7;
const HEAD_VAR_PROBABILITY: f64 = 0.8;
const ATTEMPTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenConfigError {
    #[error("distribution `{0}` must be non-empty, non-negative and sum to 1")]
    BadDistribution(&'static str),
    #[error("constant range is empty")]
    EmptyConstantRange,
    #[error("assumption ratio must lie in [0, 1]")]
    BadAssumptionRatio,
    #[error("max_vars_per_rule must be at least 1")]
    NoVariables,
    #[error("need at least {0} predicates")]
    TooFewPredicates(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub n_strict: usize,
    pub n_defeasible: usize,
    pub n_contraries: usize,
    pub n_predicates: usize,
    pub max_vars_per_rule: usize,
    pub n_atoms_in_kb: usize,
    pub constant_range: RangeInclusive<u32>,
    /// `arity_dist[i]` is the probability of arity `i + 1`.
    pub arity_dist: Vec<f64>,
    /// `body_len_dist[i]` is the probability of `i + 1` body atoms.
    pub body_len_dist: Vec<f64>,
    /// `contrary_size_dist[i]` is the probability of `i + 1` contraries.
    pub contrary_size_dist: Vec<f64>,
    pub assumption_ratio: f64,
    pub acyclic: bool,
}

/// Arities 1 to 5; 80% of the mass evenly on 1 to 3.
pub fn default_arity_dist() -> Vec<f64> {
    vec![0.8 / 3.0, 0.8 / 3.0, 0.8 / 3.0, 0.1, 0.1]
}

/// Body lengths 1 to 10; 80% of the mass evenly on 1 to 4.
pub fn default_body_len_dist() -> Vec<f64> {
    let mut d = vec![0.2; 4];
    d.extend([0.2 / 6.0; 6]);
    d
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            n_strict: 5,
            n_defeasible: 5,
            n_contraries: 7,
            n_predicates: 10,
            max_vars_per_rule: 3,
            n_atoms_in_kb: 20,
            constant_range: 0..=30,
            arity_dist: default_arity_dist(),
            body_len_dist: default_body_len_dist(),
            contrary_size_dist: vec![1.0 / 3.0; 3],
            assumption_ratio: 0.5,
            acyclic: false,
        }
    }
}

impl GenConfig {
    pub fn check(&self) -> Result<(), GenConfigError> {
        for (name, d) in [
            ("arity_dist", &self.arity_dist),
            ("body_len_dist", &self.body_len_dist),
            ("contrary_size_dist", &self.contrary_size_dist),
        ] {
            let sum: f64 = d.iter().sum();
            if d.is_empty() || d.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(GenConfigError::BadDistribution(name));
            }
        }
        if self.constant_range.is_empty() {
            return Err(GenConfigError::EmptyConstantRange);
        }
        if !(0.0..=1.0).contains(&self.assumption_ratio) {
            return Err(GenConfigError::BadAssumptionRatio);
        }
        if self.max_vars_per_rule == 0 {
            return Err(GenConfigError::NoVariables);
        }
        let rules = self.n_strict + self.n_defeasible;
        let needed = match (rules > 0 && self.acyclic, rules > 0 || self.n_atoms_in_kb > 0) {
            (true, _) => 2,
            (false, true) => 1,
            _ => 0,
        };
        if self.n_predicates < needed {
            return Err(GenConfigError::TooFewPredicates(needed));
        }
        Ok(())
    }
}

struct Gen<'a> {
    cfg: &'a GenConfig,
    rng: Xoshiro256PlusPlus,
    arities: Vec<usize>,
}

impl Gen<'_> {
    fn draw(&mut self, dist: &[f64]) -> usize {
        WeightedIndex::new(dist)
            .expect("checked distribution")
            .sample(&mut self.rng)
            + 1
    }

    fn constant(&mut self) -> Term {
        Term::constant(self.rng.random_range(self.cfg.constant_range.clone()).to_string())
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.rng.random_range(0..items.len())].clone()
    }

    fn atom(&mut self, pred: usize, vars: &[String]) -> Atom {
        let args = (0..self.arities[pred])
            .map(|_| {
                if !vars.is_empty() && self.rng.random_bool(VAR_PROBABILITY) {
                    Term::Var(self.pick(vars))
                } else {
                    self.constant()
                }
            })
            .collect();
        Atom::new(format!("p{pred}"), args)
    }

    fn kb(&mut self, theory: &mut Theory) {
        for _ in 0..self.cfg.n_atoms_in_kb {
            for _ in 0..ATTEMPTS {
                let pred = self.rng.random_range(0..self.cfg.n_predicates);
                let atom = self.atom(pred, &[]);
                if theory.facts.contains(&atom) || theory.assumptions.contains(&atom) {
                    continue;
                }
                if self.rng.random_bool(self.cfg.assumption_ratio) {
                    theory.assumptions.insert(atom);
                } else {
                    theory.facts.insert(atom);
                }
                break;
            }
        }
    }

    fn rule(&mut self, index: usize, defeasible: bool) -> Rule {
        let n = self.cfg.n_predicates;
        let head_pred = if self.cfg.acyclic {
            self.rng.random_range(1..n)
        } else {
            self.rng.random_range(0..n)
        };
        let body_preds = if self.cfg.acyclic { head_pred } else { n };
        let n_vars = self.rng.random_range(1..=self.cfg.max_vars_per_rule);
        let pool: Vec<String> = (0..n_vars).map(|i| format!("X{i}")).collect();

        let len = self.draw(&self.cfg.body_len_dist.clone());
        let mut body = BTreeSet::new();
        for _ in 0..len {
            for _ in 0..ATTEMPTS {
                let pred = self.rng.random_range(0..body_preds);
                if body.insert(self.atom(pred, &pool)) {
                    break;
                }
            }
        }

        let mut body_vars: Vec<String> = body
            .iter()
            .flat_map(|a: &Atom| a.variables().map(String::from).collect::<Vec<_>>())
            .collect();
        body_vars.sort();
        body_vars.dedup();
        let head_args = (0..self.arities[head_pred])
            .map(|_| {
                if !body_vars.is_empty() && self.rng.random_bool(HEAD_VAR_PROBABILITY) {
                    Term::Var(self.pick(&body_vars))
                } else {
                    self.constant()
                }
            })
            .collect();
        let head = Atom::new(format!("p{head_pred}"), head_args);
        if defeasible {
            let name = Atom::new(
                format!("d{index}"),
                body_vars.into_iter().map(Term::Var).collect(),
            );
            DefeasibleRule::new(name, body, head).into()
        } else {
            StrictRule::new(body, head).into()
        }
    }

    fn contrary(&mut self, subjects: &[(String, usize)]) -> ContraryExpr {
        let (pred, arity) = self.pick(subjects);
        let vars: Vec<String> = (0..arity).map(|i| format!("X{i}")).collect();
        let subject = Atom::new(pred, vars.iter().cloned().map(Term::Var).collect());
        let size = self.draw(&self.cfg.contrary_size_dist.clone());
        let mut contraries = BTreeSet::new();
        for _ in 0..size {
            for _ in 0..ATTEMPTS {
                let p = self.rng.random_range(0..self.cfg.n_predicates);
                let args = (0..self.arities[p]).map(|_| Term::Var(self.pick(&vars))).collect();
                if contraries.insert(Atom::new(format!("p{p}"), args)) {
                    break;
                }
            }
        }
        ContraryExpr::new(subject, contraries)
    }
}

/// A validation-clean theory drawn according to `cfg`. Counts are met
/// exactly unless the constant range is too small to keep atoms, rules or
/// contrary expressions distinct.
pub fn generate(cfg: &GenConfig) -> Result<Theory, GenConfigError> {
    cfg.check()?;
    let mut g = Gen {
        cfg,
        rng: Xoshiro256PlusPlus::seed_from_u64(cfg.seed),
        arities: Vec::new(),
    };
    g.arities = (0..cfg.n_predicates)
        .map(|_| g.draw(&cfg.arity_dist))
        .collect();

    let mut theory = Theory::default();
    g.kb(&mut theory);

    for k in 0..cfg.n_strict + cfg.n_defeasible {
        let defeasible = k >= cfg.n_strict;
        for _ in 0..ATTEMPTS {
            let rule = g.rule(k + 1, defeasible);
            if !theory.rules().any(|r| r == rule) {
                theory.add_rule(rule);
                break;
            }
        }
    }

    let mut subjects: BTreeSet<(String, usize)> = BTreeSet::new();
    for a in &theory.assumptions {
        subjects.insert((a.predicate.clone(), a.arity()));
    }
    for r in &theory.defeasible {
        subjects.insert((r.head.predicate.clone(), r.head.arity()));
        subjects.insert((r.name.predicate.clone(), r.name.arity()));
    }
    // Contraries must be built from subject variables only.
    subjects.retain(|(_, arity)| *arity > 0);
    if subjects.is_empty() {
        subjects.extend((0..cfg.n_predicates).map(|i| (format!("p{i}"), g.arities[i])));
    }
    let subjects: Vec<(String, usize)> = subjects.into_iter().collect();
    if !subjects.is_empty() {
        for _ in 0..cfg.n_contraries {
            for _ in 0..ATTEMPTS {
                if theory.contraries.insert(g.contrary(&subjects)) {
                    break;
                }
            }
        }
    }
    Ok(theory)
}

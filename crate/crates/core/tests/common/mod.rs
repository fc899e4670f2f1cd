#![allow(dead_code)]

use std::collections::BTreeSet;

use aspic_ground::argumentation::{induced_af, AttackGraph, DEFAULT_ARGUMENT_BUDGET};
use aspic_ground::generator::{generate, GenConfig};
use aspic_ground::grounder::{ground, GroundingMode};
use aspic_ground::naive::DEFAULT_INSTANCE_CAP;
use aspic_ground::semantics::{extensions, Semantics};
use aspic_ground::{GroundTheory, Theory};

/// Enumeration budget for the corpus; larger than the default so that no
/// corpus member has to be skipped.
pub const CORPUS_EXT_BUDGET: usize = 40;

/// Small acyclic theories: at most 8 rules, constants from `0..=5`, at most
/// 3 variables per rule. Sizes vary with the seed.
pub fn corpus_config(seed: u64) -> GenConfig {
    let i = seed as usize;
    GenConfig {
        seed,
        n_strict: i % 5,
        n_defeasible: (i / 5) % 5,
        n_contraries: 1 + i % 4,
        n_predicates: 3 + i % 3,
        max_vars_per_rule: 3,
        n_atoms_in_kb: 4 + i % 8,
        constant_range: 0..=(2 + (i % 4) as u32),
        arity_dist: vec![0.5, 0.35, 0.15],
        body_len_dist: vec![0.5, 0.3, 0.2],
        contrary_size_dist: vec![0.5, 0.3, 0.2],
        assumption_ratio: 0.5,
        acyclic: true,
    }
}

pub fn corpus(n: u64) -> Vec<Theory> {
    (0..n).map(|s| generate(&corpus_config(s)).unwrap()).collect()
}

pub struct Grounded {
    pub theory: GroundTheory,
    pub af: AttackGraph,
}

pub fn grounded(t: &Theory, mode: GroundingMode) -> Grounded {
    let theory = ground(t, mode, DEFAULT_INSTANCE_CAP).unwrap();
    let af = induced_af(&theory, DEFAULT_ARGUMENT_BUDGET).unwrap();
    Grounded { theory, af }
}

/// Like [`grounded`], but `None` when more than `arg_budget` arguments
/// would be built, as happens under cyclic rules.
pub fn try_grounded(t: &Theory, mode: GroundingMode, arg_budget: usize) -> Option<Grounded> {
    let theory = ground(t, mode, DEFAULT_INSTANCE_CAP).unwrap();
    let af = induced_af(&theory, arg_budget).ok()?;
    Some(Grounded { theory, af })
}

pub fn encoded_extensions(g: &Grounded, sem: Semantics) -> BTreeSet<BTreeSet<String>> {
    extensions(&g.af, sem, CORPUS_EXT_BUDGET).unwrap().encoded(&g.af)
}

pub fn claim_family(g: &Grounded, sem: Semantics) -> BTreeSet<BTreeSet<String>> {
    extensions(&g.af, sem, CORPUS_EXT_BUDGET)
        .unwrap()
        .claim_family()
        .into_iter()
        .map(|c| c.iter().map(|a| a.to_string()).collect())
        .collect()
}

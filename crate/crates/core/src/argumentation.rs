//! Arguments and attacks induced by a ground theory.
//!
//! Arguments are built bottom-up to a fixpoint: a leaf for every fact and
//! assumption, and an inner node for every ground rule together with one
//! argument per body atom. An inner node is rejected if its conclusion
//! already occurs somewhere below it, which keeps the set finite under
//! cyclic rules; on acyclic theories the restriction never applies.
//!
//! Arguments are structurally deduplicated and then numbered in canonical
//! order (leaves first, then by printed form), so ids and the display names
//! `A1, A2, ...` are stable across runs and across groundings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::syntax::{Atom, GroundTheory, Rule};

pub const DEFAULT_ARGUMENT_BUDGET: usize = 100_000;

pub type ArgId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("more than {budget} arguments")]
pub struct ArgumentBudgetExceeded {
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    pub conclusion: Atom,
    /// The rule applied at the root; `None` for facts and assumptions.
    pub top_rule: Option<Rule>,
    /// One child per body atom of `top_rule`, in body order.
    pub children: Vec<ArgId>,
    pub premises: BTreeSet<Atom>,
    pub assumption_premises: BTreeSet<Atom>,
    pub rules: BTreeSet<Rule>,
    /// Every conclusion occurring in the tree, this one included.
    pub conclusions: BTreeSet<Atom>,
    /// Printed form; equal encodings mean structurally equal arguments,
    /// even across different ground theories.
    pub encoding: String,
}

impl Argument {
    pub fn is_leaf(&self) -> bool {
        self.top_rule.is_none()
    }

    pub fn defeasible_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.is_defeasible())
    }

    /// Assumption premises and defeasible rules used.
    pub fn defeasible_elements(&self) -> (BTreeSet<Atom>, BTreeSet<Rule>) {
        (
            self.assumption_premises.clone(),
            self.defeasible_rules().cloned().collect(),
        )
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding)
    }
}

/// Attackable elements of `arg`: its assumption premises, plus the name
/// and head of every defeasible rule it uses.
pub fn weak_points(arg: &Argument) -> BTreeSet<Atom> {
    let mut out = arg.assumption_premises.clone();
    for r in arg.defeasible_rules() {
        out.insert(r.head().clone());
        out.extend(r.name().cloned());
    }
    out
}

fn encode(rule: &Rule, children: &[String]) -> String {
    let mut s = String::from("[");
    s.push_str(&children.join(", "));
    if !children.is_empty() {
        s.push(' ');
    }
    match rule {
        Rule::Strict(r) => {
            let _ = write!(s, "-> {}]", r.head);
        }
        Rule::Defeasible(r) => {
            let _ = write!(s, "={}=> {}]", r.name, r.head);
        }
    }
    s
}

/// All arguments of `gt`, canonically ordered. Children always precede
/// their parents among inner arguments, and `args[i]` has id `i`.
pub fn construct_arguments(
    gt: &GroundTheory,
    budget: usize,
) -> Result<Vec<Argument>, ArgumentBudgetExceeded> {
    let mut arena: Vec<Argument> = Vec::new();
    let mut seen: HashMap<String, ArgId> = HashMap::new();
    let mut by_conclusion: BTreeMap<Atom, Vec<ArgId>> = BTreeMap::new();

    let mut push = |arg: Argument,
                    arena: &mut Vec<Argument>,
                    by_conclusion: &mut BTreeMap<Atom, Vec<ArgId>>|
     -> Result<bool, ArgumentBudgetExceeded> {
        if seen.contains_key(&arg.encoding) {
            return Ok(false);
        }
        if arena.len() >= budget {
            return Err(ArgumentBudgetExceeded { budget });
        }
        let id = arena.len();
        seen.insert(arg.encoding.clone(), id);
        by_conclusion.entry(arg.conclusion.clone()).or_default().push(id);
        arena.push(arg);
        Ok(true)
    };

    for atom in gt.facts.iter().chain(&gt.assumptions) {
        let assumption = gt.assumptions.contains(atom);
        let leaf = Argument {
            conclusion: atom.clone(),
            top_rule: None,
            children: Vec::new(),
            premises: BTreeSet::from([atom.clone()]),
            assumption_premises: if assumption { BTreeSet::from([atom.clone()]) } else { BTreeSet::new() },
            rules: BTreeSet::new(),
            conclusions: BTreeSet::from([atom.clone()]),
            encoding: atom.to_string(),
        };
        push(leaf, &mut arena, &mut by_conclusion)?;
    }

    let rules: Vec<Rule> = gt.rules().collect();
    loop {
        let mut added = false;
        for rule in &rules {
            let body: Vec<&Atom> = rule.body().iter().collect();
            let options: Vec<Vec<ArgId>> = body
                .iter()
                .map(|b| {
                    by_conclusion
                        .get(*b)
                        .map(|ids| {
                            ids.iter()
                                .copied()
                                .filter(|&i| !arena[i].conclusions.contains(rule.head()))
                                .collect()
                        })
                        .unwrap_or_default()
                })
                .collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            // Odometer over one choice per body atom.
            let mut digits = vec![0usize; options.len()];
            loop {
                let children: Vec<ArgId> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
                let arg = inner(rule, &children, &arena);
                added |= push(arg, &mut arena, &mut by_conclusion)?;
                let mut i = 0;
                loop {
                    if i == digits.len() {
                        break;
                    }
                    digits[i] += 1;
                    if digits[i] < options[i].len() {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == digits.len() {
                    break;
                }
            }
        }
        if !added {
            break;
        }
    }

    Ok(canonicalize(arena))
}

fn inner(rule: &Rule, children: &[ArgId], arena: &[Argument]) -> Argument {
    let mut arg = Argument {
        conclusion: rule.head().clone(),
        top_rule: Some(rule.clone()),
        children: children.to_vec(),
        premises: BTreeSet::new(),
        assumption_premises: BTreeSet::new(),
        rules: BTreeSet::from([rule.clone()]),
        conclusions: BTreeSet::from([rule.head().clone()]),
        encoding: String::new(),
    };
    let mut texts = Vec::with_capacity(children.len());
    for &c in children {
        let child = &arena[c];
        arg.premises.extend(child.premises.iter().cloned());
        arg.assumption_premises.extend(child.assumption_premises.iter().cloned());
        arg.rules.extend(child.rules.iter().cloned());
        arg.conclusions.extend(child.conclusions.iter().cloned());
        texts.push(child.encoding.clone());
    }
    arg.encoding = encode(rule, &texts);
    arg
}

/// Renumbers so that leaves come first, then everything by printed form.
fn canonicalize(arena: Vec<Argument>) -> Vec<Argument> {
    let mut order: Vec<ArgId> = (0..arena.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&arena[a], &arena[b]);
        (!x.is_leaf(), &x.encoding).cmp(&(!y.is_leaf(), &y.encoding))
    });
    let mut new_id = vec![0; arena.len()];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new;
    }
    let mut slots: Vec<Option<Argument>> = arena.into_iter().map(Some).collect();
    order
        .iter()
        .map(|&old| {
            let mut arg = slots[old].take().expect("each argument is moved once");
            for c in &mut arg.children {
                *c = new_id[*c];
            }
            arg
        })
        .collect()
}

/// `id` and every argument below it.
pub fn sub_arguments(args: &[Argument], id: ArgId) -> BTreeSet<ArgId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![id];
    while let Some(i) = stack.pop() {
        if out.insert(i) {
            stack.extend(&args[i].children);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttackKind {
    Undercut,
    Rebut,
    Undermine,
}

impl AttackKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::Undercut => "undercut",
            AttackKind::Rebut => "rebut",
            AttackKind::Undermine => "undermine",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attack {
    pub attacker: ArgId,
    pub target: ArgId,
    pub kind: AttackKind,
    /// The attacked element of the target.
    pub element: Atom,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttackGraph {
    pub arguments: Vec<Argument>,
    pub attacks: BTreeSet<Attack>,
}

impl AttackGraph {
    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    /// Distinct (attacker, target) pairs.
    pub fn edges(&self) -> BTreeSet<(ArgId, ArgId)> {
        self.attacks.iter().map(|a| (a.attacker, a.target)).collect()
    }

    pub fn name(id: ArgId) -> String {
        format!("A{}", id + 1)
    }

    pub fn id_of(&self, encoding: &str) -> Option<ArgId> {
        self.arguments.iter().position(|a| a.encoding == encoding)
    }

    /// Edges as pairs of canonical encodings, comparable across graphs.
    pub fn encoded_edges(&self) -> BTreeSet<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| {
                (
                    self.arguments[a].encoding.clone(),
                    self.arguments[b].encoding.clone(),
                )
            })
            .collect()
    }

    pub fn encodings(&self) -> BTreeSet<String> {
        self.arguments.iter().map(|a| a.encoding.clone()).collect()
    }

    /// ICCMA-style listing: `arg(Ai).` with the conclusion as a comment,
    /// then `att(Ai,Aj).` per edge.
    pub fn to_iccma(&self) -> String {
        let mut s = String::new();
        for (i, a) in self.arguments.iter().enumerate() {
            let _ = writeln!(s, "arg({}). % {}", Self::name(i), a.conclusion);
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "att({},{}).", Self::name(a), Self::name(b));
        }
        s
    }
}

/// `A` attacks `B` on element `x` of `weak_points(B)` when the conclusion of
/// `A` is a contrary of `x`; the kind says whether `x` is a rule name, a
/// defeasible head, or an assumption premise.
pub fn compute_attacks(args: Vec<Argument>, gt: &GroundTheory) -> AttackGraph {
    let mut by_conclusion: BTreeMap<&Atom, Vec<ArgId>> = BTreeMap::new();
    for (i, a) in args.iter().enumerate() {
        by_conclusion.entry(&a.conclusion).or_default().push(i);
    }
    let mut contrary_cache: BTreeMap<Atom, BTreeSet<Atom>> = BTreeMap::new();
    let mut contraries = |x: &Atom| -> BTreeSet<Atom> {
        contrary_cache
            .entry(x.clone())
            .or_insert_with(|| gt.contraries_of(x))
            .clone()
    };

    let mut attacks = BTreeSet::new();
    for (target, arg) in args.iter().enumerate() {
        let mut elements: Vec<(AttackKind, &Atom)> = Vec::new();
        for r in arg.defeasible_rules() {
            if let Some(n) = r.name() {
                elements.push((AttackKind::Undercut, n));
            }
            elements.push((AttackKind::Rebut, r.head()));
        }
        for p in &arg.assumption_premises {
            elements.push((AttackKind::Undermine, p));
        }
        for (kind, x) in elements {
            for c in contraries(x) {
                for &attacker in by_conclusion.get(&c).into_iter().flatten() {
                    attacks.insert(Attack {
                        attacker,
                        target,
                        kind,
                        element: x.clone(),
                    });
                }
            }
        }
    }
    AttackGraph { arguments: args, attacks }
}

pub fn induced_af(gt: &GroundTheory, budget: usize) -> Result<AttackGraph, ArgumentBudgetExceeded> {
    Ok(compute_attacks(construct_arguments(gt, budget)?, gt))
}

//! Abstract syntax of first-order ASPIC+ theories.
//!
//! A theory consists of contrary expressions, strict rules, defeasible rules,
//! facts and assumptions. Terms are either constants or variables; there are
//! no function symbols. The same types represent ground theories, in which
//! case every atom is variable-free (see [`GroundTheory`]).

mod parser;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use parser::{parse_atom, parse_theory, ParseError};
pub use validate::{validate, Violation};

/// Predicates starting with this prefix are reserved for generated auxiliaries.
pub const RESERVED_PREFIX: &str = "__";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Const(s) | Term::Var(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Variable bindings. Values may be constants or (for renamings) variables.
pub type Substitution = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Ground atom from constant names.
    pub fn ground<S: AsRef<str>>(predicate: impl Into<String>, consts: &[S]) -> Self {
        Atom::new(
            predicate,
            consts.iter().map(|c| Term::constant(c.as_ref())).collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Const(c) => Some(c.as_str()),
            Term::Var(_) => None,
        })
    }

    /// Replaces bound variables; unbound variables are kept.
    pub fn apply(&self, subst: &Substitution) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| t.clone()),
                    Term::Const(_) => t.clone(),
                })
                .collect(),
        }
    }

    /// One-way matching: finds the substitution of `self`'s variables that
    /// turns `self` into exactly `target`. Terms of `target` are treated as
    /// opaque, so a variable in `target` only matches a pattern variable.
    pub fn match_onto(&self, target: &Atom) -> Option<Substitution> {
        let mut subst = Substitution::new();
        self.extend_match(target, &mut subst).then_some(subst)
    }

    /// Like [`Atom::match_onto`], but extends an existing substitution.
    pub fn extend_match(&self, target: &Atom, subst: &mut Substitution) -> bool {
        if self.predicate != target.predicate || self.args.len() != target.args.len() {
            return false;
        }
        for (p, t) in self.args.iter().zip(&target.args) {
            match p {
                Term::Const(_) => {
                    if p != t {
                        return false;
                    }
                }
                Term::Var(v) => match subst.get(v) {
                    Some(bound) if bound != t => return false,
                    Some(_) => {}
                    None => {
                        subst.insert(v.clone(), t.clone());
                    }
                },
            }
        }
        true
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// `subject` is in conflict with each atom of `contraries`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContraryExpr {
    pub subject: Atom,
    pub contraries: BTreeSet<Atom>,
}

impl ContraryExpr {
    pub fn new(subject: Atom, contraries: impl IntoIterator<Item = Atom>) -> Self {
        ContraryExpr {
            subject,
            contraries: contraries.into_iter().collect(),
        }
    }

    pub fn apply(&self, subst: &Substitution) -> Self {
        ContraryExpr {
            subject: self.subject.apply(subst),
            contraries: self.contraries.iter().map(|a| a.apply(subst)).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.subject.is_ground() && self.contraries.iter().all(Atom::is_ground)
    }

    pub fn variables(&self) -> Vec<String> {
        ordered_vars(std::iter::once(&self.subject).chain(&self.contraries))
    }

    /// Contraries of `element` contributed by this expression, if the subject
    /// matches it. Returns `None` when the subject does not match.
    pub fn contraries_of(&self, element: &Atom) -> Option<impl Iterator<Item = Atom> + '_> {
        let subst = self.subject.match_onto(element)?;
        Some(self.contraries.iter().map(move |a| a.apply(&subst)))
    }
}

impl fmt::Display for ContraryExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "contrary {}: ", self.subject)?;
        write_atom_list(f, &self.contraries)?;
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrictRule {
    pub body: BTreeSet<Atom>,
    pub head: Atom,
}

impl StrictRule {
    pub fn new(body: impl IntoIterator<Item = Atom>, head: Atom) -> Self {
        StrictRule {
            body: body.into_iter().collect(),
            head,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefeasibleRule {
    pub name: Atom,
    pub body: BTreeSet<Atom>,
    pub head: Atom,
}

impl DefeasibleRule {
    pub fn new(name: Atom, body: impl IntoIterator<Item = Atom>, head: Atom) -> Self {
        DefeasibleRule {
            name,
            body: body.into_iter().collect(),
            head,
        }
    }
}

impl fmt::Display for StrictRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" ")?;
            write_atom_list(f, &self.body)?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for DefeasibleRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} <=", self.name, self.head)?;
        if !self.body.is_empty() {
            f.write_str(" ")?;
            write_atom_list(f, &self.body)?;
        }
        f.write_str(".")
    }
}

fn write_atom_list<'a>(
    f: &mut fmt::Formatter<'_>,
    atoms: impl IntoIterator<Item = &'a Atom>,
) -> fmt::Result {
    for (i, a) in atoms.into_iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// Variables in order of first occurrence.
fn ordered_vars<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for atom in atoms {
        for v in atom.variables() {
            if seen.insert(v) {
                out.push(v.to_string());
            }
        }
    }
    out
}

/// A strict or defeasible rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Strict(StrictRule),
    Defeasible(DefeasibleRule),
}

impl Rule {
    pub fn body(&self) -> &BTreeSet<Atom> {
        match self {
            Rule::Strict(r) => &r.body,
            Rule::Defeasible(r) => &r.body,
        }
    }

    pub fn head(&self) -> &Atom {
        match self {
            Rule::Strict(r) => &r.head,
            Rule::Defeasible(r) => &r.head,
        }
    }

    pub fn name(&self) -> Option<&Atom> {
        match self {
            Rule::Strict(_) => None,
            Rule::Defeasible(r) => Some(&r.name),
        }
    }

    pub fn is_defeasible(&self) -> bool {
        matches!(self, Rule::Defeasible(_))
    }

    /// Name and head of a defeasible rule; empty for strict rules.
    pub fn defeasible_elements(&self) -> Vec<&Atom> {
        match self {
            Rule::Strict(_) => Vec::new(),
            Rule::Defeasible(r) => vec![&r.name, &r.head],
        }
    }

    /// Body variables in order of first occurrence in the (canonically
    /// ordered) body.
    pub fn body_variables(&self) -> Vec<String> {
        ordered_vars(self.body())
    }

    /// All variables of the rule, body variables first.
    pub fn variables(&self) -> Vec<String> {
        let atoms = self
            .body()
            .iter()
            .chain(std::iter::once(self.head()))
            .chain(self.name());
        ordered_vars(atoms)
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    pub fn apply(&self, subst: &Substitution) -> Rule {
        let body = self.body().iter().map(|a| a.apply(subst));
        match self {
            Rule::Strict(r) => Rule::Strict(StrictRule::new(body, r.head.apply(subst))),
            Rule::Defeasible(r) => Rule::Defeasible(DefeasibleRule::new(
                r.name.apply(subst),
                body,
                r.head.apply(subst),
            )),
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body()
            .iter()
            .chain(std::iter::once(self.head()))
            .chain(self.name())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Strict(r) => r.fmt(f),
            Rule::Defeasible(r) => r.fmt(f),
        }
    }
}

impl From<StrictRule> for Rule {
    fn from(r: StrictRule) -> Self {
        Rule::Strict(r)
    }
}

impl From<DefeasibleRule> for Rule {
    fn from(r: DefeasibleRule) -> Self {
        Rule::Defeasible(r)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Theory {
    pub contraries: BTreeSet<ContraryExpr>,
    pub strict: BTreeSet<StrictRule>,
    pub defeasible: BTreeSet<DefeasibleRule>,
    pub facts: BTreeSet<Atom>,
    pub assumptions: BTreeSet<Atom>,
}

impl Theory {
    pub fn rules(&self) -> impl Iterator<Item = Rule> + '_ {
        self.strict
            .iter()
            .cloned()
            .map(Rule::Strict)
            .chain(self.defeasible.iter().cloned().map(Rule::Defeasible))
    }

    /// Rules sorted by printed form.
    pub fn canonical_rules(&self) -> Vec<Rule> {
        let mut rules: Vec<(String, Rule)> = self.rules().map(|r| (r.to_string(), r)).collect();
        rules.sort();
        rules.into_iter().map(|(_, r)| r).collect()
    }

    pub fn add_rule(&mut self, rule: Rule) {
        match rule {
            Rule::Strict(r) => {
                self.strict.insert(r);
            }
            Rule::Defeasible(r) => {
                self.defeasible.insert(r);
            }
        }
    }

    /// Every atom occurring in the theory.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        let contraries = self
            .contraries
            .iter()
            .flat_map(|c| std::iter::once(&c.subject).chain(&c.contraries));
        let strict = self
            .strict
            .iter()
            .flat_map(|r| r.body.iter().chain(std::iter::once(&r.head)));
        let defeasible = self.defeasible.iter().flat_map(|r| {
            r.body
                .iter()
                .chain(std::iter::once(&r.head))
                .chain(std::iter::once(&r.name))
        });
        contraries
            .chain(strict)
            .chain(defeasible)
            .chain(&self.facts)
            .chain(&self.assumptions)
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        self.atoms().map(|a| a.predicate.clone()).collect()
    }

    /// The constants occurring anywhere in the theory.
    pub fn herbrand_universe(&self) -> BTreeSet<String> {
        self.atoms()
            .flat_map(|a| a.constants())
            .map(str::to_string)
            .collect()
    }

    pub fn is_ground(&self) -> bool {
        self.atoms().all(Atom::is_ground)
    }

    pub fn union(&self, other: &Theory) -> Theory {
        let mut out = self.clone();
        out.contraries.extend(other.contraries.iter().cloned());
        out.strict.extend(other.strict.iter().cloned());
        out.defeasible.extend(other.defeasible.iter().cloned());
        out.facts.extend(other.facts.iter().cloned());
        out.assumptions.extend(other.assumptions.iter().cloned());
        out
    }

    /// Number of ground rules (strict plus defeasible).
    pub fn rule_count(&self) -> usize {
        self.strict.len() + self.defeasible.len()
    }
}

/// Free-function form of [`Theory::herbrand_universe`].
pub fn herbrand_universe(theory: &Theory) -> BTreeSet<String> {
    theory.herbrand_universe()
}

/// Canonical text form: one statement per line, sections in the order
/// contraries, strict rules, defeasible rules, assumptions, facts, each
/// sorted by printed form. Parsing the output yields the same theory.
impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn section<T: fmt::Display>(
            f: &mut fmt::Formatter<'_>,
            items: impl IntoIterator<Item = T>,
        ) -> fmt::Result {
            let mut lines: Vec<String> = items.into_iter().map(|i| i.to_string()).collect();
            lines.sort();
            for line in lines {
                writeln!(f, "{line}")?;
            }
            Ok(())
        }
        section(f, &self.contraries)?;
        section(f, &self.strict)?;
        section(f, &self.defeasible)?;
        section(f, self.assumptions.iter().map(|a| format!("assume {a}.")))?;
        section(f, self.facts.iter().map(|a| format!("fact {a}.")))
    }
}

/// A theory in which every atom is ground.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GroundTheory(Theory);

impl GroundTheory {
    /// Wraps `theory`, or hands it back if some atom is not ground.
    pub fn new(theory: Theory) -> Result<Self, Theory> {
        if theory.is_ground() {
            Ok(GroundTheory(theory))
        } else {
            Err(theory)
        }
    }

    pub fn into_inner(self) -> Theory {
        self.0
    }

    /// Ground contrary atoms of `element`.
    pub fn contraries_of(&self, element: &Atom) -> BTreeSet<Atom> {
        self.0
            .contraries
            .iter()
            .filter(|c| &c.subject == element)
            .flat_map(|c| c.contraries.iter().cloned())
            .collect()
    }
}

impl std::ops::Deref for GroundTheory {
    type Target = Theory;

    fn deref(&self) -> &Theory {
        &self.0
    }
}

impl fmt::Display for GroundTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

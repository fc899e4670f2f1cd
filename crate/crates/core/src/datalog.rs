//! Datalog with stratified negation.
//!
//! Programs are evaluated bottom-up, one stratum at a time. Within a stratum
//! rules are applied with semi-naive deltas: after the first round, a rule is
//! only re-fired with at least one body atom matched against the facts that
//! were new in the previous round. Negated atoms always refer to predicates
//! of strictly lower strata, which are complete by the time they are read.
//!
//! Rules are not instantiated over the Herbrand universe. Bodies are joined
//! against the current model, most-bound atom first.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::syntax::{Atom, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatalogError {
    #[error("program is not stratifiable: negative dependency cycle {}", cycle.join(" -> "))]
    NotStratifiable { cycle: Vec<String> },
    #[error("unsafe Datalog rule `{rule}`")]
    UnsafeRule { rule: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DatalogRule {
    pub head: Atom,
    pub positive_body: Vec<Atom>,
    pub negative_body: Vec<Atom>,
}

impl DatalogRule {
    pub fn new(head: Atom, positive_body: Vec<Atom>, negative_body: Vec<Atom>) -> Self {
        DatalogRule {
            head,
            positive_body,
            negative_body,
        }
    }

    pub fn fact(head: Atom) -> Self {
        DatalogRule::new(head, Vec::new(), Vec::new())
    }

    /// Head and negated variables all occur in the positive body.
    pub fn is_safe(&self) -> bool {
        let bound: HashSet<&str> = self.positive_body.iter().flat_map(Atom::variables).collect();
        self.head
            .variables()
            .chain(self.negative_body.iter().flat_map(Atom::variables))
            .all(|v| bound.contains(v))
    }

    pub fn is_ground(&self) -> bool {
        self.head.is_ground()
            && self.positive_body.iter().all(Atom::is_ground)
            && self.negative_body.iter().all(Atom::is_ground)
    }

    /// The same rule with its negative body dropped.
    pub fn positive_part(&self) -> DatalogRule {
        DatalogRule::new(self.head.clone(), self.positive_body.clone(), Vec::new())
    }
}

impl fmt::Display for DatalogRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        let literals: Vec<String> = self
            .positive_body
            .iter()
            .map(|a| a.to_string())
            .chain(self.negative_body.iter().map(|a| format!("not {a}")))
            .collect();
        if !literals.is_empty() {
            write!(f, " :- {}", literals.join(", "))?;
        }
        f.write_str(".")
    }
}

/// A set of ground atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interpretation(BTreeSet<Atom>);

impl Interpretation {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Interpretation(atoms.into_iter().collect())
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.0
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with_predicate(&self, predicate: &str) -> BTreeSet<Atom> {
        self.0
            .iter()
            .filter(|a| a.predicate == predicate)
            .cloned()
            .collect()
    }

    /// Sorted ground atoms, one per line.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        lines.sort();
        lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// Predicate levels satisfying the stratification inequalities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stratification {
    pub level: BTreeMap<String, usize>,
}

impl Stratification {
    pub fn of(&self, predicate: &str) -> usize {
        self.level.get(predicate).copied().unwrap_or(0)
    }

    /// Whether every rule of `program` satisfies the level inequalities.
    pub fn is_valid_for(&self, program: &DatalogProgram) -> bool {
        program.rules().iter().all(|r| {
            let head = self.of(&r.head.predicate);
            r.positive_body.iter().all(|a| head >= self.of(&a.predicate))
                && r.negative_body.iter().all(|a| head > self.of(&a.predicate))
        })
    }

    pub fn max_level(&self) -> usize {
        self.level.values().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    SemiNaive,
    /// Re-applies every rule of a stratum until nothing changes.
    Naive,
}

/// A finite set of Datalog rules. The least model is computed on first use
/// and shared by all later queries, including from other threads.
#[derive(Debug, Clone, Default)]
pub struct DatalogProgram {
    rules: Vec<DatalogRule>,
    model: Arc<OnceLock<Result<Interpretation, DatalogError>>>,
}

impl PartialEq for DatalogProgram {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl Eq for DatalogProgram {}

impl DatalogProgram {
    /// Duplicate rules are dropped; the first occurrence keeps its position.
    pub fn new(rules: impl IntoIterator<Item = DatalogRule>) -> Self {
        let mut seen = HashSet::new();
        let rules = rules
            .into_iter()
            .filter(|r| seen.insert(r.clone()))
            .collect();
        DatalogProgram {
            rules,
            model: Arc::default(),
        }
    }

    pub fn rules(&self) -> &[DatalogRule] {
        &self.rules
    }

    pub fn is_negation_free(&self) -> bool {
        self.rules.iter().all(|r| r.negative_body.is_empty())
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .flat_map(|r| {
                std::iter::once(&r.head)
                    .chain(&r.positive_body)
                    .chain(&r.negative_body)
            })
            .map(|a| a.predicate.clone())
            .collect()
    }

    pub fn stratify(&self) -> Result<Stratification, DatalogError> {
        stratify(self)
    }

    /// The least model, computed once and cached.
    pub fn model(&self) -> Result<&Interpretation, DatalogError> {
        self.model
            .get_or_init(|| evaluate_with(self, Strategy::SemiNaive))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// All derived atoms of `predicate`; unknown predicates yield nothing.
    pub fn query(&self, predicate: &str) -> Result<BTreeSet<Atom>, DatalogError> {
        Ok(self.model()?.with_predicate(predicate))
    }
}

impl fmt::Display for DatalogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Minimal stratification: a predicate's level is the largest number of
/// negative edges on any dependency path leading to it.
pub fn stratify(program: &DatalogProgram) -> Result<Stratification, DatalogError> {
    if let Some(r) = program.rules.iter().find(|r| !r.is_safe()) {
        return Err(DatalogError::UnsafeRule {
            rule: r.to_string(),
        });
    }
    let mut graph: DiGraph<String, bool> = DiGraph::new();
    let mut nodes: BTreeMap<String, NodeIndex> = BTreeMap::new();
    for p in program.predicates() {
        let idx = graph.add_node(p.clone());
        nodes.insert(p, idx);
    }
    for r in &program.rules {
        let head = nodes[&r.head.predicate];
        for a in &r.positive_body {
            graph.add_edge(nodes[&a.predicate], head, false);
        }
        for a in &r.negative_body {
            graph.add_edge(nodes[&a.predicate], head, true);
        }
    }

    // tarjan_scc yields components in reverse topological order.
    let mut sccs = tarjan_scc(&graph);
    sccs.reverse();
    let mut component = vec![0usize; graph.node_count()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            component[n.index()] = c;
        }
    }
    for edge in graph.edge_indices() {
        let (from, to) = graph.edge_endpoints(edge).expect("edge exists");
        if graph[edge] && component[from.index()] == component[to.index()] {
            return Err(DatalogError::NotStratifiable {
                cycle: negative_cycle(&graph, from, to, &component),
            });
        }
    }

    let mut scc_level = vec![0usize; sccs.len()];
    for (c, members) in sccs.iter().enumerate() {
        let mut level = 0;
        for &n in members {
            for e in graph.edges_directed(n, petgraph::Direction::Incoming) {
                use petgraph::visit::EdgeRef;
                let src = component[e.source().index()];
                if src != c {
                    level = level.max(scc_level[src] + usize::from(*e.weight()));
                }
            }
        }
        scc_level[c] = level;
    }
    let level = nodes
        .iter()
        .map(|(p, n)| (p.clone(), scc_level[component[n.index()]]))
        .collect();
    Ok(Stratification { level })
}

/// Closes the negative edge `from -> to` into a cycle through `to`'s component.
fn negative_cycle(
    graph: &DiGraph<String, bool>,
    from: NodeIndex,
    to: NodeIndex,
    component: &[usize],
) -> Vec<String> {
    let c = component[from.index()];
    let mut parent: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut queue = std::collections::VecDeque::from([to]);
    let mut seen = HashSet::from([to]);
    while let Some(n) = queue.pop_front() {
        if n == from {
            break;
        }
        for m in graph.neighbors(n) {
            if component[m.index()] == c && seen.insert(m) {
                parent.insert(m, n);
                queue.push_back(m);
            }
        }
    }
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    std::iter::once(from)
        .chain(path)
        .map(|n| graph[n].clone())
        .collect()
}

/// One application of the immediate consequence operator to ground rules:
/// the heads of all rules whose positive body holds in `interp` and whose
/// negated atoms are absent from it. When used stratum by stratum, `interp`
/// must already contain the fixpoint of all lower strata.
pub fn immediate_consequence(rules: &[DatalogRule], interp: &Interpretation) -> Interpretation {
    Interpretation(
        rules
            .iter()
            .filter(|r| {
                r.positive_body.iter().all(|a| interp.contains(a))
                    && r.negative_body.iter().all(|a| !interp.contains(a))
            })
            .map(|r| r.head.clone())
            .collect(),
    )
}

pub fn evaluate(program: &DatalogProgram) -> Result<Interpretation, DatalogError> {
    evaluate_with(program, Strategy::SemiNaive)
}

pub fn evaluate_with(
    program: &DatalogProgram,
    strategy: Strategy,
) -> Result<Interpretation, DatalogError> {
    let strat = stratify(program)?;
    let mut engine = Engine::compile(program, &strat);
    for level in 0..=strat.max_level() {
        match strategy {
            Strategy::SemiNaive => engine.semi_naive_stratum(level),
            Strategy::Naive => engine.naive_stratum(level),
        }
    }
    Ok(engine.into_interpretation())
}

type Tuple = Box<[u32]>;

#[derive(Debug, Clone, Copy)]
enum Slot {
    Const(u32),
    Var(usize),
}

#[derive(Debug)]
struct CAtom {
    pred: usize,
    args: Vec<Slot>,
}

#[derive(Debug)]
struct CRule {
    level: usize,
    head: CAtom,
    positive: Vec<CAtom>,
    negative: Vec<CAtom>,
    vars: usize,
}

struct Engine {
    rules: Vec<CRule>,
    pred_level: Vec<usize>,
    pred_names: Vec<String>,
    consts: Vec<String>,
    relations: Vec<HashSet<Tuple>>,
}

impl Engine {
    fn compile(program: &DatalogProgram, strat: &Stratification) -> Self {
        let mut pred_ids: HashMap<String, usize> = HashMap::new();
        let mut pred_names = Vec::new();
        let mut const_ids: HashMap<String, u32> = HashMap::new();
        let mut consts = Vec::new();
        let mut compile_atom = |atom: &Atom, vars: &mut HashMap<String, usize>| -> CAtom {
            let pred = *pred_ids.entry(atom.predicate.clone()).or_insert_with(|| {
                pred_names.push(atom.predicate.clone());
                pred_names.len() - 1
            });
            let args = atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Slot::Const(*const_ids.entry(c.clone()).or_insert_with(|| {
                        consts.push(c.clone());
                        (consts.len() - 1) as u32
                    })),
                    Term::Var(v) => {
                        let n = vars.len();
                        Slot::Var(*vars.entry(v.clone()).or_insert(n))
                    }
                })
                .collect();
            CAtom { pred, args }
        };
        let mut rules = Vec::new();
        for r in &program.rules {
            let mut vars = HashMap::new();
            let positive: Vec<CAtom> = r
                .positive_body
                .iter()
                .map(|a| compile_atom(a, &mut vars))
                .collect();
            let negative = r
                .negative_body
                .iter()
                .map(|a| compile_atom(a, &mut vars))
                .collect();
            let head = compile_atom(&r.head, &mut vars);
            rules.push(CRule {
                level: strat.of(&r.head.predicate),
                head,
                positive,
                negative,
                vars: vars.len(),
            });
        }
        let pred_level = pred_names.iter().map(|p| strat.of(p)).collect();
        let relations = vec![HashSet::new(); pred_names.len()];
        Engine {
            rules,
            pred_level,
            pred_names,
            consts,
            relations,
        }
    }

    /// Derives all head tuples of `rule`. If `delta` is given as
    /// `(position, tuples)`, that body atom is matched against `tuples` only.
    fn fire(&self, rule: &CRule, delta: Option<(usize, &HashSet<Tuple>)>) -> Vec<Tuple> {
        let mut out = Vec::new();
        let mut binding = vec![None; rule.vars];
        let mut remaining: Vec<usize> = (0..rule.positive.len()).collect();
        if let Some((pos, tuples)) = delta {
            remaining.retain(|&i| i != pos);
            for t in tuples {
                let mut b = binding.clone();
                if unify(&rule.positive[pos], t, &mut b) {
                    self.join(rule, &remaining, &mut b, &mut out);
                }
            }
        } else {
            self.join(rule, &remaining, &mut binding, &mut out);
        }
        out
    }

    fn join(
        &self,
        rule: &CRule,
        remaining: &[usize],
        binding: &mut [Option<u32>],
        out: &mut Vec<Tuple>,
    ) {
        if remaining.is_empty() {
            let negated_hit = rule.negative.iter().any(|a| {
                let t = instantiate(a, binding);
                self.relations[a.pred].contains(&t)
            });
            if !negated_hit {
                out.push(instantiate(&rule.head, binding));
            }
            return;
        }
        // Most bound atom first; ties go to the leftmost.
        let (k, &next) = remaining
            .iter()
            .enumerate()
            .max_by_key(|&(k, &i)| {
                let bound = rule.positive[i]
                    .args
                    .iter()
                    .filter(|s| match s {
                        Slot::Const(_) => true,
                        Slot::Var(v) => binding[*v].is_some(),
                    })
                    .count();
                (bound, std::cmp::Reverse(k))
            })
            .expect("non-empty");
        let rest: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &i)| i)
            .collect();
        let atom = &rule.positive[next];
        for t in &self.relations[atom.pred] {
            let mut b = binding.to_vec();
            if unify(atom, t, &mut b) {
                self.join(rule, &rest, &mut b, out);
            }
        }
    }

    fn naive_stratum(&mut self, level: usize) {
        loop {
            let mut changed = false;
            for i in 0..self.rules.len() {
                if self.rules[i].level != level {
                    continue;
                }
                let derived = self.fire(&self.rules[i], None);
                let pred = self.rules[i].head.pred;
                for t in derived {
                    changed |= self.relations[pred].insert(t);
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn semi_naive_stratum(&mut self, level: usize) {
        let npred = self.relations.len();
        let mut delta: Vec<HashSet<Tuple>> = vec![HashSet::new(); npred];
        for rule in self.rules.iter().filter(|r| r.level == level) {
            for t in self.fire(rule, None) {
                if !self.relations[rule.head.pred].contains(&t) {
                    delta[rule.head.pred].insert(t);
                }
            }
        }
        loop {
            if delta.iter().all(HashSet::is_empty) {
                return;
            }
            for (p, d) in delta.iter().enumerate() {
                self.relations[p].extend(d.iter().cloned());
            }
            let mut next: Vec<HashSet<Tuple>> = vec![HashSet::new(); npred];
            for rule in self.rules.iter().filter(|r| r.level == level) {
                for (i, atom) in rule.positive.iter().enumerate() {
                    if self.pred_level[atom.pred] != level || delta[atom.pred].is_empty() {
                        continue;
                    }
                    for t in self.fire(rule, Some((i, &delta[atom.pred]))) {
                        if !self.relations[rule.head.pred].contains(&t) {
                            next[rule.head.pred].insert(t);
                        }
                    }
                }
            }
            delta = next;
        }
    }

    fn into_interpretation(self) -> Interpretation {
        let mut atoms = BTreeSet::new();
        for (p, rel) in self.relations.iter().enumerate() {
            for t in rel {
                atoms.insert(Atom::new(
                    self.pred_names[p].clone(),
                    t.iter()
                        .map(|&c| Term::Const(self.consts[c as usize].clone()))
                        .collect(),
                ));
            }
        }
        Interpretation(atoms)
    }
}

fn unify(atom: &CAtom, tuple: &[u32], binding: &mut [Option<u32>]) -> bool {
    for (slot, &value) in atom.args.iter().zip(tuple) {
        match *slot {
            Slot::Const(c) if c != value => return false,
            Slot::Const(_) => {}
            Slot::Var(v) => match binding[v] {
                Some(b) if b != value => return false,
                Some(_) => {}
                None => binding[v] = Some(value),
            },
        }
    }
    true
}

fn instantiate(atom: &CAtom, binding: &[Option<u32>]) -> Tuple {
    atom.args
        .iter()
        .map(|s| match *s {
            Slot::Const(c) => c,
            Slot::Var(v) => binding[v].expect("safe rules bind every variable"),
        })
        .collect()
}

//! Predicate and rule dependency analysis.
//!
//! A rule head depends positively on every body predicate. It depends
//! negatively on every predicate occurring among the contraries of the rule's
//! defeasible elements (its name and head). An assumption's predicate depends
//! negatively on the predicates among the assumption's contraries.
//!
//! A predicate is *approximated* when the grounder cannot decide the
//! derivability of its instances: it lies on a dependency cycle with a
//! negative step, or depends (either polarity) on an approximated predicate.
//! A rule-name predicate that is also used as a body atom or as a contrary is
//! approximated as well, because the generated Datalog program derives a name
//! atom whenever its rule is applicable rather than when it is concluded.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::syntax::{Rule, Theory};

/// `(from, to)` edges: `to` depends on `from`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredDepGraph {
    pub nodes: BTreeSet<String>,
    pub pos_edges: BTreeSet<(String, String)>,
    pub neg_edges: BTreeSet<(String, String)>,
}

impl PredDepGraph {
    /// DOT rendering: positive edges solid, negative edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dependencies {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  \"{n}\";");
        }
        for (from, to) in &self.pos_edges {
            let _ = writeln!(out, "  \"{from}\" -> \"{to}\";");
        }
        for (from, to) in &self.neg_edges {
            let _ = writeln!(out, "  \"{from}\" -> \"{to}\" [style=dashed];");
        }
        out.push_str("}\n");
        out
    }

    /// Predicates `p` depends on, with the polarity of each edge.
    fn edges(&self) -> impl Iterator<Item = (&str, &str, bool)> {
        self.pos_edges
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str(), false))
            .chain(
                self.neg_edges
                    .iter()
                    .map(|(a, b)| (a.as_str(), b.as_str(), true)),
            )
    }
}

/// Predicates of the contrary atoms of any contrary expression whose subject
/// uses `predicate`.
fn contrary_predicates<'a>(theory: &'a Theory, predicate: &'a str) -> impl Iterator<Item = &'a str> {
    theory
        .contraries
        .iter()
        .filter(move |c| c.subject.predicate == predicate)
        .flat_map(|c| c.contraries.iter().map(|a| a.predicate.as_str()))
}

pub fn pred_dependencies(theory: &Theory) -> PredDepGraph {
    let mut g = PredDepGraph {
        nodes: theory.predicates(),
        ..PredDepGraph::default()
    };
    for rule in theory.rules() {
        let head = &rule.head().predicate;
        for b in rule.body() {
            g.pos_edges.insert((b.predicate.clone(), head.clone()));
        }
        for element in rule.defeasible_elements() {
            for c in contrary_predicates(theory, &element.predicate) {
                g.neg_edges.insert((c.to_string(), head.clone()));
            }
        }
    }
    for a in &theory.assumptions {
        for c in contrary_predicates(theory, &a.predicate) {
            g.neg_edges.insert((c.to_string(), a.predicate.clone()));
        }
    }
    g
}

/// Name predicates that also occur in a rule body or among contraries.
pub fn reused_name_predicates(theory: &Theory) -> BTreeSet<String> {
    let names: BTreeSet<&str> = theory
        .defeasible
        .iter()
        .map(|r| r.name.predicate.as_str())
        .collect();
    let used = theory
        .rules()
        .flat_map(|r| r.body().iter().map(|a| a.predicate.clone()).collect::<Vec<_>>())
        .chain(
            theory
                .contraries
                .iter()
                .flat_map(|c| c.contraries.iter().map(|a| a.predicate.clone())),
        );
    used.filter(|p| names.contains(p.as_str())).collect()
}

/// The least set of predicates closed under the approximation conditions.
pub fn approximated_predicates(theory: &Theory) -> BTreeSet<String> {
    let deps = pred_dependencies(theory);
    let mut graph: DiGraph<&str, bool> = DiGraph::new();
    let idx: BTreeMap<&str, NodeIndex> = deps
        .nodes
        .iter()
        .map(|n| (n.as_str(), graph.add_node(n.as_str())))
        .collect();
    for (from, to, negative) in deps.edges() {
        graph.add_edge(idx[from], idx[to], negative);
    }

    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; graph.node_count()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            component[n.index()] = c;
        }
    }
    let mut seeds: Vec<NodeIndex> = Vec::new();
    for e in graph.edge_indices() {
        let (a, b) = graph.edge_endpoints(e).expect("edge exists");
        if graph[e] && component[a.index()] == component[b.index()] {
            seeds.extend(&sccs[component[a.index()]]);
        }
    }
    for p in reused_name_predicates(theory) {
        seeds.push(idx[p.as_str()]);
    }

    // Everything reachable along dependency edges is contaminated.
    let mut approximated = BTreeSet::new();
    let mut stack = seeds;
    while let Some(n) = stack.pop() {
        if approximated.insert(graph[n].to_string()) {
            stack.extend(graph.neighbors(n));
        }
    }
    approximated
}

pub fn non_approximated_predicates(theory: &Theory) -> BTreeSet<String> {
    let approx = approximated_predicates(theory);
    theory
        .predicates()
        .into_iter()
        .filter(|p| !approx.contains(p))
        .collect()
}

/// Strongly connected components of the positive rule dependency graph, in
/// topological order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SccOrder {
    pub components: Vec<Vec<Rule>>,
}

impl SccOrder {
    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.components.iter().flatten()
    }
}

/// Rule `r` depends on `r'` when the head predicate of `r'` occurs in the
/// body of `r`. Components come out in topological order; among the
/// components ready at any point, the one holding the smallest rule text goes
/// first. Rules inside a component are sorted by text.
pub fn rule_scc_order(theory: &Theory) -> SccOrder {
    let rules = theory.canonical_rules();
    let mut graph: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..rules.len()).map(|i| graph.add_node(i)).collect();
    let mut producers: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, r) in rules.iter().enumerate() {
        producers.entry(&r.head().predicate).or_default().push(i);
    }
    for (i, r) in rules.iter().enumerate() {
        let body_preds: BTreeSet<&str> = r.body().iter().map(|a| a.predicate.as_str()).collect();
        for p in body_preds {
            for &j in producers.get(p).into_iter().flatten() {
                graph.update_edge(nodes[j], nodes[i], ());
            }
        }
    }

    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut members: Vec<usize> = c.into_iter().map(|n| graph[n]).collect();
            members.sort_unstable();
            members
        })
        .collect();
    // Identify components by their smallest canonical index.
    sccs.sort_by_key(|c| c[0]);
    let mut comp_of = vec![0usize; rules.len()];
    for (c, members) in sccs.iter().enumerate() {
        for &m in members {
            comp_of[m] = c;
        }
    }
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sccs.len()];
    let mut indegree = vec![0usize; sccs.len()];
    for e in graph.edge_indices() {
        let (a, b) = graph.edge_endpoints(e).expect("edge exists");
        let (ca, cb) = (comp_of[graph[a]], comp_of[graph[b]]);
        if ca != cb && succ[ca].insert(cb) {
            indegree[cb] += 1;
        }
    }

    let mut ready: BinaryHeap<Reverse<usize>> = (0..sccs.len())
        .filter(|&c| indegree[c] == 0)
        .map(Reverse)
        .collect();
    let mut components = Vec::with_capacity(sccs.len());
    while let Some(Reverse(c)) = ready.pop() {
        components.push(sccs[c].iter().map(|&i| rules[i].clone()).collect());
        for &d in &succ[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(Reverse(d));
            }
        }
    }
    SccOrder { components }
}

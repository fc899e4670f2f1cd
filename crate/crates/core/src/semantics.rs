//! Extension semantics of abstract argumentation frameworks.
//!
//! The grounded extension is computed by iterating the defence operator.
//! Other semantics are enumerated by backtracking over conflict-free sets,
//! restricted to the arguments the grounded labelling leaves undecided:
//! every complete extension contains the grounded one and excludes whatever
//! it attacks, and every admissible set lies inside some complete extension.
//! The enumeration budget bounds the size of that search space, not
//! counting self-attacking arguments, which are never included.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::argumentation::{ArgId, AttackGraph};
use crate::syntax::Atom;

pub const DEFAULT_EXTENSION_BUDGET: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("extension enumeration over {size} arguments exceeds the budget of {budget}")]
pub struct BudgetExceeded {
    pub size: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    Admissible,
    Complete,
    Grounded,
    Preferred,
    Stable,
}

impl Semantics {
    pub const ALL: [Semantics; 5] = [
        Semantics::Admissible,
        Semantics::Complete,
        Semantics::Grounded,
        Semantics::Preferred,
        Semantics::Stable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Admissible => "adm",
            Semantics::Complete => "com",
            Semantics::Grounded => "grd",
            Semantics::Preferred => "prf",
            Semantics::Stable => "stb",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Semantics::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown semantics `{s}` (adm, com, grd, prf, stb)"))
    }
}

/// An abstract framework over arguments `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Af {
    n: usize,
    attackers: Vec<FixedBitSet>,
    targets: Vec<FixedBitSet>,
}

impl Af {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (ArgId, ArgId)>) -> Self {
        let mut attackers = vec![FixedBitSet::with_capacity(n); n];
        let mut targets = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "attack ({a}, {b}) outside 0..{n}");
            attackers[b].insert(a);
            targets[a].insert(b);
        }
        Af { n, attackers, targets }
    }

    pub fn from_graph(graph: &AttackGraph) -> Self {
        Af::new(graph.len(), graph.edges())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn attacks(&self, a: ArgId, b: ArgId) -> bool {
        self.targets[a].contains(b)
    }

    fn set(&self, s: &BTreeSet<ArgId>) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.n);
        for &a in s {
            out.insert(a);
        }
        out
    }

    fn attacked_by(&self, s: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.n);
        for a in s.ones() {
            out.union_with(&self.targets[a]);
        }
        out
    }

    fn conflict_free_bits(&self, s: &FixedBitSet) -> bool {
        s.ones().all(|a| self.attackers[a].is_disjoint(s))
    }

    /// Arguments all of whose attackers are attacked by `s`.
    fn defended_bits(&self, s: &FixedBitSet) -> FixedBitSet {
        let hit = self.attacked_by(s);
        let mut out = FixedBitSet::with_capacity(self.n);
        for a in 0..self.n {
            if self.attackers[a].is_subset(&hit) {
                out.insert(a);
            }
        }
        out
    }

    pub fn conflict_free(&self, s: &BTreeSet<ArgId>) -> bool {
        self.conflict_free_bits(&self.set(s))
    }

    pub fn defended(&self, s: &BTreeSet<ArgId>) -> BTreeSet<ArgId> {
        self.defended_bits(&self.set(s)).ones().collect()
    }

    pub fn grounded(&self) -> BTreeSet<ArgId> {
        let mut s = FixedBitSet::with_capacity(self.n);
        loop {
            let next = self.defended_bits(&s);
            if next == s {
                return s.ones().collect();
            }
            s = next;
        }
    }

    /// Whether `s` is an extension under `sem`, straight from the
    /// definitions. Grounded and preferred compare against the complete
    /// extensions, found by enumerating all subsets; keep `n` small.
    pub fn check(&self, s: &BTreeSet<ArgId>, sem: Semantics) -> bool {
        let bits = self.set(s);
        let cf = self.conflict_free_bits(&bits);
        let defended = self.defended_bits(&bits);
        let admissible = cf && bits.is_subset(&defended);
        let complete = cf && bits == defended;
        match sem {
            Semantics::Admissible => admissible,
            Semantics::Complete => complete,
            Semantics::Stable => {
                let hit = self.attacked_by(&bits);
                cf && (0..self.n).all(|a| bits.contains(a) || hit.contains(a))
            }
            Semantics::Grounded => complete && *s == self.grounded(),
            Semantics::Preferred => {
                complete
                    && self
                        .brute_force(Semantics::Complete)
                        .iter()
                        .all(|e| !(s.is_subset(e) && s != e))
            }
        }
    }

    /// Every subset of the arguments satisfying `sem`; exponential, for
    /// cross-checking only.
    pub fn brute_force(&self, sem: Semantics) -> Vec<BTreeSet<ArgId>> {
        assert!(self.n < 24, "brute force over {} arguments", self.n);
        let mut out = Vec::new();
        for mask in 0u32..(1 << self.n) {
            let s: BTreeSet<ArgId> = (0..self.n).filter(|&i| mask & (1 << i) != 0).collect();
            let ok = match sem {
                Semantics::Preferred | Semantics::Grounded => self.check(&s, Semantics::Complete),
                _ => self.check(&s, sem),
            };
            if ok {
                out.push(s);
            }
        }
        let out = match sem {
            Semantics::Grounded => minimal(out),
            Semantics::Preferred => maximal(out),
            _ => out,
        };
        sorted(out)
    }

    /// Extensions under `sem`, sorted. Grounded never exceeds the budget.
    pub fn extensions(
        &self,
        sem: Semantics,
        budget: usize,
    ) -> Result<Vec<BTreeSet<ArgId>>, BudgetExceeded> {
        let grounded = self.grounded();
        if sem == Semantics::Grounded {
            return Ok(vec![grounded]);
        }
        let g = self.set(&grounded);
        let out_of_play = self.attacked_by(&g);
        let undecided: Vec<ArgId> = (0..self.n)
            .filter(|&a| !g.contains(a) && !out_of_play.contains(a))
            .collect();

        let (space, start) = if sem == Semantics::Admissible {
            let mut space: Vec<ArgId> = grounded.iter().copied().chain(undecided).collect();
            space.sort_unstable();
            (space, FixedBitSet::with_capacity(self.n))
        } else {
            (undecided, g)
        };
        // Self-attackers can never be included.
        let (excluded, space): (Vec<ArgId>, Vec<ArgId>) =
            space.into_iter().partition(|&a| self.attackers[a].contains(a));
        if space.len() > budget {
            return Err(BudgetExceeded {
                size: space.len(),
                budget,
            });
        }

        let mut found = Vec::new();
        let mut state = Search {
            sem,
            current: start,
            rest: FixedBitSet::with_capacity(self.n),
            out: FixedBitSet::with_capacity(self.n),
        };
        for &a in &excluded {
            state.out.insert(a);
        }
        for &a in &space {
            state.rest.insert(a);
        }
        self.search(&space, 0, &mut state, &mut |s| {
            let defended = self.defended_bits(s);
            let keep = match sem {
                Semantics::Admissible => s.is_subset(&defended),
                Semantics::Complete | Semantics::Preferred => *s == defended,
                Semantics::Stable => {
                    let hit = self.attacked_by(s);
                    (0..self.n).all(|a| s.contains(a) || hit.contains(a))
                }
                Semantics::Grounded => unreachable!(),
            };
            if keep {
                found.push(s.ones().collect::<BTreeSet<ArgId>>());
            }
        });
        if sem == Semantics::Preferred {
            found = maximal(found);
        }
        Ok(sorted(found))
    }

    /// Visits every conflict-free extension of `state.current` by members of
    /// `space[i..]`, skipping branches that cannot lead to an extension.
    fn search(&self, space: &[ArgId], i: usize, state: &mut Search, visit: &mut impl FnMut(&FixedBitSet)) {
        if !self.viable(state) {
            return;
        }
        let Some(&a) = space.get(i) else {
            visit(&state.current);
            return;
        };
        state.rest.set(a, false);
        state.out.insert(a);
        self.search(space, i + 1, state, visit);
        state.out.set(a, false);
        if !self.attackers[a].contains(a)
            && self.attackers[a].is_disjoint(&state.current)
            && self.targets[a].is_disjoint(&state.current)
        {
            state.current.insert(a);
            self.search(space, i + 1, state, visit);
            state.current.set(a, false);
        }
        state.rest.insert(a);
    }

    /// Necessary conditions for some completion of `state` to qualify.
    /// Every attacker of a member must remain counter-attackable; a
    /// complete extension must not exclude an argument it already defends
    /// (defence only grows with the set); a stable one must still be able
    /// to attack every excluded argument.
    fn viable(&self, state: &Search) -> bool {
        let mut reachable = state.current.clone();
        reachable.union_with(&state.rest);
        let counterable = |y: usize| !self.attackers[y].is_disjoint(&reachable);
        if !state
            .current
            .ones()
            .all(|x| self.attackers[x].ones().all(counterable))
        {
            return false;
        }
        match state.sem {
            Semantics::Complete | Semantics::Preferred => {
                let hit = self.attacked_by(&state.current);
                state.out.ones().all(|u| !self.attackers[u].is_subset(&hit))
            }
            Semantics::Stable => state.out.ones().all(counterable),
            _ => true,
        }
    }

    /// Arguments in every complete extension (which is exactly the grounded
    /// extension) and arguments not attacked by any of those.
    pub fn certain_and_tentative(&self) -> (BTreeSet<ArgId>, BTreeSet<ArgId>) {
        let certain = self.grounded();
        let hit = self.attacked_by(&self.set(&certain));
        let tentative = (0..self.n).filter(|&a| !hit.contains(a)).collect();
        (certain, tentative)
    }
}

struct Search {
    sem: Semantics,
    current: FixedBitSet,
    /// Candidates not yet decided.
    rest: FixedBitSet,
    /// Candidates decided against.
    out: FixedBitSet,
}

fn minimal(family: Vec<BTreeSet<ArgId>>) -> Vec<BTreeSet<ArgId>> {
    family
        .iter()
        .filter(|s| !family.iter().any(|t| t.is_subset(s) && t != *s))
        .cloned()
        .collect()
}

fn maximal(family: Vec<BTreeSet<ArgId>>) -> Vec<BTreeSet<ArgId>> {
    family
        .iter()
        .filter(|s| !family.iter().any(|t| s.is_subset(t) && t != *s))
        .cloned()
        .collect()
}

fn sorted(mut family: Vec<BTreeSet<ArgId>>) -> Vec<BTreeSet<ArgId>> {
    family.sort();
    family.dedup();
    family
}

/// Extensions of an induced framework together with their claim sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSet {
    pub semantics: Semantics,
    pub extensions: Vec<BTreeSet<ArgId>>,
    pub claims: Vec<BTreeSet<Atom>>,
}

impl ExtensionSet {
    /// Extensions as sets of canonical argument encodings, comparable
    /// across frameworks.
    pub fn encoded(&self, graph: &AttackGraph) -> BTreeSet<BTreeSet<String>> {
        self.extensions
            .iter()
            .map(|e| e.iter().map(|&a| graph.arguments[a].encoding.clone()).collect())
            .collect()
    }

    pub fn claim_family(&self) -> BTreeSet<BTreeSet<Atom>> {
        self.claims.iter().cloned().collect()
    }
}

/// Conclusions of each extension, deduplicated and sorted.
pub fn claim_sets(graph: &AttackGraph, extensions: &[BTreeSet<ArgId>]) -> Vec<BTreeSet<Atom>> {
    let family: BTreeSet<BTreeSet<Atom>> = extensions
        .iter()
        .map(|e| e.iter().map(|&a| graph.arguments[a].conclusion.clone()).collect())
        .collect();
    family.into_iter().collect()
}

pub fn extensions(
    graph: &AttackGraph,
    sem: Semantics,
    budget: usize,
) -> Result<ExtensionSet, BudgetExceeded> {
    let extensions = Af::from_graph(graph).extensions(sem, budget)?;
    let claims = claim_sets(graph, &extensions);
    Ok(ExtensionSet {
        semantics: sem,
        extensions,
        claims,
    })
}

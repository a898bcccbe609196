//! State-transformation profiles of a normalized transducer and the finite monoid they form.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph::PriorityGraph;
use crate::transducer::Transducer;
use crate::{Priority, StateId};

pub type ProfileId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("profile has no transformation from state {from} to state {to}")]
    NoTransformation { from: StateId, to: StateId },
    #[error("profile automaton exceeds {limit} profiles")]
    BudgetExceeded { limit: usize },
}

/// Largest priority met along a finite run. `Empty` belongs to the empty run only and is
/// the neutral element of `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunMax {
    Empty,
    Seen(Priority),
}

impl RunMax {
    pub fn is_even(self) -> bool {
        matches!(self, RunMax::Seen(p) if p % 2 == 0)
    }

    pub fn priority(self) -> Option<Priority> {
        match self {
            RunMax::Empty => None,
            RunMax::Seen(p) => Some(p),
        }
    }
}

impl fmt::Display for RunMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunMax::Empty => write!(f, "⊥"),
            RunMax::Seen(p) => write!(f, "{p}"),
        }
    }
}

/// A set of triples `(p, q, c)`: some run from `p` to `q` reads the word and has
/// largest priority `c`. Triples are kept sorted so equal profiles compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile {
    triples: Vec<(StateId, StateId, RunMax)>,
}

impl Profile {
    pub fn from_triples(triples: impl IntoIterator<Item = (StateId, StateId, RunMax)>) -> Self {
        let mut triples: Vec<_> = triples.into_iter().collect();
        triples.sort_unstable();
        triples.dedup();
        Profile { triples }
    }

    /// Profile of the empty word.
    pub fn identity(states: usize) -> Self {
        Profile { triples: (0..states).map(|q| (q, q, RunMax::Empty)).collect() }
    }

    pub fn triples(&self) -> &[(StateId, StateId, RunMax)] {
        &self.triples
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: (StateId, StateId, RunMax)) -> bool {
        self.triples.binary_search(&triple).is_ok()
    }

    pub fn from_source(&self, p: StateId) -> &[(StateId, StateId, RunMax)] {
        let lo = self.triples.partition_point(|t| t.0 < p);
        let hi = self.triples.partition_point(|t| t.0 <= p);
        &self.triples[lo..hi]
    }

    /// Profile of the concatenation of the two underlying words.
    pub fn compose(&self, other: &Profile) -> Profile {
        let mut out = Vec::new();
        for &(p, q, m) in &self.triples {
            for &(_, r, n) in other.from_source(q) {
                out.push((p, r, m.max(n)));
            }
        }
        Profile::from_triples(out)
    }

    /// The best priority for going from `p` to `q`: the largest even one if any,
    /// otherwise the smallest odd one.
    pub fn best(&self, p: StateId, q: StateId) -> Result<RunMax, ProfileError> {
        let ms: Vec<RunMax> = self.from_source(p).iter().filter(|t| t.1 == q).map(|t| t.2).collect();
        if ms.is_empty() {
            return Err(ProfileError::NoTransformation { from: p, to: q });
        }
        if let Some(&even) = ms.iter().filter(|m| m.is_even()).max() {
            return Ok(even);
        }
        Ok(*ms.iter().min().unwrap())
    }
}

/// Runs of a normalized transducer over a single letter, with output-only moves on both sides.
pub fn letter_profile(t: &Transducer, a: char) -> Profile {
    debug_assert!(t.is_normalized());
    let closures: Vec<_> = (0..t.state_count()).map(|q| t.silent_closure(q)).collect();
    let mut triples = Vec::new();
    for p in 0..t.state_count() {
        let start = RunMax::Seen(t.priority(p));
        for &(s, m) in &closures[p] {
            let m = start.max(m.map_or(RunMax::Empty, RunMax::Seen));
            for tr in t.outgoing(s).filter(|tr| tr.input == [a]) {
                let m2 = m.max(RunMax::Seen(t.priority(tr.to)));
                for &(r, mm) in &closures[tr.to] {
                    triples.push((p, r, m2.max(mm.map_or(RunMax::Empty, RunMax::Seen))));
                }
            }
        }
    }
    Profile::from_triples(triples)
}

/// Profile of a word, folded letter by letter.
pub fn word_profile(t: &Transducer, word: &[char]) -> Profile {
    word.iter()
        .fold(Profile::identity(t.state_count()), |acc, &a| acc.compose(&letter_profile(t, a)))
}

/// Deterministic automaton over the input alphabet whose states are the profiles of all
/// input words; state 0 is the profile of the empty word.
#[derive(Debug, Clone)]
pub struct ProfileAutomaton {
    letters: Vec<char>,
    profiles: Vec<Profile>,
    index: HashMap<Profile, ProfileId>,
    delta: Vec<Vec<ProfileId>>,
    finite: Vec<bool>,
    ell: usize,
}

impl ProfileAutomaton {
    pub fn build(t: &Transducer, limit: usize) -> Result<Self, ProfileError> {
        debug_assert!(t.is_normalized());
        let letters = t.input_alphabet().to_vec();
        let letter_profiles: Vec<Profile> = letters.iter().map(|&a| letter_profile(t, a)).collect();
        let start = Profile::identity(t.state_count());
        let mut profiles = vec![start.clone()];
        let mut index = HashMap::from([(start, 0)]);
        let mut delta: Vec<Vec<ProfileId>> = Vec::new();
        let mut queue = VecDeque::from([0]);
        while let Some(id) = queue.pop_front() {
            let mut row = Vec::with_capacity(letters.len());
            for lp in &letter_profiles {
                let next = profiles[id].compose(lp);
                let nid = match index.get(&next) {
                    Some(&nid) => nid,
                    None => {
                        if profiles.len() >= limit {
                            return Err(ProfileError::BudgetExceeded { limit });
                        }
                        profiles.push(next.clone());
                        index.insert(next, profiles.len() - 1);
                        queue.push_back(profiles.len() - 1);
                        profiles.len() - 1
                    }
                };
                row.push(nid);
            }
            if delta.len() <= id {
                delta.resize(id + 1, Vec::new());
            }
            delta[id] = row;
        }
        let mut pa = ProfileAutomaton { letters, profiles, index, delta, finite: Vec::new(), ell: 0 };
        pa.analyse_languages();
        Ok(pa)
    }

    fn analyse_languages(&mut self) {
        let n = self.profiles.len();
        let mut g = PriorityGraph::new(std::iter::repeat_n(0, n));
        for (p, row) in self.delta.iter().enumerate() {
            for &q in row {
                g.add_edge(p, q, 0);
            }
        }
        // L(P) is infinite exactly when P is reachable from a node on a cycle.
        let cyclic = g.nodes_on_cycles();
        let mut infinite = vec![false; n];
        for c in (0..n).filter(|&c| cyclic[c]) {
            if !infinite[c] {
                for (i, r) in g.reachable_from(c).into_iter().enumerate() {
                    infinite[i] |= r;
                }
            }
        }
        self.finite = infinite.iter().map(|i| !i).collect();
        // Finite-language profiles form a predecessor-closed acyclic part; take longest paths.
        let mut indegree = vec![0usize; n];
        for p in (0..n).filter(|&p| self.finite[p]) {
            for &q in &self.delta[p] {
                indegree[q] += 1;
            }
        }
        let mut dist = vec![0usize; n];
        let mut ready = vec![0];
        while let Some(p) = ready.pop() {
            for &q in &self.delta[p] {
                if self.finite[q] {
                    dist[q] = dist[q].max(dist[p] + 1);
                    indegree[q] -= 1;
                    if indegree[q] == 0 {
                        ready.push(q);
                    }
                }
            }
        }
        self.ell = (0..n).filter(|&p| self.finite[p]).map(|p| dist[p]).max().unwrap_or(0);
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn initial(&self) -> ProfileId {
        0
    }

    pub fn profile(&self, id: ProfileId) -> &Profile {
        &self.profiles[id]
    }

    pub fn id_of(&self, p: &Profile) -> Option<ProfileId> {
        self.index.get(p).copied()
    }

    pub fn step(&self, id: ProfileId, letter: usize) -> ProfileId {
        self.delta[id][letter]
    }

    pub fn step_symbol(&self, id: ProfileId, a: char) -> Option<ProfileId> {
        self.letters.binary_search(&a).ok().map(|l| self.delta[id][l])
    }

    pub fn run(&self, word: &[char]) -> Option<ProfileId> {
        word.iter().try_fold(0, |id, &a| self.step_symbol(id, a))
    }

    /// Whether only finitely many words have this profile.
    pub fn is_language_finite(&self, id: ProfileId) -> bool {
        self.finite[id]
    }

    /// Length of the longest word whose profile has a finite language.
    pub fn ell(&self) -> usize {
        self.ell
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transducer::TransducerBuilder;

    fn loop_transducer() -> Transducer {
        let mut b = TransducerBuilder::new("a", "a");
        let q = b.state("q", 1);
        b.transition(q, "a", "a", q);
        b.build(q).unwrap()
    }

    #[test]
    fn best_prefers_large_even_then_small_odd() {
        let p = Profile::from_triples([
            (0, 1, RunMax::Seen(3)),
            (0, 1, RunMax::Seen(2)),
            (0, 1, RunMax::Seen(4)),
            (0, 2, RunMax::Seen(5)),
            (0, 2, RunMax::Seen(3)),
        ]);
        assert_eq!(p.best(0, 1), Ok(RunMax::Seen(4)));
        assert_eq!(p.best(0, 2), Ok(RunMax::Seen(3)));
        assert_eq!(p.best(1, 2), Err(ProfileError::NoTransformation { from: 1, to: 2 }));
    }

    #[test]
    fn identity_is_neutral() {
        let t = loop_transducer();
        let a = letter_profile(&t, 'a');
        let e = Profile::identity(1);
        assert_eq!(a.compose(&e), a);
        assert_eq!(e.compose(&a), a);
        assert_eq!(a.triples(), &[(0, 0, RunMax::Seen(1))]);
    }

    #[test]
    fn self_loop_profile_has_infinite_language() {
        let t = loop_transducer();
        let pa = ProfileAutomaton::build(&t, 100).unwrap();
        assert_eq!(pa.len(), 2);
        assert!(pa.is_language_finite(0));
        assert!(!pa.is_language_finite(1));
        assert_eq!(pa.ell(), 0);
    }

    #[test]
    fn chain_gives_positive_ell() {
        // Profiles of a, aa, aaa differ, then stabilise.
        let mut b = TransducerBuilder::new("a", "a");
        let s: Vec<_> = (0..4).map(|i| b.state(&format!("s{i}"), 0)).collect();
        for i in 0..3 {
            b.transition(s[i], "a", "a", s[i + 1]);
        }
        b.transition(s[3], "a", "a", s[3]);
        let t = b.build(s[0]).unwrap();
        let pa = ProfileAutomaton::build(&t, 100).unwrap();
        assert_eq!(pa.ell(), 2);
    }
}

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::NodeFiltered;

use crate::graph::PriorityGraph;
use crate::lasso::Lasso;
use crate::{Priority, StateId};

/// Nondeterministic parity automaton with priorities on states. A run is
/// accepting when the largest priority seen infinitely often is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityAutomaton<S = char> {
    alphabet: Vec<S>,
    priority: Vec<Priority>,
    initial: StateId,
    succ: Vec<Vec<Vec<StateId>>>,
}

impl<S: Clone + Ord> ParityAutomaton<S> {
    pub fn new(mut alphabet: Vec<S>, priority: Vec<Priority>, initial: StateId) -> Self {
        alphabet.sort();
        alphabet.dedup();
        assert!(initial < priority.len(), "initial state out of range");
        let succ = vec![vec![Vec::new(); alphabet.len()]; priority.len()];
        ParityAutomaton { alphabet, priority, initial, succ }
    }

    pub fn add_state(&mut self, priority: Priority) -> StateId {
        self.priority.push(priority);
        self.succ.push(vec![Vec::new(); self.alphabet.len()]);
        self.priority.len() - 1
    }

    pub fn add_transition(&mut self, from: StateId, letter: usize, to: StateId) {
        let targets = &mut self.succ[from][letter];
        if let Err(at) = targets.binary_search(&to) {
            targets.insert(at, to);
        }
    }

    pub fn alphabet(&self) -> &[S] {
        &self.alphabet
    }

    pub fn letter_index(&self, s: &S) -> Option<usize> {
        self.alphabet.binary_search(s).ok()
    }

    pub fn state_count(&self) -> usize {
        self.priority.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn priority(&self, q: StateId) -> Priority {
        self.priority[q]
    }

    pub fn priorities(&self) -> &[Priority] {
        &self.priority
    }

    pub fn successors(&self, q: StateId, letter: usize) -> &[StateId] {
        &self.succ[q][letter]
    }

    pub fn is_deterministic(&self) -> bool {
        self.succ.iter().all(|row| row.iter().all(|t| t.len() <= 1))
    }

    pub(crate) fn state_graph(&self) -> PriorityGraph {
        let mut g = PriorityGraph::new(self.priority.iter().copied());
        for (q, row) in self.succ.iter().enumerate() {
            for targets in row {
                for &t in targets {
                    g.add_edge(q, t, 0);
                }
            }
        }
        g
    }

    /// Language-preserving restriction to states that are reachable and can start an accepting run.
    pub fn trim(&self) -> ParityAutomaton<S> {
        let g = self.state_graph();
        let reach = g.reachable_from(self.initial);
        let live = g.can_reach(&g.cycle_nodes(0, 0));
        let keep: Vec<bool> = reach.iter().zip(&live).map(|(a, b)| *a && *b).collect();
        let mut remap = vec![usize::MAX; self.state_count()];
        let mut priority = Vec::new();
        if !keep[self.initial] {
            // Empty language: a single rejecting state.
            let mut a = ParityAutomaton::new(self.alphabet.clone(), vec![1], 0);
            for l in 0..self.alphabet.len() {
                a.add_transition(0, l, 0);
            }
            return a;
        }
        for q in 0..self.state_count() {
            if keep[q] {
                remap[q] = priority.len();
                priority.push(self.priority[q]);
            }
        }
        let mut out = ParityAutomaton::new(self.alphabet.clone(), priority, remap[self.initial]);
        for q in 0..self.state_count() {
            if !keep[q] {
                continue;
            }
            for l in 0..self.alphabet.len() {
                for &t in &self.succ[q][l] {
                    if keep[t] {
                        out.add_transition(remap[q], l, remap[t]);
                    }
                }
            }
        }
        out
    }

    pub fn accepts(&self, word: &Lasso<S>) -> bool {
        let positions = word.positions();
        let node = |q: StateId, pos: usize| q * positions + pos;
        let mut g = PriorityGraph::new(
            (0..self.state_count()).flat_map(|q| std::iter::repeat_n(self.priority[q], positions)),
        );
        for q in 0..self.state_count() {
            for pos in 0..positions {
                if let Some(l) = self.letter_index(word.letter_at_position(pos)) {
                    for &t in &self.succ[q][l] {
                        g.add_edge(node(q, pos), node(t, word.next_position(pos)), 0);
                    }
                }
            }
        }
        g.has_accepting_lasso(node(self.initial, 0), 0)
    }
}

/// Complete deterministic parity automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa<S = char> {
    alphabet: Vec<S>,
    priority: Vec<Priority>,
    initial: StateId,
    delta: Vec<Vec<StateId>>,
}

impl<S: Clone + Ord> Dpa<S> {
    /// `delta[q][l]` is the successor of `q` on the `l`-th letter of the sorted alphabet.
    pub fn new(alphabet: Vec<S>, priority: Vec<Priority>, initial: StateId, delta: Vec<Vec<StateId>>) -> Self {
        assert!(alphabet.windows(2).all(|w| w[0] < w[1]), "alphabet must be sorted and duplicate free");
        assert_eq!(priority.len(), delta.len());
        assert!(delta.iter().all(|row| row.len() == alphabet.len() && row.iter().all(|&t| t < priority.len())));
        Dpa { alphabet, priority, initial, delta }
    }

    pub fn alphabet(&self) -> &[S] {
        &self.alphabet
    }

    pub fn letter_index(&self, s: &S) -> Option<usize> {
        self.alphabet.binary_search(s).ok()
    }

    pub fn state_count(&self) -> usize {
        self.priority.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn priority(&self, q: StateId) -> Priority {
        self.priority[q]
    }

    pub fn step(&self, q: StateId, letter: usize) -> StateId {
        self.delta[q][letter]
    }

    pub fn step_symbol(&self, q: StateId, s: &S) -> Option<StateId> {
        self.letter_index(s).map(|l| self.delta[q][l])
    }

    /// Distinct priorities used by reachable states, ascending.
    pub fn used_priorities(&self) -> Vec<Priority> {
        let reach = self.reachable();
        let mut ps: Vec<Priority> = (0..self.state_count())
            .filter(|&q| reach[q])
            .map(|q| self.priority[q])
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for &t in &self.delta[q] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn accepts(&self, word: &Lasso<S>) -> bool {
        let mut q = self.initial;
        let mut pos = 0;
        let mut trace = Vec::new();
        let mut first_seen: HashMap<(StateId, usize), usize> = HashMap::new();
        loop {
            if pos >= word.prefix().len() {
                if let Some(&start) = first_seen.get(&(q, pos)) {
                    let max = trace[start..].iter().map(|&s| self.priority[s]).max().unwrap();
                    return max % 2 == 0;
                }
                first_seen.insert((q, pos), trace.len());
            }
            trace.push(q);
            match self.letter_index(word.letter_at_position(pos)) {
                Some(l) => q = self.delta[q][l],
                None => return false,
            }
            pos = word.next_position(pos);
        }
    }

    pub fn to_nondeterministic(&self) -> ParityAutomaton<S> {
        let mut a = ParityAutomaton::new(self.alphabet.clone(), self.priority.clone(), self.initial);
        for (q, row) in self.delta.iter().enumerate() {
            for (l, &t) in row.iter().enumerate() {
                a.add_transition(q, l, t);
            }
        }
        a
    }

    pub fn complement(&self) -> Dpa<S> {
        let mut c = self.clone();
        for p in &mut c.priority {
            *p += 1;
        }
        c
    }

    pub(crate) fn state_graph(&self) -> PriorityGraph {
        let mut g = PriorityGraph::new(self.priority.iter().copied());
        for (q, row) in self.delta.iter().enumerate() {
            for &t in row {
                g.add_edge(q, t, 0);
            }
        }
        g
    }

    /// Reassigns priorities so that every cycle keeps the parity of its maximum while
    /// the number of distinct priorities is kept small. States on no cycle get priority 0.
    pub fn compress_priorities(&self) -> Dpa<S> {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        for _ in 0..self.state_count() {
            g.add_node(());
        }
        for (q, row) in self.delta.iter().enumerate() {
            for &t in row {
                g.update_edge(NodeIndex::new(q), NodeIndex::new(t), ());
            }
        }
        let mut fresh = vec![0; self.state_count()];
        let all = vec![true; self.state_count()];
        self.compress_rec(&g, &all, &mut fresh);
        Dpa { priority: fresh, ..self.clone() }
    }

    fn compress_rec(&self, g: &DiGraph<(), ()>, within: &[bool], fresh: &mut [Priority]) -> Option<Priority> {
        let sub = NodeFiltered::from_fn(g, |v: NodeIndex| within[v.index()]);
        let mut top = None;
        for scc in tarjan_scc(&sub) {
            let trivial = scc.len() == 1 && !g.contains_edge(scc[0], scc[0]);
            if trivial {
                continue;
            }
            let max = scc.iter().map(|v| self.priority[v.index()]).max().unwrap();
            let mut inner = vec![false; self.state_count()];
            for v in &scc {
                inner[v.index()] = self.priority[v.index()] != max;
            }
            let below = self.compress_rec(g, &inner, fresh);
            let level = match below {
                None => max % 2,
                Some(k) if k % 2 == max % 2 => k,
                Some(k) => k + 1,
            };
            for v in &scc {
                if self.priority[v.index()] == max {
                    fresh[v.index()] = level;
                }
            }
            top = top.max(Some(level));
        }
        top
    }

    /// Restricts to reachable states and merges states with equal priority
    /// and equivalent successors (coarsest bisimulation).
    pub fn reduce(&self) -> Dpa<S> {
        let compressed = self.compress_priorities();
        let reach = compressed.reachable();
        let states: Vec<StateId> = (0..self.state_count()).filter(|&q| reach[q]).collect();
        let mut class: Vec<usize> = vec![usize::MAX; self.state_count()];
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        for &q in &states {
            let n = ids.len();
            class[q] = *ids.entry(vec![compressed.priority[q] as usize]).or_insert(n);
        }
        let mut count = ids.len();
        loop {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![usize::MAX; self.state_count()];
            for &q in &states {
                let mut sig = vec![class[q]];
                sig.extend(compressed.delta[q].iter().map(|&t| class[t]));
                let n = ids.len();
                next[q] = *ids.entry(sig).or_insert(n);
            }
            class = next;
            if ids.len() == count {
                break;
            }
            count = ids.len();
        }
        let mut priority = vec![0; count];
        let mut delta = vec![Vec::new(); count];
        for &q in &states {
            priority[class[q]] = compressed.priority[q];
            delta[class[q]] = compressed.delta[q].iter().map(|&t| class[t]).collect();
        }
        Dpa::new(self.alphabet.clone(), priority, class[self.initial], delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Lasso {
        Lasso::parse(s).unwrap()
    }

    // Deterministic "infinitely many a" over {a, b}.
    fn inf_a() -> Dpa {
        Dpa::new(vec!['a', 'b'], vec![2, 1], 0, vec![vec![0, 1], vec![0, 1]])
    }

    // Nondeterministic "finitely many a": guess the point after which only b occurs.
    fn fin_a() -> ParityAutomaton {
        let mut a = ParityAutomaton::new(vec!['a', 'b'], vec![1, 0], 0);
        a.add_transition(0, 0, 0);
        a.add_transition(0, 1, 0);
        a.add_transition(0, 1, 1);
        a.add_transition(1, 1, 1);
        a
    }

    #[test]
    fn deterministic_membership() {
        let d = inf_a();
        assert!(d.accepts(&l("bbb|ab")));
        assert!(!d.accepts(&l("aaa|b")));
        assert!(d.complement().accepts(&l("aaa|b")));
    }

    #[test]
    fn nondeterministic_membership() {
        let a = fin_a();
        assert!(a.accepts(&l("abab|b")));
        assert!(!a.accepts(&l("|ab")));
        assert!(a.accepts(&l("|bbb")));
    }

    #[test]
    fn trimming_keeps_language() {
        let mut a = fin_a();
        let dead = a.add_state(2);
        a.add_transition(0, 0, dead);
        let t = a.trim();
        assert_eq!(t.state_count(), 2);
        for w in ["|a", "|b", "ab|b", "b|ab"] {
            assert_eq!(a.accepts(&l(w)), t.accepts(&l(w)));
        }
    }

    #[test]
    fn reduction_merges_copies_and_compresses() {
        let d = Dpa::new(
            vec!['a', 'b'],
            vec![7, 4, 7, 4],
            0,
            vec![vec![2, 1], vec![0, 3], vec![0, 3], vec![2, 1]],
        );
        let r = d.reduce();
        assert_eq!(r.state_count(), 2);
        assert_eq!(r.used_priorities(), vec![0, 1]);
        for w in ["|a", "|b", "ab|b", "b|ab", "|aab"] {
            assert_eq!(d.accepts(&l(w)), r.accepts(&l(w)));
        }
    }
}

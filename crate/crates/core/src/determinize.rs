//! Determinization of parity automata: parity to Büchi, Safra trees, and index
//! appearance records turning the Rabin condition of Safra trees into parity.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::automaton::{Dpa, ParityAutomaton};
use crate::graph::PriorityGraph;
use crate::transducer::Transducer;
use crate::{Priority, StateId};

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DeterminizeError {
    #[error("determinization exceeds {limit} states")]
    StateBudgetExceeded { limit: usize },
}

/// Language-equal complete deterministic parity automaton.
pub fn determinize(a: &ParityAutomaton<char>, limit: usize) -> Result<Dpa<char>, DeterminizeError> {
    let a = a.trim();
    if a.is_deterministic() {
        return Ok(complete(&a).reduce());
    }
    safra_determinize(&a, limit)
}

/// Always goes through Büchi automata and Safra trees, even for deterministic input.
pub fn safra_determinize(a: &ParityAutomaton<char>, limit: usize) -> Result<Dpa<char>, DeterminizeError> {
    let nba = parity_to_buchi(&a.trim());
    let raw = SafraConstruction::new(&nba).run(limit)?;
    Ok(raw.reduce())
}

/// Deterministic automaton for the input projection of a transducer.
pub fn build_domain_automaton(t: &Transducer, limit: usize) -> Result<Dpa<char>, DeterminizeError> {
    determinize(&t.project_input(), limit)
}

fn complete(a: &ParityAutomaton<char>) -> Dpa<char> {
    let n = a.state_count();
    let k = a.alphabet().len();
    let mut needs_sink = false;
    let mut delta = vec![vec![n; k]; n];
    for (q, row) in delta.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            match a.successors(q, l).first() {
                Some(&t) => *slot = t,
                None => needs_sink = true,
            }
        }
    }
    let mut priority: Vec<Priority> = a.priorities().to_vec();
    if needs_sink {
        priority.push(1);
        delta.push(vec![n; k]);
    }
    Dpa::new(a.alphabet().to_vec(), priority, a.initial(), delta)
}

/// Büchi automaton presented as a parity automaton with priorities 1 and 2.
pub fn parity_to_buchi(a: &ParityAutomaton<char>) -> ParityAutomaton<char> {
    let k = a.alphabet().len();
    let ps: BTreeSet<Priority> = a.priorities().iter().copied().collect();
    let evens: Vec<Priority> = ps.iter().copied().filter(|p| p % 2 == 0).collect();
    let Some(&top_even) = evens.last() else {
        let mut empty = ParityAutomaton::new(a.alphabet().to_vec(), vec![1], 0);
        for l in 0..k {
            empty.add_transition(0, l, 0);
        }
        return empty;
    };
    let max = *ps.iter().next_back().unwrap();
    if evens.len() == 1 && max == top_even {
        let mut b = ParityAutomaton::new(
            a.alphabet().to_vec(),
            a.priorities().iter().map(|&p| if p == top_even { 2 } else { 1 }).collect(),
            a.initial(),
        );
        for q in 0..a.state_count() {
            for l in 0..k {
                for &t in a.successors(q, l) {
                    b.add_transition(q, l, t);
                }
            }
        }
        return b;
    }
    // Wait in the first copy, then guess the largest even priority seen infinitely often
    // and stay below it, visiting it infinitely often.
    type Guess = (StateId, Option<Priority>);
    let mut ids: HashMap<Guess, StateId> = HashMap::new();
    let start: Guess = (a.initial(), None);
    ids.insert(start, 0);
    let mut b = ParityAutomaton::new(a.alphabet().to_vec(), vec![1], 0);
    let mut queue = VecDeque::from([start]);
    while let Some((q, guess)) = queue.pop_front() {
        let from = ids[&(q, guess)];
        for l in 0..k {
            for &t in a.successors(q, l) {
                let pt = a.priority(t);
                let mut targets: Vec<Guess> = Vec::new();
                match guess {
                    None => {
                        targets.push((t, None));
                        targets.extend(evens.iter().filter(|&&e| e >= pt).map(|&e| (t, Some(e))));
                    }
                    Some(e) if pt <= e => targets.push((t, Some(e))),
                    Some(_) => {}
                }
                for target in targets {
                    let id = *ids.entry(target).or_insert_with(|| {
                        queue.push_back(target);
                        let accepting = target.1 == Some(pt);
                        b.add_state(if accepting { 2 } else { 1 })
                    });
                    b.add_transition(from, l, id);
                }
            }
        }
    }
    b
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    name: u32,
    label: Vec<StateId>,
    marked: bool,
    children: Vec<Node>,
}

impl Node {
    fn names(&self, out: &mut Vec<u32>) {
        out.push(self.name);
        for c in &self.children {
            c.names(out);
        }
    }

    fn marked_names(&self, out: &mut Vec<u32>) {
        if self.marked {
            out.push(self.name);
        }
        for c in &self.children {
            c.marked_names(out);
        }
    }

    fn unmark(&mut self) {
        self.marked = false;
        self.children.iter_mut().for_each(Node::unmark);
    }

    fn spawn(&mut self, accepting: &[bool], fresh: &mut impl Iterator<Item = u32>) {
        for c in &mut self.children {
            c.spawn(accepting, fresh);
        }
        let label: Vec<StateId> = self.label.iter().copied().filter(|&q| accepting[q]).collect();
        if !label.is_empty() {
            let name = fresh.next().expect("Safra trees need at most twice as many names as states");
            self.children.push(Node { name, label, marked: false, children: Vec::new() });
        }
    }

    fn advance(&mut self, nba: &ParityAutomaton<char>, letter: usize) {
        let next: BTreeSet<StateId> =
            self.label.iter().flat_map(|&q| nba.successors(q, letter).iter().copied()).collect();
        self.label = next.into_iter().collect();
        for c in &mut self.children {
            c.advance(nba, letter);
        }
    }

    fn remove(&mut self, states: &BTreeSet<StateId>) {
        self.label.retain(|q| !states.contains(q));
        for c in &mut self.children {
            c.remove(states);
        }
    }

    // A state belongs to the oldest sibling holding it.
    fn merge_horizontally(&mut self) {
        let mut taken = BTreeSet::new();
        for c in &mut self.children {
            c.remove(&taken);
            taken.extend(c.label.iter().copied());
            c.merge_horizontally();
        }
    }

    fn drop_empty(&mut self) {
        self.children.retain(|c| !c.label.is_empty());
        for c in &mut self.children {
            c.drop_empty();
        }
    }

    fn merge_vertically(&mut self) {
        let covered: BTreeSet<StateId> = self.children.iter().flat_map(|c| c.label.iter().copied()).collect();
        if !self.children.is_empty() && covered.len() == self.label.len() {
            self.children.clear();
            self.marked = true;
        } else {
            for c in &mut self.children {
                c.merge_vertically();
            }
        }
    }
}

type Tree = Option<Node>;

struct SafraConstruction<'a> {
    nba: &'a ParityAutomaton<char>,
    accepting: Vec<bool>,
    names: u32,
}

impl<'a> SafraConstruction<'a> {
    fn new(nba: &'a ParityAutomaton<char>) -> Self {
        let accepting = nba.priorities().iter().map(|p| p % 2 == 0).collect();
        let names = 2 * nba.state_count() as u32;
        SafraConstruction { nba, accepting, names }
    }

    fn step(&self, tree: &Tree, letter: usize) -> Tree {
        let mut t = tree.clone()?;
        t.unmark();
        let mut used = Vec::new();
        t.names(&mut used);
        let mut fresh = (0..self.names).filter(move |n| !used.contains(n));
        t.spawn(&self.accepting, &mut fresh);
        t.advance(self.nba, letter);
        t.merge_horizontally();
        if t.label.is_empty() {
            return None;
        }
        t.drop_empty();
        t.merge_vertically();
        Some(t)
    }

    /// Index appearance record priority for visiting `tree` with record `order`.
    /// A name missing from the tree is a bad event, a marked name a good one.
    fn priority(&self, tree: &Tree, order: &[u32]) -> Priority {
        let mut present = Vec::new();
        let mut marked = Vec::new();
        if let Some(t) = tree {
            t.names(&mut present);
            t.marked_names(&mut marked);
        }
        let mut best = 1;
        for (pos, name) in order.iter().enumerate() {
            let pos = pos as Priority;
            if !present.contains(name) {
                best = best.max(2 * pos + 3);
            } else if marked.contains(name) {
                best = best.max(2 * pos + 2);
            }
        }
        best
    }

    /// Names missing from the tree move to the front (in a canonical order); the others keep their order.
    fn reorder(&self, tree: &Tree, order: &[u32]) -> Vec<u32> {
        let mut present = Vec::new();
        if let Some(t) = tree {
            t.names(&mut present);
        }
        let mut out: Vec<u32> = (0..self.names).filter(|n| !present.contains(n)).collect();
        out.extend(order.iter().copied().filter(|n| present.contains(n)));
        out
    }

    fn run(&self, limit: usize) -> Result<Dpa<char>, DeterminizeError> {
        let k = self.nba.alphabet().len();
        let root = Node { name: 0, label: vec![self.nba.initial()], marked: false, children: Vec::new() };
        let start: (Tree, Vec<u32>) = (Some(root), (0..self.names).collect());
        let mut ids = HashMap::from([(start.clone(), 0usize)]);
        let mut states = vec![start];
        let mut delta: Vec<Vec<StateId>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (tree, order) = states[i].clone();
            let next_order = self.reorder(&tree, &order);
            let mut row = Vec::with_capacity(k);
            for l in 0..k {
                let key = (self.step(&tree, l), next_order.clone());
                let id = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= limit {
                            return Err(DeterminizeError::StateBudgetExceeded { limit });
                        }
                        ids.insert(key.clone(), states.len());
                        states.push(key);
                        states.len() - 1
                    }
                };
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let priority = states.iter().map(|(t, o)| self.priority(t, o)).collect();
        Ok(Dpa::new(self.nba.alphabet().to_vec(), priority, 0, delta))
    }
}

/// Whether the language of `d` is closed, i.e. contains every word all of whose
/// prefixes extend to words of the language.
pub fn is_domain_closed<S: Clone + Ord>(d: &Dpa<S>) -> bool {
    let g = d.state_graph();
    let reach = g.reachable_from(d.initial());
    let live = g.can_reach(&g.cycle_nodes(0, 0));
    let keep: Vec<bool> = reach.iter().zip(&live).map(|(a, b)| *a && *b).collect();
    // Words of the closure stay among live states; find one that is rejected.
    let mut safe = PriorityGraph::new((0..d.state_count()).map(|q| d.priority(q)));
    for q in (0..d.state_count()).filter(|&q| keep[q]) {
        for l in 0..d.alphabet().len() {
            let t = d.step(q, l);
            if keep[t] {
                safe.add_edge(q, t, 0);
            }
        }
    }
    !safe.cycle_nodes(0, 1).iter().zip(&keep).any(|(c, k)| *c && *k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::Lasso;

    fn l(s: &str) -> Lasso {
        Lasso::parse(s).unwrap()
    }

    fn finitely_many_a() -> ParityAutomaton {
        let mut a = ParityAutomaton::new(vec!['a', 'b'], vec![1, 0], 0);
        a.add_transition(0, 0, 0);
        a.add_transition(0, 1, 0);
        a.add_transition(0, 1, 1);
        a.add_transition(1, 1, 1);
        a
    }

    #[test]
    fn safra_handles_finitely_many_a() {
        let a = finitely_many_a();
        let d = determinize(&a, 1000).unwrap();
        for w in ["|a", "|b", "aaa|b", "b|ab", "|abb", "ab|bbba"] {
            assert_eq!(a.accepts(&l(w)), d.accepts(&l(w)), "{w}");
        }
    }

    #[test]
    fn deterministic_input_gets_completed() {
        let mut a = ParityAutomaton::new(vec!['a', 'b'], vec![0], 0);
        a.add_transition(0, 0, 0);
        let d = determinize(&a, 10).unwrap();
        assert!(d.accepts(&l("|a")));
        assert!(!d.accepts(&l("a|ab")));
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            safra_determinize(&finitely_many_a(), 1),
            Err(DeterminizeError::StateBudgetExceeded { limit: 1 })
        );
    }

    #[test]
    fn closedness() {
        // Infinitely many a is not closed; all words is.
        let inf_a = Dpa::new(vec!['a', 'b'], vec![2, 1], 0, vec![vec![0, 1], vec![0, 1]]);
        assert!(!is_domain_closed(&inf_a));
        let all = Dpa::new(vec!['a', 'b'], vec![0], 0, vec![vec![0, 0]]);
        assert!(is_domain_closed(&all));
        let none = Dpa::new(vec!['a', 'b'], vec![1], 0, vec![vec![0, 0]]);
        assert!(is_domain_closed(&none));
        // Words starting with a.
        let starts_a = Dpa::new(vec!['a', 'b'], vec![0, 0, 1], 0, vec![vec![1, 2], vec![1, 1], vec![2, 2]]);
        assert!(is_domain_closed(&starts_a));
    }
}

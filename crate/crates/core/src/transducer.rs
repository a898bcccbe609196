use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automaton::ParityAutomaton;
use crate::graph::{PriorityGraph, READS_INPUT, WRITES_OUTPUT};
use crate::lasso::Lasso;
use crate::{Priority, StateId};

/// Every problem found while validating a transducer, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub violations: Vec<String>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid transducer: {}", self.violations.join("; "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("alignment of the two lassos needs more than {limit} configurations")]
pub struct AlignmentOverflow {
    pub limit: usize,
}

pub const DEFAULT_MAX_CONFIGURATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub input: Vec<char>,
    pub output: Vec<char>,
    pub to: StateId,
}

/// One-way nondeterministic parity transducer. Transitions read a finite input word
/// and write a finite output word; priorities sit on states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    input_alphabet: Vec<char>,
    output_alphabet: Vec<char>,
    names: Vec<String>,
    priority: Vec<Priority>,
    initial: StateId,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl Transducer {
    pub fn new(
        input_alphabet: Vec<char>,
        output_alphabet: Vec<char>,
        states: Vec<(String, Priority)>,
        initial: StateId,
        transitions: Vec<Transition>,
    ) -> Result<Self, ValidationError> {
        let mut violations = Vec::new();
        for (label, alphabet) in [("input", &input_alphabet), ("output", &output_alphabet)] {
            let mut seen = HashSet::new();
            for c in alphabet {
                if !seen.insert(c) {
                    violations.push(format!("{label} alphabet lists {c:?} twice"));
                }
            }
            if alphabet.is_empty() {
                violations.push(format!("{label} alphabet is empty"));
            }
        }
        if states.is_empty() {
            violations.push("no states declared".to_string());
        }
        let mut names = HashSet::new();
        for (name, _) in &states {
            if !names.insert(name.as_str()) {
                violations.push(format!("state {name:?} declared twice"));
            }
        }
        if initial >= states.len() && !states.is_empty() {
            violations.push(format!("initial state index {initial} is not declared"));
        }
        for (i, t) in transitions.iter().enumerate() {
            for (end, q) in [("from", t.from), ("to", t.to)] {
                if q >= states.len() {
                    violations.push(format!("transition {i}: {end} state index {q} is not declared"));
                }
            }
            for c in &t.input {
                if !input_alphabet.contains(c) {
                    violations.push(format!("transition {i}: input symbol {c:?} is not in the input alphabet"));
                }
            }
            for c in &t.output {
                if !output_alphabet.contains(c) {
                    violations.push(format!("transition {i}: output symbol {c:?} is not in the output alphabet"));
                }
            }
        }
        if !violations.is_empty() {
            return Err(ValidationError { violations });
        }
        let mut input_alphabet = input_alphabet;
        let mut output_alphabet = output_alphabet;
        input_alphabet.sort_unstable();
        output_alphabet.sort_unstable();
        let mut transitions = transitions;
        let mut seen = HashSet::new();
        transitions.retain(|t| seen.insert(t.clone()));
        let mut outgoing = vec![Vec::new(); states.len()];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.from].push(i);
        }
        let (names, priority) = states.into_iter().unzip();
        Ok(Transducer { input_alphabet, output_alphabet, names, priority, initial, transitions, outgoing })
    }

    pub fn input_alphabet(&self) -> &[char] {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &[char] {
        &self.output_alphabet
    }

    pub fn input_letter_index(&self, c: char) -> Option<usize> {
        self.input_alphabet.binary_search(&c).ok()
    }

    pub fn state_count(&self) -> usize {
        self.priority.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn priority(&self, q: StateId) -> Priority {
        self.priority[q]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, q: StateId) -> impl Iterator<Item = &Transition> {
        self.outgoing[q].iter().map(move |&i| &self.transitions[i])
    }

    /// Distinct state priorities, ascending.
    pub fn priority_set(&self) -> Vec<Priority> {
        let mut ps = self.priority.clone();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    pub fn is_normalized(&self) -> bool {
        self.transitions.iter().all(|t| t.input.len() <= 1)
    }

    /// Splits every transition reading several letters into a chain of one-letter
    /// transitions. The output word stays on the first link; intermediate states get
    /// the least priority of the transducer.
    pub fn normalize(&self) -> Transducer {
        if self.is_normalized() {
            return self.clone();
        }
        let low = *self.priority.iter().min().unwrap();
        let mut states: Vec<(String, Priority)> =
            self.names.iter().cloned().zip(self.priority.iter().copied()).collect();
        let taken: HashSet<String> = self.names.iter().cloned().collect();
        let mut transitions = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if t.input.len() <= 1 {
                transitions.push(t.clone());
                continue;
            }
            let mut prev = t.from;
            let last = t.input.len() - 1;
            for (j, &a) in t.input.iter().enumerate() {
                let next = if j == last {
                    t.to
                } else {
                    let mut name = format!("{}~{}.{}", self.names[t.from], i, j + 1);
                    while taken.contains(&name) {
                        name.push('\'');
                    }
                    states.push((name, low));
                    states.len() - 1
                };
                let output = if j == 0 { t.output.clone() } else { Vec::new() };
                transitions.push(Transition { from: prev, input: vec![a], output, to: next });
                prev = next;
            }
        }
        Transducer::new(
            self.input_alphabet.clone(),
            self.output_alphabet.clone(),
            states,
            self.initial,
            transitions,
        )
        .expect("normalization keeps a valid transducer valid")
    }

    /// States reachable from `q` through transitions reading no input, each paired
    /// with the largest priority met after leaving `q` (`None` for `q` itself).
    pub(crate) fn silent_closure(&self, q: StateId) -> Vec<(StateId, Option<Priority>)> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((q, None));
        queue.push_back((q, None));
        while let Some((p, m)) = queue.pop_front() {
            for t in self.outgoing(p).filter(|t| t.input.is_empty()) {
                let next = (t.to, m.max(Some(self.priority[t.to])));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Nondeterministic parity automaton for the domain: inputs with an accepting run that
    /// writes infinitely often. Output-only moves are folded into the next letter step,
    /// recording the largest priority they pass.
    pub fn project_input(&self) -> ParityAutomaton<char> {
        let t = self.with_infinite_output().normalize();
        let mut ids: HashMap<(StateId, Priority), StateId> = HashMap::new();
        let start = (t.initial, t.priority[t.initial]);
        ids.insert(start, 0);
        let mut a = ParityAutomaton::new(t.input_alphabet.clone(), vec![start.1], 0);
        let mut queue = VecDeque::from([start]);
        let mut closures: HashMap<StateId, Vec<(StateId, Option<Priority>)>> = HashMap::new();
        while let Some((q, m)) = queue.pop_front() {
            let from = ids[&(q, m)];
            let closure = closures.entry(q).or_insert_with(|| t.silent_closure(q)).clone();
            for (p, seen) in closure {
                for tr in t.outgoing(p).filter(|tr| tr.input.len() == 1) {
                    let target = (tr.to, seen.unwrap_or(0).max(t.priority[tr.to]));
                    let id = match ids.get(&target) {
                        Some(&id) => id,
                        None => {
                            let id = a.add_state(target.1);
                            ids.insert(target, id);
                            queue.push_back(target);
                            id
                        }
                    };
                    let letter = a.letter_index(&tr.input[0]).unwrap();
                    a.add_transition(from, letter, id);
                }
            }
        }
        a
    }

    /// An equivalent transducer whose accepting runs all write infinitely often. Returns a
    /// copy when no accepting run can stop writing.
    ///
    /// States remember the largest priority met since the last writing transition. Writing
    /// transitions enter states that carry that priority shifted up by 2; the other states
    /// carry 1, so runs that stop writing end up rejecting.
    pub fn with_infinite_output(&self) -> Transducer {
        if !self.has_silent_accepting_cycle() {
            return self.clone();
        }
        // None: entered by writing, with the emitted priority; Some(k): pending maximum k.
        type Key = (StateId, Option<Priority>, Priority);
        let key_priority = |k: &Key| k.2;
        let start: Key = (self.initial, Some(self.priority[self.initial]), 1);
        let mut ids: HashMap<Key, StateId> = HashMap::from([(start, 0)]);
        let mut keys = vec![start];
        let mut transitions = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let (q, pending, _) = keys[i];
            for t in self.outgoing(q) {
                let seen = pending.map_or(self.priority[t.to], |k| k.max(self.priority[t.to]));
                let target: Key = if t.output.is_empty() { (t.to, Some(seen), 1) } else { (t.to, None, seen + 2) };
                let to = *ids.entry(target).or_insert_with(|| {
                    keys.push(target);
                    keys.len() - 1
                });
                transitions.push(Transition { from: i, input: t.input.clone(), output: t.output.clone(), to });
            }
            i += 1;
        }
        let mut taken: HashSet<String> = self.names.iter().cloned().collect();
        let states = keys
            .iter()
            .map(|k| {
                let mut name = match k.1 {
                    Some(p) => format!("{}/{}", self.names[k.0], p),
                    None => format!("{}/w{}", self.names[k.0], k.2),
                };
                while taken.contains(&name) {
                    name.push('\'');
                }
                taken.insert(name.clone());
                (name, key_priority(k))
            })
            .collect();
        Transducer::new(self.input_alphabet.clone(), self.output_alphabet.clone(), states, 0, transitions)
            .expect("the product keeps a valid transducer valid")
    }

    /// Whether some accepting run reads infinitely many letters but writes only finitely many.
    pub fn has_silent_accepting_cycle(&self) -> bool {
        let mut all = PriorityGraph::new(self.priority.iter().copied());
        let mut silent = PriorityGraph::new(self.priority.iter().copied());
        for t in &self.transitions {
            all.add_edge(t.from, t.to, 0);
            if t.output.is_empty() {
                silent.add_edge(t.from, t.to, if t.input.is_empty() { 0 } else { READS_INPUT });
            }
        }
        let reach = all.reachable_from(self.initial);
        silent
            .cycle_nodes(READS_INPUT, 0)
            .iter()
            .zip(&reach)
            .any(|(c, r)| *c && *r)
    }

    /// Decides whether the pair of lassos belongs to the relation of the transducer.
    pub fn accepts_pair(
        &self,
        input: &Lasso<char>,
        output: &Lasso<char>,
        max_configurations: usize,
    ) -> Result<bool, AlignmentOverflow> {
        self.accepts_aligned(input, output, max_configurations)
    }

    /// Whether some output word starting with `prefix` is related to `input`.
    pub fn admits_output_prefix(
        &self,
        input: &Lasso<char>,
        prefix: &[char],
        max_configurations: usize,
    ) -> Result<bool, AlignmentOverflow> {
        self.accepts_aligned(input, &PrefixTape(prefix), max_configurations)
    }

    fn accepts_aligned(
        &self,
        input: &impl Tape,
        output: &impl Tape,
        max_configurations: usize,
    ) -> Result<bool, AlignmentOverflow> {
        type Config = (StateId, usize, usize);
        let mut ids: HashMap<Config, usize> = HashMap::new();
        let mut configs: Vec<Config> = Vec::new();
        let mut edges: Vec<(usize, usize, u8)> = Vec::new();
        let start = (self.initial, 0, 0);
        ids.insert(start, 0);
        configs.push(start);
        let mut next = 0;
        while next < configs.len() {
            let (q, i, o) = configs[next];
            let from = next;
            next += 1;
            'transitions: for t in self.outgoing(q) {
                let mut i2 = i;
                for &c in &t.input {
                    match input.read(i2, c) {
                        Some(n) => i2 = n,
                        None => continue 'transitions,
                    }
                }
                let mut o2 = o;
                for &c in &t.output {
                    match output.read(o2, c) {
                        Some(n) => o2 = n,
                        None => continue 'transitions,
                    }
                }
                let target = (t.to, i2, o2);
                let id = match ids.get(&target) {
                    Some(&id) => id,
                    None => {
                        if configs.len() >= max_configurations {
                            return Err(AlignmentOverflow { limit: max_configurations });
                        }
                        ids.insert(target, configs.len());
                        configs.push(target);
                        configs.len() - 1
                    }
                };
                let mut flags = 0;
                if !t.input.is_empty() {
                    flags |= READS_INPUT;
                }
                if !t.output.is_empty() {
                    flags |= WRITES_OUTPUT;
                }
                edges.push((from, id, flags));
            }
        }
        let mut g = PriorityGraph::new(configs.iter().map(|c| self.priority[c.0]));
        for (a, b, f) in edges {
            g.add_edge(a, b, f);
        }
        Ok(g.has_accepting_lasso(0, READS_INPUT | WRITES_OUTPUT))
    }
}

/// A word read position by position: `read` returns the next position if `c` may be read.
trait Tape {
    fn read(&self, pos: usize, c: char) -> Option<usize>;
}

impl Tape for Lasso<char> {
    fn read(&self, pos: usize, c: char) -> Option<usize> {
        (*self.letter_at_position(pos) == c).then(|| self.next_position(pos))
    }
}

/// All words starting with a fixed prefix.
struct PrefixTape<'a>(&'a [char]);

impl Tape for PrefixTape<'_> {
    fn read(&self, pos: usize, c: char) -> Option<usize> {
        match self.0.get(pos) {
            Some(&d) => (d == c).then_some(pos + 1),
            None => Some(pos),
        }
    }
}

/// Convenience builder used by fixtures and tests.
#[derive(Debug, Default)]
pub struct TransducerBuilder {
    input: Vec<char>,
    output: Vec<char>,
    states: Vec<(String, Priority)>,
    transitions: Vec<Transition>,
}

impl TransducerBuilder {
    pub fn new(input: &str, output: &str) -> Self {
        TransducerBuilder { input: input.chars().collect(), output: output.chars().collect(), ..Default::default() }
    }

    pub fn state(&mut self, name: &str, priority: Priority) -> StateId {
        self.states.push((name.to_string(), priority));
        self.states.len() - 1
    }

    pub fn transition(&mut self, from: StateId, input: &str, output: &str, to: StateId) -> &mut Self {
        self.transitions.push(Transition {
            from,
            input: input.chars().collect(),
            output: output.chars().collect(),
            to,
        });
        self
    }

    pub fn build(&self, initial: StateId) -> Result<Transducer, ValidationError> {
        Transducer::new(
            self.input.clone(),
            self.output.clone(),
            self.states.clone(),
            initial,
            self.transitions.clone(),
        )
    }
}

use std::collections::HashMap;

use super::{Executor, ExecutorState, StrategyAutomaton, SynthError};
use crate::game::{Arena, ArenaError};
use crate::lasso::Lasso;
use crate::transducer::{Transducer, Transition};
use crate::{Priority, StateId};

/// One-way deterministic transducer: on every input letter it moves to a unique state
/// and writes a finite word. Priorities are those of the domain automaton it tracks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dft {
    input_alphabet: Vec<char>,
    output_alphabet: Vec<char>,
    priority: Vec<Priority>,
    delta: Vec<Vec<(Vec<char>, StateId)>>,
}

impl Dft {
    pub fn state_count(&self) -> usize {
        self.priority.len()
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn priority(&self, q: StateId) -> Priority {
        self.priority[q]
    }

    pub fn step(&self, q: StateId, a: char) -> Option<&(Vec<char>, StateId)> {
        let l = self.input_alphabet.binary_search(&a).ok()?;
        Some(&self.delta[q][l])
    }

    /// Output on a lasso, or `None` when the output is finite.
    pub fn run(&self, input: &Lasso<char>) -> Option<Lasso<char>> {
        let mut q = self.initial();
        let mut pos = 0;
        let mut emitted = Vec::new();
        let mut seen: HashMap<(StateId, usize), usize> = HashMap::new();
        loop {
            if pos >= input.prefix().len() {
                if let Some(&at) = seen.get(&(q, pos)) {
                    if at == emitted.len() {
                        return None;
                    }
                    let period = emitted.split_off(at);
                    return Some(Lasso::new(emitted, period).unwrap());
                }
                seen.insert((q, pos), emitted.len());
            }
            let (out, next) = self.step(q, *input.letter_at_position(pos))?;
            emitted.extend_from_slice(out);
            q = *next;
            pos = input.next_position(pos);
        }
    }

    /// The same machine as a transducer, for writing it out as a transducer file.
    pub fn to_transducer(&self) -> Transducer {
        let states = (0..self.state_count()).map(|q| (format!("d{q}"), self.priority[q])).collect();
        let mut transitions = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (l, (out, next)) in row.iter().enumerate() {
                transitions.push(Transition {
                    from: q,
                    input: vec![self.input_alphabet[l]],
                    output: out.clone(),
                    to: *next,
                });
            }
        }
        Transducer::new(self.input_alphabet.clone(), self.output_alphabet.clone(), states, 0, transitions)
            .expect("a deterministic transducer built from a valid arena is valid")
    }
}

/// Reachable configurations of the streaming transformer over a bounded arena, each
/// keeping at most `ell + 1` committed and `ell` pending letters.
pub fn extract_1dft(arena: &Arena, strategy: &StrategyAutomaton, ell: usize, limit: usize) -> Result<Dft, SynthError> {
    let letters = arena.profiles().letters().to_vec();
    let start = Executor::new(arena, strategy).state().clone();
    let mut ids = HashMap::from([(start.clone(), 0usize)]);
    let mut states: Vec<ExecutorState> = vec![start];
    let mut delta = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut row = Vec::new();
        for &a in &letters {
            let mut exec = Executor::from_state(arena, strategy, states[i].clone());
            let out = exec.feed(a)?;
            let next = exec.state().clone();
            if next.pending.len() > ell || next.committed.len() > ell + 1 {
                return Err(SynthError::NotBoundedStrategy { ell });
            }
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= limit {
                        return Err(ArenaError::VertexBudgetExceeded { limit }.into());
                    }
                    ids.insert(next.clone(), states.len());
                    states.push(next);
                    states.len() - 1
                }
            };
            row.push((out, id));
        }
        delta.push(row);
        i += 1;
    }
    let priority = states
        .iter()
        .map(|s| arena.domain().priority(arena.vertex(s.vertex).domain_state))
        .collect();
    Ok(Dft {
        input_alphabet: letters,
        output_alphabet: arena.transducer().output_alphabet().to_vec(),
        priority,
        delta,
    })
}

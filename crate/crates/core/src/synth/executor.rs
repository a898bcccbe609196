use std::collections::{HashMap, HashSet};

use super::{action_of, choose_output, StrategyAutomaton, SynthError};
use crate::game::{Arena, GameAction, VertexId};
use crate::lasso::Lasso;
use crate::StateId;

pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// Configuration of the streaming transformer between two input letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExecutorState {
    pub memory: StateId,
    /// Adam's vertex waiting for the next letter.
    pub vertex: VertexId,
    /// Block Eve commits to at her next producing move.
    pub committed: Vec<char>,
    /// Letters read since the last producing move.
    pub pending: Vec<char>,
}

/// Streams input letters through the strategy, emitting output whenever Eve commits to a block.
#[derive(Debug, Clone)]
pub struct Executor<'a> {
    arena: &'a Arena,
    strategy: &'a StrategyAutomaton,
    state: ExecutorState,
}

impl<'a> Executor<'a> {
    pub fn new(arena: &'a Arena, strategy: &'a StrategyAutomaton) -> Self {
        let state = ExecutorState {
            memory: strategy.initial(),
            vertex: arena.initial(),
            committed: Vec::new(),
            pending: Vec::new(),
        };
        Executor { arena, strategy, state }
    }

    pub fn from_state(arena: &'a Arena, strategy: &'a StrategyAutomaton, state: ExecutorState) -> Self {
        Executor { arena, strategy, state }
    }

    pub fn state(&self) -> &ExecutorState {
        &self.state
    }

    /// Reads one letter and returns the output emitted in response (possibly empty).
    pub fn feed(&mut self, a: char) -> Result<Vec<char>, SynthError> {
        let s = &mut self.state;
        let adam = self
            .arena
            .after_letter(s.vertex, a)
            .unwrap_or_else(|| panic!("letter {a:?} is not in the input alphabet"));
        s.memory = self.strategy.update(s.memory, adam);
        let edge = self.strategy.next_action(s.memory, adam);
        let (action, next) = action_of(self.arena, adam, edge);
        s.memory = self.strategy.update(s.memory, next);
        s.vertex = next;
        if self.arena.vertex(next).forfeit {
            s.committed.clear();
            s.pending.clear();
            return Ok(Vec::new());
        }
        s.pending.push(a);
        match action {
            GameAction::Produce { from, to, max } => {
                let out = choose_output(self.arena.transducer(), from, to, max, &s.committed)?;
                s.committed = std::mem::take(&mut s.pending);
                Ok(out)
            }
            _ => Ok(Vec::new()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutorRun {
    pub output: Lasso<char>,
    /// Letters consumed until the configuration repeated.
    pub steps: usize,
}

/// Runs the transformer on a lasso until its configuration repeats at the same lasso position;
/// the output between the two occurrences is the output period.
///
/// Outside the domain the strategy is off its winning region and may buffer forever, so the
/// run stops at the first repeat of memory, vertex and position, whatever the buffers hold.
pub fn run_executor(
    arena: &Arena,
    strategy: &StrategyAutomaton,
    input: &Lasso<char>,
    max_steps: usize,
) -> Result<ExecutorRun, SynthError> {
    let in_domain = arena.domain().accepts(input);
    let mut exec = Executor::new(arena, strategy);
    let mut emitted: Vec<char> = Vec::new();
    let mut seen: HashMap<(ExecutorState, usize), (usize, usize)> = HashMap::new();
    let mut control: HashSet<(StateId, VertexId, usize)> = HashSet::new();
    let mut pos = 0;
    for step in 0..max_steps {
        if !in_domain && !control.insert((exec.state().memory, exec.state().vertex, pos)) {
            break;
        }
        if in_domain && pos >= input.prefix().len() {
            let key = (exec.state().clone(), pos);
            if let Some(&(_, at)) = seen.get(&key) {
                if emitted.len() == at {
                    return Err(SynthError::Stalled);
                }
                let period = emitted.split_off(at);
                let output = Lasso::new(emitted, period).expect("period is non-empty");
                return Ok(ExecutorRun { output, steps: step });
            }
            seen.insert(key, (step, emitted.len()));
        }
        let out = exec.feed(*input.letter_at_position(pos))?;
        emitted.extend(out);
        pos = input.next_position(pos);
    }
    if in_domain {
        Err(SynthError::PeriodNotFound { max_steps })
    } else {
        Err(SynthError::PartialOutput { emitted: emitted.into_iter().collect() })
    }
}

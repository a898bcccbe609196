use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use super::SynthError;
use crate::profile::RunMax;
use crate::transducer::{Transducer, Transition};
use crate::{Priority, StateId};

type Config = (StateId, usize, Priority);

/// Lexicographically least output of a run from `from` to `to` over `input` whose largest
/// priority is exactly `max`. Runs repeat no configuration (state, input position, largest
/// priority so far), which keeps the candidates finite.
pub fn choose_output(
    t: &Transducer,
    from: StateId,
    to: StateId,
    max: RunMax,
    input: &[char],
) -> Result<Vec<char>, SynthError> {
    debug_assert!(t.is_normalized());
    let no_witness = || SynthError::NoWitness { from, to, input: input.iter().collect() };
    let c = match max {
        RunMax::Empty if input.is_empty() && from == to => return Ok(Vec::new()),
        RunMax::Empty => return Err(no_witness()),
        RunMax::Seen(c) => c,
    };
    let start: Config = (from, 0, t.priority(from));
    if start.2 > c {
        return Err(no_witness());
    }
    // Forward exploration of configurations that never exceed the target priority.
    let mut succ: HashMap<Config, Vec<(&Transition, Config)>> = HashMap::new();
    let mut stack = vec![start];
    let mut seen = HashSet::from([start]);
    while let Some(cfg @ (q, pos, m)) = stack.pop() {
        let mut out = Vec::new();
        for tr in t.outgoing(q) {
            let pos2 = match tr.input.as_slice() {
                [] => pos,
                [a] if pos < input.len() && input[pos] == *a => pos + 1,
                _ => continue,
            };
            let m2 = m.max(t.priority(tr.to));
            if m2 > c {
                continue;
            }
            let next = (tr.to, pos2, m2);
            out.push((tr, next));
            if seen.insert(next) {
                stack.push(next);
            }
        }
        out.sort_by(|a, b| a.0.output.cmp(&b.0.output));
        succ.insert(cfg, out);
    }
    let goal: Config = (to, input.len(), c);
    if !seen.contains(&goal) {
        return Err(no_witness());
    }
    // Configurations that can still reach the goal.
    let mut live = HashSet::from([goal]);
    loop {
        let before = live.len();
        for (cfg, out) in &succ {
            if !live.contains(cfg) && out.iter().any(|(_, n)| live.contains(n)) {
                live.insert(*cfg);
            }
        }
        if live.len() == before {
            break;
        }
    }
    let mut search = Search { succ: &succ, live: &live, goal, best: None, on_path: HashSet::new() };
    let mut word = Vec::new();
    search.dfs(start, &mut word);
    search.best.ok_or_else(no_witness)
}

struct Search<'a> {
    succ: &'a HashMap<Config, Vec<(&'a Transition, Config)>>,
    live: &'a HashSet<Config>,
    goal: Config,
    best: Option<Vec<char>>,
    on_path: HashSet<Config>,
}

impl Search<'_> {
    // Whether every completion of `word` is larger than the best word found so far.
    fn beaten(&self, word: &[char]) -> bool {
        let Some(best) = &self.best else { return false };
        let k = word.len().min(best.len());
        match word[..k].cmp(&best[..k]) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => word.len() > best.len(),
        }
    }

    fn dfs(&mut self, cfg: Config, word: &mut Vec<char>) {
        if self.beaten(word) {
            return;
        }
        if cfg == self.goal && self.best.as_ref().is_none_or(|b| word.as_slice() < b.as_slice()) {
            self.best = Some(word.clone());
        }
        self.on_path.insert(cfg);
        for (tr, next) in &self.succ[&cfg] {
            if !self.live.contains(next) || self.on_path.contains(next) {
                continue;
            }
            let len = word.len();
            word.extend_from_slice(&tr.output);
            self.dfs(*next, word);
            word.truncate(len);
        }
        self.on_path.remove(&cfg);
    }
}

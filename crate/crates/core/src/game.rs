//! The delay game between Adam, who supplies input letters, and Eve, who commits to
//! state transformations of the transducer on blocks of input she has already seen.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automaton::Dpa;
use crate::parity::{ParityGame, Player};
use crate::profile::{ProfileAutomaton, ProfileError, ProfileId, RunMax};
use crate::transducer::Transducer;
use crate::{Priority, StateId};

pub type VertexId = usize;

pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("game exceeds {limit} vertices")]
    VertexBudgetExceeded { limit: usize },
    #[error("domain automaton reads {found:?} but the transducer reads {expected:?}")]
    AlphabetMismatch { expected: Vec<char>, found: Vec<char> },
}

impl From<ProfileError> for ArenaError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::BudgetExceeded { limit } => ArenaError::VertexBudgetExceeded { limit },
            ProfileError::NoTransformation { .. } => unreachable!("profile construction never asks for best"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Eve may delay for as long as she likes.
    Unbounded,
    /// Eve may delay only while the pending block has a profile with finitely many words.
    Bounded,
}

/// Colours observed by the winning condition at a vertex: the domain automaton priority and
/// the priority of the last committed transformation (`None` when the last move produced nothing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorPair {
    pub domain: Priority,
    pub transducer: Option<Priority>,
}

impl fmt::Display for ColorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.transducer {
            Some(t) => write!(f, "({}, {})", self.domain, t),
            None => write!(f, "({}, -1)", self.domain),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameVertex {
    /// Transducer state reached by the committed run.
    pub q: StateId,
    pub color: Option<Priority>,
    /// Profile of the block Eve can commit to next.
    pub first: ProfileId,
    /// Profile of the letters read since the last commitment.
    pub second: ProfileId,
    pub domain_state: StateId,
    pub turn: Player,
    /// Eve had no legal move (bounded mode only); from here on only the input matters.
    pub forfeit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameAction {
    Letter(char),
    Skip,
    /// Commit to a run of the transducer over the block with profile `first`.
    Produce { from: StateId, to: StateId, max: RunMax },
    Forfeit,
}

#[derive(Debug, Clone)]
pub struct Arena {
    transducer: Transducer,
    domain: Dpa<char>,
    profiles: ProfileAutomaton,
    mode: Mode,
    vertices: Vec<GameVertex>,
    edges: Vec<Vec<(GameAction, VertexId)>>,
    index: HashMap<GameVertex, VertexId>,
}

/// Builds the vertices reachable from the initial vertex. The transducer is first made to
/// reject runs that stop writing, then normalized.
pub fn build_arena(t: &Transducer, d: &Dpa<char>, mode: Mode, limit: usize) -> Result<Arena, ArenaError> {
    let t = t.with_infinite_output().normalize();
    if d.alphabet() != t.input_alphabet() {
        return Err(ArenaError::AlphabetMismatch {
            expected: t.input_alphabet().to_vec(),
            found: d.alphabet().to_vec(),
        });
    }
    let profiles = ProfileAutomaton::build(&t, limit)?;
    let mut arena = Arena {
        transducer: t,
        domain: d.clone(),
        profiles,
        mode,
        vertices: Vec::new(),
        edges: Vec::new(),
        index: HashMap::new(),
    };
    arena.explore(limit)?;
    Ok(arena)
}

impl Arena {
    fn explore(&mut self, limit: usize) -> Result<(), ArenaError> {
        let eps = self.profiles.initial();
        let start = GameVertex {
            q: self.transducer.initial(),
            color: None,
            first: eps,
            second: eps,
            domain_state: self.domain.initial(),
            turn: Player::Adam,
            forfeit: false,
        };
        self.index.insert(start, 0);
        self.vertices.push(start);
        let mut queue = VecDeque::from([0]);
        while let Some(id) = queue.pop_front() {
            let v = self.vertices[id];
            let mut out = Vec::new();
            for (action, w) in self.moves(&v) {
                let wid = match self.index.get(&w) {
                    Some(&wid) => wid,
                    None => {
                        if self.vertices.len() >= limit {
                            return Err(ArenaError::VertexBudgetExceeded { limit });
                        }
                        self.index.insert(w, self.vertices.len());
                        self.vertices.push(w);
                        queue.push_back(self.vertices.len() - 1);
                        self.vertices.len() - 1
                    }
                };
                out.push((action, wid));
            }
            if self.edges.len() <= id {
                self.edges.resize(id + 1, Vec::new());
            }
            self.edges[id] = out;
        }
        Ok(())
    }

    fn moves(&self, v: &GameVertex) -> Vec<(GameAction, GameVertex)> {
        let eps = self.profiles.initial();
        let mut out = Vec::new();
        match v.turn {
            Player::Adam => {
                for (l, &a) in self.profiles.letters().iter().enumerate() {
                    let next = GameVertex {
                        color: None,
                        second: if v.forfeit { eps } else { self.profiles.step(v.second, l) },
                        domain_state: self.domain.step(v.domain_state, l),
                        turn: Player::Eve,
                        ..*v
                    };
                    out.push((GameAction::Letter(a), next));
                }
            }
            Player::Eve if v.forfeit => {
                out.push((GameAction::Skip, GameVertex { turn: Player::Adam, ..*v }));
            }
            Player::Eve => {
                if self.mode == Mode::Unbounded || self.profiles.is_language_finite(v.second) {
                    out.push((GameAction::Skip, GameVertex { turn: Player::Adam, ..*v }));
                }
                for &(from, to, max) in self.profiles.profile(v.first).from_source(v.q) {
                    let color = max.priority().unwrap_or_else(|| self.transducer.priority(to));
                    let next = GameVertex {
                        q: to,
                        color: Some(color),
                        first: v.second,
                        second: eps,
                        domain_state: v.domain_state,
                        turn: Player::Adam,
                        forfeit: false,
                    };
                    out.push((GameAction::Produce { from, to, max }, next));
                }
                if out.is_empty() {
                    let next = GameVertex {
                        q: self.transducer.initial(),
                        color: None,
                        first: eps,
                        second: eps,
                        domain_state: v.domain_state,
                        turn: Player::Adam,
                        forfeit: true,
                    };
                    out.push((GameAction::Forfeit, next));
                }
            }
        }
        out
    }

    pub fn transducer(&self) -> &Transducer {
        &self.transducer
    }

    pub fn domain(&self) -> &Dpa<char> {
        &self.domain
    }

    pub fn profiles(&self) -> &ProfileAutomaton {
        &self.profiles
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn initial(&self) -> VertexId {
        0
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn vertex(&self, id: VertexId) -> &GameVertex {
        &self.vertices[id]
    }

    pub fn edges(&self, id: VertexId) -> &[(GameAction, VertexId)] {
        &self.edges[id]
    }

    pub fn vertex_id(&self, v: &GameVertex) -> Option<VertexId> {
        self.index.get(v).copied()
    }

    pub fn after_letter(&self, id: VertexId, a: char) -> Option<VertexId> {
        self.edges[id]
            .iter()
            .find(|(action, _)| *action == GameAction::Letter(a))
            .map(|&(_, w)| w)
    }

    pub fn colors(&self, id: VertexId) -> ColorPair {
        let v = &self.vertices[id];
        ColorPair { domain: self.domain.priority(v.domain_state), transducer: v.color }
    }

    /// Longest run of consecutive skips Eve can make outside forfeited plays,
    /// or `None` if she can skip forever.
    pub fn longest_skip_run(&self) -> Option<usize> {
        // Eve vertex -> Eve vertices reachable by one skip followed by one letter.
        let eve: Vec<VertexId> = (0..self.len())
            .filter(|&v| self.vertices[v].turn == Player::Eve && !self.vertices[v].forfeit)
            .collect();
        let mut next: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for &v in &eve {
            let mut succ = Vec::new();
            for &(action, u) in &self.edges[v] {
                if action == GameAction::Skip {
                    succ.extend(self.edges[u].iter().map(|&(_, w)| w));
                }
            }
            next.insert(v, succ);
        }
        // Longest path by depth-first search with cycle detection.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done(usize),
        }
        let mut mark: HashMap<VertexId, Mark> = eve.iter().map(|&v| (v, Mark::New)).collect();
        let mut best = 0;
        for &root in &eve {
            if mark[&root] != Mark::New {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            mark.insert(root, Mark::Open);
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                let succ = &next[&v];
                if *i < succ.len() {
                    let w = succ[*i];
                    *i += 1;
                    match mark[&w] {
                        Mark::Open => return None,
                        Mark::New => {
                            mark.insert(w, Mark::Open);
                            stack.push((w, 0));
                        }
                        Mark::Done(_) => {}
                    }
                } else {
                    let len = succ
                        .iter()
                        .map(|w| match mark[w] {
                            Mark::Done(l) => l + 1,
                            _ => unreachable!(),
                        })
                        .max()
                        .unwrap_or(0);
                    mark.insert(v, Mark::Done(len));
                    best = best.max(len);
                    stack.pop();
                }
            }
        }
        Some(best)
    }
}

/// Deterministic parity automaton over colour pairs accepting exactly the plays Eve wins:
/// the domain colour recurring maximally is odd, or the transducer colour recurring
/// maximally is even (`None` never counts as even).
///
/// The condition is a disjunction of Rabin pairs; an index appearance record turns it into parity.
pub fn build_win_automaton(domain_colors: &[Priority], transducer_colors: &[Priority]) -> Dpa<ColorPair> {
    let mut alphabet = Vec::new();
    for &d in domain_colors {
        alphabet.push(ColorPair { domain: d, transducer: None });
        for &t in transducer_colors {
            alphabet.push(ColorPair { domain: d, transducer: Some(t) });
        }
    }
    alphabet.sort();
    alphabet.dedup();
    // A pair is hit badly by a larger colour and well by its own colour.
    enum Pair {
        DomainOdd(Priority),
        TransducerEven(Priority),
    }
    let mut pairs: Vec<Pair> = Vec::new();
    let mut odd: Vec<Priority> = domain_colors.iter().copied().filter(|p| p % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    pairs.extend(odd.into_iter().map(Pair::DomainOdd));
    let mut even: Vec<Priority> = transducer_colors.iter().copied().filter(|p| p % 2 == 0).collect();
    even.sort_unstable();
    even.dedup();
    pairs.extend(even.into_iter().map(Pair::TransducerEven));
    let hits = |c: &ColorPair, pair: &Pair| -> (bool, bool) {
        match *pair {
            Pair::DomainOdd(o) => (c.domain > o, c.domain == o),
            Pair::TransducerEven(e) => (c.transducer.is_some_and(|t| t > e), c.transducer == Some(e)),
        }
    };
    type State = (Vec<usize>, Priority);
    let start: State = ((0..pairs.len()).collect(), 1);
    let mut ids = HashMap::from([(start.clone(), 0usize)]);
    let mut states = vec![start];
    let mut delta = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let order = states[i].0.clone();
        let mut row = Vec::new();
        for c in &alphabet {
            let mut priority = 1;
            let mut moved = Vec::new();
            let mut kept = Vec::new();
            for (pos, &idx) in order.iter().enumerate() {
                let pos = pos as Priority;
                let (bad, good) = hits(c, &pairs[idx]);
                if bad {
                    priority = priority.max(2 * pos + 3);
                    moved.push(idx);
                } else {
                    if good {
                        priority = priority.max(2 * pos + 2);
                    }
                    kept.push(idx);
                }
            }
            moved.sort_unstable();
            moved.extend(kept);
            let key = (moved, priority);
            let id = *ids.entry(key.clone()).or_insert_with(|| {
                states.push(key);
                states.len() - 1
            });
            row.push(id);
        }
        delta.push(row);
        i += 1;
    }
    let priority = states.iter().map(|s| s.1).collect();
    Dpa::new(alphabet, priority, 0, delta).reduce()
}

/// Product of the arena with the winning-condition automaton. Each product vertex pairs an
/// arena vertex with the automaton state reached after reading its colours.
#[derive(Debug, Clone)]
pub struct ProductGame {
    pub game: ParityGame,
    pub arena_vertex: Vec<VertexId>,
    pub memory: Vec<StateId>,
    /// For every product edge, the index of the arena edge it follows.
    pub arena_edge: Vec<Vec<usize>>,
}

pub fn compose_parity_game(arena: &Arena, w: &Dpa<ColorPair>, limit: usize) -> Result<ProductGame, ArenaError> {
    let letter: Vec<usize> = (0..arena.len())
        .map(|v| w.letter_index(&arena.colors(v)).expect("winning automaton covers every colour pair"))
        .collect();
    let start = (arena.initial(), w.step(w.initial(), letter[arena.initial()]));
    let mut ids = HashMap::from([(start, 0usize)]);
    let mut nodes = vec![start];
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut arena_edge: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (v, m) = nodes[i];
        let mut s = Vec::new();
        let mut e = Vec::new();
        for (k, &(_, u)) in arena.edges(v).iter().enumerate() {
            let key = (u, w.step(m, letter[u]));
            let id = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    if nodes.len() >= limit {
                        return Err(ArenaError::VertexBudgetExceeded { limit });
                    }
                    ids.insert(key, nodes.len());
                    nodes.push(key);
                    nodes.len() - 1
                }
            };
            s.push(id);
            e.push(k);
        }
        succ.push(s);
        arena_edge.push(e);
        i += 1;
    }
    let owner = nodes.iter().map(|&(v, _)| arena.vertex(v).turn).collect();
    let priority = nodes.iter().map(|&(_, m)| w.priority(m)).collect();
    let game = ParityGame::new(owner, priority, succ, 0).expect("arena vertices always have moves");
    Ok(ProductGame {
        game,
        arena_vertex: nodes.iter().map(|n| n.0).collect(),
        memory: nodes.iter().map(|n| n.1).collect(),
        arena_edge,
    })
}

/// Winning-condition automaton for the colours occurring in `arena`.
pub fn win_automaton_for(arena: &Arena) -> Dpa<ColorPair> {
    let domain = arena.domain().used_priorities();
    let transducer = arena.transducer().priority_set();
    build_win_automaton(&domain, &transducer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::Lasso;

    fn pair(d: Priority, t: i64) -> ColorPair {
        ColorPair { domain: d, transducer: if t < 0 { None } else { Some(t as Priority) } }
    }

    #[test]
    fn win_condition_examples() {
        let w = build_win_automaton(&[0, 1], &[0, 1, 2]);
        let check = |prefix: Vec<ColorPair>, period: Vec<ColorPair>| w.accepts(&Lasso::new(prefix, period).unwrap());
        // Domain rejects: Eve wins regardless of output.
        assert!(check(vec![], vec![pair(1, -1)]));
        // Domain accepts, output never produced: Adam wins.
        assert!(!check(vec![], vec![pair(0, -1)]));
        // Domain accepts and the committed run is accepting.
        assert!(check(vec![pair(1, 1)], vec![pair(0, -1), pair(0, 2), pair(0, 1)]));
        assert!(!check(vec![], vec![pair(0, 1), pair(0, -1)]));
    }
}

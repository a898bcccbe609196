//! Parity games with max-parity winning condition and Zielonka's recursive algorithm.

use std::collections::VecDeque;

use thiserror::Error;

use crate::Priority;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    /// Produces the output and wins plays whose largest recurring priority is even.
    Eve,
    /// Supplies the input.
    Adam,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }

    fn of_parity(p: Priority) -> Player {
        if p.is_multiple_of(2) {
            Player::Eve
        } else {
            Player::Adam
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("vertex {0} has no successor")]
    Deadlock(usize),
    #[error("edge {from} -> {to} leaves the game")]
    DanglingEdge { from: usize, to: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    owner: Vec<Player>,
    priority: Vec<Priority>,
    succ: Vec<Vec<usize>>,
    initial: usize,
}

/// Winner of every vertex and a positional strategy for each player on the region it wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<usize>>,
}

impl ParityGame {
    pub fn new(
        owner: Vec<Player>,
        priority: Vec<Priority>,
        succ: Vec<Vec<usize>>,
        initial: usize,
    ) -> Result<Self, GameError> {
        assert_eq!(owner.len(), priority.len());
        assert_eq!(owner.len(), succ.len());
        for (v, s) in succ.iter().enumerate() {
            if s.is_empty() {
                return Err(GameError::Deadlock(v));
            }
            if let Some(&to) = s.iter().find(|&&to| to >= owner.len()) {
                return Err(GameError::DanglingEdge { from: v, to });
            }
        }
        Ok(ParityGame { owner, priority, succ, initial })
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn priority(&self, v: usize) -> Priority {
        self.priority[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn solve(&self) -> Solution {
        let n = self.len();
        let mut pred = vec![Vec::new(); n];
        for (v, s) in self.succ.iter().enumerate() {
            for &w in s {
                pred[w].push(v);
            }
        }
        let mut solver = Zielonka {
            game: self,
            pred,
            winner: vec![Player::Eve; n],
            strategy: vec![None; n],
        };
        solver.solve(vec![true; n]);
        Solution { winner: solver.winner, strategy: solver.strategy }
    }
}

struct Zielonka<'a> {
    game: &'a ParityGame,
    pred: Vec<Vec<usize>>,
    winner: Vec<Player>,
    strategy: Vec<Option<usize>>,
}

impl Zielonka<'_> {
    /// Vertices of `sub` from which `player` forces a visit to `target`, recording the
    /// attracting move of each added vertex owned by `player`.
    fn attractor(&mut self, sub: &[bool], target: &[bool], player: Player) -> Vec<bool> {
        let g = self.game;
        let mut attr = target.to_vec();
        let mut remaining: Vec<Option<usize>> = vec![None; g.len()];
        let mut queue: VecDeque<usize> = (0..g.len()).filter(|&v| target[v]).collect();
        while let Some(u) = queue.pop_front() {
            for &v in &self.pred[u] {
                if !sub[v] || attr[v] {
                    continue;
                }
                if g.owner[v] == player {
                    attr[v] = true;
                    self.strategy[v] = Some(u);
                    queue.push_back(v);
                } else {
                    let left = remaining[v].get_or_insert_with(|| g.succ[v].iter().filter(|&&w| sub[w]).count());
                    *left -= 1;
                    if *left == 0 {
                        attr[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        attr
    }

    fn solve(&mut self, mut sub: Vec<bool>) {
        let g = self.game;
        loop {
            let Some(top) = (0..g.len()).filter(|&v| sub[v]).map(|v| g.priority[v]).max() else {
                return;
            };
            let p = Player::of_parity(top);
            let tops: Vec<bool> = (0..g.len()).map(|v| sub[v] && g.priority[v] == top).collect();
            let a = self.attractor(&sub, &tops, p);
            let rest: Vec<bool> = (0..g.len()).map(|v| sub[v] && !a[v]).collect();
            self.solve(rest.clone());
            let lost: Vec<bool> = (0..g.len()).map(|v| rest[v] && self.winner[v] != p).collect();
            if !lost.contains(&true) {
                for v in (0..g.len()).filter(|&v| a[v]) {
                    self.winner[v] = p;
                    if tops[v] && g.owner[v] == p {
                        self.strategy[v] = g.succ[v].iter().copied().find(|&w| sub[w]);
                    }
                }
                return;
            }
            let b = self.attractor(&sub, &lost, p.opponent());
            for v in (0..g.len()).filter(|&v| b[v]) {
                self.winner[v] = p.opponent();
                sub[v] = false;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Player::{Adam, Eve};

    #[test]
    fn self_loops_decide_by_parity() {
        let g = ParityGame::new(vec![Eve, Adam], vec![2, 1], vec![vec![0], vec![1]], 0).unwrap();
        let s = g.solve();
        assert_eq!(s.winner, vec![Eve, Adam]);
    }

    #[test]
    fn eve_picks_the_even_loop() {
        // 0 (Eve) chooses between 1 (odd loop) and 2 (even loop).
        let g = ParityGame::new(
            vec![Eve, Adam, Adam],
            vec![0, 3, 2],
            vec![vec![1, 2], vec![1], vec![2]],
            0,
        )
        .unwrap();
        let s = g.solve();
        assert_eq!(s.winner[0], Eve);
        assert_eq!(s.strategy[0], Some(2));
    }

    #[test]
    fn adam_escapes_when_he_owns_the_choice() {
        let g = ParityGame::new(
            vec![Adam, Adam, Adam],
            vec![0, 3, 2],
            vec![vec![1, 2], vec![1], vec![2]],
            0,
        )
        .unwrap();
        assert_eq!(g.solve().winner[0], Adam);
    }

    #[test]
    fn deadlocks_are_rejected() {
        assert_eq!(
            ParityGame::new(vec![Eve], vec![0], vec![vec![]], 0),
            Err(GameError::Deadlock(0))
        );
    }
}

//! Exhaustive small parity games and a brute-force solver over positional strategy pairs.

use streamsynth::parity::{ParityGame, Player, Solution};

/// Owners and successor sets (as bit masks) of a game without priorities.
#[derive(Debug, Clone)]
pub struct Structure {
    pub owner: Vec<Player>,
    pub succ: Vec<u8>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn map_mask(mask: u8, perm: &[usize]) -> u8 {
    (0..perm.len()).filter(|&v| mask & (1 << v) != 0).fold(0, |m, v| m | (1 << perm[v]))
}

/// One representative per isomorphism class of games on `n` vertices where every vertex has
/// one or two successors. Representatives list Eve's vertices first and have the
/// lexicographically least successor masks among owner-preserving relabelings.
pub fn canonical_structures(n: usize) -> Vec<Structure> {
    let masks: Vec<u8> = (1u8..(1 << n)).filter(|m| m.count_ones() <= 2).collect();
    let perms = permutations(n);
    let mut out = Vec::new();
    for eve in 0..=n {
        let owner: Vec<Player> = (0..n).map(|v| if v < eve { Player::Eve } else { Player::Adam }).collect();
        let keep: Vec<&Vec<usize>> = perms
            .iter()
            .filter(|p| (0..n).all(|v| (v < eve) == (p[v] < eve)))
            .filter(|p| p.iter().enumerate().any(|(i, &j)| i != j))
            .collect();
        let mut idx = vec![0usize; n];
        'all: loop {
            let succ: Vec<u8> = idx.iter().map(|&i| masks[i]).collect();
            let canonical = keep.iter().all(|p| {
                // Permuted vertex p[v] carries the relabelled successors of v.
                let mut inv = vec![0; n];
                for (v, &w) in p.iter().enumerate() {
                    inv[w] = v;
                }
                for w in 0..n {
                    let m = map_mask(succ[inv[w]], p);
                    if m != succ[w] {
                        return m > succ[w];
                    }
                }
                true
            });
            if canonical {
                out.push(Structure { owner: owner.clone(), succ });
            }
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < masks.len() {
                    continue 'all;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    out
}

/// Cycle masks of every positional strategy pair, precomputed once per structure.
pub struct BruteForce {
    n: usize,
    eve_choices: Vec<usize>,
    adam_choices: Vec<usize>,
    /// `cycles[(s * adam + t) * n + v]`: vertices on the cycle reached from `v`.
    cycles: Vec<u8>,
}

fn succ_list(mask: u8) -> Vec<usize> {
    (0..8).filter(|&v| mask & (1 << v) != 0).collect()
}

impl BruteForce {
    pub fn new(s: &Structure) -> Self {
        let n = s.owner.len();
        let choosers = |p: Player| -> Vec<usize> {
            (0..n).filter(|&v| s.owner[v] == p && s.succ[v].count_ones() == 2).collect()
        };
        let eve_choices = choosers(Player::Eve);
        let adam_choices = choosers(Player::Adam);
        let lists: Vec<Vec<usize>> = s.succ.iter().map(|&m| succ_list(m)).collect();
        let (ns, nt) = (1usize << eve_choices.len(), 1usize << adam_choices.len());
        let mut cycles = vec![0u8; ns * nt * n];
        for sigma in 0..ns {
            for tau in 0..nt {
                let mut next: Vec<usize> = lists.iter().map(|l| l[0]).collect();
                for (bit, &v) in eve_choices.iter().enumerate() {
                    next[v] = lists[v][(sigma >> bit) & 1];
                }
                for (bit, &v) in adam_choices.iter().enumerate() {
                    next[v] = lists[v][(tau >> bit) & 1];
                }
                for v in 0..n {
                    let mut seen = 0u8;
                    let mut u = v;
                    while seen & (1 << u) == 0 {
                        seen |= 1 << u;
                        u = next[u];
                    }
                    let mut cycle = 0u8;
                    let start = u;
                    loop {
                        cycle |= 1 << u;
                        u = next[u];
                        if u == start {
                            break;
                        }
                    }
                    cycles[(sigma * nt + tau) * n + v] = cycle;
                }
            }
        }
        BruteForce { n, eve_choices, adam_choices, cycles }
    }

    fn max_table(&self, priority: &[u32]) -> [u32; 256] {
        let mut t = [0u32; 256];
        for m in 1..(1usize << self.n) {
            let low = m.trailing_zeros() as usize;
            t[m] = t[m & (m - 1)].max(priority[low]);
        }
        t
    }

    /// Winner of every vertex: Eve wins `v` iff some strategy of hers beats every strategy of Adam.
    pub fn winners(&self, priority: &[u32]) -> Vec<Player> {
        let max = self.max_table(priority);
        let (ns, nt) = (1usize << self.eve_choices.len(), 1usize << self.adam_choices.len());
        (0..self.n)
            .map(|v| {
                let eve_wins = (0..ns).any(|s| (0..nt).all(|t| max[self.cycles[(s * nt + t) * self.n + v] as usize].is_multiple_of(2)));
                if eve_wins {
                    Player::Eve
                } else {
                    Player::Adam
                }
            })
            .collect()
    }

    /// Whether the positional strategies in `sol` win every vertex each player is said to win.
    pub fn strategies_win(&self, s: &Structure, priority: &[u32], sol: &Solution) -> bool {
        let max = self.max_table(priority);
        let (ns, nt) = (1usize << self.eve_choices.len(), 1usize << self.adam_choices.len());
        let index_of = |choices: &[usize], who: Player| -> Option<usize> {
            let mut idx = 0;
            for (bit, &v) in choices.iter().enumerate() {
                if sol.winner[v] != who {
                    continue;
                }
                let target = sol.strategy[v]?;
                let list = succ_list(s.succ[v]);
                let k = list.iter().position(|&w| w == target)?;
                idx |= k << bit;
            }
            Some(idx)
        };
        // Winning vertices without a choice still need a legal recorded move.
        for v in 0..self.n {
            if sol.winner[v] == s.owner[v] {
                match sol.strategy[v] {
                    Some(w) if s.succ[v] & (1 << w) != 0 => {}
                    _ => return false,
                }
            }
        }
        let (Some(sigma), Some(tau)) =
            (index_of(&self.eve_choices, Player::Eve), index_of(&self.adam_choices, Player::Adam))
        else {
            return false;
        };
        (0..self.n).all(|v| match sol.winner[v] {
            Player::Eve => (0..nt).all(|t| max[self.cycles[(sigma * nt + t) * self.n + v] as usize].is_multiple_of(2)),
            Player::Adam => (0..ns).all(|e| max[self.cycles[(e * nt + tau) * self.n + v] as usize] % 2 == 1),
        })
    }
}

pub fn to_game(s: &Structure, priority: &[u32]) -> ParityGame {
    ParityGame::new(s.owner.clone(), priority.to_vec(), s.succ.iter().map(|&m| succ_list(m)).collect(), 0).unwrap()
}

#[derive(Debug, Default)]
pub struct Exhaustive {
    pub structures: usize,
    pub games: usize,
    pub winner_disagreements: usize,
    pub strategy_failures: usize,
    pub first_failure: Option<String>,
}

/// Solves every game with `1..=max_n` vertices and priorities in `0..priorities`, comparing
/// winners and strategies with the brute force.
pub fn exhaustive(max_n: usize, priorities: u32) -> Exhaustive {
    let mut r = Exhaustive::default();
    for n in 1..=max_n {
        for s in canonical_structures(n) {
            r.structures += 1;
            let bf = BruteForce::new(&s);
            let total = priorities.pow(n as u32);
            let mut prio = vec![0u32; n];
            for code in 0..total {
                let mut c = code;
                for p in prio.iter_mut() {
                    *p = c % priorities;
                    c /= priorities;
                }
                r.games += 1;
                let sol = to_game(&s, &prio).solve();
                let expected = bf.winners(&prio);
                if sol.winner != expected {
                    r.winner_disagreements += 1;
                    r.first_failure.get_or_insert_with(|| format!("{s:?} {prio:?}: got {:?}, expected {expected:?}", sol.winner));
                } else if !bf.strategies_win(&s, &prio, &sol) {
                    r.strategy_failures += 1;
                    r.first_failure.get_or_insert_with(|| format!("{s:?} {prio:?}: strategy {:?} does not win", sol.strategy));
                }
            }
        }
    }
    r
}

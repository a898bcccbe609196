//! From a solved delay game to executable uniformizers.

mod classify;
mod dft;
mod executor;
mod output;
mod pcp;

use std::collections::HashMap;

use thiserror::Error;

use crate::automaton::Dpa;
use crate::determinize::{build_domain_automaton, is_domain_closed, DeterminizeError, DEFAULT_MAX_STATES};
use crate::game::{
    build_arena, compose_parity_game, win_automaton_for, Arena, ArenaError, ColorPair, GameAction, Mode,
    ProductGame, VertexId, DEFAULT_MAX_VERTICES,
};
use crate::parity::{Player, Solution};
use crate::transducer::{AlignmentOverflow, Transducer, DEFAULT_MAX_CONFIGURATIONS};
use crate::StateId;

pub use classify::{check_property_p, check_syntactic_class, PropertyViolation, SyntacticClass};
pub use dft::{extract_1dft, Dft};
pub use executor::{run_executor, Executor, ExecutorRun, ExecutorState, DEFAULT_MAX_STEPS};
pub use output::choose_output;
pub use pcp::{divergence_witness, pcp_to_spec, DivergenceWitness, PcpInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Determinize(#[from] DeterminizeError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Alignment(#[from] AlignmentOverflow),
    #[error("Eve does not win from the initial vertex")]
    NotWinning,
    #[error("strategy needs an input buffer longer than {ell}")]
    NotBoundedStrategy { ell: usize },
    #[error("no configuration repeated within {max_steps} steps")]
    PeriodNotFound { max_steps: usize },
    #[error("input is outside the domain; emitted {emitted:?} before stopping")]
    PartialOutput { emitted: String },
    #[error("executor stopped producing output on a domain input")]
    Stalled,
    #[error("no run from {from} to {to} over {input:?} has the committed priority")]
    NoWitness { from: StateId, to: StateId, input: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

/// Resource limits shared by the pipeline stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub max_states: usize,
    pub max_vertices: usize,
    pub max_configurations: usize,
    pub max_steps: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_states: DEFAULT_MAX_STATES,
            max_vertices: DEFAULT_MAX_VERTICES,
            max_configurations: DEFAULT_MAX_CONFIGURATIONS,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// Finite-memory strategy for Eve. The memory is the state of the winning-condition
/// automaton; it is updated with a vertex before the action at that vertex is chosen.
#[derive(Debug, Clone)]
pub struct StrategyAutomaton {
    initial: StateId,
    update: Vec<Vec<StateId>>,
    vertex_letter: Vec<usize>,
    choice: HashMap<(StateId, VertexId), usize>,
}

impl StrategyAutomaton {
    /// Memory after the initial vertex has been read.
    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn memory_size(&self) -> usize {
        self.update.len()
    }

    pub fn update(&self, m: StateId, v: VertexId) -> StateId {
        self.update[m][self.vertex_letter[v]]
    }

    /// Index of the arena edge Eve takes at `v` with memory `m`. Pairs that never occur
    /// in winning plays fall back to the first edge.
    pub fn next_action(&self, m: StateId, v: VertexId) -> usize {
        self.choice.get(&(m, v)).copied().unwrap_or(0)
    }

    /// Number of (memory, vertex) pairs with a recorded decision.
    pub fn decisions(&self) -> usize {
        self.choice.len()
    }

    /// Recorded decisions as (memory, vertex, edge index), sorted.
    pub fn choices(&self) -> Vec<(StateId, VertexId, usize)> {
        let mut out: Vec<_> = self.choice.iter().map(|(&(m, v), &e)| (m, v, e)).collect();
        out.sort_unstable();
        out
    }
}

pub fn make_strategy_automaton(
    arena: &Arena,
    w: &Dpa<ColorPair>,
    product: &ProductGame,
    solution: &Solution,
) -> Result<StrategyAutomaton, SynthError> {
    let g = &product.game;
    if solution.winner[g.initial()] != Player::Eve {
        return Err(SynthError::NotWinning);
    }
    let mut choice = HashMap::new();
    for pv in 0..g.len() {
        if g.owner(pv) != Player::Eve || solution.winner[pv] != Player::Eve {
            continue;
        }
        let target = solution.strategy[pv].expect("winning Eve vertices carry a strategy");
        let k = g.successors(pv).iter().position(|&s| s == target).unwrap();
        choice.insert((product.memory[pv], product.arena_vertex[pv]), product.arena_edge[pv][k]);
    }
    let update = (0..w.state_count())
        .map(|m| (0..w.alphabet().len()).map(|l| w.step(m, l)).collect())
        .collect();
    let vertex_letter = (0..arena.len()).map(|v| w.letter_index(&arena.colors(v)).unwrap()).collect();
    Ok(StrategyAutomaton { initial: product.memory[g.initial()], update, vertex_letter, choice })
}

/// Everything computed while deciding a relation.
#[derive(Debug, Clone)]
pub struct Solved {
    pub arena: Arena,
    pub win: Dpa<ColorPair>,
    pub product: ProductGame,
    pub solution: Solution,
    pub winner: Player,
    pub strategy: Option<StrategyAutomaton>,
}

impl Solved {
    pub fn domain(&self) -> &Dpa<char> {
        self.arena.domain()
    }
}

pub fn solve(t: &Transducer, mode: Mode, budgets: &Budgets) -> Result<Solved, SynthError> {
    let d = build_domain_automaton(t, budgets.max_states)?;
    solve_with_domain(t, &d, mode, budgets)
}

pub fn solve_with_domain(t: &Transducer, d: &Dpa<char>, mode: Mode, budgets: &Budgets) -> Result<Solved, SynthError> {
    let arena = build_arena(t, d, mode, budgets.max_vertices)?;
    let win = win_automaton_for(&arena);
    let product = compose_parity_game(&arena, &win, budgets.max_vertices)?;
    let solution = product.game.solve();
    let winner = solution.winner[product.game.initial()];
    let strategy = match winner {
        Player::Eve => Some(make_strategy_automaton(&arena, &win, &product, &solution)?),
        Player::Adam => None,
    };
    Ok(Solved { arena, win, product, solution, winner, strategy })
}

/// Summary of a full synthesis run.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub solved: Solved,
    pub class: SyntacticClass,
    pub domain_closed: bool,
    pub ell: usize,
    pub dft: Option<Dft>,
}

pub fn synthesize(t: &Transducer, mode: Mode, budgets: &Budgets) -> Result<Synthesis, SynthError> {
    let solved = solve(t, mode, budgets)?;
    let class = check_syntactic_class(t);
    let domain_closed = is_domain_closed(solved.domain());
    let ell = solved.arena.profiles().ell();
    let dft = match (&solved.strategy, mode) {
        (Some(s), Mode::Bounded) => Some(extract_1dft(&solved.arena, s, ell, budgets.max_vertices)?),
        _ => None,
    };
    Ok(Synthesis { solved, class, domain_closed, ell, dft })
}

pub(crate) fn action_of(arena: &Arena, v: VertexId, edge: usize) -> (GameAction, VertexId) {
    arena.edges(v)[edge]
}

/// The relation checked on a pair of lassos with the default configuration budget.
pub fn pair_lasso_acceptance(
    t: &Transducer,
    input: &crate::Lasso<char>,
    output: &crate::Lasso<char>,
) -> Result<bool, AlignmentOverflow> {
    t.accepts_pair(input, output, DEFAULT_MAX_CONFIGURATIONS)
}


//! Synthesis of streaming uniformizers for relations between infinite words that are
//! given by nondeterministic parity transducers.
//!
//! The pipeline: build the domain automaton, the profile automaton and the delay-game
//! arena; solve the resulting parity game; turn a winning strategy for the output
//! player into an executable streaming transformer and, in bounded mode, into a
//! deterministic one-way transducer.

pub mod automaton;
pub mod determinize;
pub mod fixtures;
pub mod format;
pub mod game;
mod graph;
pub mod lasso;
pub mod parity;
pub mod profile;
pub mod synth;
pub mod transducer;

pub type StateId = usize;
pub type Priority = u32;

pub use automaton::{Dpa, ParityAutomaton};
pub use lasso::{Lasso, LassoError};
pub use transducer::{Transducer, TransducerBuilder, Transition, ValidationError};

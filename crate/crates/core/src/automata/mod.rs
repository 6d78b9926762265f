//! Sample acceptors (prefix tree and reduced 3-valued DFA) and the complete
//! DFAs that make up a decomposition.

mod apta;
mod dfa;
pub mod dot;
mod three_dfa;

pub use apta::Apta;
pub use dfa::{Consistency, Decomposition, DecompositionDoc, Dfa, DfaDoc, TransitionDoc, ViolationKind};
pub use three_dfa::{reduce_to_3dfa, ThreeDfa, ThreeDfaDoc};

use thiserror::Error;

use crate::samples::{Letter, Word};

pub type StateId = usize;

/// Three-valued classification of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Accept,
    Reject,
    DontCare,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Accept => "accept",
            Label::Reject => "reject",
            Label::DontCare => "dont_care",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("transition table has {found} rows but {expected} states were declared")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("state {state} has no transition on letter {letter}")]
    Incomplete { state: StateId, letter: Letter },
    #[error("transition target {target} out of range ({num_states} states)")]
    TargetOutOfRange { target: StateId, num_states: usize },
    #[error("a DFA needs at least one state")]
    NoStates,
    #[error("decomposition must contain at least one DFA")]
    EmptyDecomposition,
    #[error("DFA {index} has {states} states; decomposition members need at least 2")]
    MemberTooSmall { index: usize, states: usize },
    #[error("state counts must be ascending, found {0:?}")]
    NotAscending(Vec<usize>),
    #[error("alphabet size mismatch: expected {expected}, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("duplicate transition from state {state} on `{letter}`")]
    DuplicateTransition { state: StateId, letter: String },
    #[error("3DFA invariant violated: {0}")]
    Invariant(String),
}

/// A partial deterministic acceptor over letter indices with three-valued
/// states. Missing transitions send a word to "don't care".
pub trait Acceptor {
    fn num_states(&self) -> usize;
    fn alphabet_size(&self) -> usize;
    fn initial(&self) -> StateId;
    fn successor(&self, state: StateId, letter: Letter) -> Option<StateId>;
    fn label(&self, state: StateId) -> Label;

    /// State reached on `word`, or `None` if the run leaves the acceptor.
    fn run(&self, word: &[Letter]) -> Option<StateId> {
        word.iter()
            .try_fold(self.initial(), |q, &a| self.successor(q, a))
    }

    fn classify(&self, word: &Word) -> Label {
        self.run(word).map_or(Label::DontCare, |q| self.label(q))
    }

    /// Letters with an outgoing transition from `state`.
    fn outgoing(&self, state: StateId) -> Vec<(Letter, StateId)> {
        (0..self.alphabet_size())
            .filter_map(|a| self.successor(state, a).map(|t| (a, t)))
            .collect()
    }

    fn states_with(&self, label: Label) -> Vec<StateId> {
        (0..self.num_states())
            .filter(|&q| self.label(q) == label)
            .collect()
    }
}

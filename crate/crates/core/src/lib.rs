//! Identification of DFA decompositions from labeled words.
//!
//! Samples are folded into a prefix tree, reduced to a three-valued DFA, and
//! the existence of a decomposition with a given states allocation is
//! decided by SAT. [`search`] drives the encodings to find states-optimal
//! decompositions or Pareto frontiers.

pub mod automata;
pub mod bench;
pub mod encoding;
pub mod samples;
pub mod sat;
pub mod search;

pub use automata::{reduce_to_3dfa, Apta, Decomposition, Dfa, ThreeDfa};
pub use samples::{parse_samples, LabeledSamples, SampleFormat};
pub use search::{solve_pareto, solve_states_optimal, SearchConfig, StatesAllocation};

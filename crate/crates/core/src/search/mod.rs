//! States allocations, the two orders on them, and identification of
//! decompositions by repeated SAT calls.

mod identify;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::encoding::EncodingError;
use crate::sat::SolverError;

pub use identify::{
    degenerate_decomposition, solve_allocation, solve_pareto, solve_states_optimal, termination_bound, Attempt,
    AttemptStatus, ParetoFrontier, Problem, SearchConfig, StatesOptimal,
};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("allocations have different lengths ({left} and {right})")]
    ArityMismatch { left: usize, right: usize },
    #[error("invalid bound: total {total} is below the minimum part {min_part}")]
    InvalidBound { total: usize, min_part: usize },
    #[error("invalid allocation {parts:?}: {reason}")]
    InvalidAllocation { parts: Vec<usize>, reason: String },
    #[error("the number of DFAs must be at least 1")]
    NoDfas,
    #[error("solver gave up on allocation {allocation}: {reason}")]
    SolverUnknown { allocation: StatesAllocation, reason: String },
    #[error("total {total} exceeds the termination bound {bound}")]
    BoundExceeded { total: usize, bound: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Ascending tuple of DFA sizes, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StatesAllocation(Vec<usize>);

impl StatesAllocation {
    pub fn new(parts: Vec<usize>) -> Result<Self, SearchError> {
        let invalid = |reason: &str| SearchError::InvalidAllocation {
            parts: parts.clone(),
            reason: reason.into(),
        };
        if parts.is_empty() {
            return Err(invalid("empty"));
        }
        if parts.iter().any(|&m| m < 2) {
            return Err(invalid("every part must be at least 2"));
        }
        if parts.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("parts must be ascending"));
        }
        Ok(StatesAllocation(parts))
    }

    /// `n` DFAs of two states each.
    pub fn smallest(n: usize) -> Self {
        assert!(n > 0);
        StatesAllocation(vec![2; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }

    /// Allocations with one part grown by one that are still ascending.
    pub fn successors(&self) -> Vec<StatesAllocation> {
        (0..self.0.len())
            .filter(|&i| i + 1 == self.0.len() || self.0[i] < self.0[i + 1])
            .map(|i| {
                let mut p = self.0.clone();
                p[i] += 1;
                StatesAllocation(p)
            })
            .collect()
    }
}

impl fmt::Display for StatesAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Shannon entropy (base 2) of the part sizes normalized by the total.
pub fn entropy(a: &StatesAllocation) -> f64 {
    let total = a.total() as f64;
    // p * log2(1/p) keeps a single part at +0.0
    a.0.iter()
        .map(|&m| {
            let p = m as f64 / total;
            p * (total.log2() - (m as f64).log2())
        })
        .sum()
}

/// `prod m^m` over the parts, if it fits.
fn self_power_product(a: &StatesAllocation) -> Option<u128> {
    a.0.iter().try_fold(1u128, |acc, &m| {
        let pow = (m as u128).checked_pow(u32::try_from(m).ok()?)?;
        acc.checked_mul(pow)
    })
}

/// Compares entropies. Equal totals are compared exactly when the integers
/// involved fit; otherwise floats within 1e-12 count as equal.
pub fn compare_entropy(a: &StatesAllocation, b: &StatesAllocation) -> Ordering {
    if a.total() == b.total() {
        if let (Some(pa), Some(pb)) = (self_power_product(a), self_power_product(b)) {
            // larger product means lower entropy
            return pb.cmp(&pa);
        }
    }
    let (ea, eb) = (entropy(a), entropy(b));
    if (ea - eb).abs() <= 1e-12 {
        Ordering::Equal
    } else {
        ea.partial_cmp(&eb).unwrap()
    }
}

/// `a` strictly improves on `b` componentwise.
pub fn pareto_dominates(a: &StatesAllocation, b: &StatesAllocation) -> Result<bool, SearchError> {
    if a.len() != b.len() {
        return Err(SearchError::ArityMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let le = a.0.iter().zip(&b.0).all(|(x, y)| x <= y);
    Ok(le && a.0 != b.0)
}

/// Fewer states in total, or as many with at least the same entropy.
pub fn states_optimal_less(a: &StatesAllocation, b: &StatesAllocation) -> bool {
    match a.total().cmp(&b.total()) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => compare_entropy(a, b) != Ordering::Less,
    }
}

fn partitions(total: usize, min_part: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![total]];
    let mut m = min_part;
    while m <= total - m {
        for mut rest in partitions(total - m, m) {
            rest.insert(0, m);
            out.push(rest);
        }
        m += 1;
    }
    out
}

/// All ascending allocations of `total` states with parts of at least
/// `min_part`, by entropy descending, ties broken lexicographically.
pub fn compute_states_allocations(total: usize, min_part: usize) -> Result<Vec<StatesAllocation>, SearchError> {
    if total < min_part || min_part < 2 {
        return Err(SearchError::InvalidBound { total, min_part });
    }
    let mut all: Vec<StatesAllocation> = partitions(total, min_part).into_iter().map(StatesAllocation).collect();
    all.sort_by(|a, b| compare_entropy(b, a).then_with(|| a.cmp(b)));
    Ok(all)
}

use std::collections::{HashSet, VecDeque};
use std::thread;

use super::{compute_states_allocations, pareto_dominates, SearchError, StatesAllocation};
use crate::automata::{reduce_to_3dfa, Apta, Consistency, Decomposition, Dfa, ThreeDfa};
use crate::encoding::{decode, encode_3dfa, encode_apta_legacy, EncodingKind};
use crate::samples::LabeledSamples;
use crate::sat::{solve, SatStatus, SolverConfig};

/// Samples together with both acceptors built from them.
#[derive(Debug, Clone)]
pub struct Problem {
    samples: LabeledSamples,
    apta: Apta,
    three_dfa: ThreeDfa,
}

impl Problem {
    pub fn new(samples: LabeledSamples) -> Problem {
        let apta = Apta::build(&samples);
        let three_dfa = reduce_to_3dfa(&apta);
        Problem {
            samples,
            apta,
            three_dfa,
        }
    }

    pub fn samples(&self) -> &LabeledSamples {
        &self.samples
    }

    pub fn apta(&self) -> &Apta {
        &self.apta
    }

    pub fn three_dfa(&self) -> &ThreeDfa {
        &self.three_dfa
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub solver: SolverConfig,
    pub encoder: EncodingKind,
    pub symmetry: bool,
    /// Allocations of one round solved concurrently (states-optimal only).
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            solver: SolverConfig::builtin(),
            encoder: EncodingKind::ThreeDfa,
            symmetry: true,
            jobs: 1,
        }
    }
}

impl SearchConfig {
    pub fn with_encoder(mut self, encoder: EncodingKind) -> Self {
        self.encoder = encoder;
        self
    }

    pub fn with_symmetry(mut self, symmetry: bool) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttemptStatus {
    Sat,
    Unsat,
    Unknown(String),
    /// Dominated by a frontier entry and never encoded.
    Skipped,
}

impl AttemptStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttemptStatus::Sat => "sat",
            AttemptStatus::Unsat => "unsat",
            AttemptStatus::Unknown(_) => "unknown",
            AttemptStatus::Skipped => "skipped",
        }
    }
}

/// One allocation handed to the solver (or skipped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attempt {
    pub allocation: StatesAllocation,
    pub encoder: EncodingKind,
    pub status: AttemptStatus,
    pub num_vars: u32,
    pub num_clauses: usize,
    pub solve_time_ms: u128,
}

/// Encodes, solves, decodes and verifies. A satisfiable answer always comes
/// with a decomposition consistent with the samples.
pub fn solve_allocation(
    problem: &Problem,
    allocation: &StatesAllocation,
    cfg: &SearchConfig,
) -> Result<(Attempt, Option<Decomposition>), SearchError> {
    let instance = match cfg.encoder {
        EncodingKind::ThreeDfa => encode_3dfa(&problem.three_dfa, allocation.parts(), cfg.symmetry)?,
        EncodingKind::AptaLegacy => encode_apta_legacy(&problem.apta, allocation.parts(), cfg.symmetry)?,
    };
    let result = solve(&instance.cnf, &cfg.solver)?;
    let mut attempt = Attempt {
        allocation: allocation.clone(),
        encoder: cfg.encoder,
        status: AttemptStatus::Unsat,
        num_vars: instance.num_vars(),
        num_clauses: instance.num_clauses(),
        solve_time_ms: result.stats.solve_time_ms,
    };
    match result.status {
        SatStatus::Unsat => Ok((attempt, None)),
        SatStatus::Unknown { reason } => {
            attempt.status = AttemptStatus::Unknown(reason);
            Ok((attempt, None))
        }
        SatStatus::Sat => {
            let model = result
                .assignment
                .ok_or_else(|| SearchError::InternalInconsistency("sat answer without a model".into()))?;
            let decomposition = decode(&instance, &model)?;
            if let Consistency::Violation { word, kind } = decomposition.verify(&problem.samples) {
                return Err(SearchError::InternalInconsistency(format!(
                    "decoded decomposition for {allocation} fails on {} ({})",
                    problem.samples.alphabet().display_word(&word),
                    kind.as_str()
                )));
            }
            attempt.status = AttemptStatus::Sat;
            Ok((attempt, Some(decomposition)))
        }
    }
}

/// `2 + sum over negatives u of (|u| + 2)`: the size of
/// [`degenerate_decomposition`], so identification never needs more states.
pub fn termination_bound(samples: &LabeledSamples) -> usize {
    2 + samples.negatives().map(|u| u.len() + 2).sum::<usize>()
}

/// A trivially consistent decomposition: an all-accepting 2-state DFA and one
/// DFA per negative word that rejects exactly that word.
pub fn degenerate_decomposition(samples: &LabeledSamples) -> Decomposition {
    let sigma = samples.alphabet().len();
    let mut dfas = vec![Dfa::universal(2, sigma)];
    dfas.extend(samples.negatives().map(|u| Dfa::rejecting_only(u, sigma)));
    Decomposition::sorted(dfas).expect("members are complete and share the alphabet")
}

#[derive(Debug, Clone)]
pub struct StatesOptimal {
    pub decomposition: Decomposition,
    pub allocation: StatesAllocation,
    pub attempts: Vec<Attempt>,
}

impl StatesOptimal {
    pub fn total(&self) -> usize {
        self.allocation.total()
    }
}

/// Tries totals 2, 3, ... and, within a total, allocations by decreasing
/// entropy; returns the first satisfiable one. `max_dfas` drops allocations
/// with more parts.
pub fn solve_states_optimal(
    samples: &LabeledSamples,
    cfg: &SearchConfig,
    max_dfas: Option<usize>,
) -> Result<StatesOptimal, SearchError> {
    if max_dfas == Some(0) {
        return Err(SearchError::NoDfas);
    }
    let problem = Problem::new(samples.clone());
    let bound = termination_bound(samples);
    let mut attempts = Vec::new();
    let mut total = 2;
    loop {
        if total > bound {
            return Err(SearchError::BoundExceeded { total, bound });
        }
        let round: Vec<StatesAllocation> = compute_states_allocations(total, 2)?
            .into_iter()
            .filter(|a| max_dfas.is_none_or(|n| a.len() <= n))
            .collect();
        for window in round.chunks(cfg.jobs.max(1)) {
            let results: Vec<Result<(Attempt, Option<Decomposition>), SearchError>> = if window.len() == 1 {
                vec![solve_allocation(&problem, &window[0], cfg)]
            } else {
                thread::scope(|s| {
                    let handles: Vec<_> = window
                        .iter()
                        .map(|a| s.spawn(|| solve_allocation(&problem, a, cfg)))
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("solver thread panicked"))
                        .collect()
                })
            };
            for result in results {
                let (attempt, decomposition) = result?;
                let status = attempt.status.clone();
                let allocation = attempt.allocation.clone();
                attempts.push(attempt);
                match (status, decomposition) {
                    (AttemptStatus::Sat, Some(decomposition)) => {
                        return Ok(StatesOptimal {
                            decomposition,
                            allocation,
                            attempts,
                        })
                    }
                    (AttemptStatus::Unknown(reason), _) => {
                        return Err(SearchError::SolverUnknown { allocation, reason })
                    }
                    _ => {}
                }
            }
        }
        total += 1;
    }
}

#[derive(Debug, Clone)]
pub struct ParetoFrontier {
    pub entries: Vec<(StatesAllocation, Decomposition)>,
    pub attempts: Vec<Attempt>,
}

impl ParetoFrontier {
    pub fn allocations(&self) -> Vec<StatesAllocation> {
        self.entries.iter().map(|(a, _)| a.clone()).collect()
    }
}

/// Breadth-first search from `(2, ..., 2)`: unsatisfiable allocations spawn
/// their ascending one-step successors, satisfiable ones join the frontier,
/// and allocations dominated by the frontier are skipped.
pub fn solve_pareto(samples: &LabeledSamples, n: usize, cfg: &SearchConfig) -> Result<ParetoFrontier, SearchError> {
    if n == 0 {
        return Err(SearchError::NoDfas);
    }
    let problem = Problem::new(samples.clone());
    let start = StatesAllocation::smallest(n);
    let mut queue = VecDeque::from([start.clone()]);
    let mut visited = HashSet::from([start]);
    let mut entries: Vec<(StatesAllocation, Decomposition)> = Vec::new();
    let mut attempts = Vec::new();
    while let Some(a) = queue.pop_front() {
        let mut dominated = false;
        for (b, _) in &entries {
            if pareto_dominates(b, &a)? {
                dominated = true;
                break;
            }
        }
        if dominated {
            attempts.push(Attempt {
                allocation: a,
                encoder: cfg.encoder,
                status: AttemptStatus::Skipped,
                num_vars: 0,
                num_clauses: 0,
                solve_time_ms: 0,
            });
            continue;
        }
        let (attempt, decomposition) = solve_allocation(&problem, &a, cfg)?;
        let status = attempt.status.clone();
        attempts.push(attempt);
        match status {
            AttemptStatus::Sat => {
                let d = decomposition.expect("sat attempts carry a decomposition");
                entries.push((a, d));
            }
            AttemptStatus::Unsat => {
                for next in a.successors() {
                    if visited.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
            AttemptStatus::Unknown(reason) => return Err(SearchError::SolverUnknown { allocation: a, reason }),
            AttemptStatus::Skipped => unreachable!(),
        }
    }
    Ok(ParetoFrontier { entries, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{parse_samples, SampleFormat};

    fn samples(text: &str) -> LabeledSamples {
        parse_samples(text, SampleFormat::Lines).unwrap()
    }

    const FIXTURE: &str = "+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n";

    fn alloc(p: &[usize]) -> StatesAllocation {
        StatesAllocation::new(p.to_vec()).unwrap()
    }

    #[test]
    fn fixture_allocations() {
        let problem = Problem::new(samples(FIXTURE));
        let cfg = SearchConfig::default();
        let (a, d) = solve_allocation(&problem, &alloc(&[2]), &cfg).unwrap();
        assert_eq!(a.status, AttemptStatus::Unsat);
        assert!(d.is_none());
        let (a, d) = solve_allocation(&problem, &alloc(&[3]), &cfg).unwrap();
        assert_eq!(a.status, AttemptStatus::Sat);
        assert!(d.unwrap().verify(problem.samples()).is_consistent());
        let legacy = cfg.clone().with_encoder(EncodingKind::AptaLegacy);
        let (a, _) = solve_allocation(&problem, &alloc(&[2, 2]), &legacy).unwrap();
        assert_eq!(a.status, AttemptStatus::Sat);
    }

    #[test]
    fn states_optimal_on_fixture() {
        let s = samples(FIXTURE);
        for jobs in [1, 4] {
            let r = solve_states_optimal(&s, &SearchConfig::default().with_jobs(jobs), None).unwrap();
            assert_eq!(r.allocation, alloc(&[3]));
            assert_eq!(r.total(), 3);
            assert!(r.decomposition.verify(&s).is_consistent());
        }
    }

    #[test]
    fn states_optimal_trivial_cases() {
        let r = solve_states_optimal(&samples("+\n"), &SearchConfig::default(), None).unwrap();
        assert_eq!(r.allocation, alloc(&[2]));
        let r = solve_states_optimal(&samples("+ a\n- b\n"), &SearchConfig::default(), None).unwrap();
        assert_eq!(r.allocation, alloc(&[2]));
        assert!(matches!(
            solve_states_optimal(&samples("+ a\n"), &SearchConfig::default(), Some(0)),
            Err(SearchError::NoDfas)
        ));
    }

    #[test]
    fn pareto_on_fixture() {
        let s = samples(FIXTURE);
        for encoder in [EncodingKind::ThreeDfa, EncodingKind::AptaLegacy] {
            let cfg = SearchConfig::default().with_encoder(encoder);
            let two = solve_pareto(&s, 2, &cfg).unwrap();
            assert_eq!(two.allocations(), vec![alloc(&[2, 2])]);
            assert!(two.entries[0].1.verify(&s).is_consistent());
            let one = solve_pareto(&s, 1, &cfg).unwrap();
            assert_eq!(one.allocations(), vec![alloc(&[3])]);
        }
        let trivial = solve_pareto(&samples("+\n"), 2, &SearchConfig::default()).unwrap();
        assert_eq!(trivial.allocations(), vec![alloc(&[2, 2])]);
        assert!(matches!(
            solve_pareto(&s, 0, &SearchConfig::default()),
            Err(SearchError::NoDfas)
        ));
    }

    #[test]
    fn degenerate_witness() {
        let s = samples(FIXTURE);
        let d = degenerate_decomposition(&s);
        assert!(d.verify(&s).is_consistent());
        assert_eq!(d.allocation().iter().sum::<usize>(), termination_bound(&s));
        assert_eq!(termination_bound(&s), 2 + 3 + 5);
    }
}

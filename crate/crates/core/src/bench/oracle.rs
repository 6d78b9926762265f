//! Exhaustive reference answers for tiny instances, independent of the SAT
//! encodings.

use std::collections::HashMap;

use super::BenchError;
use crate::automata::Dfa;
use crate::samples::{LabeledSamples, Letter};
use crate::search::StatesAllocation;

/// Largest `m^(m|Σ|) * 2^m` that [`oracle_exists_dfa`] will enumerate.
pub const ORACLE_GUARD: f64 = 1e7;

/// Search tree nodes allowed per DFA size in [`DecompositionOracle`].
const NODE_BUDGET: u64 = 50_000_000;

/// Runs of all sample words under transition table `delta` (row-major by
/// state, then letter) starting in state 0.
fn end_state(delta: &[usize], sigma: usize, word: &[Letter]) -> usize {
    word.iter().fold(0, |q, &a| delta[q * sigma + a])
}

/// Enumerates every complete DFA with `m` states and initial state 0.
/// Accepting sets are the outer binary counter; transitions vary fastest in
/// (state, letter) order. Returns the first DFA consistent with `samples`.
pub fn oracle_exists_dfa(samples: &LabeledSamples, m: usize) -> Result<Option<Dfa>, BenchError> {
    let sigma = samples.alphabet().len();
    let space = (m as f64).powf((m * sigma) as f64) * 2f64.powi(m as i32);
    if m == 0 || space > ORACLE_GUARD {
        return Err(BenchError::SearchSpaceTooLarge(format!(
            "{m}-state DFAs over {sigma} letters: {space:.3e} candidates"
        )));
    }
    let positives: Vec<&[Letter]> = samples.positives().map(|w| w.symbols()).collect();
    let negatives: Vec<&[Letter]> = samples.negatives().map(|w| w.symbols()).collect();
    let cells = m * sigma;
    let mut delta = vec![0usize; cells];
    // For a fixed transition function the smallest admissible accepting set
    // is exactly the set of positive end states, so the first witness in
    // enumeration order minimizes (that set, transition index).
    let mut best: Option<(u64, Vec<usize>)> = None;
    loop {
        let mut mask = 0u64;
        for w in &positives {
            mask |= 1 << end_state(&delta, sigma, w);
        }
        let clean = negatives
            .iter()
            .all(|w| mask & (1 << end_state(&delta, sigma, w)) == 0);
        if clean && best.as_ref().is_none_or(|(b, _)| mask < *b) {
            best = Some((mask, delta.clone()));
            if mask == 0 {
                break;
            }
        }
        // advance the counter, digit 0 fastest
        let mut i = 0;
        while i < cells {
            delta[i] += 1;
            if delta[i] < m {
                break;
            }
            delta[i] = 0;
            i += 1;
        }
        if i == cells {
            break;
        }
    }
    Ok(best.map(|(mask, delta)| {
        let rows = delta.chunks(sigma).map(|r| r.to_vec()).collect();
        let accepting = (0..m).map(|q| mask >> q & 1 == 1).collect();
        Dfa::new(rows, accepting).expect("enumerated DFA is complete")
    }))
}

/// Caches, per DFA size, the inclusion-minimal sets of negative words that
/// an `m`-state DFA accepting every positive word must also accept.
///
/// Only transitions exercised by the sample words are enumerated, with
/// fresh states introduced in order of first use; all other transitions
/// and states cannot influence the outcome.
pub struct DecompositionOracle {
    sigma: usize,
    positives: Vec<Vec<Letter>>,
    negatives: Vec<Vec<Letter>>,
    minimal: HashMap<usize, Vec<u64>>,
}

struct Walk<'a> {
    oracle: &'a DecompositionOracle,
    m: usize,
    delta: Vec<Option<usize>>,
    masks: Vec<u64>,
    nodes: u64,
    words: Vec<&'a [Letter]>,
}

impl Walk<'_> {
    /// First undefined transition met by any run, or `None` when every run
    /// is complete.
    fn frontier(&self) -> Option<usize> {
        let sigma = self.oracle.sigma;
        for w in &self.words {
            let mut q = 0;
            for &a in w.iter() {
                match self.delta[q * sigma + a] {
                    Some(t) => q = t,
                    None => return Some(q * sigma + a),
                }
            }
        }
        None
    }

    fn end(&self, w: &[Letter]) -> usize {
        let sigma = self.oracle.sigma;
        w.iter()
            .fold(0, |q, &a| self.delta[q * sigma + a].expect("complete run"))
    }

    fn record(&mut self) {
        let mut accepting = 0u64;
        for w in &self.oracle.positives {
            accepting |= 1 << self.end(w);
        }
        let mut mask = 0u64;
        for (idx, w) in self.oracle.negatives.iter().enumerate() {
            if accepting >> self.end(w) & 1 == 1 {
                mask |= 1 << idx;
            }
        }
        if self.masks.iter().any(|&old| (old & !mask) == 0) {
            return;
        }
        self.masks.retain(|&old| old & mask != mask);
        self.masks.push(mask);
    }

    fn explore(&mut self, used: usize) -> Result<(), BenchError> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(BenchError::SearchSpaceTooLarge(format!(
                "more than {NODE_BUDGET} partial {}-state DFAs",
                self.m
            )));
        }
        if self.masks.first() == Some(&0) {
            return Ok(());
        }
        let Some(cell) = self.frontier() else {
            self.record();
            return Ok(());
        };
        let limit = (used + 1).min(self.m);
        for target in 0..limit {
            self.delta[cell] = Some(target);
            let next_used = if target == used { used + 1 } else { used };
            self.explore(next_used)?;
        }
        self.delta[cell] = None;
        Ok(())
    }
}

impl DecompositionOracle {
    pub fn new(samples: &LabeledSamples) -> Result<Self, BenchError> {
        let negatives: Vec<Vec<Letter>> = samples.negatives().map(|w| w.symbols().to_vec()).collect();
        if negatives.len() > 64 {
            return Err(BenchError::SearchSpaceTooLarge(format!(
                "{} negative words (at most 64 supported)",
                negatives.len()
            )));
        }
        Ok(DecompositionOracle {
            sigma: samples.alphabet().len(),
            positives: samples.positives().map(|w| w.symbols().to_vec()).collect(),
            negatives,
            minimal: HashMap::new(),
        })
    }

    /// Minimal accepted-negative sets for `m`-state DFAs, as bitmasks over
    /// the negative words in sample order.
    pub fn minimal_masks(&mut self, m: usize) -> Result<&[u64], BenchError> {
        if m > 64 {
            return Err(BenchError::SearchSpaceTooLarge(format!("{m}-state DFAs")));
        }
        if !self.minimal.contains_key(&m) {
            let masks = {
                let mut words: Vec<&[Letter]> = self.positives.iter().map(|w| w.as_slice()).collect();
                words.extend(self.negatives.iter().map(|w| w.as_slice()));
                let mut walk = Walk {
                    oracle: self,
                    m,
                    delta: vec![None; m * self.sigma],
                    masks: Vec::new(),
                    nodes: 0,
                    words,
                };
                walk.explore(1)?;
                let mut masks = walk.masks;
                masks.sort_unstable();
                masks
            };
            self.minimal.insert(m, masks);
        }
        Ok(&self.minimal[&m])
    }

    /// Some tuple of DFAs with these sizes accepts every positive word and
    /// rejects each negative word in at least one member.
    pub fn exists(&mut self, allocation: &StatesAllocation) -> Result<bool, BenchError> {
        let mut per_part = Vec::with_capacity(allocation.len());
        for &m in allocation.parts() {
            per_part.push(self.minimal_masks(m)?.to_vec());
        }
        let all = if self.negatives.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.negatives.len()) - 1
        };
        Ok(intersect_to_empty(&per_part, all))
    }
}

fn intersect_to_empty(per_part: &[Vec<u64>], acc: u64) -> bool {
    match per_part.split_first() {
        None => acc == 0,
        Some((first, rest)) => first.iter().any(|&mask| intersect_to_empty(rest, acc & mask)),
    }
}

pub fn oracle_exists_decomposition(
    samples: &LabeledSamples,
    allocation: &StatesAllocation,
) -> Result<bool, BenchError> {
    DecompositionOracle::new(samples)?.exists(allocation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{parse_samples, SampleFormat};
    use proptest::prelude::*;

    const FIXTURE: &str = "+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n";

    fn samples(text: &str) -> LabeledSamples {
        parse_samples(text, SampleFormat::Lines).unwrap()
    }

    fn alloc(p: &[usize]) -> StatesAllocation {
        StatesAllocation::new(p.to_vec()).unwrap()
    }

    #[test]
    fn single_dfa_oracle_on_fixture() {
        let s = samples(FIXTURE);
        assert!(oracle_exists_dfa(&s, 2).unwrap().is_none());
        let d = oracle_exists_dfa(&s, 3).unwrap().unwrap();
        assert!(s.positives().all(|w| d.accepts(w)));
        assert!(s.negatives().all(|w| !d.accepts(w)));
        assert!(oracle_exists_dfa(&samples("+ a\n- b\n"), 2).unwrap().is_some());
        assert!(matches!(oracle_exists_dfa(&s, 6), Err(BenchError::SearchSpaceTooLarge(_))));
    }

    #[test]
    fn first_witness_is_smallest_in_order() {
        // S+ = {ε}: the universal mask {0} with all-zero transitions comes first
        let d = oracle_exists_dfa(&samples("+\n"), 2).unwrap().unwrap();
        assert_eq!(d.accepting_states(), vec![0]);
        assert_eq!(d.next(0, 0), 0);
        // no positives: the empty accepting set works immediately
        let d = oracle_exists_dfa(&samples("- a\n"), 2).unwrap().unwrap();
        assert!(d.accepting_states().is_empty());
    }

    #[test]
    fn decomposition_oracle_on_fixture() {
        let s = samples(FIXTURE);
        assert!(oracle_exists_decomposition(&s, &alloc(&[2, 2])).unwrap());
        assert!(!oracle_exists_decomposition(&s, &alloc(&[2])).unwrap());
        assert!(oracle_exists_decomposition(&s, &alloc(&[3])).unwrap());
        assert!(oracle_exists_decomposition(&samples("+ a\n+ b b\n"), &alloc(&[2])).unwrap());
    }

    fn brute_decomposition(s: &LabeledSamples, allocation: &[usize]) -> bool {
        // all DFAs per size that accept every positive, as accepted-negative masks
        let sigma = s.alphabet().len();
        let negs: Vec<&[Letter]> = s.negatives().map(|w| w.symbols()).collect();
        let masks_for = |m: usize| {
            let cells = m * sigma;
            let mut out = Vec::new();
            for t in 0..m.pow(cells as u32) {
                let delta: Vec<usize> = (0..cells).map(|c| t / m.pow(c as u32) % m).collect();
                for acc in 0u32..1 << m {
                    let accepts = |w: &[Letter]| acc >> end_state(&delta, sigma, w) & 1 == 1;
                    if s.positives().all(|w| accepts(w)) {
                        let mut mask = 0u64;
                        for (i, w) in negs.iter().enumerate() {
                            if accepts(w) {
                                mask |= 1 << i;
                            }
                        }
                        out.push(mask);
                    }
                }
            }
            out
        };
        let per: Vec<Vec<u64>> = allocation.iter().map(|&m| masks_for(m)).collect();
        intersect_to_empty(&per, (1u64 << negs.len()) - 1)
    }

    fn word() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..2, 0..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn restricted_search_matches_full_enumeration(
            pos in prop::collection::vec(word(), 0..3),
            neg in prop::collection::vec(word(), 1..3),
        ) {
            let alphabet = crate::samples::Alphabet::lettered(2).unwrap();
            let neg: Vec<Vec<usize>> = neg.into_iter().filter(|w| !pos.contains(w)).collect();
            let s = LabeledSamples::new(
                alphabet,
                pos.into_iter().map(crate::samples::Word::new),
                neg.into_iter().map(crate::samples::Word::new),
            ).unwrap();
            let mut oracle = DecompositionOracle::new(&s).unwrap();
            for a in [&[2][..], &[3], &[2, 2]] {
                prop_assert_eq!(oracle.exists(&alloc(a)).unwrap(), brute_decomposition(&s, a), "allocation {:?}", a);
            }
            prop_assert_eq!(oracle.exists(&alloc(&[2])).unwrap(), oracle_exists_dfa(&s, 2).unwrap().is_some());
        }
    }
}

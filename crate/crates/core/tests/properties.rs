use std::collections::BTreeMap;

use proptest::prelude::*;

use dfa_decomp::automata::{Acceptor, Consistency, Label};
use dfa_decomp::bench::DecompositionOracle;
use dfa_decomp::samples::{Alphabet, LabeledSamples, Polarity, Word};
use dfa_decomp::search::{solve_allocation, Problem};
use dfa_decomp::{reduce_to_3dfa, solve_pareto, Apta, SearchConfig};

fn samples(sigma: usize, max_words: usize, max_len: usize) -> impl Strategy<Value = LabeledSamples> {
    prop::collection::vec(
        (prop::collection::vec(0..sigma, 0..=max_len), any::<bool>()),
        1..=max_words,
    )
    .prop_map(move |raw| {
        // last label wins for repeated words
        let by_word: BTreeMap<Vec<usize>, bool> = raw.into_iter().collect();
        let entries = by_word.into_iter().map(|(w, pos)| {
            let p = if pos {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            (Word::new(w), p)
        });
        LabeledSamples::from_entries(Alphabet::lettered(sigma).unwrap(), entries).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn three_dfa_classifies_samples(s in (2usize..=3).prop_flat_map(|k| samples(k, 8, 6))) {
        let apta = Apta::build(&s);
        let t = reduce_to_3dfa(&apta);
        prop_assert!(t.num_states() <= apta.num_states());
        prop_assert!(t.validate_against(&apta).is_ok());
        for w in s.positives() {
            prop_assert_eq!(t.classify(w), Label::Accept);
        }
        for w in s.negatives() {
            prop_assert_eq!(t.classify(w), Label::Reject);
        }
    }

    #[test]
    fn negative_prefixes_keep_their_own_state(s in samples(2, 8, 6)) {
        let apta = Apta::build(&s);
        let t = reduce_to_3dfa(&apta);
        for w in s.negatives() {
            for l in 0..=w.len() {
                let q = t.run(&w[..l]).unwrap();
                prop_assert_eq!(t.provenance(q).len(), 1);
            }
        }
    }

    #[test]
    fn sat_agrees_with_oracle(s in samples(2, 5, 4)) {
        let problem = Problem::new(s.clone());
        let mut oracle = DecompositionOracle::new(&s).unwrap();
        let cfg = SearchConfig::default();
        for total in 2..=5 {
            for a in dfa_decomp::search::compute_states_allocations(total, 2).unwrap() {
                let (attempt, d) = solve_allocation(&problem, &a, &cfg).unwrap();
                prop_assert_eq!(d.is_some(), oracle.exists(&a).unwrap(), "allocation {} status {}", a, attempt.status.as_str());
                if let Some(d) = d {
                    prop_assert_eq!(d.verify(&s), Consistency::Consistent);
                }
            }
        }
    }

    #[test]
    fn pareto_frontier_is_an_antichain(s in samples(2, 5, 4), n in 1usize..=3) {
        let f = solve_pareto(&s, n, &SearchConfig::default()).unwrap();
        let allocs = f.allocations();
        prop_assert!(!allocs.is_empty());
        for a in &allocs {
            for b in &allocs {
                prop_assert!(!dfa_decomp::search::pareto_dominates(a, b).unwrap());
            }
        }
        for (_, d) in &f.entries {
            prop_assert_eq!(d.verify(&s), Consistency::Consistent);
        }
    }
}

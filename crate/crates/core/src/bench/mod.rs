//! Benchmark generation, brute-force oracles and comparative metrics.

mod metrics;
mod oracle;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automata::Dfa;
use crate::samples::{Alphabet, LabeledSamples, Letter, Polarity, SampleError, Word};
use crate::search::SearchError;

pub use metrics::{compare_run, write_metrics_csv, MetricsRow, RunMetrics, METRICS_SCHEMA};
pub use oracle::{oracle_exists_decomposition, oracle_exists_dfa, DecompositionOracle, ORACLE_GUARD};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark spec: {0}")]
    InvalidSpec(String),
    #[error(
        "not enough distinct words: need {needed} per label, found {positives} positive and {negatives} negative"
    )]
    InsufficientWords {
        needed: usize,
        positives: usize,
        negatives: usize,
    },
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error(transparent)]
    Samples(#[from] SampleError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    PartialOrderTasks,
    RandomSplit,
}

impl Generator {
    pub fn as_str(self) -> &'static str {
        match self {
            Generator::PartialOrderTasks => "partial_order_tasks",
            Generator::RandomSplit => "random_split",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Generator {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "partial_order_tasks" | "partial-order-tasks" => Ok(Generator::PartialOrderTasks),
            "random_split" | "random-split" => Ok(Generator::RandomSplit),
            other => Err(BenchError::InvalidSpec(format!("unknown generator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub alphabet_size: usize,
    pub max_word_length: usize,
    pub num_examples_per_label: usize,
    pub generator: Generator,
    pub seed: u64,
}

impl BenchmarkSpec {
    fn validate(&self) -> Result<(), BenchError> {
        for (name, v) in [
            ("alphabet_size", self.alphabet_size),
            ("max_word_length", self.max_word_length),
            ("num_examples_per_label", self.num_examples_per_label),
        ] {
            if v == 0 {
                return Err(BenchError::InvalidSpec(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Pairs `(a, b)` meaning task `a` must happen before task `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOrder {
    pub before: Vec<(Letter, Letter)>,
}

impl PartialOrder {
    /// Random DAG: shuffle the letters into a topological order, then keep
    /// each forward pair with probability 1/2.
    pub fn random(alphabet_size: usize, rng: &mut impl Rng) -> PartialOrder {
        let mut order: Vec<Letter> = (0..alphabet_size).collect();
        order.shuffle(rng);
        let mut before = Vec::new();
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if rng.gen_bool(0.5) {
                    before.push((order[i], order[j]));
                }
            }
        }
        PartialOrder { before }
    }

    /// No `b` occurs before the first `a`, for every constraint `a < b`.
    pub fn respects(&self, word: &[Letter]) -> bool {
        self.before.iter().all(|&(a, b)| {
            let first_a = word.iter().position(|&l| l == a).unwrap_or(word.len());
            !word[..first_a].contains(&b)
        })
    }
}

fn random_dfa(alphabet_size: usize, rng: &mut impl Rng) -> Dfa {
    let m = rng.gen_range(2..=3);
    let delta = (0..m)
        .map(|_| (0..alphabet_size).map(|_| rng.gen_range(0..m)).collect())
        .collect();
    let accepting = (0..m).map(|_| rng.gen_bool(0.5)).collect();
    Dfa::new(delta, accepting).expect("well-formed random DFA")
}

/// Above this many candidate words the generator samples instead of
/// enumerating.
const ENUMERATION_LIMIT: usize = 200_000;
/// Target redraws for `random_split` before giving up.
const TARGET_ATTEMPTS: usize = 64;

fn word_space(sigma: usize, max_len: usize) -> Option<usize> {
    (1..=max_len).try_fold(0usize, |acc, l| acc.checked_add(sigma.checked_pow(l as u32)?))
}

fn all_words(sigma: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..sigma).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned().map(Word::new));
    }
    out
}

/// A uniformly random word of length `1..=max_len`.
fn random_word(sigma: usize, max_len: usize, rng: &mut impl Rng) -> Word {
    // weight each length by the number of words of that length
    let weights: Vec<f64> = (1..=max_len).map(|l| (sigma as f64).powi(l as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut len = max_len;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            len = i + 1;
            break;
        }
        pick -= w;
    }
    Word::new((0..len).map(|_| rng.gen_range(0..sigma)).collect())
}

/// Picks distinct words in random order until both quotas are full.
fn fill_quotas(
    spec: &BenchmarkSpec,
    label: &dyn Fn(&[Letter]) -> bool,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Word, Polarity)>, BenchError> {
    let quota = spec.num_examples_per_label;
    let mut chosen = Vec::with_capacity(2 * quota);
    let (mut pos, mut neg) = (0, 0);
    let mut take = |w: Word, chosen: &mut Vec<(Word, Polarity)>| {
        if label(&w) {
            if pos < quota {
                pos += 1;
                chosen.push((w, Polarity::Positive));
            }
        } else if neg < quota {
            neg += 1;
            chosen.push((w, Polarity::Negative));
        }
        pos == quota && neg == quota
    };
    let space = word_space(spec.alphabet_size, spec.max_word_length);
    if space.is_some_and(|s| s <= ENUMERATION_LIMIT) {
        let mut words = all_words(spec.alphabet_size, spec.max_word_length);
        words.shuffle(rng);
        for w in words {
            if take(w, &mut chosen) {
                return Ok(chosen);
            }
        }
    } else {
        let mut seen = HashSet::new();
        let budget = 1000 * 2 * quota;
        for _ in 0..budget {
            let w = random_word(spec.alphabet_size, spec.max_word_length, rng);
            if seen.insert(w.clone()) && take(w, &mut chosen) {
                return Ok(chosen);
            }
        }
    }
    let positives = chosen.iter().filter(|(_, p)| *p == Polarity::Positive).count();
    Err(BenchError::InsufficientWords {
        needed: quota,
        positives,
        negatives: chosen.len() - positives,
    })
}

/// Deterministic in `spec.seed`.
pub fn generate(spec: &BenchmarkSpec) -> Result<LabeledSamples, BenchError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sigma = spec.alphabet_size;
    let entries = match spec.generator {
        Generator::PartialOrderTasks => {
            let order = PartialOrder::random(sigma, &mut rng);
            fill_quotas(spec, &|w| order.respects(w), &mut rng)?
        }
        Generator::RandomSplit => {
            let mut last_err = None;
            let mut found = None;
            for _ in 0..TARGET_ATTEMPTS {
                let (a, b) = (random_dfa(sigma, &mut rng), random_dfa(sigma, &mut rng));
                match fill_quotas(spec, &|w| a.accepts(w) && b.accepts(w), &mut rng) {
                    Ok(entries) => {
                        found = Some(entries);
                        break;
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            match found {
                Some(entries) => entries,
                None => return Err(last_err.expect("at least one attempt")),
            }
        }
    };
    let alphabet = Alphabet::lettered(sigma)?;
    Ok(LabeledSamples::from_entries(alphabet, entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(generator: Generator, sigma: usize, len: usize, count: usize, seed: u64) -> BenchmarkSpec {
        BenchmarkSpec {
            alphabet_size: sigma,
            max_word_length: len,
            num_examples_per_label: count,
            generator,
            seed,
        }
    }

    #[test]
    fn deterministic_in_seed() {
        for g in [Generator::PartialOrderTasks, Generator::RandomSplit] {
            let a = generate(&spec(g, 3, 5, 8, 7)).unwrap();
            let b = generate(&spec(g, 3, 5, 8, 7)).unwrap();
            assert_eq!(a.to_lines(), b.to_lines());
            assert_eq!(a.num_positives(), 8);
            assert_eq!(a.num_negatives(), 8);
        }
        let a = generate(&spec(Generator::PartialOrderTasks, 4, 6, 10, 1)).unwrap();
        let b = generate(&spec(Generator::PartialOrderTasks, 4, 6, 10, 2)).unwrap();
        assert_ne!(a.to_lines(), b.to_lines());
    }

    #[test]
    fn partial_order_rule() {
        let order = PartialOrder { before: vec![(0, 1)] };
        assert!(order.respects(&[0, 1]));
        assert!(!order.respects(&[1, 0]));
        assert!(!order.respects(&[1]));
        assert!(order.respects(&[0, 0, 1, 0]));
        assert!(order.respects(&[2]));
    }

    #[test]
    fn generated_words_respect_limits() {
        let s = spec(Generator::PartialOrderTasks, 3, 4, 6, 11);
        let samples = generate(&s).unwrap();
        for (w, _) in samples.entries() {
            assert!((1..=4).contains(&w.len()));
            assert!(w.iter().all(|&l| l < 3));
        }
    }

    #[test]
    fn too_few_words() {
        let err = generate(&spec(Generator::PartialOrderTasks, 2, 3, 10, 0)).unwrap_err();
        assert!(matches!(err, BenchError::InsufficientWords { needed: 10, .. }));
        let err = generate(&spec(Generator::RandomSplit, 2, 3, 10, 0)).unwrap_err();
        assert!(matches!(err, BenchError::InsufficientWords { .. }));
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(matches!(
            generate(&spec(Generator::RandomSplit, 2, 3, 0, 0)),
            Err(BenchError::InvalidSpec(_))
        ));
    }

    #[test]
    fn sampling_path_for_large_spaces() {
        let s = spec(Generator::PartialOrderTasks, 5, 12, 20, 3);
        let samples = generate(&s).unwrap();
        assert_eq!(samples.len(), 40);
    }

    #[test]
    fn word_space_counts() {
        assert_eq!(word_space(2, 3), Some(14));
        assert_eq!(all_words(2, 3).len(), 14);
    }
}

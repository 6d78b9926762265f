use serde::{Deserialize, Serialize};

use super::{AutomataError, StateId};
use crate::samples::{Alphabet, LabeledSamples, Letter, Polarity, Word};

/// A complete DFA with initial state 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    delta: Vec<Vec<StateId>>,
    accepting: Vec<bool>,
}

impl Dfa {
    /// `delta[q][a]` is the successor of `q` on letter `a`.
    pub fn new(delta: Vec<Vec<StateId>>, accepting: Vec<bool>) -> Result<Dfa, AutomataError> {
        let n = accepting.len();
        if n == 0 {
            return Err(AutomataError::NoStates);
        }
        if delta.len() != n {
            return Err(AutomataError::ShapeMismatch {
                expected: n,
                found: delta.len(),
            });
        }
        let sigma = delta[0].len();
        for row in &delta {
            if row.len() != sigma {
                return Err(AutomataError::AlphabetMismatch {
                    expected: sigma,
                    found: row.len(),
                });
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(AutomataError::TargetOutOfRange {
                    target: t,
                    num_states: n,
                });
            }
        }
        Ok(Dfa { delta, accepting })
    }

    /// A DFA of `num_states` states accepting every word (all states
    /// accepting, every transition a self-loop).
    pub fn universal(num_states: usize, alphabet_size: usize) -> Dfa {
        Dfa {
            delta: (0..num_states).map(|q| vec![q; alphabet_size]).collect(),
            accepting: vec![true; num_states],
        }
    }

    /// A DFA with `|u| + 2` states that rejects exactly `u`.
    pub fn rejecting_only(word: &[Letter], alphabet_size: usize) -> Dfa {
        // States 0..=|u| track the matched prefix of u; the last state is the
        // sink for words that left u.
        let len = word.len();
        let sink = len + 1;
        let mut delta = vec![vec![sink; alphabet_size]; len + 2];
        for (i, &a) in word.iter().enumerate() {
            delta[i][a] = i + 1;
        }
        let mut accepting = vec![true; len + 2];
        accepting[len] = false;
        Dfa { delta, accepting }
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.delta[0].len()
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn next(&self, state: StateId, letter: Letter) -> StateId {
        self.delta[state][letter]
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn run(&self, word: &[Letter]) -> StateId {
        word.iter().fold(0, |q, &a| self.delta[q][a])
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.accepting[self.run(word)]
    }

    pub fn to_doc(&self, alphabet: &Alphabet) -> DfaDoc {
        let mut delta = Vec::with_capacity(self.num_states() * alphabet.len());
        for (q, row) in self.delta.iter().enumerate() {
            for (a, &t) in row.iter().enumerate() {
                delta.push(TransitionDoc {
                    from: q,
                    letter: alphabet.name(a).to_string(),
                    to: t,
                });
            }
        }
        DfaDoc {
            num_states: self.num_states(),
            initial: 0,
            accepting: self.accepting_states(),
            delta,
        }
    }

    pub fn from_doc(doc: &DfaDoc, alphabet: &Alphabet) -> Result<Dfa, AutomataError> {
        let n = doc.num_states;
        if n == 0 {
            return Err(AutomataError::NoStates);
        }
        if doc.initial >= n {
            return Err(AutomataError::TargetOutOfRange {
                target: doc.initial,
                num_states: n,
            });
        }
        let mut delta = vec![vec![None; alphabet.len()]; n];
        for t in &doc.delta {
            let a = alphabet
                .lookup(&t.letter)
                .ok_or_else(|| AutomataError::UnknownLetter(t.letter.clone()))?;
            for s in [t.from, t.to] {
                if s >= n {
                    return Err(AutomataError::TargetOutOfRange {
                        target: s,
                        num_states: n,
                    });
                }
            }
            if delta[t.from][a].replace(t.to).is_some() {
                return Err(AutomataError::DuplicateTransition {
                    state: t.from,
                    letter: t.letter.clone(),
                });
            }
        }
        let mut accepting = vec![false; n];
        for &q in &doc.accepting {
            if q >= n {
                return Err(AutomataError::TargetOutOfRange {
                    target: q,
                    num_states: n,
                });
            }
            accepting[q] = true;
        }
        // Swap the declared initial state into position 0.
        let swap = |q: StateId| {
            if q == doc.initial {
                0
            } else if q == 0 {
                doc.initial
            } else {
                q
            }
        };
        let mut rows = vec![Vec::new(); n];
        let mut acc = vec![false; n];
        for q in 0..n {
            let mut row = Vec::with_capacity(alphabet.len());
            for (a, t) in delta[q].iter().enumerate() {
                let t = t.ok_or(AutomataError::Incomplete { state: q, letter: a })?;
                row.push(swap(t));
            }
            rows[swap(q)] = row;
            acc[swap(q)] = accepting[q];
        }
        Dfa::new(rows, acc)
    }
}

/// Why a decomposition fails a sample word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    PositiveRejected,
    NegativeAccepted,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::PositiveRejected => "positive_rejected",
            ViolationKind::NegativeAccepted => "negative_accepted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Violation { word: Word, kind: ViolationKind },
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent)
    }
}

/// A tuple of complete DFAs, ascending in size, whose language is the
/// intersection of its members' languages.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    dfas: Vec<Dfa>,
}

impl Decomposition {
    pub fn new(dfas: Vec<Dfa>) -> Result<Decomposition, AutomataError> {
        let first = dfas.first().ok_or(AutomataError::EmptyDecomposition)?;
        let sigma = first.alphabet_size();
        for (index, d) in dfas.iter().enumerate() {
            if d.num_states() < 2 {
                return Err(AutomataError::MemberTooSmall {
                    index,
                    states: d.num_states(),
                });
            }
            if d.alphabet_size() != sigma {
                return Err(AutomataError::AlphabetMismatch {
                    expected: sigma,
                    found: d.alphabet_size(),
                });
            }
        }
        let sizes: Vec<usize> = dfas.iter().map(Dfa::num_states).collect();
        if sizes.windows(2).any(|w| w[0] > w[1]) {
            return Err(AutomataError::NotAscending(sizes));
        }
        Ok(Decomposition { dfas })
    }

    /// Like [`Decomposition::new`] but sorts the members by size first.
    pub fn sorted(mut dfas: Vec<Dfa>) -> Result<Decomposition, AutomataError> {
        dfas.sort_by_key(Dfa::num_states);
        Self::new(dfas)
    }

    pub fn dfas(&self) -> &[Dfa] {
        &self.dfas
    }

    pub fn allocation(&self) -> Vec<usize> {
        self.dfas.iter().map(Dfa::num_states).collect()
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.dfas.iter().all(|d| d.accepts(word))
    }

    /// Checks every sample word in sample order and reports the first one
    /// the decomposition gets wrong.
    pub fn verify(&self, samples: &LabeledSamples) -> Consistency {
        for (word, polarity) in samples.entries() {
            let accepted = self.accepts(word);
            let kind = match polarity {
                Polarity::Positive if !accepted => ViolationKind::PositiveRejected,
                Polarity::Negative if accepted => ViolationKind::NegativeAccepted,
                _ => continue,
            };
            return Consistency::Violation {
                word: word.clone(),
                kind,
            };
        }
        Consistency::Consistent
    }

    pub fn to_doc(&self, alphabet: &Alphabet) -> DecompositionDoc {
        DecompositionDoc {
            alphabet: alphabet.letters().to_vec(),
            dfas: self.dfas.iter().map(|d| d.to_doc(alphabet)).collect(),
        }
    }

    /// Reads a decomposition, resolving letters by name against `alphabet`.
    pub fn from_doc(doc: &DecompositionDoc, alphabet: &Alphabet) -> Result<Decomposition, AutomataError> {
        if let Some(l) = doc.alphabet.iter().find(|l| alphabet.lookup(l).is_none()) {
            return Err(AutomataError::UnknownLetter(l.clone()));
        }
        if doc.alphabet.len() != alphabet.len() {
            return Err(AutomataError::AlphabetMismatch {
                expected: alphabet.len(),
                found: doc.alphabet.len(),
            });
        }
        let dfas = doc
            .dfas
            .iter()
            .map(|d| Dfa::from_doc(d, alphabet))
            .collect::<Result<Vec<_>, _>>()?;
        Decomposition::new(dfas)
    }
}

/// JSON form of a [`Decomposition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub alphabet: Vec<String>,
    pub dfas: Vec<DfaDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaDoc {
    pub num_states: usize,
    pub initial: StateId,
    pub accepting: Vec<StateId>,
    pub delta: Vec<TransitionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: StateId,
    pub letter: String,
    pub to: StateId,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{parse_samples, SampleFormat};

    // Letters: a = 0, b = 1.
    fn a1() -> Dfa {
        Dfa::new(vec![vec![1, 0], vec![1, 1]], vec![false, true]).unwrap()
    }

    fn a2() -> Dfa {
        Dfa::new(vec![vec![1, 1], vec![0, 1]], vec![false, true]).unwrap()
    }

    fn fixture() -> LabeledSamples {
        parse_samples("+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n", SampleFormat::Lines).unwrap()
    }

    #[test]
    fn member_runs() {
        assert!(!a1().accepts(&[1]));
        assert_eq!(a2().run(&[0, 1, 0]), 0);
        assert!(!a2().accepts(&[0, 1, 0]));
        assert_eq!(a1().accepts(&[]), a1().is_accepting(0));
    }

    #[test]
    fn conjunction() {
        let d = Decomposition::new(vec![a1(), a2()]).unwrap();
        assert!(d.accepts(&[0, 0, 1]));
        assert!(!d.accepts(&[1]));
        assert!(!d.accepts(&[0, 1, 0]));
    }

    #[test]
    fn verify_fixture() {
        let s = fixture();
        let d = Decomposition::new(vec![a1(), a2()]).unwrap();
        assert_eq!(d.verify(&s), Consistency::Consistent);

        let only_a2 = Decomposition::new(vec![a2()]).unwrap();
        assert_eq!(
            only_a2.verify(&s),
            Consistency::Violation {
                word: Word::new(vec![1]),
                kind: ViolationKind::NegativeAccepted
            }
        );

        let reject_all = Decomposition::new(vec![Dfa::new(vec![vec![0, 0], vec![1, 1]], vec![false, false]).unwrap()]).unwrap();
        assert_eq!(
            reject_all.verify(&s),
            Consistency::Violation {
                word: Word::new(vec![0, 0, 1]),
                kind: ViolationKind::PositiveRejected
            }
        );
    }

    #[test]
    fn decomposition_invariants() {
        let one = Dfa::new(vec![vec![0, 0]], vec![true]).unwrap();
        assert!(matches!(
            Decomposition::new(vec![one]),
            Err(AutomataError::MemberTooSmall { .. })
        ));
        let three = Dfa::universal(3, 2);
        assert!(matches!(
            Decomposition::new(vec![three.clone(), a1()]),
            Err(AutomataError::NotAscending(_))
        ));
        assert_eq!(Decomposition::sorted(vec![three, a1()]).unwrap().allocation(), vec![2, 3]);
        assert!(matches!(Decomposition::new(vec![]), Err(AutomataError::EmptyDecomposition)));
    }

    #[test]
    fn dfa_shape_errors() {
        assert!(matches!(Dfa::new(vec![vec![2]], vec![true]), Err(AutomataError::ShapeMismatch { .. }) | Err(AutomataError::TargetOutOfRange { .. })));
        assert!(matches!(Dfa::new(vec![vec![0], vec![0, 1]], vec![true, false]), Err(AutomataError::AlphabetMismatch { .. })));
        assert!(matches!(Dfa::new(vec![], vec![]), Err(AutomataError::NoStates)));
    }

    #[test]
    fn rejecting_only_dfa() {
        let d = Dfa::rejecting_only(&[0, 1], 2);
        assert_eq!(d.num_states(), 4);
        assert!(!d.accepts(&[0, 1]));
        for w in [&[][..], &[0], &[1], &[0, 1, 0], &[0, 0], &[1, 0, 1]] {
            assert!(d.accepts(w), "{w:?}");
        }
        let e = Dfa::rejecting_only(&[], 2);
        assert!(!e.accepts(&[]));
        assert!(e.accepts(&[1]));
    }

    #[test]
    fn json_round_trip_with_nonzero_initial() {
        let s = fixture();
        let d = Decomposition::new(vec![a1(), a2()]).unwrap();
        let doc = d.to_doc(s.alphabet());
        let text = serde_json::to_string(&doc).unwrap();
        let back: DecompositionDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(Decomposition::from_doc(&back, s.alphabet()).unwrap(), d);

        // Same A1 but with its states listed the other way round.
        let swapped = DfaDoc {
            num_states: 2,
            initial: 1,
            accepting: vec![0],
            delta: vec![
                TransitionDoc { from: 1, letter: "a".into(), to: 0 },
                TransitionDoc { from: 1, letter: "b".into(), to: 1 },
                TransitionDoc { from: 0, letter: "a".into(), to: 0 },
                TransitionDoc { from: 0, letter: "b".into(), to: 0 },
            ],
        };
        assert_eq!(Dfa::from_doc(&swapped, s.alphabet()).unwrap(), a1());
    }

    #[test]
    fn json_errors() {
        let s = fixture();
        let mut doc = a1().to_doc(s.alphabet());
        doc.delta.pop();
        assert!(matches!(Dfa::from_doc(&doc, s.alphabet()), Err(AutomataError::Incomplete { .. })));
        let mut doc = a1().to_doc(s.alphabet());
        doc.delta[0].letter = "z".into();
        assert!(matches!(Dfa::from_doc(&doc, s.alphabet()), Err(AutomataError::UnknownLetter(_))));
        let mut doc = a1().to_doc(s.alphabet());
        doc.delta[1].letter = "a".into();
        assert!(matches!(Dfa::from_doc(&doc, s.alphabet()), Err(AutomataError::DuplicateTransition { .. })));
    }
}

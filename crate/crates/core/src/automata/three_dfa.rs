use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Acceptor, Apta, AutomataError, Label, StateId};
use crate::samples::{Alphabet, Letter};

/// A 3-valued DFA obtained by merging equivalent accepting or don't-care
/// states of an [`Apta`]. Rejecting states are never merged.
///
/// Each state keeps the sorted list of APTA states it stands for. States are
/// numbered by their smallest APTA member, so the initial state is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeDfa {
    alphabet_size: usize,
    delta: Vec<Vec<Option<StateId>>>,
    labels: Vec<Label>,
    provenance: Vec<Vec<StateId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum RegisterKey {
    Rejecting(StateId),
    Node {
        accepting: bool,
        successors: Vec<Option<usize>>,
    },
}

/// Backward reduction of the prefix tree through a register of
/// representatives.
///
/// Nodes are processed from the deepest level up (by id within a level), so
/// every successor already has a representative when a node is keyed.
pub fn reduce_to_3dfa(apta: &Apta) -> ThreeDfa {
    let n = apta.num_states();
    let mut order: Vec<StateId> = (0..n).collect();
    order.sort_by_key(|&q| (std::cmp::Reverse(apta.depth(q)), q));

    let mut register: HashMap<RegisterKey, usize> = HashMap::new();
    let mut class_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<StateId>> = Vec::new();
    for q in order {
        let key = match apta.label(q) {
            Label::Reject => RegisterKey::Rejecting(q),
            label => RegisterKey::Node {
                accepting: label == Label::Accept,
                successors: (0..apta.alphabet_size())
                    .map(|a| apta.successor(q, a).map(|t| class_of[t]))
                    .collect(),
            },
        };
        let class = *register.entry(key).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        class_of[q] = class;
        members[class].push(q);
    }

    for m in &mut members {
        m.sort_unstable();
    }
    let mut classes: Vec<usize> = (0..members.len()).collect();
    classes.sort_by_key(|&c| members[c][0]);
    let mut renumber = vec![0; members.len()];
    for (new, &old) in classes.iter().enumerate() {
        renumber[old] = new;
    }

    let mut delta = Vec::with_capacity(classes.len());
    let mut labels = Vec::with_capacity(classes.len());
    let mut provenance = Vec::with_capacity(classes.len());
    for &old in &classes {
        let rep = members[old][0];
        delta.push(
            (0..apta.alphabet_size())
                .map(|a| apta.successor(rep, a).map(|t| renumber[class_of[t]]))
                .collect(),
        );
        labels.push(apta.label(rep));
        provenance.push(std::mem::take(&mut members[old]));
    }
    ThreeDfa {
        alphabet_size: apta.alphabet_size(),
        delta,
        labels,
        provenance,
    }
}

impl ThreeDfa {
    /// Assembles a 3DFA from raw parts and checks the structural invariants:
    /// shapes agree, targets are in range, the initial state 0 contains the
    /// APTA root, every rejecting state stands for exactly one APTA state, and
    /// the provenance lists are disjoint.
    pub fn from_parts(
        alphabet_size: usize,
        delta: Vec<Vec<Option<StateId>>>,
        labels: Vec<Label>,
        provenance: Vec<Vec<StateId>>,
    ) -> Result<ThreeDfa, AutomataError> {
        let out = ThreeDfa {
            alphabet_size,
            delta,
            labels,
            provenance,
        };
        out.check_structure()?;
        Ok(out)
    }

    fn check_structure(&self) -> Result<(), AutomataError> {
        let n = self.labels.len();
        if n == 0 {
            return Err(AutomataError::NoStates);
        }
        for len in [self.delta.len(), self.provenance.len()] {
            if len != n {
                return Err(AutomataError::ShapeMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        for row in &self.delta {
            if row.len() != self.alphabet_size {
                return Err(AutomataError::AlphabetMismatch {
                    expected: self.alphabet_size,
                    found: row.len(),
                });
            }
            if let Some(&t) = row.iter().flatten().find(|&&t| t >= n) {
                return Err(AutomataError::TargetOutOfRange {
                    target: t,
                    num_states: n,
                });
            }
        }
        if !self.provenance[0].contains(&0) {
            return Err(AutomataError::Invariant(
                "initial state does not contain the prefix-tree root".into(),
            ));
        }
        let mut seen = HashMap::new();
        for (q, members) in self.provenance.iter().enumerate() {
            if members.is_empty() {
                return Err(AutomataError::Invariant(format!("state {q} stands for no prefix")));
            }
            for &v in members {
                if let Some(other) = seen.insert(v, q) {
                    return Err(AutomataError::Invariant(format!(
                        "prefix-tree state {v} appears in states {other} and {q}"
                    )));
                }
            }
            if self.labels[q] == Label::Reject && members.len() > 1 {
                return Err(AutomataError::Invariant(format!(
                    "rejecting state {q} merges prefix-tree states {members:?}"
                )));
            }
        }
        Ok(())
    }

    /// Checks that this 3DFA is a faithful quotient of `apta`: the members of
    /// each state partition the APTA states, share one label, and agree on
    /// where every letter leads.
    pub fn validate_against(&self, apta: &Apta) -> Result<(), AutomataError> {
        self.check_structure()?;
        let mut class_of = vec![None; apta.num_states()];
        for (q, members) in self.provenance.iter().enumerate() {
            for &v in members {
                if v >= apta.num_states() {
                    return Err(AutomataError::Invariant(format!(
                        "provenance refers to unknown prefix-tree state {v}"
                    )));
                }
                class_of[v] = Some(q);
            }
        }
        if let Some(v) = class_of.iter().position(Option::is_none) {
            return Err(AutomataError::Invariant(format!(
                "prefix-tree state {v} is not represented"
            )));
        }
        for (q, members) in self.provenance.iter().enumerate() {
            for &v in members {
                if apta.label(v) != self.labels[q] {
                    return Err(AutomataError::Invariant(format!(
                        "state {q} is {} but member {v} is {}",
                        self.labels[q].as_str(),
                        apta.label(v).as_str()
                    )));
                }
                for a in 0..self.alphabet_size {
                    let expected = apta.successor(v, a).and_then(|t| class_of[t]);
                    if expected != self.delta[q][a] {
                        return Err(AutomataError::Invariant(format!(
                            "state {q} disagrees with member {v} on letter {a}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// States standing for two or more prefixes (the set `M`).
    pub fn merged(&self) -> Vec<StateId> {
        (0..self.labels.len())
            .filter(|&q| self.provenance[q].len() > 1)
            .collect()
    }

    pub fn is_merged(&self, state: StateId) -> bool {
        self.provenance[state].len() > 1
    }

    /// APTA states collapsed into `state`, ascending.
    pub fn provenance(&self, state: StateId) -> &[StateId] {
        &self.provenance[state]
    }

    /// The smallest APTA state collapsed into `state`.
    pub fn representative(&self, state: StateId) -> StateId {
        self.provenance[state][0]
    }

    pub fn accepting(&self) -> Vec<StateId> {
        self.states_with(Label::Accept)
    }

    pub fn rejecting(&self) -> Vec<StateId> {
        self.states_with(Label::Reject)
    }

    pub fn to_doc(&self, alphabet: &Alphabet) -> ThreeDfaDoc {
        let mut delta = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    delta.push(super::TransitionDoc {
                        from: q,
                        letter: alphabet.name(a).to_string(),
                        to: *t,
                    });
                }
            }
        }
        ThreeDfaDoc {
            alphabet: alphabet.letters().to_vec(),
            num_states: self.labels.len(),
            initial: 0,
            accepting: self.accepting(),
            rejecting: self.rejecting(),
            merged: self.merged(),
            delta,
            provenance: self.provenance.clone(),
        }
    }
}

impl Acceptor for ThreeDfa {
    fn num_states(&self) -> usize {
        self.labels.len()
    }

    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn initial(&self) -> StateId {
        0
    }

    fn successor(&self, state: StateId, letter: Letter) -> Option<StateId> {
        self.delta[state][letter]
    }

    fn label(&self, state: StateId) -> Label {
        self.labels[state]
    }
}

/// JSON form of a [`ThreeDfa`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeDfaDoc {
    pub alphabet: Vec<String>,
    pub num_states: usize,
    pub initial: StateId,
    pub accepting: Vec<StateId>,
    pub rejecting: Vec<StateId>,
    pub merged: Vec<StateId>,
    pub delta: Vec<super::TransitionDoc>,
    pub provenance: Vec<Vec<StateId>>,
}

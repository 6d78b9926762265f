use super::{Acceptor, Label, StateId};
use crate::samples::{LabeledSamples, Letter, Polarity, Word};

/// Augmented prefix tree acceptor: one state per prefix of a sample word.
///
/// States are numbered in depth-first preorder of the prefix tree, visiting
/// the children of a node in the order their letters first appear in the
/// samples. The initial state (ε) is always 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Apta {
    alphabet_size: usize,
    delta: Vec<Vec<Option<StateId>>>,
    labels: Vec<Label>,
    prefix_of: Vec<Word>,
    parent: Vec<Option<(StateId, Letter)>>,
}

struct TrieNode {
    children: Vec<(Letter, usize)>,
    label: Label,
}

impl Apta {
    pub fn build(samples: &LabeledSamples) -> Apta {
        let mut trie = vec![TrieNode {
            children: Vec::new(),
            label: Label::DontCare,
        }];
        for (word, polarity) in samples.entries() {
            let mut node = 0;
            for &a in word.iter() {
                node = match trie[node].children.iter().find(|(l, _)| *l == a) {
                    Some(&(_, child)) => child,
                    None => {
                        let child = trie.len();
                        trie.push(TrieNode {
                            children: Vec::new(),
                            label: Label::DontCare,
                        });
                        trie[node].children.push((a, child));
                        child
                    }
                };
            }
            trie[node].label = match polarity {
                Polarity::Positive => Label::Accept,
                Polarity::Negative => Label::Reject,
            };
        }

        // Renumber in preorder.
        let n = trie.len();
        let alphabet_size = samples.alphabet().len();
        let mut id_of = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            id_of[node] = order.len();
            order.push(node);
            for &(_, child) in trie[node].children.iter().rev() {
                stack.push(child);
            }
        }

        let mut apta = Apta {
            alphabet_size,
            delta: vec![vec![None; alphabet_size]; n],
            labels: vec![Label::DontCare; n],
            prefix_of: vec![Word::empty(); n],
            parent: vec![None; n],
        };
        for &node in &order {
            let id = id_of[node];
            apta.labels[id] = trie[node].label;
            for &(a, child) in &trie[node].children {
                let cid = id_of[child];
                apta.delta[id][a] = Some(cid);
                apta.parent[cid] = Some((id, a));
                let mut w = apta.prefix_of[id].clone();
                w.push(a);
                apta.prefix_of[cid] = w;
            }
        }
        apta
    }

    /// The unique prefix leading to `state`.
    pub fn prefix_of(&self, state: StateId) -> &Word {
        &self.prefix_of[state]
    }

    /// Tree parent and the letter on the incoming edge; `None` for the root.
    pub fn parent(&self, state: StateId) -> Option<(StateId, Letter)> {
        self.parent[state]
    }

    pub fn depth(&self, state: StateId) -> usize {
        self.prefix_of[state].len()
    }

    pub fn accepting(&self) -> Vec<StateId> {
        self.states_with(Label::Accept)
    }

    pub fn rejecting(&self) -> Vec<StateId> {
        self.states_with(Label::Reject)
    }
}

impl Acceptor for Apta {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{parse_samples, SampleFormat};

    fn build(text: &str) -> (LabeledSamples, Apta) {
        let s = parse_samples(text, SampleFormat::Lines).unwrap();
        let a = Apta::build(&s);
        (s, a)
    }

    #[test]
    fn fixture_numbering_matches_prefix_map() {
        let (s, apta) = build("+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n");
        let names: Vec<String> = (0..apta.num_states())
            .map(|q| s.alphabet().display_word(apta.prefix_of(q)))
            .collect();
        assert_eq!(names, vec!["ε", "a", "aa", "aab", "aaa", "ab", "aba", "b"]);
        assert_eq!(apta.accepting(), vec![3, 4, 5]);
        assert_eq!(apta.rejecting(), vec![6, 7]);
        assert_eq!(apta.parent(6), Some((5, 0)));
        assert_eq!(apta.parent(0), None);
    }

    #[test]
    fn epsilon_only() {
        let (_, apta) = build("+\n");
        assert_eq!(apta.num_states(), 1);
        assert_eq!(apta.label(0), Label::Accept);
    }

    #[test]
    fn single_negative_letter() {
        let (_, apta) = build("- a\n");
        assert_eq!(apta.num_states(), 2);
        assert_eq!(apta.successor(0, 0), Some(1));
        assert_eq!(apta.rejecting(), vec![1]);
        assert_eq!(apta.label(0), Label::DontCare);
    }

    #[test]
    fn run_off_tree_is_dont_care() {
        let (s, apta) = build("+ a\n");
        let b = Word::new(vec![0, 0]);
        assert_eq!(apta.classify(&b), Label::DontCare);
        assert_eq!(apta.classify(s.positives().next().unwrap()), Label::Accept);
    }
}

//! Graphviz export. Accepting states are drawn as double circles, rejecting
//! states as boxes and don't-care states as plain circles.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Acceptor, Apta, Dfa, Label, StateId, ThreeDfa};
use crate::samples::Alphabet;

fn shape(label: Label) -> &'static str {
    match label {
        Label::Accept => "doublecircle",
        Label::Reject => "box",
        Label::DontCare => "circle",
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Groups parallel edges so `q -a,b-> t` is one arrow.
fn edges(acceptor: &impl Acceptor, state: StateId) -> BTreeMap<StateId, Vec<usize>> {
    let mut out: BTreeMap<StateId, Vec<usize>> = BTreeMap::new();
    for (a, t) in acceptor.outgoing(state) {
        out.entry(t).or_default().push(a);
    }
    out
}

fn write_acceptor(
    acceptor: &impl Acceptor,
    alphabet: &Alphabet,
    name: &str,
    node_attrs: impl Fn(StateId) -> String,
) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  __start [shape=point];").unwrap();
    writeln!(out, "  __start -> {};", acceptor.initial()).unwrap();
    for q in 0..acceptor.num_states() {
        writeln!(
            out,
            "  {q} [shape={}{}];",
            shape(acceptor.label(q)),
            node_attrs(q)
        )
        .unwrap();
    }
    for q in 0..acceptor.num_states() {
        for (t, letters) in edges(acceptor, q) {
            let label: Vec<&str> = letters.iter().map(|&a| alphabet.name(a)).collect();
            writeln!(out, "  {q} -> {t} [label=\"{}\"];", escape(&label.join(","))).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn apta_to_dot(apta: &Apta, alphabet: &Alphabet) -> String {
    write_acceptor(apta, alphabet, "apta", |q| {
        format!(
            ", tooltip=\"{}\"",
            escape(&alphabet.display_word(apta.prefix_of(q)))
        )
    })
}

/// Merged states list the prefix-tree states they stand for in the tooltip.
pub fn three_dfa_to_dot(tdfa: &ThreeDfa, alphabet: &Alphabet) -> String {
    write_acceptor(tdfa, alphabet, "three_dfa", |q| {
        let members: Vec<String> = tdfa.provenance(q).iter().map(|v| v.to_string()).collect();
        let mut attrs = format!(", tooltip=\"apta: {}\"", members.join(" "));
        if tdfa.is_merged(q) {
            attrs.push_str(", style=filled, fillcolor=lightblue");
        }
        attrs
    })
}

pub fn dfa_to_dot(dfa: &Dfa, alphabet: &Alphabet) -> String {
    let mut out = String::new();
    writeln!(out, "digraph dfa {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  __start [shape=point];").unwrap();
    writeln!(out, "  __start -> 0;").unwrap();
    for q in 0..dfa.num_states() {
        let s = if dfa.is_accepting(q) { "doublecircle" } else { "circle" };
        writeln!(out, "  {q} [shape={s}];").unwrap();
    }
    for q in 0..dfa.num_states() {
        let mut grouped: BTreeMap<StateId, Vec<&str>> = BTreeMap::new();
        for a in 0..dfa.alphabet_size() {
            grouped.entry(dfa.next(q, a)).or_default().push(alphabet.name(a));
        }
        for (t, letters) in grouped {
            writeln!(out, "  {q} -> {t} [label=\"{}\"];", escape(&letters.join(","))).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::reduce_to_3dfa;
    use crate::samples::{parse_samples, SampleFormat};

    #[test]
    fn three_dfa_dot_marks_merged_state() {
        let s = parse_samples("+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n", SampleFormat::Lines).unwrap();
        let apta = Apta::build(&s);
        let t = reduce_to_3dfa(&apta);
        let dot = three_dfa_to_dot(&t, s.alphabet());
        assert!(dot.contains("tooltip=\"apta: 3 4\""));
        assert!(dot.contains("[label=\"a,b\"]"));
        assert_eq!(dot.matches("shape=box").count(), 2);
        assert_eq!(dot.matches("shape=doublecircle").count(), 2);

        let dot = apta_to_dot(&apta, s.alphabet());
        assert_eq!(dot.matches("shape=doublecircle").count(), 3);
        assert!(dot.contains("tooltip=\"aba\""));
    }

    #[test]
    fn dfa_dot() {
        let d = Dfa::new(vec![vec![1, 0], vec![1, 1]], vec![false, true]).unwrap();
        let a = Alphabet::lettered(2).unwrap();
        let dot = dfa_to_dot(&d, &a);
        assert!(dot.contains("1 -> 1 [label=\"a,b\"]"));
        assert!(dot.contains("1 [shape=doublecircle]"));
    }
}

use super::{
    check_allocation, emit_completeness, emit_determinism, emit_negative_selectors, emit_symmetry, ClauseGroup,
    ClauseSink, CnfInstance, EncodingError, EncodingKind, EncodingMeta, VarMap,
};
use crate::automata::{Acceptor, Apta};

/// Prefix-tree coloring encoding. Transition variables `y` share the layout
/// of the `e` variables of the reduced encoding.
pub fn encode_apta_legacy(
    apta: &Apta,
    allocation: &[usize],
    symmetry: bool,
) -> Result<CnfInstance, EncodingError> {
    check_allocation(allocation)?;
    let q = apta.num_states();
    let sigma = apta.alphabet_size();
    let positive = apta.accepting();
    let negative = apta.rejecting();
    let vars = VarMap::new(q, sigma, allocation, &negative, symmetry);
    let n = allocation.len();
    let mut sink = ClauseSink::new(vars.num_vars());
    let tree_edges: Vec<(usize, usize, usize)> = (0..q)
        .filter_map(|v| apta.parent(v).map(|(p, l)| (p, l, v)))
        .collect();

    sink.group(ClauseGroup::Legacy(1));
    for &v in &positive {
        for k in 0..n {
            for i in 0..vars.dfa_states(k) {
                sink.add(vec![vars.x(k, v, i).neg(), vars.z(k, i).pos()]);
            }
        }
    }

    sink.group(ClauseGroup::Legacy(2));
    emit_negative_selectors(&mut sink, &vars, &negative);

    sink.group(ClauseGroup::Legacy(3));
    for v in 0..q {
        for k in 0..n {
            sink.add((0..vars.dfa_states(k)).map(|i| vars.x(k, v, i).pos()).collect());
        }
    }

    sink.group(ClauseGroup::Legacy(4));
    for &(p, l, v) in &tree_edges {
        for k in 0..n {
            let m = vars.dfa_states(k);
            for i in 0..m {
                for j in 0..m {
                    sink.add(vec![
                        vars.x(k, p, i).neg(),
                        vars.x(k, v, j).neg(),
                        vars.e(k, l, i, j).pos(),
                    ]);
                }
            }
        }
    }

    sink.group(ClauseGroup::Legacy(5));
    emit_determinism(&mut sink, &vars);

    sink.group(ClauseGroup::Legacy(6));
    for v in 0..q {
        for k in 0..n {
            let m = vars.dfa_states(k);
            for i in 0..m {
                for j in i + 1..m {
                    sink.add(vec![vars.x(k, v, i).neg(), vars.x(k, v, j).neg()]);
                }
            }
        }
    }

    sink.group(ClauseGroup::Legacy(7));
    emit_completeness(&mut sink, &vars);

    sink.group(ClauseGroup::Legacy(8));
    for &(p, l, v) in &tree_edges {
        for k in 0..n {
            let m = vars.dfa_states(k);
            for i in 0..m {
                for j in 0..m {
                    sink.add(vec![
                        vars.x(k, p, i).neg(),
                        vars.e(k, l, i, j).neg(),
                        vars.x(k, v, j).pos(),
                    ]);
                }
            }
        }
    }

    sink.group(ClauseGroup::Legacy(9));
    for &vn in &negative {
        for &vp in &positive {
            for k in 0..n {
                for i in 0..vars.dfa_states(k) {
                    sink.add(vec![
                        vars.x(k, vn, i).neg(),
                        vars.z(k, i).pos(),
                        vars.x(k, vp, i).neg(),
                    ]);
                }
            }
        }
    }

    // The root must be colored with the initial state, otherwise a model
    // describes DFAs started from an arbitrary state.
    sink.group(ClauseGroup::T1);
    for k in 0..n {
        sink.add(vec![vars.x(k, apta.initial(), 0).pos()]);
    }

    emit_symmetry(&mut sink, &vars);

    let meta = EncodingMeta {
        kind: EncodingKind::AptaLegacy,
        allocation: allocation.to_vec(),
        acceptor_states: q,
        alphabet_size: sigma,
        symmetry,
    };
    Ok(sink.finish(vars, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Dfa;
    use crate::encoding::{decode, encoding_stats};
    use crate::samples::{parse_samples, LabeledSamples, SampleFormat};
    use crate::sat::{solve, SatStatus, SolverConfig};

    fn fixture() -> LabeledSamples {
        parse_samples("+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n", SampleFormat::Lines).unwrap()
    }

    #[test]
    fn thirty_two_state_variables() {
        let inst = encode_apta_legacy(&Apta::build(&fixture()), &[2, 2], false).unwrap();
        assert_eq!(inst.var_map.e(0, 0, 0, 0).id() - 1, 32);
    }

    #[test]
    fn rejects_tiny_allocation() {
        let apta = Apta::build(&fixture());
        assert!(matches!(
            encode_apta_legacy(&apta, &[1, 2], false),
            Err(EncodingError::AllocationTooSmall { .. })
        ));
    }

    #[test]
    fn group_labels() {
        let inst = encode_apta_legacy(&Apta::build(&fixture()), &[2, 2], true).unwrap();
        let labels: Vec<String> = encoding_stats(&inst).groups.into_iter().map(|(g, _)| g).collect();
        assert_eq!(labels, ["1", "2", "3", "4", "5", "6", "7", "8", "9", "T1", "SYM"]);
    }

    #[test]
    fn solves_fixture_with_two_pairs() {
        let samples = fixture();
        for symmetry in [false, true] {
            let inst = encode_apta_legacy(&Apta::build(&samples), &[2, 2], symmetry).unwrap();
            let r = solve(&inst.cnf, &SolverConfig::builtin()).unwrap();
            assert_eq!(r.status, SatStatus::Sat);
            let d = decode(&inst, r.assignment.as_ref().unwrap()).unwrap();
            assert!(d.verify(&samples).is_consistent());
        }
    }

    /// Colors every prefix-tree state by running the given DFAs on its
    /// prefix, then checks the resulting assignment against every clause.
    #[test]
    fn hand_built_model_satisfies_encoding() {
        let samples = fixture();
        let apta = Apta::build(&samples);
        let a1 = Dfa::new(vec![vec![1, 0], vec![1, 1]], vec![false, true]).unwrap();
        let a2 = Dfa::new(vec![vec![1, 1], vec![0, 1]], vec![false, true]).unwrap();
        let dfas = [a1, a2];
        let inst = encode_apta_legacy(&apta, &[2, 2], false).unwrap();
        let vm = &inst.var_map;
        let mut model = vec![false; inst.num_vars() as usize + 1];
        for (k, dfa) in dfas.iter().enumerate() {
            for v in 0..apta.num_states() {
                model[vm.x(k, v, dfa.run(apta.prefix_of(v))).index()] = true;
            }
            for i in 0..2 {
                model[vm.z(k, i).index()] = dfa.is_accepting(i);
                for l in 0..2 {
                    model[vm.e(k, l, i, dfa.next(i, l)).index()] = true;
                }
            }
        }
        for v in apta.rejecting() {
            let word = apta.prefix_of(v);
            let k = dfas.iter().position(|d| !d.accepts(word)).unwrap();
            model[vm.selector(v, k).unwrap().index()] = true;
        }
        assert_eq!(inst.cnf.first_falsified(&model), None);
        let d = decode(&inst, &model).unwrap();
        assert!(d.verify(&samples).is_consistent());
    }
}

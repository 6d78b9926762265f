use super::{
    check_allocation, emit_completeness, emit_determinism, emit_negative_selectors, emit_symmetry, ClauseGroup,
    ClauseSink, CnfInstance, EncodingError, EncodingKind, EncodingMeta, VarMap,
};
use crate::automata::{Acceptor, ThreeDfa};

/// Encodes the existence of a decomposition with the given allocation that
/// agrees with every accepting and rejecting state of `acceptor`.
pub fn encode_3dfa(
    acceptor: &ThreeDfa,
    allocation: &[usize],
    symmetry: bool,
) -> Result<CnfInstance, EncodingError> {
    check_allocation(allocation)?;
    let q = acceptor.num_states();
    let sigma = acceptor.alphabet_size();
    let accepting = acceptor.accepting();
    let rejecting = acceptor.rejecting();
    let vars = VarMap::new(q, sigma, allocation, &rejecting, symmetry);
    let n = allocation.len();
    let mut sink = ClauseSink::new(vars.num_vars());

    sink.group(ClauseGroup::D1);
    emit_determinism(&mut sink, &vars);
    sink.group(ClauseGroup::D2);
    emit_completeness(&mut sink, &vars);

    sink.group(ClauseGroup::R1);
    for &v in &accepting {
        for k in 0..n {
            for i in 0..vars.dfa_states(k) {
                sink.add(vec![vars.x(k, v, i).neg(), vars.z(k, i).pos()]);
            }
        }
    }

    sink.group(ClauseGroup::R2);
    emit_negative_selectors(&mut sink, &vars, &rejecting);

    sink.group(ClauseGroup::T1);
    for k in 0..n {
        sink.add(vec![vars.x(k, acceptor.initial(), 0).pos()]);
    }

    sink.group(ClauseGroup::T2);
    for v in 0..q {
        for k in 0..n {
            sink.add((0..vars.dfa_states(k)).map(|i| vars.x(k, v, i).pos()).collect());
        }
    }

    sink.group(ClauseGroup::T3);
    for v in 0..q {
        let out = acceptor.outgoing(v);
        for k in 0..n {
            let m = vars.dfa_states(k);
            for i in 0..m {
                for j in 0..m {
                    for &(a, w) in &out {
                        sink.add(vec![
                            vars.x(k, v, i).neg(),
                            vars.e(k, a, i, j).neg(),
                            vars.x(k, w, j).pos(),
                        ]);
                    }
                }
            }
        }
    }

    sink.group(ClauseGroup::O1Restricted);
    for v in (0..q).filter(|&v| !acceptor.is_merged(v)) {
        for k in 0..n {
            let m = vars.dfa_states(k);
            for i in 0..m {
                for j in i + 1..m {
                    sink.add(vec![vars.x(k, v, i).neg(), vars.x(k, v, j).neg()]);
                }
            }
        }
    }

    emit_symmetry(&mut sink, &vars);

    let meta = EncodingMeta {
        kind: EncodingKind::ThreeDfa,
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
    use crate::automata::{reduce_to_3dfa, Apta};
    use crate::encoding::{decode, encoding_stats};
    use crate::samples::{parse_samples, LabeledSamples, SampleFormat};
    use crate::sat::{solve, SatStatus, SolverConfig};

    fn fixture() -> LabeledSamples {
        parse_samples("+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n", SampleFormat::Lines).unwrap()
    }

    fn fixture_3dfa() -> ThreeDfa {
        reduce_to_3dfa(&Apta::build(&fixture()))
    }

    #[test]
    fn variable_counts() {
        let inst = encode_3dfa(&fixture_3dfa(), &[2, 2], false).unwrap();
        let vm = &inst.var_map;
        assert_eq!(vm.x(0, 0, 0).id(), 1);
        assert_eq!(vm.e(0, 0, 0, 0).id(), 1 + 28);
        assert_eq!(vm.z(0, 0).id(), 1 + 28 + 16);
        assert_eq!(vm.num_vars(), 28 + 16 + 4 + 4);
        assert_eq!(inst.num_vars(), 52);
    }

    #[test]
    fn group_sizes() {
        let t = fixture_3dfa();
        let inst = encode_3dfa(&t, &[2, 2], false).unwrap();
        assert_eq!(inst.group_count(ClauseGroup::T1), 2);
        assert_eq!(inst.group_count(ClauseGroup::D2), 8);
        assert_eq!(inst.group_count(ClauseGroup::D1), 8);
        // six unmerged states, two DFAs, one pair each
        assert_eq!(inst.group_count(ClauseGroup::O1Restricted), 12);
        assert_eq!(inst.group_count(ClauseGroup::Symmetry), 0);
        let stats = encoding_stats(&inst);
        let labels: Vec<&str> = stats.groups.iter().map(|(g, _)| g.as_str()).collect();
        assert_eq!(labels, ["D1", "D2", "R1", "R2", "T1", "T2", "T3", "O1'"]);
        assert_eq!(stats.groups.iter().map(|(_, c)| c).sum::<usize>(), stats.num_clauses);
    }

    #[test]
    fn o1_skips_merged_state() {
        let t = fixture_3dfa();
        let merged = t.merged()[0];
        let inst = encode_3dfa(&t, &[2], false).unwrap();
        let vm = &inst.var_map;
        assert!(!inst.clauses().contains(&vec![vm.x(0, merged, 0).neg(), vm.x(0, merged, 1).neg()]));
        for v in (0..t.num_states()).filter(|&v| v != merged) {
            assert!(inst.clauses().contains(&vec![vm.x(0, v, 0).neg(), vm.x(0, v, 1).neg()]));
        }
    }

    #[test]
    fn d1_is_cubic() {
        let t = fixture_3dfa();
        let small = encode_3dfa(&t, &[8], false).unwrap().group_count(ClauseGroup::D1) as f64;
        let large = encode_3dfa(&t, &[16], false).unwrap().group_count(ClauseGroup::D1) as f64;
        let ratio = large / small;
        assert!((7.0..9.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn bad_allocations() {
        let t = fixture_3dfa();
        assert_eq!(encode_3dfa(&t, &[], false).unwrap_err(), EncodingError::EmptyAllocation);
        assert!(matches!(
            encode_3dfa(&t, &[1, 2], false),
            Err(EncodingError::AllocationTooSmall { index: 0, size: 1 })
        ));
    }

    #[test]
    fn fixture_is_decomposable_into_two_pairs() {
        let samples = fixture();
        for symmetry in [false, true] {
            let inst = encode_3dfa(&fixture_3dfa(), &[2, 2], symmetry).unwrap();
            let r = solve(&inst.cnf, &SolverConfig::builtin()).unwrap();
            assert_eq!(r.status, SatStatus::Sat);
            let d = decode(&inst, r.assignment.as_ref().unwrap()).unwrap();
            assert!(d.verify(&samples).is_consistent());
            assert_eq!(d.allocation(), vec![2, 2]);
        }
    }

    #[test]
    fn no_single_two_state_dfa_for_fixture() {
        let inst = encode_3dfa(&fixture_3dfa(), &[2], true).unwrap();
        let r = solve(&inst.cnf, &SolverConfig::builtin()).unwrap();
        assert_eq!(r.status, SatStatus::Unsat);
    }

    #[test]
    fn all_rejecting_acceptance_is_infeasible_with_positives() {
        let inst = encode_3dfa(&fixture_3dfa(), &[2, 2], false).unwrap();
        let r = solve(&inst.cnf, &SolverConfig::builtin()).unwrap();
        let mut model = r.assignment.unwrap();
        for k in 0..2 {
            for i in 0..2 {
                model[inst.var_map.z(k, i).index()] = false;
            }
        }
        assert!(!inst.cnf.is_satisfied_by(&model));
    }

    #[test]
    fn malformed_model() {
        let inst = encode_3dfa(&fixture_3dfa(), &[2], false).unwrap();
        let model = vec![false; inst.num_vars() as usize + 1];
        assert!(matches!(decode(&inst, &model), Err(EncodingError::MalformedModel(_))));
        assert!(matches!(decode(&inst, &[false]), Err(EncodingError::MalformedModel(_))));
    }

    #[test]
    fn dimacs_carries_meta() {
        let inst = encode_3dfa(&fixture_3dfa(), &[2, 3], true).unwrap();
        let text = inst.to_dimacs();
        assert!(text.starts_with("c encoding 3dfa\nc allocation 2,3\n"));
        assert!(text.contains("c group SYM "));
        assert!(text.contains(&format!("p cnf {} {}\n", inst.num_vars(), inst.num_clauses())));
    }
}

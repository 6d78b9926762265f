//! CNF encodings of "is there a decomposition with this states allocation
//! consistent with the acceptor", plus decoding of models.
//!
//! Two encoders share one variable layout: [`encode_3dfa`] works on the
//! reduced three-valued automaton, [`encode_apta_legacy`] on the prefix tree.
//! Both can append DFS-order symmetry breaking clauses.

mod legacy;
mod symmetry;
mod three_dfa;

use std::fmt;

use thiserror::Error;

use crate::automata::{Decomposition, Dfa, StateId};
use crate::sat::dimacs::write_dimacs;
use crate::sat::{Cnf, Lit, Var};

pub use legacy::encode_apta_legacy;
pub use symmetry::encode_symmetry;
pub use three_dfa::encode_3dfa;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("allocation is empty")]
    EmptyAllocation,
    #[error("allocation entry {index} is {size}; every DFA needs at least 2 states")]
    AllocationTooSmall { index: usize, size: usize },
    #[error("allocation {0:?} is not in ascending order")]
    NotAscending(Vec<usize>),
    #[error("malformed model: {0}")]
    MalformedModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingKind {
    ThreeDfa,
    AptaLegacy,
}

impl EncodingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EncodingKind::ThreeDfa => "3dfa",
            EncodingKind::AptaLegacy => "apta",
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named families of clauses, used for size accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseGroup {
    D1,
    D2,
    R1,
    R2,
    T1,
    T2,
    T3,
    O1Restricted,
    /// Prefix-tree encoding constraint 1 to 9.
    Legacy(u8),
    Symmetry,
}

impl ClauseGroup {
    pub fn label(self) -> String {
        match self {
            ClauseGroup::D1 => "D1".into(),
            ClauseGroup::D2 => "D2".into(),
            ClauseGroup::R1 => "R1".into(),
            ClauseGroup::R2 => "R2".into(),
            ClauseGroup::T1 => "T1".into(),
            ClauseGroup::T2 => "T2".into(),
            ClauseGroup::T3 => "T3".into(),
            ClauseGroup::O1Restricted => "O1'".into(),
            ClauseGroup::Legacy(n) => n.to_string(),
            ClauseGroup::Symmetry => "SYM".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PerDfa {
    states: usize,
    x: u32,
    e: u32,
    z: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SymBlock {
    p: u32,
    t: u32,
    m: u32,
}

/// Variable layout. Blocks appear in the order x, e, z, selectors, then
/// symmetry auxiliaries p, t, msym; inside each block indices run
/// lexicographically. All ids are 1-based and contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    acceptor_states: usize,
    alphabet_size: usize,
    dfas: Vec<PerDfa>,
    selector_base: u32,
    selector_index: Vec<Option<usize>>,
    sym: Option<Vec<SymBlock>>,
    next_free: u32,
}

fn pairs(m: usize) -> usize {
    m * (m - 1) / 2
}

impl VarMap {
    pub(crate) fn new(
        acceptor_states: usize,
        alphabet_size: usize,
        allocation: &[usize],
        selector_states: &[StateId],
        symmetry: bool,
    ) -> VarMap {
        let mut next: u32 = 1;
        let mut take = |count: usize| {
            let base = next;
            next += count as u32;
            base
        };
        let mut dfas: Vec<PerDfa> = allocation
            .iter()
            .map(|&m| PerDfa {
                states: m,
                x: 0,
                e: 0,
                z: 0,
            })
            .collect();
        for d in &mut dfas {
            d.x = take(acceptor_states * d.states);
        }
        for d in &mut dfas {
            d.e = take(alphabet_size * d.states * d.states);
        }
        for d in &mut dfas {
            d.z = take(d.states);
        }
        let selector_base = take(selector_states.len() * allocation.len());
        let mut selector_index = vec![None; acceptor_states];
        for (idx, &v) in selector_states.iter().enumerate() {
            selector_index[v] = Some(idx);
        }
        let sym = symmetry.then(|| {
            let p: Vec<u32> = dfas.iter().map(|d| take(pairs(d.states))).collect();
            let t: Vec<u32> = dfas.iter().map(|d| take(pairs(d.states))).collect();
            let m: Vec<u32> = dfas
                .iter()
                .map(|d| take(alphabet_size * pairs(d.states)))
                .collect();
            (0..dfas.len())
                .map(|k| SymBlock {
                    p: p[k],
                    t: t[k],
                    m: m[k],
                })
                .collect()
        });
        VarMap {
            acceptor_states,
            alphabet_size,
            dfas,
            selector_base,
            selector_index,
            sym,
            next_free: next,
        }
    }

    pub fn num_dfas(&self) -> usize {
        self.dfas.len()
    }

    pub fn dfa_states(&self, k: usize) -> usize {
        self.dfas[k].states
    }

    pub fn acceptor_states(&self) -> usize {
        self.acceptor_states
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn next_free(&self) -> u32 {
        self.next_free
    }

    pub fn num_vars(&self) -> u32 {
        self.next_free - 1
    }

    pub fn has_symmetry(&self) -> bool {
        self.sym.is_some()
    }

    /// Acceptor state `v` is mapped to state `i` of DFA `k`.
    pub fn x(&self, k: usize, v: StateId, i: usize) -> Var {
        let d = &self.dfas[k];
        debug_assert!(v < self.acceptor_states && i < d.states);
        Var::new(d.x + (v * d.states + i) as u32)
    }

    /// DFA `k` moves from `i` to `j` on letter `l`.
    pub fn e(&self, k: usize, l: usize, i: usize, j: usize) -> Var {
        let d = &self.dfas[k];
        debug_assert!(l < self.alphabet_size && i < d.states && j < d.states);
        Var::new(d.e + ((l * d.states + i) * d.states + j) as u32)
    }

    /// State `i` of DFA `k` is accepting.
    pub fn z(&self, k: usize, i: usize) -> Var {
        debug_assert!(i < self.dfas[k].states);
        Var::new(self.dfas[k].z + i as u32)
    }

    /// DFA `k` is the one rejecting the words ending in rejecting state `v`.
    pub fn selector(&self, v: StateId, k: usize) -> Option<Var> {
        self.selector_index[v].map(|idx| Var::new(self.selector_base + (idx * self.dfas.len() + k) as u32))
    }

    fn sym(&self, k: usize) -> &SymBlock {
        &self.sym.as_ref().expect("symmetry variables were not allocated")[k]
    }

    /// `i` is the DFS parent of `j` (`i < j`). Panics without symmetry.
    pub fn p(&self, k: usize, j: usize, i: usize) -> Var {
        debug_assert!(i < j && j < self.dfas[k].states);
        Var::new(self.sym(k).p + (j * (j - 1) / 2 + i) as u32)
    }

    /// Some letter leads from `i` to `j` (`i < j`). Panics without symmetry.
    pub fn t(&self, k: usize, i: usize, j: usize) -> Var {
        let m = self.dfas[k].states;
        debug_assert!(i < j && j < m);
        Var::new(self.sym(k).t + pair_lex(m, i, j) as u32)
    }

    /// `l` is the smallest letter leading from `i` to `j` (`i < j`).
    /// Panics without symmetry.
    pub fn msym(&self, k: usize, l: usize, i: usize, j: usize) -> Var {
        let m = self.dfas[k].states;
        debug_assert!(i < j && j < m && l < self.alphabet_size);
        Var::new(self.sym(k).m + (l * pairs(m) + pair_lex(m, i, j)) as u32)
    }
}

/// Position of `(i, j)`, `i < j < m`, in lexicographic order.
fn pair_lex(m: usize, i: usize, j: usize) -> usize {
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMeta {
    pub kind: EncodingKind,
    pub allocation: Vec<usize>,
    pub acceptor_states: usize,
    pub alphabet_size: usize,
    pub symmetry: bool,
}

#[derive(Debug, Clone)]
pub struct CnfInstance {
    pub cnf: Cnf,
    pub var_map: VarMap,
    pub meta: EncodingMeta,
    groups: Vec<(ClauseGroup, usize)>,
}

impl CnfInstance {
    pub fn num_vars(&self) -> u32 {
        self.cnf.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.cnf.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.cnf.clauses
    }

    /// Clause counts keyed by group, in emission order.
    pub fn group_counts(&self) -> &[(ClauseGroup, usize)] {
        &self.groups
    }

    pub fn group_count(&self, group: ClauseGroup) -> usize {
        self.groups
            .iter()
            .filter(|(g, _)| *g == group)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn to_dimacs(&self) -> String {
        let alloc: Vec<String> = self.meta.allocation.iter().map(|m| m.to_string()).collect();
        let mut comments = vec![
            format!("encoding {}", self.meta.kind),
            format!("allocation {}", alloc.join(",")),
            format!("acceptor_states {}", self.meta.acceptor_states),
            format!("alphabet_size {}", self.meta.alphabet_size),
            format!("symmetry {}", self.meta.symmetry),
        ];
        for (g, c) in &self.groups {
            comments.push(format!("group {} {}", g.label(), c));
        }
        write_dimacs(&self.cnf, &comments)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingStats {
    pub num_vars: u32,
    pub num_clauses: usize,
    pub groups: Vec<(String, usize)>,
}

pub fn encoding_stats(instance: &CnfInstance) -> EncodingStats {
    EncodingStats {
        num_vars: instance.num_vars(),
        num_clauses: instance.num_clauses(),
        groups: instance
            .groups
            .iter()
            .map(|(g, c)| (g.label(), *c))
            .collect(),
    }
}

/// Accumulates clauses and per-group counts.
pub(crate) struct ClauseSink {
    cnf: Cnf,
    groups: Vec<(ClauseGroup, usize)>,
}

impl ClauseSink {
    pub(crate) fn new(num_vars: u32) -> ClauseSink {
        ClauseSink {
            cnf: Cnf::new(num_vars),
            groups: Vec::new(),
        }
    }

    pub(crate) fn group(&mut self, group: ClauseGroup) {
        self.groups.push((group, 0));
    }

    pub(crate) fn add(&mut self, clause: Vec<Lit>) {
        debug_assert!(!clause.is_empty());
        self.cnf.add_clause(clause);
        self.groups.last_mut().expect("group opened before clauses").1 += 1;
    }

    pub(crate) fn extend(&mut self, clauses: Vec<Vec<Lit>>) {
        for c in clauses {
            self.add(c);
        }
    }

    pub(crate) fn finish(self, var_map: VarMap, meta: EncodingMeta) -> CnfInstance {
        CnfInstance {
            cnf: self.cnf,
            var_map,
            meta,
            groups: self.groups,
        }
    }
}

pub(crate) fn check_allocation(allocation: &[usize]) -> Result<(), EncodingError> {
    if allocation.is_empty() {
        return Err(EncodingError::EmptyAllocation);
    }
    if let Some((index, &size)) = allocation.iter().enumerate().find(|(_, &m)| m < 2) {
        return Err(EncodingError::AllocationTooSmall { index, size });
    }
    if allocation.windows(2).any(|w| w[0] > w[1]) {
        return Err(EncodingError::NotAscending(allocation.to_vec()));
    }
    Ok(())
}

/// At most one successor per (DFA, state, letter).
pub(crate) fn emit_determinism(sink: &mut ClauseSink, vars: &VarMap) {
    for k in 0..vars.num_dfas() {
        let m = vars.dfa_states(k);
        for l in 0..vars.alphabet_size() {
            for i in 0..m {
                for j in 0..m {
                    for t in j + 1..m {
                        sink.add(vec![vars.e(k, l, i, j).neg(), vars.e(k, l, i, t).neg()]);
                    }
                }
            }
        }
    }
}

/// At least one successor per (DFA, state, letter).
pub(crate) fn emit_completeness(sink: &mut ClauseSink, vars: &VarMap) {
    for k in 0..vars.num_dfas() {
        let m = vars.dfa_states(k);
        for l in 0..vars.alphabet_size() {
            for i in 0..m {
                sink.add((0..m).map(|j| vars.e(k, l, i, j).pos()).collect());
            }
        }
    }
}

/// Rejection by at least one DFA, via one selector per (state, DFA).
pub(crate) fn emit_negative_selectors(sink: &mut ClauseSink, vars: &VarMap, rejecting: &[StateId]) {
    for &v in rejecting {
        let sel = |k| vars.selector(v, k).expect("selector allocated for rejecting state");
        sink.add((0..vars.num_dfas()).map(|k| sel(k).pos()).collect());
        for k in 0..vars.num_dfas() {
            for i in 0..vars.dfa_states(k) {
                sink.add(vec![sel(k).neg(), vars.x(k, v, i).neg(), vars.z(k, i).neg()]);
            }
        }
    }
}

pub(crate) fn emit_symmetry(sink: &mut ClauseSink, vars: &VarMap) {
    if !vars.has_symmetry() {
        return;
    }
    sink.group(ClauseGroup::Symmetry);
    for k in 0..vars.num_dfas() {
        sink.extend(encode_symmetry(vars, k));
    }
}

/// Reads the decomposition off a model (indexed by variable id, slot 0
/// unused). State 0 of every DFA is initial.
pub fn decode(instance: &CnfInstance, assignment: &[bool]) -> Result<Decomposition, EncodingError> {
    let vars = &instance.var_map;
    if assignment.len() <= vars.num_vars() as usize {
        return Err(EncodingError::MalformedModel(format!(
            "assignment covers {} variables, instance has {}",
            assignment.len().saturating_sub(1),
            vars.num_vars()
        )));
    }
    let val = |v: Var| assignment[v.index()];
    let mut dfas = Vec::with_capacity(vars.num_dfas());
    for k in 0..vars.num_dfas() {
        let m = vars.dfa_states(k);
        let mut delta = vec![vec![0; vars.alphabet_size()]; m];
        for (i, row) in delta.iter_mut().enumerate() {
            for (l, slot) in row.iter_mut().enumerate() {
                let targets: Vec<usize> = (0..m).filter(|&j| val(vars.e(k, l, i, j))).collect();
                match targets.as_slice() {
                    [j] => *slot = *j,
                    _ => {
                        return Err(EncodingError::MalformedModel(format!(
                            "DFA {k}, state {i}, letter {l}: {} successors",
                            targets.len()
                        )))
                    }
                }
            }
        }
        let accepting = (0..m).map(|i| val(vars.z(k, i))).collect();
        let dfa = Dfa::new(delta, accepting).map_err(|e| EncodingError::MalformedModel(e.to_string()))?;
        dfas.push(dfa);
    }
    Decomposition::new(dfas).map_err(|e| EncodingError::MalformedModel(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn var_map_is_a_bijection() {
        let vm = VarMap::new(5, 2, &[2, 3], &[1, 4], true);
        let mut seen = HashSet::new();
        for k in 0..2 {
            let m = vm.dfa_states(k);
            for v in 0..5 {
                for i in 0..m {
                    assert!(seen.insert(vm.x(k, v, i)));
                }
            }
            for l in 0..2 {
                for i in 0..m {
                    for j in 0..m {
                        assert!(seen.insert(vm.e(k, l, i, j)));
                    }
                }
            }
            for i in 0..m {
                assert!(seen.insert(vm.z(k, i)));
            }
            for v in [1, 4] {
                assert!(seen.insert(vm.selector(v, k).unwrap()));
            }
            for j in 0..m {
                for i in 0..j {
                    assert!(seen.insert(vm.p(k, j, i)));
                    assert!(seen.insert(vm.t(k, i, j)));
                    for l in 0..2 {
                        assert!(seen.insert(vm.msym(k, l, i, j)));
                    }
                }
            }
        }
        assert_eq!(vm.selector(0, 0), None);
        let ids: HashSet<u32> = seen.iter().map(|v| v.id()).collect();
        assert_eq!(ids, (1..vm.next_free()).collect());
    }

    #[test]
    fn blocks_are_ordered() {
        let vm = VarMap::new(3, 2, &[2, 2], &[2], true);
        assert_eq!(vm.x(0, 0, 0).id(), 1);
        assert!(vm.x(1, 2, 1) < vm.e(0, 0, 0, 0));
        assert!(vm.e(1, 1, 1, 1) < vm.z(0, 0));
        assert!(vm.z(1, 1) < vm.selector(2, 0).unwrap());
        assert!(vm.selector(2, 1).unwrap() < vm.p(0, 1, 0));
        assert!(vm.p(1, 1, 0) < vm.t(0, 0, 1));
        assert_eq!(pair_lex(4, 0, 1), 0);
        assert_eq!(pair_lex(4, 0, 3), 2);
        assert_eq!(pair_lex(4, 1, 2), 3);
        assert_eq!(pair_lex(4, 2, 3), 5);
    }

    #[test]
    fn allocation_checks() {
        assert_eq!(check_allocation(&[]), Err(EncodingError::EmptyAllocation));
        assert_eq!(
            check_allocation(&[1, 2]),
            Err(EncodingError::AllocationTooSmall { index: 0, size: 1 })
        );
        assert!(matches!(check_allocation(&[3, 2]), Err(EncodingError::NotAscending(_))));
        assert!(check_allocation(&[2, 2, 5]).is_ok());
    }
}

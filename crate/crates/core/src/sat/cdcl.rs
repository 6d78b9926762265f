//! A compact CDCL solver: two watched literals, first-UIP learning with local
//! minimization, VSIDS branching with phase saving, Luby restarts and
//! LBD-based learnt clause reduction.

use std::time::Instant;

use super::{Cnf, SatStatus};

const NO_REASON: u32 = u32::MAX;

/// Internal literal: `2 * var + sign`, with `var` zero-based and sign 1 for
/// negative literals.
type ILit = u32;

#[inline]
fn ivar(l: ILit) -> usize {
    (l >> 1) as usize
}

struct Clause {
    lits: Vec<ILit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
    lbd: u32,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: ILit,
}

/// Max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && act[self.heap[r]] > act[self.heap[l]] { r } else { l };
            if act[self.heap[child]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    // Finite subsequence containing index i, then its position within it.
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1u64 << seq
}

pub struct Cdcl {
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<ILit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    num_learnts: usize,
    max_learnts: f64,
    pub conflicts: u64,
    pub decisions: u64,
}

impl Cdcl {
    pub fn new(cnf: &Cnf) -> Cdcl {
        let n = cnf.num_vars as usize;
        let mut s = Cdcl {
            num_vars: n,
            clauses: Vec::with_capacity(cnf.clauses.len()),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![0; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::new(n),
            phase: vec![false; n],
            seen: vec![false; n],
            ok: true,
            num_learnts: 0,
            max_learnts: (cnf.clauses.len() as f64 / 3.0).max(2000.0),
            conflicts: 0,
            decisions: 0,
        };
        for clause in &cnf.clauses {
            let lits: Vec<ILit> = clause
                .iter()
                .map(|l| {
                    let v = l.var().index() as u32 - 1;
                    2 * v + u32::from(!l.is_positive())
                })
                .collect();
            s.add_input_clause(lits);
            if !s.ok {
                break;
            }
        }
        s
    }

    #[inline]
    fn value(&self, l: ILit) -> i8 {
        let v = self.assigns[ivar(l)];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    fn add_input_clause(&mut self, mut lits: Vec<ILit>) {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return; // tautology
        }
        match lits.len() {
            0 => self.ok = false,
            1 => match self.value(lits[0]) {
                1 => {}
                -1 => self.ok = false,
                _ => self.enqueue(lits[0], NO_REASON),
            },
            _ => {
                self.attach(Clause {
                    lits,
                    learnt: false,
                    deleted: false,
                    activity: 0.0,
                    lbd: 0,
                });
            }
        }
    }

    fn attach(&mut self, clause: Clause) -> u32 {
        let cref = self.clauses.len() as u32;
        let (a, b) = (clause.lits[0], clause.lits[1]);
        self.watches[a as usize].push(Watch { cref, blocker: b });
        self.watches[b as usize].push(Watch { cref, blocker: a });
        if clause.learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(clause);
        cref
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: ILit, reason: u32) {
        let v = ivar(l);
        self.assigns[v] = if l & 1 == 1 { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let false_lit = self.trail[self.qhead] ^ 1;
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let assigns = &self.assigns;
                let val = |l: ILit| {
                    let v = assigns[ivar(l)];
                    if l & 1 == 1 {
                        -v
                    } else {
                        v
                    }
                };
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if first != w.blocker && val(first) == 1 {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if val(lits[k]) != -1 {
                        lits.swap(1, k);
                        self.watches[lits[1] as usize].push(Watch { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch { cref: w.cref, blocker: first };
                j += 1;
                if val(first) == -1 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<ILit>, u32) {
        let mut learnt: Vec<ILit> = vec![0];
        let mut path = 0usize;
        let mut p: Option<ILit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl as usize);
            let skip = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[skip..] {
                let v = ivar(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[ivar(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            confl = self.reason[ivar(lit)];
            self.seen[ivar(lit)] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = p.unwrap() ^ 1;

        // Drop literals implied by others already in the clause.
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            let r = self.reason[ivar(l)];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..]
                    .iter()
                    .all(|&q| self.seen[ivar(q)] || self.level[ivar(q)] == 0);
            if !redundant {
                kept.push(l);
            }
        }
        for &l in &learnt {
            self.seen[ivar(l)] = false;
        }
        let mut learnt = kept;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[ivar(learnt[i])] > self.level[ivar(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[ivar(learnt[1])]
        };
        (learnt, bt)
    }

    fn lbd(&self, lits: &[ILit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|&l| self.level[ivar(l)]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let stop = self.trail_lim[level as usize];
        for i in (stop..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = ivar(l);
            self.assigns[v] = 0;
            self.reason[v] = NO_REASON;
            self.phase[v] = l & 1 == 0;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(stop);
        self.trail_lim.truncate(level as usize);
        self.qhead = stop;
    }

    fn locked(&self, cref: usize) -> bool {
        let first = self.clauses[cref].lits[0];
        self.value(first) == 1 && self.reason[ivar(first)] == cref as u32
    }

    fn reduce_db(&mut self) {
        let mut candidates: Vec<usize> = (0..self.clauses.len())
            .filter(|&c| {
                let cl = &self.clauses[c];
                cl.learnt && !cl.deleted && cl.lbd > 2 && !self.locked(c)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a], &self.clauses[b]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap())
        });
        for &c in &candidates[..candidates.len() / 2] {
            let cl = &mut self.clauses[c];
            cl.deleted = true;
            cl.lits = Vec::new();
            self.num_learnts -= 1;
        }
        self.max_learnts *= 1.1;
    }

    fn pick_branch(&mut self) -> Option<ILit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == 0 {
                return Some(2 * v as u32 + u32::from(!self.phase[v]));
            }
        }
        None
    }

    fn model(&self) -> Vec<bool> {
        let mut out = vec![false; self.num_vars + 1];
        for v in 0..self.num_vars {
            out[v + 1] = self.assigns[v] == 1;
        }
        out
    }

    /// Runs to completion or until `deadline`. The model is indexed by
    /// DIMACS variable id.
    pub fn solve(mut self, deadline: Option<Instant>) -> (SatStatus, Option<Vec<bool>>) {
        if !self.ok {
            return (SatStatus::Unsat, None);
        }
        let mut restart = 0u64;
        let mut budget = 100 * luby(restart);
        let mut since_restart = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    return (SatStatus::Unsat, None);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let cref = self.attach(Clause {
                        lits: learnt,
                        learnt: true,
                        deleted: false,
                        activity: 0.0,
                        lbd,
                    });
                    self.bump_clause(cref as usize);
                    self.enqueue(asserting, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.conflicts.is_multiple_of(64) {
                    if let Some(d) = deadline {
                        if Instant::now() >= d {
                            return (
                                SatStatus::Unknown {
                                    reason: "timeout".into(),
                                },
                                None,
                            );
                        }
                    }
                }
            } else {
                if since_restart >= budget {
                    self.cancel_until(0);
                    restart += 1;
                    budget = 100 * luby(restart);
                    since_restart = 0;
                }
                if self.num_learnts as f64 >= self.max_learnts {
                    self.reduce_db();
                }
                match self.pick_branch() {
                    None => return (SatStatus::Sat, Some(self.model())),
                    Some(lit) => {
                        self.decisions += 1;
                        if self.decisions.is_multiple_of(1024) {
                            if let Some(d) = deadline {
                                if Instant::now() >= d {
                                    return (
                                        SatStatus::Unknown {
                                            reason: "timeout".into(),
                                        },
                                        None,
                                    );
                                }
                            }
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(lit, NO_REASON);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::Lit;
    use proptest::prelude::*;

    fn cnf(num_vars: u32, clauses: &[&[i32]]) -> Cnf {
        Cnf {
            num_vars,
            clauses: clauses
                .iter()
                .map(|c| c.iter().map(|&l| Lit::from_dimacs(l)).collect())
                .collect(),
        }
    }

    fn brute_force(cnf: &Cnf) -> bool {
        let n = cnf.num_vars;
        (0u64..1 << n).any(|bits| {
            let a: Vec<bool> = (0..=n).map(|v| v > 0 && bits >> (v - 1) & 1 == 1).collect();
            cnf.is_satisfied_by(&a)
        })
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn pigeonhole_3_into_2_unsat() {
        // p(i,h) = pigeon i in hole h, var = 2*i + h + 1
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        for i in 0..3 {
            clauses.push(vec![2 * i + 1, 2 * i + 2]);
        }
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    clauses.push(vec![-(2 * i + h + 1), -(2 * j + h + 1)]);
                }
            }
        }
        let refs: Vec<&[i32]> = clauses.iter().map(|c| c.as_slice()).collect();
        let (status, _) = Cdcl::new(&cnf(6, &refs)).solve(None);
        assert_eq!(status, SatStatus::Unsat);
    }

    #[test]
    fn chain_of_implications() {
        let f = cnf(4, &[&[1], &[-1, 2], &[-2, 3], &[-3, 4]]);
        let (status, model) = Cdcl::new(&f).solve(None);
        assert_eq!(status, SatStatus::Sat);
        assert_eq!(model.unwrap(), vec![false, true, true, true, true]);
    }

    #[test]
    fn tautologies_and_duplicates() {
        let f = cnf(2, &[&[1, -1], &[2, 2], &[-2, 1, 1]]);
        let (status, model) = Cdcl::new(&f).solve(None);
        assert_eq!(status, SatStatus::Sat);
        assert!(f.is_satisfied_by(&model.unwrap()));
    }

    #[test]
    fn empty_clause_unsat() {
        let f = Cnf { num_vars: 1, clauses: vec![vec![]] };
        assert_eq!(Cdcl::new(&f).solve(None).0, SatStatus::Unsat);
    }

    #[test]
    fn expired_deadline_reports_unknown() {
        // A pigeonhole instance large enough to need many conflicts.
        let (p, h) = (9, 8);
        let var = |i: i32, j: i32| i * h + j + 1;
        let mut f = Cnf::new((p * h) as u32);
        for i in 0..p {
            f.add_clause((0..h).map(|j| Lit::from_dimacs(var(i, j))).collect());
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    f.add_clause(vec![Lit::from_dimacs(-var(a, j)), Lit::from_dimacs(-var(b, j))]);
                }
            }
        }
        let (status, _) = Cdcl::new(&f).solve(Some(Instant::now()));
        assert!(matches!(status, SatStatus::Unknown { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn agrees_with_brute_force(clauses in prop::collection::vec(
            prop::collection::vec((1i32..=8, any::<bool>()), 1..4), 1..40)) {
            let f = Cnf {
                num_vars: 8,
                clauses: clauses
                    .into_iter()
                    .map(|c| c.into_iter().map(|(v, s)| Lit::from_dimacs(if s { v } else { -v })).collect())
                    .collect(),
            };
            let (status, model) = Cdcl::new(&f).solve(None);
            let expected = brute_force(&f);
            prop_assert_eq!(status == SatStatus::Sat, expected);
            if let Some(m) = model {
                prop_assert!(f.is_satisfied_by(&m));
            }
        }
    }
}

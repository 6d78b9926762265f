//! DFS-order symmetry breaking. State 0 is the root; every other state `j`
//! has as parent the largest `i < j` with a transition `i -> j`, children of
//! one parent are numbered in the order of the smallest letter leading to
//! them, and no state between a parent and its child reaches past the child.
//! Every DFA is isomorphic to one numbered this way once its unreachable
//! states are made reachable, which never costs extra states.

use super::VarMap;
use crate::sat::Lit;

/// Symmetry breaking clauses for DFA `k`.
pub fn encode_symmetry(vars: &VarMap, k: usize) -> Vec<Vec<Lit>> {
    let m = vars.dfa_states(k);
    let sigma = vars.alphabet_size();
    let mut out = Vec::new();

    // every non-root state has a smaller parent
    for j in 1..m {
        out.push((0..j).map(|i| vars.p(k, j, i).pos()).collect());
    }

    // p[j][i] <-> t[i][j] and no t[h][j] for i < h < j
    for j in 1..m {
        for i in 0..j {
            let p = vars.p(k, j, i);
            out.push(vec![p.neg(), vars.t(k, i, j).pos()]);
            for h in i + 1..j {
                out.push(vec![p.neg(), vars.t(k, h, j).neg()]);
            }
            let mut back = vec![p.pos(), vars.t(k, i, j).neg()];
            back.extend((i + 1..j).map(|h| vars.t(k, h, j).pos()));
            out.push(back);
        }
    }

    // t[i][j] <-> some letter leads from i to j
    for i in 0..m {
        for j in i + 1..m {
            let t = vars.t(k, i, j);
            let mut fwd = vec![t.neg()];
            fwd.extend((0..sigma).map(|l| vars.e(k, l, i, j).pos()));
            out.push(fwd);
            for l in 0..sigma {
                out.push(vec![t.pos(), vars.e(k, l, i, j).neg()]);
            }
        }
    }

    // states between parent and child do not reach past the child
    for i in 0..m {
        for h in i + 1..m {
            for j in h + 1..m {
                for q in j + 1..m {
                    out.push(vec![vars.p(k, j, i).neg(), vars.t(k, h, q).neg()]);
                }
            }
        }
    }

    // msym[l][i][j] <-> e[l][i][j] and no smaller letter leads from i to j
    for i in 0..m {
        for j in i + 1..m {
            for l in 0..sigma {
                let ms = vars.msym(k, l, i, j);
                out.push(vec![ms.neg(), vars.e(k, l, i, j).pos()]);
                for l2 in 0..l {
                    out.push(vec![ms.neg(), vars.e(k, l2, i, j).neg()]);
                }
                let mut back = vec![ms.pos(), vars.e(k, l, i, j).neg()];
                back.extend((0..l).map(|l2| vars.e(k, l2, i, j).pos()));
                out.push(back);
            }
        }
    }

    // siblings j < q of parent i: the letter into j is smaller
    for i in 0..m {
        for j in i + 1..m {
            for q in j + 1..m {
                for r in 0..sigma {
                    for s in r + 1..sigma {
                        out.push(vec![
                            vars.p(k, j, i).neg(),
                            vars.p(k, q, i).neg(),
                            vars.msym(k, s, i, j).neg(),
                            vars.msym(k, r, i, q).neg(),
                        ]);
                    }
                }
            }
        }
    }
    out
}

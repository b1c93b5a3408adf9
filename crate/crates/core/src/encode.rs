//! CNF encodings: negation of a CNF with selector variables, the
//! incremental totalizer and pseudo-Boolean upper bounds.

use crate::cnf::{Clause, Cnf, Lit};

/// Encodes `¬m` over fresh selectors `z_j` starting at `first_fresh`:
/// `(z_1 ∨ … ∨ z_k)` plus `(¬z_j ∨ ¬l)` for every literal `l` of the
/// `j`-th clause. Returns the clauses and the number of fresh variables.
///
/// An empty `m` yields the empty clause.
pub fn encode_negation(m: &Cnf, first_fresh: u32) -> (Cnf, u32) {
    encode_negation_guarded(m, first_fresh, None)
}

/// Like [`encode_negation`], but the selector disjunction is weakened by
/// `¬guard`, so the negation is only enforced while `guard` holds.
pub fn encode_negation_guarded(m: &Cnf, first_fresh: u32, guard: Option<Lit>) -> (Cnf, u32) {
    assert!(
        first_fresh > m.num_vars(),
        "fresh variables overlap the formula"
    );
    let mut out = Cnf::new(m.num_vars());
    let selectors: Vec<Lit> = (0..m.len() as u32)
        .map(|j| Lit::positive(first_fresh + j))
        .collect();
    let top = guard
        .map(|g| !g)
        .into_iter()
        .chain(selectors.iter().copied());
    out.push(Clause::new(top).expect("selectors are fresh"));
    for (clause, &z) in m.clauses().iter().zip(&selectors) {
        for &lit in clause {
            out.push(Clause::new([!z, !lit]).expect("selectors are fresh"));
        }
    }
    (out, selectors.len() as u32)
}

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf,
    Internal { left: usize, right: usize },
}

#[derive(Clone, Debug)]
struct TotNode {
    kind: NodeKind,
    size: usize,
    /// `outputs[k - 1]` is implied by "at least `k` inputs are true".
    outputs: Vec<Lit>,
}

/// Totalizer whose unary outputs are built on demand up to a bound.
///
/// Only the upward implications are encoded: `count ≥ k ⇒ o_k`, which is
/// what an upper bound `¬o_k` needs.
#[derive(Clone, Debug)]
pub struct Totalizer {
    nodes: Vec<TotNode>,
    root: usize,
}

impl Totalizer {
    pub fn new(inputs: &[Lit]) -> Totalizer {
        assert!(!inputs.is_empty());
        let mut nodes = Vec::with_capacity(2 * inputs.len());
        let root = Self::build(&mut nodes, inputs);
        Totalizer { nodes, root }
    }

    fn build(nodes: &mut Vec<TotNode>, inputs: &[Lit]) -> usize {
        if inputs.len() == 1 {
            nodes.push(TotNode {
                kind: NodeKind::Leaf,
                size: 1,
                outputs: vec![inputs[0]],
            });
            return nodes.len() - 1;
        }
        let mid = inputs.len() / 2;
        let left = Self::build(nodes, &inputs[..mid]);
        let right = Self::build(nodes, &inputs[mid..]);
        nodes.push(TotNode {
            kind: NodeKind::Internal { left, right },
            size: inputs.len(),
            outputs: Vec::new(),
        });
        nodes.len() - 1
    }

    pub fn num_inputs(&self) -> usize {
        self.nodes[self.root].size
    }

    /// Output `o_k` (1-based), if built.
    pub fn output(&self, k: usize) -> Option<Lit> {
        self.nodes[self.root]
            .outputs
            .get(k.checked_sub(1)?)
            .copied()
    }

    /// Builds outputs up to `min(bound, num_inputs)`, allocating variables
    /// with `fresh` and emitting clauses through `sink`.
    pub fn extend(
        &mut self,
        bound: usize,
        fresh: &mut dyn FnMut() -> Lit,
        sink: &mut dyn FnMut(&[Lit]),
    ) {
        self.extend_node(self.root, bound, fresh, sink);
    }

    fn extend_node(
        &mut self,
        idx: usize,
        bound: usize,
        fresh: &mut dyn FnMut() -> Lit,
        sink: &mut dyn FnMut(&[Lit]),
    ) {
        let target = bound.min(self.nodes[idx].size);
        let built = self.nodes[idx].outputs.len();
        if target <= built {
            return;
        }
        let (left, right) = match self.nodes[idx].kind {
            NodeKind::Leaf => return,
            NodeKind::Internal { left, right } => (left, right),
        };
        self.extend_node(left, target, fresh, sink);
        self.extend_node(right, target, fresh, sink);
        for k in built + 1..=target {
            let o = fresh();
            self.nodes[idx].outputs.push(o);
            let (la, lb) = (&self.nodes[left].outputs, &self.nodes[right].outputs);
            for i in 0..=k.min(la.len()) {
                let j = k - i;
                if j > lb.len() {
                    continue;
                }
                let mut clause = Vec::with_capacity(3);
                if i > 0 {
                    clause.push(!la[i - 1]);
                }
                if j > 0 {
                    clause.push(!lb[j - 1]);
                }
                clause.push(o);
                sink(&clause);
            }
        }
    }
}

/// CNF for `Σ weight·[lit] ≤ bound` with auxiliaries numbered from
/// `first_fresh`. Unit weights use a totalizer, other weights a
/// sequential weighted counter.
pub fn encode_pb(terms: &[(Lit, u64)], bound: u64, first_fresh: u32) -> Cnf {
    let max_input = terms.iter().map(|(l, _)| l.var()).max().unwrap_or(0);
    assert!(
        first_fresh > max_input,
        "fresh variables overlap the inputs"
    );
    let mut out = Cnf::new(max_input);
    let mut next = first_fresh;

    let mut live = Vec::new();
    for &(lit, w) in terms {
        assert!(w >= 1, "pseudo-Boolean weights must be positive");
        if w > bound {
            out.push(Clause::unit(!lit));
        } else {
            live.push((lit, w));
        }
    }
    let total: u64 = live.iter().map(|&(_, w)| w).sum();
    if total <= bound {
        return out;
    }

    if live.iter().all(|&(_, w)| w == 1) {
        let inputs: Vec<Lit> = live.iter().map(|&(l, _)| l).collect();
        let mut tot = Totalizer::new(&inputs);
        let limit = bound as usize + 1;
        let mut clauses: Vec<Vec<Lit>> = Vec::new();
        tot.extend(
            limit,
            &mut || {
                let l = Lit::positive(next);
                next += 1;
                l
            },
            &mut |c| clauses.push(c.to_vec()),
        );
        for c in clauses {
            out.push(Clause::new(c).unwrap());
        }
        out.push(Clause::unit(
            !tot.output(limit).expect("bound below input count"),
        ));
    } else {
        sequential_weighted_counter(&live, bound, &mut next, &mut out);
    }
    out.set_num_vars(out.num_vars().max(next - 1));
    out
}

/// Sequential weighted counter: `s[i][j]` holds when the first `i + 1`
/// terms sum to at least `j + 1`.
fn sequential_weighted_counter(terms: &[(Lit, u64)], bound: u64, next: &mut u32, out: &mut Cnf) {
    let k = bound as usize;
    let n = terms.len();
    let mut s = vec![Vec::with_capacity(k); n];
    for row in s.iter_mut() {
        for _ in 0..k {
            row.push(Lit::positive(*next));
            *next += 1;
        }
    }
    let push = |out: &mut Cnf, lits: &[Lit]| out.push(Clause::new(lits.iter().copied()).unwrap());
    for (i, &(x, w)) in terms.iter().enumerate() {
        let w = w as usize;
        for &sj in &s[i][..w] {
            push(out, &[!x, sj]);
        }
        if i == 0 {
            continue;
        }
        for (&prev, &cur) in s[i - 1].iter().zip(&s[i]) {
            push(out, &[!prev, cur]);
        }
        for j in 0..k.saturating_sub(w) {
            push(out, &[!x, !s[i - 1][j], s[i][j + w]]);
        }
        // overflow: previous sum ≥ k + 1 - w together with x
        push(out, &[!x, !s[i - 1][k - w]]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Assignment;
    use crate::sat::Solver;

    fn cnf(num_vars: u32, clauses: &[&[i32]]) -> Cnf {
        Cnf::from_clauses(
            num_vars,
            clauses
                .iter()
                .map(|c| Clause::from_dimacs(c).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn negation_of_single_clause() {
        let (enc, used) = encode_negation(&cnf(4, &[&[4]]), 5);
        assert_eq!(used, 1);
        assert_eq!(enc.clauses(), cnf(5, &[&[5], &[-5, -4]]).clauses());
    }

    #[test]
    fn negation_of_two_units() {
        let (enc, used) = encode_negation(&cnf(2, &[&[1], &[2]]), 3);
        assert_eq!(used, 2);
        assert_eq!(
            enc.clauses(),
            cnf(4, &[&[3, 4], &[-3, -1], &[-4, -2]]).clauses()
        );
    }

    #[test]
    fn negation_of_empty_is_false() {
        let (enc, used) = encode_negation(&Cnf::new(3), 4);
        assert_eq!(used, 0);
        assert_eq!(enc.len(), 1);
        assert!(enc.clauses()[0].is_empty());
    }

    /// All input projections of the models of `enc`, by enumeration of
    /// the inputs and a SAT call for the auxiliaries.
    fn projections(enc: &Cnf, inputs: u32) -> Vec<u64> {
        let mut out = Vec::new();
        for mask in 0..1u64 << inputs {
            let mut s = Solver::new();
            for c in enc.clauses() {
                s.add_clause(c);
            }
            let assumptions: Vec<Lit> = (1..=inputs)
                .map(|v| {
                    if mask >> (v - 1) & 1 == 1 {
                        Lit::positive(v)
                    } else {
                        Lit::negative(v)
                    }
                })
                .collect();
            if s.solve(&assumptions).is_sat() {
                out.push(mask);
            }
        }
        out
    }

    #[test]
    fn pb_unit_weights_zero_bound() {
        let terms: Vec<(Lit, u64)> = (1..=3).map(|v| (Lit::positive(v), 1)).collect();
        let enc = encode_pb(&terms, 0, 4);
        assert_eq!(enc.clauses(), cnf(3, &[&[-1], &[-2], &[-3]]).clauses());
    }

    #[test]
    fn pb_two_unit_vars_bound_one() {
        let terms = [(Lit::positive(1), 1), (Lit::positive(2), 1)];
        let enc = encode_pb(&terms, 1, 3);
        assert_eq!(projections(&enc, 2), vec![0b00, 0b01, 0b10]);
    }

    #[test]
    fn pb_weights_two_one_bound_two() {
        let terms = [(Lit::positive(1), 2), (Lit::positive(2), 1)];
        let enc = encode_pb(&terms, 2, 3);
        assert_eq!(projections(&enc, 2), vec![0b00, 0b01, 0b10]);
    }

    #[test]
    fn pb_projection_matches_enumeration() {
        let weight_sets: [&[u64]; 4] = [&[1, 1, 1, 1], &[3, 1, 2, 2], &[4, 4, 1], &[2, 5, 3, 1, 1]];
        for weights in weight_sets {
            let n = weights.len() as u32;
            let terms: Vec<(Lit, u64)> = weights
                .iter()
                .enumerate()
                .map(|(i, &w)| (Lit::positive(i as u32 + 1), w))
                .collect();
            let total: u64 = weights.iter().sum();
            for bound in 0..=total + 1 {
                let enc = encode_pb(&terms, bound, n + 1);
                let expected: Vec<u64> = (0..1u64 << n)
                    .filter(|mask| {
                        let a = Assignment::from_bits(*mask, n);
                        terms
                            .iter()
                            .filter(|(l, _)| a.lit_value(*l))
                            .map(|(_, w)| w)
                            .sum::<u64>()
                            <= bound
                    })
                    .collect();
                assert_eq!(
                    projections(&enc, n),
                    expected,
                    "weights {weights:?} bound {bound}"
                );
            }
        }
    }

    #[test]
    fn totalizer_outputs_count() {
        let inputs: Vec<Lit> = (1..=5).map(Lit::positive).collect();
        let mut tot = Totalizer::new(&inputs);
        let mut next = 6;
        let mut clauses: Vec<Vec<Lit>> = Vec::new();
        tot.extend(
            2,
            &mut || {
                let l = Lit::positive(next);
                next += 1;
                l
            },
            &mut |c| clauses.push(c.to_vec()),
        );
        assert!(tot.output(3).is_none());
        tot.extend(
            4,
            &mut || {
                let l = Lit::positive(next);
                next += 1;
                l
            },
            &mut |c| clauses.push(c.to_vec()),
        );
        // with o_3 assumed false, at most two inputs can be true
        for mask in 0..32u64 {
            let mut s = Solver::new();
            for c in &clauses {
                s.add_clause_lits(c);
            }
            let mut assumptions: Vec<Lit> = (1..=5)
                .map(|v| {
                    if mask >> (v - 1) & 1 == 1 {
                        Lit::positive(v)
                    } else {
                        Lit::negative(v)
                    }
                })
                .collect();
            assumptions.push(!tot.output(3).unwrap());
            assert_eq!(s.solve(&assumptions).is_sat(), mask.count_ones() <= 2);
        }
    }
}

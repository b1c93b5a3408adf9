//! Brute-force reference oracles for testing: explanation checking,
//! cost-ordered subset search and 2QBF evaluation.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cnf::{Explanation, Lit, Pap};
use crate::encode::encode_negation;
use crate::error::OracleError;
use crate::qbf::{Formula, QbfFormula, Quantifier};
use crate::sat::Solver;

/// Largest hypothesis set [`bf_solve`] accepts.
pub const MAX_BF_HYPOTHESES: usize = 20;
/// Largest universal block [`bf_eval_2qbf`] accepts.
pub const MAX_QBF_UNIVERSAL: usize = 20;
/// Largest total variable count [`bf_eval_2qbf`] accepts.
pub const MAX_QBF_VARS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    IsExpl,
    NotConsistent,
    NotEntailing,
}

/// Decides whether `s` is an explanation with two fresh SAT calls.
/// Inconsistency is reported before non-entailment.
pub fn bf_check_explanation(p: &Pap, s: &[usize]) -> Result<CheckOutcome, OracleError> {
    if let Some(&i) = s.iter().find(|&&i| i >= p.hypotheses().len()) {
        return Err(OracleError::IndexOutOfRange(i));
    }
    let base = |solver: &mut Solver| {
        solver.ensure_vars(p.num_vars());
        for c in p.theory().clauses() {
            solver.add_clause(c);
        }
        for &i in s {
            solver.add_clause(&p.hypotheses()[i].clause);
        }
    };

    let mut consistency = Solver::new();
    base(&mut consistency);
    if !consistency.solve(&[]).is_sat() {
        return Ok(CheckOutcome::NotConsistent);
    }

    let mut entailment = Solver::new();
    base(&mut entailment);
    let (neg_m, fresh) = encode_negation(p.manifestations(), p.num_vars() + 1);
    entailment.ensure_vars(p.num_vars() + fresh);
    for c in neg_m.clauses() {
        entailment.add_clause(c);
    }
    Ok(if entailment.solve(&[]).is_sat() {
        CheckOutcome::NotEntailing
    } else {
        CheckOutcome::IsExpl
    })
}

/// Minimum-cost explanation by checking subsets of `H` in non-decreasing
/// cost. Subsets of equal cost are checked in lexicographic order of
/// their sorted index lists, so the answer is reproducible.
pub fn bf_solve(p: &Pap) -> Result<Option<Explanation>, OracleError> {
    let n = p.hypotheses().len();
    if n > MAX_BF_HYPOTHESES {
        return Err(OracleError::TooManyHypotheses {
            actual: n,
            limit: MAX_BF_HYPOTHESES,
        });
    }
    let weights = p.weights();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (weights[i], i));

    // Every nonempty subset, as positions into `order`, is reached exactly
    // once from `{0}` by "append next position" or "bump last position".
    let mut heap: BinaryHeap<Reverse<(u64, Vec<usize>)>> = BinaryHeap::new();
    let mut tier_cost = 0;
    let mut tier: Vec<Vec<usize>> = vec![Vec::new()];
    if n > 0 {
        heap.push(Reverse((weights[order[0]], vec![0])));
    }
    loop {
        let next_cost = heap.peek().map(|Reverse((c, _))| *c);
        if next_cost != Some(tier_cost) {
            tier.sort();
            for s in &tier {
                if bf_check_explanation(p, s)? == CheckOutcome::IsExpl {
                    return Ok(Some(Explanation::new(p, s.iter().copied())));
                }
            }
            match next_cost {
                None => return Ok(None),
                Some(c) => {
                    tier_cost = c;
                    tier.clear();
                }
            }
        }
        let Reverse((cost, positions)) = heap.pop().expect("peeked");
        let last = *positions.last().expect("nonempty");
        if last + 1 < n {
            let w_next = weights[order[last + 1]];
            let mut grown = positions.clone();
            grown.push(last + 1);
            heap.push(Reverse((cost + w_next, grown)));
            let mut bumped = positions.clone();
            *bumped.last_mut().expect("nonempty") = last + 1;
            heap.push(Reverse((cost - weights[order[last]] + w_next, bumped)));
        }
        let mut subset: Vec<usize> = positions.iter().map(|&j| order[j]).collect();
        subset.sort_unstable();
        tier.push(subset);
    }
}

/// Truth of a QBF with prefix `∃E ∀U` (either block may be empty).
///
/// The top-level conjuncts split into those mentioning a universal variable
/// and purely existential ones. Existentials occurring in the former are
/// branched first; once they are all set, the mixed conjuncts are checked
/// against every universal assignment, and the remaining existentials only
/// need to satisfy the purely existential part, split into independent
/// components. Branching uses unit propagation over purely existential
/// top-level clauses, and partial evaluation prunes every level.
pub fn bf_eval_2qbf(q: &QbfFormula) -> Result<bool, OracleError> {
    let prefix = q.merged_prefix();
    let (exist, univ): (Vec<u32>, Vec<u32>) = match prefix.as_slice() {
        [] => (vec![], vec![]),
        [b] if b.quantifier == Quantifier::Exists => (b.vars.clone(), vec![]),
        [b] => (vec![], b.vars.clone()),
        [e, a] if e.quantifier == Quantifier::Exists => (e.vars.clone(), a.vars.clone()),
        _ => return Err(OracleError::UnsupportedPrefix),
    };
    if !q.is_closed() {
        return Err(OracleError::UnsupportedPrefix);
    }
    if univ.len() > MAX_QBF_UNIVERSAL {
        return Err(OracleError::TooManyVariables {
            what: "universal",
            actual: univ.len(),
            limit: MAX_QBF_UNIVERSAL,
        });
    }
    if q.num_vars as usize > MAX_QBF_VARS {
        return Err(OracleError::TooManyVariables {
            what: "total",
            actual: q.num_vars as usize,
            limit: MAX_QBF_VARS,
        });
    }
    let mut is_exist = vec![false; q.num_vars as usize + 1];
    for &v in &exist {
        is_exist[v as usize] = true;
    }
    let mut clauses = Vec::new();
    collect_exist_clauses(&q.matrix, &is_exist, &mut clauses);
    let mut conjuncts = Vec::new();
    flatten_and(&q.matrix, &mut conjuncts);
    let (mixed, pure): (Vec<&Formula>, Vec<&Formula>) = conjuncts.into_iter().partition(|f| {
        let mut vars = Vec::new();
        f.collect_vars(&mut vars);
        vars.iter().any(|&v| !is_exist[v as usize])
    });
    let mut linked = vec![false; q.num_vars as usize + 1];
    for f in &mixed {
        let mut vars = Vec::new();
        f.collect_vars(&mut vars);
        for v in vars {
            linked[v as usize] = true;
        }
    }
    let (mut order, rest): (Vec<u32>, Vec<u32>) =
        exist.into_iter().partition(|&v| linked[v as usize]);
    let num_linked = order.len();
    order.extend(rest);
    let mut search = Search {
        matrix: &q.matrix,
        mixed,
        pure,
        clauses,
        exist: order,
        num_linked,
        univ,
        values: vec![None; q.num_vars as usize + 1],
        trail: Vec::new(),
    };
    Ok(search.exists(0))
}

fn flatten_and<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::And(parts) => parts.iter().for_each(|g| flatten_and(g, out)),
        _ => out.push(f),
    }
}

fn collect_exist_clauses(f: &Formula, is_exist: &[bool], out: &mut Vec<Vec<Lit>>) {
    let exist_lit = |g: &Formula| match g {
        Formula::Lit(l) if is_exist.get(l.var() as usize) == Some(&true) => Some(*l),
        _ => None,
    };
    match f {
        Formula::And(parts) => parts
            .iter()
            .for_each(|g| collect_exist_clauses(g, is_exist, out)),
        Formula::Or(parts) => {
            if let Some(lits) = parts.iter().map(exist_lit).collect::<Option<Vec<_>>>() {
                out.push(lits);
            }
        }
        Formula::Lit(_) => out.extend(exist_lit(f).map(|l| vec![l])),
        Formula::Not(_) => {}
    }
}

struct Search<'a> {
    matrix: &'a Formula,
    /// Top-level conjuncts mentioning a universal variable.
    mixed: Vec<&'a Formula>,
    /// Top-level conjuncts over existential variables only.
    pure: Vec<&'a Formula>,
    clauses: Vec<Vec<Lit>>,
    /// Existentials occurring in `mixed` first, `num_linked` of them.
    exist: Vec<u32>,
    num_linked: usize,
    univ: Vec<u32>,
    values: Vec<Option<bool>>,
    trail: Vec<u32>,
}

impl<'a> Search<'a> {
    fn value(&self, f: &Formula) -> Option<bool> {
        f.eval_partial(&|v| self.values[v as usize])
    }

    fn value_all(&self, fs: &[&Formula]) -> Option<bool> {
        let mut unknown = false;
        for f in fs {
            match self.value(f) {
                Some(false) => return Some(false),
                None => unknown = true,
                Some(true) => {}
            }
        }
        if unknown {
            None
        } else {
            Some(true)
        }
    }

    fn assign(&mut self, v: u32, b: bool) {
        self.values[v as usize] = Some(b);
        self.trail.push(v);
    }

    fn undo(&mut self, len: usize) {
        for v in self.trail.drain(len..) {
            self.values[v as usize] = None;
        }
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.values[l.var() as usize].map(|b| b == l.is_positive())
    }

    /// False on a falsified clause.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for i in 0..self.clauses.len() {
                let mut open = None;
                let mut open_count = 0;
                let mut satisfied = false;
                for &l in &self.clauses[i] {
                    match self.lit_value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open = Some(l);
                            open_count += 1;
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open_count, open) {
                    (0, _) => return false,
                    (1, Some(l)) => {
                        self.assign(l.var(), l.is_positive());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Whether the linked existentials at positions `from..` can be set so
    /// that the matrix holds for every universal assignment.
    fn exists(&mut self, from: usize) -> bool {
        let mark = self.trail.len();
        let result = self.exists_inner(from);
        self.undo(mark);
        result
    }

    fn exists_inner(&mut self, from: usize) -> bool {
        if !self.propagate() {
            return false;
        }
        if let Some(b) = self.value(self.matrix) {
            return b;
        }
        match (from..self.num_linked).find(|&i| self.values[self.exist[i] as usize].is_none()) {
            Some(i) => {
                let v = self.exist[i];
                self.branch(v, |s| s.exists(i + 1))
            }
            None => {
                let pure = self.pure.clone();
                self.forall(0) && self.satisfiable(pure)
            }
        }
    }

    fn branch(&mut self, v: u32, mut next: impl FnMut(&mut Self) -> bool) -> bool {
        [false, true].into_iter().any(|b| {
            let mark = self.trail.len();
            self.assign(v, b);
            let found = next(self);
            self.undo(mark);
            found
        })
    }

    /// Whether the existential conjuncts `goals` can be satisfied together.
    fn satisfiable(&mut self, goals: Vec<&'a Formula>) -> bool {
        let mark = self.trail.len();
        let result = self.satisfiable_inner(goals);
        self.undo(mark);
        result
    }

    fn satisfiable_inner(&mut self, goals: Vec<&'a Formula>) -> bool {
        if !self.propagate() {
            return false;
        }
        let mut open = Vec::new();
        for f in goals {
            match self.value(f) {
                Some(false) => return false,
                None => open.push(f),
                Some(true) => {}
            }
        }
        let mut components = self.components(open);
        if components.len() > 1 {
            return components.into_iter().all(|c| self.satisfiable(c));
        }
        let Some(goals) = components.pop() else {
            return true;
        };
        let mut vars = Vec::new();
        goals.iter().for_each(|f| f.collect_vars(&mut vars));
        let v = *vars
            .iter()
            .find(|&&v| self.values[v as usize].is_none())
            .expect("open conjunct has an unassigned variable");
        self.branch(v, |s| s.satisfiable(goals.clone()))
    }

    /// Groups conjuncts that share an unassigned variable, transitively.
    fn components(&self, goals: Vec<&'a Formula>) -> Vec<Vec<&'a Formula>> {
        let mut owner: Vec<Option<usize>> = vec![None; self.values.len()];
        let mut group: Vec<usize> = (0..goals.len()).collect();
        fn root(group: &mut [usize], mut i: usize) -> usize {
            while group[i] != i {
                group[i] = group[group[i]];
                i = group[i];
            }
            i
        }
        for (i, f) in goals.iter().enumerate() {
            let mut vars = Vec::new();
            f.collect_vars(&mut vars);
            for v in vars
                .into_iter()
                .filter(|&v| self.values[v as usize].is_none())
            {
                match owner[v as usize] {
                    None => owner[v as usize] = Some(i),
                    Some(j) => {
                        let (a, b) = (root(&mut group, i), root(&mut group, j));
                        group[a] = b;
                    }
                }
            }
        }
        let mut out: Vec<Vec<&'a Formula>> = Vec::new();
        let mut slot: Vec<Option<usize>> = vec![None; goals.len()];
        for (i, f) in goals.into_iter().enumerate() {
            let r = root(&mut group, i);
            let k = *slot[r].get_or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[k].push(f);
        }
        out
    }

    /// Whether the mixed conjuncts hold under every universal assignment.
    fn forall(&mut self, next: usize) -> bool {
        if let Some(b) = self.value_all(&self.mixed) {
            return b;
        }
        let v = self.univ[next];
        [false, true].into_iter().all(|b| {
            self.values[v as usize] = Some(b);
            let holds = self.forall(next + 1);
            self.values[v as usize] = None;
            holds
        })
    }
}

/// Every subset of `H` that is an explanation, in increasing bitmask order.
/// Exponential; meant for cross-checking on tiny instances.
pub fn all_explanations(p: &Pap) -> Result<Vec<Vec<usize>>, OracleError> {
    let n = p.hypotheses().len();
    if n > MAX_BF_HYPOTHESES {
        return Err(OracleError::TooManyHypotheses {
            actual: n,
            limit: MAX_BF_HYPOTHESES,
        });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if bf_check_explanation(p, &s)? == CheckOutcome::IsExpl {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_apf;
    use crate::gen::{gen_family1, gen_family2};
    use crate::qbf::QuantBlock;

    const EXAMPLE1: &str = "p abd 4\nt -1 4 0\nt -2 -3 4 0\nh 1 1 0\nh 1 2 0\nh 1 3 0\nm 4 0\n";

    #[test]
    fn check_example1() {
        let p = parse_apf(EXAMPLE1).unwrap();
        assert_eq!(
            bf_check_explanation(&p, &[0]).unwrap(),
            CheckOutcome::IsExpl
        );
        assert_eq!(
            bf_check_explanation(&p, &[1]).unwrap(),
            CheckOutcome::NotEntailing
        );
        assert_eq!(
            bf_check_explanation(&p, &[1, 2]).unwrap(),
            CheckOutcome::IsExpl
        );
        assert_eq!(
            bf_check_explanation(&p, &[]).unwrap(),
            CheckOutcome::NotEntailing
        );
        assert!(matches!(
            bf_check_explanation(&p, &[3]),
            Err(OracleError::IndexOutOfRange(3))
        ));
    }

    #[test]
    fn family1_full_set_is_inconsistent() {
        let p = gen_family1(1).unwrap();
        assert_eq!(
            bf_check_explanation(&p, &[0, 1, 2, 3]).unwrap(),
            CheckOutcome::NotConsistent
        );
    }

    #[test]
    fn solve_examples() {
        let e = bf_solve(&parse_apf(EXAMPLE1).unwrap()).unwrap().unwrap();
        assert_eq!((e.indices(), e.cost()), (&[0][..], 1));
        assert_eq!(bf_solve(&gen_family1(2).unwrap()).unwrap(), None);
        let p = gen_family2(1).unwrap();
        let e = bf_solve(&p).unwrap().unwrap();
        assert_eq!((e.indices(), e.cost()), (&[0, 1][..], 2));
    }

    #[test]
    fn family2_proper_subsets_fail() {
        let p = gen_family2(2).unwrap();
        assert_eq!(all_explanations(&p).unwrap(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(bf_solve(&p).unwrap().unwrap().cost(), 4);
    }

    #[test]
    fn ties_break_lexicographically() {
        // (x1) and (x2) each explain (x1 ∨ x2) at cost 2; (x3) costs 1 but
        // does not explain.
        let p = parse_apf("p abd 3\nh 2 2 0\nh 2 1 0\nh 1 3 0\nm 1 2 0\n").unwrap();
        assert_eq!(bf_solve(&p).unwrap().unwrap().indices(), &[0]);
    }

    #[test]
    fn solve_refuses_large_h() {
        let text: String = std::iter::once("p abd 1\n".to_string())
            .chain((0..21).map(|_| "h 1 1 0\n".to_string()))
            .collect();
        assert!(matches!(
            bf_solve(&parse_apf(&text).unwrap()),
            Err(OracleError::TooManyHypotheses { actual: 21, .. })
        ));
    }

    fn qbf(prefix: Vec<(Quantifier, Vec<u32>)>, matrix: Formula, num_vars: u32) -> QbfFormula {
        QbfFormula {
            prefix: prefix
                .into_iter()
                .map(|(quantifier, vars)| QuantBlock { quantifier, vars })
                .collect(),
            matrix,
            num_vars,
        }
    }

    #[test]
    fn trivial_qbfs() {
        let x = Formula::Lit(Lit::new(1));
        let y = Formula::Lit(Lit::new(2));
        assert!(bf_eval_2qbf(&qbf(vec![(Quantifier::Exists, vec![1])], x.clone(), 1)).unwrap());
        let q = qbf(
            vec![(Quantifier::Exists, vec![1]), (Quantifier::Forall, vec![2])],
            y,
            2,
        );
        assert!(!bf_eval_2qbf(&q).unwrap());
        let q = qbf(
            vec![(Quantifier::Forall, vec![1]), (Quantifier::Exists, vec![2])],
            x.clone(),
            2,
        );
        assert_eq!(bf_eval_2qbf(&q), Err(OracleError::UnsupportedPrefix));
        assert!(bf_eval_2qbf(&qbf(vec![], Formula::And(vec![]), 0)).unwrap());
    }
}

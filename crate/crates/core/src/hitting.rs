//! Minimum-cost hitting sets over hypothesis indices, MCS enumeration and
//! counterexample reduction, all served by the OLL engine.

use std::collections::BTreeSet;

use crate::cnf::{Assignment, Clause, Cnf, Lit};
use crate::error::{HardUnsat, HittingSetError};
use crate::maxsat::{MaxSatResult, OllSolver, OllStats};
use crate::sat::{SatResult, Solver};

/// Hypothesis indices falsified by some model; a set to hit.
pub type CorrectionSet = Vec<usize>;

/// Incremental minimum-cost hitting-set extractor with a background
/// theory.
///
/// Relaxation variable `r_i` true means hypothesis `i` is picked. Every
/// `r_i` carries the soft literal `¬r_i` with the hypothesis weight, so
/// the optimum is a cheapest selection satisfying the background, every
/// set to hit `(∨ r_i)` and every block `(∨ ¬r_i)`.
#[derive(Clone, Debug)]
pub struct HittingSetContext {
    oll: OllSolver,
    r_vars: Vec<Lit>,
    weights: Vec<u64>,
    sets: Vec<Vec<usize>>,
    blocks: Vec<Vec<usize>>,
}

impl HittingSetContext {
    /// `background` is over variables that include `r_vars`.
    pub fn new(weights: &[u64], r_vars: Vec<Lit>, background: &Cnf, seed: u64) -> Self {
        assert_eq!(weights.len(), r_vars.len());
        let mut oll = OllSolver::new(seed);
        oll.add_hard_cnf(background);
        for (&r, &w) in r_vars.iter().zip(weights) {
            oll.add_soft(!r, w);
        }
        HittingSetContext {
            oll,
            r_vars,
            weights: weights.to_vec(),
            sets: Vec::new(),
            blocks: Vec::new(),
        }
    }

    /// Context without background theory; `r_i` is variable `i + 1`.
    pub fn without_background(weights: &[u64], seed: u64) -> Self {
        let r_vars = (1..=weights.len() as u32).map(Lit::positive).collect();
        Self::new(weights, r_vars, &Cnf::new(weights.len() as u32), seed)
    }

    pub fn len(&self) -> usize {
        self.r_vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_vars.is_empty()
    }

    pub fn r_var(&self, i: usize) -> Lit {
        self.r_vars[i]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn maxsat_stats(&self) -> &OllStats {
        self.oll.stats()
    }

    fn check(&self, set: &[usize]) -> Result<(), HittingSetError> {
        match set.iter().find(|&&i| i >= self.r_vars.len()) {
            Some(&i) => Err(HittingSetError::IndexOutOfRange(i)),
            None => Ok(()),
        }
    }

    /// Requires every later candidate to intersect `set`.
    pub fn add_set(&mut self, set: &[usize]) -> Result<(), HittingSetError> {
        if set.is_empty() {
            return Err(HittingSetError::EmptySet);
        }
        self.check(set)?;
        let lits: Vec<Lit> = set.iter().map(|&i| self.r_vars[i]).collect();
        self.oll.add_hard_lits(&lits);
        self.sets.push(set.to_vec());
        Ok(())
    }

    /// Excludes `set` and all its supersets from later candidates.
    pub fn add_block(&mut self, set: &[usize]) -> Result<(), HittingSetError> {
        if set.is_empty() {
            return Err(HittingSetError::EmptyBlock);
        }
        self.check(set)?;
        let lits: Vec<Lit> = set.iter().map(|&i| !self.r_vars[i]).collect();
        self.oll.add_hard_lits(&lits);
        self.blocks.push(set.to_vec());
        Ok(())
    }

    /// Next minimum-cost candidate as sorted indices and cost, or `None`
    /// when background, sets and blocks are jointly unsatisfiable.
    pub fn next_candidate(&mut self) -> Option<(Vec<usize>, u64)> {
        match self.oll.solve() {
            MaxSatResult::HardUnsat => None,
            MaxSatResult::Optimum { model, cost } => {
                let picked: Vec<usize> = (0..self.r_vars.len())
                    .filter(|&i| model.lit_value(self.r_vars[i]))
                    .collect();
                debug_assert_eq!(cost, picked.iter().map(|&i| self.weights[i]).sum::<u64>());
                Some((picked, cost))
            }
        }
    }
}

/// Enumerates up to `limit` minimal correction subsets of `(hard, soft)`
/// in non-decreasing size. Each MCS is blocked before the next one is
/// computed. Returns an empty list if `hard ∧ soft` is satisfiable.
pub fn enumerate_mcs(
    hard: &Cnf,
    soft: &[(Clause, u64)],
    limit: usize,
) -> Result<Vec<CorrectionSet>, HardUnsat> {
    let base = hard
        .num_vars()
        .max(soft.iter().map(|(c, _)| c.max_var()).max().unwrap_or(0));
    let mut oll = OllSolver::new(0);
    oll.add_hard_cnf(hard);
    oll.ensure_vars(base);
    let selectors: Vec<Lit> = (1..=soft.len() as u32)
        .map(|i| Lit::positive(base + i))
        .collect();
    oll.ensure_vars(base + soft.len() as u32);
    for ((clause, _), &s) in soft.iter().zip(&selectors) {
        oll.add_hard(&clause.with_extra(!s));
        oll.add_soft(s, 1);
    }

    let mut out = Vec::new();
    while out.len() < limit {
        match oll.solve() {
            MaxSatResult::HardUnsat if out.is_empty() => return Err(HardUnsat),
            MaxSatResult::HardUnsat => break,
            MaxSatResult::Optimum { cost: 0, .. } => break,
            MaxSatResult::Optimum { model, .. } => {
                let mcs: Vec<usize> = (0..soft.len())
                    .filter(|&i| !model.lit_value(selectors[i]))
                    .collect();
                let block: Vec<Lit> = mcs.iter().map(|&i| selectors[i]).collect();
                oll.add_hard_lits(&block);
                out.push(mcs);
            }
        }
    }
    if limit == 0 {
        // still report a contradictory hard part
        let mut s = Solver::new();
        for c in hard.clauses() {
            s.add_clause(c);
        }
        if !s.solve(&[]).is_sat() {
            return Err(HardUnsat);
        }
    }
    Ok(out)
}

/// Linear-search reduction of a correction set, bounded by a budget.
///
/// `solver` must contain the hard clauses and, for every soft clause `i`,
/// the relaxed clause `(¬relax[i] ∨ C_i)`. `model` satisfies the hard part
/// and falsifies exactly `falsified`. The first `⌈fraction·m⌉` members of
/// `falsified` in ascending (weight, index) order are examined; each one
/// still in the set is tried with one SAT call that also keeps every
/// currently satisfied clause, and on success it leaves the set together
/// with every other clause the new model satisfies.
///
/// Returns the reduced set and the number of SAT calls made.
pub fn reduce_with_solver(
    solver: &mut Solver,
    relax: &[Lit],
    soft: &[&Clause],
    model: &Assignment,
    falsified: &[usize],
    weights: &[u64],
    fraction: f64,
) -> (CorrectionSet, u64) {
    assert!(
        (0.0..=1.0).contains(&fraction),
        "fraction must lie in [0, 1]"
    );
    let m = falsified.len();
    let budget = ((fraction * m as f64).ceil() as usize).min(m);
    if budget == 0 {
        return (falsified.to_vec(), 0);
    }
    let mut order = falsified.to_vec();
    order.sort_by_key(|&i| (weights[i], i));
    let mut current: BTreeSet<usize> = falsified.iter().copied().collect();
    let mut satisfied: BTreeSet<usize> = (0..soft.len()).filter(|i| !current.contains(i)).collect();
    debug_assert!(satisfied.iter().all(|&i| soft[i].is_satisfied_by(model)));

    let mut calls = 0;
    for &cand in order.iter().take(budget) {
        if !current.contains(&cand) {
            continue;
        }
        let assumptions: Vec<Lit> = satisfied
            .iter()
            .chain(std::iter::once(&cand))
            .map(|&i| relax[i])
            .collect();
        calls += 1;
        if let SatResult::Sat(mu) = solver.solve(&assumptions) {
            let moved: Vec<usize> = current
                .iter()
                .copied()
                .filter(|&i| soft[i].is_satisfied_by(&mu))
                .collect();
            debug_assert!(moved.contains(&cand));
            for i in moved {
                current.remove(&i);
                satisfied.insert(i);
            }
        }
    }
    (current.into_iter().collect(), calls)
}

/// Reduces `falsified` for the partial formula `(hard, soft)`; see
/// [`reduce_with_solver`].
pub fn reduce_correction_set(
    hard: &Cnf,
    model: &Assignment,
    falsified: &[usize],
    soft: &[(Clause, u64)],
    fraction: f64,
) -> CorrectionSet {
    let base = hard
        .num_vars()
        .max(soft.iter().map(|(c, _)| c.max_var()).max().unwrap_or(0))
        .max(model.num_vars());
    let mut solver = Solver::new();
    solver.ensure_vars(base);
    for c in hard.clauses() {
        solver.add_clause(c);
    }
    let relax: Vec<Lit> = (1..=soft.len() as u32)
        .map(|i| Lit::positive(base + i))
        .collect();
    for ((c, _), &r) in soft.iter().zip(&relax) {
        solver.add_clause(&c.with_extra(!r));
    }
    let clauses: Vec<&Clause> = soft.iter().map(|(c, _)| c).collect();
    let weights: Vec<u64> = soft.iter().map(|(_, w)| *w).collect();
    reduce_with_solver(
        &mut solver,
        &relax,
        &clauses,
        model,
        falsified,
        &weights,
        fraction,
    )
    .0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(v: &[i32]) -> Clause {
        Clause::from_dimacs(v).unwrap()
    }

    fn cnf(num_vars: u32, clauses: &[&[i32]]) -> Cnf {
        Cnf::from_clauses(num_vars, clauses.iter().map(|c| clause(c)).collect()).unwrap()
    }

    #[test]
    fn candidate_hits_added_set() {
        let mut hs = HittingSetContext::without_background(&[1, 1, 1], 0);
        hs.add_set(&[1, 2]).unwrap();
        let (s, cost) = hs.next_candidate().unwrap();
        assert_eq!(cost, 1);
        assert!(s.contains(&1) || s.contains(&2));
    }

    #[test]
    fn two_singletons_force_both() {
        let mut hs = HittingSetContext::without_background(&[1, 1, 1], 0);
        hs.add_set(&[1]).unwrap();
        hs.add_set(&[2]).unwrap();
        assert_eq!(hs.next_candidate(), Some((vec![1, 2], 2)));
    }

    #[test]
    fn overlapping_sets_pick_shared_element() {
        // brute force over 8 subsets of {1,2,3}: only {2} has cost 1
        let mut hs = HittingSetContext::without_background(&[1, 1, 1, 1], 0);
        hs.add_set(&[1, 2]).unwrap();
        hs.add_set(&[2, 3]).unwrap();
        assert_eq!(hs.next_candidate(), Some((vec![2], 1)));
    }

    #[test]
    fn blocks_exclude_supersets() {
        let mut hs = HittingSetContext::without_background(&[1, 1, 1], 0);
        hs.add_block(&[1]).unwrap();
        hs.add_set(&[0, 1]).unwrap();
        let (s, _) = hs.next_candidate().unwrap();
        assert!(!s.contains(&1));

        let mut hs = HittingSetContext::without_background(&[1, 1], 0);
        hs.add_block(&[0, 1]).unwrap();
        hs.add_set(&[0, 1]).unwrap();
        let (s, _) = hs.next_candidate().unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn sets_and_block_conflict() {
        let mut hs = HittingSetContext::without_background(&[1, 1, 1], 0);
        hs.add_set(&[1]).unwrap();
        hs.add_set(&[2]).unwrap();
        hs.add_block(&[1, 2]).unwrap();
        assert_eq!(hs.next_candidate(), None);
    }

    #[test]
    fn empty_set_and_block_rejected() {
        let mut hs = HittingSetContext::without_background(&[1], 0);
        assert_eq!(hs.add_set(&[]), Err(HittingSetError::EmptySet));
        assert_eq!(hs.add_block(&[]), Err(HittingSetError::EmptyBlock));
        assert_eq!(hs.add_set(&[3]), Err(HittingSetError::IndexOutOfRange(3)));
    }

    #[test]
    fn unit_weight_empty_background() {
        let mut hs = HittingSetContext::without_background(&[1, 1], 0);
        assert_eq!(hs.next_candidate(), Some((vec![], 0)));
    }

    #[test]
    fn mcs_of_conflicting_units() {
        let hard = cnf(2, &[&[-1, -2]]);
        let soft = vec![(clause(&[1]), 1), (clause(&[2]), 1)];
        let mut all = enumerate_mcs(&hard, &soft, 10).unwrap();
        all.sort();
        assert_eq!(all, vec![vec![0], vec![1]]);
        let one = enumerate_mcs(&hard, &soft, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].len(), 1);
    }

    #[test]
    fn mcs_of_satisfiable_formula_is_empty() {
        let soft = vec![(clause(&[1]), 1)];
        assert_eq!(enumerate_mcs(&Cnf::new(1), &soft, 10), Ok(vec![]));
    }

    #[test]
    fn mcs_hard_unsat() {
        let hard = cnf(1, &[&[1], &[-1]]);
        assert_eq!(
            enumerate_mcs(&hard, &[(clause(&[1]), 1)], 5),
            Err(HardUnsat)
        );
        assert_eq!(
            enumerate_mcs(&hard, &[(clause(&[1]), 1)], 0),
            Err(HardUnsat)
        );
    }

    #[test]
    fn reduction_zero_budget_is_identity() {
        let hard = cnf(2, &[&[-1, -2]]);
        let soft = vec![(clause(&[1]), 1), (clause(&[2]), 1)];
        let model = Assignment::all_false(2);
        assert_eq!(
            reduce_correction_set(&hard, &model, &[0, 1], &soft, 0.0),
            vec![0, 1]
        );
    }

    #[test]
    fn reduction_migrates_one_clause() {
        let hard = cnf(2, &[&[-1, -2]]);
        let soft = vec![(clause(&[1]), 1), (clause(&[2]), 1)];
        let model = Assignment::all_false(2);
        let reduced = reduce_correction_set(&hard, &model, &[0, 1], &soft, 1.0);
        assert_eq!(reduced, vec![1]);
    }

    #[test]
    fn reduction_keeps_conflicting_clauses() {
        // both soft clauses contradict the hard part on their own
        let hard = cnf(2, &[&[-1], &[-2]]);
        let soft = vec![(clause(&[1]), 1), (clause(&[2]), 1)];
        let model = Assignment::all_false(2);
        assert_eq!(
            reduce_correction_set(&hard, &model, &[0, 1], &soft, 1.0),
            vec![0, 1]
        );
    }
}

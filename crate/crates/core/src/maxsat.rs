//! Core-guided weighted MaxSAT (OLL with incremental totalizers).
//!
//! Soft constraints are literals that should be true. Each unsatisfiable
//! core raises the lower bound by its minimum weight, lowers the weight of
//! every core member by that amount (members with residual weight stay as
//! soft literals) and relaxes the core with a totalizer whose `≥ 2`
//! output becomes a new soft literal. When a totalizer output shows up in
//! a later core, the next output of the same totalizer is added.
//!
//! The engine is incremental: hard clauses and soft literals may be added
//! after a solve, and the lower bound accumulated so far stays valid.

use std::collections::HashMap;

use crate::cnf::{Assignment, Clause, Cnf, Lit};
use crate::encode::Totalizer;
use crate::sat::{SatResult, Solver};

/// Maximum number of re-solves spent shrinking one core.
pub const MAX_CORE_TRIMS: usize = 5;

/// A weighted MaxSAT instance over soft literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MaxSatInstance {
    pub hard: Cnf,
    pub soft: Vec<(Lit, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxSatResult {
    Optimum { model: Assignment, cost: u64 },
    HardUnsat,
}

impl MaxSatResult {
    pub fn cost(&self) -> Option<u64> {
        match self {
            MaxSatResult::Optimum { cost, .. } => Some(*cost),
            MaxSatResult::HardUnsat => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OllStats {
    pub sat_calls: u64,
    pub cores: u64,
    /// Trim re-solves per core, in core order.
    pub trims_per_core: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct SumRef {
    totalizer: usize,
    /// The soft literal is `¬o_bound`.
    bound: usize,
}

/// Incremental OLL engine.
#[derive(Clone, Debug)]
pub struct OllSolver {
    sat: Solver,
    /// Original objective, used to price models.
    objective: Vec<(Lit, u64)>,
    /// Current soft literals in insertion order, with remaining weight.
    softs: Vec<(Lit, u64)>,
    soft_index: HashMap<Lit, usize>,
    totalizers: Vec<Totalizer>,
    sums: HashMap<Lit, SumRef>,
    lower_bound: u64,
    stats: OllStats,
}

impl Default for OllSolver {
    fn default() -> Self {
        OllSolver::new(0)
    }
}

impl OllSolver {
    pub fn new(seed: u64) -> OllSolver {
        OllSolver {
            sat: Solver::with_seed(seed),
            objective: Vec::new(),
            softs: Vec::new(),
            soft_index: HashMap::new(),
            totalizers: Vec::new(),
            sums: HashMap::new(),
            lower_bound: 0,
            stats: OllStats::default(),
        }
    }

    pub fn stats(&self) -> &OllStats {
        &self.stats
    }

    pub fn lower_bound(&self) -> u64 {
        self.lower_bound
    }

    pub fn sat_solver_mut(&mut self) -> &mut Solver {
        &mut self.sat
    }

    pub fn ensure_vars(&mut self, n: u32) {
        self.sat.ensure_vars(n);
    }

    pub fn add_hard(&mut self, clause: &Clause) {
        self.sat.add_clause(clause);
    }

    pub fn add_hard_lits(&mut self, lits: &[Lit]) {
        self.sat.add_clause_lits(lits);
    }

    pub fn add_hard_cnf(&mut self, cnf: &Cnf) {
        self.sat.ensure_vars(cnf.num_vars());
        for c in cnf.clauses() {
            self.sat.add_clause(c);
        }
    }

    /// Adds a soft literal: falsifying it costs `weight`.
    pub fn add_soft(&mut self, lit: Lit, weight: u64) {
        assert!(weight >= 1, "soft weights must be positive");
        self.sat.ensure_vars(lit.var());
        self.objective.push((lit, weight));
        self.bump_soft(lit, weight);
    }

    fn bump_soft(&mut self, lit: Lit, weight: u64) {
        match self.soft_index.get(&lit) {
            Some(&i) => self.softs[i].1 += weight,
            None => {
                self.soft_index.insert(lit, self.softs.len());
                self.softs.push((lit, weight));
            }
        }
    }

    /// Cost of `model` under the original objective.
    pub fn cost_of(&self, model: &Assignment) -> u64 {
        self.objective
            .iter()
            .filter(|(l, _)| !model.lit_value(*l))
            .map(|(_, w)| w)
            .sum()
    }

    fn sat_solve(&mut self, assumptions: &[Lit]) -> SatResult {
        self.stats.sat_calls += 1;
        self.sat.solve(assumptions)
    }

    /// Re-solves with the core as assumptions while it keeps shrinking,
    /// at most [`MAX_CORE_TRIMS`] times.
    fn trim(&mut self, mut core: Vec<Lit>) -> Vec<Lit> {
        let mut trims = 0;
        while trims < MAX_CORE_TRIMS && core.len() > 1 {
            trims += 1;
            match self.sat_solve(&core) {
                SatResult::Unsat(smaller) if smaller.len() < core.len() => core = smaller,
                _ => break,
            }
        }
        self.stats.trims_per_core.push(trims);
        core
    }

    /// Computes an optimum model of the hard clauses, or `HardUnsat`.
    pub fn solve(&mut self) -> MaxSatResult {
        loop {
            let assumptions: Vec<Lit> = self
                .softs
                .iter()
                .filter(|(_, w)| *w > 0)
                .map(|&(l, _)| l)
                .collect();
            let core = match self.sat_solve(&assumptions) {
                SatResult::Sat(model) => {
                    let cost = self.cost_of(&model);
                    debug_assert_eq!(cost, self.lower_bound, "reformulated objective out of sync");
                    return MaxSatResult::Optimum { model, cost };
                }
                SatResult::Unsat(core) if core.is_empty() => return MaxSatResult::HardUnsat,
                SatResult::Unsat(core) => core,
            };
            self.stats.cores += 1;
            let core = self.trim(core);
            self.relax(&core);
        }
    }

    fn relax(&mut self, core: &[Lit]) {
        let min_w = core
            .iter()
            .map(|l| self.softs[self.soft_index[l]].1)
            .min()
            .expect("empty core");
        self.lower_bound += min_w;
        for l in core {
            let idx = self.soft_index[l];
            self.softs[idx].1 -= min_w;
        }

        // next bound of every totalizer output in the core
        for l in core {
            if let Some(sum) = self.sums.get(l).copied() {
                let next = sum.bound + 1;
                if let Some(out) = self.extend_totalizer(sum.totalizer, next) {
                    self.sums.insert(
                        !out,
                        SumRef {
                            totalizer: sum.totalizer,
                            bound: next,
                        },
                    );
                    self.bump_soft(!out, min_w);
                }
            }
        }

        if core.len() > 1 {
            let inputs: Vec<Lit> = core.iter().map(|&l| !l).collect();
            self.totalizers.push(Totalizer::new(&inputs));
            let t = self.totalizers.len() - 1;
            if let Some(out) = self.extend_totalizer(t, 2) {
                self.sums.insert(
                    !out,
                    SumRef {
                        totalizer: t,
                        bound: 2,
                    },
                );
                self.bump_soft(!out, min_w);
            }
        }
    }

    /// Builds output `o_bound` of totalizer `t`, if the bound is below its
    /// input count.
    fn extend_totalizer(&mut self, t: usize, bound: usize) -> Option<Lit> {
        if bound > self.totalizers[t].num_inputs() {
            return None;
        }
        let sat = &mut self.sat;
        let mut clauses: Vec<Vec<Lit>> = Vec::new();
        let mut fresh_vars: Vec<Lit> = Vec::new();
        {
            let mut next = sat.num_vars();
            let mut fresh = || {
                next += 1;
                let l = Lit::positive(next);
                fresh_vars.push(l);
                l
            };
            self.totalizers[t].extend(bound, &mut fresh, &mut |c| clauses.push(c.to_vec()));
        }
        if let Some(last) = fresh_vars.last() {
            sat.ensure_vars(last.var());
        }
        for c in &clauses {
            sat.add_clause_lits(c);
        }
        self.totalizers[t].output(bound)
    }
}

/// One-shot weighted MaxSAT.
pub fn solve_maxsat(inst: &MaxSatInstance) -> MaxSatResult {
    let mut oll = OllSolver::new(0);
    oll.add_hard_cnf(&inst.hard);
    for &(l, w) in &inst.soft {
        oll.add_soft(l, w);
    }
    oll.solve()
}

/// Turns soft clauses into soft literals: each non-unit soft clause `C`
/// gets a fresh selector `b` with hard clause `(¬b ∨ C)` and soft `b`.
pub fn instance_from_clauses(hard: &Cnf, soft: &[(Clause, u64)]) -> MaxSatInstance {
    let mut num_vars = hard
        .num_vars()
        .max(soft.iter().map(|(c, _)| c.max_var()).max().unwrap_or(0));
    let mut out_hard = hard.clone();
    let mut out_soft = Vec::with_capacity(soft.len());
    for (c, w) in soft {
        if c.len() == 1 {
            out_soft.push((c.lits()[0], *w));
        } else {
            num_vars += 1;
            let b = Lit::positive(num_vars);
            out_hard.push(c.with_extra(!b));
            out_soft.push((b, *w));
        }
    }
    out_hard.set_num_vars(num_vars);
    MaxSatInstance {
        hard: out_hard,
        soft: out_soft,
    }
}

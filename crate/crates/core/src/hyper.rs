//! The Hyper abduction loop: minimum-cost hitting sets computed over the
//! background `T ∧ M ∧ H′`, so every candidate is consistent, and a single
//! entailment check per iteration.

use std::time::{Duration, Instant};

use crate::cnf::{Assignment, Clause, Cnf, Explanation, Lit, Pap};
use crate::encode::encode_negation;
use crate::hitting::{enumerate_mcs, reduce_with_solver, CorrectionSet, HittingSetContext};
use crate::sat::{SatResult, Solver};

#[derive(Clone, Debug, PartialEq)]
pub struct HyperOptions {
    /// Share of each counterexample examined for reduction; 0 disables.
    pub reduce_fraction: f64,
    /// Number of MCSes used to seed the hitting-set solver; 0 disables.
    pub bootstrap_mcs: usize,
    pub preprocess_m: bool,
    pub preprocess_h: bool,
    pub seed: u64,
}

impl HyperOptions {
    /// Plain Hyper: every optimization off.
    pub fn hyper() -> HyperOptions {
        HyperOptions {
            reduce_fraction: 0.0,
            bootstrap_mcs: 0,
            preprocess_m: false,
            preprocess_h: false,
            seed: 0,
        }
    }

    /// Hyper*: 100 bootstrap MCSes and reduction of a fifth of each
    /// counterexample.
    pub fn hyper_star() -> HyperOptions {
        HyperOptions {
            reduce_fraction: 0.2,
            bootstrap_mcs: 100,
            ..HyperOptions::hyper()
        }
    }
}

impl Default for HyperOptions {
    fn default() -> Self {
        HyperOptions::hyper()
    }
}

/// Counters shared by Hyper and the baselines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub iterations: u64,
    pub type1_counterexamples: u64,
    pub type2_counterexamples: u64,
    pub hs_calls: u64,
    pub sat_calls: u64,
    pub bootstrap_mcs_found: u64,
    pub wall_time: Duration,
}

/// An instance after entailment preprocessing. `kept[j]` is the original
/// index of hypothesis `j` of `pap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preprocessed {
    pub pap: Pap,
    pub kept: Vec<usize>,
}

fn entailed_by(theory: &Cnf, clause: &Clause, num_vars: u32) -> bool {
    let mut solver = Solver::new();
    solver.ensure_vars(num_vars);
    for c in theory.clauses() {
        solver.add_clause(c);
    }
    let negated: Vec<Lit> = clause.lits().iter().map(|&l| !l).collect();
    !solver.solve(&negated).is_sat()
}

/// Drops manifestations and hypotheses entailed by `T`, as enabled in
/// `opts`. An entailed manifestation holds under every consistent
/// candidate; an entailed hypothesis only adds cost.
pub fn preprocess_entailed(p: &Pap, opts: &HyperOptions) -> Preprocessed {
    let n = p.num_vars();
    let manifs: Vec<Clause> = p
        .manifestations()
        .clauses()
        .iter()
        .filter(|c| !(opts.preprocess_m && entailed_by(p.theory(), c, n)))
        .cloned()
        .collect();
    let kept: Vec<usize> = (0..p.hypotheses().len())
        .filter(|&i| !(opts.preprocess_h && entailed_by(p.theory(), &p.hypotheses()[i].clause, n)))
        .collect();
    let hyps = kept
        .iter()
        .map(|&i| (p.hypotheses()[i].clause.clone(), p.hypotheses()[i].weight))
        .collect();
    let pap = Pap::new(n, p.theory().clauses().to_vec(), hyps, manifs)
        .expect("subset of a valid instance");
    Preprocessed { pap, kept }
}

/// Indices of every hypothesis that `model` falsifies.
pub fn extract_counterexample(p: &Pap, model: &Assignment) -> CorrectionSet {
    p.falsified_hypotheses(model)
}

fn consistent_with_manifestations(p: &Pap, s: &[usize]) -> bool {
    let mut solver = Solver::new();
    solver.ensure_vars(p.num_vars());
    let clauses = p
        .theory()
        .clauses()
        .iter()
        .chain(p.manifestations().clauses())
        .chain(s.iter().map(|&i| &p.hypotheses()[i].clause));
    for c in clauses {
        solver.add_clause(c);
    }
    solver.solve(&[]).is_sat()
}

/// Minimum-cost explanation of `p`, or `None` when none exists.
pub fn solve_hyper(p: &Pap, opts: &HyperOptions) -> (Option<Explanation>, SolveStats) {
    assert!(
        (0.0..=1.0).contains(&opts.reduce_fraction),
        "reduce_fraction must lie in [0, 1]"
    );
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let result = run(p, opts, &mut stats);
    stats.wall_time = start.elapsed();
    (result, stats)
}

fn run(original: &Pap, opts: &HyperOptions, stats: &mut SolveStats) -> Option<Explanation> {
    let pre = preprocess_entailed(original, opts);
    let p = &pre.pap;
    let n = p.num_vars();
    let hyps = p.hypotheses();
    let weights = p.weights();
    let r_vars: Vec<Lit> = (0..hyps.len() as u32)
        .map(|i| Lit::positive(n + 1 + i))
        .collect();
    let relaxed: Vec<Clause> = hyps
        .iter()
        .zip(&r_vars)
        .map(|(h, &r)| h.clause.with_extra(!r))
        .collect();

    let mut background = Cnf::new(n + hyps.len() as u32);
    for c in p
        .theory()
        .clauses()
        .iter()
        .chain(p.manifestations().clauses())
        .chain(&relaxed)
    {
        background.push(c.clone());
    }
    let mut hs = HittingSetContext::new(&weights, r_vars.clone(), &background, opts.seed);

    let (neg_m, fresh) = encode_negation(p.manifestations(), n + hyps.len() as u32 + 1);
    let mut check = Solver::with_seed(opts.seed);
    check.ensure_vars(n + hyps.len() as u32 + fresh);
    for c in p
        .theory()
        .clauses()
        .iter()
        .chain(&relaxed)
        .chain(neg_m.clauses())
    {
        check.add_clause(c);
    }
    // Deciding every r_i true first makes the checker greedily enforce
    // unpicked hypotheses, so its models falsify few of them.
    for r in &r_vars {
        check.set_polarity(r.var(), Some(true));
    }
    check.set_decision_preference(&r_vars.iter().map(|r| r.var()).collect::<Vec<_>>());

    if opts.bootstrap_mcs > 0 {
        let mut hard = p.theory().clone();
        hard.extend(&neg_m);
        let soft: Vec<(Clause, u64)> = hyps.iter().map(|h| (h.clause.clone(), h.weight)).collect();
        match enumerate_mcs(&hard, &soft, opts.bootstrap_mcs) {
            // T ⊨ M: nothing to seed.
            Err(_) => {}
            // T ∧ H ∧ ¬M is satisfiable, so no subset of H entails M.
            Ok(mcses) if mcses.is_empty() => return None,
            Ok(mcses) => {
                stats.bootstrap_mcs_found = mcses.len() as u64;
                for mcs in &mcses {
                    hs.add_set(mcs).expect("an MCS is nonempty");
                }
            }
        }
    }

    let soft_refs: Vec<&Clause> = hyps.iter().map(|h| &h.clause).collect();
    loop {
        stats.iterations += 1;
        stats.hs_calls += 1;
        let (s, _) = hs.next_candidate()?;
        debug_assert!(
            consistent_with_manifestations(p, &s),
            "candidate inconsistent with T ∧ M"
        );

        let assumptions: Vec<Lit> = s.iter().map(|&i| r_vars[i]).collect();
        stats.sat_calls += 1;
        let model = match check.solve(&assumptions) {
            SatResult::Unsat(_) => {
                return Some(Explanation::new(original, s.iter().map(|&i| pre.kept[i])));
            }
            SatResult::Sat(model) => model,
        };
        let mut cex = extract_counterexample(p, &model);
        if cex.is_empty() {
            return None;
        }
        debug_assert!(cex.iter().all(|i| s.binary_search(i).is_err()));
        if opts.reduce_fraction > 0.0 {
            let (reduced, calls) = reduce_with_solver(
                &mut check,
                &r_vars,
                &soft_refs,
                &model,
                &cex,
                &weights,
                opts.reduce_fraction,
            );
            stats.sat_calls += calls;
            cex = reduced;
        }
        stats.type1_counterexamples += 1;
        hs.add_set(&cex)
            .expect("counterexample is a nonempty index set");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_apf;
    use crate::gen::{gen_family1, gen_family2};

    const EXAMPLE1: &str = "p abd 4\nt -1 4 0\nt -2 -3 4 0\nh 1 1 0\nh 1 2 0\nh 1 3 0\nm 4 0\n";

    #[test]
    fn example1_both_presets() {
        let p = parse_apf(EXAMPLE1).unwrap();
        for opts in [HyperOptions::hyper(), HyperOptions::hyper_star()] {
            let (e, stats) = solve_hyper(&p, &opts);
            let e = e.unwrap();
            assert_eq!((e.indices(), e.cost()), (&[0][..], 1));
            assert_eq!(stats.iterations, stats.hs_calls);
            assert_eq!(stats.type2_counterexamples, 0);
        }
    }

    #[test]
    fn families() {
        assert_eq!(
            solve_hyper(&gen_family1(3).unwrap(), &HyperOptions::hyper()).0,
            None
        );
        let e = solve_hyper(&gen_family2(2).unwrap(), &HyperOptions::hyper())
            .0
            .unwrap();
        assert_eq!((e.indices(), e.cost()), (&[0, 1, 2, 3][..], 4));
    }

    #[test]
    fn empty_manifestation() {
        let p = parse_apf("p abd 2\nt 1 2 0\nh 1 1 0\n").unwrap();
        let e = solve_hyper(&p, &HyperOptions::hyper()).0.unwrap();
        assert_eq!((e.indices(), e.cost()), (&[][..], 0));
    }

    #[test]
    fn preprocessing() {
        let p = parse_apf("p abd 4\nt 4 0\nh 1 1 0\nh 2 4 0\nm 4 0\nm 1 4 0\n").unwrap();
        let all = HyperOptions {
            preprocess_m: true,
            preprocess_h: true,
            ..HyperOptions::hyper()
        };
        let pre = preprocess_entailed(&p, &all);
        assert!(pre.pap.manifestations().is_empty());
        assert_eq!(pre.kept, vec![0]);
        assert_eq!(preprocess_entailed(&p, &HyperOptions::hyper()).pap, p);

        let ex = parse_apf(EXAMPLE1).unwrap();
        assert_eq!(preprocess_entailed(&ex, &all).pap.manifestations().len(), 1);
    }

    #[test]
    fn kept_mapping_restores_indices() {
        // Hypothesis 0 is entailed and dropped; the answer is original index 1.
        let p = parse_apf("p abd 2\nt 2 0\nh 1 2 0\nh 5 1 0\nm 1 0\n").unwrap();
        let opts = HyperOptions {
            preprocess_h: true,
            ..HyperOptions::hyper()
        };
        let e = solve_hyper(&p, &opts).0.unwrap();
        assert_eq!((e.indices(), e.cost()), (&[1][..], 5));
    }

    #[test]
    fn counterexamples_from_example1() {
        let p = parse_apf(EXAMPLE1).unwrap();
        let all_false = Assignment::all_false(4);
        assert_eq!(extract_counterexample(&p, &all_false), vec![0, 1, 2]);
        let mut mu = Assignment::all_false(4);
        mu.set(2, true);
        assert_eq!(extract_counterexample(&p, &mu), vec![0, 2]);
    }
}

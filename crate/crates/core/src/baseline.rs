//! The AbHS and AbHS+ baselines: hitting sets without background theory
//! and two separate SAT checks per candidate.

use std::time::Instant;

use crate::cnf::{Explanation, Lit, Pap};
use crate::encode::encode_negation_guarded;
use crate::hitting::HittingSetContext;
use crate::hyper::{extract_counterexample, SolveStats};
use crate::sat::{SatResult, Solver};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineVariant {
    /// An inconsistent candidate forces some unpicked hypothesis in.
    AbHS,
    /// An inconsistent candidate is blocked with all its supersets.
    AbHSPlus,
}

/// Minimum-cost explanation of `p` by the chosen baseline.
///
/// Returns `None` once the hitting-set problem is infeasible or an
/// inconsistent candidate leaves nothing to add.
pub fn solve_abhs(
    p: &Pap,
    variant: BaselineVariant,
    seed: u64,
) -> (Option<Explanation>, SolveStats) {
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let result = run(p, variant, seed, &mut stats);
    stats.wall_time = start.elapsed();
    (result, stats)
}

fn run(
    p: &Pap,
    variant: BaselineVariant,
    seed: u64,
    stats: &mut SolveStats,
) -> Option<Explanation> {
    let n = p.num_vars();
    let hyps = p.hypotheses();
    let h = hyps.len() as u32;
    let mut hs = HittingSetContext::without_background(&p.weights(), seed);

    // Selector s_i enforces hypothesis i; guard g enforces ¬M.
    let selectors: Vec<Lit> = (0..h).map(|i| Lit::positive(n + 1 + i)).collect();
    let guard = Lit::positive(n + h + 1);
    let (neg_m, fresh) = encode_negation_guarded(p.manifestations(), n + h + 2, Some(guard));
    // The baseline's check formula knows nothing about unpicked
    // hypotheses, so its models are arbitrary with respect to them; random
    // polarity keeps them from tracking the literal signs of the input.
    let mut check = Solver::with_seed(seed);
    check.set_random_polarity(Some(seed));
    check.ensure_vars(n + h + 1 + fresh);
    let relaxed = hyps
        .iter()
        .zip(&selectors)
        .map(|(hy, &s)| hy.clause.with_extra(!s));
    for c in p
        .theory()
        .clauses()
        .iter()
        .cloned()
        .chain(relaxed)
        .chain(neg_m.clauses().iter().cloned())
    {
        check.add_clause(&c);
    }

    loop {
        stats.iterations += 1;
        stats.hs_calls += 1;
        let (s, _) = hs.next_candidate()?;
        let mut picked = vec![false; hyps.len()];
        for &i in &s {
            picked[i] = true;
        }
        let mut assumptions: Vec<Lit> = selectors
            .iter()
            .zip(&picked)
            .map(|(&sel, &on)| if on { sel } else { !sel })
            .collect();

        assumptions.push(guard);
        stats.sat_calls += 1;
        if let SatResult::Sat(model) = check.solve(&assumptions) {
            let cex = extract_counterexample(p, &model);
            if cex.is_empty() {
                // T ∧ H ∧ ¬M is satisfiable: no subset of H entails M.
                return None;
            }
            stats.type1_counterexamples += 1;
            hs.add_set(&cex).expect("valid counterexample");
            continue;
        }

        *assumptions.last_mut().expect("guard pushed") = !guard;
        stats.sat_calls += 1;
        if check.solve(&assumptions).is_sat() {
            return Some(Explanation::new(p, s));
        }
        stats.type2_counterexamples += 1;
        let added = match variant {
            BaselineVariant::AbHS => {
                let rest: Vec<usize> = (0..hyps.len()).filter(|&i| !picked[i]).collect();
                hs.add_set(&rest)
            }
            BaselineVariant::AbHSPlus => hs.add_block(&s),
        };
        if added.is_err() {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_apf;
    use crate::gen::{gen_family1, gen_family2};

    const EXAMPLE1: &str = "p abd 4\nt -1 4 0\nt -2 -3 4 0\nh 1 1 0\nh 1 2 0\nh 1 3 0\nm 4 0\n";

    #[test]
    fn example1_both_variants() {
        let p = parse_apf(EXAMPLE1).unwrap();
        for v in [BaselineVariant::AbHS, BaselineVariant::AbHSPlus] {
            let e = solve_abhs(&p, v, 0).0.unwrap();
            assert_eq!((e.indices(), e.cost()), (&[0][..], 1));
        }
    }

    #[test]
    fn family1_type2_at_two() {
        let (e, stats) = solve_abhs(&gen_family1(2).unwrap(), BaselineVariant::AbHSPlus, 0);
        assert_eq!(e, None);
        assert_eq!(stats.type2_counterexamples, 4);
    }

    #[test]
    fn family2_single_block() {
        let e = solve_abhs(&gen_family2(1).unwrap(), BaselineVariant::AbHS, 0)
            .0
            .unwrap();
        assert_eq!((e.indices(), e.cost()), (&[0, 1][..], 2));
    }

    #[test]
    fn inconsistent_theory() {
        let p = parse_apf("p abd 1\nt 1 0\nt -1 0\nh 1 1 0\nm 1 0\n").unwrap();
        for v in [BaselineVariant::AbHS, BaselineVariant::AbHSPlus] {
            assert_eq!(solve_abhs(&p, v, 0).0, None);
        }
    }
}

use abduct::formats::parse_apf;
use abduct::gen::{gen_random, RandomGenParams};
use abduct::oracle::{bf_check_explanation, bf_eval_2qbf, bf_solve, CheckOutcome};
use abduct::qbf::{
    emit_decision_qbf, emit_explanation_qbf, emit_qmaxsat_qbf, to_qdimacs, Formula, QbfFormula,
    QuantBlock, Quantifier, RelaxPolarity,
};
use abduct::{Lit, Pap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE1: &str = "p abd 4\nt -1 4 0\nt -2 -3 4 0\nh 1 1 0\nh 1 2 0\nh 1 3 0\nm 4 0\n";

/// Full truth table of the matrix, then quantifiers eliminated from the
/// innermost variable outwards.
fn eval_by_table(q: &QbfFormula) -> bool {
    let order: Vec<(Quantifier, u32)> = q
        .prefix
        .iter()
        .flat_map(|b| b.vars.iter().map(move |&v| (b.quantifier, v)))
        .collect();
    let k = order.len();
    let mut table: Vec<bool> = (0u64..1 << k)
        .map(|mask| {
            q.matrix.eval(&|v| {
                let pos = order.iter().position(|&(_, u)| u == v).unwrap();
                mask >> pos & 1 == 1
            })
        })
        .collect();
    for level in (0..k).rev() {
        let half = 1usize << level;
        let forall = order[level].0 == Quantifier::Forall;
        table = (0..half)
            .map(|i| {
                let (a, b) = (table[i], table[i + half]);
                if forall {
                    a && b
                } else {
                    a || b
                }
            })
            .collect();
    }
    table[0]
}

fn random_formula(rng: &mut ChaCha8Rng, vars: u32, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        let v = rng.gen_range(1..=vars) as i32;
        return Formula::Lit(Lit::new(if rng.gen_bool(0.5) { v } else { -v }));
    }
    let width = rng.gen_range(0..=3);
    let parts = (0..width)
        .map(|_| random_formula(rng, vars, depth - 1))
        .collect();
    match rng.gen_range(0..3) {
        0 => Formula::And(parts),
        1 => Formula::Or(parts),
        _ => random_formula(rng, vars, depth - 1).negate(),
    }
}

#[test]
fn evaluator_agrees_with_table_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut truths = 0;
    for _ in 0..400 {
        let split = rng.gen_range(0..=8);
        let conjuncts = rng.gen_range(1..=4);
        let q = QbfFormula {
            prefix: vec![
                QuantBlock {
                    quantifier: Quantifier::Exists,
                    vars: (1..=split).collect(),
                },
                QuantBlock {
                    quantifier: Quantifier::Forall,
                    vars: (split + 1..=8).collect(),
                },
            ],
            matrix: Formula::And(
                (0..conjuncts)
                    .map(|_| random_formula(&mut rng, 8, 4))
                    .collect(),
            ),
            num_vars: 8,
        };
        let expected = eval_by_table(&q);
        assert_eq!(bf_eval_2qbf(&q).unwrap(), expected, "{q:?}");
        truths += expected as usize;
    }
    assert!(
        (40..=360).contains(&truths),
        "degenerate sample: {truths} true"
    );
}

fn small_instance(seed: u64) -> Pap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_random(&RandomGenParams {
        num_vars: rng.gen_range(2..=6),
        num_theory_clauses: rng.gen_range(0..=5),
        num_hypotheses: rng.gen_range(1..=5),
        num_manifestations: rng.gen_range(1..=2),
        max_clause_len: 3,
        max_weight: 3,
        seed,
    })
    .unwrap()
}

#[test]
fn explanation_qbf_matches_checker() {
    for seed in 0..60 {
        let p = small_instance(seed);
        let h = p.hypotheses().len();
        for mask in 0u32..1 << h {
            let s: Vec<usize> = (0..h).filter(|i| mask >> i & 1 == 1).collect();
            let q = emit_explanation_qbf(&p, &s);
            assert!(q.is_closed());
            let is_expl = bf_check_explanation(&p, &s).unwrap() == CheckOutcome::IsExpl;
            assert_eq!(bf_eval_2qbf(&q).unwrap(), is_expl, "seed {seed}, S={s:?}");
        }
    }
}

#[test]
fn decision_qbf_is_monotone_and_finds_optimum() {
    for seed in 100..160 {
        let p = small_instance(seed);
        let total = p.total_weight();
        let truth: Vec<bool> = (0..=total)
            .map(|k| bf_eval_2qbf(&emit_decision_qbf(&p, k)).unwrap())
            .collect();
        assert!(
            truth.windows(2).all(|w| !w[0] || w[1]),
            "seed {seed}: {truth:?}"
        );
        let smallest = truth.iter().position(|&t| t).map(|k| k as u64);
        assert_eq!(
            smallest,
            bf_solve(&p).unwrap().map(|e| e.cost()),
            "seed {seed}"
        );
    }
}

#[test]
fn qmaxsat_residual_equals_explanation_qbf() {
    let p = parse_apf(EXAMPLE1).unwrap();
    let (q, _) = emit_qmaxsat_qbf(&p, RelaxPolarity::Select);
    for mask in 0u32..8 {
        // Fix R by turning its block into units inside the existential part.
        let mut fixed = q.clone();
        let Formula::And(top) = &mut fixed.matrix else {
            unreachable!()
        };
        let Formula::And(phi) = &mut top[0] else {
            unreachable!()
        };
        for i in 0..3 {
            let r = 9 + i;
            phi.push(Formula::Lit(Lit::new(if mask >> i & 1 == 1 {
                r
            } else {
                -r
            })));
        }
        let s: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
        let expected = bf_eval_2qbf(&emit_explanation_qbf(&p, &s)).unwrap();
        assert_eq!(bf_eval_2qbf(&fixed).unwrap(), expected, "S={s:?}");
        assert_eq!(expected, s.contains(&0) || s == vec![1, 2]);
    }
}

#[test]
fn example1_truth_values() {
    let p = parse_apf(EXAMPLE1).unwrap();
    assert!(bf_eval_2qbf(&emit_explanation_qbf(&p, &[0])).unwrap());
    assert!(!bf_eval_2qbf(&emit_explanation_qbf(&p, &[])).unwrap());
    assert!(!bf_eval_2qbf(&emit_explanation_qbf(&p, &[1])).unwrap());
    assert!(!bf_eval_2qbf(&emit_decision_qbf(&p, 0)).unwrap());
    assert!(bf_eval_2qbf(&emit_decision_qbf(&p, 1)).unwrap());
    assert!(bf_eval_2qbf(&emit_decision_qbf(&p, 100)).unwrap());
}

fn parse_qdimacs(text: &str) -> QbfFormula {
    let mut lines = text.lines();
    let header: Vec<u32> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .skip(2)
        .map(|t| t.parse().unwrap())
        .collect();
    let mut prefix = Vec::new();
    let mut clauses = Vec::new();
    for line in lines {
        let nums: Vec<i32> = line
            .split_whitespace()
            .filter_map(|t| t.parse().ok())
            .collect();
        let body = &nums[..nums.len() - 1];
        match line.chars().next() {
            Some('e') | Some('a') => prefix.push(QuantBlock {
                quantifier: if line.starts_with('e') {
                    Quantifier::Exists
                } else {
                    Quantifier::Forall
                },
                vars: body.iter().map(|&v| v as u32).collect(),
            }),
            _ => clauses.push(Formula::Or(
                body.iter().map(|&l| Formula::Lit(Lit::new(l))).collect(),
            )),
        }
    }
    assert_eq!(clauses.len() as u32, header[1]);
    QbfFormula {
        prefix,
        matrix: Formula::And(clauses),
        num_vars: header[0],
    }
}

#[test]
fn qdimacs_clausification_preserves_truth() {
    let p = parse_apf(EXAMPLE1).unwrap();
    for mask in 0u32..8 {
        let s: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
        let q = emit_explanation_qbf(&p, &s);
        let clausified = parse_qdimacs(&to_qdimacs(&q));
        let kinds: Vec<Quantifier> = clausified.prefix.iter().map(|b| b.quantifier).collect();
        assert_eq!(
            kinds,
            vec![Quantifier::Exists, Quantifier::Forall, Quantifier::Exists]
        );
        assert_eq!(clausified.prefix[0].vars, vec![1, 2, 3, 4]);
        assert_eq!(clausified.prefix[1].vars, vec![5, 6, 7, 8]);
        let bound: usize = clausified.prefix.iter().map(|b| b.vars.len()).sum();
        assert_eq!(bound as u32, clausified.num_vars);
        assert_eq!(eval_by_table(&clausified), eval_by_table(&q), "S={s:?}");
    }
}

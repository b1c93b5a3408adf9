//! Instance generators: the two separation families and seeded random
//! instances.
//!
//! Variable numbering is fixed so generated files are stable:
//!
//! * family 1, block `i` (1-based): `t_i = 4i-3`, `x_i = 4i-2`,
//!   `y_i = 4i-1`, `m_i = 4i`;
//! * family 2: `m = 1`, `t_i = 2i`, `x_i = 2i+1`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Clause, Lit, Pap};
use crate::error::GenError;

fn clause(lits: &[Lit]) -> Clause {
    Clause::new(lits.iter().copied()).expect("generator produced a tautology")
}

/// The family with no explanation: every `S` that entails all `m_i` forces
/// every `t_i`, contradicting `(¬t_1 ∨ … ∨ ¬t_n)`.
///
/// Hypotheses per block, in order: `(¬x_i)`, `(x_i ∨ t_i)`, `(¬y_i)`,
/// `(y_i ∨ t_i)`, all with weight 1.
pub fn gen_family1(n: usize) -> Result<Pap, GenError> {
    if n == 0 {
        return Err(GenError::ZeroSize);
    }
    let base = |i: usize| 4 * (i as u32 - 1);
    let t = |i| Lit::positive(base(i) + 1);
    let x = |i| Lit::positive(base(i) + 2);
    let y = |i| Lit::positive(base(i) + 3);
    let m = |i| Lit::positive(base(i) + 4);

    let mut theory = vec![clause(&(1..=n).map(|i| !t(i)).collect::<Vec<_>>())];
    let mut hyps = Vec::with_capacity(4 * n);
    let mut manifs = Vec::with_capacity(n);
    for i in 1..=n {
        theory.push(clause(&[!t(i), m(i)]));
        hyps.push((clause(&[!x(i)]), 1));
        hyps.push((clause(&[x(i), t(i)]), 1));
        hyps.push((clause(&[!y(i)]), 1));
        hyps.push((clause(&[y(i), t(i)]), 1));
        manifs.push(clause(&[m(i)]));
    }
    Ok(Pap::new(4 * n as u32, theory, hyps, manifs).expect("family 1 is well formed"))
}

/// The family whose only explanation is the whole hypothesis set, at cost
/// `2n`. Hypotheses per block: `(m ∨ ¬x_i)`, `(m ∨ x_i ∨ t_i)`.
pub fn gen_family2(n: usize) -> Result<Pap, GenError> {
    if n == 0 {
        return Err(GenError::ZeroSize);
    }
    let m = Lit::positive(1);
    let t = |i: usize| Lit::positive(2 * i as u32);
    let x = |i: usize| Lit::positive(2 * i as u32 + 1);

    let theory = vec![clause(&(1..=n).map(|i| !t(i)).collect::<Vec<_>>())];
    let mut hyps = Vec::with_capacity(2 * n);
    for i in 1..=n {
        hyps.push((clause(&[m, !x(i)]), 1));
        hyps.push((clause(&[m, x(i), t(i)]), 1));
    }
    Ok(Pap::new(2 * n as u32 + 1, theory, hyps, vec![clause(&[m])])
        .expect("family 2 is well formed"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomGenParams {
    pub num_vars: u32,
    pub num_theory_clauses: usize,
    pub num_hypotheses: usize,
    pub num_manifestations: usize,
    pub max_clause_len: usize,
    pub max_weight: u64,
    pub seed: u64,
}

impl Default for RandomGenParams {
    fn default() -> Self {
        RandomGenParams {
            num_vars: 8,
            num_theory_clauses: 8,
            num_hypotheses: 6,
            num_manifestations: 2,
            max_clause_len: 3,
            max_weight: 1,
            seed: 0,
        }
    }
}

fn random_clause(rng: &mut ChaCha8Rng, num_vars: u32, max_len: usize) -> Clause {
    let len = rng.gen_range(1..=max_len).min(num_vars as usize);
    let vars = sample(rng, num_vars as usize, len);
    let lits: Vec<Lit> = vars
        .iter()
        .map(|v| {
            let var = v as u32 + 1;
            if rng.gen_bool(0.5) {
                Lit::positive(var)
            } else {
                Lit::negative(var)
            }
        })
        .collect();
    clause(&lits)
}

/// A random instance, fully determined by `params`. Clauses use distinct
/// variables, so they are never tautological.
pub fn gen_random(params: &RandomGenParams) -> Result<Pap, GenError> {
    if params.max_clause_len == 0 {
        return Err(GenError::BadParams("max_clause_len must be at least 1"));
    }
    if params.max_weight == 0 {
        return Err(GenError::BadParams("max_weight must be at least 1"));
    }
    let clauses = params.num_theory_clauses + params.num_hypotheses + params.num_manifestations;
    if params.num_vars == 0 && clauses > 0 {
        return Err(GenError::BadParams("clauses need at least one variable"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (n, len) = (params.num_vars, params.max_clause_len);
    let theory = (0..params.num_theory_clauses)
        .map(|_| random_clause(&mut rng, n, len))
        .collect();
    let hyps = (0..params.num_hypotheses)
        .map(|_| {
            let c = random_clause(&mut rng, n, len);
            (c, rng.gen_range(1..=params.max_weight))
        })
        .collect();
    let manifs = (0..params.num_manifestations)
        .map(|_| random_clause(&mut rng, n, len))
        .collect();
    Ok(Pap::new(n, theory, hyps, manifs).expect("random instance is well formed"))
}

//! Propositional data model shared by every solver in the crate.

use std::fmt;
use std::ops::Not;

use crate::error::CnfError;

/// A literal in DIMACS convention: the magnitude is the 1-based variable
/// index and the sign is the polarity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    /// Builds a literal from a DIMACS integer. Panics on zero.
    #[inline]
    pub fn new(value: i32) -> Lit {
        assert!(value != 0, "literal 0 is reserved as a terminator");
        Lit(value)
    }

    pub fn try_new(value: i64) -> Result<Lit, CnfError> {
        if value == 0 || value.unsigned_abs() > i32::MAX as u64 {
            return Err(CnfError::InvalidLiteral(value));
        }
        Ok(Lit(value as i32))
    }

    #[inline]
    pub fn positive(var: u32) -> Lit {
        Lit::new(var as i32)
    }

    #[inline]
    pub fn negative(var: u32) -> Lit {
        Lit::new(-(var as i32))
    }

    /// 1-based variable index.
    #[inline]
    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    #[inline]
    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Dense code `2 * (var - 1) + negated`, used for watch lists and
    /// other per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        ((self.var() as usize - 1) << 1) | (self.0 < 0) as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        let var = (code >> 1) as i32 + 1;
        if code & 1 == 1 {
            Lit(-var)
        } else {
            Lit(var)
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A duplicate-free, non-tautological disjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Removes duplicate literals and rejects complementary pairs.
    /// Literal order is otherwise preserved.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause, CnfError> {
        let mut out: Vec<Lit> = Vec::new();
        for lit in lits {
            if out.contains(&!lit) {
                return Err(CnfError::Tautology(lit.var()));
            }
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Ok(Clause { lits: out })
    }

    pub fn from_dimacs(lits: &[i32]) -> Result<Clause, CnfError> {
        let lits = lits
            .iter()
            .map(|&v| Lit::try_new(v as i64))
            .collect::<Result<Vec<_>, _>>()?;
        Clause::new(lits)
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause { lits: vec![lit] }
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    /// True when some literal of the clause is true under `assignment`.
    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.lits.iter().any(|&l| assignment.lit_value(l))
    }

    /// Applies `f` to every literal. The mapping must not create a tautology.
    pub fn map_lits(&self, mut f: impl FnMut(Lit) -> Lit) -> Clause {
        Clause::new(self.lits.iter().map(|&l| f(l))).expect("literal renaming created a tautology")
    }

    /// Prepends `lit` to the clause, e.g. to relax it with a selector.
    pub fn with_extra(&self, lit: Lit) -> Clause {
        Clause::new(std::iter::once(lit).chain(self.lits.iter().copied()))
            .expect("extra literal created a tautology")
    }
}

impl<'a> IntoIterator for &'a Clause {
    type Item = &'a Lit;
    type IntoIter = std::slice::Iter<'a, Lit>;

    fn into_iter(self) -> Self::IntoIter {
        self.lits.iter()
    }
}

/// A conjunction of clauses over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Cnf {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    /// Builds a formula, checking every literal against `num_vars`.
    pub fn from_clauses(num_vars: u32, clauses: Vec<Clause>) -> Result<Cnf, CnfError> {
        for clause in &clauses {
            let max = clause.max_var();
            if max > num_vars {
                return Err(CnfError::VariableOutOfRange { var: max, num_vars });
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Appends a clause, widening the variable range when needed.
    pub fn push(&mut self, clause: Clause) {
        self.num_vars = self.num_vars.max(clause.max_var());
        self.clauses.push(clause);
    }

    pub fn extend(&mut self, other: &Cnf) {
        self.num_vars = self.num_vars.max(other.num_vars);
        self.clauses.extend(other.clauses.iter().cloned());
    }

    pub fn set_num_vars(&mut self, num_vars: u32) {
        assert!(num_vars >= self.clauses.iter().map(Clause::max_var).max().unwrap_or(0));
        self.num_vars = num_vars;
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }

    /// Renames every literal with `f`.
    pub fn map_lits(&self, mut f: impl FnMut(Lit) -> Lit) -> Cnf {
        let mut out = Cnf::new(0);
        for clause in &self.clauses {
            out.push(clause.map_lits(&mut f));
        }
        out
    }
}

/// A total truth assignment over variables `1..=len`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn all_false(num_vars: u32) -> Assignment {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    /// Decodes the bits of `mask` as the values of variables `1..=num_vars`.
    pub fn from_bits(mask: u64, num_vars: u32) -> Assignment {
        Assignment {
            values: (0..num_vars).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// Value of variable `var` (1-based). Variables beyond the range read
    /// as false.
    pub fn var_value(&self, var: u32) -> bool {
        self.values.get(var as usize - 1).copied().unwrap_or(false)
    }

    pub fn lit_value(&self, lit: Lit) -> bool {
        self.var_value(lit.var()) == lit.is_positive()
    }

    pub fn set(&mut self, var: u32, value: bool) {
        let idx = var as usize - 1;
        if idx >= self.values.len() {
            self.values.resize(idx + 1, false);
        }
        self.values[idx] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// A weighted hypothesis clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub clause: Clause,
    pub weight: u64,
}

/// A propositional abduction instance: background theory, weighted
/// hypotheses and manifestations over a shared variable set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pap {
    num_vars: u32,
    theory: Cnf,
    hypotheses: Vec<Hypothesis>,
    manifestations: Cnf,
}

impl Pap {
    pub fn new(
        num_vars: u32,
        theory: Vec<Clause>,
        hypotheses: Vec<(Clause, u64)>,
        manifestations: Vec<Clause>,
    ) -> Result<Pap, CnfError> {
        let theory = Cnf::from_clauses(num_vars, theory)?;
        let manifestations = Cnf::from_clauses(num_vars, manifestations)?;
        let mut hyps = Vec::with_capacity(hypotheses.len());
        for (clause, weight) in hypotheses {
            if weight == 0 {
                return Err(CnfError::ZeroWeight);
            }
            let max = clause.max_var();
            if max > num_vars {
                return Err(CnfError::VariableOutOfRange { var: max, num_vars });
            }
            hyps.push(Hypothesis { clause, weight });
        }
        Ok(Pap {
            num_vars,
            theory,
            hypotheses: hyps,
            manifestations,
        })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn theory(&self) -> &Cnf {
        &self.theory
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn manifestations(&self) -> &Cnf {
        &self.manifestations
    }

    pub fn weights(&self) -> Vec<u64> {
        self.hypotheses.iter().map(|h| h.weight).collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.hypotheses.iter().map(|h| h.weight).sum()
    }

    /// Sum of weights of the hypotheses at `indices`.
    pub fn cost_of(&self, indices: &[usize]) -> u64 {
        indices.iter().map(|&i| self.hypotheses[i].weight).sum()
    }

    /// Indices of the hypotheses whose clause `assignment` falsifies.
    pub fn falsified_hypotheses(&self, assignment: &Assignment) -> Vec<usize> {
        self.hypotheses
            .iter()
            .enumerate()
            .filter(|(_, h)| !h.clause.is_satisfied_by(assignment))
            .map(|(i, _)| i)
            .collect()
    }

    /// Same instance with every weight multiplied by `factor`.
    pub fn scale_weights(&self, factor: u64) -> Pap {
        assert!(factor >= 1);
        let mut out = self.clone();
        for h in &mut out.hypotheses {
            h.weight *= factor;
        }
        out
    }
}

/// A set of hypothesis indices together with its total cost.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Explanation {
    indices: Vec<usize>,
    cost: u64,
}

impl Explanation {
    /// Sorts and deduplicates `indices` and computes the cost from `pap`.
    pub fn new(pap: &Pap, indices: impl IntoIterator<Item = usize>) -> Explanation {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        assert!(indices.iter().all(|&i| i < pap.hypotheses().len()));
        let cost = pap.cost_of(&indices);
        Explanation { indices, cost }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lit_codes_round_trip() {
        for v in [1, -1, 2, -2, 17, -40] {
            let l = Lit::new(v);
            assert_eq!(Lit::from_code(l.code()), l);
        }
        assert_eq!(Lit::new(1).code(), 0);
        assert_eq!(Lit::new(-1).code(), 1);
        assert_eq!(!Lit::new(3), Lit::new(-3));
    }

    #[test]
    fn clause_rejects_tautology_and_dedups() {
        assert!(matches!(
            Clause::from_dimacs(&[1, -1]),
            Err(CnfError::Tautology(1))
        ));
        assert!(Clause::from_dimacs(&[2, 3, -2]).is_err());
        let c = Clause::from_dimacs(&[1, 2, 1]).unwrap();
        assert_eq!(c.lits(), &[Lit::new(1), Lit::new(2)]);
    }

    #[test]
    fn cnf_bounds_checked() {
        let c = Clause::from_dimacs(&[5]).unwrap();
        assert!(Cnf::from_clauses(4, vec![c.clone()]).is_err());
        assert!(Cnf::from_clauses(5, vec![c]).is_ok());
    }

    #[test]
    fn pap_rejects_zero_weight() {
        let h = Clause::from_dimacs(&[1]).unwrap();
        assert_eq!(
            Pap::new(1, vec![], vec![(h, 0)], vec![]),
            Err(CnfError::ZeroWeight)
        );
    }

    #[test]
    fn explanation_cost_sums_weights() {
        let pap = Pap::new(
            2,
            vec![],
            vec![
                (Clause::from_dimacs(&[1]).unwrap(), 3),
                (Clause::from_dimacs(&[2]).unwrap(), 4),
                (Clause::from_dimacs(&[1]).unwrap(), 5),
            ],
            vec![],
        )
        .unwrap();
        let e = Explanation::new(&pap, [2, 0, 2]);
        assert_eq!(e.indices(), &[0, 2]);
        assert_eq!(e.cost(), 8);
    }
}

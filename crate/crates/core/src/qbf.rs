//! QBF encodings of explanation checking, of the QMaxSAT hard part and of
//! cost-bounded decision problems, with QCIR and QDIMACS writers.
//!
//! Numbering for an instance over `n` variables: `x_v = v` (the X copy),
//! `y_v = n + v` (the Y copy), then one `r_i` per hypothesis, then
//! auxiliaries of the cost bound.

use std::fmt::Write as _;

use crate::cnf::{Clause, Cnf, Lit, Pap};
use crate::encode::encode_pb;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantBlock {
    pub quantifier: Quantifier,
    pub vars: Vec<u32>,
}

/// Propositional formula tree. `And(vec![])` is true, `Or(vec![])` false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Lit(Lit),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn clause(c: &Clause) -> Formula {
        Formula::Or(c.lits().iter().map(|&l| Formula::Lit(l)).collect())
    }

    pub fn negate(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    /// Value under `value`, where `None` marks an unassigned variable.
    /// Returns `None` when the value depends on unassigned variables.
    pub fn eval_partial(&self, value: &dyn Fn(u32) -> Option<bool>) -> Option<bool> {
        match self {
            Formula::Lit(l) => value(l.var()).map(|b| b == l.is_positive()),
            Formula::Not(f) => f.eval_partial(value).map(|b| !b),
            Formula::And(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.eval_partial(value) {
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
            Formula::Or(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.eval_partial(value) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }

    pub fn eval(&self, value: &dyn Fn(u32) -> bool) -> bool {
        self.eval_partial(&|v| Some(value(v)))
            .expect("total assignment")
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<u32>) {
        match self {
            Formula::Lit(l) => out.push(l.var()),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    /// Negation normal form: negations only on literals, folded into them.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Formula {
        match self {
            Formula::Lit(l) => Formula::Lit(if positive { *l } else { !*l }),
            Formula::Not(f) => f.nnf_signed(!positive),
            Formula::And(fs) => {
                let parts = fs.iter().map(|f| f.nnf_signed(positive)).collect();
                if positive {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            Formula::Or(fs) => {
                let parts = fs.iter().map(|f| f.nnf_signed(positive)).collect();
                if positive {
                    Formula::Or(parts)
                } else {
                    Formula::And(parts)
                }
            }
        }
    }

    fn as_clause_lits(&self) -> Option<Vec<Lit>> {
        match self {
            Formula::Lit(l) => Some(vec![*l]),
            Formula::Or(fs) => fs
                .iter()
                .map(|f| match f {
                    Formula::Lit(l) => Some(*l),
                    _ => None,
                })
                .collect(),
            _ => None,
        }
    }
}

/// A closed prenex QBF.
///
/// Emitted formulas have the matrix `φ ∧ ψ` with `φ` a conjunction of
/// clauses over the existential variables and `ψ` the negated check over
/// the universal copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfFormula {
    pub prefix: Vec<QuantBlock>,
    pub matrix: Formula,
    pub num_vars: u32,
}

impl QbfFormula {
    /// Adjacent blocks with the same quantifier merged; empty blocks
    /// dropped.
    pub fn merged_prefix(&self) -> Vec<QuantBlock> {
        let mut out: Vec<QuantBlock> = Vec::new();
        for b in self.prefix.iter().filter(|b| !b.vars.is_empty()) {
            match out.last_mut() {
                Some(last) if last.quantifier == b.quantifier => last.vars.extend(&b.vars),
                _ => out.push(b.clone()),
            }
        }
        out
    }

    /// Checks that every matrix variable is bound exactly once and every
    /// bound variable is within `num_vars`.
    pub fn is_closed(&self) -> bool {
        let mut bound = vec![false; self.num_vars as usize + 1];
        for v in self.prefix.iter().flat_map(|b| &b.vars) {
            let v = *v as usize;
            if v == 0 || v > self.num_vars as usize || bound[v] {
                return false;
            }
            bound[v] = true;
        }
        let mut used = Vec::new();
        self.matrix.collect_vars(&mut used);
        used.iter()
            .all(|&v| (v as usize) < bound.len() && bound[v as usize])
    }
}

/// How the relaxation variable guards a hypothesis in `H′`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RelaxPolarity {
    /// `(¬r_i ∨ C_i)`: `r_i` true picks the hypothesis.
    #[default]
    Select,
    /// `(r_i ∨ C_i)`: `r_i` false picks the hypothesis.
    Appendix,
}

struct Layout {
    n: u32,
    h: u32,
}

impl Layout {
    fn of(p: &Pap) -> Layout {
        Layout {
            n: p.num_vars(),
            h: p.hypotheses().len() as u32,
        }
    }
    fn x(&self, c: &Clause) -> Clause {
        c.clone()
    }
    /// Renames instance variables into the Y copy; `r` literals stay.
    fn y(&self, c: &Clause) -> Clause {
        let n = self.n;
        c.map_lits(|l| {
            if l.var() <= n {
                Lit::new(l.to_dimacs() + l.to_dimacs().signum() * n as i32)
            } else {
                l
            }
        })
    }
    fn r(&self, i: usize) -> Lit {
        Lit::positive(2 * self.n + 1 + i as u32)
    }
    fn x_vars(&self) -> Vec<u32> {
        (1..=self.n).collect()
    }
    fn y_vars(&self) -> Vec<u32> {
        (self.n + 1..=2 * self.n).collect()
    }
    fn r_vars(&self) -> Vec<u32> {
        (2 * self.n + 1..=2 * self.n + self.h).collect()
    }
    fn last(&self) -> u32 {
        2 * self.n + self.h
    }
}

fn check_part(
    layout: &Layout,
    p: &Pap,
    picked: &[Clause],
    copy: fn(&Layout, &Clause) -> Clause,
) -> Vec<Formula> {
    p.theory()
        .clauses()
        .iter()
        .chain(picked)
        .map(|c| Formula::clause(&copy(layout, c)))
        .collect()
}

fn assemble(layout: &Layout, p: &Pap, phi: Vec<Formula>, refuted: Vec<Formula>) -> Formula {
    let m = Formula::And(
        p.manifestations()
            .clauses()
            .iter()
            .map(|c| Formula::clause(&layout.y(c)))
            .collect(),
    );
    let mut body = refuted;
    body.push(m.negate());
    Formula::And(vec![Formula::And(phi), Formula::And(body).negate()])
}

/// `∃X [T(X) ∧ S(X)] ∧ ∀Y ¬[T(Y) ∧ S(Y) ∧ ¬M(Y)]`, true exactly when `s`
/// is an explanation.
pub fn emit_explanation_qbf(p: &Pap, s: &[usize]) -> QbfFormula {
    let layout = Layout::of(p);
    let picked: Vec<Clause> = s
        .iter()
        .map(|&i| p.hypotheses()[i].clause.clone())
        .collect();
    let phi = check_part(&layout, p, &picked, Layout::x);
    let refuted = check_part(&layout, p, &picked, Layout::y);
    QbfFormula {
        prefix: vec![
            QuantBlock {
                quantifier: Quantifier::Exists,
                vars: layout.x_vars(),
            },
            QuantBlock {
                quantifier: Quantifier::Forall,
                vars: layout.y_vars(),
            },
        ],
        matrix: assemble(&layout, p, phi, refuted),
        num_vars: 2 * layout.n,
    }
}

fn relaxed(layout: &Layout, p: &Pap, polarity: RelaxPolarity) -> Vec<Clause> {
    p.hypotheses()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let r = layout.r(i);
            h.clause.with_extra(match polarity {
                RelaxPolarity::Select => !r,
                RelaxPolarity::Appendix => r,
            })
        })
        .collect()
}

fn qmaxsat_parts(p: &Pap, polarity: RelaxPolarity) -> (Layout, Vec<Formula>, Vec<Formula>) {
    let layout = Layout::of(p);
    let h = relaxed(&layout, p, polarity);
    let phi = check_part(&layout, p, &h, Layout::x);
    let refuted = check_part(&layout, p, &h, Layout::y);
    (layout, phi, refuted)
}

/// Hard part `∃R ∃X [T(X) ∧ H′(R,X)] ∧ ∀Y ¬[T(Y) ∧ H′(R,Y) ∧ ¬M(Y)]`
/// with the soft literals that prefer leaving hypotheses out.
pub fn emit_qmaxsat_qbf(p: &Pap, polarity: RelaxPolarity) -> (QbfFormula, Vec<(Lit, u64)>) {
    let (layout, phi, refuted) = qmaxsat_parts(p, polarity);
    let soft = p
        .hypotheses()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let r = layout.r(i);
            let lit = match polarity {
                RelaxPolarity::Select => !r,
                RelaxPolarity::Appendix => r,
            };
            (lit, h.weight)
        })
        .collect();
    let q = QbfFormula {
        prefix: vec![
            QuantBlock {
                quantifier: Quantifier::Exists,
                vars: layout.r_vars(),
            },
            QuantBlock {
                quantifier: Quantifier::Exists,
                vars: layout.x_vars(),
            },
            QuantBlock {
                quantifier: Quantifier::Forall,
                vars: layout.y_vars(),
            },
        ],
        matrix: assemble(&layout, p, phi, refuted),
        num_vars: layout.last(),
    };
    (q, soft)
}

/// True exactly when some explanation of cost at most `k` exists.
pub fn emit_decision_qbf(p: &Pap, k: u64) -> QbfFormula {
    let (layout, mut phi, refuted) = qmaxsat_parts(p, RelaxPolarity::Select);
    let terms: Vec<(Lit, u64)> = p
        .hypotheses()
        .iter()
        .enumerate()
        .map(|(i, h)| (layout.r(i), h.weight))
        .collect();
    let pb: Cnf = encode_pb(&terms, k, layout.last() + 1);
    let aux_end = pb.num_vars().max(layout.last());
    phi.extend(pb.clauses().iter().map(Formula::clause));
    QbfFormula {
        prefix: vec![
            QuantBlock {
                quantifier: Quantifier::Exists,
                vars: layout.r_vars(),
            },
            QuantBlock {
                quantifier: Quantifier::Exists,
                vars: (layout.last() + 1..=aux_end).collect(),
            },
            QuantBlock {
                quantifier: Quantifier::Exists,
                vars: layout.x_vars(),
            },
            QuantBlock {
                quantifier: Quantifier::Forall,
                vars: layout.y_vars(),
            },
        ],
        matrix: assemble(&layout, p, phi, refuted),
        num_vars: aux_end,
    }
}

fn quant_word(q: Quantifier) -> &'static str {
    match q {
        Quantifier::Exists => "exists",
        Quantifier::Forall => "forall",
    }
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Cleansed QCIR-G14. Gates are numbered after the variables; the matrix
/// is written without clausification.
pub fn to_qcir(q: &QbfFormula) -> String {
    let mut gates: Vec<String> = Vec::new();
    let mut next = q.num_vars as i64 + 1;
    let out = qcir_gate(&q.matrix, &mut gates, &mut next);
    let mut s = format!("#QCIR-G14 {}\n", next - 1);
    for b in q.merged_prefix() {
        let _ = writeln!(s, "{}({})", quant_word(b.quantifier), join(&b.vars));
    }
    let _ = writeln!(s, "output({out})");
    for g in gates {
        s.push_str(&g);
        s.push('\n');
    }
    s
}

fn qcir_gate(f: &Formula, gates: &mut Vec<String>, next: &mut i64) -> i64 {
    match f {
        Formula::Lit(l) => l.to_dimacs() as i64,
        Formula::Not(g) => -qcir_gate(g, gates, next),
        Formula::And(fs) | Formula::Or(fs) => {
            let args: Vec<i64> = fs.iter().map(|g| qcir_gate(g, gates, next)).collect();
            let id = *next;
            *next += 1;
            let op = if matches!(f, Formula::And(_)) {
                "and"
            } else {
                "or"
            };
            gates.push(format!("{id} = {op}({})", join(args)));
            id
        }
    }
}

/// QDIMACS with the matrix clausified by polarity-aware Tseitin gates.
/// Gate variables form an extra innermost existential block.
pub fn to_qdimacs(q: &QbfFormula) -> String {
    let mut next = q.num_vars + 1;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    match q.matrix.nnf() {
        Formula::And(parts) => {
            for part in &parts {
                top_level(part, &mut clauses, &mut next);
            }
        }
        other => top_level(&other, &mut clauses, &mut next),
    }
    let gates: Vec<u32> = (q.num_vars + 1..next).collect();
    let mut prefix = q.merged_prefix();
    if !gates.is_empty() {
        match prefix.last_mut() {
            Some(last) if last.quantifier == Quantifier::Exists => last.vars.extend(&gates),
            _ => prefix.push(QuantBlock {
                quantifier: Quantifier::Exists,
                vars: gates,
            }),
        }
    }
    let mut s = format!("p cnf {} {}\n", next - 1, clauses.len());
    for b in prefix {
        let tag = if b.quantifier == Quantifier::Exists {
            'e'
        } else {
            'a'
        };
        let _ = write!(s, "{tag}");
        for v in b.vars {
            let _ = write!(s, " {v}");
        }
        s.push_str(" 0\n");
    }
    for c in clauses {
        for l in c {
            let _ = write!(s, "{} ", l.to_dimacs());
        }
        s.push_str("0\n");
    }
    s
}

fn top_level(f: &Formula, clauses: &mut Vec<Vec<Lit>>, next: &mut u32) {
    match f {
        Formula::And(parts) => parts.iter().for_each(|p| top_level(p, clauses, next)),
        _ => match f.as_clause_lits() {
            Some(lits) => clauses.push(lits),
            None => {
                let g = tseitin(f, clauses, next);
                clauses.push(vec![g]);
            }
        },
    }
}

/// Returns a literal `g` with clauses enforcing `g → f`; `f` is in NNF.
fn tseitin(f: &Formula, clauses: &mut Vec<Vec<Lit>>, next: &mut u32) -> Lit {
    if let Formula::Lit(l) = f {
        return *l;
    }
    let g = Lit::positive(*next);
    *next += 1;
    match f {
        Formula::And(parts) => {
            for part in parts {
                match part.as_clause_lits() {
                    Some(mut lits) => {
                        lits.insert(0, !g);
                        clauses.push(lits);
                    }
                    None => {
                        let c = tseitin(part, clauses, next);
                        clauses.push(vec![!g, c]);
                    }
                }
            }
        }
        Formula::Or(parts) => {
            let mut lits = vec![!g];
            for part in parts {
                lits.push(tseitin(part, clauses, next));
            }
            clauses.push(lits);
        }
        Formula::Lit(_) | Formula::Not(_) => unreachable!("input is in negation normal form"),
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_apf;

    const EXAMPLE1: &str = "p abd 4\nt -1 4 0\nt -2 -3 4 0\nh 1 1 0\nh 1 2 0\nh 1 3 0\nm 4 0\n";

    fn parts(q: &QbfFormula) -> (&[Formula], &[Formula]) {
        let Formula::And(top) = &q.matrix else {
            panic!()
        };
        let Formula::And(phi) = &top[0] else { panic!() };
        let Formula::Not(psi) = &top[1] else { panic!() };
        let Formula::And(body) = psi.as_ref() else {
            panic!()
        };
        (phi, body)
    }

    #[test]
    fn qmaxsat_shape_on_example() {
        let p = parse_apf(EXAMPLE1).unwrap();
        let (q, soft) = emit_qmaxsat_qbf(&p, RelaxPolarity::Select);
        let sizes: Vec<(Quantifier, usize)> = q
            .prefix
            .iter()
            .map(|b| (b.quantifier, b.vars.len()))
            .collect();
        assert_eq!(
            sizes,
            vec![
                (Quantifier::Exists, 3),
                (Quantifier::Exists, 4),
                (Quantifier::Forall, 4)
            ]
        );
        let (phi, body) = parts(&q);
        assert_eq!(phi.len(), 5);
        assert_eq!(body.len(), 6);
        assert_eq!(
            soft,
            vec![(Lit::new(-9), 1), (Lit::new(-10), 1), (Lit::new(-11), 1)]
        );
        assert!(q.is_closed());
    }

    #[test]
    fn appendix_polarity_flips_r() {
        let p = parse_apf(EXAMPLE1).unwrap();
        let (q, soft) = emit_qmaxsat_qbf(&p, RelaxPolarity::Appendix);
        let (phi, _) = parts(&q);
        assert_eq!(
            phi[2],
            Formula::Or(vec![Formula::Lit(Lit::new(9)), Formula::Lit(Lit::new(1))])
        );
        assert_eq!(soft[0], (Lit::new(9), 1));
    }

    #[test]
    fn empty_hypotheses_have_no_r_block() {
        let p = parse_apf("p abd 1\nm 1 0\n").unwrap();
        let (q, soft) = emit_qmaxsat_qbf(&p, RelaxPolarity::Select);
        assert!(soft.is_empty());
        assert!(q.prefix[0].vars.is_empty());
        assert_eq!(q.merged_prefix().len(), 2);
        assert_eq!(q.matrix, emit_explanation_qbf(&p, &[]).matrix);
    }

    #[test]
    fn qcir_header_and_prefix() {
        let p = parse_apf(EXAMPLE1).unwrap();
        let text = to_qcir(&emit_explanation_qbf(&p, &[0]));
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("#QCIR-G14 "));
        assert_eq!(lines.next(), Some("exists(1, 2, 3, 4)"));
        assert_eq!(lines.next(), Some("forall(5, 6, 7, 8)"));
        assert!(lines.next().unwrap().starts_with("output("));
    }

    #[test]
    fn qdimacs_declares_counts() {
        let p = parse_apf(EXAMPLE1).unwrap();
        let text = to_qdimacs(&emit_decision_qbf(&p, 1));
        let header: Vec<usize> = text
            .lines()
            .next()
            .unwrap()
            .split_whitespace()
            .skip(2)
            .map(|t| t.parse().unwrap())
            .collect();
        let quant: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with('e') || l.starts_with('a'))
            .collect();
        assert_eq!(quant.len(), 3);
        assert!(quant[2].starts_with('e'));
        let bound: usize = quant.iter().map(|l| l.split_whitespace().count() - 2).sum();
        assert_eq!(bound, header[0]);
        assert_eq!(text.lines().count() - 1 - quant.len(), header[1]);
    }

    #[test]
    fn nnf_pushes_negation() {
        let f = Formula::And(vec![Formula::Lit(Lit::new(1)), Formula::Lit(Lit::new(-2))]).negate();
        assert_eq!(
            f.nnf(),
            Formula::Or(vec![Formula::Lit(Lit::new(-1)), Formula::Lit(Lit::new(2))])
        );
    }
}

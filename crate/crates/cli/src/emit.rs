use std::fmt::Write as _;
use std::path::Path;

use abduct::formats::{parse_wcnf, write_apf};
use abduct::gen::{gen_family1, gen_family2, gen_random, RandomGenParams};
use abduct::maxsat::{instance_from_clauses, solve_maxsat, MaxSatResult};
use abduct::qbf::{
    emit_decision_qbf, emit_explanation_qbf, emit_qmaxsat_qbf, to_qcir, to_qdimacs, RelaxPolarity,
};
use abduct::Lit;
use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use crate::solve::{parse_indices, read_pap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QbfKind {
    /// Whether a given subset is an explanation.
    Explanation,
    /// Quantified MaxSAT model; soft literals are listed as comments.
    Qmaxsat,
    /// Whether an explanation of cost at most the bound exists.
    Decision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QbfFormat {
    Qcir,
    Qdimacs,
}

pub struct EmitArgs {
    pub kind: QbfKind,
    pub format: QbfFormat,
    pub subset: Vec<String>,
    pub bound: Option<u64>,
    pub appendix_polarity: bool,
}

pub fn emit(file: &Path, args: &EmitArgs) -> Result<String> {
    let p = read_pap(file)?;
    let (q, soft): (_, Vec<(Lit, u64)>) = match args.kind {
        QbfKind::Explanation => {
            let s = parse_indices(&args.subset)?;
            if let Some(&bad) = s.iter().find(|&&i| i >= p.hypotheses().len()) {
                bail!(
                    "index {bad} out of range for {} hypotheses",
                    p.hypotheses().len()
                );
            }
            (emit_explanation_qbf(&p, &s), vec![])
        }
        QbfKind::Qmaxsat => {
            let polarity = if args.appendix_polarity {
                RelaxPolarity::Appendix
            } else {
                RelaxPolarity::Select
            };
            emit_qmaxsat_qbf(&p, polarity)
        }
        QbfKind::Decision => {
            let k = args.bound.context("--bound is required for decision")?;
            (emit_decision_qbf(&p, k), vec![])
        }
    };
    let mut soft_lines = String::new();
    let comment = match args.format {
        QbfFormat::Qcir => '#',
        QbfFormat::Qdimacs => 'c',
    };
    for (lit, w) in &soft {
        writeln!(soft_lines, "{comment} soft {} {w}", lit.to_dimacs()).unwrap();
    }
    Ok(match args.format {
        // Comments follow the QCIR header line.
        QbfFormat::Qcir => {
            let text = to_qcir(&q);
            let (header, body) = text.split_once('\n').unwrap_or((&text, ""));
            format!("{header}\n{soft_lines}{body}")
        }
        QbfFormat::Qdimacs => format!("{soft_lines}{}", to_qdimacs(&q)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// No explanation exists.
    Family1,
    /// The whole hypothesis set is the only explanation.
    Family2,
    Random,
}

pub fn generate(family: Family, n: usize, params: &RandomGenParams) -> Result<String> {
    let p = match family {
        Family::Family1 => gen_family1(n)?,
        Family::Family2 => gen_family2(n)?,
        Family::Random => gen_random(params)?,
    };
    Ok(write_apf(&p))
}

pub fn cmd_maxsat(file: &Path) -> Result<u8> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let w = parse_wcnf(&text).with_context(|| format!("parsing {}", file.display()))?;
    let inst = instance_from_clauses(&w.hard, &w.soft);
    match solve_maxsat(&inst) {
        MaxSatResult::Optimum { model, cost } => {
            let n = w
                .hard
                .num_vars()
                .max(w.soft.iter().map(|(c, _)| c.max_var()).max().unwrap_or(0));
            let v: Vec<String> = (1..=n)
                .map(|var| {
                    if model.var_value(var) {
                        var.to_string()
                    } else {
                        format!("-{var}")
                    }
                })
                .collect();
            println!("o {cost}\ns OPTIMUM FOUND\nv {}", v.join(" "));
            Ok(30)
        }
        MaxSatResult::HardUnsat => {
            println!("s UNSATISFIABLE");
            Ok(20)
        }
    }
}

//! Text formats: the line-oriented APF abduction format and weighted
//! partial WCNF.
//!
//! APF grammar (one item per line, ASCII):
//!
//! ```text
//! c <any text>                 comment
//! p abd <num_vars>             header, exactly once, before any clause
//! t <lit>+ 0                   theory clause
//! h <weight> <lit>+ 0          weighted hypothesis clause
//! m <lit>+ 0                   manifestation clause
//! ```

use std::fmt::Write as _;

use crate::cnf::{Clause, Cnf, Lit, Pap};
use crate::error::{CnfError, ParseError, ParseErrorKind};

fn parse_int<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(line, ParseErrorKind::BadInteger(tok.to_string())))
}

/// Parses `<lit>+ 0` from the remaining tokens, checking variable bounds.
fn parse_clause<'a>(
    line: usize,
    tokens: impl Iterator<Item = &'a str>,
    num_vars: u32,
) -> Result<Clause, ParseError> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for tok in tokens {
        if terminated {
            return Err(ParseError::new(
                line,
                ParseErrorKind::BadInteger(tok.to_string()),
            ));
        }
        let v: i64 = parse_int(line, tok)?;
        if v == 0 {
            terminated = true;
            continue;
        }
        let lit = Lit::try_new(v).map_err(|e| ParseError::new(line, e))?;
        if lit.var() > num_vars {
            return Err(ParseError::new(
                line,
                CnfError::VariableOutOfRange {
                    var: lit.var(),
                    num_vars,
                },
            ));
        }
        lits.push(lit);
    }
    if !terminated {
        return Err(ParseError::new(line, ParseErrorKind::Unterminated));
    }
    Clause::new(lits).map_err(|e| ParseError::new(line, e))
}

/// Parses an APF abduction instance.
pub fn parse_apf(text: &str) -> Result<Pap, ParseError> {
    let mut num_vars: Option<u32> = None;
    let mut theory = Vec::new();
    let mut hyps = Vec::new();
    let mut manifs = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let kind = tokens.next().unwrap();
        match kind {
            "p" => {
                if num_vars.is_some() {
                    return Err(ParseError::new(line, ParseErrorKind::DuplicateHeader));
                }
                let rest: Vec<&str> = tokens.collect();
                if rest.len() != 2 || rest[0] != "abd" {
                    return Err(ParseError::new(
                        line,
                        ParseErrorKind::BadHeader(trimmed.to_string()),
                    ));
                }
                num_vars = Some(parse_int(line, rest[1])?);
            }
            "t" | "h" | "m" => {
                let n =
                    num_vars.ok_or(ParseError::new(line, ParseErrorKind::ClauseBeforeHeader))?;
                let weight = if kind == "h" {
                    let tok = tokens
                        .next()
                        .ok_or(ParseError::new(line, ParseErrorKind::BadWeight))?;
                    let w: i64 = parse_int(line, tok)?;
                    if w <= 0 {
                        return Err(ParseError::new(line, ParseErrorKind::BadWeight));
                    }
                    w as u64
                } else {
                    0
                };
                let clause = parse_clause(line, tokens, n)?;
                if clause.is_empty() {
                    return Err(ParseError::new(line, ParseErrorKind::EmptyClause));
                }
                match kind {
                    "t" => theory.push(clause),
                    "h" => hyps.push((clause, weight)),
                    _ => manifs.push(clause),
                }
            }
            other => {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::UnknownLine(other.to_string()),
                ))
            }
        }
    }

    let num_vars = num_vars.ok_or(ParseError::new(
        text.lines().count().max(1),
        ParseErrorKind::MissingHeader,
    ))?;
    Pap::new(num_vars, theory, hyps, manifs).map_err(|e| ParseError::new(0, e))
}

fn write_lits(out: &mut String, clause: &Clause) {
    for lit in clause {
        write!(out, " {}", lit).unwrap();
    }
    out.push_str(" 0\n");
}

/// Canonical APF text: header, then theory, hypothesis and manifestation
/// lines in instance order.
pub fn write_apf(pap: &Pap) -> String {
    let mut out = String::new();
    writeln!(out, "p abd {}", pap.num_vars()).unwrap();
    for c in pap.theory().clauses() {
        out.push('t');
        write_lits(&mut out, c);
    }
    for h in pap.hypotheses() {
        write!(out, "h {}", h.weight).unwrap();
        write_lits(&mut out, &h.clause);
    }
    for c in pap.manifestations().clauses() {
        out.push('m');
        write_lits(&mut out, c);
    }
    out
}

/// A weighted partial MaxSAT instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wcnf {
    pub hard: Cnf,
    pub soft: Vec<(Clause, u64)>,
    pub top: u64,
}

/// Parses the weighted partial format with a `p wcnf <vars> <clauses> <top>`
/// header. Clauses whose weight equals `top` are hard.
pub fn parse_wcnf(text: &str) -> Result<Wcnf, ParseError> {
    let mut header: Option<(u32, u64)> = None;
    let mut hard = Vec::new();
    let mut soft = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace().peekable();
        if tokens.peek() == Some(&"p") {
            if header.is_some() {
                return Err(ParseError::new(line, ParseErrorKind::DuplicateHeader));
            }
            let rest: Vec<&str> = tokens.skip(1).collect();
            if rest.len() != 4 || rest[0] != "wcnf" {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::BadHeader(trimmed.to_string()),
                ));
            }
            let vars: u32 = parse_int(line, rest[1])?;
            let _clauses: u64 = parse_int(line, rest[2])?;
            let top: u64 = parse_int(line, rest[3])?;
            header = Some((vars, top));
            continue;
        }
        let (num_vars, top) =
            header.ok_or(ParseError::new(line, ParseErrorKind::ClauseBeforeHeader))?;
        let weight: u64 = parse_int(line, tokens.next().unwrap())?;
        if weight == 0 {
            return Err(ParseError::new(line, ParseErrorKind::BadWeight));
        }
        if weight > top {
            return Err(ParseError::new(
                line,
                ParseErrorKind::WeightAboveTop { weight, top },
            ));
        }
        let clause = parse_clause(line, tokens, num_vars)?;
        if weight == top {
            hard.push(clause);
        } else {
            soft.push((clause, weight));
        }
    }

    let (num_vars, top) = header.ok_or(ParseError::new(
        text.lines().count().max(1),
        ParseErrorKind::MissingHeader,
    ))?;
    let hard = Cnf::from_clauses(num_vars, hard).map_err(|e| ParseError::new(0, e))?;
    Ok(Wcnf { hard, soft, top })
}

pub fn write_wcnf(w: &Wcnf) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "p wcnf {} {} {}",
        w.hard.num_vars(),
        w.hard.len() + w.soft.len(),
        w.top
    )
    .unwrap();
    for c in w.hard.clauses() {
        write!(out, "{}", w.top).unwrap();
        write_lits(&mut out, c);
    }
    for (c, weight) in &w.soft {
        write!(out, "{}", weight).unwrap();
        write_lits(&mut out, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE1: &str = "c worked example\n\
        p abd 4\n\
        t -1 4 0\n\
        t -2 -3 4 0\n\
        h 1 1 0\n\
        h 1 2 0\n\
        h 1 3 0\n\
        m 4 0\n";

    #[test]
    fn parses_worked_example() {
        let pap = parse_apf(EXAMPLE1).unwrap();
        assert_eq!(pap.num_vars(), 4);
        assert_eq!(pap.theory().len(), 2);
        assert_eq!(pap.hypotheses().len(), 3);
        assert_eq!(pap.manifestations().len(), 1);
        assert!(pap.hypotheses().iter().all(|h| h.weight == 1));
    }

    #[test]
    fn minimal_instance() {
        let pap = parse_apf("p abd 1\nm 1 0").unwrap();
        assert!(pap.theory().is_empty());
        assert!(pap.hypotheses().is_empty());
        assert_eq!(pap.manifestations().clauses()[0].lits(), &[Lit::new(1)]);
    }

    #[test]
    fn rejects_out_of_bounds() {
        let err = parse_apf("p abd 4\nt 5 0").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Cnf(CnfError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(
            parse_apf("t 1 0\n").unwrap_err().kind,
            ParseErrorKind::ClauseBeforeHeader
        );
        assert_eq!(
            parse_apf("").unwrap_err().kind,
            ParseErrorKind::MissingHeader
        );
        assert_eq!(
            parse_apf("p abd 2\nh 0 1 0").unwrap_err().kind,
            ParseErrorKind::BadWeight
        );
        assert_eq!(
            parse_apf("p abd 2\nh -3 1 0").unwrap_err().kind,
            ParseErrorKind::BadWeight
        );
        assert_eq!(
            parse_apf("p abd 2\nt 1 2").unwrap_err().kind,
            ParseErrorKind::Unterminated
        );
        assert_eq!(
            parse_apf("p abd 2\nt 0").unwrap_err().kind,
            ParseErrorKind::EmptyClause
        );
        assert!(matches!(
            parse_apf("p abd 2\nt 1 -1 0").unwrap_err().kind,
            ParseErrorKind::Cnf(CnfError::Tautology(1))
        ));
        assert_eq!(
            parse_apf("p abd 2\np abd 2").unwrap_err().kind,
            ParseErrorKind::DuplicateHeader
        );
        assert!(matches!(
            parse_apf("p abd 2\nx 1 0").unwrap_err().kind,
            ParseErrorKind::UnknownLine(_)
        ));
    }

    #[test]
    fn section_order_is_free() {
        let a = parse_apf("p abd 3\nm 3 0\nh 2 1 0\nt -1 3 0\n").unwrap();
        let b = parse_apf("p abd 3\nt -1 3 0\nh 2 1 0\nm 3 0\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn write_then_parse_is_identity() {
        let pap = parse_apf(EXAMPLE1).unwrap();
        let text = write_apf(&pap);
        assert_eq!(parse_apf(&text).unwrap(), pap);
    }

    #[test]
    fn empty_hypotheses_write_no_h_lines() {
        let pap = parse_apf("p abd 2\nt 1 2 0\nm 1 0\n").unwrap();
        let text = write_apf(&pap);
        assert!(!text.lines().any(|l| l.starts_with('h')));
        assert_eq!(parse_apf(&text).unwrap(), pap);
    }

    #[test]
    fn wcnf_direct_read() {
        let w = parse_wcnf("p wcnf 2 3 10\n10 1 2 0\n1 -1 0\n1 -2 0\n").unwrap();
        assert_eq!(w.hard.len(), 1);
        assert_eq!(w.soft.len(), 2);
        assert_eq!(w.top, 10);
    }

    #[test]
    fn wcnf_all_hard_and_errors() {
        let w = parse_wcnf("p wcnf 2 2 5\n5 1 0\n5 -2 0\n").unwrap();
        assert!(w.soft.is_empty());
        assert!(matches!(
            parse_wcnf("p wcnf 2 1 5\n7 1 0\n").unwrap_err().kind,
            ParseErrorKind::WeightAboveTop { weight: 7, top: 5 }
        ));
        assert_eq!(
            parse_wcnf("1 1 0\n").unwrap_err().kind,
            ParseErrorKind::ClauseBeforeHeader
        );
        assert_eq!(
            parse_wcnf("c nothing\n").unwrap_err().kind,
            ParseErrorKind::MissingHeader
        );
    }
}

use std::path::Path;
use std::time::Instant;

use abduct::baseline::{solve_abhs, BaselineVariant};
use abduct::formats::parse_apf;
use abduct::hyper::{solve_hyper, HyperOptions};
use abduct::oracle::{bf_check_explanation, bf_solve, CheckOutcome};
use abduct::{Explanation, Pap};
use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use crate::record::{append_record, Counters, Outcome, RunRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Hyper,
    HyperStar,
    Abhs,
    AbhsPlus,
    Bf,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Hyper => "hyper",
            Algo::HyperStar => "hyper-star",
            Algo::Abhs => "abhs",
            Algo::AbhsPlus => "abhs-plus",
            Algo::Bf => "bf",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveArgs {
    pub algo: Algo,
    pub bootstrap: Option<usize>,
    pub reduce_frac: Option<f64>,
    pub preprocess: Vec<String>,
    pub seed: u64,
}

pub const EXIT_FOUND: u8 = 10;
pub const EXIT_NONE: u8 = 20;

pub fn read_pap(path: &Path) -> Result<Pap> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_apf(&text).with_context(|| format!("parsing {}", path.display()))
}

fn hyper_options(args: &SolveArgs) -> Result<HyperOptions> {
    let mut opts = match args.algo {
        Algo::HyperStar => HyperOptions::hyper_star(),
        _ => HyperOptions::hyper(),
    };
    if let Some(n) = args.bootstrap {
        opts.bootstrap_mcs = n;
    }
    if let Some(f) = args.reduce_frac {
        if !(0.0..=1.0).contains(&f) {
            bail!("--reduce-frac must lie in [0, 1], got {f}");
        }
        opts.reduce_fraction = f;
    }
    for p in &args.preprocess {
        match p.as_str() {
            "m" => opts.preprocess_m = true,
            "h" => opts.preprocess_h = true,
            other => bail!("unknown preprocessing {other:?}; expected m or h"),
        }
    }
    opts.seed = args.seed;
    Ok(opts)
}

/// Runs one solver and returns the explanation with its counters; the
/// brute-force solver has none.
pub fn run(p: &Pap, args: &SolveArgs) -> Result<(Option<Explanation>, Option<Counters>)> {
    let hyper_only =
        args.bootstrap.is_some() || args.reduce_frac.is_some() || !args.preprocess.is_empty();
    if hyper_only && !matches!(args.algo, Algo::Hyper | Algo::HyperStar) {
        bail!("--bootstrap, --reduce-frac and --preprocess apply to hyper and hyper-star only");
    }
    Ok(match args.algo {
        Algo::Hyper | Algo::HyperStar => {
            let (e, stats) = solve_hyper(p, &hyper_options(args)?);
            (e, Some(Counters::from(&stats)))
        }
        Algo::Abhs | Algo::AbhsPlus => {
            let variant = if args.algo == Algo::Abhs {
                BaselineVariant::AbHS
            } else {
                BaselineVariant::AbHSPlus
            };
            let (e, stats) = solve_abhs(p, variant, args.seed);
            (e, Some(Counters::from(&stats)))
        }
        Algo::Bf => (bf_solve(p)?, None),
    })
}

pub fn report(e: &Option<Explanation>) -> String {
    match e {
        Some(e) => {
            let v: Vec<String> = e.indices().iter().map(|i| i.to_string()).collect();
            format!("s EXPLANATION FOUND\no {}\nv {}\n", e.cost(), v.join(" "))
        }
        None => "s NO EXPLANATION\n".to_string(),
    }
}

pub fn cmd_solve(file: &Path, args: &SolveArgs, stats: Option<&Path>) -> Result<u8> {
    let p = read_pap(file)?;
    let start = Instant::now();
    let (e, counters) = run(&p, args)?;
    let time_s = start.elapsed().as_secs_f64();
    print!("{}", report(&e));
    if let Some(c) = counters {
        println!(
            "c iterations {} type1 {} type2 {} hs_calls {} sat_calls {}",
            c.iterations, c.type1, c.type2, c.hs_calls, c.sat_calls
        );
    }
    println!("c time {time_s:.6}");
    if let Some(path) = stats {
        let record = RunRecord {
            instance: file.display().to_string(),
            algo: args.algo.name().to_string(),
            result: if e.is_some() {
                Outcome::Explanation
            } else {
                Outcome::NoExplanation
            },
            cost: e.as_ref().map(|e| e.cost()),
            counters,
            time_s,
        };
        append_record(path, &record)?;
    }
    Ok(if e.is_some() { EXIT_FOUND } else { EXIT_NONE })
}

/// Parses hypothesis indices given as separate or comma-separated tokens.
pub fn parse_indices(tokens: &[String]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in tokens.iter().flat_map(|t| t.split(',')) {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(
            tok.parse()
                .with_context(|| format!("invalid index {tok:?}"))?,
        );
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn cmd_verify(file: &Path, indices: &[String]) -> Result<u8> {
    let p = read_pap(file)?;
    let s = parse_indices(indices)?;
    if let Some(&bad) = s.iter().find(|&&i| i >= p.hypotheses().len()) {
        bail!(
            "index {bad} out of range for {} hypotheses",
            p.hypotheses().len()
        );
    }
    let outcome = bf_check_explanation(&p, &s)?;
    match outcome {
        CheckOutcome::IsExpl => {
            println!("s VALID EXPLANATION\no {}", p.cost_of(&s));
            Ok(0)
        }
        other => {
            println!("s NOT AN EXPLANATION\nc {other:?}");
            Ok(2)
        }
    }
}

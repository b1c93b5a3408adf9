mod bench;
mod emit;
mod record;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use abduct::gen::RandomGenParams;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use bench::BenchArgs;
use emit::{EmitArgs, Family, QbfFormat, QbfKind};
use solve::{Algo, SolveArgs};

/// Minimum-cost propositional abduction.
#[derive(Parser)]
#[command(name = "abduct", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an APF instance. Exits 10 when an explanation is found, 20 when
    /// none exists, 1 on error.
    Solve {
        #[arg(long, value_enum, default_value = "hyper")]
        algo: Algo,
        /// MCSes used to seed the hitting-set solver (hyper variants).
        #[arg(long)]
        bootstrap: Option<usize>,
        /// Share of each counterexample examined for reduction (hyper variants).
        #[arg(long)]
        reduce_frac: Option<f64>,
        /// Entailment preprocessing: any of m, h (hyper variants).
        #[arg(long, value_delimiter = ',')]
        preprocess: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append one CSV record to this file.
        #[arg(long)]
        stats: Option<PathBuf>,
        file: PathBuf,
    },
    /// Check whether a set of hypothesis indices is an explanation. Exits 0
    /// if it is, 2 if not, 1 on error.
    Verify {
        file: PathBuf,
        /// 0-based hypothesis indices, space or comma separated.
        indices: Vec<String>,
    },
    /// Write a generated instance in APF.
    Gen {
        #[arg(value_enum)]
        family: Family,
        /// Family size.
        #[arg(short, long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        vars: u32,
        #[arg(long, default_value_t = 8)]
        theory: usize,
        #[arg(long, default_value_t = 6)]
        hyps: usize,
        #[arg(long, default_value_t = 2)]
        manifs: usize,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 1)]
        max_weight: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a QBF encoding of an instance.
    Emit {
        #[arg(long, value_enum, default_value = "qmaxsat")]
        kind: QbfKind,
        #[arg(long, value_enum, default_value = "qdimacs")]
        format: QbfFormat,
        /// Hypothesis indices for the explanation check.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<String>,
        /// Cost bound for the decision encoding.
        #[arg(long)]
        bound: Option<u64>,
        /// Relax hypotheses as (r ∨ C) with soft literals r, which inverts
        /// the meaning of r.
        #[arg(long)]
        appendix_polarity: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Solve a weighted partial MaxSAT instance. Exits 30 with an optimum,
    /// 20 when the hard clauses are unsatisfiable.
    Maxsat { file: PathBuf },
    /// Run solvers over instances in child processes and write a CSV.
    Bench {
        /// APF files, directories or glob patterns.
        #[arg(required = true)]
        instances: Vec<String>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "hyper")]
        algos: Vec<Algo>,
        /// Per-run wall-clock limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn write_output(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Cmd::Solve {
            algo,
            bootstrap,
            reduce_frac,
            preprocess,
            seed,
            stats,
            file,
        } => {
            let args = SolveArgs {
                algo,
                bootstrap,
                reduce_frac,
                preprocess,
                seed,
            };
            solve::cmd_solve(&file, &args, stats.as_deref())
        }
        Cmd::Verify { file, indices } => solve::cmd_verify(&file, &indices),
        Cmd::Gen {
            family,
            n,
            vars,
            theory,
            hyps,
            manifs,
            max_len,
            max_weight,
            seed,
            output,
        } => {
            let params = RandomGenParams {
                num_vars: vars,
                num_theory_clauses: theory,
                num_hypotheses: hyps,
                num_manifestations: manifs,
                max_clause_len: max_len,
                max_weight,
                seed,
            };
            write_output(output.as_ref(), &emit::generate(family, n, &params)?)?;
            Ok(0)
        }
        Cmd::Emit {
            kind,
            format,
            subset,
            bound,
            appendix_polarity,
            output,
            file,
        } => {
            let args = EmitArgs {
                kind,
                format,
                subset,
                bound,
                appendix_polarity,
            };
            write_output(output.as_ref(), &emit::emit(&file, &args)?)?;
            Ok(0)
        }
        Cmd::Maxsat { file } => emit::cmd_maxsat(&file),
        Cmd::Bench {
            instances,
            algos,
            timeout,
            seed,
            jobs,
            out,
        } => {
            let timeout = Duration::try_from_secs_f64(timeout).context("invalid timeout")?;
            bench::cmd_bench(&BenchArgs {
                instances,
                algos,
                timeout,
                seed,
                jobs,
                out,
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use abduct::hyper::SolveStats;
use anyhow::{bail, Context, Result};

pub const HEADER: [&str; 10] = [
    "instance",
    "algo",
    "result",
    "cost",
    "iterations",
    "type1",
    "type2",
    "hs_calls",
    "sat_calls",
    "time_s",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Explanation,
    NoExplanation,
    Timeout,
    Error,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Explanation => "explanation",
            Outcome::NoExplanation => "no-explanation",
            Outcome::Timeout => "timeout",
            Outcome::Error => "error",
        })
    }
}

impl FromStr for Outcome {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Outcome> {
        Ok(match s {
            "explanation" => Outcome::Explanation,
            "no-explanation" => Outcome::NoExplanation,
            "timeout" => Outcome::Timeout,
            "error" => Outcome::Error,
            _ => bail!("unknown result {s:?}"),
        })
    }
}

/// One row of the statistics CSV. Counters are absent for rows that did
/// not complete and for the brute-force solver.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub algo: String,
    pub result: Outcome,
    pub cost: Option<u64>,
    pub counters: Option<Counters>,
    pub time_s: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub iterations: u64,
    pub type1: u64,
    pub type2: u64,
    pub hs_calls: u64,
    pub sat_calls: u64,
}

impl From<&SolveStats> for Counters {
    fn from(s: &SolveStats) -> Counters {
        Counters {
            iterations: s.iterations,
            type1: s.type1_counterexamples,
            type2: s.type2_counterexamples,
            hs_calls: s.hs_calls,
            sat_calls: s.sat_calls,
        }
    }
}

impl RunRecord {
    /// A row for a run that produced no solver output.
    pub fn failed(instance: &str, algo: &str, result: Outcome, time_s: f64) -> RunRecord {
        RunRecord {
            instance: instance.to_string(),
            algo: algo.to_string(),
            result,
            cost: None,
            counters: None,
            time_s,
        }
    }

    pub fn fields(&self) -> [String; 10] {
        let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
        let c = self.counters;
        [
            self.instance.clone(),
            self.algo.clone(),
            self.result.to_string(),
            opt(self.cost),
            opt(c.map(|c| c.iterations)),
            opt(c.map(|c| c.type1)),
            opt(c.map(|c| c.type2)),
            opt(c.map(|c| c.hs_calls)),
            opt(c.map(|c| c.sat_calls)),
            format!("{:.6}", self.time_s),
        ]
    }

    pub fn from_fields(row: &csv::StringRecord) -> Result<RunRecord> {
        if row.len() != HEADER.len() {
            bail!("expected {} fields, found {}", HEADER.len(), row.len());
        }
        let opt = |i: usize| -> Result<Option<u64>> {
            let s = &row[i];
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(
                    s.parse().with_context(|| format!("field {}", HEADER[i]))?,
                ))
            }
        };
        let counters = match (opt(4)?, opt(5)?, opt(6)?, opt(7)?, opt(8)?) {
            (Some(iterations), Some(type1), Some(type2), Some(hs_calls), Some(sat_calls)) => {
                Some(Counters {
                    iterations,
                    type1,
                    type2,
                    hs_calls,
                    sat_calls,
                })
            }
            _ => None,
        };
        Ok(RunRecord {
            instance: row[0].to_string(),
            algo: row[1].to_string(),
            result: row[2].parse()?,
            cost: opt(3)?,
            counters,
            time_s: row[9].parse().context("field time_s")?,
        })
    }
}

pub fn write_records(out: impl Write, records: &[RunRecord], header: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if header {
        w.write_record(HEADER)?;
    }
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Appends one record, writing the header first when the file is new or
/// empty.
pub fn append_record(path: &Path, record: &RunRecord) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let fresh = file.metadata()?.len() == 0;
    write_records(file, std::slice::from_ref(record), fresh)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.records()
        .map(|row| RunRecord::from_fields(&row?))
        .collect()
}

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};

use crate::record::{read_records, write_records, Outcome, RunRecord};
use crate::solve::{Algo, EXIT_FOUND, EXIT_NONE};

pub struct BenchArgs {
    pub instances: Vec<String>,
    pub algos: Vec<Algo>,
    pub timeout: Duration,
    pub seed: u64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

/// Expands directories to their `.apf` files and glob patterns to their
/// matches, both sorted; plain paths are kept as given.
pub fn expand_instances(specs: &[String]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for spec in specs {
        let path = Path::new(spec);
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            files.retain(|f| f.extension().is_some_and(|x| x == "apf"));
            files.sort();
            out.extend(files);
        } else if spec.contains(['*', '?', '[']) {
            let mut files: Vec<PathBuf> = glob::glob(spec)
                .with_context(|| format!("bad pattern {spec:?}"))?
                .collect::<Result<_, _>>()?;
            files.sort();
            out.extend(files);
        } else {
            out.push(path.to_path_buf());
        }
    }
    Ok(out)
}

/// Runs one solver in a child process, killing it at the deadline.
fn run_one(exe: &Path, instance: &Path, algo: Algo, args: &BenchArgs, scratch: &Path) -> RunRecord {
    let name = instance.display().to_string();
    let start = Instant::now();
    let fail =
        |result| RunRecord::failed(&name, algo.name(), result, start.elapsed().as_secs_f64());
    let _ = std::fs::remove_file(scratch);
    let child = Command::new(exe)
        .arg("solve")
        .args(["--algo", algo.name(), "--seed", &args.seed.to_string()])
        .arg("--stats")
        .arg(scratch)
        .arg(instance)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn();
    let Ok(mut child) = child else {
        return fail(Outcome::Error);
    };
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if start.elapsed() >= args.timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return RunRecord::failed(
                    &name,
                    algo.name(),
                    Outcome::Timeout,
                    args.timeout.as_secs_f64(),
                );
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(_) => return fail(Outcome::Error),
        }
    };
    if !matches!(
        status.code().and_then(|c| u8::try_from(c).ok()),
        Some(EXIT_FOUND | EXIT_NONE)
    ) {
        return fail(Outcome::Error);
    }
    match read_records(scratch).ok().and_then(|mut rows| rows.pop()) {
        Some(record) => record,
        None => fail(Outcome::Error),
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    if args.timeout < Duration::from_secs(1) {
        bail!("timeout must be at least 1 s");
    }
    let instances = expand_instances(&args.instances)?;
    let tasks: Vec<(PathBuf, Algo)> = instances
        .iter()
        .flat_map(|i| args.algos.iter().map(move |&a| (i.clone(), a)))
        .collect();
    let exe = std::env::current_exe().context("locating own executable")?;
    let scratch = tempfile::tempdir()?;
    let results: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; tasks.len()]);
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..args.jobs.clamp(1, tasks.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some((instance, algo)) = tasks.get(k) else {
                    break;
                };
                let stats = scratch.path().join(format!("{k}.csv"));
                let record = run_one(&exe, instance, *algo, args, &stats);
                results.lock().expect("no panics while holding the lock")[k] = Some(record);
            });
        }
    });
    let records: Vec<RunRecord> = results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect();
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_records(file, &records, true)?;
        }
        None => write_records(std::io::stdout().lock(), &records, true)?,
    }
    Ok(0)
}

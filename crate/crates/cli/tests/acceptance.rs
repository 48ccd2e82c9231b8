//! Runs the acceptance battery with its time limits and prints one line
//! per criterion. Lines go straight to stderr so they show up without
//! `--nocapture`.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use pca_cli::suite::{Suite, CRITERIA};

const SEED: u64 = 7;

fn limit(id: u8) -> Option<Duration> {
    let secs = match id {
        1 | 5 => 5,
        2 => 30,
        4 | 6 => 10,
        8 => 60,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

/// Criterion 12: two separate processes print the same bytes.
fn determinism() -> Result<(), String> {
    let spawn = || {
        Command::new(env!("CARGO_BIN_EXE_pca"))
            .args(["suite", "--seed", &SEED.to_string()])
            .env_remove("PCA_FUEL")
            .output()
            .map_err(|e| e.to_string())
    };
    let first = std::thread::spawn(spawn);
    let b = spawn()?;
    let a = first.join().map_err(|_| "runner thread panicked".to_string())??;
    if a.status.code() != Some(0) {
        return Err(format!("suite exited with {:?}", a.status.code()));
    }
    if a.stdout != b.stdout {
        return Err("outputs differ".into());
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let mut suite = Suite::new(SEED);
    let mut failures = Vec::new();
    for (id, name) in CRITERIA {
        let start = Instant::now();
        let r = suite.run(id);
        let took = start.elapsed();
        let mut why = r.failures.clone();
        if let Some(max) = limit(id) {
            if took >= max {
                why.push(format!("took {took:.2?}, limit {max:?}"));
            }
        }
        let verdict = if r.pass && why.is_empty() { "PASS" } else { "FAIL" };
        report(&format!("criterion {id:>2} {name:<30} {verdict} ({} checks, {took:.2?})", r.checks));
        if verdict == "FAIL" {
            failures.push(format!("criterion {id}: {}", why.join("; ")));
        }
    }
    let start = Instant::now();
    match determinism() {
        Ok(()) => report(&format!("criterion 12 {:<30} PASS ({:.2?})", "suite-determinism", start.elapsed())),
        Err(e) => {
            report(&format!("criterion 12 {:<30} FAIL ({e})", "suite-determinism"));
            failures.push(format!("criterion 12: {e}"));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

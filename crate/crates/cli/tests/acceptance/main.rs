//! Acceptance criteria, one pass/fail line each. Exits non-zero if any criterion fails.

mod cochains;
mod criteria;
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn bundled() -> Vec<PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(scenarios())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

type Criterion = fn() -> Result<String, String>;

fn main() {
    let list: [(&str, Criterion); 8] = [
        ("DGA and so(3) certify; oracle agrees on corruptions", criteria::algebras),
        ("transferred ħ⁰ maps equal the projected tree sums", criteria::transfer_trees),
        ("tree fixed-point buckets vanish", criteria::fixed_point),
        ("Maurer-Cartan obstruction and topological solve", criteria::mc_dichotomy),
        ("OCHA/QOCHA coherence and frame independence", criteria::ocha_coherence),
        ("pushforward of a closed MC element is open MC", criteria::pushforward),
        ("deformation cohomology matches brute-force ranks", criteria::cohomology),
        ("machine reports are deterministic", criteria::determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in list.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({detail}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", list.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

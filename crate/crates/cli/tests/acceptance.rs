//! Acceptance gate for the binary: a fixed-seed `compare` run must emit
//! byte-identical CSV across repeated runs and across worker thread counts.

use std::process::{Command, Output};

fn run_with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gc-moments"))
        .env("GC_MOMENTS_THREADS", threads)
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn acceptance_10_byte_identical_compare_output() {
    let continuous = [
        "compare", "--lambda", "2", "--n", "3", "--samples", "30000",
        "--seed", "7", "--t-stop", "2",
    ];
    let embedded = [
        "compare", "--lambda", "2", "--n", "2", "--samples", "30000",
        "--seed", "7", "--m-start", "1", "--m-stop", "4",
    ];
    for args in [&continuous[..], &embedded[..]] {
        let first = run_with_threads("1", args);
        assert!(first.status.success(), "gate failed: {args:?}");
        // Same thread count, fresh process: identical bytes.
        let again = run_with_threads("1", args);
        assert_eq!(first.stdout, again.stdout, "rerun differs: {args:?}");
        // Different worker counts: still identical bytes.
        for threads in ["2", "4", "8"] {
            let multi = run_with_threads(threads, args);
            assert_eq!(
                first.stdout, multi.stdout,
                "thread count {threads} changes output: {args:?}"
            );
            assert_eq!(first.status.code(), multi.status.code());
        }
        assert!(!first.stdout.is_empty());
    }
    println!("acceptance 10 (byte-identical compare output across runs and threads): pass");
}

//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p eigeniso-cli --test acceptance`.

use std::io::Write;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use eigeniso::format::write_edge_list;
use eigeniso::graph::Graph;
use eigeniso::pipeline::Config;
use eigeniso::selfcheck::{self, Check, GeneratorLog};
use serde_json::Value;

const SEED: u64 = 20240601;

fn report(id: usize, check: &Check) -> bool {
    println!(
        "{} criterion {id}: {}: {}",
        if check.passed { "PASS" } else { "FAIL" },
        check.name,
        check.detail
    );
    check.passed
}

fn graph_file(g: &Graph) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(write_edge_list(g).as_bytes()).expect("write graph");
    f
}

fn run_cli(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_eigeniso"))
        .args(args)
        .output()
        .expect("run eigeniso");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn fail_if(failures: &mut Vec<String>, cond: bool, msg: String) {
    if cond {
        failures.push(msg);
    }
}

fn with_failures(mut check: Check, failures: Vec<String>) -> Check {
    if !failures.is_empty() {
        check.passed = false;
        check.detail = format!("{}; {}", failures.join("; "), check.detail);
    }
    check
}

fn cospectral_cli(check: Check) -> Check {
    let a = graph_file(&Graph::cycle(4).disjoint_union(&Graph::empty(1)));
    let b = graph_file(&Graph::star(4));
    let (code, stdout, _) = run_cli(&["iso", a.path().to_str().unwrap(), b.path().to_str().unwrap()]);
    let mut failures = Vec::new();
    fail_if(&mut failures, code != Some(1), format!("cli exit {code:?}, expected 1"));
    let reason = serde_json::from_str::<Value>(&stdout)
        .ok()
        .and_then(|v| v["decision"]["reason"].as_str().map(str::to_string));
    fail_if(
        &mut failures,
        reason.as_deref() != Some("no balanced component orbit matching"),
        format!("cli reason {reason:?}"),
    );
    with_failures(check, failures)
}

fn degenerate_cli(check: Check) -> Check {
    let mut failures = Vec::new();
    let big = graph_file(&Graph::empty(12));
    let (code, _, stderr) = run_cli(&["aut", big.path().to_str().unwrap()]);
    fail_if(&mut failures, code != Some(3), format!("n = 12: cli exit {code:?}, expected 3"));
    fail_if(
        &mut failures,
        !stderr.contains("geometric automorphisms"),
        format!("n = 12: no explanatory diagnostic in {stderr:?}"),
    );
    let small = graph_file(&Graph::empty(6));
    let (code, stdout, _) = run_cli(&["aut", small.path().to_str().unwrap()]);
    let order = serde_json::from_str::<Value>(&stdout).ok().map(|v| v["order"].clone());
    fail_if(
        &mut failures,
        code != Some(0) || order != Some(Value::from(720)),
        format!("n = 6: cli exit {code:?}, order {order:?}"),
    );
    let mut check = with_failures(check, failures);
    check.detail += "; cli exit codes 3 and 0";
    check
}

fn median(times: &[Duration]) -> Duration {
    let mut t = times.to_vec();
    t.sort();
    t.get(t.len() / 2).copied().unwrap_or_default()
}

fn main() -> ExitCode {
    let config = Config::default();
    let mut log = GeneratorLog::default();
    let mut all = true;

    let start = Instant::now();
    let mut c1 = selfcheck::small_graphs(5, 10_000, SEED, &config, &mut log);
    let elapsed = start.elapsed();
    c1.detail += &format!(", {elapsed:.1?}");
    if elapsed > Duration::from_secs(600) {
        c1.passed = false;
        c1.detail += " exceeds 10 minutes";
    }
    all &= report(1, &c1);

    all &= report(2, &selfcheck::named_graphs(&config, &mut log));
    all &= report(3, &cospectral_cli(selfcheck::cospectral_pair(&config, &mut log)));

    let (mut c4, times) = selfcheck::relabeled_pairs(100, 40, 0.3, SEED, &config, &mut log);
    if median(&times) > Duration::from_secs(5) {
        c4.passed = false;
        c4.detail += " exceeds 5 s";
    }
    all &= report(4, &c4);

    let c8 = degenerate_cli(selfcheck::degenerate(&config, &mut log));

    all &= report(5, &log.soundness());

    let module_checks = [
        selfcheck::coset_oracle(200, SEED),
        selfcheck::geometric_oracle(200, SEED, config.tolerances.gram),
        selfcheck::hypergraph_oracle(100, SEED),
    ];
    let failures: Vec<String> = module_checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    let c6 = Check {
        name: "module oracles".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            module_checks.iter().map(|c| format!("{} ({})", c.name, c.detail)).collect::<Vec<_>>().join(", ")
        } else {
            failures.join("; ")
        },
    };
    all &= report(6, &c6);

    all &= report(7, &selfcheck::spectral_invariants(200, SEED, 1e-6));
    all &= report(8, &c8);

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

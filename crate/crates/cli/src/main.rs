use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use eigeniso::format::{parse_graph, InputFormat};
use eigeniso::graph::Graph;
use eigeniso::oracle::{brute_aut, brute_iso};
use eigeniso::permgroup::Permutation;
use eigeniso::pipeline::{
    automorphism_group, automorphism_group_traced, isomorphic, AutResult, Config, IsoResult, Tolerances,
    DEFAULT_CAP, DEFAULT_GRAM_TOL, DEFAULT_POINT_TOL,
};
use eigeniso::selfcheck::{self, Check, GeneratorLog};
use eigeniso::spectral::{adjacency_matrix, decompose, default_eigen_tol};

const EXIT_OK: u8 = 0;
const EXIT_NOT_ISOMORPHIC: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

const ORACLE_LIMIT: usize = 8;

#[derive(Parser)]
#[command(name = "eigeniso", version, about = "Graph automorphisms and isomorphism via eigenspace projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Automorphism group of a graph.
    Aut {
        /// Graph file, or `-` for stdin.
        file: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Decide whether two graphs are isomorphic.
    Iso {
        file1: PathBuf,
        file2: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Grouped adjacency eigenvalues.
    Spectrum {
        file: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Oracle-equivalence checks on built-in fixtures.
    #[command(hide = true)]
    Selfcheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Args)]
struct Options {
    /// Eigenvalue grouping tolerance [default: 1e-8 * max(1, n)]
    #[arg(long)]
    tol_eig: Option<f64>,
    /// Jacobi stopping threshold [default: 1e-12 * n * max|A|]
    #[arg(long)]
    tol_sweep: Option<f64>,
    /// Projected-point coincidence tolerance
    #[arg(long, default_value_t = DEFAULT_POINT_TOL)]
    tol_point: f64,
    /// Gram-entry quantization tolerance
    #[arg(long, default_value_t = DEFAULT_GRAM_TOL)]
    tol_gram: f64,
    /// Most geometric automorphisms listed per eigenspace
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Input format: auto, edge-list or graph6
    #[arg(long, default_value = "auto")]
    input: InputFormat,
    /// Write the projected point sets to stderr as JSON
    #[arg(long)]
    dump_projections: bool,
    /// Compare against brute force when n <= 8
    #[arg(long)]
    oracle_check: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl Options {
    fn config(&self) -> Result<Config, Failure> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Failure::input(format!("--{name} must be a positive number, got {v}")))
            }
        };
        if let Some(v) = self.tol_eig {
            positive("tol-eig", v)?;
        }
        if let Some(v) = self.tol_sweep {
            positive("tol-sweep", v)?;
        }
        positive("tol-point", self.tol_point)?;
        positive("tol-gram", self.tol_gram)?;
        if self.cap == 0 {
            return Err(Failure::input("--cap must be at least 1"));
        }
        Ok(Config {
            tolerances: Tolerances {
                eigen: self.tol_eig,
                sweep: self.tol_sweep,
                point: self.tol_point,
                gram: self.tol_gram,
            },
            cap: self.cap,
        })
    }
}

fn read_graph(path: &Path, format: InputFormat) -> Result<Graph, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
    };
    parse_graph(&text, format).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn order_json(order: &BigUint) -> Value {
    match u64::try_from(order) {
        Ok(v) => json!(v),
        Err(_) => json!(order.to_string()),
    }
}

fn aut_json(r: &AutResult) -> Value {
    json!({
        "order": order_json(&r.order),
        "generators": r.group.generators().iter().map(Permutation::to_cycle_string).collect::<Vec<_>>(),
        "verified": r.verified,
        "spectrum": r.spectrum,
        "diagnostics": r.diagnostics,
    })
}

fn aut_text(r: &AutResult) -> String {
    let mut out = format!("order: {}\nverified: {}\ngenerators:\n", r.order, r.verified);
    for g in r.group.generators() {
        out += &format!("  {}\n", g.to_cycle_string());
    }
    out += "spectrum:\n";
    for s in &r.spectrum {
        out += &format!("  {:.9} x{}\n", s.eigenvalue, s.multiplicity);
    }
    for d in &r.diagnostics {
        out += &format!("diagnostic: {d}\n");
    }
    out
}

fn witness_pairs(w: &Permutation) -> Vec<[usize; 2]> {
    (0..w.degree()).map(|v| [v + 1, w.apply(v) + 1]).collect()
}

fn iso_json(r: &IsoResult) -> Value {
    json!({
        "decision": r.decision,
        "witness": r.witness.as_ref().map(witness_pairs),
        "diagnostics": r.diagnostics,
    })
}

fn iso_text(r: &IsoResult) -> String {
    let mut out = if r.decision.isomorphic {
        "isomorphic\n".to_string()
    } else {
        format!("not isomorphic: {}\n", r.decision.reason.as_deref().unwrap_or("unknown"))
    };
    if let Some(w) = &r.witness {
        for [u, v] in witness_pairs(w) {
            out += &format!("  {u} -> {v}\n");
        }
    }
    for d in &r.diagnostics {
        out += &format!("diagnostic: {d}\n");
    }
    out
}

fn emit(format: OutputFormat, value: &Value, text: String) {
    let out = match format {
        OutputFormat::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        OutputFormat::Text => text,
    };
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn oracle_aut(graph: &Graph, r: &AutResult) -> Result<String, Failure> {
    let brute = brute_aut(graph).map_err(|e| Failure::internal(e.to_string()))?;
    if BigUint::from(brute.len()) != r.order || !brute.iter().all(|p| r.group.contains(p)) {
        return Err(Failure::internal(format!(
            "oracle check failed: pipeline order {}, brute force {}",
            r.order,
            brute.len()
        )));
    }
    Ok(format!("oracle check: brute force agrees ({} automorphisms)", brute.len()))
}

fn run_aut(file: &Path, opts: &Options) -> Result<u8, Failure> {
    let graph = read_graph(file, opts.input)?;
    let config = opts.config()?;
    let mut result = if opts.dump_projections {
        let (r, trace) = automorphism_group_traced(&graph, &config).map_err(|e| Failure::internal(e.to_string()))?;
        let dump: Vec<Value> = trace
            .projections
            .iter()
            .zip(&trace.decomposition.groups)
            .map(|(p, g)| {
                json!({
                    "eigenvalue": g.eigenvalue,
                    "multiplicity": g.multiplicity,
                    "points": p.distinct_points,
                    "fiber": p.fiber,
                    "listed_automorphisms": trace.automorphisms[p.space].elements.len(),
                })
            })
            .collect();
        eprintln!("{}", serde_json::to_string_pretty(&json!({ "projections": dump })).expect("serializable"));
        r
    } else {
        automorphism_group(&graph, &config).map_err(|e| Failure::internal(e.to_string()))?
    };
    if opts.oracle_check {
        if graph.vertex_count() <= ORACLE_LIMIT {
            result.diagnostics.push(oracle_aut(&graph, &result)?);
        } else {
            result
                .diagnostics
                .push(format!("oracle check skipped: n > {ORACLE_LIMIT}"));
        }
    }
    emit(opts.format, &aut_json(&result), aut_text(&result));
    Ok(EXIT_OK)
}

fn run_iso(file1: &Path, file2: &Path, opts: &Options) -> Result<u8, Failure> {
    let g1 = read_graph(file1, opts.input)?;
    let g2 = read_graph(file2, opts.input)?;
    let config = opts.config()?;
    let mut result = isomorphic(&g1, &g2, &config).map_err(|e| Failure::internal(e.to_string()))?;
    if opts.oracle_check {
        if g1.vertex_count().max(g2.vertex_count()) <= ORACLE_LIMIT {
            let brute = brute_iso(&g1, &g2).map_err(|e| Failure::internal(e.to_string()))?;
            if brute.is_some() != result.decision.isomorphic {
                return Err(Failure::internal(format!(
                    "oracle check failed: pipeline says isomorphic = {}, brute force {}",
                    result.decision.isomorphic,
                    brute.is_some()
                )));
            }
            result.diagnostics.push("oracle check: brute force agrees".into());
        } else {
            result.diagnostics.push(format!("oracle check skipped: n > {ORACLE_LIMIT}"));
        }
    }
    emit(opts.format, &iso_json(&result), iso_text(&result));
    Ok(if result.decision.isomorphic {
        EXIT_OK
    } else {
        EXIT_NOT_ISOMORPHIC
    })
}

fn run_spectrum(file: &Path, opts: &Options) -> Result<u8, Failure> {
    let graph = read_graph(file, opts.input)?;
    let config = opts.config()?;
    let tol = &config.tolerances;
    let eps = tol.eigen.unwrap_or_else(|| default_eigen_tol(graph.vertex_count()));
    let dec = decompose(&adjacency_matrix(&graph), tol.sweep, Some(eps)).map_err(|e| Failure::internal(e.to_string()))?;
    let summary = dec.summary();
    let value = json!({ "spectrum": summary, "diagnostics": dec.warnings });
    let mut text = String::new();
    for s in &summary {
        text += &format!("{:.9} x{}\n", s.eigenvalue, s.multiplicity);
    }
    for w in &dec.warnings {
        text += &format!("diagnostic: {w}\n");
    }
    emit(opts.format, &value, text);
    Ok(EXIT_OK)
}

fn run_selfcheck(seed: u64, opts: &Options) -> Result<u8, Failure> {
    let config = opts.config()?;
    let mut log = GeneratorLog::default();
    let mut checks: Vec<Check> = vec![
        selfcheck::small_graphs(4, 200, seed, &config, &mut log),
        selfcheck::named_graphs(&config, &mut log),
        selfcheck::cospectral_pair(&config, &mut log),
        selfcheck::relabeled_pairs(10, 20, 0.3, seed, &config, &mut log).0,
        selfcheck::coset_oracle(50, seed),
        selfcheck::geometric_oracle(50, seed, config.tolerances.gram),
        selfcheck::hypergraph_oracle(30, seed),
        selfcheck::spectral_invariants(60, seed, 1e-6),
    ];
    checks.push(log.soundness());
    let passed = checks.iter().all(|c| c.passed);
    let value = json!({
        "passed": passed,
        "checks": checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect::<Vec<_>>(),
    });
    let text: String = checks
        .iter()
        .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect();
    emit(opts.format, &value, text);
    Ok(if passed { EXIT_OK } else { EXIT_INTERNAL })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let (outcome, format) = match &cli.command {
        Command::Aut { file, opts } => (run_aut(file, opts), opts.format),
        Command::Iso { file1, file2, opts } => (run_iso(file1, file2, opts), opts.format),
        Command::Spectrum { file, opts } => (run_spectrum(file, opts), opts.format),
        Command::Selfcheck { seed, opts } => (run_selfcheck(*seed, opts), opts.format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            if format == OutputFormat::Json {
                println!("{}", json!({ "diagnostics": [f.message] }));
            }
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_beyond_u64_are_strings() {
        assert_eq!(order_json(&BigUint::from(720u32)), json!(720));
        let big: BigUint = (1..=25u32).map(BigUint::from).product();
        assert_eq!(order_json(&big), json!("15511210043330985984000000"));
    }

    #[test]
    fn witness_is_one_based() {
        let w = Permutation::from_images(vec![2, 0, 1]).unwrap();
        assert_eq!(witness_pairs(&w), vec![[1, 3], [2, 1], [3, 2]]);
    }
}

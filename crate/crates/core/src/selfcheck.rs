//! Oracle-equivalence checks on seeded fixtures, shared by the `selfcheck`
//! subcommand and the acceptance suite.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fixtures::{
    graph_from_code, random_coset_pair, random_graph, random_hypergraph, random_permutation, random_projected_points,
};
use crate::geomaut::{list_geometric_automorphisms, quantized_gram};
use crate::graph::Graph;
use crate::hypaut;
use crate::oracle::{brute_aut, brute_coset_meet, brute_geom_aut, brute_hyp_aut};
use crate::permgroup::{Permutation, PermutationGroup};
use crate::pipeline::{automorphism_group, isomorphic, same_spectrum, Config, REASON_NO_MATCHING};
use crate::spectral::{adjacency_matrix, decompose, default_eigen_tol};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, failures: &[String], detail: String) -> Self {
        let detail = match failures.first() {
            Some(f) => format!("{} failure(s), first: {f}; {detail}", failures.len()),
            None => detail,
        };
        Check {
            name: name.to_string(),
            passed: failures.is_empty(),
            detail,
        }
    }
}

/// Generators collected from every pipeline run, for the exact gate.
#[derive(Default)]
pub struct GeneratorLog {
    entries: Vec<(Graph, Vec<Permutation>)>,
}

impl GeneratorLog {
    pub fn record(&mut self, graph: &Graph, group: &PermutationGroup) {
        self.entries.push((graph.clone(), group.generators().to_vec()));
    }

    pub fn generator_count(&self) -> usize {
        self.entries.iter().map(|(_, g)| g.len()).sum()
    }

    /// Checks `Mᵀ A M = A` in integers for every recorded generator.
    pub fn soundness(&self) -> Check {
        let mut failures = Vec::new();
        for (graph, gens) in &self.entries {
            let a = integer_adjacency(graph);
            for p in gens {
                if !preserves_adjacency(&a, p) {
                    failures.push(format!("{} on a graph with {} vertices", p, graph.vertex_count()));
                }
            }
        }
        Check::new(
            "exact soundness gate",
            &failures,
            format!("{} generators from {} runs", self.generator_count(), self.entries.len()),
        )
    }
}

fn integer_adjacency(g: &Graph) -> Vec<Vec<i64>> {
    let n = g.vertex_count();
    let mut a = vec![vec![0i64; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = 1;
        a[v][u] = 1;
    }
    a
}

/// `Mᵀ A M = A` for the permutation matrix `M` with `M[p(j)][j] = 1`, so
/// `(Mᵀ A M)[i][j] = A[p(i)][p(j)]`.
pub fn preserves_adjacency(a: &[Vec<i64>], p: &Permutation) -> bool {
    let n = a.len();
    if p.degree() != n {
        return false;
    }
    let m = p.matrix();
    // column j of M has its single 1 in row p(j)
    let col: Vec<usize> = (0..n).map(|j| (0..n).find(|&r| m[r][j] == 1).unwrap()).collect();
    (0..n).all(|i| (0..n).all(|j| a[col[i]][col[j]] == a[i][j]))
}

fn count_check(graph: &Graph, config: &Config, log: &mut GeneratorLog) -> Result<(), String> {
    let expected = brute_aut(graph).map_err(|e| e.to_string())?.len();
    let r = automorphism_group(graph, config).map_err(|e| format!("{graph:?}: {e}"))?;
    log.record(graph, &r.group);
    if !r.verified || r.order != BigUint::from(expected) {
        return Err(format!(
            "edges {:?}: order {} (verified {}), brute force {}",
            graph.edges().collect::<Vec<_>>(),
            r.order,
            r.verified,
            expected
        ));
    }
    Ok(())
}

/// Every labeled graph on at most `exhaustive_n` vertices plus `samples`
/// seeded graphs on `exhaustive_n + 1` vertices against brute force.
pub fn small_graphs(exhaustive_n: usize, samples: usize, seed: u64, config: &Config, log: &mut GeneratorLog) -> Check {
    let mut failures = Vec::new();
    let mut total = 0usize;
    for n in 0..=exhaustive_n {
        let pairs = n * n.saturating_sub(1) / 2;
        for code in 0..1u64 << pairs {
            total += 1;
            if let Err(e) = count_check(&graph_from_code(n, code), config, log) {
                failures.push(e);
            }
        }
    }
    let n = exhaustive_n + 1;
    let pairs = n * (n - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        total += 1;
        let code = rng.gen_range(0..1u64 << pairs);
        if let Err(e) = count_check(&graph_from_code(n, code), config, log) {
            failures.push(e);
        }
    }
    Check::new(
        "oracle equivalence on small graphs",
        &failures,
        format!("{total} graphs, n <= {exhaustive_n} exhaustive plus {samples} on n = {n}"),
    )
}

fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// Named graphs with their brute-force orders and expected multiplicities.
pub fn named_graphs(config: &Config, log: &mut GeneratorLog) -> Check {
    let mut cases: Vec<(String, Graph, Option<Vec<usize>>)> =
        vec![("Petersen".into(), Graph::petersen(), Some(vec![1, 5, 4]))];
    for n in 4..=8 {
        cases.push((format!("C_{n}"), Graph::cycle(n), None));
    }
    for n in 3..=8 {
        cases.push((format!("P_{n}"), Graph::path(n), Some(vec![1; n])));
    }
    for n in 3..=6 {
        cases.push((format!("K_{n}"), Graph::complete(n), Some(vec![1, n - 1])));
    }
    let mut failures = Vec::new();
    for (name, g, mults) in &cases {
        let expected = match brute_aut(g) {
            Ok(els) => BigUint::from(els.len()),
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        match automorphism_group(g, config) {
            Ok(r) => {
                log.record(g, &r.group);
                let got: Vec<usize> = r.spectrum.iter().map(|s| s.multiplicity).collect();
                if r.order != expected || !r.verified {
                    failures.push(format!("{name}: order {} expected {expected}", r.order));
                } else if mults.as_ref().is_some_and(|m| *m != got) {
                    failures.push(format!("{name}: multiplicities {got:?} expected {mults:?}"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Check::new("named graph orders", &failures, format!("{} graphs", cases.len()))
}

/// C_4 ∪ K_1 against K_{1,4}: cospectral, not isomorphic.
pub fn cospectral_pair(config: &Config, log: &mut GeneratorLog) -> Check {
    let a = Graph::cycle(4).disjoint_union(&Graph::empty(1));
    let b = Graph::star(4);
    let mut failures = Vec::new();
    let eps = default_eigen_tol(5);
    match (decompose(&adjacency_matrix(&a), None, None), decompose(&adjacency_matrix(&b), None, None)) {
        (Ok(sa), Ok(sb)) if same_spectrum(&sa, &sb, eps) => {}
        _ => failures.push("spectra differ, so the pre-check would decide".into()),
    }
    for (x, y) in [(&a, &b), (&b, &a)] {
        match isomorphic(x, y, config) {
            Ok(r) => {
                if let Some(g) = &r.union_group {
                    log.record(&x.disjoint_union(y), g);
                }
                if r.decision.isomorphic || r.decision.reason.as_deref() != Some(REASON_NO_MATCHING) {
                    failures.push(format!("decision {:?}", r.decision));
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    Check::new("cospectral mates rejected", &failures, "C_4 + K_1 vs K_{1,4}, both argument orders".into())
}

/// Random graphs against random relabelings; returns the check and the
/// per-pair times.
pub fn relabeled_pairs(
    count: usize,
    max_n: usize,
    p: f64,
    seed: u64,
    config: &Config,
    log: &mut GeneratorLog,
) -> (Check, Vec<Duration>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut times = Vec::with_capacity(count);
    for k in 0..count {
        let n = rng.gen_range(1..=max_n);
        let g = random_graph(&mut rng, n, p);
        let s = random_permutation(&mut rng, n);
        let h = g.relabel(&s);
        let start = Instant::now();
        let r = isomorphic(&g, &h, config);
        times.push(start.elapsed());
        match r {
            Ok(r) => {
                if let Some(grp) = &r.union_group {
                    log.record(&g.disjoint_union(&h), grp);
                }
                match &r.witness {
                    Some(w) if r.decision.isomorphic && g.relabel(w) == h => {}
                    _ => failures.push(format!("pair {k} (n = {n}): {:?}", r.decision)),
                }
            }
            Err(e) => failures.push(format!("pair {k} (n = {n}): {e}")),
        }
    }
    let mut sorted = times.clone();
    sorted.sort();
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or_default();
    let detail = format!("{count} pairs, n <= {max_n}, p = {p}, median {median:.3?}");
    (Check::new("isomorphic pairs with verified witness", &failures, detail), times)
}

pub fn coset_oracle(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..count {
        let (space, a, b) = random_coset_pair(&mut rng, 24);
        let (ga, ra) = (a.group().unwrap(), a.representative().unwrap());
        let (gb, rb) = (b.group().unwrap(), b.representative().unwrap());
        let fast = match space.restricted_coset_intersection(ga, ra, gb, rb) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("instance {k}: {e}"));
                continue;
            }
        };
        let slow = brute_coset_meet(&a, &b).unwrap();
        let mut got = fast.elements(10_000).unwrap_or_default();
        got.sort_by(|x, y| x.images().cmp(y.images()));
        if got != slow {
            failures.push(format!("instance {k}: {} elements, brute force {}", got.len(), slow.len()));
        }
    }
    Check::new("restricted coset intersection vs brute force", &failures, format!("{count} instances"))
}

pub fn geometric_oracle(count: usize, seed: u64, eps: f64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..count {
        let pts = random_projected_points(&mut rng, 8, eps);
        let (gram, _) = quantized_gram(&pts, eps);
        let fast = match list_geometric_automorphisms(0, &gram, usize::MAX) {
            Ok(l) => l.elements,
            Err(e) => {
                failures.push(format!("instance {k}: {e}"));
                continue;
            }
        };
        let mut slow = brute_geom_aut(&pts, eps).unwrap();
        slow.sort_by(|x, y| x.images().cmp(y.images()));
        let mut got = fast;
        got.sort_by(|x, y| x.images().cmp(y.images()));
        if got != slow {
            failures.push(format!("instance {k} ({} points): {} vs {}", pts.len(), got.len(), slow.len()));
        }
    }
    Check::new("geometric automorphisms vs brute force", &failures, format!("{count} point sets, m <= 8"))
}

pub fn hypergraph_oracle(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..count {
        let x = random_hypergraph(&mut rng, 3, 5, 24);
        let slow = brute_hyp_aut(&x).unwrap();
        match hypaut::hyp_aut(&x) {
            Ok(group) => {
                let ok = group.order() == BigUint::from(slow.len()) && slow.iter().all(|p| group.contains(p));
                if !ok {
                    failures.push(format!("instance {k}: order {} vs {}", group.order(), slow.len()));
                }
            }
            Err(e) => failures.push(format!("instance {k}: {e}")),
        }
    }
    Check::new("hypergraph automorphisms vs brute force", &failures, format!("{count} instances, r <= 3, |V_i| <= 5"))
}

/// Spectral residuals on the named graphs and seeded random graphs up to
/// `max_n` vertices.
pub fn spectral_invariants(max_n: usize, seed: u64, tol: f64) -> Check {
    let mut corpus = vec![
        Graph::petersen(),
        Graph::cycle(max_n),
        Graph::path(max_n),
        Graph::complete(max_n.min(60)),
        Graph::empty(max_n),
        Graph::star(max_n - 1),
        Graph::cycle(4).disjoint_union(&Graph::empty(1)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sizes: Vec<usize> = [10, 25, 40, 80, 120, 160].into_iter().filter(|&n| n < max_n).collect();
    sizes.push(max_n);
    for n in sizes {
        for p in [0.05, 0.3, 0.7] {
            corpus.push(random_graph(&mut rng, n, p));
        }
    }
    let mut failures = Vec::new();
    let mut worst = 0f64;
    for g in &corpus {
        let a = adjacency_matrix(g);
        match decompose(&a, None, None) {
            Ok(dec) => {
                let r = [dec.reconstruction_residual(&a), dec.partition_residual(), dec.orthogonality_residual()];
                let m = r.iter().cloned().fold(0.0, f64::max);
                worst = worst.max(m);
                let sum: usize = dec.multiplicities().iter().sum();
                if m > tol || sum != g.vertex_count() {
                    failures.push(format!("n = {}: residuals {r:?}, multiplicity sum {sum}", g.vertex_count()));
                }
            }
            Err(e) => failures.push(format!("n = {}: {e}", g.vertex_count())),
        }
    }
    Check::new(
        "spectral residuals",
        &failures,
        format!("{} graphs up to n = {max_n}, worst residual {worst:.2e}", corpus.len()),
    )
}

/// Edgeless graphs: the large one must hit the listing cap, the small one
/// must have full symmetric group.
pub fn degenerate(config: &Config, log: &mut GeneratorLog) -> Check {
    let mut failures = Vec::new();
    match automorphism_group(&Graph::empty(12), config) {
        Err(e) if e.is_cap_exceeded() => {}
        Err(e) => failures.push(format!("n = 12: unexpected error {e}")),
        Ok(r) => failures.push(format!("n = 12: completed with order {}", r.order)),
    }
    match automorphism_group(&Graph::empty(6), config) {
        Ok(r) => {
            log.record(&Graph::empty(6), &r.group);
            if r.order != factorial(6) {
                failures.push(format!("n = 6: order {}", r.order));
            }
        }
        Err(e) => failures.push(format!("n = 6: {e}")),
    }
    Check::new("edgeless graphs", &failures, "n = 12 exceeds the cap, n = 6 gives 720".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_rejects_non_automorphisms() {
        let a = integer_adjacency(&Graph::path(3));
        assert!(preserves_adjacency(&a, &Permutation::from_cycles(3, &[&[0, 2]]).unwrap()));
        assert!(!preserves_adjacency(&a, &Permutation::from_cycles(3, &[&[0, 1]]).unwrap()));
    }

    #[test]
    fn quick_suite() {
        let cfg = Config::default();
        let mut log = GeneratorLog::default();
        assert!(small_graphs(3, 20, 1, &cfg, &mut log).passed);
        assert!(cospectral_pair(&cfg, &mut log).passed);
        assert!(coset_oracle(10, 2).passed);
        assert!(geometric_oracle(10, 3, 1e-9).passed);
        assert!(hypergraph_oracle(10, 4).passed);
        assert!(spectral_invariants(30, 5, 1e-6).passed);
        assert!(log.soundness().passed);
        assert!(log.generator_count() > 0);
    }
}

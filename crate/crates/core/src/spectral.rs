//! Symmetric eigendecomposition by cyclic Jacobi rotations and grouping of
//! eigenvalues into eigenspaces represented by orthogonal projectors.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off:e}, tolerance {tol:e})")]
    NoConvergence { sweeps: usize, off: f64, tol: f64 },
}

const MAX_SWEEPS: usize = 100;

/// Dense symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpectralError> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        for i in 0..n {
            for j in i + 1..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(SpectralError::NotSymmetric(i, j));
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub(crate) fn matmul(&self, other: &SymMatrix) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let row = other.row(k);
                let dst = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] += a * row[j];
                }
            }
        }
        out
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                s += self.get(i, j).powi(2);
            }
        }
        (2.0 * s).sqrt()
    }
}

/// The adjacency matrix `A(i, j) = 1` iff `{i, j}` is an edge.
pub fn adjacency_matrix(graph: &Graph) -> SymMatrix {
    let n = graph.vertex_count();
    let mut m = SymMatrix::zeros(n);
    for (u, v) in graph.edges() {
        m.data[u * n + v] = 1.0;
        m.data[v * n + u] = 1.0;
    }
    m
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Default Jacobi stopping threshold `1e-12 · n · max|A|`.
pub fn default_sweep_tol(a: &SymMatrix) -> f64 {
    1e-12 * a.dim() as f64 * a.max_abs()
}

/// Default eigenvalue clustering gap `1e-8 · max(1, n)`.
pub fn default_eigen_tol(n: usize) -> f64 {
    1e-8 * (n.max(1) as f64)
}

/// Cyclic Jacobi eigendecomposition. Returns eigenpairs sorted by descending
/// eigenvalue; the eigenvectors are orthonormal.
///
/// Sweeps stop once the off-diagonal Frobenius mass is at most `sweep_tol`,
/// followed by one more sweep to bring the residual down to rounding level.
pub fn eigendecompose(a: &SymMatrix, sweep_tol: f64) -> Result<Vec<EigenPair>, SpectralError> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = SymMatrix::identity(n);
    let mut polish = false;
    let mut sweeps = 0;
    loop {
        let off = m.off_diagonal_norm();
        if off <= sweep_tol || off == 0.0 {
            if polish || off == 0.0 {
                break;
            }
            polish = true;
        }
        if sweeps == MAX_SWEEPS {
            return Err(SpectralError::NoConvergence {
                sweeps,
                off,
                tol: sweep_tol,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|j| EigenPair {
            value: m.get(j, j),
            vector: (0..n).map(|i| v.get(i, j)).collect(),
        })
        .collect();
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

fn rotate(m: &mut SymMatrix, v: &mut SymMatrix, p: usize, q: usize) {
    let n = m.n;
    let apq = m.get(p, q);
    if apq == 0.0 {
        return;
    }
    let app = m.get(p, p);
    let aqq = m.get(q, q);
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m.get(k, p);
        let akq = m.get(k, q);
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        m.data[k * n + p] = new_kp;
        m.data[p * n + k] = new_kp;
        m.data[k * n + q] = new_kq;
        m.data[q * n + k] = new_kq;
    }
    m.data[p * n + p] = app - t * apq;
    m.data[q * n + q] = aqq + t * apq;
    m.data[p * n + q] = 0.0;
    m.data[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v.data[k * n + p];
        let vkq = v.data[k * n + q];
        v.data[k * n + p] = c * vkp - s * vkq;
        v.data[k * n + q] = s * vkp + c * vkq;
    }
}

/// One eigenvalue cluster and its eigenspace.
#[derive(Clone, Debug)]
pub struct EigenspaceGroup {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Orthogonal projector onto the eigenspace.
    pub projector: SymMatrix,
    /// Orthonormal basis of the eigenspace as returned by the solver.
    pub basis: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub dimension: usize,
    /// Sorted by descending eigenvalue.
    pub groups: Vec<EigenspaceGroup>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

impl SpectralDecomposition {
    pub fn summary(&self) -> Vec<SpectrumEntry> {
        self.groups
            .iter()
            .map(|g| SpectrumEntry {
                eigenvalue: g.eigenvalue,
                multiplicity: g.multiplicity,
            })
            .collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.multiplicity).collect()
    }

    /// `‖A - Σ λ_ℓ P_ℓ‖_F`.
    pub fn reconstruction_residual(&self, a: &SymMatrix) -> f64 {
        let n = self.dimension;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let approx: f64 = self
                    .groups
                    .iter()
                    .map(|g| g.eigenvalue * g.projector.get(i, j))
                    .sum();
                s += (a.get(i, j) - approx).powi(2);
            }
        }
        s.sqrt()
    }

    /// `‖Σ P_ℓ - I‖_F`.
    pub fn partition_residual(&self) -> f64 {
        let n = self.dimension;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let sum: f64 = self.groups.iter().map(|g| g.projector.get(i, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                s += (sum - target).powi(2);
            }
        }
        s.sqrt()
    }

    /// Largest `‖P_ℓ² - P_ℓ‖_F` over all groups.
    pub fn idempotence_residual(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let sq = g.projector.matmul(&g.projector);
                sq.iter()
                    .zip(&g.projector.data)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `‖P_ℓ P_m‖_F` over pairs `ℓ ≠ m`.
    ///
    /// Uses `‖P_ℓ P_m‖_F² = ‖U_ℓᵀ U_m‖_F²` on the stored bases.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, ga) in self.groups.iter().enumerate() {
            for gb in &self.groups[a + 1..] {
                let mut s = 0.0;
                for u in &ga.basis {
                    for w in &gb.basis {
                        let d: f64 = u.iter().zip(w).map(|(x, y)| x * y).sum();
                        s += d * d;
                    }
                }
                worst = worst.max(s.sqrt());
            }
        }
        worst
    }

    /// Largest `|trace(P_ℓ) - multiplicity|`.
    pub fn trace_residual(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| (g.projector.trace() - g.multiplicity as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Clusters eigenpairs by single linkage on the sorted eigenvalues: adjacent
/// values closer than `eps` share a group. Gaps between groups smaller than
/// `10 · eps` are reported as warnings since the grouping then depends on the
/// tolerance.
pub fn group_eigenvalues(mut raw: Vec<EigenPair>, eps: f64) -> SpectralDecomposition {
    raw.sort_by(|x, y| y.value.total_cmp(&x.value));
    let n = raw.first().map_or(0, |p| p.vector.len());
    let mut clusters: Vec<Vec<EigenPair>> = Vec::new();
    let mut warnings = Vec::new();
    for pair in raw {
        match clusters.last_mut() {
            Some(c) if c.last().unwrap().value - pair.value <= eps => c.push(pair),
            Some(c) => {
                let gap = c.last().unwrap().value - pair.value;
                if gap < 10.0 * eps {
                    warnings.push(format!(
                        "eigenvalue gap {gap:.3e} between {:.12} and {:.12} is within 10x the grouping tolerance {eps:.1e}",
                        c.last().unwrap().value,
                        pair.value
                    ));
                }
                clusters.push(vec![pair]);
            }
            None => clusters.push(vec![pair]),
        }
    }
    let groups = clusters
        .into_iter()
        .map(|c| {
            let eigenvalue = c.iter().map(|p| p.value).sum::<f64>() / c.len() as f64;
            let mut projector = SymMatrix::zeros(n);
            for p in &c {
                for i in 0..n {
                    let vi = p.vector[i];
                    if vi == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        projector.data[i * n + j] += vi * p.vector[j];
                    }
                }
            }
            EigenspaceGroup {
                eigenvalue,
                multiplicity: c.len(),
                projector,
                basis: c.into_iter().map(|p| p.vector).collect(),
            }
        })
        .collect();
    SpectralDecomposition {
        dimension: n,
        groups,
        warnings,
    }
}

/// Eigendecomposition plus grouping; `None` tolerances take the defaults.
pub fn decompose(
    a: &SymMatrix,
    sweep_tol: Option<f64>,
    eigen_tol: Option<f64>,
) -> Result<SpectralDecomposition, SpectralError> {
    let sweep = sweep_tol.unwrap_or_else(|| default_sweep_tol(a));
    let eps = eigen_tol.unwrap_or_else(|| default_eigen_tol(a.dim()));
    let raw = eigendecompose(a, sweep)?;
    let mut dec = group_eigenvalues(raw, eps);
    dec.dimension = a.dim();
    Ok(dec)
}

pub fn max_multiplicity(dec: &SpectralDecomposition) -> usize {
    dec.groups.iter().map(|g| g.multiplicity).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spectrum(g: &Graph) -> SpectralDecomposition {
        decompose(&adjacency_matrix(g), None, None).unwrap()
    }

    #[test]
    fn adjacency_of_small_graphs() {
        assert_eq!(
            adjacency_matrix(&Graph::complete(2)),
            SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
        );
        assert_eq!(adjacency_matrix(&Graph::empty(3)), SymMatrix::zeros(3));
        let k3 = adjacency_matrix(&Graph::complete(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(k3.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        assert_eq!(
            SymMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]),
            Err(SpectralError::NotSymmetric(0, 1))
        );
    }

    #[test]
    fn k2_eigenpairs() {
        let pairs = eigendecompose(&adjacency_matrix(&Graph::complete(2)), 1e-14).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-14);
        assert!((pairs[1].value + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pairs[0].vector[0].abs() - h).abs() < 1e-14);
        assert!((pairs[0].vector[0] - pairs[0].vector[1]).abs() < 1e-14);
        assert!((pairs[1].vector[0] + pairs[1].vector[1]).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let pairs = eigendecompose(&SymMatrix::zeros(3), 0.0).unwrap();
        assert!(pairs.iter().all(|p| p.value == 0.0));
        let dec = spectrum(&Graph::empty(3));
        assert_eq!(dec.multiplicities(), vec![3]);
        assert_eq!(max_multiplicity(&dec), 3);
    }

    #[test]
    fn c4_spectrum() {
        let dec = spectrum(&Graph::cycle(4));
        let vals: Vec<f64> = dec.groups.iter().map(|g| g.eigenvalue).collect();
        // closed form 2cos(2πj/4), j = 0..3
        let expect = [2.0, 0.0, -2.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(dec.multiplicities(), vec![1, 2, 1]);
    }

    #[test]
    fn clustering_rule() {
        let pair = |value: f64| EigenPair {
            value,
            vector: vec![0.0; 4],
        };
        let dec = group_eigenvalues(vec![pair(2.0), pair(1e-12), pair(-1e-12), pair(-2.0)], 1e-8);
        assert_eq!(dec.multiplicities(), vec![1, 2, 1]);
        assert!(dec.warnings.is_empty());

        let dec = group_eigenvalues(vec![pair(1.0), pair(1.0 - 5e-8)], 1e-8);
        assert_eq!(dec.multiplicities(), vec![1, 1]);
        assert_eq!(dec.warnings.len(), 1);
    }

    #[test]
    fn path_p4_is_simple() {
        let dec = spectrum(&Graph::path(4));
        assert_eq!(dec.multiplicities(), vec![1, 1, 1, 1]);
        for (j, g) in dec.groups.iter().enumerate() {
            let expect = 2.0 * (std::f64::consts::PI * (j + 1) as f64 / 5.0).cos();
            assert!((g.eigenvalue - expect).abs() < 1e-12);
        }
        assert_eq!(max_multiplicity(&dec), 1);
    }

    #[test]
    fn petersen_multiplicities() {
        let dec = spectrum(&Graph::petersen());
        let vals: Vec<f64> = dec.groups.iter().map(|g| g.eigenvalue).collect();
        assert_eq!(dec.multiplicities(), vec![1, 5, 4]);
        for (v, e) in vals.iter().zip([3.0, 1.0, -2.0]) {
            assert!((v - e).abs() < 1e-10);
        }
        assert_eq!(max_multiplicity(&dec), 5);
    }

    #[test]
    fn agrees_with_nalgebra() {
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (2, 6)]).unwrap();
        let a = adjacency_matrix(&g);
        let ours = eigendecompose(&a, 1e-14).unwrap();
        let m = nalgebra::DMatrix::from_fn(7, 7, |i, j| a.get(i, j));
        let mut theirs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        for (p, t) in ours.iter().zip(theirs) {
            assert!((p.value - t).abs() < 1e-10);
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (2..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut edges = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k] {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                Graph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn projector_identities(g in arb_graph(12)) {
            let a = adjacency_matrix(&g);
            let dec = decompose(&a, None, None).unwrap();
            prop_assert_eq!(dec.multiplicities().iter().sum::<usize>(), g.vertex_count());
            prop_assert!(dec.reconstruction_residual(&a) <= 1e-8);
            prop_assert!(dec.partition_residual() <= 1e-8);
            prop_assert!(dec.idempotence_residual() <= 1e-8);
            prop_assert!(dec.orthogonality_residual() <= 1e-8);
            prop_assert!(dec.trace_residual() <= 1e-6);
        }

        #[test]
        fn union_spectrum_is_multiset_union(g in arb_graph(7), h in arb_graph(7)) {
            let mut expect: Vec<f64> = eigendecompose(&adjacency_matrix(&g), 1e-14).unwrap()
                .into_iter()
                .chain(eigendecompose(&adjacency_matrix(&h), 1e-14).unwrap())
                .map(|p| p.value)
                .collect();
            expect.sort_by(|x, y| y.total_cmp(x));
            let got = eigendecompose(&adjacency_matrix(&g.disjoint_union(&h)), 1e-14).unwrap();
            for (p, e) in got.iter().zip(&expect) {
                prop_assert!((p.value - e).abs() < 1e-9);
            }
        }
    }
}

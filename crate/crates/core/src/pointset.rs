//! The point-set encoding of a graph and its projections into eigenspaces.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::spectral::{SpectralDecomposition, SymMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ToleranceError {
    #[error(
        "eigenspace {space}: points {a} and {b} are {distance:.3e} apart, inside the ambiguous band \
         [{lo:.1e}, {hi:.1e}] around the point tolerance; rerun with a different --tol-point"
    )]
    AmbiguousPoints {
        space: usize,
        a: usize,
        b: usize,
        distance: f64,
        lo: f64,
        hi: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointRole {
    /// The unit vector `e_v`.
    Vertex(usize),
    /// `e_u + e_v` for the edge `{u, v}`, `u < v`.
    Edge(usize, usize),
}

impl PointRole {
    pub fn support(&self) -> Vec<usize> {
        match *self {
            PointRole::Vertex(v) => vec![v],
            PointRole::Edge(u, v) => vec![u, v],
        }
    }
}

#[derive(Clone, Debug)]
pub struct PointSet {
    pub ambient_dimension: usize,
    pub points: Vec<Vec<f64>>,
    pub roles: Vec<PointRole>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the point for vertex `v`.
    pub fn vertex_point(&self, v: usize) -> usize {
        v
    }

    pub fn rank(&self) -> usize {
        if self.points.is_empty() {
            return 0;
        }
        let m = nalgebra::DMatrix::from_fn(self.ambient_dimension, self.points.len(), |i, j| self.points[j][i]);
        m.rank(1e-9)
    }
}

/// Unit vectors `e_0..e_{n-1}` followed by `e_u + e_v` for each edge in
/// lexicographic order.
pub fn graph_point_set(graph: &Graph) -> PointSet {
    let n = graph.vertex_count();
    let mut points = Vec::with_capacity(n + graph.edge_count());
    let mut roles = Vec::with_capacity(n + graph.edge_count());
    for v in 0..n {
        let mut p = vec![0.0; n];
        p[v] = 1.0;
        points.push(p);
        roles.push(PointRole::Vertex(v));
    }
    for (u, v) in graph.edges() {
        let mut p = vec![0.0; n];
        p[u] = 1.0;
        p[v] = 1.0;
        points.push(p);
        roles.push(PointRole::Edge(u, v));
    }
    PointSet {
        ambient_dimension: n,
        points,
        roles,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectedPointSet {
    pub space: usize,
    /// Distinct projected points in ambient coordinates.
    pub distinct_points: Vec<Vec<f64>>,
    /// `fiber[i]` is the distinct point that original point `i` projects to.
    pub fiber: Vec<usize>,
    /// One original point per distinct point.
    pub representatives: Vec<usize>,
    #[serde(skip)]
    supports: Vec<Vec<(usize, f64)>>,
    #[serde(skip)]
    projector: Option<SymMatrix>,
}

impl ProjectedPointSet {
    pub fn len(&self) -> usize {
        self.distinct_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distinct_points.is_empty()
    }

    /// Gram matrix of the distinct points, row-major. When the projector is
    /// known, entries come from `⟨P p_a, P p_b⟩ = p_aᵀ P p_b` on the sparse
    /// representatives; otherwise from the coordinates.
    pub fn gram(&self) -> Vec<f64> {
        let m = self.len();
        let mut g = vec![0.0; m * m];
        for a in 0..m {
            for b in a..m {
                let v = match &self.projector {
                    Some(p) => {
                        let mut s = 0.0;
                        for &(i, x) in &self.supports[a] {
                            for &(j, y) in &self.supports[b] {
                                s += x * y * p.get(i, j);
                            }
                        }
                        s
                    }
                    None => dot(&self.distinct_points[a], &self.distinct_points[b]),
                };
                g[a * m + b] = v;
                g[b * m + a] = v;
            }
        }
        g
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn sweep_direction(n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|k| (0.7548776662 * (k as f64 + 1.0)).fract() + 0.5).collect();
    let norm = dot(&w, &w).sqrt();
    w.into_iter().map(|x| x / norm).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Merges points closer than `eps` (single linkage). Any pair whose distance
/// falls in `[eps/10, 10·eps]` makes the result tolerance-dependent and is
/// reported as an error.
pub fn deduplicate(
    space: usize,
    points: &[Vec<f64>],
    eps: f64,
) -> Result<(Vec<usize>, Vec<usize>), ToleranceError> {
    let n_pts = points.len();
    let dim = points.first().map_or(0, Vec::len);
    let w = sweep_direction(dim);
    let keyed: Vec<f64> = points.iter().map(|p| dot(p, &w)).collect();
    let mut order: Vec<usize> = (0..n_pts).collect();
    order.sort_by(|&a, &b| keyed[a].total_cmp(&keyed[b]));
    let (lo, hi) = (eps / 10.0, 10.0 * eps);
    let mut uf = UnionFind((0..n_pts).collect());
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if keyed[b] - keyed[a] > hi {
                break;
            }
            let d = dist(&points[a], &points[b]);
            if (lo..=hi).contains(&d) {
                return Err(ToleranceError::AmbiguousPoints {
                    space,
                    a: a.min(b),
                    b: a.max(b),
                    distance: d,
                    lo,
                    hi,
                });
            }
            if d < lo {
                uf.union(a, b);
            }
        }
    }
    let roots: Vec<usize> = (0..n_pts).map(|i| uf.find(i)).collect();
    let mut reps: Vec<usize> = (0..n_pts).filter(|&i| roots[i] == i).collect();
    let key = |i: usize| -> Vec<i64> { points[i].iter().map(|x| (x / eps).round() as i64).collect() };
    let keys: Vec<Vec<i64>> = reps.iter().map(|&r| key(r)).collect();
    let mut idx: Vec<usize> = (0..reps.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(reps[a].cmp(&reps[b])));
    reps = idx.into_iter().map(|k| reps[k]).collect();
    let mut slot = vec![usize::MAX; n_pts];
    for (d, &r) in reps.iter().enumerate() {
        slot[r] = d;
    }
    let fiber = (0..n_pts).map(|i| slot[roots[i]]).collect();
    Ok((fiber, reps))
}

/// Projects every point into one eigenspace and deduplicates.
pub fn project(
    ps: &PointSet,
    space: usize,
    projector: &SymMatrix,
    eps: f64,
) -> Result<ProjectedPointSet, ToleranceError> {
    let n = ps.ambient_dimension;
    assert_eq!(projector.dim(), n, "projector and point set dimensions differ");
    let sparse: Vec<Vec<(usize, f64)>> = ps
        .points
        .iter()
        .map(|p| p.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, x)| (i, *x)).collect())
        .collect();
    let projected: Vec<Vec<f64>> = sparse
        .iter()
        .map(|s| {
            (0..n)
                .map(|r| s.iter().map(|&(i, x)| x * projector.get(r, i)).sum())
                .collect()
        })
        .collect();
    let (fiber, reps) = deduplicate(space, &projected, eps)?;
    Ok(ProjectedPointSet {
        space,
        distinct_points: reps.iter().map(|&r| projected[r].clone()).collect(),
        supports: reps.iter().map(|&r| sparse[r].clone()).collect(),
        representatives: reps,
        fiber,
        projector: Some(projector.clone()),
    })
}

/// One projected point set per eigenspace, in the decomposition's order.
pub fn project_all(
    ps: &PointSet,
    dec: &SpectralDecomposition,
    eps: f64,
) -> Result<Vec<ProjectedPointSet>, ToleranceError> {
    use rayon::prelude::*;
    dec.groups
        .par_iter()
        .enumerate()
        .map(|(l, g)| project(ps, l, &g.projector, eps))
        .collect()
}

/// Deduplicates an arbitrary list of vectors without projecting.
pub fn projected_from_points(space: usize, points: &[Vec<f64>], eps: f64) -> Result<ProjectedPointSet, ToleranceError> {
    let (fiber, reps) = deduplicate(space, points, eps)?;
    Ok(ProjectedPointSet {
        space,
        distinct_points: reps.iter().map(|&r| points[r].clone()).collect(),
        supports: Vec::new(),
        representatives: reps,
        fiber,
        projector: None,
    })
}

/// The fibers of the projection as classes of original point indices.
pub fn ell_equivalence_classes(proj: &ProjectedPointSet) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); proj.len()];
    for (i, &f) in proj.fiber.iter().enumerate() {
        classes[f].push(i);
    }
    classes
}

/// Largest `‖Σ_ℓ q_ℓ(i) - p_i‖` over original points, where `q_ℓ(i)` is the
/// distinct point `i` falls on in space `ℓ`.
pub fn reconstruction_residual(ps: &PointSet, projections: &[ProjectedPointSet]) -> f64 {
    (0..ps.len())
        .map(|i| {
            let mut sum = vec![0.0; ps.ambient_dimension];
            for proj in projections {
                for (s, x) in sum.iter_mut().zip(&proj.distinct_points[proj.fiber[i]]) {
                    *s += x;
                }
            }
            dist(&sum, &ps.points[i])
        })
        .fold(0.0, f64::max)
}

/// Largest `|Σ_ℓ ‖q_ℓ(i) - q_ℓ(j)‖² - ‖p_i - p_j‖²|` over pairs of points.
pub fn pythagoras_residual(ps: &PointSet, projections: &[ProjectedPointSet]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            let split: f64 = projections
                .iter()
                .map(|p| dist(&p.distinct_points[p.fiber[i]], &p.distinct_points[p.fiber[j]]).powi(2))
                .sum();
            worst = worst.max((split - dist(&ps.points[i], &ps.points[j]).powi(2)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{adjacency_matrix, decompose};
    use proptest::prelude::*;

    const EPS: f64 = 1e-9;

    fn projections(g: &Graph) -> (PointSet, Vec<ProjectedPointSet>) {
        let ps = graph_point_set(g);
        let dec = decompose(&adjacency_matrix(g), None, None).unwrap();
        let pr = project_all(&ps, &dec, EPS).unwrap();
        (ps, pr)
    }

    #[test]
    fn path_points() {
        let ps = graph_point_set(&Graph::path(3));
        assert_eq!(
            ps.points,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
                vec![0.0, 1.0, 1.0],
            ]
        );
        assert_eq!(ps.roles[4], PointRole::Edge(1, 2));
        assert_eq!(graph_point_set(&Graph::empty(4)).len(), 4);
    }

    #[test]
    fn incidence_distances() {
        let ps = graph_point_set(&Graph::path(4));
        // points: e0 e1 e2 e3, (0,1) (1,2) (2,3)
        let d = |a: usize, b: usize| dist(&ps.points[a], &ps.points[b]);
        assert_eq!(d(0, 4), 1.0);
        assert!((d(0, 5) - 3f64.sqrt()).abs() < 1e-15);
        assert!((d(4, 5) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d(4, 6), 2.0);
    }

    #[test]
    fn k2_projections() {
        let (_, pr) = projections(&Graph::complete(2));
        // λ = 1 first: both vertices land on (1/2, 1/2)
        assert_eq!(ell_equivalence_classes(&pr[0])[0], vec![0, 1]);
        let q = &pr[1].distinct_points[pr[1].fiber[0]];
        assert!((q[0] - 0.5).abs() < 1e-12 && (q[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_space_keeps_points() {
        let ps = graph_point_set(&Graph::empty(3));
        let pr = project(&ps, 0, &SymMatrix::identity(3), EPS).unwrap();
        // distinct points are ordered by their rounded coordinates
        assert_eq!(pr.fiber, vec![2, 1, 0]);
        assert!(ell_equivalence_classes(&pr).iter().all(|c| c.len() == 1));
    }

    #[test]
    fn ambiguous_points_are_reported() {
        let pts = vec![vec![0.0, 0.0], vec![5e-9, 0.0], vec![1.0, 0.0]];
        assert!(matches!(deduplicate(0, &pts, EPS), Err(ToleranceError::AmbiguousPoints { a: 0, b: 1, .. })));
        let pts = vec![vec![1.0, 0.0], vec![1.0 + 1e-14, 0.0], vec![0.0, 0.0]];
        let (fiber, reps) = deduplicate(0, &pts, EPS).unwrap();
        assert_eq!(fiber, vec![1, 1, 0]);
        assert_eq!(reps, vec![2, 0]);
    }

    #[test]
    fn gram_agrees_with_coordinates() {
        let (_, pr) = projections(&Graph::petersen());
        for p in &pr {
            let g = p.gram();
            let m = p.len();
            for a in 0..m {
                for b in 0..m {
                    assert!((g[a * m + b] - dot(&p.distinct_points[a], &p.distinct_points[b])).abs() < 1e-12);
                }
            }
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
                Graph::new(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn projection_identities(g in arb_graph(9)) {
            let (ps, pr) = projections(&g);
            prop_assert_eq!(ps.rank(), g.vertex_count());
            prop_assert!(reconstruction_residual(&ps, &pr) <= 1e-6);
            prop_assert!(pythagoras_residual(&ps, &pr) <= 1e-6);
            // the common refinement of all fibers is discrete
            let mut sigs: Vec<Vec<usize>> = (0..ps.len()).map(|i| pr.iter().map(|p| p.fiber[i]).collect()).collect();
            sigs.sort();
            sigs.dedup();
            prop_assert_eq!(sigs.len(), ps.len());
            for p in &pr {
                prop_assert!(p.len() <= ps.len());
                prop_assert_eq!(ell_equivalence_classes(p).iter().map(Vec::len).sum::<usize>(), ps.len());
            }
        }
    }
}

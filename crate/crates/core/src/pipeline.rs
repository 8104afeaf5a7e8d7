//! Graph automorphism groups and isomorphism through eigenspace projections.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::geomaut::{list_all, GeomError, GeometricAutomorphismList, QuantizedGram};
use crate::graph::Graph;
use crate::hypaut::{self, ColoredMultiHypergraph, HypError};
use crate::permgroup::{orbit_with_witness, set_action, Permutation, PermutationGroup};
use crate::pointset::{graph_point_set, project_all, PointRole, PointSet, ProjectedPointSet, ToleranceError};
use crate::spectral::{adjacency_matrix, decompose, default_eigen_tol, SpectralDecomposition, SpectralError, SpectrumEntry};

pub const DEFAULT_CAP: usize = 1_000_000;
pub const DEFAULT_POINT_TOL: f64 = 1e-9;
pub const DEFAULT_GRAM_TOL: f64 = 1e-9;

/// Numerical tolerances. `None` selects a size-dependent default.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Eigenvalue grouping gap; default `1e-8 · max(1, n)`.
    pub eigen: Option<f64>,
    /// Jacobi stopping threshold; default `1e-12 · n · max|A|`.
    pub sweep: Option<f64>,
    pub point: f64,
    pub gram: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eigen: None,
            sweep: None,
            point: DEFAULT_POINT_TOL,
            gram: DEFAULT_GRAM_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub tolerances: Tolerances,
    /// Largest number of geometric automorphisms listed per eigenspace.
    pub cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tolerances: Tolerances::default(),
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Tolerance(#[from] ToleranceError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Hypergraph(#[from] HypError),
    #[error("lifting failed: {0}")]
    Lift(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl PipelineError {
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, PipelineError::Geometry(GeomError::CapExceeded { .. }))
    }
}

#[derive(Clone, Debug)]
pub struct AutResult {
    pub group: PermutationGroup,
    pub order: BigUint,
    /// Every generator passed the exact adjacency check.
    pub verified: bool,
    pub spectrum: Vec<SpectrumEntry>,
    pub diagnostics: Vec<String>,
}

/// Everything computed on the way to the group, for inspection.
pub struct Trace {
    pub points: PointSet,
    pub decomposition: SpectralDecomposition,
    pub projections: Vec<ProjectedPointSet>,
    pub automorphisms: Vec<GeometricAutomorphismList>,
    pub hypergraph: ColoredMultiHypergraph,
}

pub fn geom_aut_instance(graph: &Graph, tol: &Tolerances) -> Result<(PointSet, SpectralDecomposition), PipelineError> {
    let a = adjacency_matrix(graph);
    let dec = decompose(&a, tol.sweep, Some(tol.eigen.unwrap_or_else(|| default_eigen_tol(graph.vertex_count()))))?;
    Ok((graph_point_set(graph), dec))
}

/// One color per eigenspace holding its distinct projected points, the listed
/// automorphisms of that projection as the color group, and one hyperedge per
/// original point through its projections.
pub fn reduce_to_hypaut(
    points: &PointSet,
    projections: &[ProjectedPointSet],
    auts: &[GeometricAutomorphismList],
) -> ColoredMultiHypergraph {
    let mut offsets = Vec::with_capacity(projections.len());
    let mut total = 0;
    for p in projections {
        offsets.push(total);
        total += p.len();
    }
    let color_classes = projections
        .iter()
        .zip(&offsets)
        .map(|(p, &off)| (off..off + p.len()).collect())
        .collect();
    let hyperedges = (0..points.len())
        .map(|i| {
            let e = projections.iter().zip(&offsets).map(|(p, &off)| off + p.fiber[i]).collect();
            (e, 1)
        })
        .collect();
    ColoredMultiHypergraph {
        vertex_count: total,
        color_classes,
        listed_groups: auts.iter().map(|a| a.elements.clone()).collect(),
        hyperedges,
    }
}

/// Turns permutations of hypergraph vertices into vertex permutations of the
/// graph: each induces a permutation of hyperedges, i.e. of points, whose
/// restriction to the unit-vector points is the vertex map.
pub fn lift_to_vertex_permutations(
    generators: &[Permutation],
    points: &PointSet,
    x: &ColoredMultiHypergraph,
) -> Result<Vec<Permutation>, PipelineError> {
    let n = points.ambient_dimension;
    let index: HashMap<&Vec<usize>, usize> = x.hyperedges.iter().enumerate().map(|(i, (e, _))| (e, i)).collect();
    if index.len() != x.hyperedges.len() {
        return Err(PipelineError::Lift("two points share every projection".into()));
    }
    generators
        .iter()
        .map(|g| {
            let mut image = Vec::with_capacity(n);
            for v in 0..n {
                let e: Vec<usize> = x.hyperedges[points.vertex_point(v)].0.iter().map(|&u| g.apply(u)).collect();
                let target = *index
                    .get(&e)
                    .ok_or_else(|| PipelineError::Lift("hyperedge image is not a hyperedge".into()))?;
                match points.roles[target] {
                    PointRole::Vertex(w) => image.push(w),
                    PointRole::Edge(..) => {
                        return Err(PipelineError::Lift("a vertex point maps to an edge point".into()))
                    }
                }
            }
            Permutation::from_images(image).map_err(|e| PipelineError::Lift(e.to_string()))
        })
        .collect()
}

/// Lifts and wraps the result in a group on the graph's vertices.
pub fn lift_to_vertex_group(
    generators: &[Permutation],
    points: &PointSet,
    x: &ColoredMultiHypergraph,
) -> Result<PermutationGroup, PipelineError> {
    let gens = lift_to_vertex_permutations(generators, points, x)?;
    PermutationGroup::new(points.ambient_dimension, &gens).map_err(|e| PipelineError::Internal(e.to_string()))
}

const MAX_REPEATED_WARNINGS: usize = 5;

fn push_capped(diagnostics: &mut Vec<String>, what: &str, warnings: Vec<String>) {
    let total = warnings.len();
    diagnostics.extend(warnings.into_iter().take(MAX_REPEATED_WARNINGS).map(|w| format!("{what}: {w}")));
    if total > MAX_REPEATED_WARNINGS {
        diagnostics.push(format!("{what}: {} more similar warnings", total - MAX_REPEATED_WARNINGS));
    }
}

/// Runs the pipeline and returns intermediate data with the result.
pub fn automorphism_group_traced(graph: &Graph, config: &Config) -> Result<(AutResult, Trace), PipelineError> {
    let n = graph.vertex_count();
    let tol = &config.tolerances;
    let (points, dec) = geom_aut_instance(graph, tol)?;
    let mut diagnostics = Vec::new();
    push_capped(&mut diagnostics, "spectrum", dec.warnings.clone());

    let projections = project_all(&points, &dec, tol.point)?;
    let mut grams = Vec::with_capacity(projections.len());
    for p in &projections {
        let (g, w) = QuantizedGram::from_values(p.len(), &p.gram(), tol.gram);
        push_capped(&mut diagnostics, &format!("eigenspace {}", p.space), w);
        grams.push(g);
    }
    let automorphisms = list_all(&grams, config.cap)?;
    let hypergraph = reduce_to_hypaut(&points, &projections, &automorphisms);
    let solution = hypaut::solve(&hypergraph)?;
    let lifted = lift_to_vertex_permutations(&solution.generators, &points, &hypergraph)?;

    let mut survivors = Vec::new();
    let mut rejected = 0;
    for g in lifted {
        if graph.is_automorphism(&g) {
            if !g.is_identity() {
                survivors.push(g);
            }
        } else {
            rejected += 1;
        }
    }
    if rejected > 0 {
        diagnostics.push(format!(
            "{rejected} candidate generator(s) failed the exact adjacency check and were dropped; \
             the reported group may be incomplete"
        ));
    }
    let group = PermutationGroup::new(n, &survivors).map_err(|e| PipelineError::Internal(e.to_string()))?;
    let order = group.order();
    if rejected == 0 && order != solution.order {
        diagnostics.push(format!(
            "lifted group order {order} differs from the hypergraph group order {}",
            solution.order
        ));
    }
    let result = AutResult {
        group,
        order,
        verified: rejected == 0,
        spectrum: dec.summary(),
        diagnostics,
    };
    let trace = Trace {
        points,
        decomposition: dec,
        projections,
        automorphisms,
        hypergraph,
    };
    Ok((result, trace))
}

pub fn automorphism_group(graph: &Graph, config: &Config) -> Result<AutResult, PipelineError> {
    automorphism_group_traced(graph, config).map(|(r, _)| r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub isomorphic: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug)]
pub struct IsoResult {
    pub decision: Decision,
    /// Maps vertex `v` of the first graph to its image in the second.
    pub witness: Option<Permutation>,
    pub diagnostics: Vec<String>,
    /// Automorphism group of the disjoint union, when it was computed.
    pub union_group: Option<PermutationGroup>,
}

pub const REASON_VERTEX_COUNT: &str = "vertex counts differ";
pub const REASON_EDGE_COUNT: &str = "edge counts differ";
pub const REASON_SPECTRUM: &str = "spectra differ";
pub const REASON_NO_MATCHING: &str = "no balanced component orbit matching";

fn rejected(reason: &str, diagnostics: Vec<String>) -> IsoResult {
    IsoResult {
        decision: Decision {
            isomorphic: false,
            reason: Some(reason.to_string()),
        },
        witness: None,
        diagnostics,
        union_group: None,
    }
}

pub fn same_spectrum(a: &SpectralDecomposition, b: &SpectralDecomposition, eps: f64) -> bool {
    a.groups.len() == b.groups.len()
        && a.groups
            .iter()
            .zip(&b.groups)
            .all(|(x, y)| x.multiplicity == y.multiplicity && (x.eigenvalue - y.eigenvalue).abs() <= eps)
}

/// Decides isomorphism through the automorphism group of the disjoint union:
/// its orbits on connected components are the isomorphism classes of
/// components, so the graphs are isomorphic iff every orbit has as many
/// components from each side. The witness is built from orbit transversals
/// and checked exactly.
pub fn isomorphic(g1: &Graph, g2: &Graph, config: &Config) -> Result<IsoResult, PipelineError> {
    let n = g1.vertex_count();
    if n != g2.vertex_count() {
        return Ok(rejected(REASON_VERTEX_COUNT, Vec::new()));
    }
    if g1.edge_count() != g2.edge_count() {
        return Ok(rejected(REASON_EDGE_COUNT, Vec::new()));
    }
    let tol = &config.tolerances;
    let eps = tol.eigen.unwrap_or_else(|| default_eigen_tol(n));
    let s1 = decompose(&adjacency_matrix(g1), tol.sweep, Some(eps))?;
    let s2 = decompose(&adjacency_matrix(g2), tol.sweep, Some(eps))?;
    if !same_spectrum(&s1, &s2, eps) {
        return Ok(rejected(REASON_SPECTRUM, Vec::new()));
    }

    let union = g1.disjoint_union(g2);
    let aut = automorphism_group(&union, config)?;
    let mut diagnostics = aut.diagnostics;

    let components = union.components();
    let mut comp_of = vec![0usize; 2 * n];
    for (k, c) in components.iter().enumerate() {
        for &v in c {
            comp_of[v] = k;
        }
    }
    let mut assigned = vec![false; components.len()];
    let mut image = vec![usize::MAX; n];
    for k in 0..components.len() {
        if assigned[k] {
            continue;
        }
        let (orbit, witness) = orbit_with_witness(&aut.group, components[k].clone(), set_action);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for c in &orbit {
            assigned[comp_of[c[0]]] = true;
            if c[0] < n {
                left.push(c);
            } else {
                right.push(c);
            }
        }
        if left.len() != right.len() {
            let mut r = rejected(REASON_NO_MATCHING, diagnostics);
            r.union_group = Some(aut.group);
            return Ok(r);
        }
        for (c, d) in left.iter().zip(&right) {
            // w_d ∘ w_c⁻¹ carries c onto d
            let map = witness[*d].compose(&witness[*c].inverse());
            for &v in c.iter() {
                image[v] = map.apply(v) - n;
            }
        }
    }
    let witness = Permutation::from_images(image)
        .map_err(|e| PipelineError::Internal(format!("stitched witness is not a bijection: {e}")))?;
    if g1.relabel(&witness) != *g2 {
        return Err(PipelineError::Internal("stitched witness does not map the first graph onto the second".into()));
    }
    if !aut.verified {
        diagnostics.push("the union's automorphism group is verified-but-possibly-incomplete".into());
    }
    Ok(IsoResult {
        decision: Decision {
            isomorphic: true,
            reason: None,
        },
        witness: Some(witness),
        diagnostics,
        union_group: Some(aut.group),
    })
}

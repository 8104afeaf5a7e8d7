//! Seeded random instances for tests, the acceptance suite and `selfcheck`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Graph;
use crate::hypaut::ColoredMultiHypergraph;
use crate::permgroup::{ListedGroup, Permutation, PermutationCoset, PermutationGroup, ProductSpace};
use crate::pointset::{graph_point_set, project_all};
use crate::spectral::{adjacency_matrix, decompose};

/// Erdős–Rényi graph `G(n, p)`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("simple by construction")
}

/// The graph on `0..n` whose edge bits are those of `code`, edges taken in
/// lexicographic order.
pub fn graph_from_code(n: usize, code: u64) -> Graph {
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Graph::new(n, pairs.enumerate().filter(|(k, _)| code >> k & 1 == 1).map(|(_, e)| e)).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::from_images(v).unwrap()
}

/// All elements of a random subgroup of `Sym(k)` with at most `max_order`
/// elements, sorted by image vector.
pub fn random_listed_group<R: Rng>(rng: &mut R, k: usize, max_order: usize) -> Vec<Permutation> {
    loop {
        let gens: Vec<Permutation> = (0..rng.gen_range(0..=2)).map(|_| random_permutation(rng, k)).collect();
        let g = PermutationGroup::new(k, &gens).unwrap();
        if let Some(mut els) = g.elements(max_order) {
            els.sort_by(|a, b| a.images().cmp(b.images()));
            return els;
        }
    }
}

/// A colored multi-hypergraph with up to `max_colors` classes of up to
/// `max_class` vertices, listed groups of order at most `max_order`, and
/// hyperedges meeting every class in one vertex. With probability 1/2 the
/// edge set is a union of orbits of a random element of the product group, so
/// that nontrivial automorphisms are common.
pub fn random_hypergraph<R: Rng>(
    rng: &mut R,
    max_colors: usize,
    max_class: usize,
    max_order: usize,
) -> ColoredMultiHypergraph {
    let r = rng.gen_range(1..=max_colors);
    let sizes: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=max_class)).collect();
    let mut classes = Vec::new();
    let mut next = 0;
    for &s in &sizes {
        classes.push((next..next + s).collect::<Vec<_>>());
        next += s;
    }
    let mut vertices: Vec<usize> = (0..next).collect();
    vertices.shuffle(rng);
    let classes: Vec<Vec<usize>> = classes
        .into_iter()
        .map(|c| c.into_iter().map(|v| vertices[v]).collect())
        .collect();
    let groups: Vec<Vec<Permutation>> = sizes.iter().map(|&s| random_listed_group(rng, s, max_order)).collect();
    let count = rng.gen_range(1..=6);
    let mut hyperedges: Vec<(Vec<usize>, u64)> = Vec::new();
    let symmetric = rng.gen_bool(0.5);
    for _ in 0..count {
        let pick: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
        let mult = rng.gen_range(1..=2);
        if symmetric {
            let factors: Vec<&Permutation> = groups.iter().map(|g| &g[rng.gen_range(0..g.len())]).collect();
            let mut cur = pick.clone();
            loop {
                let e = cur.iter().enumerate().map(|(c, &k)| classes[c][k]).collect();
                hyperedges.push((e, mult));
                cur = cur.iter().enumerate().map(|(c, &k)| factors[c].apply(k)).collect();
                if cur == pick {
                    break;
                }
            }
        } else {
            let e = pick.iter().enumerate().map(|(c, &k)| classes[c][k]).collect();
            hyperedges.push((e, mult));
        }
    }
    ColoredMultiHypergraph {
        vertex_count: next,
        color_classes: classes,
        listed_groups: groups,
        hyperedges,
    }
}

/// A product of 1 to 3 listed groups of order at most `max_order` on disjoint
/// classes, with two random cosets of subgroups given on the vertex set.
pub fn random_coset_pair<R: Rng>(
    rng: &mut R,
    max_order: usize,
) -> (ProductSpace, PermutationCoset, PermutationCoset) {
    let r = rng.gen_range(1..=3);
    let mut classes = Vec::new();
    let mut groups = Vec::new();
    let mut next = 0;
    for _ in 0..r {
        let k = rng.gen_range(1..=4);
        classes.push((next..next + k).collect::<Vec<_>>());
        next += k;
        groups.push(ListedGroup::new(k, random_listed_group(rng, k, max_order)).unwrap());
    }
    let space = ProductSpace::new(next, classes, groups).unwrap();
    let element = |rng: &mut R| {
        let f: Vec<usize> = (0..r).map(|c| rng.gen_range(0..space.group(c).len())).collect();
        space.to_vertex_permutation(&space.embed(&f))
    };
    let coset = |rng: &mut R| {
        let gens: Vec<Permutation> = (0..rng.gen_range(0..=2)).map(|_| element(rng)).collect();
        PermutationCoset::new(PermutationGroup::new(next, &gens).unwrap(), element(rng))
    };
    let a = coset(rng);
    let b = if rng.gen_bool(0.3) {
        // same subgroup, so the meet is either empty or all of it
        let rep = element(rng);
        PermutationCoset::new(a.group().unwrap().clone(), rep)
    } else {
        coset(rng)
    };
    (space, a, b)
}

/// Distinct projected points, at most `max_points` of them, of a random
/// small graph's eigenspaces.
pub fn random_projected_points<R: Rng>(rng: &mut R, max_points: usize, eps: f64) -> Vec<Vec<f64>> {
    loop {
        let n = rng.gen_range(2..=6);
        let p = rng.gen_range(0.2..0.8);
        let g = random_graph(rng, n, p);
        let dec = match decompose(&adjacency_matrix(&g), None, None) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let Ok(projs) = project_all(&graph_point_set(&g), &dec, eps) else {
            continue;
        };
        let small: Vec<_> = projs.into_iter().filter(|p| p.len() <= max_points).collect();
        if !small.is_empty() {
            let k = rng.gen_range(0..small.len());
            return small[k].distinct_points.clone();
        }
    }
}

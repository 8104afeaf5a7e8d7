//! Brute-force references for tests. Everything here is deliberately naive and
//! only touches production types to read their data.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::graph::Graph;
use crate::hypaut::ColoredMultiHypergraph;
use crate::permgroup::{Permutation, PermutationCoset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what}: size {got} exceeds the oracle limit {limit}")]
pub struct OracleError {
    pub what: &'static str,
    pub got: usize,
    pub limit: usize,
}

fn guard(what: &'static str, got: usize, limit: usize) -> Result<(), OracleError> {
    if got > limit {
        Err(OracleError { what, got, limit })
    } else {
        Ok(())
    }
}

/// Advances to the next permutation in lexicographic order.
pub fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Calls `f` on every permutation of `0..n` in lexicographic order until it
/// returns false.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut a: Vec<usize> = (0..n).collect();
    loop {
        if !f(&a) {
            return;
        }
        if !next_permutation(&mut a) {
            return;
        }
    }
}

fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

fn maps_onto(a: &[Vec<bool>], b: &[Vec<bool>], p: &[usize]) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| a[i][j] == b[p[i]][p[j]]))
}

/// Every vertex permutation preserving adjacency.
pub fn brute_aut(g: &Graph) -> Result<Vec<Permutation>, OracleError> {
    guard("brute_aut vertices", g.vertex_count(), 10)?;
    let a = adjacency(g);
    let mut out = Vec::new();
    for_each_permutation(g.vertex_count(), |p| {
        if maps_onto(&a, &a, p) {
            out.push(Permutation::from_images(p.to_vec()).unwrap());
        }
        true
    });
    Ok(out)
}

/// The lexicographically first isomorphism `X1 → X2`.
pub fn brute_iso(g1: &Graph, g2: &Graph) -> Result<Option<Permutation>, OracleError> {
    guard("brute_iso vertices", g1.vertex_count().max(g2.vertex_count()), 8)?;
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let (a, b) = (adjacency(g1), adjacency(g2));
    let mut found = None;
    for_each_permutation(g1.vertex_count(), |p| {
        if maps_onto(&a, &b, p) {
            found = Some(Permutation::from_images(p.to_vec()).unwrap());
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Every permutation preserving norms and pairwise distances within `eps`.
pub fn brute_geom_aut(points: &[Vec<f64>], eps: f64) -> Result<Vec<Permutation>, OracleError> {
    guard("brute_geom_aut points", points.len(), 8)?;
    let norm = |a: &[f64]| a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let m = points.len();
    let mut out = Vec::new();
    for_each_permutation(m, |p| {
        let ok = (0..m).all(|i| {
            (norm(&points[i]) - norm(&points[p[i]])).abs() <= eps
                && (0..m).all(|j| (dist(&points[i], &points[j]) - dist(&points[p[i]], &points[p[j]])).abs() <= eps)
        });
        if ok {
            out.push(Permutation::from_images(p.to_vec()).unwrap());
        }
        true
    });
    Ok(out)
}

/// Closure of a generating set by breadth-first multiplication.
pub fn naive_closure(degree: usize, gens: &[Permutation], limit: usize) -> Result<Vec<Permutation>, OracleError> {
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    let mut k = 0;
    while k < queue.len() {
        let x = queue[k].clone();
        k += 1;
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                guard("closure elements", seen.len(), limit)?;
                queue.push(y);
            }
        }
    }
    Ok(queue)
}

fn naive_elements(c: &PermutationCoset, limit: usize) -> Result<Vec<Permutation>, OracleError> {
    match (c.group(), c.representative()) {
        (Some(g), Some(r)) => Ok(naive_closure(c.degree(), g.generators(), limit)?
            .into_iter()
            .map(|h| h.compose(r))
            .collect()),
        _ => Ok(Vec::new()),
    }
}

/// Element-wise intersection of two cosets, sorted by image vector.
pub fn brute_coset_meet(a: &PermutationCoset, b: &PermutationCoset) -> Result<Vec<Permutation>, OracleError> {
    let ea = naive_elements(a, 10_000)?;
    let eb: HashSet<Permutation> = naive_elements(b, 10_000)?.into_iter().collect();
    let mut out: Vec<Permutation> = ea.into_iter().filter(|x| eb.contains(x)).collect();
    out.sort_by(|x, y| x.images().cmp(y.images()));
    Ok(out)
}

/// Filters `G_1 × .. × G_r` by preservation of the hyperedge multiset.
/// Elements are vertex permutations, sorted by image vector.
pub fn brute_hyp_aut(x: &ColoredMultiHypergraph) -> Result<Vec<Permutation>, OracleError> {
    let total: usize = x.listed_groups.iter().map(Vec::len).product();
    guard("brute_hyp_aut product size", total, 200_000)?;
    let mut edges: HashMap<Vec<usize>, u64> = HashMap::new();
    for (e, mult) in &x.hyperedges {
        let mut key = e.clone();
        key.sort_unstable();
        *edges.entry(key).or_default() += mult;
    }
    let r = x.color_classes.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; r];
    loop {
        let mut image: Vec<usize> = (0..x.vertex_count).collect();
        for c in 0..r {
            let g = &x.listed_groups[c][idx[c]];
            for (k, &v) in x.color_classes[c].iter().enumerate() {
                image[v] = x.color_classes[c][g.apply(k)];
            }
        }
        let preserved = edges.iter().all(|(e, m)| {
            let mut img: Vec<usize> = e.iter().map(|&v| image[v]).collect();
            img.sort_unstable();
            edges.get(&img) == Some(m)
        });
        if preserved {
            out.push(Permutation::from_images(image).unwrap());
        }
        let mut c = 0;
        loop {
            if c == r {
                out.sort_by(|a, b| a.images().cmp(b.images()));
                return Ok(out);
            }
            idx[c] += 1;
            if idx[c] < x.listed_groups[c].len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_group(els: &[Permutation]) -> bool {
        let set: HashSet<&Permutation> = els.iter().collect();
        els.iter().all(|a| set.contains(&a.inverse()) && els.iter().all(|b| set.contains(&a.compose(b))))
    }

    #[test]
    fn aut_examples() {
        assert_eq!(brute_aut(&Graph::complete(3)).unwrap().len(), 6);
        assert_eq!(brute_aut(&Graph::path(4)).unwrap().len(), 2);
        assert_eq!(brute_aut(&Graph::empty(4)).unwrap().len(), 24);
        assert!(is_group(&brute_aut(&Graph::cycle(5)).unwrap()));
        assert!(brute_aut(&Graph::empty(11)).is_err());
    }

    #[test]
    fn iso_examples() {
        let c4k1 = Graph::cycle(4).disjoint_union(&Graph::empty(1));
        assert_eq!(brute_iso(&c4k1, &Graph::star(4)).unwrap(), None);
        let p = Graph::petersen();
        assert!(brute_iso(&p, &p).is_err());
        let c5 = Graph::cycle(5);
        assert_eq!(brute_iso(&c5, &c5).unwrap(), Some(Permutation::identity(5)));
        assert_eq!(
            brute_iso(&Graph::complete(2), &Graph::path(2)).unwrap(),
            Some(Permutation::identity(2))
        );
    }

    #[test]
    fn lexicographic_order() {
        let mut seen = Vec::new();
        for_each_permutation(3, |p| {
            seen.push(p.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }

    #[test]
    fn coset_meet_examples() {
        use crate::permgroup::PermutationGroup;
        let s3 = PermutationGroup::new(
            3,
            &[
                Permutation::from_cycles(3, &[&[0, 1]]).unwrap(),
                Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap(),
            ],
        )
        .unwrap();
        let full = PermutationCoset::from_group(s3);
        assert_eq!(brute_coset_meet(&full, &full).unwrap().len(), 6);
        let id = PermutationCoset::singleton(Permutation::identity(3));
        assert_eq!(brute_coset_meet(&id, &full).unwrap(), vec![Permutation::identity(3)]);
        let t = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let c3 = PermutationGroup::new(3, &[Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap()]).unwrap();
        let a = PermutationCoset::from_group(c3.clone());
        let b = PermutationCoset::new(c3, t);
        assert!(brute_coset_meet(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn geom_examples() {
        let sq = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let els = brute_geom_aut(&sq, 1e-9).unwrap();
        assert_eq!(els.len(), 8);
        assert!(is_group(&els));
        let generic = vec![vec![0.13, 0.71], vec![-0.4, 0.29], vec![0.93, -0.58]];
        assert_eq!(brute_geom_aut(&generic, 1e-9).unwrap(), vec![Permutation::identity(3)]);
        assert_eq!(brute_geom_aut(&[vec![1.0]], 1e-9).unwrap().len(), 1);
    }
}

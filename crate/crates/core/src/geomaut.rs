//! Explicit listing of geometric automorphisms of a finite point set by
//! backtracking over quantized inner products.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::permgroup::{PermError, Permutation, PermutationGroup};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(
        "eigenspace {space}: more than {cap} geometric automorphisms; the eigenvalue multiplicity is too \
         large for explicit listing (raise --cap to try anyway)"
    )]
    CapExceeded { space: usize, cap: usize },
    #[error("orthogonal extension residual {residual:.3e} exceeds {tol:.1e}; the permutation is not a geometric automorphism")]
    ExtensionResidual { residual: f64, tol: f64 },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Integer keys of all pairwise inner products. Keys are equal exactly when
/// the underlying values fall in one single-linkage cluster of width `eps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuantizedGram {
    pub size: usize,
    pub keys: Vec<i64>,
}

impl QuantizedGram {
    #[inline]
    pub fn key(&self, i: usize, j: usize) -> i64 {
        self.keys[i * self.size + j]
    }

    /// Quantizes a symmetric row-major Gram matrix. Sorted values separated by
    /// at most `eps` share a cluster; a cluster's key is `round(min / eps)`.
    /// Returns warnings for gaps between clusters below `10·eps` and for
    /// clusters wider than `eps/10`, either of which means the keys depend on
    /// the tolerance.
    pub fn from_values(size: usize, values: &[f64], eps: f64) -> (Self, Vec<String>) {
        assert_eq!(values.len(), size * size);
        let mut upper: Vec<(f64, u32, u32)> = Vec::with_capacity(size * (size + 1) / 2);
        for i in 0..size {
            for j in i..size {
                upper.push((values[i * size + j], i as u32, j as u32));
            }
        }
        upper.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut keys = vec![0i64; size * size];
        let mut warnings = Vec::new();
        let mut start = 0;
        while start < upper.len() {
            let mut end = start + 1;
            while end < upper.len() && upper[end].0 - upper[end - 1].0 <= eps {
                end += 1;
            }
            let lo = upper[start].0;
            let width = upper[end - 1].0 - lo;
            if width > eps / 10.0 {
                warnings.push(format!("inner-product cluster at {lo:.6} has width {width:.2e}"));
            }
            if end < upper.len() && upper[end].0 - upper[end - 1].0 < 10.0 * eps {
                warnings.push(format!(
                    "inner products {:.12} and {:.12} are separated by less than 10x the Gram tolerance",
                    upper[end - 1].0,
                    upper[end].0
                ));
            }
            let key = (lo / eps).round() as i64;
            for &(_, i, j) in &upper[start..end] {
                keys[i as usize * size + j as usize] = key;
                keys[j as usize * size + i as usize] = key;
            }
            start = end;
        }
        (QuantizedGram { size, keys }, warnings)
    }
}

pub fn quantized_gram(points: &[Vec<f64>], eps: f64) -> (QuantizedGram, Vec<String>) {
    let m = points.len();
    let mut values = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let v: f64 = points[a].iter().zip(&points[b]).map(|(x, y)| x * y).sum();
            values[a * m + b] = v;
            values[b * m + a] = v;
        }
    }
    QuantizedGram::from_values(m, &values, eps)
}

#[derive(Clone, Debug)]
pub struct GeometricAutomorphismList {
    pub space: usize,
    /// All key-preserving permutations, sorted by image vector.
    pub elements: Vec<Permutation>,
}

impl GeometricAutomorphismList {
    pub fn degree(&self) -> usize {
        self.elements[0].degree()
    }

    pub fn group(&self) -> PermutationGroup {
        let mut g = PermutationGroup::trivial(self.degree());
        for p in &self.elements {
            g.add_generator(p);
        }
        g
    }
}

/// Lists every permutation `π` with `key(π(i), π(j)) = key(i, j)` for all
/// `i, j`, failing once more than `cap` have been found.
pub fn list_geometric_automorphisms(
    space: usize,
    gram: &QuantizedGram,
    cap: usize,
) -> Result<GeometricAutomorphismList, GeomError> {
    let m = gram.size;
    if m == 0 {
        return Ok(GeometricAutomorphismList {
            space,
            elements: vec![Permutation::identity(0)],
        });
    }
    // Points can only map to points with the same norm key and the same
    // multiset of inner-product keys.
    let signature = |i: usize| {
        let mut row: Vec<i64> = (0..m).filter(|&j| j != i).map(|j| gram.key(i, j)).collect();
        row.sort_unstable();
        (gram.key(i, i), row)
    };
    let mut classes: HashMap<(i64, Vec<i64>), Vec<usize>> = HashMap::new();
    for i in 0..m {
        classes.entry(signature(i)).or_default().push(i);
    }
    let mut class_of = vec![0usize; m];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut sorted: Vec<Vec<usize>> = classes.into_values().collect();
    sorted.sort();
    for (c, mem) in sorted.into_iter().enumerate() {
        for &i in &mem {
            class_of[i] = c;
        }
        members.push(mem);
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (members[class_of[i]].len(), i));

    let mut search = Search {
        gram,
        order: &order,
        candidates: order.iter().map(|&i| members[class_of[i]].clone()).collect(),
        image: vec![usize::MAX; m],
        used: vec![false; m],
        found: Vec::new(),
        cap,
    };
    if !search.dfs(0) {
        return Err(GeomError::CapExceeded { space, cap });
    }
    let mut elements: Vec<Permutation> = search
        .found
        .into_iter()
        .map(|img| Permutation::from_images(img).expect("search yields bijections"))
        .collect();
    elements.sort_by(|a, b| a.images().cmp(b.images()));
    Ok(GeometricAutomorphismList { space, elements })
}

struct Search<'a> {
    gram: &'a QuantizedGram,
    order: &'a [usize],
    candidates: Vec<Vec<usize>>,
    image: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
    cap: usize,
}

impl Search<'_> {
    /// Returns false once the cap is exceeded.
    fn dfs(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            if self.found.len() == self.cap {
                return false;
            }
            self.found.push(self.image.clone());
            return true;
        }
        let i = self.order[depth];
        for k in 0..self.candidates[depth].len() {
            let c = self.candidates[depth][k];
            if self.used[c] {
                continue;
            }
            let consistent = self.order[..depth]
                .iter()
                .all(|&j| self.gram.key(c, self.image[j]) == self.gram.key(i, j));
            if !consistent {
                continue;
            }
            self.image[i] = c;
            self.used[c] = true;
            let ok = self.dfs(depth + 1);
            self.used[c] = false;
            self.image[i] = usize::MAX;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Lists the automorphisms of several point sets concurrently.
pub fn list_all(grams: &[QuantizedGram], cap: usize) -> Result<Vec<GeometricAutomorphismList>, GeomError> {
    grams
        .par_iter()
        .enumerate()
        .map(|(l, g)| list_geometric_automorphisms(l, g, cap))
        .collect()
}

/// The orthogonal map on the ambient space that sends `points[i]` to
/// `points[π(i)]` on the span of the points and is the identity on its
/// orthogonal complement.
pub fn orthogonal_extension(points: &[Vec<f64>], pi: &Permutation, tol: f64) -> Result<DMatrix<f64>, GeomError> {
    if pi.degree() != points.len() {
        return Err(PermError::DegreeMismatch(points.len(), pi.degree()).into());
    }
    let d = points.first().map_or(0, Vec::len);
    let basis = independent_subset(points);
    let q = DMatrix::from_fn(d, basis.len(), |r, c| points[basis[c]][r]);
    let img = DMatrix::from_fn(d, basis.len(), |r, c| points[pi.apply(basis[c])][r]);
    let q_pinv = if basis.is_empty() {
        DMatrix::zeros(0, d)
    } else {
        q.clone().pseudo_inverse(1e-12).expect("pseudo-inverse with nonnegative epsilon")
    };
    let a = &img * &q_pinv + (DMatrix::identity(d, d) - &q * &q_pinv);
    let mut residual = (a.transpose() * &a - DMatrix::<f64>::identity(d, d)).norm();
    for (i, p) in points.iter().enumerate() {
        let v = nalgebra::DVector::from_column_slice(p);
        let w = nalgebra::DVector::from_column_slice(&points[pi.apply(i)]);
        residual = residual.max((&a * v - w).norm());
    }
    if residual > tol {
        return Err(GeomError::ExtensionResidual { residual, tol });
    }
    Ok(a)
}

fn independent_subset(points: &[Vec<f64>]) -> Vec<usize> {
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mut r = p.clone();
        for u in &ortho {
            let c: f64 = r.iter().zip(u).map(|(x, y)| x * y).sum();
            r.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 * scale.max(1.0) {
            ortho.push(r.into_iter().map(|x| x / norm).collect());
            chosen.push(i);
        }
    }
    chosen
}

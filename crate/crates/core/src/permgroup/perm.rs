use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("image array is not a bijection on 0..{0}")]
    NotBijection(usize),
    #[error("malformed cycle notation: {0}")]
    Parse(String),
}

/// A permutation of `{0, .., n-1}` stored as its image array.
///
/// Permutations act on the left: `p.compose(&q)` is the map `x -> p(q(x))`,
/// so `q` is applied first. Right cosets `G·s` are then sets `{g ∘ s}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            image: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotBijection(n));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            image: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    /// Builds a permutation from 0-based disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut image: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= degree || touched[x] {
                    return Err(PermError::NotBijection(degree));
                }
                touched[x] = true;
                image[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_images(image)
    }

    pub(crate) fn from_u32_unchecked(image: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(image.iter().map(|&x| x as usize).collect()).is_ok());
        Permutation { image }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.image
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.image.iter().map(|&x| x as usize).collect()
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Permutation {
            image: other.image.iter().map(|&x| self.image[x as usize]).collect(),
        }
    }

    pub fn try_compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.compose(other))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.image
            .iter()
            .enumerate()
            .find(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i)
    }

    /// Pointwise image of a tuple.
    pub fn apply_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&x| self.apply(x)).collect()
    }

    /// Image of a set, returned sorted.
    pub fn apply_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out = self.apply_tuple(set);
        out.sort_unstable();
        out
    }

    /// Permutation matrix with `M e_i = e_{p(i)}`.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let n = self.degree();
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            m[self.apply(i)][i] = 1;
        }
        m
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// 1-based disjoint-cycle notation; the identity prints as `()`.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for c in cycles {
            s.push('(');
            let parts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            s.push_str(&parts.join(" "));
            s.push(')');
        }
        s
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4 5)` or `()`.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self, PermError> {
        let text = text.trim();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| PermError::Parse(text.to_string()))?;
            let close = open
                .find(')')
                .ok_or_else(|| PermError::Parse(text.to_string()))?;
            let body = &open[..close];
            let mut cycle = Vec::new();
            for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let v: usize = tok.parse().map_err(|_| PermError::Parse(text.to_string()))?;
                if v == 0 || v > degree {
                    return Err(PermError::Parse(text.to_string()));
                }
                cycle.push(v - 1);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        Self::from_cycles(degree, &refs)
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self.to_cycle_string())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(v: Vec<usize>) -> Result<Self, PermError> {
        Permutation::from_images(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn involution_squares_to_identity() {
        let t = cyc(2, &[&[0, 1]]);
        assert!(t.compose(&t).is_identity());
    }

    #[test]
    fn three_cycle_inverse() {
        let c = cyc(3, &[&[0, 1, 2]]);
        assert_eq!(c.inverse(), cyc(3, &[&[0, 2, 1]]));
    }

    #[test]
    fn induced_set_action() {
        let t = cyc(3, &[&[0, 1]]);
        assert_eq!(t.apply_set(&[0, 2]), vec![1, 2]);
    }

    #[test]
    fn composition_order() {
        // (0 1) after (1 2): 1 -> 2 -> 2, 2 -> 1 -> 0
        let a = cyc(3, &[&[0, 1]]);
        let b = cyc(3, &[&[1, 2]]);
        let ab = a.compose(&b);
        assert_eq!(ab.apply(1), 2);
        assert_eq!(ab.apply(2), 0);
        assert_eq!(ab.apply(0), 1);
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let a = Permutation::identity(2);
        let b = Permutation::identity(3);
        assert_eq!(a.try_compose(&b), Err(PermError::DegreeMismatch(2, 3)));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
        assert!(Permutation::from_cycles(3, &[&[0, 1], &[1, 2]]).is_err());
    }

    #[test]
    fn cycle_notation_is_one_based() {
        let p = cyc(5, &[&[0, 3], &[1, 2, 4]]);
        assert_eq!(p.to_cycle_string(), "(1 4)(2 3 5)");
        assert_eq!(Permutation::parse_cycles(5, "(1 4)(2 3 5)").unwrap(), p);
        assert_eq!(Permutation::identity(4).to_cycle_string(), "()");
        assert!(Permutation::parse_cycles(4, "()").unwrap().is_identity());
        assert!(Permutation::parse_cycles(4, "(1 5)").is_err());
        assert!(Permutation::parse_cycles(4, "(1 2").is_err());
    }

    #[test]
    fn matrix_maps_basis_vectors() {
        let p = cyc(3, &[&[0, 1, 2]]);
        let m = p.matrix();
        assert_eq!(m[1][0], 1);
        assert_eq!(m[2][1], 1);
        assert_eq!(m[0][2], 1);
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(p in arb_perm(9)) {
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert!(p.inverse().compose(&p).is_identity());
        }

        #[test]
        fn cycle_string_round_trips(p in arb_perm(9)) {
            let s = p.to_cycle_string();
            prop_assert_eq!(Permutation::parse_cycles(9, &s).unwrap(), p);
        }

        #[test]
        fn composition_is_associative(a in arb_perm(7), b in arb_perm(7), c in arb_perm(7)) {
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        }
    }
}

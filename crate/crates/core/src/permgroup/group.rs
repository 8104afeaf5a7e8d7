use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;

use super::perm::{PermError, Permutation};

/// One level of a stabilizer chain: the base point, the strong generators
/// fixing all earlier base points, and the orbit of the base point with
/// transversal elements `u_b` satisfying `u_b(base) = b`.
#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    transversal: HashMap<usize, (Permutation, Permutation)>,
    checked: HashSet<(u32, u32)>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = HashMap::new();
        let id = Permutation::identity(degree);
        transversal.insert(base, (id.clone(), id));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
            checked: HashSet::new(),
        }
    }

    fn extend_orbit(&mut self) {
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            for s in &self.gens {
                let y = s.apply(x);
                if !self.transversal.contains_key(&y) {
                    let u = s.compose(&self.transversal[&x].0);
                    let u_inv = u.inverse();
                    self.transversal.insert(y, (u, u_inv));
                    self.orbit.push(y);
                }
            }
            k += 1;
        }
    }
}

/// A permutation group held as a base and strong generating set.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermutationGroup {
    pub fn trivial(degree: usize) -> Self {
        PermutationGroup {
            degree,
            generators: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// Runs Schreier–Sims on `generators`. Redundant generators (already
    /// members of the group generated by the earlier ones) are dropped, so the
    /// retained list forms a strictly increasing subgroup chain and has at most
    /// `log2 |G|` entries.
    pub fn new(degree: usize, generators: &[Permutation]) -> Result<Self, PermError> {
        Self::with_base_prefix(degree, generators, &[])
    }

    /// Like [`PermutationGroup::new`], but the base starts with `prefix`.
    pub fn with_base_prefix(
        degree: usize,
        generators: &[Permutation],
        prefix: &[usize],
    ) -> Result<Self, PermError> {
        for g in generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(degree, g.degree()));
            }
        }
        let mut group = PermutationGroup::trivial(degree);
        for &b in prefix {
            assert!(b < degree, "base point {b} outside domain of size {degree}");
            group.levels.push(Level::new(b, degree));
        }
        for g in generators {
            group.add_generator(g);
        }
        Ok(group)
    }

    pub(crate) fn from_generators_unchecked(degree: usize, generators: &[Permutation]) -> Self {
        Self::new(degree, generators).expect("generator degrees checked by caller")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The reduced generating set.
    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for level in &self.levels {
            for g in &level.gens {
                if seen.insert(g.clone()) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Orbit of the `level`-th base point under the corresponding stabilizer,
    /// with transversal witnesses mapping the base point to each orbit point.
    pub fn transversal(&self, level: usize) -> Vec<(usize, &Permutation)> {
        let l = &self.levels[level];
        l.orbit.iter().map(|&b| (b, &l.transversal[&b].0)).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        let (residue, level) = self.strip(p, 0);
        level == self.levels.len() && residue.is_identity()
    }

    /// Adds a generator, returning `false` when it was already a member.
    pub fn add_generator(&mut self, g: &Permutation) -> bool {
        assert_eq!(g.degree(), self.degree, "generator degree mismatch");
        let (residue, j) = self.strip(g, 0);
        if j == self.levels.len() && residue.is_identity() {
            return false;
        }
        self.generators.push(g.clone());
        if j == self.levels.len() {
            let b = residue.first_moved().expect("non-identity residue");
            self.levels.push(Level::new(b, self.degree));
        }
        for l in 0..=j {
            self.levels[l].gens.push(residue.clone());
            self.levels[l].extend_orbit();
        }
        self.schreier_sims();
        true
    }

    fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for l in from..self.levels.len() {
            let level = &self.levels[l];
            let b = h.apply(level.base);
            match level.transversal.get(&b) {
                None => return (h, l),
                Some((_, u_inv)) => h = u_inv.compose(&h),
            }
        }
        (h, self.levels.len())
    }

    fn schreier_sims(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            match self.failing_schreier_generator(lvl) {
                None => i -= 1,
                Some((residue, j)) => {
                    if j == self.levels.len() {
                        let b = residue.first_moved().expect("non-identity residue");
                        self.levels.push(Level::new(b, self.degree));
                    }
                    for l in lvl + 1..=j {
                        self.levels[l].gens.push(residue.clone());
                        self.levels[l].extend_orbit();
                    }
                    i = j + 1;
                }
            }
        }
    }

    fn failing_schreier_generator(&mut self, lvl: usize) -> Option<(Permutation, usize)> {
        let n_orbit = self.levels[lvl].orbit.len();
        let n_gens = self.levels[lvl].gens.len();
        for oi in 0..n_orbit {
            for si in 0..n_gens {
                if !self.levels[lvl].checked.insert((oi as u32, si as u32)) {
                    continue;
                }
                let level = &self.levels[lvl];
                let b = level.orbit[oi];
                let s = &level.gens[si];
                let sb = s.apply(b);
                let h = level.transversal[&sb]
                    .1
                    .compose(&s.compose(&level.transversal[&b].0));
                let (residue, j) = self.strip(&h, lvl + 1);
                if !(j == self.levels.len() && residue.is_identity()) {
                    return Some((residue, j));
                }
            }
        }
        None
    }

    /// Subgroup generated by the strong generators at `level`, which is the
    /// pointwise stabilizer of the first `level` base points.
    pub(crate) fn stabilizer_at_level(&self, level: usize) -> PermutationGroup {
        if level >= self.levels.len() {
            return PermutationGroup::trivial(self.degree);
        }
        let levels: Vec<Level> = self.levels[level..].to_vec();
        let gens = levels[0].gens.clone();
        let bound = generator_bound(self.degree);
        if gens.len() > bound {
            return Self::from_generators_unchecked(self.degree, &gens);
        }
        PermutationGroup {
            degree: self.degree,
            generators: gens,
            levels,
        }
    }

    /// Transversal element `u` at `level` with `u(base_level) = point`.
    pub(crate) fn transversal_element(&self, level: usize, point: usize) -> Option<&Permutation> {
        self.levels
            .get(level)
            .and_then(|l| l.transversal.get(&point))
            .map(|(u, _)| u)
    }

    /// Generators for the subgroup fixing every point of `points`.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> PermutationGroup {
        let mut prefix: Vec<usize> = points.to_vec();
        prefix.sort_unstable();
        prefix.dedup();
        if prefix.is_empty() {
            return self.clone();
        }
        let rebased = Self::with_base_prefix(self.degree, &self.strong_generators(), &prefix)
            .expect("same degree");
        rebased.stabilizer_at_level(prefix.len())
    }

    /// Orbit of a single point under the group.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut orbit = vec![point];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit
    }

    /// All elements, enumerated from the transversals. Returns `None` if the
    /// order exceeds `limit`.
    pub fn elements(&self, limit: usize) -> Option<Vec<Permutation>> {
        if self.order() > BigUint::from(limit) {
            return None;
        }
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for b in &level.orbit {
                let u = &level.transversal[b].0;
                for g in &out {
                    next.push(u.compose(g));
                }
            }
            out = next;
        }
        Some(out)
    }

    /// True when both groups contain exactly the same elements.
    pub fn same_group(&self, other: &PermutationGroup) -> bool {
        self.degree == other.degree
            && self.order() == other.order()
            && other.generators.iter().all(|g| self.contains(g))
    }
}

/// `n · ceil(log2 n)`, the size bound for reduced generating sets.
pub fn generator_bound(degree: usize) -> usize {
    let n = degree.max(2);
    n * (usize::BITS - (n - 1).leading_zeros()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    fn symmetric(n: usize) -> PermutationGroup {
        let gens = vec![
            cyc(n, &[&[0, 1]]),
            Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap(),
        ];
        PermutationGroup::new(n, &gens).unwrap()
    }

    #[test]
    fn s4_from_transposition_and_four_cycle() {
        let g = PermutationGroup::new(4, &[cyc(4, &[&[0, 1]]), cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert_eq!(g.order(), BigUint::from(24u32));
    }

    #[test]
    fn empty_generator_list_gives_trivial_group() {
        let g = PermutationGroup::new(3, &[]).unwrap();
        assert_eq!(g.order(), BigUint::one());
        assert!(g.contains(&Permutation::identity(3)));
    }

    #[test]
    fn double_transposition_has_order_two() {
        let g = PermutationGroup::new(4, &[cyc(4, &[&[0, 1], &[2, 3]])]).unwrap();
        assert_eq!(g.order(), BigUint::from(2u32));
    }

    #[test]
    fn s8_order() {
        assert_eq!(symmetric(8).order(), BigUint::from(40320u32));
    }

    #[test]
    fn three_cycle_membership() {
        let g = PermutationGroup::new(3, &[cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(g.order(), BigUint::from(3u32));
        assert!(g.contains(&cyc(3, &[&[0, 2, 1]])));
        assert!(!g.contains(&cyc(3, &[&[0, 1]])));
        assert!(g.contains(&Permutation::identity(3)));
    }

    #[test]
    fn stabilizers() {
        let s4 = symmetric(4);
        assert_eq!(s4.pointwise_stabilizer(&[0]).order(), BigUint::from(6u32));
        assert_eq!(s4.pointwise_stabilizer(&[]).order(), BigUint::from(24u32));
        assert!(s4.pointwise_stabilizer(&[0, 1, 2, 3]).is_trivial());
        let st = s4.pointwise_stabilizer(&[1, 3]);
        assert_eq!(st.order(), BigUint::from(2u32));
        for g in st.generators() {
            assert_eq!(g.apply(1), 1);
            assert_eq!(g.apply(3), 3);
        }
    }

    #[test]
    fn base_prefix_is_respected() {
        let s4 = symmetric(4);
        let g = PermutationGroup::with_base_prefix(4, s4.generators(), &[3, 2]).unwrap();
        assert_eq!(&g.base()[..2], &[3, 2]);
        assert_eq!(g.order(), BigUint::from(24u32));
    }

    #[test]
    fn redundant_generators_are_pruned() {
        let s5 = symmetric(5);
        let all = s5.elements(200).unwrap();
        let g = PermutationGroup::new(5, &all).unwrap();
        assert_eq!(g.order(), BigUint::from(120u32));
        // a strictly increasing chain in S_5 has length at most log2(120) < 7
        assert!(g.generators().len() <= 6);
        assert!(g.generators().len() <= generator_bound(5));
    }

    #[test]
    fn elements_enumerates_whole_group() {
        let s4 = symmetric(4);
        let mut els = s4.elements(100).unwrap();
        els.sort();
        els.dedup();
        assert_eq!(els.len(), 24);
        assert!(s4.elements(10).is_none());
    }

    #[test]
    fn degree_mismatch_rejected() {
        assert!(PermutationGroup::new(3, &[Permutation::identity(4)]).is_err());
    }
}

//! Products of explicitly listed groups and the restricted coset intersection.
//!
//! Elements of `G_1 × .. × G_r` are stored as permutations of a disjoint union
//! of one block per color. A color's block is either its element list, acted
//! on by left multiplication (regular), or its class positions (positional),
//! whichever is smaller. Both actions are faithful, so the encoding is too,
//! and the domain stays at `Σ min(|G_i|, |V_i|)` points.

use std::collections::HashMap;

use thiserror::Error;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::coset::PermutationCoset;
use super::group::PermutationGroup;
use super::perm::Permutation;

/// Cosets up to this size are intersected by listing their elements.
const ENUMERATION_LIMIT: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("listed group for color {color} is invalid: {reason}")]
    InvalidListedGroup { color: usize, reason: String },
    #[error("color classes do not partition the {0} vertices")]
    NotAPartition(usize),
    #[error("permutation of degree {got} does not act on the {expected} vertices")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("permutation does not preserve color class {color}")]
    MixesColors { color: usize },
    #[error("restriction to color class {color} is not in the listed group")]
    OutsideListedGroup { color: usize },
}

/// A subgroup of `Sym(k)` given by the full list of its elements.
#[derive(Clone, Debug)]
pub struct ListedGroup {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    identity: usize,
    degree: usize,
}

impl ListedGroup {
    /// Accepts any duplicate-free list of equal-degree permutations that
    /// contains the identity. Closure is not re-checked here; see
    /// [`ListedGroup::check_closure`].
    pub fn new(degree: usize, elements: Vec<Permutation>) -> Result<Self, String> {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, p) in elements.iter().enumerate() {
            if p.degree() != degree {
                return Err(format!("element {i} has degree {} instead of {degree}", p.degree()));
            }
            if index.insert(p.clone(), i).is_some() {
                return Err(format!("element {i} is listed twice"));
            }
        }
        let identity = *index
            .get(&Permutation::identity(degree))
            .ok_or_else(|| "identity missing".to_string())?;
        Ok(ListedGroup {
            elements,
            index,
            identity,
            degree,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::new(degree, vec![Permutation::identity(degree)]).expect("identity only")
    }

    pub fn check_closure(&self) -> Result<(), String> {
        for a in &self.elements {
            if !self.index.contains_key(&a.inverse()) {
                return Err("not closed under inverses".into());
            }
            for b in &self.elements {
                if !self.index.contains_key(&a.compose(b)) {
                    return Err("not closed under composition".into());
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    fn product_index(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].compose(&self.elements[b])]
    }
}

/// Color classes `V_1, .., V_r` of a vertex set together with listed groups
/// `G_i ≤ Sym(V_i)`; the ambient group is `G_1 × .. × G_r`.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    classes: Vec<Vec<usize>>,
    groups: Vec<ListedGroup>,
    offsets: Vec<usize>,
    positional: Vec<bool>,
    degree: usize,
    vertex_count: usize,
    vertex_slot: Vec<(usize, usize)>,
}

impl ProductSpace {
    /// `classes[i]` lists the vertices of `V_i`; element `g` of `groups[i]`
    /// maps `classes[i][x]` to `classes[i][g(x)]`.
    pub fn new(
        vertex_count: usize,
        classes: Vec<Vec<usize>>,
        groups: Vec<ListedGroup>,
    ) -> Result<Self, ProductError> {
        let mut vertex_slot = vec![(usize::MAX, usize::MAX); vertex_count];
        let mut covered = 0;
        for (c, class) in classes.iter().enumerate() {
            for (k, &v) in class.iter().enumerate() {
                if v >= vertex_count || vertex_slot[v].0 != usize::MAX {
                    return Err(ProductError::NotAPartition(vertex_count));
                }
                vertex_slot[v] = (c, k);
                covered += 1;
            }
        }
        if covered != vertex_count || classes.len() != groups.len() {
            return Err(ProductError::NotAPartition(vertex_count));
        }
        for (c, (class, g)) in classes.iter().zip(&groups).enumerate() {
            if g.degree() != class.len() {
                return Err(ProductError::InvalidListedGroup {
                    color: c,
                    reason: format!("acts on {} points, class has {}", g.degree(), class.len()),
                });
            }
        }
        let positional: Vec<bool> = groups.iter().map(|g| g.len() > g.degree()).collect();
        let mut offsets = Vec::with_capacity(groups.len());
        let mut degree = 0;
        for (g, &pos) in groups.iter().zip(&positional) {
            offsets.push(degree);
            degree += if pos { g.degree() } else { g.len() };
        }
        Ok(ProductSpace {
            classes,
            groups,
            offsets,
            positional,
            degree,
            vertex_count,
            vertex_slot,
        })
    }

    pub fn colors(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, color: usize) -> &ListedGroup {
        &self.groups[color]
    }

    pub fn class(&self, color: usize) -> &[usize] {
        &self.classes[color]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Size of the encoding domain.
    pub fn domain_degree(&self) -> usize {
        self.degree
    }

    /// Points in the block of `color`.
    pub fn block_size(&self, color: usize) -> usize {
        let g = &self.groups[color];
        if self.positional[color] {
            g.degree()
        } else {
            g.len()
        }
    }

    pub fn domain_identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    /// The element with factor `elements[i]` in color `i`.
    pub fn embed(&self, elements: &[usize]) -> Permutation {
        let mut image = Vec::with_capacity(self.degree);
        for (c, g) in self.groups.iter().enumerate() {
            let off = self.offsets[c] as u32;
            let e = elements[c];
            if e == g.identity {
                image.extend((0..self.block_size(c) as u32).map(|x| x + off));
            } else if self.positional[c] {
                image.extend(g.element(e).images().iter().map(|&x| x + off));
            } else {
                image.extend((0..g.len()).map(|x| g.product_index(e, x) as u32 + off));
            }
        }
        Permutation::from_u32_unchecked(image)
    }

    /// The element acting as `element` on color `color` and trivially elsewhere.
    pub fn embed_single(&self, color: usize, element: usize) -> Permutation {
        let mut factors: Vec<usize> = self.groups.iter().map(|g| g.identity).collect();
        factors[color] = element;
        self.embed(&factors)
    }

    /// Factor indices of an encoded element.
    pub fn factors(&self, p: &Permutation) -> Vec<usize> {
        (0..self.colors()).map(|c| self.factor(p, c)).collect()
    }

    pub fn factor(&self, p: &Permutation, color: usize) -> usize {
        self.factor_at(p, self.offsets[color], color)
    }

    /// Factor of `color` read off a copy of its block placed at `off`.
    fn factor_at(&self, p: &Permutation, off: usize, color: usize) -> usize {
        let g = &self.groups[color];
        if self.positional[color] {
            let local: Vec<u32> = (0..g.degree()).map(|k| (p.apply(off + k) - off) as u32).collect();
            g.index_of(&Permutation::from_u32_unchecked(local))
                .expect("encoded elements have listed factors")
        } else {
            p.apply(off + g.identity) - off
        }
    }

    pub fn to_vertex_permutation(&self, p: &Permutation) -> Permutation {
        let mut image = vec![0u32; self.vertex_count];
        for (c, class) in self.classes.iter().enumerate() {
            let g = self.groups[c].element(self.factor(p, c));
            for (k, &v) in class.iter().enumerate() {
                image[v] = class[g.apply(k)] as u32;
            }
        }
        Permutation::from_u32_unchecked(image)
    }

    pub fn from_vertex_permutation(&self, q: &Permutation) -> Result<Permutation, ProductError> {
        if q.degree() != self.vertex_count {
            return Err(ProductError::DegreeMismatch {
                expected: self.vertex_count,
                got: q.degree(),
            });
        }
        let mut factors = Vec::with_capacity(self.colors());
        for (c, class) in self.classes.iter().enumerate() {
            let mut local = Vec::with_capacity(class.len());
            for &v in class {
                let (c2, k) = self.vertex_slot[q.apply(v)];
                if c2 != c {
                    return Err(ProductError::MixesColors { color: c });
                }
                local.push(k);
            }
            let local = Permutation::from_images(local).map_err(|_| ProductError::MixesColors { color: c })?;
            let idx = self.groups[c]
                .index_of(&local)
                .ok_or(ProductError::OutsideListedGroup { color: c })?;
            factors.push(idx);
        }
        Ok(self.embed(&factors))
    }

    pub fn coset_to_vertices(&self, coset: &PermutationCoset) -> PermutationCoset {
        match coset {
            PermutationCoset::Empty { .. } => PermutationCoset::empty(self.vertex_count),
            PermutationCoset::NonEmpty {
                group,
                representative,
            } => {
                let gens: Vec<Permutation> = group
                    .generators()
                    .iter()
                    .map(|g| self.to_vertex_permutation(g))
                    .collect();
                PermutationCoset::new(
                    PermutationGroup::from_generators_unchecked(self.vertex_count, &gens),
                    self.to_vertex_permutation(representative),
                )
            }
        }
    }

    fn coset_from_vertices(
        &self,
        group: &PermutationGroup,
        rep: &Permutation,
    ) -> Result<PermutationCoset, ProductError> {
        let gens = group
            .generators()
            .iter()
            .map(|g| self.from_vertex_permutation(g))
            .collect::<Result<Vec<_>, _>>()?;
        let rep = self.from_vertex_permutation(rep)?;
        Ok(PermutationCoset::new(
            PermutationGroup::from_generators_unchecked(self.degree, &gens),
            rep,
        ))
    }

    /// `H·π ∩ H'·π'` for `H, H' ≤ G_1 × .. × G_r` given on the vertex set.
    pub fn restricted_coset_intersection(
        &self,
        h: &PermutationGroup,
        pi: &Permutation,
        h2: &PermutationGroup,
        pi2: &Permutation,
    ) -> Result<PermutationCoset, ProductError> {
        let a = self.coset_from_vertices(h, pi)?;
        let b = self.coset_from_vertices(h2, pi2)?;
        Ok(self.coset_to_vertices(&self.intersect(&a, &b)))
    }

    /// Restricted coset intersection on encoded cosets.
    ///
    /// The pair group `H × H'` acts on two copies of each active block and on
    /// the orbits `Ω_i` of the diagonals `D_i = {(v, v) | v ∈ V_i}` under
    /// `G_i × G_i`. The image of `D_i` under `(g, g')` is the graph of
    /// `g' ∘ g^{-1}`, so `Ω_i` is indexed by `G_i` itself and `(h, h')` sends
    /// `f` to `h' ∘ f ∘ h^{-1}`. Pairs fixing every `D_i` are exactly the
    /// `(x, x)` with `x` in both cosets. The `Ω_i` points are handled by an
    /// orbit walk over the element table, one color at a time; only the
    /// blocks are part of the permutation domain.
    pub fn intersect(&self, a: &PermutationCoset, b: &PermutationCoset) -> PermutationCoset {
        let (ga, ra, gb, rb) = match (a, b) {
            (
                PermutationCoset::NonEmpty {
                    group: ga,
                    representative: ra,
                },
                PermutationCoset::NonEmpty {
                    group: gb,
                    representative: rb,
                },
            ) => (ga, ra, gb, rb),
            _ => return PermutationCoset::empty(self.degree),
        };
        if ga.is_trivial() {
            return if b.contains(ra) {
                PermutationCoset::singleton(ra.clone())
            } else {
                PermutationCoset::empty(self.degree)
            };
        }
        if gb.is_trivial() {
            return if a.contains(rb) {
                PermutationCoset::singleton(rb.clone())
            } else {
                PermutationCoset::empty(self.degree)
            };
        }

        let (small, large) = if ga.order() <= gb.order() { (a, b) } else { (b, a) };
        if let Some(elements) = small.elements(ENUMERATION_LIMIT) {
            let mut hits = elements.into_iter().filter(|x| large.contains(x));
            let Some(first) = hits.next() else {
                return PermutationCoset::empty(self.degree);
            };
            let first_inv = first.inverse();
            let mut group = PermutationGroup::trivial(self.degree);
            for x in hits {
                group.add_generator(&x.compose(&first_inv));
            }
            return PermutationCoset::new(group, first);
        }

        let gens_a = ga.generators();
        let gens_b = gb.generators();
        let active: Vec<usize> = (0..self.colors())
            .filter(|&c| {
                let id = self.groups[c].identity;
                gens_a.iter().chain(gens_b).any(|g| self.factor(g, c) != id)
                    || self.factor(ra, c) != self.factor(rb, c)
            })
            .collect();

        // Layout: a left block and a right block per active color.
        let mut left_off = Vec::new();
        let mut right_off = Vec::new();
        let mut size = 0;
        for &c in &active {
            let b = self.block_size(c);
            left_off.push(size);
            right_off.push(size + b);
            size += 2 * b;
        }

        let pair_perm = |x: &Permutation, y: &Permutation| -> Permutation {
            let mut image = vec![0u32; size];
            for (slot, &c) in active.iter().enumerate() {
                let off = self.offsets[c];
                for e in 0..self.block_size(c) {
                    image[left_off[slot] + e] = (left_off[slot] + x.apply(off + e) - off) as u32;
                    image[right_off[slot] + e] = (right_off[slot] + y.apply(off + e) - off) as u32;
                }
            }
            Permutation::from_u32_unchecked(image)
        };

        let id = self.domain_identity();
        let mut pair_gens: Vec<Permutation> = gens_a.iter().map(|g| pair_perm(g, &id)).collect();
        pair_gens.extend(gens_b.iter().map(|g| pair_perm(&id, g)));
        let mut group = PermutationGroup::from_generators_unchecked(size, &pair_gens);
        let mut rep = pair_perm(ra, rb);

        // Fix the diagonal of each active color in turn. The Ω_i action is
        // evaluated through the element table instead of as permutation points.
        for (slot, &c) in active.iter().enumerate() {
            let g = &self.groups[c];
            let factors = |q: &Permutation| -> (Permutation, &Permutation) {
                let x = g.element(self.factor_at(q, left_off[slot], c));
                let y = g.element(self.factor_at(q, right_off[slot], c));
                (x.inverse(), y)
            };
            let omega = |(x_inv, y): &(Permutation, &Permutation), f: usize| -> usize {
                g.index[&y.compose(&g.element(f).compose(x_inv))]
            };
            let gens = group.generators().to_vec();
            let gen_factors: Vec<_> = gens.iter().map(factors).collect();
            let mut transversal: HashMap<usize, Permutation> = HashMap::new();
            transversal.insert(g.identity, Permutation::identity(size));
            let mut orbit = vec![g.identity];
            let mut i = 0;
            while i < orbit.len() {
                let f = orbit[i];
                for (s, sf) in gens.iter().zip(&gen_factors) {
                    let f2 = omega(sf, f);
                    if !transversal.contains_key(&f2) {
                        let u = s.compose(&transversal[&f]);
                        transversal.insert(f2, u);
                        orbit.push(f2);
                    }
                }
                i += 1;
            }
            let Some(u) = transversal.get(&omega(&factors(&rep), g.identity)) else {
                return PermutationCoset::empty(self.degree);
            };
            rep = u.inverse().compose(&rep);

            let target = group.order() / orbit.len();
            let mut stabilizer = PermutationGroup::trivial(size);
            let mut pairs: Vec<(usize, usize)> =
                (0..orbit.len()).flat_map(|f| (0..gens.len()).map(move |s| (f, s))).collect();
            pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
            for (f, s) in pairs {
                if stabilizer.order() == target {
                    break;
                }
                let f2 = omega(&gen_factors[s], orbit[f]);
                let schreier = transversal[&f2].inverse().compose(&gens[s].compose(&transversal[&orbit[f]]));
                stabilizer.add_generator(&schreier);
            }
            group = stabilizer;
        }

        // Group elements are trivial on inactive colors; the representative
        // carries the factor both input representatives share there.
        let identity_factors: Vec<usize> = self.groups.iter().map(|g| g.identity).collect();
        let rep_factors = self.factors(ra);
        let project = |p: &Permutation, base: &[usize]| -> Permutation {
            let mut factors = base.to_vec();
            for (slot, &c) in active.iter().enumerate() {
                factors[c] = self.factor_at(p, left_off[slot], c);
            }
            self.embed(&factors)
        };
        let gens: Vec<Permutation> = group
            .generators()
            .iter()
            .map(|g| project(g, &identity_factors))
            .collect();
        PermutationCoset::new(
            PermutationGroup::from_generators_unchecked(self.degree, &gens),
            project(&rep, &rep_factors),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    fn listed(n: usize, gens: &[Permutation]) -> ListedGroup {
        let g = PermutationGroup::new(n, gens).unwrap();
        ListedGroup::new(n, g.elements(10_000).unwrap()).unwrap()
    }

    /// Two colors: S_3 on {0,1,2} and C_2 on {3,4}.
    fn space() -> ProductSpace {
        ProductSpace::new(
            5,
            vec![vec![0, 1, 2], vec![3, 4]],
            vec![
                listed(3, &[cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])]),
                listed(2, &[cyc(2, &[&[0, 1]])]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let sp = space();
        let g = sp.group(0);
        for a in 0..g.len() {
            for b in 0..g.len() {
                let ea = sp.embed(&[a, 1]);
                let eb = sp.embed(&[b, 0]);
                let prod = ea.compose(&eb);
                assert_eq!(sp.factors(&prod), vec![g.product_index(a, b), 1]);
                assert_eq!(
                    sp.to_vertex_permutation(&prod),
                    sp.to_vertex_permutation(&ea).compose(&sp.to_vertex_permutation(&eb))
                );
            }
        }
    }

    #[test]
    fn vertex_round_trip_and_rejection() {
        let sp = space();
        let q = Permutation::from_images(vec![1, 2, 0, 4, 3]).unwrap();
        let r = sp.from_vertex_permutation(&q).unwrap();
        assert_eq!(sp.to_vertex_permutation(&r), q);
        let mixing = Permutation::from_images(vec![3, 1, 2, 0, 4]).unwrap();
        assert!(matches!(
            sp.from_vertex_permutation(&mixing),
            Err(ProductError::MixesColors { .. })
        ));

        let small = ProductSpace::new(
            3,
            vec![vec![0, 1, 2]],
            vec![listed(3, &[cyc(3, &[&[0, 1, 2]])])],
        )
        .unwrap();
        let t = cyc(3, &[&[0, 1]]);
        assert_eq!(
            small.from_vertex_permutation(&t),
            Err(ProductError::OutsideListedGroup { color: 0 })
        );
    }

    #[test]
    fn full_product_meets_itself() {
        let sp = space();
        let full = PermutationGroup::new(
            5,
            &[
                cyc(5, &[&[0, 1]]),
                cyc(5, &[&[0, 1, 2]]),
                cyc(5, &[&[3, 4]]),
            ],
        )
        .unwrap();
        let id = Permutation::identity(5);
        let meet = sp.restricted_coset_intersection(&full, &id, &full, &id).unwrap();
        assert_eq!(meet.size(), BigUint::from(12u32));
    }

    #[test]
    fn distinct_cosets_of_one_subgroup_are_disjoint() {
        let sp = space();
        let h = PermutationGroup::new(5, &[cyc(5, &[&[0, 1]])]).unwrap();
        let meet = sp
            .restricted_coset_intersection(
                &h,
                &Permutation::identity(5),
                &h,
                &cyc(5, &[&[0, 1, 2]]),
            )
            .unwrap();
        assert!(meet.is_empty());
    }

    #[test]
    fn overlapping_subgroups() {
        let sp = space();
        // H = <(0 1 2), (3 4)>, H' = <(0 1)(3 4)>: H ∩ H' is trivial
        let h = PermutationGroup::new(5, &[cyc(5, &[&[0, 1, 2]]), cyc(5, &[&[3, 4]])]).unwrap();
        let h2 = PermutationGroup::new(5, &[cyc(5, &[&[0, 1], &[3, 4]])]).unwrap();
        let id = Permutation::identity(5);
        let meet = sp.restricted_coset_intersection(&h, &id, &h2, &id).unwrap();
        assert_eq!(meet.size(), BigUint::from(1u32));
        // shifting H' by (0 1) gives {(0 1), (3 4)}, which meets H in (3 4)
        let meet = sp
            .restricted_coset_intersection(&h, &id, &h2, &cyc(5, &[&[0, 1]]))
            .unwrap();
        assert_eq!(meet.size(), BigUint::from(1u32));
        assert_eq!(meet.representative(), Some(&cyc(5, &[&[3, 4]])));
    }

    #[test]
    fn shared_factor_on_untouched_color_survives() {
        let sp = space();
        // both cosets act trivially on V_2 but carry (3 4) there
        let h = PermutationGroup::new(5, &[cyc(5, &[&[0, 1, 2]])]).unwrap();
        let swap = cyc(5, &[&[3, 4]]);
        let meet = sp.restricted_coset_intersection(&h, &swap, &h, &swap).unwrap();
        assert_eq!(meet.size(), BigUint::from(3u32));
        assert!(meet.contains(&swap));
    }

    #[test]
    fn rejects_groups_outside_the_product() {
        let sp = ProductSpace::new(
            3,
            vec![vec![0, 1, 2]],
            vec![listed(3, &[cyc(3, &[&[0, 1, 2]])])],
        )
        .unwrap();
        let h = PermutationGroup::new(3, &[cyc(3, &[&[0, 1]])]).unwrap();
        let id = Permutation::identity(3);
        assert!(sp.restricted_coset_intersection(&h, &id, &h, &id).is_err());
    }

    #[test]
    fn listed_group_validation() {
        assert!(ListedGroup::new(2, vec![cyc(2, &[&[0, 1]])]).is_err());
        let g = ListedGroup::new(3, vec![Permutation::identity(3), cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert!(g.check_closure().is_err());
        assert!(listed(3, &[cyc(3, &[&[0, 1, 2]])]).check_closure().is_ok());
    }
}

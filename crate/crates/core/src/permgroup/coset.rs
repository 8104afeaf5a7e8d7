use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::Zero;

use super::group::PermutationGroup;
use super::perm::Permutation;

/// A right coset `G·s = { g ∘ s | g ∈ G }`, or the empty set.
#[derive(Clone, Debug)]
pub enum PermutationCoset {
    Empty { degree: usize },
    NonEmpty {
        group: PermutationGroup,
        representative: Permutation,
    },
}

impl PermutationCoset {
    pub fn new(group: PermutationGroup, representative: Permutation) -> Self {
        assert_eq!(group.degree(), representative.degree());
        PermutationCoset::NonEmpty {
            group,
            representative,
        }
    }

    pub fn empty(degree: usize) -> Self {
        PermutationCoset::Empty { degree }
    }

    /// The coset `{p}`.
    pub fn singleton(p: Permutation) -> Self {
        let degree = p.degree();
        Self::new(PermutationGroup::trivial(degree), p)
    }

    pub fn from_group(group: PermutationGroup) -> Self {
        let id = Permutation::identity(group.degree());
        Self::new(group, id)
    }

    pub fn degree(&self) -> usize {
        match self {
            PermutationCoset::Empty { degree } => *degree,
            PermutationCoset::NonEmpty { group, .. } => group.degree(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PermutationCoset::Empty { .. })
    }

    pub fn group(&self) -> Option<&PermutationGroup> {
        match self {
            PermutationCoset::Empty { .. } => None,
            PermutationCoset::NonEmpty { group, .. } => Some(group),
        }
    }

    pub fn representative(&self) -> Option<&Permutation> {
        match self {
            PermutationCoset::Empty { .. } => None,
            PermutationCoset::NonEmpty { representative, .. } => Some(representative),
        }
    }

    pub fn size(&self) -> BigUint {
        match self {
            PermutationCoset::Empty { .. } => BigUint::zero(),
            PermutationCoset::NonEmpty { group, .. } => group.order(),
        }
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        match self {
            PermutationCoset::Empty { .. } => false,
            PermutationCoset::NonEmpty {
                group,
                representative,
            } => p.degree() == representative.degree()
                && group.contains(&p.compose(&representative.inverse())),
        }
    }

    /// `(G·s)^{-1} = (s^{-1} G s)·s^{-1}`.
    pub fn inverse(&self) -> PermutationCoset {
        match self {
            PermutationCoset::Empty { degree } => PermutationCoset::empty(*degree),
            PermutationCoset::NonEmpty {
                group,
                representative,
            } => {
                let s_inv = representative.inverse();
                let gens: Vec<Permutation> = group
                    .generators()
                    .iter()
                    .map(|g| s_inv.compose(&g.compose(representative)))
                    .collect();
                PermutationCoset::new(
                    PermutationGroup::from_generators_unchecked(group.degree(), &gens),
                    s_inv,
                )
            }
        }
    }

    /// Multiplies every element on the right by `p`.
    pub fn right_multiply(&self, p: &Permutation) -> PermutationCoset {
        match self {
            PermutationCoset::Empty { degree } => PermutationCoset::empty(*degree),
            PermutationCoset::NonEmpty {
                group,
                representative,
            } => PermutationCoset::new(group.clone(), representative.compose(p)),
        }
    }

    pub fn elements(&self, limit: usize) -> Option<Vec<Permutation>> {
        match self {
            PermutationCoset::Empty { .. } => Some(Vec::new()),
            PermutationCoset::NonEmpty {
                group,
                representative,
            } => group
                .elements(limit)
                .map(|els| els.iter().map(|g| g.compose(representative)).collect()),
        }
    }

    /// Set equality of two cosets.
    pub fn same_set(&self, other: &PermutationCoset) -> bool {
        match (self, other) {
            (PermutationCoset::Empty { .. }, PermutationCoset::Empty { .. }) => true,
            (
                PermutationCoset::NonEmpty {
                    group,
                    representative,
                },
                PermutationCoset::NonEmpty { .. },
            ) => other.contains(representative) && other.group().is_some_and(|h| h.same_group(group)),
            _ => false,
        }
    }
}

/// The subcoset `{ x ∈ G·s | x(alpha) = beta }`.
///
/// With `x = g ∘ s` the condition is `g(s(alpha)) = beta`; the matching `g`
/// form the coset `Stab_G(beta) ∘ u^{-1}` where `u(beta) = s(alpha)` is read
/// off the transversal of a chain based at `beta`.
pub fn stabilizer_in_coset(coset: &PermutationCoset, alpha: usize, beta: usize) -> PermutationCoset {
    subcoset_mapping(coset, &[(alpha, beta)])
}

/// The subcoset of elements sending each `alpha_i` to `beta_i`, obtained by
/// applying [`stabilizer_in_coset`] once per pair along a single stabilizer
/// chain with base prefix `beta_1, beta_2, ..`.
pub fn subcoset_mapping(coset: &PermutationCoset, pairs: &[(usize, usize)]) -> PermutationCoset {
    let (group, representative) = match coset {
        PermutationCoset::Empty { degree } => return PermutationCoset::empty(*degree),
        PermutationCoset::NonEmpty {
            group,
            representative,
        } => (group, representative),
    };
    let degree = group.degree();
    if pairs.is_empty() {
        return coset.clone();
    }
    // Repeated betas must come with consistent alphas; the chain needs distinct base points.
    let mut targets: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        if let Some(&(a2, _)) = targets.iter().find(|&&(_, b2)| b2 == b) {
            if a2 != a {
                return PermutationCoset::empty(degree);
            }
            continue;
        }
        targets.push((a, b));
    }
    let prefix: Vec<usize> = targets.iter().map(|&(_, b)| b).collect();
    let chain = PermutationGroup::with_base_prefix(degree, &group.strong_generators(), &prefix)
        .expect("same degree");
    let mut x = representative.clone();
    for (level, &(alpha, _)) in targets.iter().enumerate() {
        let gamma = x.apply(alpha);
        match chain.transversal_element(level, gamma) {
            None => return PermutationCoset::empty(degree),
            Some(u) => x = u.inverse().compose(&x),
        }
    }
    PermutationCoset::new(chain.stabilizer_at_level(targets.len()), x)
}

/// Union of right cosets whose set union is known to be a single coset.
///
/// The result keeps the first non-empty representative `s_1` and is generated
/// by all input generators together with `s_i ∘ s_1^{-1}`.
pub fn coset_union(cosets: &[PermutationCoset]) -> PermutationCoset {
    let degree = match cosets.first() {
        Some(c) => c.degree(),
        None => return PermutationCoset::empty(0),
    };
    let mut first: Option<&Permutation> = None;
    let mut first_inv = None;
    let mut gens = Vec::new();
    for c in cosets {
        if let PermutationCoset::NonEmpty {
            group,
            representative,
        } = c
        {
            gens.extend(group.generators().iter().cloned());
            match first {
                None => {
                    first = Some(representative);
                    first_inv = Some(representative.inverse());
                }
                Some(_) => {
                    let t = representative.compose(first_inv.as_ref().unwrap());
                    if !t.is_identity() {
                        gens.push(t);
                    }
                }
            }
        }
    }
    let Some(rep) = first else {
        return PermutationCoset::empty(degree);
    };
    let out = PermutationCoset::new(
        PermutationGroup::from_generators_unchecked(degree, &gens),
        rep.clone(),
    );
    debug_assert!(cosets
        .iter()
        .filter_map(|c| c.representative())
        .all(|r| out.contains(r)));
    out
}

/// Orbit of `x` under `group` for an arbitrary left action, with a witness
/// `w` satisfying `act(w, x) = y` for every orbit element `y`.
pub fn orbit_with_witness<T, F>(
    group: &PermutationGroup,
    x: T,
    act: F,
) -> (Vec<T>, HashMap<T, Permutation>)
where
    T: Clone + Eq + Hash,
    F: Fn(&Permutation, &T) -> T,
{
    let mut witness = HashMap::new();
    witness.insert(x.clone(), Permutation::identity(group.degree()));
    let mut orbit = vec![x];
    let mut k = 0;
    while k < orbit.len() {
        let y = orbit[k].clone();
        let wy = witness[&y].clone();
        for g in group.generators() {
            let z = act(g, &y);
            if !witness.contains_key(&z) {
                witness.insert(z.clone(), g.compose(&wy));
                orbit.push(z);
            }
        }
        k += 1;
    }
    (orbit, witness)
}

pub fn point_action(p: &Permutation, x: &usize) -> usize {
    p.apply(*x)
}

pub fn set_action(p: &Permutation, s: &Vec<usize>) -> Vec<usize> {
    p.apply_set(s)
}

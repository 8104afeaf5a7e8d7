//! Permutations, permutation groups in base-and-strong-generating-set form,
//! right cosets, and coset intersection inside products of listed groups.

mod coset;
mod group;
mod perm;
mod product;

pub use coset::{
    coset_union, orbit_with_witness, point_action, set_action, stabilizer_in_coset,
    subcoset_mapping, PermutationCoset,
};
pub use group::{generator_bound, PermutationGroup};
pub use perm::{PermError, Permutation};
pub use product::{ListedGroup, ProductError, ProductSpace};

/// `H·π ∩ H2·π2` where both groups lie in the product of the listed groups of
/// `space`. See [`ProductSpace::intersect`] for the method.
pub fn restricted_coset_intersection(
    h: &PermutationGroup,
    pi: &Permutation,
    h2: &PermutationGroup,
    pi2: &Permutation,
    space: &ProductSpace,
) -> Result<PermutationCoset, ProductError> {
    space.restricted_coset_intersection(h, pi, h2, pi2)
}

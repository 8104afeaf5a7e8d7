use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::instance::{ColoredMultiHypergraph, HypError, Traces};
use crate::permgroup::{ListedGroup, Permutation, PermutationCoset, PermutationGroup, ProductSpace};

/// Hyperedges that agree on every color from `level` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub level: usize,
    /// Common traces on colors `level..r`.
    pub key: Traces,
    pub members: Vec<(Traces, BigUint)>,
}

/// Blocks of the given level in key order. Colors are 0-based, so a level-`ℓ`
/// block fixes the traces on colors `ℓ..r` and the level-`r` block is the
/// whole edge multiset.
pub fn build_blocks(x: &ColoredMultiHypergraph, level: usize) -> Result<Vec<Block>, HypError> {
    assert!(level <= x.colors());
    let mut blocks: BTreeMap<Traces, Vec<(Traces, BigUint)>> = BTreeMap::new();
    for (t, m) in x.merged_traces()? {
        blocks.entry(t[level..].to_vec()).or_default().push((t, m));
    }
    Ok(blocks
        .into_iter()
        .map(|(key, members)| Block { level, key, members })
        .collect())
}

/// `ISO` for two level-0 blocks restricted to the first color: empty when
/// the multiplicities differ, otherwise the elements of `g1` mapping
/// `a ∩ V_1` onto `b ∩ V_1`, as a coset on the positions of the first class.
pub fn stage0(a: &Block, b: &Block, g1: &ListedGroup) -> PermutationCoset {
    assert!(a.level == 0 && b.level == 0, "stage0 takes level-0 blocks");
    let degree = g1.degree();
    let mult = |blk: &Block| blk.members.iter().map(|(_, m)| m.clone()).sum::<BigUint>();
    if mult(a) != mult(b) {
        return PermutationCoset::empty(degree);
    }
    let (ta, tb) = (&a.key[0], &b.key[0]);
    let matching: Vec<&Permutation> = g1
        .elements()
        .iter()
        .filter(|g| {
            let mut img: Vec<u32> = ta.iter().map(|&v| g.apply(v as usize) as u32).collect();
            img.sort_unstable();
            &img == tb
        })
        .collect();
    let Some(first) = matching.first() else {
        return PermutationCoset::empty(degree);
    };
    let first_inv = first.inverse();
    let gens: Vec<Permutation> = matching[1..].iter().map(|g| g.compose(&first_inv)).collect();
    PermutationCoset::new(PermutationGroup::from_generators_unchecked(degree, &gens), (*first).clone())
}

/// Every element of `g` mapping the set of traces `a` onto the set `b`,
/// with the induced index map `τ̂` defined by `τ(a_i) = b_{τ̂(i)}`. Elements
/// are reported by index into `g`.
pub fn compute_s_ell(a: &[Vec<u32>], b: &[Vec<u32>], g: &ListedGroup) -> Vec<(usize, Vec<usize>)> {
    if a.len() != b.len() {
        return Vec::new();
    }
    let lookup: HashMap<&Vec<u32>, usize> = b.iter().enumerate().map(|(j, t)| (t, j)).collect();
    let mut out = Vec::new();
    'elements: for (e, tau) in g.elements().iter().enumerate() {
        let mut hat = Vec::with_capacity(a.len());
        for t in a {
            let mut img: Vec<u32> = t.iter().map(|&v| tau.apply(v as usize) as u32).collect();
            img.sort_unstable();
            match lookup.get(&img) {
                Some(&j) => hat.push(j),
                None => continue 'elements,
            }
        }
        out.push((e, hat));
    }
    out
}

struct Node {
    /// Children by trace on color `level - 1`, sorted by trace.
    children: Vec<(Vec<u32>, usize)>,
    multiplicity: BigUint,
    fingerprint: u32,
}

/// Level-indexed block tree. `levels[ℓ]` holds the `ℓ`-blocks.
struct Trie {
    levels: Vec<Vec<Node>>,
}

#[derive(Hash, PartialEq, Eq)]
enum Fingerprint {
    Leaf(BigUint),
    Inner(usize, Vec<(usize, u32)>),
}

fn intern(table: &mut HashMap<Fingerprint, u32>, fp: Fingerprint) -> u32 {
    let next = table.len() as u32;
    *table.entry(fp).or_insert(next)
}

impl Trie {
    fn build(x: &ColoredMultiHypergraph) -> Result<Trie, HypError> {
        let r = x.colors();
        let edges: Vec<(Traces, BigUint)> = x.merged_traces()?.into_iter().collect();
        let mut trie = Trie {
            levels: (0..=r).map(|_| Vec::new()).collect(),
        };
        let mut interned: HashMap<Fingerprint, u32> = HashMap::new();
        let all: Vec<usize> = (0..edges.len()).collect();
        trie.insert(r, &all, &edges, &mut interned);
        Ok(trie)
    }

    fn insert(
        &mut self,
        level: usize,
        members: &[usize],
        edges: &[(Traces, BigUint)],
        interned: &mut HashMap<Fingerprint, u32>,
    ) -> usize {
        let node = if level == 0 {
            let multiplicity: BigUint = members.iter().map(|&i| edges[i].1.clone()).sum();
            let fingerprint = intern(interned, Fingerprint::Leaf(multiplicity.clone()));
            Node {
                children: Vec::new(),
                multiplicity,
                fingerprint,
            }
        } else {
            let mut parts: BTreeMap<&Vec<u32>, Vec<usize>> = BTreeMap::new();
            for &i in members {
                parts.entry(&edges[i].0[level - 1]).or_default().push(i);
            }
            let children: Vec<(Vec<u32>, usize)> = parts
                .into_iter()
                .map(|(t, part)| (t.clone(), self.insert(level - 1, &part, edges, interned)))
                .collect();
            let mut shape: Vec<(usize, u32)> = children
                .iter()
                .map(|(t, c)| (t.len(), self.levels[level - 1][*c].fingerprint))
                .collect();
            shape.sort_unstable();
            let fingerprint = intern(interned, Fingerprint::Inner(level, shape));
            Node {
                children,
                multiplicity: BigUint::default(),
                fingerprint,
            }
        };
        self.levels[level].push(node);
        self.levels[level].len() - 1
    }
}

/// Table of cosets `T(ℓ, A, B)`, encoded in the product space and
/// keyed by level and block indices.
pub struct IsoTable {
    entries: Vec<HashMap<(usize, usize), PermutationCoset>>,
}

impl IsoTable {
    pub fn get(&self, level: usize, a: usize, b: usize) -> Option<&PermutationCoset> {
        self.entries.get(level)?.get(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The automorphism group of a hypergraph instance within the product of its
/// listed groups.
pub struct HypAutSolution {
    pub space: ProductSpace,
    /// The group in the encoding of the product space.
    pub encoded_group: PermutationGroup,
    /// Generators as permutations of the hypergraph vertices.
    pub generators: Vec<Permutation>,
    pub order: BigUint,
    pub table: IsoTable,
}

impl HypAutSolution {
    /// Per generator, the index of its factor in each listed group.
    pub fn generator_factors(&self) -> Vec<Vec<usize>> {
        self.encoded_group
            .generators()
            .iter()
            .map(|g| self.space.factors(g))
            .collect()
    }
}

type Demand = Vec<Vec<(usize, usize)>>;
type Branches = Vec<HashMap<(usize, usize), Vec<(usize, Vec<usize>)>>>;

pub fn solve(x: &ColoredMultiHypergraph) -> Result<HypAutSolution, HypError> {
    let groups = x.listed()?;
    let r = x.colors();
    let space = ProductSpace::new(x.vertex_count, x.color_classes.clone(), groups)
        .map_err(|e| HypError::InvalidGroup {
            color: 0,
            reason: e.to_string(),
        })?;
    let trie = Trie::build(x)?;
    let degree = space.domain_degree();

    // Top-down: which block pairs are needed, and the admissible τ per pair.
    let mut demand: Demand = vec![Vec::new(); r + 1];
    let mut branches: Branches = vec![HashMap::new(); r + 1];
    demand[r].push((0, 0));
    for level in (1..=r).rev() {
        let mut next: HashSet<(usize, usize)> = HashSet::new();
        let found: Vec<((usize, usize), Vec<(usize, Vec<usize>)>)> = demand[level]
            .par_iter()
            .map(|&(a, b)| ((a, b), admissible(&trie, &space, level, a, b)))
            .collect();
        for ((a, b), s) in found {
            let (na, nb) = (&trie.levels[level][a], &trie.levels[level][b]);
            for (_, hat) in &s {
                for (i, &j) in hat.iter().enumerate() {
                    next.insert((na.children[i].1, nb.children[j].1));
                }
            }
            branches[level].insert((a, b), s);
        }
        let mut next: Vec<(usize, usize)> = next.into_iter().collect();
        next.sort_unstable();
        demand[level - 1] = next;
    }

    // Bottom-up evaluation, one stage at a time.
    let mut entries: Vec<HashMap<(usize, usize), PermutationCoset>> = Vec::with_capacity(r + 1);
    let identity = space.domain_identity();
    entries.push(
        demand[0]
            .iter()
            .map(|&(a, b)| {
                let same = trie.levels[0][a].multiplicity == trie.levels[0][b].multiplicity;
                let c = if same {
                    PermutationCoset::singleton(identity.clone())
                } else {
                    PermutationCoset::empty(degree)
                };
                ((a, b), c)
            })
            .collect(),
    );
    for level in 1..=r {
        let prev = &entries[level - 1];
        let computed: Vec<((usize, usize), PermutationCoset)> = demand[level]
            .par_iter()
            .map(|&(a, b)| {
                let c = stage_entry(&trie, &space, prev, level, (a, b), &branches[level][&(a, b)]);
                ((a, b), c)
            })
            .collect();
        let map: HashMap<_, _> = computed.into_iter().collect();
        #[cfg(debug_assertions)]
        check_inverse_pairs(&map);
        entries.push(map);
    }
    let root = entries[r][&(0, 0)].clone();
    let encoded_group = match root {
        PermutationCoset::NonEmpty { group, representative } => {
            debug_assert!(group.contains(&representative));
            group
        }
        PermutationCoset::Empty { .. } => unreachable!("the identity maps the edge multiset to itself"),
    };
    let generators = encoded_group
        .generators()
        .iter()
        .map(|g| space.to_vertex_permutation(g))
        .collect();
    let order = encoded_group.order();
    Ok(HypAutSolution {
        space,
        encoded_group,
        generators,
        order,
        table: IsoTable { entries },
    })
}

/// `S_ℓ` for the pair, keeping only `τ` whose induced child matching pairs
/// children with equal fingerprints.
fn admissible(trie: &Trie, space: &ProductSpace, level: usize, a: usize, b: usize) -> Vec<(usize, Vec<usize>)> {
    let (na, nb) = (&trie.levels[level][a], &trie.levels[level][b]);
    if na.fingerprint != nb.fingerprint {
        return Vec::new();
    }
    let ta: Vec<Vec<u32>> = na.children.iter().map(|(t, _)| t.clone()).collect();
    let tb: Vec<Vec<u32>> = nb.children.iter().map(|(t, _)| t.clone()).collect();
    let child_fp = |n: &Node, i: usize| trie.levels[level - 1][n.children[i].1].fingerprint;
    compute_s_ell(&ta, &tb, space.group(level - 1))
        .into_iter()
        .filter(|(_, hat)| hat.iter().enumerate().all(|(i, &j)| child_fp(na, i) == child_fp(nb, j)))
        .collect()
}

/// Hat prefixes up to this length have their partial intersections cached.
const PREFIX_MEMO: usize = 3;

/// `∩_j T(ℓ-1, A^j, B^{τ̂(j)})` for one branch.
fn branch_base(
    trie: &Trie,
    space: &ProductSpace,
    prev: &HashMap<(usize, usize), PermutationCoset>,
    level: usize,
    (a, b): (usize, usize),
    hat: &[usize],
    memo: &mut HashMap<Vec<usize>, PermutationCoset>,
) -> PermutationCoset {
    let (na, nb) = (&trie.levels[level][a], &trie.levels[level][b]);
    let mut acc: Option<PermutationCoset> = None;
    for (i, &j) in hat.iter().enumerate() {
        let cached = if i < PREFIX_MEMO { memo.get(&hat[..=i]).cloned() } else { None };
        let next = cached.unwrap_or_else(|| {
            let c = &prev[&(na.children[i].1, nb.children[j].1)];
            let next = match &acc {
                None => c.clone(),
                Some(x) => space.intersect(x, c),
            };
            if i < PREFIX_MEMO {
                memo.insert(hat[..=i].to_vec(), next.clone());
            }
            next
        });
        if next.is_empty() {
            return next;
        }
        acc = Some(next);
    }
    acc.unwrap_or_else(|| full_prefix_product(space, level - 1))
}

/// One table entry from the previous stage:
/// `∪_{τ ∈ S} (∩_j T(ℓ-1, A^j, B^{τ̂(j)})) · τ`.
///
/// Every non-empty branch base is a coset of the same group `K` (the
/// intersection of the children's automorphism cosets), so the union is
/// `⟨K, t_τ⟩ · s` with `t_τ = s_τ ∘ s^{-1}`. Its factors on color `ℓ-1` form
/// a coset of the projection `P` of that group; a branch whose `τ` already
/// lies in the known part of `P · τ_0` is covered and is not evaluated.
fn stage_entry(
    trie: &Trie,
    space: &ProductSpace,
    prev: &HashMap<(usize, usize), PermutationCoset>,
    level: usize,
    pair: (usize, usize),
    s: &[(usize, Vec<usize>)],
) -> PermutationCoset {
    struct Union {
        group: PermutationGroup,
        rep: Permutation,
        rep_inv: Permutation,
        tau0_inv: Permutation,
        projection: PermutationGroup,
    }
    let listed = space.group(level - 1);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let mut memo = HashMap::new();
    let mut union: Option<Union> = None;
    for k in order {
        let (tau, hat) = &s[k];
        let tau_el = listed.element(*tau);
        if let Some(u) = &union {
            if u.projection.contains(&tau_el.compose(&u.tau0_inv)) {
                continue;
            }
        }
        let PermutationCoset::NonEmpty { group: h, representative: r } =
            branch_base(trie, space, prev, level, pair, hat, &mut memo)
        else {
            continue;
        };
        let s_tau = r.compose(&space.embed_single(level - 1, *tau));
        match &mut union {
            None => {
                union = Some(Union {
                    group: h,
                    rep_inv: s_tau.inverse(),
                    rep: s_tau,
                    tau0_inv: tau_el.inverse(),
                    projection: PermutationGroup::trivial(listed.degree()),
                });
            }
            Some(u) => {
                debug_assert!(h.generators().iter().all(|g| u.group.contains(g)), "branch bases differ");
                u.group.add_generator(&s_tau.compose(&u.rep_inv));
                u.projection.add_generator(&tau_el.compose(&u.tau0_inv));
            }
        }
    }
    match union {
        None => PermutationCoset::empty(space.domain_degree()),
        Some(u) => PermutationCoset::new(u.group, u.rep),
    }
}

/// `G_1 × .. × G_colors` on the encoding domain.
fn full_prefix_product(space: &ProductSpace, colors: usize) -> PermutationCoset {
    let target: BigUint = (0..colors).map(|c| BigUint::from(space.group(c).len())).product();
    let mut g = PermutationGroup::trivial(space.domain_degree());
    for c in 0..colors {
        for e in 0..space.group(c).len() {
            if g.order() == target {
                return PermutationCoset::from_group(g);
            }
            g.add_generator(&space.embed_single(c, e));
        }
    }
    PermutationCoset::from_group(g)
}

#[cfg(debug_assertions)]
fn check_inverse_pairs(map: &HashMap<(usize, usize), PermutationCoset>) {
    let mut checked = 0;
    for (&(a, b), c) in map {
        if a < b && checked < 16 {
            if let Some(back) = map.get(&(b, a)) {
                checked += 1;
                assert!(back.same_set(&c.inverse()), "ISO(B, A) differs from ISO(A, B)^-1");
            }
        }
    }
}

/// `Aut(X) ∩ G_1 × .. × G_r` as a group of vertex permutations.
pub fn hyp_aut(x: &ColoredMultiHypergraph) -> Result<PermutationGroup, HypError> {
    let sol = solve(x)?;
    Ok(PermutationGroup::new(x.vertex_count, &sol.generators).expect("generators act on the vertex set"))
}

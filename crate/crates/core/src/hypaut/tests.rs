use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fixtures::random_hypergraph;
use crate::oracle::brute_hyp_aut;
use crate::permgroup::{ListedGroup, Permutation, PermutationGroup};

fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
    Permutation::from_cycles(n, cycles).unwrap()
}

fn sym(n: usize) -> Vec<Permutation> {
    let gens = if n < 2 {
        vec![]
    } else {
        vec![cyc(n, &[&[0, 1]]), Permutation::from_images((1..n).chain([0]).collect()).unwrap()]
    };
    PermutationGroup::new(n, &gens).unwrap().elements(10_000).unwrap()
}

fn two_colors() -> ColoredMultiHypergraph {
    // V_1 = {a1, a2} = {0, 1}, V_2 = {b1, b2} = {2, 3}
    ColoredMultiHypergraph {
        vertex_count: 4,
        color_classes: vec![vec![0, 1], vec![2, 3]],
        listed_groups: vec![sym(2), sym(2)],
        hyperedges: vec![(vec![0, 2], 1), (vec![1, 2], 1), (vec![0, 3], 1)],
    }
}

#[test]
fn blocks_by_level() {
    let x = two_colors();
    let top = build_blocks(&x, 2).unwrap();
    assert_eq!(top.len(), 1);
    assert_eq!(top[0].members.len(), 3);

    let one = build_blocks(&x, 1).unwrap();
    let keys: Vec<&Traces> = one.iter().map(|b| &b.key).collect();
    assert_eq!(keys, vec![&vec![vec![0u32]], &vec![vec![1u32]]]);
    assert_eq!(one[0].members.len(), 2);
    assert_eq!(one[1].members.len(), 1);

    let zero = build_blocks(&x, 0).unwrap();
    assert_eq!(zero.len(), 3);
    let dup = ColoredMultiHypergraph {
        hyperedges: vec![(vec![0, 2], 1), (vec![2, 0], 2)],
        ..two_colors()
    };
    let zero = build_blocks(&dup, 0).unwrap();
    assert_eq!(zero.len(), 1);
    assert_eq!(zero[0].members[0].1, BigUint::from(3u32));
}

fn leaf(trace: u32, mult: u32) -> Block {
    Block {
        level: 0,
        key: vec![vec![trace]],
        members: vec![(vec![vec![trace]], BigUint::from(mult))],
    }
}

#[test]
fn stage0_examples() {
    let s3 = ListedGroup::new(3, sym(3)).unwrap();
    assert!(stage0(&leaf(0, 2), &leaf(0, 3), &s3).is_empty());

    let trivial = ListedGroup::trivial(3);
    let c = stage0(&leaf(1, 1), &leaf(1, 1), &trivial);
    assert_eq!(c.size(), BigUint::from(1u32));
    assert!(c.contains(&Permutation::identity(3)));

    // elements of S_3 sending 0 to 1, found by inspection: (0 1) and (0 1 2)
    let c = stage0(&leaf(0, 1), &leaf(1, 1), &s3);
    assert_eq!(c.size(), BigUint::from(2u32));
    assert!(c.contains(&cyc(3, &[&[0, 1]])));
    assert!(c.contains(&cyc(3, &[&[0, 1, 2]])));
    assert!(!c.contains(&cyc(3, &[&[0, 2]])));
}

#[test]
fn s_ell_examples() {
    let s2 = ListedGroup::new(2, sym(2)).unwrap();
    let a = vec![vec![0u32], vec![1]];
    let same = compute_s_ell(&a, &a, &s2);
    assert!(same.contains(&(s2.identity_index(), vec![0, 1])));

    let trivial = ListedGroup::trivial(3);
    assert!(compute_s_ell(&[vec![0u32]], &[vec![1u32]], &trivial).is_empty());

    // a1 = {x}, a2 = {y}; b1 = {y}, b2 = {x}
    let b = vec![vec![1u32], vec![0]];
    let s = compute_s_ell(&a, &b, &s2);
    assert_eq!(s.len(), 2);
    let swap = s2.index_of(&cyc(2, &[&[0, 1]])).unwrap();
    assert!(s.contains(&(swap, vec![0, 1])));
    assert!(s.contains(&(s2.identity_index(), vec![1, 0])));
}

#[test]
fn trivial_groups_give_trivial_result() {
    let x = ColoredMultiHypergraph {
        listed_groups: vec![vec![Permutation::identity(2)], vec![Permutation::identity(2)]],
        ..two_colors()
    };
    assert!(hyp_aut(&x).unwrap().is_trivial());
}

#[test]
fn singletons_under_s3() {
    let x = ColoredMultiHypergraph {
        vertex_count: 3,
        color_classes: vec![vec![0, 1, 2]],
        listed_groups: vec![sym(3)],
        hyperedges: vec![(vec![0], 1), (vec![1], 1), (vec![2], 1)],
    };
    assert_eq!(hyp_aut(&x).unwrap().order(), BigUint::from(6u32));
}

#[test]
fn multiplicities_matter() {
    let x = ColoredMultiHypergraph {
        vertex_count: 3,
        color_classes: vec![vec![0, 1, 2]],
        listed_groups: vec![sym(3)],
        hyperedges: vec![(vec![0], 1), (vec![1], 1), (vec![2], 2)],
    };
    assert_eq!(hyp_aut(&x).unwrap().order(), BigUint::from(2u32));
}

#[test]
fn empty_edge_set_gives_full_product() {
    let x = ColoredMultiHypergraph {
        hyperedges: vec![],
        ..two_colors()
    };
    assert_eq!(hyp_aut(&x).unwrap().order(), BigUint::from(4u32));
}

#[test]
fn two_color_example() {
    // edges {a1,b1}, {a2,b1}, {a1,b2}: only the identity survives
    assert!(hyp_aut(&two_colors()).unwrap().is_trivial());
    let sq = ColoredMultiHypergraph {
        hyperedges: vec![(vec![0, 2], 1), (vec![1, 3], 1)],
        ..two_colors()
    };
    assert_eq!(hyp_aut(&sq).unwrap().order(), BigUint::from(2u32));
}

#[test]
fn invalid_instances() {
    let mut x = two_colors();
    x.listed_groups[0] = vec![cyc(2, &[&[0, 1]])];
    assert!(matches!(hyp_aut(&x), Err(HypError::InvalidGroup { color: 0, .. })));
    let mut x = two_colors();
    x.color_classes = vec![vec![0, 1], vec![1, 3]];
    assert_eq!(hyp_aut(&x).unwrap_err(), HypError::NotAPartition(4));
    let mut x = two_colors();
    x.hyperedges.push((vec![9], 1));
    assert!(matches!(hyp_aut(&x), Err(HypError::VertexOutOfRange { index: 3, vertex: 9 })));
}

#[test]
fn json_round_trip() {
    let x = two_colors();
    let text = x.to_json();
    assert!(text.contains("\"(1 2)\""));
    assert_eq!(ColoredMultiHypergraph::from_json(&text).unwrap(), x);
    assert!(ColoredMultiHypergraph::from_json("{\"vertex_count\": 1}").is_err());
}

fn check_against_oracle(x: &ColoredMultiHypergraph) -> Result<(), TestCaseError> {
    let sol = solve(x).unwrap();
    let brute = brute_hyp_aut(x).unwrap();
    prop_assert_eq!(sol.order.clone(), BigUint::from(brute.len()));
    let group = PermutationGroup::new(x.vertex_count, &sol.generators).unwrap();
    for p in &brute {
        prop_assert!(group.contains(p));
    }
    for (g, factors) in sol.generators.iter().zip(sol.generator_factors()) {
        prop_assert!(brute.binary_search_by(|q| q.images().cmp(g.images())).is_ok());
        for (c, f) in factors.iter().enumerate() {
            prop_assert!(*f < x.listed_groups[c].len());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn agrees_with_product_filter(seed in any::<u64>()) {
        let x = random_hypergraph(&mut ChaCha8Rng::seed_from_u64(seed), 3, 5, 24);
        check_against_oracle(&x)?;
    }
}

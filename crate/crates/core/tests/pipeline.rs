use eigeniso::graph::Graph;
use eigeniso::pipeline::{automorphism_group, Config};
use num_bigint::BigUint;

fn cube() -> Graph {
    let edges = (0..8usize)
        .flat_map(|a| (0..3).map(move |k| (a, a ^ (1 << k))))
        .filter(|(a, b)| a < b);
    Graph::new(8, edges).unwrap()
}

#[test]
fn cube_and_two_pentagons() {
    let config = Config::default();
    let r = automorphism_group(&cube(), &config).unwrap();
    assert_eq!(r.order, BigUint::from(48u32));
    assert!(r.verified);
    let two = Graph::cycle(5).disjoint_union(&Graph::cycle(5));
    assert_eq!(automorphism_group(&two, &config).unwrap().order, BigUint::from(200u32));
}

#[test]
fn generators_are_automorphisms() {
    let g = cube();
    let r = automorphism_group(&g, &Config::default()).unwrap();
    assert!(r.group.generators().iter().all(|p| g.is_automorphism(p)));
}

// two Petersen copies: eigenspaces of multiplicity 10 and 8, geometric groups of order 28800
#[test]
fn doubled_petersen() {
    let g = Graph::petersen().disjoint_union(&Graph::petersen());
    let r = automorphism_group(&g, &Config::default()).unwrap();
    assert_eq!(r.order, BigUint::from(120u32 * 120 * 2));
    assert!(r.verified);
}

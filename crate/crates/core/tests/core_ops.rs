mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use ualg::catalog;
use ualg::commutator::{centralizer, commutator, higher_commutator, is_nilpotent};
use ualg::congruence::{cg, con_lattice, covers, join, monolith};
use ualg::hom::{find_isomorphism, hs_closure, quotient};
use ualg::partition::relcompose;
use ualg::subuniverse::{generate_subuniverse, Closure};
use ualg::{FiniteAlgebra, Limits, Partition, Signature};

fn random_algebra(size: usize, tables: (Vec<u32>, Vec<u32>)) -> FiniteAlgebra {
    let sig = Signature::from_pairs(&[("*", 2), ("u", 1)]).unwrap();
    let n = size as u32;
    let bin = tables.0.iter().take(size * size).map(|v| v % n).collect();
    let un = tables.1.iter().take(size).map(|v| v % n).collect();
    FiniteAlgebra::new("R", size, sig, vec![bin, un]).unwrap()
}

fn algebra_strategy(max: usize) -> impl Strategy<Value = FiniteAlgebra> {
    (2..=max).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec(0u32..16, n * n),
            proptest::collection::vec(0u32..16, n),
        )
            .prop_map(|(n, b, u)| random_algebra(n, (b, u)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn congruence_lattice_matches_brute_force(a in algebra_strategy(4)) {
        let fast: BTreeSet<Partition> = con_lattice(&a, &Limits::default()).unwrap().into_iter().collect();
        prop_assert_eq!(fast, common::congruences_naive(&a));
    }

    #[test]
    fn generated_congruence_is_least(a in algebra_strategy(4), x in 0u32..4, y in 0u32..4) {
        let n = a.size() as u32;
        let (x, y) = (x % n, y % n);
        let c = cg(&a, &[(x, y)]).unwrap();
        prop_assert!(a.is_congruence(&c));
        prop_assert!(c.related(x, y));
        for d in common::congruences_naive(&a) {
            if d.related(x, y) {
                prop_assert!(c.leq(&d));
            }
        }
    }

    #[test]
    fn closure_matches_naive(a in algebra_strategy(3), g1 in 0u32..3, g2 in 0u32..3, g3 in 0u32..3) {
        let n = a.size() as u32;
        let gens = vec![vec![g1 % n, g2 % n], vec![g3 % n, g1 % n]];
        let fast = generate_subuniverse(&[&a, &a], &gens, &Limits::default()).unwrap();
        let naive: Vec<Vec<u32>> = common::closure_naive(&[&a, &a], &gens).into_iter().collect();
        prop_assert_eq!(fast.tuples(), naive.as_slice());
    }

    #[test]
    fn packed_boolean_closure_matches_tracked(
        a in algebra_strategy(2),
        width in 1usize..=40,
        bits in proptest::collection::vec(any::<u64>(), 1..=3),
        target_bits in any::<u64>(),
    ) {
        let comps = vec![&a; width];
        let gens: Vec<Vec<u32>> = bits.iter().map(|b| (0..width).map(|c| (b >> c & 1) as u32).collect()).collect();
        let target: Vec<u32> = (0..width).map(|c| (target_bits >> c & 1) as u32).collect();
        let cap = 1 << 20;
        let packed = Closure::run(&comps, &gens, cap, false, None).unwrap().into_tuple_set(&comps);
        let tracked = Closure::run(&comps, &gens, cap, true, None).unwrap().into_tuple_set(&comps);
        prop_assert_eq!(&packed, &tracked);
        let hit = Closure::run(&comps, &gens, cap, false, Some(&target)).unwrap();
        prop_assert_eq!(hit.found.is_some(), tracked.contains(&target));
        if let Some(i) = hit.found {
            prop_assert_eq!(hit.get(i as usize), target.as_slice());
        }
    }

    #[test]
    fn isomorphism_search_matches_permutation_scan(a in algebra_strategy(4), seed in 0usize..24) {
        let n = a.size();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            perm.swap(i, s % (i + 1));
            s /= i + 1;
        }
        let mut inv = vec![0u32; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        let b = FiniteAlgebra::from_fn("Rp", n, a.signature().clone(), |op, args| {
            let pre: Vec<u32> = args.iter().map(|&x| inv[x as usize]).collect();
            perm[a.apply(op, &pre) as usize]
        }).unwrap();
        let found = find_isomorphism(&a, &b);
        prop_assert_eq!(&found, &common::isomorphism_naive(&a, &b));
        let f = found.unwrap();
        prop_assert!(a.is_homomorphism(&f, &b));
    }

    #[test]
    fn binary_commutator_matches_term_condition(a in algebra_strategy(3)) {
        let cons: Vec<Partition> = con_lattice(&a, &Limits::default()).unwrap();
        for x in &cons {
            for y in &cons {
                let fast = commutator(&a, x, y, &Limits::default()).unwrap();
                prop_assert_eq!(&fast, &common::commutator_naive(&a, &[x.clone(), y.clone()]));
                prop_assert!(fast.leq(y));
            }
        }
    }

    #[test]
    fn ternary_commutator_matches_term_condition(a in algebra_strategy(2)) {
        let cons: Vec<Partition> = con_lattice(&a, &Limits::default()).unwrap();
        for x in &cons {
            for y in &cons {
                let args = vec![x.clone(), y.clone(), Partition::total(a.size())];
                let fast = higher_commutator(&a, &args, &Limits::default()).unwrap();
                prop_assert_eq!(fast, common::commutator_naive(&a, &args));
            }
        }
    }

    #[test]
    fn quotient_map_is_homomorphism(a in algebra_strategy(4)) {
        for theta in con_lattice(&a, &Limits::default()).unwrap() {
            let (q, nat) = quotient(&a, &theta).unwrap();
            prop_assert!(a.is_homomorphism(&nat, &q));
            prop_assert_eq!(q.size(), theta.num_classes());
        }
    }
}

#[test]
fn klein_group_has_five_congruences() {
    let cons = con_lattice(&catalog::klein(), &Limits::default()).unwrap();
    assert_eq!(cons.len(), 5);
    assert!(monolith(&catalog::klein(), &Limits::default()).unwrap().is_none());
    let top = cons.len() - 1;
    let atoms: Vec<_> = covers(&cons).into_iter().filter(|&(i, _)| i == 0).collect();
    assert_eq!(atoms.len(), 3);
    assert!(covers(&cons).contains(&(1, top)));
}

#[test]
fn z2_cube_closure() {
    let z = catalog::z2();
    let gens = vec![vec![1, 1, 0], vec![0, 1, 1]];
    let s = generate_subuniverse(&[&z, &z, &z], &gens, &Limits::default()).unwrap();
    assert_eq!(s.len(), 4);
}

#[test]
fn isomorphism_examples() {
    let z4 = catalog::z4g();
    assert_eq!(find_isomorphism(&z4, &z4), Some(vec![0, 1, 2, 3]));
    let xor = catalog::two_element_binary(0b0110);
    assert!(find_isomorphism(&xor, &catalog::a2()).is_none());
}

#[test]
fn hs_closure_of_z2() {
    let hs = hs_closure(&[catalog::z2()], &Limits::default()).unwrap();
    let sizes: Vec<usize> = hs.iter().map(|a| a.size()).collect();
    assert_eq!(sizes, vec![1, 2]);
}

#[test]
fn join_agrees_with_equivalence_join() {
    let k = catalog::klein();
    let cons = con_lattice(&k, &Limits::default()).unwrap();
    for a in &cons {
        for b in &cons {
            assert_eq!(join(&k, a, b).unwrap(), a.join(b));
        }
    }
}

#[test]
fn relational_product_examples() {
    let a = Partition::parse(4, "01|23").unwrap();
    let b = Partition::parse(4, "02|13").unwrap();
    // Klein congruences permute
    assert_eq!(relcompose(&a, &b, 2), relcompose(&b, &a, 2));
    assert_eq!(relcompose(&a, &b, 2).len(), 16);
}

#[test]
fn named_commutator_values() {
    let l = Limits::default();
    let z2 = catalog::z2();
    let one2 = Partition::total(2);
    assert!(commutator(&z2, &one2, &one2, &l).unwrap().is_identity());
    let a2 = catalog::a2();
    assert!(commutator(&a2, &one2, &one2, &l).unwrap().is_total());
    assert!(!is_nilpotent(&a2, &one2, &l).unwrap());
    let z4s = catalog::z4s();
    let mu = Partition::parse(4, "02|13").unwrap();
    assert!(centralizer(&z4s, &mu, &l).unwrap().is_total());
    let s3 = catalog::s3();
    let m = monolith(&s3, &l).unwrap().unwrap();
    assert_eq!(m.num_classes(), 2);
    assert_eq!(centralizer(&s3, &m, &l).unwrap(), m);
}

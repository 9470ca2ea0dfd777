mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use ualg::catalog;
use ualg::congruence::{con_lattice, covers};
use ualg::construct::{construct_c, star_congruence};
use ualg::tct::{classify_type, minimal_sets, prime_quotient_types, unary_polynomials};
use ualg::{Error, FiniteAlgebra, Limits, Partition, Signature, SortedHom};

fn random_algebra(size: usize, bin: Vec<u32>, un: Vec<u32>) -> FiniteAlgebra {
    let sig = Signature::from_pairs(&[("*", 2), ("u", 1)]).unwrap();
    let n = size as u32;
    let bin = bin.iter().take(size * size).map(|v| v % n).collect();
    let un = un.iter().take(size).map(|v| v % n).collect();
    FiniteAlgebra::new("R", size, sig, vec![bin, un]).unwrap()
}

fn algebra_strategy() -> impl Strategy<Value = FiniteAlgebra> {
    (2usize..=4).prop_flat_map(|n| {
        (
            proptest::collection::vec(0u32..16, n * n),
            proptest::collection::vec(0u32..16, n),
        )
            .prop_map(move |(b, u)| random_algebra(n, b, u))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unary_polynomials_match_naive(a in algebra_strategy()) {
        let fast: BTreeSet<Vec<u32>> = unary_polynomials(&a, &Limits::default()).unwrap().into_iter().collect();
        prop_assert_eq!(fast, common::unary_polynomials_naive(&a));
    }

    #[test]
    fn minimal_sets_match_naive(a in algebra_strategy()) {
        let l = Limits::default();
        let cons = con_lattice(&a, &l).unwrap();
        for (i, j) in covers(&cons) {
            let ms = minimal_sets(&a, &cons[i], &cons[j], &l).unwrap();
            let sets: BTreeSet<Vec<u32>> = ms.iter().map(|m| m.set.clone()).collect();
            prop_assert_eq!(&sets, &common::minimal_sets_naive(&a, &cons[i], &cons[j]));
            for m in &ms {
                let e = &m.idempotent;
                prop_assert!(e.iter().all(|&x| e[x as usize] == x));
                prop_assert!(m.traces.iter().all(|t| t.iter().any(|&u| t.iter().any(|&v| !cons[i].related(u, v)))));
            }
        }
    }

    #[test]
    fn every_covering_pair_gets_a_type(a in algebra_strategy()) {
        for (_, _, t) in prime_quotient_types(&a, &Limits::default()).unwrap() {
            prop_assert!((1..=5).contains(&t.kind));
            prop_assert_eq!(t.characteristic.is_some(), t.kind == 2);
        }
    }
}

#[test]
fn spec_examples() {
    let l = Limits::default();
    let (z, o) = (Partition::identity(2), Partition::total(2));
    let ms = minimal_sets(&catalog::z2(), &z, &o, &l).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].set, vec![0, 1]);
    assert_eq!(ms[0].traces, vec![vec![0, 1]]);
    let ms = minimal_sets(&catalog::a2(), &z, &o, &l).unwrap();
    assert_eq!(ms[0].set, vec![0, 1]);
    let t = classify_type(&catalog::z2(), &z, &o, &l).unwrap();
    assert_eq!((t.kind, t.characteristic), (2, Some(2)));
    assert_eq!(classify_type(&catalog::a2(), &z, &o, &l).unwrap().kind, 5);
    assert_eq!(classify_type(&catalog::lattice2(), &z, &o, &l).unwrap().kind, 4);
}

#[test]
fn z4g_bottom_cover_has_two_traces() {
    let l = Limits::default();
    let mu = Partition::parse(4, "02|13").unwrap();
    let ms = minimal_sets(&catalog::z4g(), &Partition::identity(4), &mu, &l).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].set, vec![0, 1, 2, 3]);
    assert_eq!(ms[0].traces, vec![vec![0, 2], vec![1, 3]]);
    let t = classify_type(&catalog::z4g(), &Partition::identity(4), &mu, &l).unwrap();
    assert_eq!((t.kind, t.characteristic), (2, Some(2)));
}

#[test]
fn z3_has_characteristic_three_and_s3_mixes_types() {
    let l = Limits::default();
    let t = classify_type(&catalog::cyclic(3), &Partition::identity(3), &Partition::total(3), &l).unwrap();
    assert_eq!((t.kind, t.characteristic), (2, Some(3)));
    let types: Vec<(u8, Option<u32>)> = prime_quotient_types(&catalog::s3(), &l)
        .unwrap()
        .into_iter()
        .map(|(_, _, t)| (t.kind, t.characteristic))
        .collect();
    assert_eq!(types, vec![(2, Some(3)), (2, Some(2))]);
}

#[test]
fn size_cap_is_enforced() {
    let l = Limits {
        unary_poly_max_size: 3,
        ..Limits::default()
    };
    assert!(matches!(unary_polynomials(&catalog::z4g(), &l), Err(Error::CapExceeded { .. })));
}

/// For a trace `N` of `A` inside sort `i0`, the columns with entry from
/// `U ∩ D^(i0)` in sort `i0` and fixed entries elsewhere form a minimal set
/// of the constructed algebra for the starred pair.
#[test]
fn traces_correspond_to_minimal_sets_of_the_construction() {
    let l = Limits::default();
    let mut checked = 0;
    for (a, alpha, c) in common::corpus_constructions(&l) {
        let cons = con_lattice(&a, &l).unwrap();
        for (i, j) in covers(&cons) {
            let (d, t) = (&cons[i], &cons[j]);
            if !t.leq(&alpha) {
                continue;
            }
            let ds = star_congruence(&c, d).unwrap();
            let ts = star_congruence(&c, t).unwrap();
            let ours = minimal_sets(c.algebra(), &ds, &ts, &l).unwrap();
            let sets: BTreeSet<Vec<u32>> = ours.iter().map(|m| m.set.clone()).collect();
            let theirs = minimal_sets(&a, d, t, &l).unwrap();
            for m in &theirs {
                let Some(trace) = m.traces.first() else { continue };
                let i0 = c.layout().sort_of(trace[0]);
                let in_sort: Vec<u32> = m.set.iter().copied().filter(|&u| c.layout().sort_of(u) == i0).collect();
                let fixed: Vec<u32> = c.layout().sorts().iter().map(|s| s[0]).collect();
                let mut lifted: Vec<u32> = in_sort
                    .iter()
                    .map(|&u| {
                        let mut col = fixed.clone();
                        col[i0 as usize] = u;
                        c.encode(&col).unwrap()
                    })
                    .collect();
                lifted.sort();
                assert!(sets.contains(&lifted), "{} alpha={alpha}: {lifted:?} is not minimal for ({d},{t})", a.name());
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn type_is_preserved_by_the_construction_with_explicit_map() {
    let l = Limits::default();
    let z = catalog::z4g();
    let alpha = Partition::parse(4, "02|13").unwrap();
    let c = construct_c(&SortedHom::natural(&z, &alpha).unwrap(), &l).unwrap();
    let ds = star_congruence(&c, &Partition::identity(4)).unwrap();
    let ts = star_congruence(&c, &alpha).unwrap();
    let t = classify_type(c.algebra(), &ds, &ts, &l).unwrap();
    assert_eq!((t.kind, t.characteristic), (2, Some(2)));
}

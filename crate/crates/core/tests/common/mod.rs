#![allow(dead_code)]
//! Brute-force reference implementations used only by tests.

use std::collections::BTreeSet;

use ualg::{FiniteAlgebra, Partition};

/// Every tuple in `{0..n-1}^k`, last coordinate fastest.
pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for v in 0..n as u32 {
                let mut u = t.clone();
                u.push(v);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Every set partition of `{0..n-1}`.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn rec(i: usize, n: usize, labels: &mut Vec<u32>, next: u32, out: &mut Vec<Partition>) {
        if i == n {
            out.push(Partition::from_labels(labels).unwrap());
            return;
        }
        for l in 0..=next {
            labels.push(l);
            rec(i + 1, n, labels, if l == next { next + 1 } else { next }, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Compatibility checked on all pairs of related argument tuples.
pub fn is_congruence_naive(alg: &FiniteAlgebra, p: &Partition) -> bool {
    let n = alg.size();
    for op in 0..alg.signature().len() {
        let k = alg.signature().arity(op);
        let tuples = all_tuples(n, k);
        for x in &tuples {
            for y in &tuples {
                if x.iter().zip(y).all(|(&a, &b)| p.related(a, b))
                    && !p.related(alg.apply(op, x), alg.apply(op, y))
                {
                    return false;
                }
            }
        }
    }
    true
}

pub fn congruences_naive(alg: &FiniteAlgebra) -> BTreeSet<Partition> {
    all_partitions(alg.size())
        .into_iter()
        .filter(|p| is_congruence_naive(alg, p))
        .collect()
}

/// Naive closure: apply every operation to every tuple of the current set until stable.
pub fn closure_naive(comps: &[&FiniteAlgebra], gens: &[Vec<u32>]) -> BTreeSet<Vec<u32>> {
    let mut set: BTreeSet<Vec<u32>> = gens.iter().cloned().collect();
    let sig = comps[0].signature();
    loop {
        let elems: Vec<Vec<u32>> = set.iter().cloned().collect();
        let before = set.len();
        for op in 0..sig.len() {
            let k = sig.arity(op);
            for idx in all_tuples(elems.len(), k) {
                let out: Vec<u32> = (0..comps.len())
                    .map(|c| {
                        let args: Vec<u32> = idx.iter().map(|&i| elems[i as usize][c]).collect();
                        comps[c].apply(op, &args)
                    })
                    .collect();
                set.insert(out);
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Higher commutator by testing every congruence against the term condition.
pub fn commutator_naive(alg: &FiniteAlgebra, betas: &[Partition]) -> Partition {
    let k = betas.len();
    let w = 1usize << k;
    let mut gens = Vec::new();
    for (j, b) in betas.iter().enumerate() {
        for (a0, a1) in all_tuples(alg.size(), 2).iter().map(|t| (t[0], t[1])) {
            if b.related(a0, a1) {
                gens.push(
                    (0..w)
                        .map(|e| if (e >> (k - 1 - j)) & 1 == 1 { a1 } else { a0 })
                        .collect(),
                );
            }
        }
    }
    let comps = vec![alg; w];
    let m = closure_naive(&comps, &gens);
    let ok = |g: &Partition| {
        m.iter().all(|f| {
            let premise = (0..w / 2 - 1).all(|e| g.related(f[2 * e], f[2 * e + 1]));
            !premise || g.related(f[w - 2], f[w - 1])
        })
    };
    let good: Vec<Partition> = congruences_naive(alg).into_iter().filter(|g| ok(g)).collect();
    let least = good.iter().fold(Partition::total(alg.size()), |acc, g| acc.meet(g));
    assert!(good.contains(&least), "term-condition congruences have no least element");
    least
}

/// Isomorphism by trying every permutation in lexicographic order.
pub fn isomorphism_naive(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Vec<u32>> {
    if a.size() != b.size() || a.signature() != b.signature() {
        return None;
    }
    let n = a.size();
    let mut perm: Vec<u32> = (0..n as u32).collect();
    loop {
        if a.is_homomorphism(&perm, b) {
            return Some(perm);
        }
        // next lexicographic permutation
        let i = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1])?;
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Unary polynomial functions as the subuniverse of `A^A` generated by the
/// identity and the constants.
pub fn unary_polynomials_naive(alg: &FiniteAlgebra) -> BTreeSet<Vec<u32>> {
    let n = alg.size();
    let mut gens: Vec<Vec<u32>> = vec![(0..n as u32).collect()];
    for c in 0..n as u32 {
        gens.push(vec![c; n]);
    }
    let comps = vec![alg; n];
    closure_naive(&comps, &gens)
}

/// Inclusion-minimal images `p(A)` over unary polynomials with `p(theta)` not in `delta`.
pub fn minimal_sets_naive(alg: &FiniteAlgebra, delta: &Partition, theta: &Partition) -> BTreeSet<Vec<u32>> {
    let polys = unary_polynomials_naive(alg);
    let n = alg.size() as u32;
    let mut images: BTreeSet<Vec<u32>> = BTreeSet::new();
    for p in &polys {
        let separates = (0..n).any(|x| {
            (0..n).any(|y| theta.related(x, y) && !delta.related(p[x as usize], p[y as usize]))
        });
        if separates {
            let img: BTreeSet<u32> = p.iter().copied().collect();
            images.insert(img.into_iter().collect());
        }
    }
    let all: Vec<Vec<u32>> = images.iter().cloned().collect();
    images
        .into_iter()
        .filter(|u| {
            !all.iter()
                .any(|v| v.len() < u.len() && v.iter().all(|x| u.contains(x)))
        })
        .collect()
}

/// The two-element binary algebras, `Z4g`, `Z4s`, the Klein group and `A2`.
pub fn corpus() -> Vec<FiniteAlgebra> {
    use ualg::catalog;
    let mut out = catalog::all_two_element_binary();
    out.extend([catalog::z4g(), catalog::z4s(), catalog::klein(), catalog::a2()]);
    out
}

/// `C(A, A -> A/alpha)` for every corpus algebra and congruence with at most three classes.
pub fn corpus_constructions(
    limits: &ualg::Limits,
) -> Vec<(FiniteAlgebra, Partition, ualg::construct::ConstructedAlgebra)> {
    let mut out = Vec::new();
    for a in corpus() {
        for alpha in ualg::congruence::con_lattice(&a, limits).unwrap() {
            if alpha.num_classes() > 3 {
                continue;
            }
            let chi = ualg::SortedHom::natural(&a, &alpha).unwrap();
            let c = ualg::construct::construct_c(&chi, limits).unwrap();
            out.push((a.clone(), alpha, c));
        }
    }
    out
}

/// Random term of depth at most `depth` over `sig` in variables `0..vars`.
pub fn random_term(rng: &mut impl rand::Rng, sig: &ualg::Signature, vars: usize, depth: usize) -> ualg::Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return ualg::Term::var(rng.gen_range(0..vars));
    }
    let op = rng.gen_range(0..sig.len());
    let args = (0..sig.arity(op))
        .map(|_| random_term(rng, sig, vars, depth - 1))
        .collect();
    ualg::Term::app(sig.name(op), args)
}

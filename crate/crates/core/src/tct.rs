//! Unary polynomials, minimal sets, traces and the type of a prime quotient.

use serde::Serialize;

use crate::algebra::{FiniteAlgebra, Signature, Symbol};
use crate::commutator::commutator;
use crate::congruence::{con_lattice, covers, is_covering};
use crate::error::{cap, Error, Result};
use crate::limits::Limits;
use crate::partition::Partition;
use crate::subuniverse::Closure;
use crate::supernil::{has_maltsev_term, prime_power};

/// All unary polynomial functions, sorted, as value vectors: the subuniverse
/// of `A^A` generated by the identity and the constant maps.
pub fn unary_polynomials(alg: &FiniteAlgebra, limits: &Limits) -> Result<Vec<Vec<u32>>> {
    let n = alg.size();
    if n > limits.unary_poly_max_size {
        return Err(cap(
            "unary polynomial enumeration (algebra size)",
            n as u128,
            limits.unary_poly_max_size as u128,
        ));
    }
    let mut gens: Vec<Vec<u32>> = vec![(0..n as u32).collect()];
    for c in 0..n as u32 {
        gens.push(vec![c; n]);
    }
    gens.dedup();
    let comps = vec![alg; n];
    let cl = Closure::run(&comps, &gens, limits.closure_cap, false, None)?;
    let mut all: Vec<Vec<u32>> = (0..cl.len()).map(|i| cl.get(i).to_vec()).collect();
    all.sort();
    Ok(all)
}

/// A `(delta, theta)`-minimal set with its traces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalSet {
    pub idempotent: Vec<u32>,
    pub set: Vec<u32>,
    pub traces: Vec<Vec<u32>>,
    pub body: Vec<u32>,
    pub tail: Vec<u32>,
}

fn separates(set: &[u32], delta: &Partition, theta: &Partition) -> bool {
    set.iter()
        .any(|&u| set.iter().any(|&v| theta.related(u, v) && !delta.related(u, v)))
}

fn check_cover(alg: &FiniteAlgebra, delta: &Partition, theta: &Partition, limits: &Limits) -> Result<()> {
    alg.ensure_congruence(delta)?;
    alg.ensure_congruence(theta)?;
    let cons = con_lattice(alg, limits)?;
    if !is_covering(&cons, delta, theta) {
        return Err(Error::Precondition(format!("{delta} is not covered by {theta}")));
    }
    Ok(())
}

/// All `(delta, theta)`-minimal sets, sorted by the set.
pub fn minimal_sets(
    alg: &FiniteAlgebra,
    delta: &Partition,
    theta: &Partition,
    limits: &Limits,
) -> Result<Vec<MinimalSet>> {
    check_cover(alg, delta, theta, limits)?;
    let polys = unary_polynomials(alg, limits)?;
    let mut candidates: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for e in &polys {
        if e.iter().any(|&x| e[x as usize] != x) {
            continue;
        }
        let mut img = e.clone();
        img.sort();
        img.dedup();
        if separates(&img, delta, theta) && !candidates.iter().any(|(u, _)| *u == img) {
            candidates.push((img, e.clone()));
        }
    }
    let mut out: Vec<MinimalSet> = candidates
        .iter()
        .filter(|(u, _)| {
            !candidates
                .iter()
                .any(|(v, _)| v.len() < u.len() && v.iter().all(|x| u.binary_search(x).is_ok()))
        })
        .map(|(u, e)| {
            let mut traces: Vec<Vec<u32>> = Vec::new();
            for &a in u {
                if traces.iter().any(|t| t.contains(&a)) {
                    continue;
                }
                let n: Vec<u32> = u.iter().copied().filter(|&b| theta.related(a, b)).collect();
                if separates(&n, delta, theta) {
                    traces.push(n);
                }
            }
            let mut body: Vec<u32> = traces.concat();
            body.sort();
            let tail = u.iter().copied().filter(|x| body.binary_search(x).is_err()).collect();
            MinimalSet {
                idempotent: e.clone(),
                set: u.clone(),
                traces,
                body,
                tail,
            }
        })
        .collect();
    out.sort_by(|a, b| a.set.cmp(&b.set));
    Ok(out)
}

/// Type of a prime quotient, with the characteristic for type 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TctType {
    pub kind: u8,
    pub characteristic: Option<u32>,
    pub trace: Vec<u32>,
    pub minimal_set: Vec<u32>,
}

/// The minimal algebra on the `delta`-classes of a trace, carrying every
/// binary polynomial of `alg` that maps the trace into itself.
pub fn induced_minimal_algebra(
    alg: &FiniteAlgebra,
    delta: &Partition,
    trace: &[u32],
    limits: &Limits,
) -> Result<FiniteAlgebra> {
    let t = trace.len();
    let coords: Vec<(u32, u32)> = trace
        .iter()
        .flat_map(|&u| trace.iter().map(move |&v| (u, v)))
        .collect();
    let mut gens: Vec<Vec<u32>> = vec![
        coords.iter().map(|p| p.0).collect(),
        coords.iter().map(|p| p.1).collect(),
    ];
    for c in 0..alg.size() as u32 {
        gens.push(vec![c; coords.len()]);
    }
    let comps = vec![alg; coords.len()];
    let cl = Closure::run(&comps, &gens, limits.closure_cap, false, None)?;
    let mut classes: Vec<u32> = Vec::new();
    let mut class_of = vec![u32::MAX; alg.size()];
    for &u in trace {
        let l = delta.label(u);
        let idx = match classes.iter().position(|&c| c == l) {
            Some(i) => i,
            None => {
                classes.push(l);
                classes.len() - 1
            }
        };
        class_of[u as usize] = idx as u32;
    }
    let reps: Vec<usize> = classes
        .iter()
        .map(|&l| trace.iter().position(|&u| delta.label(u) == l).unwrap())
        .collect();
    let s = classes.len();
    let mut tables: Vec<Vec<u32>> = Vec::new();
    let mut seen = rustc_hash::FxHashSet::default();
    for i in 0..cl.len() {
        let f = cl.get(i);
        if f.iter().any(|&v| class_of[v as usize] == u32::MAX) {
            continue;
        }
        let mut table = Vec::with_capacity(s * s);
        for &r1 in &reps {
            for &r2 in &reps {
                table.push(class_of[f[r1 * t + r2] as usize]);
            }
        }
        if seen.insert(table.clone()) {
            tables.push(table);
        }
    }
    let sig = Signature::new(
        (0..tables.len())
            .map(|i| Symbol {
                name: format!("p{i}"),
                arity: 2,
            })
            .collect(),
    )?;
    FiniteAlgebra::new(format!("{}|trace", alg.name()), s, sig, tables)
}

fn essentially_unary(table: &[u32], s: usize) -> bool {
    let dep_x = (0..s).any(|y| (0..s).any(|x| table[x * s + y] != table[y]));
    let dep_y = (0..s).any(|x| (0..s).any(|y| table[x * s + y] != table[x * s]));
    !(dep_x && dep_y)
}

/// Classifies a covering pair `delta < theta` into types 1 to 5.
pub fn classify_type(alg: &FiniteAlgebra, delta: &Partition, theta: &Partition, limits: &Limits) -> Result<TctType> {
    let ms = minimal_sets(alg, delta, theta, limits)?;
    let Some(u) = ms.first() else {
        return Err(Error::Inconsistency("covering pair without a minimal set".into()));
    };
    let Some(trace) = u.traces.first() else {
        return Err(Error::Inconsistency("minimal set without a trace".into()));
    };
    if trace.len() > limits.trace_max {
        return Err(cap("trace size", trace.len() as u128, limits.trace_max as u128));
    }
    let m = induced_minimal_algebra(alg, delta, trace, limits)?;
    let s = m.size();
    let result = |kind: u8, characteristic: Option<u32>| TctType {
        kind,
        characteristic,
        trace: trace.clone(),
        minimal_set: u.set.clone(),
    };
    if s < 2 {
        return Err(Error::Inconsistency("trace collapses under delta".into()));
    }
    if m.tables().iter().all(|t| essentially_unary(t, s)) {
        return Ok(result(1, None));
    }
    if has_maltsev_term(&m, limits)?.is_some() {
        let one = Partition::total(s);
        if commutator(&m, &one, &one, limits)?.is_identity() {
            let Some((p, _)) = prime_power(s as u64) else {
                return Err(Error::Inconsistency(format!("abelian minimal algebra of size {s}")));
            };
            return Ok(result(2, Some(p as u32)));
        }
        return Ok(result(3, None));
    }
    if s != 2 {
        return Err(Error::Inconsistency(format!(
            "non-unary minimal algebra of size {s} without a Maltsev polynomial"
        )));
    }
    let has_meet = m.tables().iter().any(|t| t == &[0, 0, 0, 1]);
    let has_join = m.tables().iter().any(|t| t == &[0, 1, 1, 1]);
    match (has_meet, has_join) {
        (true, true) => Ok(result(4, None)),
        (true, false) | (false, true) => Ok(result(5, None)),
        _ => Err(Error::Inconsistency("two-element minimal algebra fits no type".into())),
    }
}

/// Type of every covering pair of `Con(alg)`.
pub fn prime_quotient_types(alg: &FiniteAlgebra, limits: &Limits) -> Result<Vec<(Partition, Partition, TctType)>> {
    let cons = con_lattice(alg, limits)?;
    covers(&cons)
        .into_iter()
        .map(|(i, j)| {
            let t = classify_type(alg, &cons[i], &cons[j], limits)?;
            Ok((cons[i].clone(), cons[j].clone(), t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn unary_polynomial_counts() {
        let l = Limits::default();
        assert_eq!(unary_polynomials(&catalog::z2(), &l).unwrap().len(), 4);
        assert_eq!(unary_polynomials(&catalog::z4g(), &l).unwrap().len(), 16);
        let trivial = FiniteAlgebra::new("T", 1, catalog::z2().signature().clone(), vec![vec![0], vec![0]]).unwrap();
        assert_eq!(unary_polynomials(&trivial, &l).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn two_element_types() {
        let l = Limits::default();
        let (z, o) = (Partition::identity(2), Partition::total(2));
        let t = classify_type(&catalog::z2(), &z, &o, &l).unwrap();
        assert_eq!((t.kind, t.characteristic), (2, Some(2)));
        assert_eq!(classify_type(&catalog::a2(), &z, &o, &l).unwrap().kind, 5);
        assert_eq!(classify_type(&catalog::lattice2(), &z, &o, &l).unwrap().kind, 4);
        // NAND is primal
        assert_eq!(classify_type(&catalog::two_element_binary(0b0111), &z, &o, &l).unwrap().kind, 3);
        // first projection
        assert_eq!(classify_type(&catalog::two_element_binary(0b1100), &z, &o, &l).unwrap().kind, 1);
    }

    #[test]
    fn rejects_non_covering_pair() {
        let l = Limits::default();
        let err = minimal_sets(&catalog::z4g(), &Partition::identity(4), &Partition::total(4), &l).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}

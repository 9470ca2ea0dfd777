use crate::algebra::{checked_pow, increment, FiniteAlgebra};
use crate::error::{cap, Error, Result};
use crate::limits::Limits;
use crate::partition::{Partition, UnionFind};

/// Congruence generated by the given pairs.
///
/// Union-find closed under basic translations: each merged edge is pushed
/// through every operation at every argument slot with constants elsewhere.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(u32, u32)]) -> Result<Partition> {
    let n = alg.size();
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a as usize >= n || b as usize >= n) {
        return Err(Error::Precondition(format!("pair ({a},{b}) outside 0..{n}")));
    }
    Ok(cg_from(alg, &Partition::identity(n), pairs))
}

/// Congruence generated by `base` together with extra pairs; `base` must be a congruence.
pub(crate) fn cg_from(alg: &FiniteAlgebra, base: &Partition, pairs: &[(u32, u32)]) -> Partition {
    let n = alg.size() as u32;
    let mut uf = UnionFind::from_partition(base);
    let mut queue: Vec<(u32, u32)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            queue.push((a, b));
        }
    }
    let sig = alg.signature();
    let mut args = Vec::new();
    let mut rest = Vec::new();
    while let Some((a, b)) = queue.pop() {
        for op in 0..sig.len() {
            let k = sig.arity(op);
            for pos in 0..k {
                rest.clear();
                rest.resize(k - 1, 0u32);
                loop {
                    args.clear();
                    args.extend_from_slice(&rest[..pos]);
                    args.push(a);
                    args.extend_from_slice(&rest[pos..]);
                    let x = alg.apply(op, &args);
                    args[pos] = b;
                    let y = alg.apply(op, &args);
                    if uf.union(x, y) {
                        queue.push((x, y));
                    }
                    if !increment(&mut rest, n) {
                        break;
                    }
                }
            }
        }
    }
    uf.partition()
}

pub fn principal(alg: &FiniteAlgebra, a: u32, b: u32) -> Result<Partition> {
    cg(alg, &[(a, b)])
}

/// Join of congruences, computed as the congruence generated by their union.
pub fn join(alg: &FiniteAlgebra, p: &Partition, q: &Partition) -> Result<Partition> {
    let mut pairs = p.pairs();
    pairs.extend(q.pairs());
    cg(alg, &pairs)
}

pub fn meet(p: &Partition, q: &Partition) -> Partition {
    p.meet(q)
}

/// All congruences, sorted by number of related pairs then labels.
pub fn con_lattice(alg: &FiniteAlgebra, limits: &Limits) -> Result<Vec<Partition>> {
    let n = alg.size();
    let cost = checked_pow(n, 2).unwrap_or(usize::MAX);
    if cost > limits.table_cap {
        return Err(cap("principal congruences", cost as u128, limits.table_cap as u128));
    }
    let mut principals: Vec<Partition> = Vec::new();
    let mut seen = rustc_hash::FxHashSet::default();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            let p = cg_from(alg, &Partition::identity(n), &[(a, b)]);
            if seen.insert(p.clone()) {
                principals.push(p);
            }
        }
    }
    let mut all: Vec<Partition> = vec![Partition::identity(n)];
    seen.clear();
    seen.insert(all[0].clone());
    for p in &principals {
        if seen.insert(p.clone()) {
            all.push(p.clone());
        }
    }
    let mut i = 0;
    while i < all.len() {
        for p in &principals {
            let j = all[i].join(p);
            if seen.insert(j.clone()) {
                if all.len() >= limits.closure_cap {
                    return Err(cap("congruence lattice", all.len() as u128 + 1, limits.closure_cap as u128));
                }
                all.push(j);
            }
        }
        i += 1;
    }
    all.sort_by(|a, b| pair_count(a).cmp(&pair_count(b)).then_with(|| a.cmp(b)));
    Ok(all)
}

fn pair_count(p: &Partition) -> usize {
    p.blocks().iter().map(|b| b.len() * b.len()).sum()
}

/// Covering pairs `(i, j)` of indices into a sorted congruence list.
pub fn covers(cons: &[Partition]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..cons.len() {
        for j in 0..cons.len() {
            if i == j || !cons[i].leq(&cons[j]) {
                continue;
            }
            let between = (0..cons.len()).any(|k| {
                k != i && k != j && cons[i].leq(&cons[k]) && cons[k].leq(&cons[j])
            });
            if !between {
                out.push((i, j));
            }
        }
    }
    out
}

/// True when `lower < upper` with nothing strictly between in `Con(alg)`.
pub fn is_covering(cons: &[Partition], lower: &Partition, upper: &Partition) -> bool {
    lower != upper
        && lower.leq(upper)
        && !cons
            .iter()
            .any(|c| c != lower && c != upper && lower.leq(c) && c.leq(upper))
}

/// The unique atom of `Con(alg)`, if there is exactly one.
pub fn monolith(alg: &FiniteAlgebra, limits: &Limits) -> Result<Option<Partition>> {
    if alg.size() < 2 {
        return Ok(None);
    }
    let cons = con_lattice(alg, limits)?;
    let bottom = Partition::identity(alg.size());
    let atoms: Vec<&Partition> = cons
        .iter()
        .filter(|c| **c != bottom && is_covering(&cons, &bottom, c))
        .collect();
    Ok(if atoms.len() == 1 { Some(atoms[0].clone()) } else { None })
}

/// Congruences in the interval `[lower, upper]`.
pub fn interval(cons: &[Partition], lower: &Partition, upper: &Partition) -> Vec<Partition> {
    cons.iter()
        .filter(|c| lower.leq(c) && c.leq(upper))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    fn z4() -> FiniteAlgebra {
        let sig = Signature::from_pairs(&[("+", 2), ("-", 1)]).unwrap();
        FiniteAlgebra::from_fn("Z4g", 4, sig, |op, a| match op {
            0 => (a[0] + a[1]) % 4,
            _ => (4 - a[0]) % 4,
        })
        .unwrap()
    }

    #[test]
    fn z4_lattice_is_a_chain() {
        let cons = con_lattice(&z4(), &Limits::default()).unwrap();
        let s: Vec<String> = cons.iter().map(|c| c.to_string()).collect();
        assert_eq!(s, vec!["0|1|2|3", "02|13", "0123"]);
        assert_eq!(monolith(&z4(), &Limits::default()).unwrap().unwrap().to_string(), "02|13");
    }

    #[test]
    fn principal_congruences() {
        assert_eq!(principal(&z4(), 0, 2).unwrap().to_string(), "02|13");
        assert!(principal(&z4(), 0, 1).unwrap().is_total());
        assert!(cg(&z4(), &[(0, 7)]).is_err());
    }
}

//! Supernilpotence of a congruence via a factorization criterion, with an
//! independent cross-check on the constructed algebra.

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::commutator::is_nilpotent;
use crate::congruence::con_lattice;
use crate::construct::{construct_c, star_congruence};
use crate::error::{Error, Result};
use crate::hom::SortedHom;
use crate::limits::Limits;
use crate::partition::{relcompose, Partition};
use crate::subuniverse::Closure;
use crate::tct::prime_quotient_types;
use crate::term::Term;

/// `(p, e)` with `n = p^e`, `e >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && !n.is_multiple_of(p) {
        p += 1;
    }
    if !n.is_multiple_of(p) {
        p = n;
    }
    let mut e = 0;
    let mut r = n;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

/// Term `t(x0, x1, x2)` with `t(a,a,b) = b` and `t(a,b,b) = a`, if one exists.
pub fn has_maltsev_term(alg: &FiniteAlgebra, limits: &Limits) -> Result<Option<Term>> {
    let n = alg.size() as u32;
    let mut coords: Vec<[u32; 3]> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            coords.push([a, a, b]);
            coords.push([a, b, b]);
        }
    }
    coords.sort();
    coords.dedup();
    let gens: Vec<Vec<u32>> = (0..3).map(|p| coords.iter().map(|c| c[p]).collect()).collect();
    let target: Vec<u32> = coords.iter().map(|c| if c[0] == c[1] { c[2] } else { c[0] }).collect();
    let comps = vec![alg; coords.len()];
    let cl = Closure::run(&comps, &gens, limits.closure_cap, true, Some(&target))?;
    Ok(cl.found.map(|i| cl.witness(i as usize, alg.signature())))
}

/// Which part of the criterion rules out supernilpotence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SupernilFailure {
    Nilpotence,
    Meet,
    Permutability,
    PrimePower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub constructed_size: usize,
    pub nilpotent: bool,
    pub factors: Vec<Partition>,
    pub primes: Vec<u64>,
    pub supernilpotent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupernilCertificate {
    pub supernilpotent: bool,
    pub witnesses: Vec<Partition>,
    pub primes: Vec<u64>,
    pub failure: Option<SupernilFailure>,
    pub hypothesis_asserted: bool,
    pub cross_check: Option<CrossCheck>,
}

/// Prime `p` such that every block of `alpha/beta` has `p`-power size; `None`
/// when there is no such prime or `beta = alpha`.
fn block_prime(alpha: &Partition, beta: &Partition) -> Option<u64> {
    let mut prime = None;
    for block in alpha.blocks() {
        let inner = beta_classes_in(beta, &block);
        if inner == 1 {
            continue;
        }
        let (p, _) = prime_power(inner as u64)?;
        if prime.is_some_and(|q| q != p) {
            return None;
        }
        prime = Some(p);
    }
    prime
}

fn beta_classes_in(beta: &Partition, block: &[u32]) -> usize {
    let mut labels: Vec<u32> = block.iter().map(|&x| beta.label(x)).collect();
    labels.sort();
    labels.dedup();
    labels.len()
}

/// Shortest, then lexicographically first, ordered list of candidates with
/// meet equal to `bottom` and each prefix meet permuting with the next entry
/// to give `top`.
fn search_factorization(cands: &[Partition], bottom: &Partition, top: &Partition) -> Option<Vec<usize>> {
    let top_rel = top.as_relation();
    fn dfs(
        cands: &[Partition],
        bottom: &Partition,
        top_rel: &crate::partition::Relation,
        len: usize,
        chosen: &mut Vec<usize>,
        prefix: Option<Partition>,
    ) -> bool {
        if chosen.len() == len {
            return prefix.as_ref() == Some(bottom);
        }
        for i in 0..cands.len() {
            if chosen.contains(&i) {
                continue;
            }
            let next = match &prefix {
                None => cands[i].clone(),
                Some(p) => {
                    if relcompose(p, &cands[i], 2) != *top_rel || relcompose(&cands[i], p, 2) != *top_rel {
                        continue;
                    }
                    p.meet(&cands[i])
                }
            };
            chosen.push(i);
            if dfs(cands, bottom, top_rel, len, chosen, Some(next)) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    for len in 1..=cands.len() {
        let mut chosen = Vec::new();
        if dfs(cands, bottom, &top_rel, len, &mut chosen, None) {
            return Some(chosen);
        }
    }
    None
}

fn check_hypothesis(alg: &FiniteAlgebra, asserted: bool, limits: &Limits) -> Result<()> {
    match prime_quotient_types(alg, limits) {
        Ok(types) => {
            if let Some((d, t, _)) = types.iter().find(|(_, _, t)| t.kind == 1) {
                let msg = format!("prime quotient ({d}, {t}) of `{}` has type 1", alg.name());
                return Err(Error::Precondition(if asserted {
                    format!("omits-type-1 assertion contradicted: {msg}")
                } else {
                    format!("refusing a verdict: {msg}, and the variety is not asserted to omit type 1")
                }));
            }
            Ok(())
        }
        Err(Error::CapExceeded { .. }) if asserted => Ok(()),
        Err(e) => Err(e),
    }
}

/// Decides supernilpotence of `alpha` through the factorization criterion
/// that holds in varieties omitting type 1.
pub fn decide_supernilpotent(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    assert_omits_type1: bool,
    limits: &Limits,
) -> Result<SupernilCertificate> {
    alg.ensure_congruence(alpha)?;
    check_hypothesis(alg, assert_omits_type1, limits)?;
    let mut cert = SupernilCertificate {
        supernilpotent: true,
        witnesses: Vec::new(),
        primes: Vec::new(),
        failure: None,
        hypothesis_asserted: assert_omits_type1,
        cross_check: None,
    };
    if alpha.is_identity() {
        return Ok(cert);
    }
    let no = |mut cert: SupernilCertificate, f: SupernilFailure| {
        cert.supernilpotent = false;
        cert.failure = Some(f);
        Ok(cert)
    };
    if !is_nilpotent(alg, alpha, limits)? {
        return no(cert, SupernilFailure::Nilpotence);
    }
    let bottom = Partition::identity(alg.size());
    let mut cands = Vec::new();
    let mut primes = Vec::new();
    for beta in con_lattice(alg, limits)? {
        if !beta.leq(alpha) || beta == *alpha {
            continue;
        }
        if let Some(p) = block_prime(alpha, &beta) {
            cands.push(beta);
            primes.push(p);
        }
    }
    if cands.is_empty() {
        return no(cert, SupernilFailure::PrimePower);
    }
    match search_factorization(&cands, &bottom, alpha) {
        Some(list) => {
            cert.witnesses = list.iter().map(|&i| cands[i].clone()).collect();
            cert.primes = list.iter().map(|&i| primes[i]).collect();
            verify_witnesses(alpha, &cert)?;
            Ok(cert)
        }
        None => {
            let meet = cands.iter().fold(alpha.clone(), |acc, c| acc.meet(c));
            if meet != bottom {
                no(cert, SupernilFailure::Meet)
            } else {
                no(cert, SupernilFailure::Permutability)
            }
        }
    }
}

/// Re-checks a yes-certificate against the three conditions.
pub fn verify_witnesses(alpha: &Partition, cert: &SupernilCertificate) -> Result<()> {
    let n = alpha.size();
    let ws = &cert.witnesses;
    let meet = ws.iter().fold(alpha.clone(), |acc, w| acc.meet(w));
    if !meet.is_identity() {
        return Err(Error::Inconsistency("witness meet is not the identity".into()));
    }
    let top = alpha.as_relation();
    for i in 1..ws.len() {
        let prefix = ws[..i].iter().fold(Partition::total(n), |acc, w| acc.meet(w));
        if relcompose(&prefix, &ws[i], 2) != top || relcompose(&ws[i], &prefix, 2) != top {
            return Err(Error::Inconsistency(format!("witness {i} does not permute to alpha")));
        }
    }
    for (w, &p) in ws.iter().zip(&cert.primes) {
        if block_prime(alpha, w) != Some(p) {
            return Err(Error::Inconsistency(format!("blocks of alpha/{w} are not {p}-powers")));
        }
    }
    Ok(())
}

/// Repeats the decision on `C(A, A -> A/alpha)` and compares verdicts.
pub fn cross_check_via_c(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    assert_omits_type1: bool,
    limits: &Limits,
) -> Result<SupernilCertificate> {
    let mut cert = decide_supernilpotent(alg, alpha, assert_omits_type1, limits)?;
    let chi = SortedHom::natural(alg, alpha)?;
    let c = construct_c(&chi, limits)?;
    let ca = c.algebra();
    let size = ca.size();
    let total = Partition::total(size);
    let bottom = Partition::identity(size);
    if star_congruence(&c, alpha)? != total {
        return Err(Error::Inconsistency("alpha* is not the total congruence".into()));
    }
    let nilpotent = is_nilpotent(ca, &total, limits)?;
    let mut record = CrossCheck {
        constructed_size: size,
        nilpotent,
        factors: Vec::new(),
        primes: Vec::new(),
        supernilpotent: false,
    };
    if size == 1 {
        record.supernilpotent = true;
    } else if nilpotent {
        let mut cands = Vec::new();
        let mut primes = Vec::new();
        for g in con_lattice(ca, limits)? {
            if g.is_total() {
                continue;
            }
            if let Some((p, _)) = prime_power(g.num_classes() as u64) {
                cands.push(g);
                primes.push(p);
            }
        }
        if let Some(list) = search_factorization(&cands, &bottom, &total) {
            record.factors = list.iter().map(|&i| cands[i].clone()).collect();
            record.primes = list.iter().map(|&i| primes[i]).collect();
            record.supernilpotent = true;
        }
    }
    if record.supernilpotent != cert.supernilpotent {
        return Err(Error::Inconsistency(format!(
            "constructed-algebra factorization says {} but the direct criterion says {}",
            record.supernilpotent, cert.supernilpotent
        )));
    }
    cert.cross_check = Some(record);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn maltsev_terms() {
        let l = Limits::default();
        let t = has_maltsev_term(&catalog::z4g(), &l).unwrap().unwrap();
        let z = catalog::z4g();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(crate::term::eval_term(&z, &t, &[a, a, b]).unwrap(), b);
                assert_eq!(crate::term::eval_term(&z, &t, &[a, b, b]).unwrap(), a);
            }
        }
        assert!(has_maltsev_term(&catalog::a2(), &l).unwrap().is_none());
    }

    #[test]
    fn z4s_certificate() {
        let l = Limits::default();
        let cert = decide_supernilpotent(&catalog::z4s(), &Partition::total(4), true, &l).unwrap();
        assert!(cert.supernilpotent);
        assert_eq!(cert.witnesses, vec![Partition::identity(4)]);
        assert_eq!(cert.primes, vec![2]);
    }

    #[test]
    fn semilattice_is_not_nilpotent() {
        let l = Limits::default();
        let cert = decide_supernilpotent(&catalog::a2(), &Partition::total(2), false, &l).unwrap();
        assert!(!cert.supernilpotent);
        assert_eq!(cert.failure, Some(SupernilFailure::Nilpotence));
    }
}

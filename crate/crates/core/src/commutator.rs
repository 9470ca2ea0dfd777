use crate::algebra::FiniteAlgebra;
use crate::congruence::{cg_from, con_lattice};
use crate::error::{cap, Error, Result};
use crate::limits::Limits;
use crate::partition::Partition;
use crate::subuniverse::{Closure, TupleSet};

/// Bit of coordinate `j` (0-based, most significant first) in a cube vertex.
#[inline]
fn bit(eps: usize, j: usize, k: usize) -> usize {
    (eps >> (k - 1 - j)) & 1
}

fn check_arity(alg: &FiniteAlgebra, k: usize, limits: &Limits) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("commutator needs at least one congruence".into()));
    }
    if !limits.commutator_arity_allowed(k, alg.size()) {
        return Err(cap(
            format!("commutator arity for an algebra of size {}", alg.size()),
            k as u128,
            limits.max_commutator_arity as u128,
        ));
    }
    Ok(())
}

/// Labelings of the cube `{0,1}^k` constant on the faces of direction `j`
/// with values `a0` on `eps_j = 0` and `a1` on `eps_j = 1`, for `a0 beta_j a1`.
pub fn matrix_generators(betas: &[Partition]) -> Vec<Vec<u32>> {
    let k = betas.len();
    let w = 1usize << k;
    let mut gens = Vec::new();
    let mut seen = rustc_hash::FxHashSet::default();
    for (j, beta) in betas.iter().enumerate() {
        for a0 in 0..beta.size() as u32 {
            for a1 in 0..beta.size() as u32 {
                if !beta.related(a0, a1) {
                    continue;
                }
                let g: Vec<u32> = (0..w).map(|e| if bit(e, j, k) == 1 { a1 } else { a0 }).collect();
                if seen.insert(g.clone()) {
                    gens.push(g);
                }
            }
        }
    }
    gens
}

/// The matrix algebra `M(beta_1, ..., beta_k)` as a subuniverse of `A^(2^k)`.
pub fn matrix_algebra(alg: &FiniteAlgebra, betas: &[Partition], limits: &Limits) -> Result<TupleSet> {
    check_arity(alg, betas.len(), limits)?;
    for b in betas {
        alg.ensure_congruence(b)?;
    }
    let w = 1usize << betas.len();
    let comps = vec![alg; w];
    let gens = matrix_generators(betas);
    Ok(Closure::run(&comps, &gens, limits.closure_cap, false, None)?.into_tuple_set(&comps))
}

/// Higher commutator `[beta_1, ..., beta_k]`.
///
/// Least congruence `gamma` such that for every `f` in the matrix algebra,
/// if `f(eps 0) gamma f(eps 1)` for every `eps` other than all-ones, then
/// `f(1...1 0) gamma f(1...1 1)`; computed as a least fixed point from `0`.
pub fn higher_commutator(alg: &FiniteAlgebra, betas: &[Partition], limits: &Limits) -> Result<Partition> {
    check_arity(alg, betas.len(), limits)?;
    for b in betas {
        alg.ensure_congruence(b)?;
    }
    let n = alg.size();
    if betas.iter().any(|b| b.is_identity()) {
        return Ok(Partition::identity(n));
    }
    let k = betas.len();
    let w = 1usize << k;
    let comps = vec![alg; w];
    let gens = matrix_generators(betas);
    let m = Closure::run(&comps, &gens, limits.closure_cap, false, None)?;
    let half = w / 2;
    let mut gamma = Partition::identity(n);
    loop {
        let mut pairs = Vec::new();
        for i in 0..m.len() {
            let f = m.get(i);
            let premise = (0..half - 1).all(|e| gamma.related(f[2 * e], f[2 * e + 1]));
            if premise && !gamma.related(f[w - 2], f[w - 1]) {
                pairs.push((f[w - 2], f[w - 1]));
            }
        }
        if pairs.is_empty() {
            break;
        }
        gamma = cg_from(alg, &gamma, &pairs);
    }
    if !gamma.leq(&betas[k - 1]) {
        return Err(Error::Inconsistency(format!(
            "commutator {} not below last argument {}",
            gamma,
            betas[k - 1]
        )));
    }
    Ok(gamma)
}

/// Binary commutator `[alpha, beta]`.
pub fn commutator(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition, limits: &Limits) -> Result<Partition> {
    higher_commutator(alg, &[alpha.clone(), beta.clone()], limits)
}

/// Largest `rho` with `[rho, beta] = 0`.
pub fn centralizer(alg: &FiniteAlgebra, beta: &Partition, limits: &Limits) -> Result<Partition> {
    alg.ensure_congruence(beta)?;
    let n = alg.size();
    let mut acc = Partition::identity(n);
    for rho in con_lattice(alg, limits)? {
        if rho.leq(&acc) {
            continue;
        }
        if commutator(alg, &rho, beta, limits)?.is_identity() {
            acc = acc.join(&rho);
        }
    }
    if !commutator(alg, &acc, beta, limits)?.is_identity() {
        return Err(Error::Inconsistency(format!(
            "join {} of centralizing congruences does not centralize {}",
            acc, beta
        )));
    }
    Ok(acc)
}

/// The series `alpha, [alpha, alpha], [alpha, [alpha, alpha]], ...` until it stabilizes.
pub fn nilpotence_series(alg: &FiniteAlgebra, alpha: &Partition, limits: &Limits) -> Result<Vec<Partition>> {
    alg.ensure_congruence(alpha)?;
    let mut series = vec![alpha.clone()];
    loop {
        let last = series.last().unwrap().clone();
        if last.is_identity() {
            break;
        }
        let next = commutator(alg, alpha, &last, limits)?;
        if next == last {
            break;
        }
        series.push(next);
    }
    Ok(series)
}

pub fn is_nilpotent(alg: &FiniteAlgebra, alpha: &Partition, limits: &Limits) -> Result<bool> {
    Ok(nilpotence_series(alg, alpha, limits)?.last().unwrap().is_identity())
}

/// `[alpha, ..., alpha]` with `k + 1` arguments is `0`.
pub fn is_k_supernilpotent(alg: &FiniteAlgebra, alpha: &Partition, k: usize, limits: &Limits) -> Result<bool> {
    alg.ensure_congruence(alpha)?;
    if alpha.is_identity() {
        return Ok(true);
    }
    let args = vec![alpha.clone(); k + 1];
    Ok(higher_commutator(alg, &args, limits)?.is_identity())
}

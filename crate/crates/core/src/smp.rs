//! Subpower membership: the closure oracle, coherence and centrality
//! validators, reduced algebra classes, and the input reduction.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::catalog::Catalog;
use crate::commutator::{centralizer, commutator};
use crate::congruence::monolith;
use crate::construct::{construct_c, tilde_map, ConstructedAlgebra, SortLayout};
use crate::error::{Error, Result};
use crate::hom::{all_isomorphisms, find_isomorphism, hs_closure, is_isomorphic, quotient, SortedHom};
use crate::limits::Limits;
use crate::partition::Partition;
use crate::subuniverse::{generate_subuniverse, in_generated, Closure, Origin};
use crate::supernil::decide_supernilpotent;
use crate::tct::classify_type;

/// Is `target` in the subalgebra of `A_1 x ... x A_n` generated by `generators`?
#[derive(Clone, Debug)]
pub struct SmpInstance {
    pub components: Vec<FiniteAlgebra>,
    pub generators: Vec<Vec<u32>>,
    pub target: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmpInstanceJson {
    pub algebras: Vec<String>,
    pub generators: Vec<Vec<u32>>,
    pub target: Vec<u32>,
}

impl SmpInstance {
    pub fn new(components: Vec<FiniteAlgebra>, generators: Vec<Vec<u32>>, target: Vec<u32>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::Precondition("instance without components".into()));
        };
        for c in &components {
            first.same_signature(c)?;
        }
        let n = components.len();
        for t in generators.iter().chain(std::iter::once(&target)) {
            if t.len() != n {
                return Err(Error::Precondition(format!("tuple of length {} for {n} components", t.len())));
            }
            if let Some(j) = (0..n).find(|&j| t[j] as usize >= components[j].size()) {
                return Err(Error::Precondition(format!("entry {} outside component {j}", t[j])));
            }
        }
        Ok(SmpInstance {
            components,
            generators,
            target,
        })
    }

    pub fn from_json(j: &SmpInstanceJson, catalog: &Catalog) -> Result<Self> {
        let comps = j
            .algebras
            .iter()
            .map(|name| catalog.resolve(name))
            .collect::<Result<Vec<_>>>()?;
        SmpInstance::new(comps, j.generators.clone(), j.target.clone())
    }

    pub fn to_json(&self) -> SmpInstanceJson {
        SmpInstanceJson {
            algebras: self.components.iter().map(|c| c.name().to_string()).collect(),
            generators: self.generators.clone(),
            target: self.target.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn comps(&self) -> Vec<&FiniteAlgebra> {
        self.components.iter().collect()
    }

    /// The same question restricted to the coordinates in `idx`.
    pub fn restrict(&self, idx: &[usize]) -> SmpInstance {
        SmpInstance {
            components: idx.iter().map(|&j| self.components[j].clone()).collect(),
            generators: self
                .generators
                .iter()
                .map(|g| idx.iter().map(|&j| g[j]).collect())
                .collect(),
            target: idx.iter().map(|&j| self.target[j]).collect(),
        }
    }
}

/// Answers membership by closing the generators.
pub fn smp_oracle(inst: &SmpInstance, limits: &Limits) -> Result<bool> {
    in_generated(&inst.comps(), &inst.generators, &inst.target, limits)
}

/// Monolith data of a subdirectly irreducible algebra.
#[derive(Clone, Debug)]
pub struct SiProfile {
    pub monolith: Option<Partition>,
    pub abelian_monolith: bool,
    pub centralizer: Option<Partition>,
    pub characteristic: Option<u32>,
    pub reference: Option<(FiniteAlgebra, Vec<u32>)>,
}

impl SiProfile {
    pub fn is_si_abelian(&self) -> bool {
        self.monolith.is_some() && self.abelian_monolith
    }

    pub fn is_central(&self) -> bool {
        self.centralizer.as_ref().is_some_and(|c| c.is_total())
    }
}

/// Monolith, its centralizer `rho`, the quotient by `rho`, and the
/// characteristic of the monolith when it is abelian.
pub fn si_profile(alg: &FiniteAlgebra, limits: &Limits) -> Result<SiProfile> {
    let mut p = SiProfile {
        monolith: monolith(alg, limits)?,
        abelian_monolith: false,
        centralizer: None,
        characteristic: None,
        reference: None,
    };
    let Some(mu) = p.monolith.clone() else {
        return Ok(p);
    };
    p.abelian_monolith = commutator(alg, &mu, &mu, limits)?.is_identity();
    if !p.abelian_monolith {
        return Ok(p);
    }
    let rho = centralizer(alg, &mu, limits)?;
    let t = classify_type(alg, &Partition::identity(alg.size()), &mu, limits)?;
    p.characteristic = t.characteristic;
    p.reference = Some(quotient(alg, &rho)?);
    p.centralizer = Some(rho);
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceReport {
    pub d: usize,
    pub holds: bool,
    pub conditions: Vec<ConditionResult>,
    /// For each component `j`, the isomorphism `A_j/rho_j -> A_0/rho_0` read off (iv).
    #[serde(skip)]
    pub to_first: Vec<Vec<u32>>,
    #[serde(skip)]
    pub profiles: Vec<SiProfile>,
}

fn profiles(inst: &SmpInstance, limits: &Limits) -> Result<Vec<SiProfile>> {
    let mut cache: Vec<(usize, SiProfile)> = Vec::new();
    let mut out = Vec::new();
    for (j, a) in inst.components.iter().enumerate() {
        if let Some((_, p)) = cache.iter().find(|(i, _)| inst.components[*i] == *a) {
            out.push(p.clone());
            continue;
        }
        let p = si_profile(a, limits)?;
        cache.push((j, p.clone()));
        out.push(p);
    }
    Ok(out)
}

fn subsets_below(n: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        if (mask.count_ones() as usize) < bound {
            out.push((0..n).filter(|&j| mask >> j & 1 == 1).collect());
        }
    }
    out
}

fn condition_small_projections(inst: &SmpInstance, bound: usize, limits: &Limits) -> Result<ConditionResult> {
    for idx in subsets_below(inst.len(), bound) {
        let r = inst.restrict(&idx);
        let b = generate_subuniverse(&r.comps(), &r.generators, limits)?;
        if !b.is_subdirect() {
            return Ok(ConditionResult {
                name: "(iii)".into(),
                passed: false,
                detail: format!("projection onto {idx:?} is not subdirect"),
            });
        }
        if !b.contains(&r.target) {
            return Ok(ConditionResult {
                name: "(iii)".into(),
                passed: false,
                detail: format!("target restricted to {idx:?} is not generated"),
            });
        }
    }
    Ok(ConditionResult {
        name: "(iii)".into(),
        passed: true,
        detail: format!("all projections onto fewer than {bound} coordinates are subdirect and contain the target"),
    })
}

fn condition_size(inst: &SmpInstance, bound: usize) -> ConditionResult {
    ConditionResult {
        name: "(i)".into(),
        passed: inst.len() >= bound,
        detail: format!("n = {}, need at least {bound}", inst.len()),
    }
}

/// Checks d-coherence; the similarity of components is approximated by
/// isomorphic centralizer quotients, equal characteristic and condition (iv).
pub fn check_d_coherent(inst: &SmpInstance, d: usize, limits: &Limits) -> Result<CoherenceReport> {
    let bound = d.max(3);
    let mut conditions = vec![condition_size(inst, bound)];
    let profs = profiles(inst, limits)?;
    let mut ii = ConditionResult {
        name: "(ii)".into(),
        passed: true,
        detail: "components are subdirectly irreducible with abelian monoliths and similar".into(),
    };
    if let Some(j) = profs.iter().position(|p| !p.is_si_abelian()) {
        ii.passed = false;
        ii.detail = format!("component {j} is not subdirectly irreducible with abelian monolith");
    } else if let Some(j) = profs.iter().position(|p| p.characteristic != profs[0].characteristic) {
        ii.passed = false;
        ii.detail = format!("component {j} has a different characteristic");
    } else {
        let q0 = &profs[0].reference.as_ref().unwrap().0;
        if let Some(j) = profs
            .iter()
            .position(|p| !is_isomorphic(&p.reference.as_ref().unwrap().0, q0))
        {
            ii.passed = false;
            ii.detail = format!("component {j} has a non-isomorphic centralizer quotient");
        }
    }
    let ii_passed = ii.passed;
    conditions.push(ii);
    conditions.push(condition_small_projections(inst, bound, limits)?);
    let mut to_first = Vec::new();
    let mut iv = ConditionResult {
        name: "(iv)".into(),
        passed: ii_passed,
        detail: if ii_passed {
            "every generated relation between centralizer quotients is the graph of an isomorphism".into()
        } else {
            "not checked: (ii) fails".into()
        },
    };
    if ii_passed {
        'outer: for i in 0..inst.len() {
            for j in 0..inst.len() {
                if i == j {
                    continue;
                }
                let (qi, ni) = profs[i].reference.as_ref().unwrap();
                let (qj, nj) = profs[j].reference.as_ref().unwrap();
                let gens: Vec<Vec<u32>> = inst
                    .generators
                    .iter()
                    .map(|g| vec![ni[g[i] as usize], nj[g[j] as usize]])
                    .collect();
                let rel = generate_subuniverse(&[qi, qj], &gens, limits)?;
                match graph_of_iso(&rel, qi.size(), qj.size()) {
                    Some(map) if qi.is_homomorphism(&map, qj) => {
                        if i == 0 {
                            let mut inv = vec![0u32; map.len()];
                            for (x, &y) in map.iter().enumerate() {
                                inv[y as usize] = x as u32;
                            }
                            to_first.push(inv);
                        }
                    }
                    _ => {
                        iv.passed = false;
                        iv.detail = format!("relation between components {i} and {j} is not an isomorphism graph");
                        break 'outer;
                    }
                }
            }
        }
        if iv.passed {
            let q0 = &profs[0].reference.as_ref().unwrap().0;
            to_first.insert(0, (0..q0.size() as u32).collect());
        }
    }
    conditions.push(iv);
    let holds = conditions.iter().all(|c| c.passed);
    Ok(CoherenceReport {
        d,
        holds,
        conditions,
        to_first: if holds { to_first } else { Vec::new() },
        profiles: profs,
    })
}

fn graph_of_iso(rel: &crate::subuniverse::TupleSet, a: usize, b: usize) -> Option<Vec<u32>> {
    if a != b || rel.len() != a {
        return None;
    }
    let mut map = vec![u32::MAX; a];
    let mut hit = vec![false; b];
    for t in rel.tuples() {
        if map[t[0] as usize] != u32::MAX || hit[t[1] as usize] {
            return None;
        }
        map[t[0] as usize] = t[1];
        hit[t[1] as usize] = true;
    }
    Some(map)
}

/// Checks d-centrality: size, central monoliths of one characteristic, small projections.
pub fn check_d_central(inst: &SmpInstance, d: usize, limits: &Limits) -> Result<CoherenceReport> {
    let bound = d.max(3);
    let mut conditions = vec![condition_size(inst, bound)];
    let profs = profiles(inst, limits)?;
    let mut ii = ConditionResult {
        name: "(ii')".into(),
        passed: true,
        detail: "components are subdirectly irreducible with central monoliths of one characteristic".into(),
    };
    if let Some(j) = profs.iter().position(|p| !(p.is_si_abelian() && p.is_central())) {
        ii.passed = false;
        ii.detail = format!("component {j} is not subdirectly irreducible with central monolith");
    } else if let Some(j) = profs.iter().position(|p| p.characteristic != profs[0].characteristic) {
        ii.passed = false;
        ii.detail = format!("component {j} has a different characteristic");
    }
    conditions.push(ii);
    conditions.push(condition_small_projections(inst, bound, limits)?);
    let holds = conditions.iter().all(|c| c.passed);
    Ok(CoherenceReport {
        d,
        holds,
        conditions,
        to_first: Vec::new(),
        profiles: profs,
    })
}

/// One group of subdirectly irreducible members with a common reference
/// quotient and characteristic, and its reduced algebras.
#[derive(Clone, Debug)]
pub struct SimilarityClass {
    pub reference: FiniteAlgebra,
    pub characteristic: Option<u32>,
    pub members: Vec<FiniteAlgebra>,
    pub reduced: Vec<ConstructedAlgebra>,
}

/// Groups the subdirectly irreducible members of `HS(ks)` with abelian
/// monolith and builds every `C(S, chi)` with `ker chi` the centralizer of
/// the monolith, up to isomorphism.
pub fn build_k_star(ks: &[FiniteAlgebra], limits: &Limits) -> Result<Vec<SimilarityClass>> {
    let mut classes: Vec<SimilarityClass> = Vec::new();
    for s in hs_closure(ks, limits)? {
        let prof = si_profile(&s, limits)?;
        if !prof.is_si_abelian() {
            continue;
        }
        let (q, nat) = prof.reference.clone().unwrap();
        let idx = match classes
            .iter()
            .position(|c| c.characteristic == prof.characteristic && is_isomorphic(&c.reference, &q))
        {
            Some(i) => i,
            None => {
                let name = format!("I{}", classes.len());
                classes.push(SimilarityClass {
                    reference: q.clone().with_name(name),
                    characteristic: prof.characteristic,
                    members: Vec::new(),
                    reduced: Vec::new(),
                });
                classes.len() - 1
            }
        };
        let class = &mut classes[idx];
        for phi in all_isomorphisms(&q, &class.reference) {
            let map: Vec<u32> = nat.iter().map(|&x| phi[x as usize]).collect();
            let chi = SortedHom::new(s.clone(), class.reference.clone(), map)?;
            let c = construct_c(&chi, limits)?;
            if class.reduced.iter().any(|r| is_isomorphic(r.algebra(), c.algebra())) {
                continue;
            }
            let cp = si_profile(c.algebra(), limits)?;
            if !(cp.is_si_abelian() && cp.is_central()) || cp.characteristic != class.characteristic {
                return Err(Error::Inconsistency(format!(
                    "reduced algebra of `{}` is not subdirectly irreducible with central monolith of the class characteristic",
                    s.name()
                )));
            }
            class.reduced.push(c);
        }
        class.members.push(s);
    }
    Ok(classes)
}

/// Output of an input reduction.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub class: Option<usize>,
    pub chis: Vec<SortedHom>,
    pub paddings: Vec<Vec<u32>>,
    pub constructed: Vec<ConstructedAlgebra>,
    pub reduced: SmpInstance,
    pub cells_touched: usize,
}

/// Reduces a d-coherent instance to one over reduced algebras.
pub fn reduce_instance(
    inst: &SmpInstance,
    classes: &[SimilarityClass],
    d: usize,
    limits: &Limits,
) -> Result<Reduction> {
    let report = check_d_coherent(inst, d, limits)?;
    if !report.holds {
        let failed: Vec<String> = report
            .conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        return Err(Error::Precondition(format!("instance is not {d}-coherent: {}", failed.join("; "))));
    }
    let p0 = &report.profiles[0];
    let (q0, _) = p0.reference.as_ref().unwrap();
    let Some(l) = classes
        .iter()
        .position(|c| c.characteristic == p0.characteristic && is_isomorphic(&c.reference, q0))
    else {
        return Err(Error::Precondition("no similarity class matches the components".into()));
    };
    let class = &classes[l];
    for (j, a) in inst.components.iter().enumerate() {
        if !class.members.iter().any(|m| is_isomorphic(m, a)) {
            return Err(Error::Precondition(format!("component {j} is not a member of its class")));
        }
    }
    let phi0 = find_isomorphism(q0, &class.reference).expect("class matched by isomorphism");
    let chis = inst
        .components
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let (_, nat) = report.profiles[j].reference.as_ref().unwrap();
            let iota = &report.to_first[j];
            let map = nat.iter().map(|&x| phi0[iota[x as usize] as usize]).collect();
            SortedHom::new(a.clone(), class.reference.clone(), map)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut red = reduce_with_homs(inst, &chis, limits)?;
    red.class = Some(l);
    Ok(red)
}

/// Replaces each tuple by its padded column tuple over `C(A_j, chi_j)`.
pub fn reduce_with_homs(inst: &SmpInstance, chis: &[SortedHom], limits: &Limits) -> Result<Reduction> {
    let n = inst.len();
    if chis.len() != n {
        return Err(Error::Precondition(format!("{} maps for {n} components", chis.len())));
    }
    let image = chis[0].codomain();
    for (j, chi) in chis.iter().enumerate() {
        if chi.domain() != &inst.components[j] || chi.codomain() != image {
            return Err(Error::Precondition(format!("map {j} does not go from component {j} to the common image")));
        }
    }
    let mut cells = 0usize;
    let sort_of = |t: &[u32], cells: &mut usize| -> Result<u32> {
        *cells += n;
        let s = chis[0].apply(t[0]);
        if (1..n).any(|j| chis[j].apply(t[j]) != s) {
            return Err(Error::Precondition(format!("tuple {t:?} meets several sorts")));
        }
        Ok(s)
    };
    let mut reps: Vec<Vec<u32>> = Vec::new();
    let mut rep_sorts: Vec<u32> = Vec::new();
    for g in &inst.generators {
        let s = sort_of(g, &mut cells)?;
        if !rep_sorts.contains(&s) {
            rep_sorts.push(s);
            reps.push(g.clone());
        }
    }
    sort_of(&inst.target, &mut cells)?;
    let m = image.size();
    let gens: Vec<Vec<u32>> = rep_sorts.iter().map(|&s| vec![s]).collect();
    let cl = Closure::run(&[image], &gens, limits.closure_cap, true, None)?;
    if cl.len() != m {
        return Err(Error::Precondition("generators do not reach every sort".into()));
    }
    let mut derived: Vec<Vec<u32>> = Vec::with_capacity(m);
    let mut paddings: Vec<Vec<u32>> = vec![Vec::new(); m];
    for i in 0..cl.len() {
        let t = match &cl.origins[i] {
            Origin::Generator(g) => reps[*g].clone(),
            Origin::Op { op, args } => {
                cells += n * (args.len() + 1);
                (0..n)
                    .map(|j| {
                        let a: Vec<u32> = args.iter().map(|&x| derived[x as usize][j]).collect();
                        inst.components[j].apply(*op, &a)
                    })
                    .collect()
            }
        };
        paddings[cl.get(i)[0] as usize] = t.clone();
        derived.push(t);
    }
    let mut constructed: Vec<ConstructedAlgebra> = Vec::with_capacity(n);
    for (j, chi) in chis.iter().enumerate() {
        match (0..j).find(|&i| chis[i] == *chi) {
            Some(i) => constructed.push(constructed[i].clone()),
            None => constructed.push(construct_c(chi, limits)?),
        }
    }
    let layouts: Vec<&SortLayout> = constructed.iter().map(|c| c.layout()).collect();
    let tilde = |x: &[u32], cells: &mut usize| -> Result<Vec<u32>> {
        *cells += n * m;
        tilde_map(x, &layouts, &paddings)
    };
    let generators = inst
        .generators
        .iter()
        .map(|g| tilde(g, &mut cells))
        .collect::<Result<Vec<_>>>()?;
    let target = tilde(&inst.target, &mut cells)?;
    let reduced = SmpInstance::new(
        constructed.iter().map(|c| c.algebra().clone()).collect(),
        generators,
        target,
    )?;
    Ok(Reduction {
        class: None,
        chis: chis.to_vec(),
        paddings,
        constructed,
        reduced,
        cells_touched: cells,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisEntry {
    pub algebra: String,
    pub centralizer: Partition,
    pub supernilpotent: bool,
}

/// For each subdirectly irreducible `S` in `HS(ks)` with abelian monolith,
/// decides whether the centralizer of the monolith is supernilpotent.
pub fn check_hypothesis_snilp_centralizers(
    ks: &[FiniteAlgebra],
    assert_omits_type1: bool,
    limits: &Limits,
) -> Result<Vec<HypothesisEntry>> {
    let mut out = Vec::new();
    for s in hs_closure(ks, limits)? {
        let prof = si_profile(&s, limits)?;
        if !prof.is_si_abelian() {
            continue;
        }
        let rho = prof.centralizer.unwrap();
        let cert = decide_supernilpotent(&s, &rho, assert_omits_type1, limits)?;
        out.push(HypothesisEntry {
            algebra: s.name().to_string(),
            centralizer: rho,
            supernilpotent: cert.supernilpotent,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn oracle_on_z2_cube() {
        let z = catalog::z2();
        let inst = SmpInstance::new(
            vec![z.clone(), z.clone(), z],
            vec![vec![1, 1, 0], vec![0, 1, 1]],
            vec![1, 0, 1],
        )
        .unwrap();
        assert!(smp_oracle(&inst, &Limits::default()).unwrap());
        let no = SmpInstance { target: vec![1, 0, 0], ..inst };
        assert!(!smp_oracle(&no, &Limits::default()).unwrap());
    }

    #[test]
    fn coherence_of_z2_instance() {
        let z = catalog::z2();
        let inst = SmpInstance::new(
            vec![z.clone(), z.clone(), z],
            vec![vec![1, 1, 0], vec![0, 1, 1]],
            vec![1, 0, 0],
        )
        .unwrap();
        let r = check_d_coherent(&inst, 2, &Limits::default()).unwrap();
        assert!(r.holds, "{:?}", r.conditions);
        let k = catalog::klein();
        let bad = SmpInstance::new(vec![k.clone(), k.clone(), k], vec![vec![1, 2, 3]], vec![1, 2, 3]).unwrap();
        let r = check_d_coherent(&bad, 2, &Limits::default()).unwrap();
        assert!(!r.conditions[1].passed);
    }
}

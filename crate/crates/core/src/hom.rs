use crate::algebra::FiniteAlgebra;
use crate::congruence::con_lattice;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partition::Partition;
use crate::subuniverse::subuniverse_of;

/// Surjective homomorphism `domain -> codomain`; its kernel sorts the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SortedHom {
    domain: FiniteAlgebra,
    codomain: FiniteAlgebra,
    map: Vec<u32>,
}

impl SortedHom {
    pub fn new(domain: FiniteAlgebra, codomain: FiniteAlgebra, map: Vec<u32>) -> Result<Self> {
        domain.same_signature(&codomain)?;
        if !domain.is_homomorphism(&map, &codomain) {
            return Err(Error::NotHomomorphism(format!(
                "map {:?} from `{}` to `{}`",
                map,
                domain.name(),
                codomain.name()
            )));
        }
        let mut hit = vec![false; codomain.size()];
        for &v in &map {
            hit[v as usize] = true;
        }
        if let Some(i) = hit.iter().position(|&h| !h) {
            return Err(Error::Precondition(format!("map is not onto: {i} has no preimage")));
        }
        Ok(SortedHom {
            domain,
            codomain,
            map,
        })
    }

    /// Natural map onto the quotient by a congruence.
    pub fn natural(domain: &FiniteAlgebra, kernel: &Partition) -> Result<Self> {
        let (q, map) = quotient(domain, kernel)?;
        Ok(SortedHom {
            domain: domain.clone(),
            codomain: q,
            map,
        })
    }

    /// Homomorphism whose codomain is induced from a surjective labelling `0..m-1`.
    pub fn from_labels(domain: &FiniteAlgebra, labels: &[u32]) -> Result<Self> {
        if labels.len() != domain.size() {
            return Err(Error::Precondition(format!(
                "{} labels for algebra of size {}",
                labels.len(),
                domain.size()
            )));
        }
        let kernel = Partition::from_labels(labels)?;
        let nat = SortedHom::natural(domain, &kernel)?;
        let m = nat.codomain.size();
        let mut relabel = vec![u32::MAX; m];
        for (x, &l) in labels.iter().enumerate() {
            if l as usize >= m {
                return Err(Error::Precondition(format!("labels must be onto 0..{m}")));
            }
            relabel[nat.map[x] as usize] = l;
        }
        let mut inv = vec![0u32; m];
        for (c, &l) in relabel.iter().enumerate() {
            inv[l as usize] = c as u32;
        }
        let codomain = FiniteAlgebra::from_fn(
            format!("{}/ker", domain.name()),
            m,
            domain.signature().clone(),
            |op, args| {
                let a: Vec<u32> = args.iter().map(|&x| inv[x as usize]).collect();
                relabel[nat.codomain.apply(op, &a) as usize]
            },
        )?;
        SortedHom::new(domain.clone(), codomain, labels.to_vec())
    }

    pub fn domain(&self) -> &FiniteAlgebra {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteAlgebra {
        &self.codomain
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.map[x as usize]
    }

    pub fn kernel(&self) -> Partition {
        Partition::from_labels(&self.map).expect("labels")
    }

    pub fn num_sorts(&self) -> usize {
        self.codomain.size()
    }

    /// Post-composition with an isomorphism of the codomain.
    pub fn then(&self, iso: &[u32], target: &FiniteAlgebra) -> Result<SortedHom> {
        let map = self.map.iter().map(|&x| iso[x as usize]).collect();
        SortedHom::new(self.domain.clone(), target.clone(), map)
    }
}

/// Quotient algebra, classes numbered by least element, and the natural map.
pub fn quotient(alg: &FiniteAlgebra, theta: &Partition) -> Result<(FiniteAlgebra, Vec<u32>)> {
    alg.ensure_congruence(theta)?;
    let idx = theta.class_indices();
    let reps: Vec<u32> = theta.blocks().iter().map(|b| b[0]).collect();
    let q = FiniteAlgebra::from_fn(
        format!("{}/{}", alg.name(), theta),
        reps.len(),
        alg.signature().clone(),
        |op, args| {
            let a: Vec<u32> = args.iter().map(|&c| reps[c as usize]).collect();
            idx[alg.apply(op, &a) as usize]
        },
    )?;
    Ok((q, idx))
}

struct IsoSearch<'a> {
    a: &'a FiniteAlgebra,
    b: &'a FiniteAlgebra,
    map: Vec<u32>,
    used: Vec<bool>,
    trail: Vec<u32>,
}

impl IsoSearch<'_> {
    fn assign(&mut self, x: u32, y: u32) -> bool {
        let xm = self.map[x as usize];
        if xm != u32::MAX {
            return xm == y;
        }
        if self.used[y as usize] {
            return false;
        }
        self.map[x as usize] = y;
        self.used[y as usize] = true;
        self.trail.push(x);
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().unwrap();
            let y = self.map[x as usize];
            self.used[y as usize] = false;
            self.map[x as usize] = u32::MAX;
        }
    }

    /// Propagates forced values until stable; false on contradiction.
    fn propagate(&mut self) -> bool {
        let n = self.a.size() as u32;
        let sig = self.a.signature();
        loop {
            let before = self.trail.len();
            for op in 0..sig.len() {
                let k = sig.arity(op);
                let mut args = vec![0u32; k];
                let mut img = vec![0u32; k];
                let table = self.a.table(op);
                for &v in table.iter() {
                    let mut all = true;
                    for (d, &x) in img.iter_mut().zip(&args) {
                        let m = self.map[x as usize];
                        if m == u32::MAX {
                            all = false;
                            break;
                        }
                        *d = m;
                    }
                    if all && !self.assign(v, self.b.apply(op, &img)) {
                        return false;
                    }
                    crate::algebra::increment(&mut args, n);
                }
            }
            if self.trail.len() == before {
                return true;
            }
        }
    }

    fn search(&mut self, out: &mut Vec<Vec<u32>>, all: bool) {
        let Some(x) = self.map.iter().position(|&m| m == u32::MAX) else {
            out.push(self.map.clone());
            return;
        };
        for y in 0..self.b.size() as u32 {
            if self.used[y as usize] {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(x as u32, y) && self.propagate() {
                self.search(out, all);
                if !all && !out.is_empty() {
                    return;
                }
            }
            self.undo(mark);
        }
    }
}

fn iso_search(a: &FiniteAlgebra, b: &FiniteAlgebra, all: bool) -> Vec<Vec<u32>> {
    if a.size() != b.size() || a.signature() != b.signature() {
        return Vec::new();
    }
    let mut s = IsoSearch {
        a,
        b,
        map: vec![u32::MAX; a.size()],
        used: vec![false; b.size()],
        trail: Vec::new(),
    };
    let mut out = Vec::new();
    s.search(&mut out, all);
    out
}

/// First isomorphism `a -> b` in lexicographic order of the image vector.
pub fn find_isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Vec<u32>> {
    iso_search(a, b, false).into_iter().next()
}

/// Every isomorphism `a -> b`, in lexicographic order.
pub fn all_isomorphisms(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<Vec<u32>> {
    iso_search(a, b, true)
}

pub fn is_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
    find_isomorphism(a, b).is_some()
}

/// All nonempty subuniverses, sorted by size then lexicographically.
pub fn subuniverses(alg: &FiniteAlgebra, limits: &Limits) -> Result<Vec<Vec<u32>>> {
    let mut found: Vec<Vec<u32>> = Vec::new();
    let mut seen = rustc_hash::FxHashSet::default();
    let singles: Vec<Vec<u32>> = alg
        .universe()
        .map(|x| subuniverse_of(alg, &[x], limits))
        .collect::<Result<_>>()?;
    for s in &singles {
        if seen.insert(s.clone()) {
            found.push(s.clone());
        }
    }
    let mut i = 0;
    while i < found.len() {
        for s in &singles {
            if s.iter().all(|x| found[i].binary_search(x).is_ok()) {
                continue;
            }
            let mut gens = found[i].clone();
            gens.extend_from_slice(s);
            let u = subuniverse_of(alg, &gens, limits)?;
            if seen.insert(u.clone()) {
                found.push(u);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(found)
}

/// `HS(K)` up to isomorphism, ordered by size then discovery.
pub fn hs_closure(ks: &[FiniteAlgebra], limits: &Limits) -> Result<Vec<FiniteAlgebra>> {
    let mut out: Vec<FiniteAlgebra> = Vec::new();
    for k in ks {
        if let Some(first) = ks.first() {
            first.same_signature(k)?;
        }
        for sub in subuniverses(k, limits)? {
            let b = k.subalgebra(&sub)?;
            for theta in con_lattice(&b, limits)? {
                let (q, _) = quotient(&b, &theta)?;
                if !out.iter().any(|o| is_isomorphic(o, &q)) {
                    let name = if theta.is_identity() && sub.len() == k.size() {
                        k.name().to_string()
                    } else {
                        format!("{}[{}]/{}", k.name(), fmt_set(&sub), theta)
                    };
                    out.push(q.with_name(name));
                }
            }
        }
    }
    out.sort_by_key(|a| a.size());
    Ok(out)
}

fn fmt_set(s: &[u32]) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    fn cyclic(n: u32) -> FiniteAlgebra {
        let sig = Signature::from_pairs(&[("+", 2)]).unwrap();
        FiniteAlgebra::from_fn(format!("Z{n}"), n as usize, sig, |_, a| (a[0] + a[1]) % n).unwrap()
    }

    #[test]
    fn automorphisms_of_z4() {
        let z = cyclic(4);
        assert_eq!(all_isomorphisms(&z, &z), vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]]);
        assert_eq!(find_isomorphism(&z, &z), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn quotient_numbering() {
        let z = cyclic(4);
        let (q, nat) = quotient(&z, &Partition::parse(4, "02|13").unwrap()).unwrap();
        assert_eq!(nat, vec![0, 1, 0, 1]);
        assert_eq!(q.table(0), &[0, 1, 1, 0]);
        assert!(quotient(&z, &Partition::parse(4, "01|23").unwrap()).is_err());
    }

    #[test]
    fn hs_of_z2() {
        let hs = hs_closure(&[cyclic(2)], &Limits::default()).unwrap();
        assert_eq!(hs.len(), 2);
        assert_eq!(hs[0].size(), 1);
        assert_eq!(hs[1].size(), 2);
    }

    #[test]
    fn from_labels_relabels_codomain() {
        let z = cyclic(4);
        let h = SortedHom::from_labels(&z, &[1, 0, 1, 0]).unwrap();
        assert_eq!(h.codomain().apply(0, &[1, 1]), 1);
        assert_eq!(h.codomain().apply(0, &[0, 0]), 1);
        assert!(SortedHom::from_labels(&z, &[0, 1, 1, 0]).is_err());
    }
}

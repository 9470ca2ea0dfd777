use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::error::{cap, Error, Result};
use crate::limits::Limits;
use crate::term::Term;

/// Sorted set of tuples in a product of universes of the given sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TupleSet {
    sizes: Vec<usize>,
    tuples: Vec<Vec<u32>>,
}

impl TupleSet {
    pub fn new(sizes: Vec<usize>, mut tuples: Vec<Vec<u32>>) -> Result<Self> {
        for t in &tuples {
            check_tuple(&sizes, t)?;
        }
        tuples.sort();
        tuples.dedup();
        Ok(TupleSet { sizes, tuples })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn width(&self) -> usize {
        self.sizes.len()
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    /// Projection onto the listed coordinates, in that order.
    pub fn project(&self, coords: &[usize]) -> TupleSet {
        let sizes = coords.iter().map(|&c| self.sizes[c]).collect();
        let tuples = self
            .tuples
            .iter()
            .map(|t| coords.iter().map(|&c| t[c]).collect())
            .collect();
        TupleSet::new(sizes, tuples).expect("projection stays in range")
    }

    pub fn intersect(&self, other: &TupleSet) -> TupleSet {
        let tuples = self
            .tuples
            .iter()
            .filter(|t| other.contains(t))
            .cloned()
            .collect();
        TupleSet {
            sizes: self.sizes.clone(),
            tuples,
        }
    }

    /// True when every coordinate projection is onto its universe.
    pub fn is_subdirect(&self) -> bool {
        (0..self.width()).all(|c| {
            let mut seen = vec![false; self.sizes[c]];
            for t in &self.tuples {
                seen[t[c] as usize] = true;
            }
            seen.iter().all(|&s| s)
        })
    }
}

fn check_tuple(sizes: &[usize], t: &[u32]) -> Result<()> {
    if t.len() != sizes.len() {
        return Err(Error::Precondition(format!(
            "tuple of length {} in a product of {} factors",
            t.len(),
            sizes.len()
        )));
    }
    if let Some(c) = t.iter().zip(sizes).position(|(&v, &n)| v as usize >= n) {
        return Err(Error::Precondition(format!(
            "entry {} at coordinate {c} outside 0..{}",
            t[c], sizes[c]
        )));
    }
    Ok(())
}

/// How a closure element was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Generator(usize),
    Op { op: usize, args: Vec<u32> },
}

const DENSE_INDEX_MAX: u128 = 1 << 22;

enum Index {
    Dense {
        weights: Vec<u64>,
        slots: Vec<u32>,
    },
    Packed {
        weights: Vec<u64>,
        map: FxHashMap<u64, u32>,
    },
    Boxed(FxHashMap<Box<[u32]>, u32>),
}

impl Index {
    fn new(sizes: &[usize]) -> Index {
        let mut total: u128 = 1;
        for &s in sizes {
            total = total.saturating_mul(s as u128);
        }
        if total <= u64::MAX as u128 {
            let mut weights = vec![1u64; sizes.len()];
            let mut w = 1u64;
            for i in (0..sizes.len()).rev() {
                weights[i] = w;
                w = w.wrapping_mul(sizes[i] as u64);
            }
            if total <= DENSE_INDEX_MAX {
                return Index::Dense {
                    weights,
                    slots: vec![u32::MAX; total as usize],
                };
            }
            Index::Packed {
                weights,
                map: FxHashMap::default(),
            }
        } else {
            Index::Boxed(FxHashMap::default())
        }
    }

    fn get(&self, t: &[u32]) -> Option<u32> {
        match self {
            Index::Dense { weights, slots } => {
                let k = t.iter().zip(weights).map(|(&v, &w)| v as u64 * w).sum::<u64>();
                let v = slots[k as usize];
                (v != u32::MAX).then_some(v)
            }
            Index::Packed { weights, map } => {
                let k = t.iter().zip(weights).map(|(&v, &w)| v as u64 * w).sum::<u64>();
                map.get(&k).copied()
            }
            Index::Boxed(map) => map.get(t).copied(),
        }
    }

    fn insert(&mut self, t: &[u32], idx: u32) -> bool {
        match self {
            Index::Dense { weights, slots } => {
                let k = t.iter().zip(weights.iter()).map(|(&v, &w)| v as u64 * w).sum::<u64>();
                let slot = &mut slots[k as usize];
                if *slot != u32::MAX {
                    return false;
                }
                *slot = idx;
                true
            }
            Index::Packed { weights, map } => {
                let k = t.iter().zip(weights.iter()).map(|(&v, &w)| v as u64 * w).sum::<u64>();
                match map.entry(k) {
                    std::collections::hash_map::Entry::Occupied(_) => false,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(idx);
                        true
                    }
                }
            }
            Index::Boxed(map) => {
                if map.contains_key(t) {
                    false
                } else {
                    map.insert(t.into(), idx);
                    true
                }
            }
        }
    }
}

/// Worklist closure of a generating set in a product of similar algebras.
///
/// Elements appear in discovery order: generators first, then results of
/// applying operations (signature order) to argument index tuples in
/// lexicographic order, processed one new element at a time.
pub struct Closure {
    pub width: usize,
    pub data: Vec<u32>,
    pub origins: Vec<Origin>,
    pub found: Option<u32>,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    /// Term over the generator variables producing element `i`.
    pub fn witness(&self, i: usize, sig: &crate::algebra::Signature) -> Term {
        let mut memo: Vec<Option<Term>> = vec![None; i + 1];
        for j in 0..=i {
            let t = match &self.origins[j] {
                Origin::Generator(g) => Term::Var(*g),
                Origin::Op { op, args } => Term::App(
                    sig.name(*op).to_string(),
                    args.iter().map(|&a| memo[a as usize].clone().expect("earlier")).collect(),
                ),
            };
            memo[j] = Some(t);
        }
        memo[i].take().expect("computed")
    }

    pub fn run(
        comps: &[&FiniteAlgebra],
        gens: &[Vec<u32>],
        cap_limit: usize,
        track: bool,
        target: Option<&[u32]>,
    ) -> Result<Closure> {
        let Some(first) = comps.first() else {
            return Err(Error::Precondition("closure in an empty product".into()));
        };
        for c in comps {
            first.same_signature(c)?;
        }
        let sizes: Vec<usize> = comps.iter().map(|c| c.size()).collect();
        for g in gens {
            check_tuple(&sizes, g)?;
        }
        if let Some(t) = target {
            check_tuple(&sizes, t)?;
        }
        let width = comps.len();
        if !track && width <= 64 && first.size() == 2 && comps.iter().all(|c| c.tables() == first.tables()) {
            return Closure::run_boolean(first, width, gens, cap_limit, target);
        }
        let sig = first.signature();
        let mut index = Index::new(&sizes);
        let mut cl = Closure {
            width,
            data: Vec::new(),
            origins: Vec::new(),
            found: None,
        };
        let full = sizes.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        let mut count: usize = 0;
        let push = |cl: &mut Closure, index: &mut Index, count: &mut usize, t: &[u32], o: Origin| -> Result<bool> {
            if !index.insert(t, *count as u32) {
                return Ok(false);
            }
            if *count >= cap_limit {
                return Err(cap("subuniverse closure", (*count + 1) as u128, cap_limit as u128));
            }
            cl.data.extend_from_slice(t);
            if track {
                cl.origins.push(o);
            }
            if target == Some(t) {
                cl.found = Some(*count as u32);
            }
            *count += 1;
            Ok(true)
        };
        for (gi, g) in gens.iter().enumerate() {
            push(&mut cl, &mut index, &mut count, g, Origin::Generator(gi))?;
            if cl.found.is_some() || Some(count) == full {
                return Ok(cl);
            }
        }
        let ops: Vec<(usize, usize)> = (0..sig.len()).map(|op| (op, sig.arity(op))).collect();
        let tables: Vec<Vec<&[u32]>> = comps
            .iter()
            .map(|c| (0..sig.len()).map(|op| c.table(op)).collect())
            .collect();
        let mut out = vec![0u32; width];
        let mut args: Vec<u32> = Vec::new();
        let mut i = 0usize;
        while i < count {
            for &(op, r) in &ops {
                for p in 0..r {
                    if p > 0 && i == 0 {
                        break;
                    }
                    // positions before p range over 0..i, position p is i, after p over 0..=i
                    args.clear();
                    args.resize(r, 0);
                    args[p] = i as u32;
                    loop {
                        for c in 0..width {
                            let n = sizes[c];
                            let mut idx = 0usize;
                            for &a in args.iter() {
                                idx = idx * n + cl.data[a as usize * width + c] as usize;
                            }
                            out[c] = tables[c][op][idx];
                        }
                        if index.get(&out).is_none() {
                            let o = if track {
                                Origin::Op { op, args: args.clone() }
                            } else {
                                Origin::Generator(0)
                            };
                            let t = out.clone();
                            push(&mut cl, &mut index, &mut count, &t, o)?;
                            if cl.found.is_some() || Some(count) == full {
                                return Ok(cl);
                            }
                        }
                        // advance odometer over free positions, last fastest
                        let mut q = r;
                        let mut advanced = false;
                        while q > 0 {
                            q -= 1;
                            if q == p {
                                continue;
                            }
                            let bound = if q < p { i as u32 } else { i as u32 + 1 };
                            args[q] += 1;
                            if args[q] < bound {
                                advanced = true;
                                break;
                            }
                            args[q] = 0;
                        }
                        if !advanced {
                            break;
                        }
                    }
                }
            }
            i += 1;
        }
        Ok(cl)
    }

    /// Bit-parallel closure in a power of one two-element algebra.
    fn run_boolean(alg: &FiniteAlgebra, width: usize, gens: &[Vec<u32>], cap_limit: usize, target: Option<&[u32]>) -> Result<Closure> {
        let pack = |t: &[u32]| t.iter().enumerate().fold(0u64, |acc, (c, &v)| acc | (v as u64) << c);
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let ops: Vec<(usize, Vec<usize>)> = (0..alg.signature().len())
            .map(|op| {
                let t = alg.table(op);
                (alg.signature().arity(op), (0..t.len()).filter(|&i| t[i] == 1).collect())
            })
            .collect();
        let dense = width <= 26;
        let mut bits: Vec<u64> = if dense { vec![0; (1usize << width).div_ceil(64)] } else { Vec::new() };
        let mut sparse: rustc_hash::FxHashSet<u64> = Default::default();
        let mut elems: Vec<u64> = Vec::new();
        let target = target.map(pack);
        let mut found = None;
        let mut insert = |x: u64, elems: &mut Vec<u64>, found: &mut Option<u32>| -> bool {
            let fresh = if dense {
                let (w, b) = ((x >> 6) as usize, x & 63);
                let f = bits[w] >> b & 1 == 0;
                bits[w] |= 1 << b;
                f
            } else {
                sparse.insert(x)
            };
            if fresh {
                if Some(x) == target {
                    *found = Some(elems.len() as u32);
                }
                elems.push(x);
            }
            fresh
        };
        let full = if width >= 64 { usize::MAX } else { 1usize << width };
        let mut done = false;
        for g in gens {
            insert(pack(g), &mut elems, &mut found);
            if found.is_some() || elems.len() == full {
                done = true;
                break;
            }
        }
        let mut args: Vec<usize> = Vec::new();
        let mut i = 0usize;
        'outer: while !done && i < elems.len() {
            for (r, pats) in &ops {
                let r = *r;
                for p in 0..r {
                    if p > 0 && i == 0 {
                        break;
                    }
                    args.clear();
                    args.resize(r, 0);
                    args[p] = i;
                    loop {
                        let mut res = 0u64;
                        for &pat in pats {
                            let mut v = mask;
                            for (q, &a) in args.iter().enumerate() {
                                let x = elems[a];
                                v &= if pat >> (r - 1 - q) & 1 == 1 { x } else { !x };
                            }
                            res |= v;
                        }
                        if insert(res, &mut elems, &mut found) {
                            if elems.len() > cap_limit {
                                return Err(cap("subuniverse closure", elems.len() as u128, cap_limit as u128));
                            }
                            if found.is_some() || elems.len() == full {
                                break 'outer;
                            }
                        }
                        let mut q = r;
                        let mut advanced = false;
                        while q > 0 {
                            q -= 1;
                            if q == p {
                                continue;
                            }
                            let bound = if q < p { i } else { i + 1 };
                            args[q] += 1;
                            if args[q] < bound {
                                advanced = true;
                                break;
                            }
                            args[q] = 0;
                        }
                        if !advanced {
                            break;
                        }
                    }
                }
            }
            i += 1;
        }
        let mut data = Vec::with_capacity(elems.len() * width);
        for &x in &elems {
            data.extend((0..width).map(|c| (x >> c & 1) as u32));
        }
        Ok(Closure {
            width,
            data,
            origins: Vec::new(),
            found,
        })
    }

    pub fn into_tuple_set(self, comps: &[&FiniteAlgebra]) -> TupleSet {
        let sizes = comps.iter().map(|c| c.size()).collect();
        let tuples = self.data.chunks(self.width.max(1)).map(|c| c.to_vec()).collect();
        TupleSet::new(sizes, tuples).expect("closure stays in range")
    }
}

/// Subuniverse of `comps[0] x ... x comps[n-1]` generated by `gens`.
pub fn generate_subuniverse(
    comps: &[&FiniteAlgebra],
    gens: &[Vec<u32>],
    limits: &Limits,
) -> Result<TupleSet> {
    Ok(Closure::run(comps, gens, limits.closure_cap, false, None)?.into_tuple_set(comps))
}

/// Membership of `target` in the generated subuniverse, stopping early on success.
pub fn in_generated(
    comps: &[&FiniteAlgebra],
    gens: &[Vec<u32>],
    target: &[u32],
    limits: &Limits,
) -> Result<bool> {
    Ok(Closure::run(comps, gens, limits.closure_cap, false, Some(target))?
        .found
        .is_some())
}

/// Subuniverse of a single algebra generated by the given elements, sorted.
pub fn subuniverse_of(alg: &FiniteAlgebra, gens: &[u32], limits: &Limits) -> Result<Vec<u32>> {
    let g: Vec<Vec<u32>> = gens.iter().map(|&x| vec![x]).collect();
    let ts = generate_subuniverse(&[alg], &g, limits)?;
    Ok(ts.tuples().iter().map(|t| t[0]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    fn z2() -> FiniteAlgebra {
        let sig = Signature::from_pairs(&[("+", 2)]).unwrap();
        FiniteAlgebra::from_fn("Z2", 2, sig, |_, a| (a[0] + a[1]) % 2).unwrap()
    }

    #[test]
    fn z2_cube_even_weight() {
        let z = z2();
        let gens = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let s = generate_subuniverse(&[&z, &z, &z], &gens, &Limits::default()).unwrap();
        assert_eq!(
            s.tuples(),
            &[vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );
        assert!(in_generated(&[&z, &z, &z], &gens, &[1, 0, 1], &Limits::default()).unwrap());
        assert!(!in_generated(&[&z, &z, &z], &gens, &[1, 0, 0], &Limits::default()).unwrap());
    }

    #[test]
    fn empty_generators_give_empty_set() {
        let z = z2();
        let s = generate_subuniverse(&[&z], &[], &Limits::default()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let z = z2();
        let limits = Limits {
            closure_cap: 2,
            ..Limits::default()
        };
        let gens = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let err = generate_subuniverse(&[&z, &z, &z], &gens, &limits).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn witness_terms_evaluate_correctly() {
        let z = z2();
        let gens = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let cl = Closure::run(&[&z, &z, &z], &gens, 100, true, Some(&[1, 0, 1])).unwrap();
        let i = cl.found.unwrap() as usize;
        let t = cl.witness(i, z.signature());
        for c in 0..3 {
            let env = [gens[0][c], gens[1][c]];
            assert_eq!(crate::term::eval_term(&z, &t, &env).unwrap(), [1, 0, 1][c]);
        }
    }
}

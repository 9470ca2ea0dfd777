use std::fmt;
use std::path::Path;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{cap, Error, Result};
use crate::partition::Partition;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Ordered list of operation symbols with their arities.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    index: FxHashMap<String, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Signature {}

impl std::hash::Hash for Signature {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.symbols.hash(state)
    }
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut index = FxHashMap::default();
        for (i, s) in symbols.iter().enumerate() {
            if s.arity == 0 {
                return Err(Error::InvalidAlgebra(format!(
                    "nullary symbol `{}`: use a unary constant operation instead",
                    s.name
                )));
            }
            if s.name.is_empty() || s.name.contains(|c: char| c.is_whitespace() || c == '(' || c == ')') {
                return Err(Error::InvalidAlgebra(format!("bad symbol name `{}`", s.name)));
            }
            if index.insert(s.name.clone(), i).is_some() {
                return Err(Error::InvalidAlgebra(format!("duplicate symbol `{}`", s.name)));
            }
        }
        Ok(Signature { symbols, index })
    }

    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Signature::new(
            pairs
                .iter()
                .map(|&(n, a)| Symbol {
                    name: n.to_string(),
                    arity: a,
                })
                .collect(),
        )
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn arity(&self, op: usize) -> usize {
        self.symbols[op].arity
    }

    pub fn name(&self, op: usize) -> &str {
        &self.symbols[op].name
    }
}

/// Finite algebra on `{0..size-1}` with flat operation tables.
///
/// The table of a `k`-ary operation has `size^k` entries; the entry for
/// `(a1,...,ak)` sits at `sum a_j * size^(k-j)`, first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    signature: Signature,
    tables: Vec<Vec<u32>>,
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        size: usize,
        signature: Signature,
        tables: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::InvalidAlgebra("empty universe".into()));
        }
        if tables.len() != signature.len() {
            return Err(Error::InvalidAlgebra(format!(
                "{} tables for {} symbols",
                tables.len(),
                signature.len()
            )));
        }
        for (i, t) in tables.iter().enumerate() {
            let sym = &signature.symbols[i];
            let want = checked_pow(size, sym.arity)
                .ok_or_else(|| Error::InvalidAlgebra(format!("table of `{}` too large", sym.name)))?;
            if t.len() != want {
                return Err(Error::InvalidAlgebra(format!(
                    "table of `{}` has {} entries, expected {}",
                    sym.name,
                    t.len(),
                    want
                )));
            }
            if let Some(&bad) = t.iter().find(|&&v| v as usize >= size) {
                return Err(Error::InvalidAlgebra(format!(
                    "table of `{}` contains {} outside 0..{}",
                    sym.name, bad, size
                )));
            }
        }
        Ok(FiniteAlgebra {
            name,
            size,
            signature,
            tables,
        })
    }

    /// Tabulates each operation from a closure `f(op_index, args)`.
    pub fn from_fn(
        name: impl Into<String>,
        size: usize,
        signature: Signature,
        mut f: impl FnMut(usize, &[u32]) -> u32,
    ) -> Result<Self> {
        let mut tables = Vec::with_capacity(signature.len());
        for (op, sym) in signature.symbols.iter().enumerate() {
            let len = checked_pow(size, sym.arity)
                .ok_or_else(|| Error::InvalidAlgebra(format!("table of `{}` too large", sym.name)))?;
            let mut table = Vec::with_capacity(len);
            let mut args = vec![0u32; sym.arity];
            for _ in 0..len {
                table.push(f(op, &args));
                increment(&mut args, size as u32);
            }
            tables.push(table);
        }
        FiniteAlgebra::new(name, size, signature, tables)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn table(&self, op: usize) -> &[u32] {
        &self.tables[op]
    }

    pub fn tables(&self) -> &[Vec<u32>] {
        &self.tables
    }

    pub fn op_index(&self, name: &str) -> Result<usize> {
        self.signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    #[inline]
    pub fn table_index(&self, args: &[u32]) -> usize {
        let n = self.size;
        args.iter().fold(0usize, |acc, &a| acc * n + a as usize)
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[u32]) -> u32 {
        self.tables[op][self.table_index(args)]
    }

    pub fn apply_named(&self, name: &str, args: &[u32]) -> Result<u32> {
        let op = self.op_index(name)?;
        let ar = self.signature.arity(op);
        if ar != args.len() {
            return Err(Error::ArityMismatch {
                symbol: name.to_string(),
                expected: ar,
                found: args.len(),
            });
        }
        Ok(self.apply(op, args))
    }

    pub fn universe(&self) -> impl Iterator<Item = u32> {
        0..self.size as u32
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch(format!(
                "`{}` and `{}` have different signatures",
                self.name, other.name
            )));
        }
        Ok(())
    }

    /// True when every operation preserves the equivalence.
    pub fn is_congruence(&self, p: &Partition) -> bool {
        if p.size() != self.size {
            return false;
        }
        self.congruence_violation(p).is_none()
    }

    pub(crate) fn congruence_violation(&self, p: &Partition) -> Option<String> {
        let pairs = p.pairs();
        for (op, sym) in self.signature.symbols.iter().enumerate() {
            let k = sym.arity;
            let mut args = vec![0u32; k];
            let others = checked_pow(self.size, k - 1).unwrap_or(usize::MAX);
            for &(a, b) in &pairs {
                for pos in 0..k {
                    let mut rest = vec![0u32; k - 1];
                    for _ in 0..others {
                        let mut r = rest.iter();
                        for (j, slot) in args.iter_mut().enumerate() {
                            *slot = if j == pos { a } else { *r.next().unwrap() };
                        }
                        let x = self.apply(op, &args);
                        args[pos] = b;
                        let y = self.apply(op, &args);
                        if !p.related(x, y) {
                            return Some(format!(
                                "`{}` maps related {} and {} to unrelated {} and {}",
                                sym.name, a, b, x, y
                            ));
                        }
                        increment(&mut rest, self.size as u32);
                    }
                }
            }
        }
        None
    }

    pub fn ensure_congruence(&self, p: &Partition) -> Result<()> {
        if p.size() != self.size {
            return Err(Error::NotCongruence(format!(
                "partition on {} elements for algebra of size {}",
                p.size(),
                self.size
            )));
        }
        match self.congruence_violation(p) {
            None => Ok(()),
            Some(msg) => Err(Error::NotCongruence(msg)),
        }
    }

    /// True when `map` is a homomorphism into `target`.
    pub fn is_homomorphism(&self, map: &[u32], target: &FiniteAlgebra) -> bool {
        if map.len() != self.size || self.signature != target.signature {
            return false;
        }
        if map.iter().any(|&v| v as usize >= target.size) {
            return false;
        }
        for (op, sym) in self.signature.symbols.iter().enumerate() {
            let mut args = vec![0u32; sym.arity];
            let mut img = vec![0u32; sym.arity];
            for &v in &self.tables[op] {
                for (d, &a) in img.iter_mut().zip(&args) {
                    *d = map[a as usize];
                }
                if map[v as usize] != target.apply(op, &img) {
                    return false;
                }
                increment(&mut args, self.size as u32);
            }
        }
        true
    }

    /// Direct product with mixed-radix encoding, first factor most significant.
    pub fn product(factors: &[&FiniteAlgebra], table_cap: usize) -> Result<FiniteAlgebra> {
        let Some(first) = factors.first() else {
            return Err(Error::Precondition("product of zero algebras".into()));
        };
        for f in factors {
            first.same_signature(f)?;
        }
        let sizes: Vec<usize> = factors.iter().map(|f| f.size).collect();
        let size = sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| cap("product size", u128::MAX, table_cap as u128))?;
        for sym in first.signature.symbols() {
            let entries = checked_pow(size, sym.arity).unwrap_or(usize::MAX);
            if entries > table_cap {
                return Err(cap(
                    format!("product table for `{}`", sym.name),
                    entries as u128,
                    table_cap as u128,
                ));
            }
        }
        let enc = MixedRadix::new(sizes.clone());
        let name = factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("x");
        let mut coords: Vec<Vec<u32>> = Vec::new();
        FiniteAlgebra::from_fn(name, size, first.signature.clone(), |op, args| {
            coords.clear();
            coords.extend(args.iter().map(|&a| enc.decode(a as usize)));
            let mut out = vec![0u32; factors.len()];
            let mut fargs = vec![0u32; args.len()];
            for (c, f) in factors.iter().enumerate() {
                for (slot, t) in fargs.iter_mut().zip(&coords) {
                    *slot = t[c];
                }
                out[c] = f.apply(op, &fargs);
            }
            enc.encode(&out) as u32
        })
    }

    /// Subalgebra on a sorted subuniverse, relabelled `0..len-1` in order.
    pub fn subalgebra(&self, elements: &[u32]) -> Result<FiniteAlgebra> {
        let mut pos = vec![u32::MAX; self.size];
        for (i, &e) in elements.iter().enumerate() {
            if i > 0 && elements[i - 1] >= e {
                return Err(Error::Precondition("subuniverse must be sorted and distinct".into()));
            }
            pos[e as usize] = i as u32;
        }
        let mut bad = None;
        let sub = FiniteAlgebra::from_fn(
            format!("{}_sub", self.name),
            elements.len(),
            self.signature.clone(),
            |op, args| {
                let orig: Vec<u32> = args.iter().map(|&a| elements[a as usize]).collect();
                let v = self.apply(op, &orig);
                let p = pos[v as usize];
                if p == u32::MAX {
                    bad = Some(v);
                    0
                } else {
                    p
                }
            },
        )?;
        if let Some(v) = bad {
            return Err(Error::Precondition(format!("set is not closed: produces {v}")));
        }
        Ok(sub)
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            name: self.name.clone(),
            size: self.size,
            operations: self
                .signature
                .symbols
                .iter()
                .zip(&self.tables)
                .map(|(s, t)| OperationJson {
                    symbol: s.name.clone(),
                    arity: s.arity,
                    table: t.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: AlgebraJson) -> Result<Self> {
        let sig = Signature::new(
            j.operations
                .iter()
                .map(|o| Symbol {
                    name: o.symbol.clone(),
                    arity: o.arity,
                })
                .collect(),
        )?;
        let tables = j.operations.into_iter().map(|o| o.table).collect();
        FiniteAlgebra::new(j.name, j.size, sig, tables)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        FiniteAlgebra::from_json(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("algebra serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        FiniteAlgebra::from_json_str(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms: Vec<String> = self
            .signature
            .symbols
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect();
        write!(f, "{} (size {}; {})", self.name, self.size, syms.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationJson {
    pub symbol: String,
    pub arity: usize,
    pub table: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: String,
    pub size: usize,
    pub operations: Vec<OperationJson>,
}

/// Odometer step over `{0..radix-1}^k`, last position fastest.
pub(crate) fn increment(args: &mut [u32], radix: u32) -> bool {
    for a in args.iter_mut().rev() {
        *a += 1;
        if *a < radix {
            return true;
        }
        *a = 0;
    }
    false
}

/// Mixed-radix codec, first digit most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedRadix {
    radices: Vec<usize>,
    weights: Vec<usize>,
    total: usize,
}

impl MixedRadix {
    pub fn new(radices: Vec<usize>) -> Self {
        let mut weights = vec![1usize; radices.len()];
        let mut w = 1usize;
        for i in (0..radices.len()).rev() {
            weights[i] = w;
            w = w.saturating_mul(radices[i]);
        }
        MixedRadix {
            radices,
            weights,
            total: w,
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn encode(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .zip(&self.weights)
            .map(|(&d, &w)| d as usize * w)
            .sum()
    }

    pub fn decode(&self, mut code: usize) -> Vec<u32> {
        self.weights
            .iter()
            .map(|&w| {
                let d = (code / w) as u32;
                code %= w;
                d
            })
            .collect()
    }
}

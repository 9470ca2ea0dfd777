use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equivalence relation on `{0..n-1}` stored as canonical labels:
/// `labels[i]` is the least element of the class of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u32>", try_from = "Vec<u32>")]
pub struct Partition {
    labels: Vec<u32>,
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.labels
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::from_labels(&v)
    }
}

impl Partition {
    pub fn identity(n: usize) -> Self {
        Partition {
            labels: (0..n as u32).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
        }
    }

    /// Builds the kernel of an arbitrary labelling.
    pub fn from_labels(labels: &[u32]) -> Result<Self> {
        let mut first: rustc_hash::FxHashMap<u32, u32> = Default::default();
        let mut out = Vec::with_capacity(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            let rep = *first.entry(l).or_insert(i as u32);
            out.push(rep);
        }
        Ok(Partition { labels: out })
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<u32>]) -> Result<Self> {
        let mut labels = vec![u32::MAX; n];
        for b in blocks {
            let Some(&min) = b.iter().min() else {
                return Err(Error::Parse("empty block".into()));
            };
            for &x in b {
                let x = x as usize;
                if x >= n {
                    return Err(Error::Parse(format!("element {x} out of range 0..{n}")));
                }
                if labels[x] != u32::MAX {
                    return Err(Error::Parse(format!("element {x} appears twice")));
                }
                labels[x] = min;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == u32::MAX) {
            return Err(Error::Parse(format!("element {i} missing from partition")));
        }
        Partition::from_labels(&labels)
    }

    /// Smallest equivalence containing the given pairs.
    pub fn from_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut uf = UnionFind::new(n);
        for &(a, b) in pairs {
            uf.union(a, b);
        }
        uf.partition()
    }

    /// Parses `02|13`, `0,2|1,3`, `identity`/`0`, `total`/`1`, or a JSON label array.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('[') {
            let v: Vec<u32> = serde_json::from_str(t)?;
            if v.len() != n {
                return Err(Error::Parse(format!("expected {n} labels, got {}", v.len())));
            }
            return Partition::from_labels(&v);
        }
        match t {
            "identity" | "zero" | "bottom" => return Ok(Partition::identity(n)),
            "total" | "one" | "top" => return Ok(Partition::total(n)),
            "0" => return Ok(Partition::identity(n)),
            "1" => return Ok(Partition::total(n)),
            _ => {}
        }
        let mut blocks = Vec::new();
        for part in t.split('|') {
            let part = part.trim();
            let block: Result<Vec<u32>> = if part.contains(',') || part.contains(' ') {
                part.split([',', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<u32>().map_err(|e| Error::Parse(format!("{s}: {e}"))))
                    .collect()
            } else {
                part.chars()
                    .map(|c| {
                        c.to_digit(36)
                            .ok_or_else(|| Error::Parse(format!("bad element `{c}`")))
                    })
                    .collect()
            };
            blocks.push(block?);
        }
        Partition::from_blocks(n, &blocks)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, x: u32) -> u32 {
        self.labels[x as usize]
    }

    pub fn related(&self, a: u32, b: u32) -> bool {
        self.labels[a as usize] == self.labels[b as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l == i as u32)
    }

    pub fn is_total(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    pub fn num_classes(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(i, &l)| l == i as u32)
            .count()
    }

    /// Class index of every element, classes numbered by least element.
    pub fn class_indices(&self) -> Vec<u32> {
        let mut idx = vec![0u32; self.labels.len()];
        let mut next = 0;
        for i in 0..self.labels.len() {
            let l = self.labels[i] as usize;
            if l == i {
                idx[i] = next;
                next += 1;
            } else {
                idx[i] = idx[l];
            }
        }
        idx
    }

    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let idx = self.class_indices();
        let mut blocks = vec![Vec::new(); self.num_classes()];
        for (i, &c) in idx.iter().enumerate() {
            blocks[c as usize].push(i as u32);
        }
        blocks
    }

    pub fn class_of(&self, x: u32) -> Vec<u32> {
        let l = self.labels[x as usize];
        (0..self.labels.len() as u32)
            .filter(|&y| self.labels[y as usize] == l)
            .collect()
    }

    /// Generating pairs `(label, x)` for every non-representative `x`.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(i, &l)| l != i as u32)
            .map(|(i, &l)| (l, i as u32))
            .collect()
    }

    /// Refinement order.
    pub fn leq(&self, other: &Partition) -> bool {
        self.labels
            .iter()
            .enumerate()
            .all(|(i, &l)| other.labels[i] == other.labels[l as usize])
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        let keyed: Vec<u64> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| ((a as u64) << 32) | b as u64)
            .collect();
        let mut first: rustc_hash::FxHashMap<u64, u32> = Default::default();
        let labels = keyed
            .iter()
            .enumerate()
            .map(|(i, k)| *first.entry(*k).or_insert(i as u32))
            .collect();
        Partition { labels }
    }

    /// Join as equivalence relations.
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.size());
        for (i, (&a, &b)) in self.labels.iter().zip(&other.labels).enumerate() {
            uf.union(i as u32, a);
            uf.union(i as u32, b);
        }
        uf.partition()
    }

    pub fn as_relation(&self) -> Relation {
        let n = self.size();
        let mut r = Relation::empty(n);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if self.related(a, b) {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    /// Bar notation such as `02|13`; comma-separated elements once `n > 10`.
    pub fn to_bar_string(&self) -> String {
        let wide = self.size() > 10;
        self.blocks()
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                if wide {
                    items.join(",")
                } else {
                    items.concat()
                }
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bar_string())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn from_partition(p: &Partition) -> Self {
        UnionFind {
            parent: p.labels.clone(),
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    /// Returns true when two distinct classes were merged.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }

    pub(crate) fn partition(&mut self) -> Partition {
        let n = self.parent.len();
        let mut labels = vec![0u32; n];
        let mut min_of_root = vec![u32::MAX; n];
        for i in 0..n as u32 {
            let r = self.find(i) as usize;
            if min_of_root[r] == u32::MAX {
                min_of_root[r] = i;
            }
            labels[i as usize] = min_of_root[r];
        }
        Partition { labels }
    }
}

/// Binary relation on `{0..n-1}` as row bitsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Relation {
            n,
            rows: vec![vec![0; words]; n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: u32, b: u32) {
        self.rows[a as usize][b as usize / 64] |= 1 << (b % 64);
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.rows[a as usize][b as usize / 64] >> (b % 64) & 1 == 1
    }

    pub fn compose(&self, other: &Relation) -> Relation {
        let mut out = Relation::empty(self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                if self.contains(a as u32, b as u32) {
                    let row = other.rows[b].clone();
                    for (w, x) in out.rows[a].iter_mut().zip(row) {
                        *w |= x;
                    }
                }
            }
        }
        out
    }

    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let mut v = Vec::new();
        for a in 0..self.n as u32 {
            for b in 0..self.n as u32 {
                if self.contains(a, b) {
                    v.push((a, b));
                }
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `k`-fold alternating relational product `p ∘ q ∘ p ∘ ...`.
pub fn relcompose(p: &Partition, q: &Partition, k: usize) -> Relation {
    assert!(k >= 1, "relcompose needs at least one factor");
    let rp = p.as_relation();
    let rq = q.as_relation();
    let mut acc = rp.clone();
    for i in 1..k {
        acc = acc.compose(if i % 2 == 1 { &rq } else { &rp });
    }
    acc
}

/// `p ∘_k q = q ∘_k p`.
pub fn permute_k(p: &Partition, q: &Partition, k: usize) -> bool {
    relcompose(p, q, k) == relcompose(q, p, k)
}

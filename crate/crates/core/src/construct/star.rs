use super::{ConstructedAlgebra, SortLayout};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::subuniverse::TupleSet;

/// `beta*`: columns related when every entry is `beta`-related.
pub fn star_congruence(c: &ConstructedAlgebra, beta: &Partition) -> Result<Partition> {
    c.base().ensure_congruence(beta)?;
    if !beta.leq(&c.alpha()) {
        return Err(Error::Precondition(format!(
            "{beta} is not below the kernel {}",
            c.alpha()
        )));
    }
    let mut first: rustc_hash::FxHashMap<Vec<u32>, u32> = Default::default();
    let labels: Vec<u32> = (0..c.size() as u32)
        .map(|code| {
            let key: Vec<u32> = c.decode(code).iter().map(|&a| beta.label(a)).collect();
            *first.entry(key).or_insert(code)
        })
        .collect();
    Partition::from_labels(&labels)
}

/// Inverse of [`star_congruence`] on congruences of the constructed algebra.
pub fn unstar_congruence(c: &ConstructedAlgebra, gamma: &Partition) -> Result<Partition> {
    c.algebra().ensure_congruence(gamma)?;
    let n = c.base().size();
    let mut pairs = Vec::new();
    for (x, y) in gamma.pairs() {
        let cx = c.decode(x);
        let cy = c.decode(y);
        pairs.extend(cx.into_iter().zip(cy));
    }
    let beta = Partition::from_pairs(n, &pairs);
    if star_congruence(c, &beta)? != *gamma {
        return Err(Error::Inconsistency(format!(
            "congruence {gamma} of the constructed algebra is not the image of {beta}"
        )));
    }
    Ok(beta)
}

fn common_sort(layouts: &[&SortLayout], t: &[u32]) -> Option<u32> {
    let s = layouts.first()?.sort_of(*t.first()?);
    t.iter()
        .zip(layouts)
        .all(|(&a, l)| l.sort_of(a) == s)
        .then_some(s)
}

/// `B*`: the product over sorts `i` of `B ∩ D^(i)`, rearranged into columns.
pub fn star_subuniverse(b: &TupleSet, layouts: &[&SortLayout]) -> Result<TupleSet> {
    if layouts.len() != b.width() {
        return Err(Error::Precondition(format!(
            "{} layouts for tuples of width {}",
            layouts.len(),
            b.width()
        )));
    }
    let Some(m) = layouts.first().map(|l| l.num_sorts()) else {
        return Err(Error::Precondition("empty product".into()));
    };
    if layouts.iter().any(|l| l.num_sorts() != m) {
        return Err(Error::Precondition("components map onto images of different sizes".into()));
    }
    let mut rows: Vec<Vec<&[u32]>> = vec![Vec::new(); m];
    for t in b.tuples() {
        if let Some(s) = common_sort(layouts, t) {
            rows[s as usize].push(t);
        }
    }
    let sizes: Vec<usize> = layouts.iter().map(|l| l.size()).collect();
    if rows.iter().any(|r| r.is_empty()) {
        return TupleSet::new(sizes, Vec::new());
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; m];
    let mut column = vec![0u32; m];
    loop {
        let t: Vec<u32> = (0..layouts.len())
            .map(|j| {
                for i in 0..m {
                    column[i] = rows[i][pick[i]][j];
                }
                layouts[j].encode(&column)
            })
            .collect::<Result<_>>()?;
        out.push(t);
        let mut i = m;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            pick[i] += 1;
            if pick[i] < rows[i].len() {
                advanced = true;
                break;
            }
            pick[i] = 0;
        }
        if !advanced {
            break;
        }
    }
    TupleSet::new(sizes, out)
}

/// `x~`: the column tuple whose own-sort row is `x` and whose other rows are
/// the padding tuples `d^(i')`.
pub fn tilde_map(x: &[u32], layouts: &[&SortLayout], paddings: &[Vec<u32>]) -> Result<Vec<u32>> {
    let Some(s) = common_sort(layouts, x) else {
        return Err(Error::Precondition("tuple entries lie in different sorts".into()));
    };
    let m = layouts[0].num_sorts();
    if paddings.len() != m {
        return Err(Error::Precondition(format!("{} padding tuples for {m} sorts", paddings.len())));
    }
    for (i, d) in paddings.iter().enumerate() {
        if d.len() != x.len() || common_sort(layouts, d) != Some(i as u32) {
            return Err(Error::Precondition(format!("padding tuple {i} is not in sort {i}")));
        }
    }
    let mut column = vec![0u32; m];
    (0..x.len())
        .map(|j| {
            for (i, d) in paddings.iter().enumerate() {
                column[i] = if i as u32 == s { x[j] } else { d[j] };
            }
            layouts[j].encode(&column)
        })
        .collect()
}

/// Columnwise action of an endomorphism of `A` that preserves every sort.
pub fn star_endomorphism(c: &ConstructedAlgebra, psi: &[u32]) -> Result<Vec<u32>> {
    let base = c.base();
    if !base.is_homomorphism(psi, base) {
        return Err(Error::NotHomomorphism("map is not an endomorphism of the base".into()));
    }
    if (0..base.size() as u32).any(|a| c.chi().apply(psi[a as usize]) != c.chi().apply(a)) {
        return Err(Error::Precondition("endomorphism moves an element to another sort".into()));
    }
    (0..c.size() as u32)
        .map(|code| {
            let col: Vec<u32> = c.decode(code).iter().map(|&a| psi[a as usize]).collect();
            c.encode(&col)
        })
        .collect()
}

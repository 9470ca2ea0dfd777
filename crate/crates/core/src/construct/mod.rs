//! The algebra `C(A, chi)` whose universe is the set of columns
//! `D^(0) x ... x D^(m-1)` over the kernel classes of `chi: A -> I`.

mod identities;
mod star;
mod terms;

pub use identities::{check_dalg_identities, check_identities_raw, IdentityReport};
pub use star::{
    star_congruence, star_endomorphism, star_subuniverse, tilde_map, unstar_congruence,
};
pub use terms::{breve, coordinate_terms, eval_coordinatewise, lift_term};

use serde::{Deserialize, Serialize};

use crate::algebra::{checked_pow, FiniteAlgebra, MixedRadix, Signature, Symbol};
use crate::catalog::Catalog;
use crate::error::{cap, Error, Result};
use crate::hom::{quotient, SortedHom};
use crate::limits::Limits;
use crate::partition::Partition;

/// Codec between columns of sort elements and their integer codes.
///
/// A column `(c_0, ..., c_{m-1})` with `c_i` in sort `i` is encoded as
/// `sum idx_i * prod_{i' > i} |D^(i')|`, where `idx_i` is the position of
/// `c_i` in the sorted sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortLayout {
    sorts: Vec<Vec<u32>>,
    position: Vec<u32>,
    sort_of: Vec<u32>,
    radix: MixedRadix,
}

impl SortLayout {
    pub fn new(labels: &[u32], m: usize) -> Result<Self> {
        let mut sorts = vec![Vec::new(); m];
        let mut position = vec![0u32; labels.len()];
        for (a, &l) in labels.iter().enumerate() {
            let s = sorts
                .get_mut(l as usize)
                .ok_or_else(|| Error::Precondition(format!("label {l} outside 0..{m}")))?;
            position[a] = s.len() as u32;
            s.push(a as u32);
        }
        if let Some(i) = sorts.iter().position(|s| s.is_empty()) {
            return Err(Error::Precondition(format!("sort {i} is empty")));
        }
        let radix = MixedRadix::new(sorts.iter().map(|s| s.len()).collect());
        Ok(SortLayout {
            sorts,
            position,
            sort_of: labels.to_vec(),
            radix,
        })
    }

    pub fn from_hom(chi: &SortedHom) -> Result<Self> {
        SortLayout::new(chi.map(), chi.num_sorts())
    }

    pub fn num_sorts(&self) -> usize {
        self.sorts.len()
    }

    pub fn sorts(&self) -> &[Vec<u32>] {
        &self.sorts
    }

    pub fn sort_of(&self, a: u32) -> u32 {
        self.sort_of[a as usize]
    }

    /// Number of columns.
    pub fn size(&self) -> usize {
        self.radix.total()
    }

    pub fn encode(&self, column: &[u32]) -> Result<u32> {
        if column.len() != self.sorts.len() {
            return Err(Error::Precondition(format!(
                "column of length {} for {} sorts",
                column.len(),
                self.sorts.len()
            )));
        }
        let mut digits = Vec::with_capacity(column.len());
        for (i, &a) in column.iter().enumerate() {
            if a as usize >= self.sort_of.len() || self.sort_of[a as usize] != i as u32 {
                return Err(Error::Precondition(format!("entry {a} is not in sort {i}")));
            }
            digits.push(self.position[a as usize]);
        }
        Ok(self.radix.encode(&digits) as u32)
    }

    pub fn decode(&self, code: u32) -> Vec<u32> {
        self.radix
            .decode(code as usize)
            .iter()
            .enumerate()
            .map(|(i, &d)| self.sorts[i][d as usize])
            .collect()
    }
}

/// Role of an operation symbol of `C(A, chi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructedSymbol {
    /// `d`, the diagonal of an `m x m` matrix of columns.
    Diagonal,
    /// `f^<i_1,...,i_k>`: writes `f(a_1^(i_1), ..., a_k^(i_k))` at sort
    /// `output = f(i_1, ..., i_k)` of the first argument column.
    Sorted {
        base_op: usize,
        inputs: Vec<u32>,
        output: u32,
    },
}

pub fn sorted_symbol_name(base: &str, inputs: &[u32]) -> String {
    let idx: Vec<String> = inputs.iter().map(|i| i.to_string()).collect();
    format!("{base}^<{}>", idx.join(","))
}

fn parse_sorted_symbol(name: &str) -> Option<(&str, Vec<u32>)> {
    let (base, rest) = name.rsplit_once("^<")?;
    let inner = rest.strip_suffix('>')?;
    let inputs = inner
        .split(',')
        .map(|s| s.parse().ok())
        .collect::<Option<Vec<u32>>>()?;
    Some((base, inputs))
}

/// `C(A, chi)` together with the data needed to interpret it.
#[derive(Clone, Debug)]
pub struct ConstructedAlgebra {
    chi: SortedHom,
    layout: SortLayout,
    algebra: FiniteAlgebra,
    symbols: Vec<ConstructedSymbol>,
}

/// Sort data written next to a constructed algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSidecar {
    pub sorts: Vec<Vec<u32>>,
    pub base: String,
    pub chi: Vec<u32>,
}

fn constructed_signature(chi: &SortedHom) -> Result<(Signature, Vec<ConstructedSymbol>)> {
    let base = chi.domain();
    let m = chi.num_sorts();
    let mut syms = vec![Symbol {
        name: "d".into(),
        arity: m,
    }];
    let mut roles = vec![ConstructedSymbol::Diagonal];
    for (op, s) in base.signature().symbols().iter().enumerate() {
        if s.name == "d" || parse_sorted_symbol(&s.name).is_some() {
            return Err(Error::Precondition(format!(
                "base symbol `{}` clashes with constructed symbol names",
                s.name
            )));
        }
        let mut idx = vec![0u32; s.arity];
        loop {
            syms.push(Symbol {
                name: sorted_symbol_name(&s.name, &idx),
                arity: s.arity,
            });
            roles.push(ConstructedSymbol::Sorted {
                base_op: op,
                inputs: idx.clone(),
                output: chi.codomain().apply(op, &idx),
            });
            if !crate::algebra::increment(&mut idx, m as u32) {
                break;
            }
        }
    }
    Ok((Signature::new(syms)?, roles))
}

/// Builds `C(A, chi)`.
pub fn construct_c(chi: &SortedHom, limits: &Limits) -> Result<ConstructedAlgebra> {
    let layout = SortLayout::from_hom(chi)?;
    let (sig, symbols) = constructed_signature(chi)?;
    let size = layout.size();
    for s in sig.symbols() {
        let entries = checked_pow(size, s.arity).unwrap_or(usize::MAX);
        if entries > limits.table_cap {
            return Err(cap(
                format!("table of `{}`", s.name),
                entries as u128,
                limits.table_cap as u128,
            ));
        }
    }
    let base = chi.domain();
    let columns: Vec<Vec<u32>> = (0..size as u32).map(|c| layout.decode(c)).collect();
    let mut sub = Vec::new();
    let algebra = FiniteAlgebra::from_fn(
        format!("C({};{})", base.name(), label_string(chi.map())),
        size,
        sig,
        |op, args| {
            let mut col: Vec<u32> = match &symbols[op] {
                ConstructedSymbol::Diagonal => args
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| columns[a as usize][i])
                    .collect(),
                ConstructedSymbol::Sorted {
                    base_op,
                    inputs,
                    output,
                } => {
                    sub.clear();
                    sub.extend(
                        args.iter()
                            .zip(inputs)
                            .map(|(&a, &i)| columns[a as usize][i as usize]),
                    );
                    let mut c = columns[args[0] as usize].clone();
                    c[*output as usize] = base.apply(*base_op, &sub);
                    c
                }
            };
            let code = layout.encode(&col).expect("constructed column is well sorted");
            col.clear();
            code
        },
    )?;
    Ok(ConstructedAlgebra {
        chi: chi.clone(),
        layout,
        algebra,
        symbols,
    })
}

fn label_string(labels: &[u32]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

impl ConstructedAlgebra {
    /// Reattaches sort data to an algebra table set, which may be altered.
    pub fn from_parts(algebra: FiniteAlgebra, chi: SortedHom) -> Result<Self> {
        let layout = SortLayout::from_hom(&chi)?;
        let (sig, symbols) = constructed_signature(&chi)?;
        if algebra.signature() != &sig {
            return Err(Error::SignatureMismatch(
                "algebra does not carry the constructed signature for this map".into(),
            ));
        }
        if algebra.size() != layout.size() {
            return Err(Error::InvalidAlgebra(format!(
                "size {} but the sorts give {} columns",
                algebra.size(),
                layout.size()
            )));
        }
        Ok(ConstructedAlgebra {
            chi,
            layout,
            algebra,
            symbols,
        })
    }

    /// Rebuilds the sort data from a sidecar, resolving the base algebra by name.
    pub fn from_sidecar(algebra: FiniteAlgebra, sidecar: &ConstructionSidecar, catalog: &Catalog) -> Result<Self> {
        let base = catalog.resolve(&sidecar.base)?;
        let chi = SortedHom::from_labels(&base, &sidecar.chi)?;
        let c = ConstructedAlgebra::from_parts(algebra, chi)?;
        if c.layout.sorts() != sidecar.sorts.as_slice() {
            return Err(Error::Precondition("sidecar sorts disagree with its map".into()));
        }
        Ok(c)
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn chi(&self) -> &SortedHom {
        &self.chi
    }

    pub fn base(&self) -> &FiniteAlgebra {
        self.chi.domain()
    }

    pub fn image(&self) -> &FiniteAlgebra {
        self.chi.codomain()
    }

    pub fn layout(&self) -> &SortLayout {
        &self.layout
    }

    pub fn symbols(&self) -> &[ConstructedSymbol] {
        &self.symbols
    }

    pub fn num_sorts(&self) -> usize {
        self.layout.num_sorts()
    }

    pub fn size(&self) -> usize {
        self.algebra.size()
    }

    pub fn encode(&self, column: &[u32]) -> Result<u32> {
        self.layout.encode(column)
    }

    pub fn decode(&self, code: u32) -> Vec<u32> {
        self.layout.decode(code)
    }

    pub fn sidecar(&self) -> ConstructionSidecar {
        ConstructionSidecar {
            sorts: self.layout.sorts().to_vec(),
            base: self.base().name().to_string(),
            chi: self.chi.map().to_vec(),
        }
    }

    /// The kernel of `chi` on the base algebra.
    pub fn alpha(&self) -> Partition {
        self.chi.kernel()
    }
}

/// `chi / beta : A/beta -> I` for `beta <= ker chi`.
pub fn quotient_hom(chi: &SortedHom, beta: &Partition) -> Result<SortedHom> {
    if !beta.leq(&chi.kernel()) {
        return Err(Error::Precondition(format!("{beta} is not below the kernel of the map")));
    }
    let (q, nat) = quotient(chi.domain(), beta)?;
    let mut map = vec![0u32; q.size()];
    for (a, &c) in nat.iter().enumerate() {
        map[c as usize] = chi.apply(a as u32);
    }
    SortedHom::new(q, chi.codomain().clone(), map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn z4_construction() -> ConstructedAlgebra {
        let chi = SortedHom::natural(&catalog::z4g(), &Partition::parse(4, "02|13").unwrap()).unwrap();
        construct_c(&chi, &Limits::default()).unwrap()
    }

    #[test]
    fn carrier_and_encoding() {
        let c = z4_construction();
        assert_eq!(c.layout().sorts(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(c.size(), 4);
        assert_eq!(c.decode(0), vec![0, 1]);
        assert_eq!(c.decode(3), vec![2, 3]);
        assert_eq!(c.encode(&[2, 1]).unwrap(), 2);
        assert!(c.encode(&[1, 1]).is_err());
    }

    #[test]
    fn sorted_operation_example() {
        let c = z4_construction();
        let a = c.algebra();
        // +^<1,1> on columns (0,1),(2,3): 1+3 = 0 lands at sort 0
        let op = a.op_index("+^<1,1>").unwrap();
        let x = c.encode(&[0, 1]).unwrap();
        let y = c.encode(&[2, 3]).unwrap();
        assert_eq!(c.decode(a.apply(op, &[x, y])), vec![0, 1]);
        let op01 = a.op_index("+^<0,1>").unwrap();
        // 0 + 3 = 3 lands at sort 1
        assert_eq!(c.decode(a.apply(op01, &[x, y])), vec![0, 3]);
        let d = a.op_index("d").unwrap();
        assert_eq!(c.decode(a.apply(d, &[x, y])), vec![0, 3]);
    }

    #[test]
    fn single_sort_is_a_copy() {
        let chi = SortedHom::natural(&catalog::z4g(), &Partition::total(4)).unwrap();
        let c = construct_c(&chi, &Limits::default()).unwrap();
        assert_eq!(c.size(), 4);
        let plus = c.algebra().op_index("+^<0,0>").unwrap();
        assert_eq!(c.algebra().table(plus), catalog::z4g().table(0));
    }

    #[test]
    fn symbol_names_parse_back() {
        assert_eq!(parse_sorted_symbol("+^<0,1>"), Some(("+", vec![0, 1])));
        assert_eq!(parse_sorted_symbol("d"), None);
    }
}

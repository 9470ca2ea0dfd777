use super::{sorted_symbol_name, ConstructedAlgebra, ConstructedSymbol};
use crate::error::{Error, Result};
use crate::term::{term_table, Term};

/// Variable index of `x_j^(i)` among the `m * k` coordinate variables.
fn coord_var(j: usize, i: usize, m: usize) -> usize {
    j * m + i
}

/// The `m` coordinate terms of a term of `C(A, chi)`.
///
/// Coordinate term `i` is a term over the base signature in variables
/// `x_j^(i')`, numbered `j * m + i'`, giving sort `i` of the result.
pub fn coordinate_terms(c: &ConstructedAlgebra, t: &Term) -> Result<Vec<Term>> {
    let m = c.num_sorts();
    let sig = c.algebra().signature();
    let base_sig = c.base().signature();
    fn go(
        c: &ConstructedAlgebra,
        t: &Term,
        m: usize,
        sig: &crate::algebra::Signature,
        base_sig: &crate::algebra::Signature,
    ) -> Result<Vec<Term>> {
        match t {
            Term::Var(j) => Ok((0..m).map(|i| Term::Var(coord_var(*j, i, m))).collect()),
            Term::App(s, args) => {
                let op = sig.index_of(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?;
                if sig.arity(op) != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: s.clone(),
                        expected: sig.arity(op),
                        found: args.len(),
                    });
                }
                let kids = args
                    .iter()
                    .map(|a| go(c, a, m, sig, base_sig))
                    .collect::<Result<Vec<_>>>()?;
                Ok(match &c.symbols()[op] {
                    ConstructedSymbol::Diagonal => (0..m).map(|i| kids[i][i].clone()).collect(),
                    ConstructedSymbol::Sorted {
                        base_op,
                        inputs,
                        output,
                    } => (0..m)
                        .map(|i| {
                            if i as u32 == *output {
                                Term::App(
                                    base_sig.name(*base_op).to_string(),
                                    kids.iter()
                                        .zip(inputs)
                                        .map(|(k, &q)| k[q as usize].clone())
                                        .collect(),
                                )
                            } else {
                                kids[0][i].clone()
                            }
                        })
                        .collect(),
                })
            }
        }
    }
    go(c, t, m, sig, base_sig)
}

/// Evaluates a term of `C(A, chi)` through its coordinate terms in `A`.
pub fn eval_coordinatewise(c: &ConstructedAlgebra, coords: &[Term], args: &[u32]) -> Result<u32> {
    let m = c.num_sorts();
    let mut env = vec![0u32; args.len() * m];
    for (j, &a) in args.iter().enumerate() {
        for (i, v) in c.decode(a).into_iter().enumerate() {
            env[coord_var(j, i, m)] = v;
        }
    }
    let col = coords
        .iter()
        .map(|t| crate::term::eval_term(c.base(), t, &env))
        .collect::<Result<Vec<_>>>()?;
    c.encode(&col)
}

/// A term of `C(A, chi)` whose coordinate terms are the given ones.
///
/// Each `ts[i]` is a base term in the `m * k` coordinate variables and must
/// evaluate to `i` in the image algebra when `x_j^(i')` is set to `i'`.
pub fn lift_term(c: &ConstructedAlgebra, ts: &[Term], k: usize) -> Result<Term> {
    let m = c.num_sorts();
    if ts.len() != m {
        return Err(Error::Precondition(format!("{} coordinate terms for {m} sorts", ts.len())));
    }
    let image = c.image();
    let e: Vec<u32> = (0..m * k).map(|v| (v % m) as u32).collect();
    for (i, t) in ts.iter().enumerate() {
        if t.arity() > m * k {
            return Err(Error::Precondition(format!(
                "coordinate term {i} uses x{} beyond the {} coordinate variables",
                t.arity() - 1,
                m * k
            )));
        }
        let v = crate::term::eval_term(image, t, &e)?;
        if v != i as u32 {
            return Err(Error::Precondition(format!(
                "coordinate term {i} evaluates to sort {v} instead of {i}"
            )));
        }
    }
    let sig = c.base().signature();
    fn build(
        t: &Term,
        m: usize,
        sig: &crate::algebra::Signature,
        image: &crate::algebra::FiniteAlgebra,
    ) -> Result<(Term, u32)> {
        match t {
            Term::Var(v) => Ok((Term::Var(v / m), (v % m) as u32)),
            Term::App(s, args) => {
                let op = sig.index_of(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?;
                if sig.arity(op) != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: s.clone(),
                        expected: sig.arity(op),
                        found: args.len(),
                    });
                }
                let kids = args
                    .iter()
                    .map(|a| build(a, m, sig, image))
                    .collect::<Result<Vec<_>>>()?;
                let sorts: Vec<u32> = kids.iter().map(|k| k.1).collect();
                let out = image.apply(op, &sorts);
                Ok((
                    Term::App(
                        sorted_symbol_name(s, &sorts),
                        kids.into_iter().map(|k| k.0).collect(),
                    ),
                    out,
                ))
            }
        }
    }
    let mut parts = Vec::with_capacity(m);
    for t in ts {
        parts.push(build(t, m, sig, image)?.0);
    }
    if m == 1 {
        return Ok(parts.pop().expect("one part"));
    }
    Ok(Term::App("d".into(), parts))
}

/// Lift of an idempotent base term: coordinate term `i` is `t(x_1^(i), ..., x_k^(i))`.
pub fn breve(c: &ConstructedAlgebra, t: &Term, k: usize) -> Result<Term> {
    let base = c.base();
    let table = term_table(base, t, k)?;
    let n = base.size();
    for a in 0..n {
        let diag: usize = (0..k).fold(0, |acc, _| acc * n + a);
        if table[diag] != a as u32 {
            return Err(Error::Precondition(format!("term is not idempotent: t({a},...,{a}) = {}", table[diag])));
        }
    }
    let m = c.num_sorts();
    let ts: Vec<Term> = (0..m)
        .map(|i| t.map_vars(&|j| coord_var(j, i, m)))
        .collect();
    lift_term(c, &ts, k)
}

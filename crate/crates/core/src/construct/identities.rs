use serde::Serialize;

use super::{ConstructedAlgebra, ConstructedSymbol};
use crate::algebra::{checked_pow, increment, FiniteAlgebra};
use crate::error::{cap, Error, Result};
use crate::limits::Limits;

/// Outcome of the exhaustive identity check; `violation` names the first failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub holds: bool,
    pub checked: u128,
    pub violation: Option<String>,
}

struct Ctx<'a> {
    alg: &'a FiniteAlgebra,
    d: usize,
    m: usize,
}

impl Ctx<'_> {
    fn d(&self, args: &[u32]) -> u32 {
        self.alg.apply(self.d, args)
    }

    /// `d(u, ..., u, x, u, ..., u)` with `x` at position `l`.
    fn dl(&self, l: usize, x: u32, u: u32) -> u32 {
        let mut args = vec![u; self.m];
        args[l] = x;
        self.d(&args)
    }
}

fn budget(n: usize, vars: usize, limits: &Limits, what: &str) -> Result<usize> {
    match checked_pow(n, vars) {
        Some(c) if (c as u128) <= limits.identity_cap => Ok(c),
        other => Err(cap(
            format!("exhaustive check of {what}"),
            other.map(|c| c as u128).unwrap_or(u128::MAX),
            limits.identity_cap,
        )),
    }
}

/// Checks the defining identities of the constructed variety on the
/// operation tables of `c`: idempotence and the rectangular law of `d`,
/// and, for each `g = f^<i_1..i_k>` with output sort `o`,
/// `d_o(g(x), y) = d_o(g(d_{i_1}(x_1, v_1), ...), y)` and
/// `d_j(g(x), y) = d_j(x_1, y)` for `j != o`.
pub fn check_dalg_identities(c: &ConstructedAlgebra, limits: &Limits) -> Result<IdentityReport> {
    check_identities_raw(c.algebra(), c.num_sorts(), c.symbols(), limits)
}

/// As [`check_dalg_identities`], for tables that may have been altered.
pub fn check_identities_raw(
    alg: &FiniteAlgebra,
    m: usize,
    symbols: &[ConstructedSymbol],
    limits: &Limits,
) -> Result<IdentityReport> {
    let d = symbols
        .iter()
        .position(|s| *s == ConstructedSymbol::Diagonal)
        .ok_or_else(|| Error::Precondition("no diagonal operation".into()))?;
    if symbols.len() != alg.signature().len() || alg.signature().arity(d) != m {
        return Err(Error::Precondition("symbol roles do not match the signature".into()));
    }
    let ctx = Ctx { alg, d, m };
    let n = alg.size();
    let nu = n as u32;
    let mut checked: u128 = 0;
    let fail = |checked: u128, msg: String| {
        Ok(IdentityReport {
            holds: false,
            checked,
            violation: Some(msg),
        })
    };

    for x in 0..nu {
        checked += 1;
        let v = ctx.d(&vec![x; m]);
        if v != x {
            return fail(checked, format!("d({x},...,{x}) = {v}"));
        }
    }

    let count = budget(n, m * m, limits, "d(d(..),...,d(..)) = d(x11,...,xmm)")?;
    let mut xs = vec![0u32; m * m];
    let mut inner = vec![0u32; m];
    let mut diag = vec![0u32; m];
    for _ in 0..count {
        checked += 1;
        for r in 0..m {
            inner[r] = ctx.d(&xs[r * m..(r + 1) * m]);
            diag[r] = xs[r * m + r];
        }
        let lhs = ctx.d(&inner);
        let rhs = ctx.d(&diag);
        if lhs != rhs {
            return fail(checked, format!("d of rows {xs:?} gives {lhs}, diagonal gives {rhs}"));
        }
        increment(&mut xs, nu);
    }

    for (op, role) in symbols.iter().enumerate() {
        let ConstructedSymbol::Sorted { inputs, output, .. } = role else {
            continue;
        };
        let name = alg.signature().name(op);
        let k = inputs.len();
        let o = *output as usize;
        let count = budget(n, 2 * k + 1, limits, name)?;
        let mut vars = vec![0u32; 2 * k + 1];
        let mut moved = vec![0u32; k];
        for _ in 0..count {
            checked += 1;
            let (x, rest) = vars.split_at(k);
            let (v, y) = rest.split_at(k);
            let y = y[0];
            for q in 0..k {
                moved[q] = ctx.dl(inputs[q] as usize, x[q], v[q]);
            }
            let lhs = ctx.dl(o, alg.apply(op, x), y);
            let rhs = ctx.dl(o, alg.apply(op, &moved), y);
            if lhs != rhs {
                return fail(
                    checked,
                    format!("`{name}` at {x:?}: sort {o} depends on entries outside its input sorts (v = {v:?}, y = {y})"),
                );
            }
            increment(&mut vars, nu);
        }
        let count = budget(n, k + 1, limits, name)?;
        let mut vars = vec![0u32; k + 1];
        for _ in 0..count {
            let (x, y) = vars.split_at(k);
            let y = y[0];
            let g = alg.apply(op, x);
            for j in (0..m).filter(|&j| j != o) {
                checked += 1;
                let lhs = ctx.dl(j, g, y);
                let rhs = ctx.dl(j, x[0], y);
                if lhs != rhs {
                    return fail(checked, format!("`{name}` at {x:?} changes sort {j} of its first argument"));
                }
            }
            increment(&mut vars, nu);
        }
    }
    Ok(IdentityReport {
        holds: true,
        checked,
        violation: None,
    })
}

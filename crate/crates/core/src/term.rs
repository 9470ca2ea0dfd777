use std::fmt;

use crate::algebra::{FiniteAlgebra, Signature};
use crate::error::{Error, Result};

/// Term over named operation symbols with variables `x0, x1, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(sym: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(sym.into(), args)
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn arity(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, args) => args.iter().map(Term::arity).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Replaces every variable `x_i` by `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i].clone(),
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.substitute(subst)).collect()),
        }
    }

    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Var(i) => Term::Var(f(*i)),
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn parse(text: &str) -> Result<Term> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let t = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input after term: `{}`", tokens[pos..].join(" "))));
        }
        Ok(t)
    }

    pub fn compile(&self, sig: &Signature) -> Result<CompiledTerm> {
        let mut nodes = Vec::new();
        let root = compile_into(self, sig, &mut nodes)?;
        Ok(CompiledTerm {
            nodes,
            root,
            arity: self.arity(),
        })
    }
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_var(tok: &str) -> Option<usize> {
    tok.strip_prefix('x').and_then(|d| d.parse().ok())
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Result<Term> {
    let Some(tok) = tokens.get(*pos) else {
        return Err(Error::Parse("unexpected end of term".into()));
    };
    *pos += 1;
    if tok == "(" {
        let Some(sym) = tokens.get(*pos) else {
            return Err(Error::Parse("missing symbol after `(`".into()));
        };
        if sym == "(" || sym == ")" {
            return Err(Error::Parse("expected operation symbol".into()));
        }
        *pos += 1;
        let mut args = Vec::new();
        loop {
            match tokens.get(*pos).map(String::as_str) {
                None => return Err(Error::Parse("unbalanced parentheses".into())),
                Some(")") => {
                    *pos += 1;
                    break;
                }
                _ => args.push(parse_tokens(tokens, pos)?),
            }
        }
        if args.is_empty() {
            return Err(Error::Parse(format!("`{sym}` applied to no arguments")));
        }
        Ok(Term::App(sym.clone(), args))
    } else if tok == ")" {
        Err(Error::Parse("unexpected `)`".into()))
    } else if let Some(i) = parse_var(tok) {
        Ok(Term::Var(i))
    } else {
        Err(Error::Parse(format!("bare token `{tok}` is not a variable")))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(s, args) => {
                write!(f, "({s}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Var(usize),
    App(usize, Vec<usize>),
}

/// Term resolved against a signature, evaluated bottom-up without lookups.
#[derive(Clone, Debug)]
pub struct CompiledTerm {
    nodes: Vec<Node>,
    root: usize,
    arity: usize,
}

fn compile_into(t: &Term, sig: &Signature, nodes: &mut Vec<Node>) -> Result<usize> {
    let node = match t {
        Term::Var(i) => Node::Var(*i),
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
                .map(|a| compile_into(a, sig, nodes))
                .collect::<Result<Vec<_>>>()?;
            Node::App(op, kids)
        }
    };
    nodes.push(node);
    Ok(nodes.len() - 1)
}

impl CompiledTerm {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, alg: &FiniteAlgebra, env: &[u32], scratch: &mut Vec<u32>) -> u32 {
        scratch.clear();
        let mut args = Vec::new();
        for node in &self.nodes {
            let v = match node {
                Node::Var(i) => env[*i],
                Node::App(op, kids) => {
                    args.clear();
                    args.extend(kids.iter().map(|&k| scratch[k]));
                    alg.apply(*op, &args)
                }
            };
            scratch.push(v);
        }
        scratch[self.root]
    }
}

/// Evaluates a term at an assignment of the variables.
pub fn eval_term(alg: &FiniteAlgebra, term: &Term, env: &[u32]) -> Result<u32> {
    if term.arity() > env.len() {
        return Err(Error::Precondition(format!(
            "term uses x{} but only {} values were given",
            term.arity() - 1,
            env.len()
        )));
    }
    if let Some(&bad) = env.iter().find(|&&v| v as usize >= alg.size()) {
        return Err(Error::Precondition(format!("value {bad} outside the universe")));
    }
    let c = term.compile(alg.signature())?;
    Ok(c.eval(alg, env, &mut Vec::new()))
}

/// Term function as a table over `{0..n-1}^arity`, last variable fastest.
pub fn term_table(alg: &FiniteAlgebra, term: &Term, arity: usize) -> Result<Vec<u32>> {
    if term.arity() > arity {
        return Err(Error::Precondition(format!(
            "term uses x{} but arity is {arity}",
            term.arity() - 1
        )));
    }
    let c = term.compile(alg.signature())?;
    let len = crate::algebra::checked_pow(alg.size(), arity)
        .ok_or_else(|| Error::Precondition("term table too large".into()))?;
    let mut env = vec![0u32; arity];
    let mut scratch = Vec::new();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(c.eval(alg, &env, &mut scratch));
        crate::algebra::increment(&mut env, alg.size() as u32);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let t = Term::parse("(+ x0 (- x1))").unwrap();
        assert_eq!(t.to_string(), "(+ x0 (- x1))");
        assert_eq!(t.arity(), 2);
        assert_eq!(t.depth(), 2);
        let u = Term::parse("(f^<0,1> x0 (d x1 x2))").unwrap();
        assert_eq!(Term::parse(&u.to_string()).unwrap(), u);
    }

    #[test]
    fn parse_errors() {
        assert!(Term::parse("(+ x0").is_err());
        assert!(Term::parse("+").is_err());
        assert!(Term::parse("(+ x0 x1) x2").is_err());
        assert!(Term::parse("()").is_err());
    }

    #[test]
    fn evaluation() {
        let sig = Signature::from_pairs(&[("+", 2), ("-", 1)]).unwrap();
        let z4 = FiniteAlgebra::from_fn("Z4", 4, sig, |op, a| match op {
            0 => (a[0] + a[1]) % 4,
            _ => (4 - a[0]) % 4,
        })
        .unwrap();
        let t = Term::parse("(+ x0 (- x1))").unwrap();
        assert_eq!(eval_term(&z4, &t, &[1, 3]).unwrap(), 2);
        assert!(eval_term(&z4, &Term::parse("(* x0 x1)").unwrap(), &[0, 0]).is_err());
        assert!(eval_term(&z4, &Term::parse("(+ x0)").unwrap(), &[0]).is_err());
        assert!(eval_term(&z4, &t, &[0]).is_err());
    }
}

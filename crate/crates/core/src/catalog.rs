use std::path::{Path, PathBuf};

use crate::algebra::{FiniteAlgebra, Signature};
use crate::error::{Error, Result};

/// Environment variable naming the default catalog directory.
pub const CATALOG_ENV: &str = "UALG_CATALOG";

fn group_sig() -> Signature {
    Signature::from_pairs(&[("+", 2), ("-", 1)]).expect("static signature")
}

pub fn z2() -> FiniteAlgebra {
    FiniteAlgebra::from_fn("Z2", 2, group_sig(), |op, a| match op {
        0 => (a[0] + a[1]) % 2,
        _ => a[0],
    })
    .expect("Z2")
}

/// Cyclic group `Z_n` with `+` and unary `-`.
pub fn cyclic(n: u32) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(format!("Z{n}"), n as usize, group_sig(), |op, a| match op {
        0 => (a[0] + a[1]) % n,
        _ => (n - a[0]) % n,
    })
    .expect("cyclic group")
}

pub fn z4g() -> FiniteAlgebra {
    cyclic(4).with_name("Z4g")
}

/// `Z4` with `+`, `-` and `b(x,y) = 2xy`.
pub fn z4s() -> FiniteAlgebra {
    let sig = Signature::from_pairs(&[("+", 2), ("-", 1), ("b", 2)]).expect("static signature");
    FiniteAlgebra::from_fn("Z4s", 4, sig, |op, a| match op {
        0 => (a[0] + a[1]) % 4,
        1 => (4 - a[0]) % 4,
        _ => (2 * a[0] * a[1]) % 4,
    })
    .expect("Z4s")
}

/// Two-element meet semilattice with operation `*`.
pub fn a2() -> FiniteAlgebra {
    two_element_binary(0b1000).with_name("A2")
}

/// Two-element lattice.
pub fn lattice2() -> FiniteAlgebra {
    let sig = Signature::from_pairs(&[("meet", 2), ("join", 2)]).expect("static signature");
    FiniteAlgebra::from_fn("L2", 2, sig, |op, a| match op {
        0 => a[0] & a[1],
        _ => a[0] | a[1],
    })
    .expect("L2")
}

/// Klein four-group as the product `Z2 x Z2`.
pub fn klein() -> FiniteAlgebra {
    let z = z2();
    FiniteAlgebra::product(&[&z, &z], 1 << 20)
        .expect("Klein")
        .with_name("Klein")
}

/// Symmetric group on three letters with `*` and inverse `-`.
pub fn s3() -> FiniteAlgebra {
    let perms: [[u32; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let idx = |p: [u32; 3]| perms.iter().position(|q| *q == p).unwrap() as u32;
    let sig = Signature::from_pairs(&[("*", 2), ("-", 1)]).expect("static signature");
    FiniteAlgebra::from_fn("S3", 6, sig, |op, a| {
        let p = perms[a[0] as usize];
        match op {
            0 => {
                let q = perms[a[1] as usize];
                idx([p[q[0] as usize], p[q[1] as usize], p[q[2] as usize]])
            }
            _ => {
                let mut inv = [0u32; 3];
                for (i, &v) in p.iter().enumerate() {
                    inv[v as usize] = i as u32;
                }
                idx(inv)
            }
        }
    })
    .expect("S3")
}

/// Two-element algebra with one binary operation `*` whose value at
/// `(a, b)` is bit `2a + b` of `code`.
pub fn two_element_binary(code: u8) -> FiniteAlgebra {
    let sig = Signature::from_pairs(&[("*", 2)]).expect("static signature");
    FiniteAlgebra::from_fn(format!("B{code}"), 2, sig, |_, a| {
        ((code >> (2 * a[0] + a[1])) & 1) as u32
    })
    .expect("two-element algebra")
}

pub fn all_two_element_binary() -> Vec<FiniteAlgebra> {
    (0..16).map(two_element_binary).collect()
}

pub const BUILTIN_NAMES: &[&str] = &["Z2", "Z3", "Z4g", "Z4s", "A2", "L2", "Klein", "S3"];

pub fn builtin(name: &str) -> Option<FiniteAlgebra> {
    Some(match name {
        "Z2" => z2(),
        "Z3" => cyclic(3),
        "Z4g" | "Z4" => z4g(),
        "Z4s" => z4s(),
        "A2" => a2(),
        "L2" => lattice2(),
        "Klein" => klein(),
        "S3" => s3(),
        _ => {
            let code: u8 = name.strip_prefix('B')?.parse().ok()?;
            if code >= 16 {
                return None;
            }
            two_element_binary(code)
        }
    })
}

/// Resolves algebra names against files, a catalog directory and the built-ins.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    dir: Option<PathBuf>,
}

impl Catalog {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Catalog { dir }
    }

    pub fn from_env() -> Self {
        Catalog {
            dir: std::env::var_os(CATALOG_ENV).map(PathBuf::from),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn resolve(&self, name: &str) -> Result<FiniteAlgebra> {
        let p = Path::new(name);
        if p.is_file() {
            return FiniteAlgebra::load(p);
        }
        if let Some(dir) = &self.dir {
            for cand in [dir.join(name), dir.join(format!("{name}.json"))] {
                if cand.is_file() {
                    return FiniteAlgebra::load(&cand);
                }
            }
        }
        builtin(name).ok_or_else(|| Error::Precondition(format!("unknown algebra `{name}`")))
    }
}

//! Finite universal algebras: congruence lattices, higher commutators,
//! tame congruence types, and the construction that turns a congruence
//! interval into an algebra with the same congruence behaviour.

pub mod algebra;
pub mod catalog;
pub mod commutator;
pub mod congruence;
pub mod construct;
pub mod error;
pub mod hom;
pub mod limits;
pub mod partition;
pub mod smp;
pub mod subuniverse;
pub mod supernil;
pub mod tct;
pub mod term;

pub use algebra::{FiniteAlgebra, Signature, Symbol};
pub use error::{Error, Result};
pub use hom::SortedHom;
pub use limits::Limits;
pub use partition::Partition;
pub use subuniverse::TupleSet;
pub use term::Term;

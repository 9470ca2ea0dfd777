/// Resource caps shared by the exhaustive kernels.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Maximum number of tuples produced by a subuniverse closure.
    pub closure_cap: usize,
    /// Largest commutator arity accepted in general.
    pub max_commutator_arity: usize,
    /// Largest algebra for which unary polynomials are enumerated.
    pub unary_poly_max_size: usize,
    /// Largest trace for which the induced clone is built.
    pub trace_max: usize,
    /// Maximum number of entries in a materialized operation table.
    pub table_cap: usize,
    /// Maximum number of evaluations in an exhaustive identity check.
    pub identity_cap: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            closure_cap: 10_000_000,
            max_commutator_arity: 3,
            unary_poly_max_size: 6,
            trace_max: 4,
            table_cap: 10_000_000,
            identity_cap: 50_000_000,
        }
    }
}

impl Limits {
    pub fn commutator_arity_allowed(&self, k: usize, size: usize) -> bool {
        k >= 1 && (k <= self.max_commutator_arity || (k == 4 && size <= 2))
    }
}

//! Shared inputs for the benchmarks.

use plgb_core::calculus::OneForm;
use plgb_core::poisson::Manifold;
use plgb_core::symkernel::Expr;
use plgb_core::Sampler;

/// Seeded functions and frame 1-forms on one manifold.
pub struct Inputs {
    pub functions: Vec<Expr>,
    pub forms: Vec<OneForm>,
}

impl Inputs {
    pub fn new(m: &Manifold, seed: u64, degree_bound: usize, count: usize) -> Self {
        let mut s = Sampler::new(seed, degree_bound);
        Inputs {
            functions: (0..count).map(|_| s.function(m)).collect(),
            forms: (0..count).map(|_| s.one_form(m)).collect(),
        }
    }
}

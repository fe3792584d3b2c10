//! Weighted Davenport constants of cyclic groups.
//!
//! * [`zmod`]: residues mod n and dense residue-set algebra.
//! * [`davenport`]: exact `D_A(Z_n)` by pruned search.
//! * [`extremal`]: exact `f(p, k) = min{|A| : D_A(F_p) ≤ k}` for small primes.
//! * [`construction`]: randomized construction of weight sets of size
//!   `O_k(p^(1/k))` with `D_A(F_p) ≤ k`, with checkable certificates.
//! * [`parse`]: parsers for command-line lists and ranges.

mod bits;
pub mod construction;
pub mod davenport;
pub mod error;
pub mod extremal;
pub mod parse;
pub mod zmod;

pub use davenport::{
    davenport_constant, is_zero_sum_free, satisfies_bound, weighted_sum_closure, DavenportResult,
    DavenportValue, GroupSequence, WeightSet,
};
pub use error::{Error, Result};
pub use extremal::{canonical_form, fd_exact, fd_quotient_oracle, ExtremalResult, ExtremalValue};
pub use zmod::{Modulus, Residue, ResidueSet};

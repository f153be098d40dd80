//! Test support: naive quadratic reference implementations and random corpora.
//!
//! The reference functions read `Document`s directly and never touch the positional
//! index, the slicer or the sparse matrices, so agreement with the library is evidence
//! rather than tautology.

pub mod checks;
pub mod oracle;
pub mod random;

//! Desk-scale computer algebra for Nijenhuis operators in dimension two:
//! truncated power-series calculus, torsion and Frölicher–Nijenhuis
//! brackets, the classification of two-dimensional left-symmetric
//! algebras, continued-fraction (Brjuno) arithmetic, degree-by-degree
//! formal normal forms with resonance and small-divisor diagnostics, and
//! a numeric monodromy experiment for the associated triangular system.

pub mod bigfloat;
pub mod brjuno;
pub mod change;
pub mod coeff;
pub mod series;
pub mod templates;
pub mod tensor;
pub mod error;

pub use bigfloat::BigFloat;
pub use coeff::{Coeff, CoeffMode, CoeffParse, Rat};

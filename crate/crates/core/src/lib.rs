//! Finite-field laboratory for the surfaces `Y² = Xⁿ + X·f(U₁,U₂) + g(U₁,U₂)`:
//! exact field arithmetic, character sums, point counts and the error-term
//! audits of a sieve argument over rational points of bounded height.

pub mod charsums;
pub mod counting;
pub mod error;
pub mod ff;
pub mod forms;
pub mod moments;
pub mod poly;
pub mod seeded;
pub mod sieve;
pub mod sum;
pub mod vdc;

pub use error::{Error, Result};
pub use ff::{ExtCtx, Fq, PrimeCtx};
pub use forms::{BinaryForm, Surface};
pub use sum::SumValue;

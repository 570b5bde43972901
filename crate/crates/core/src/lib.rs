//! Exact-arithmetic verification engine for the mean-one gumball machine
//! problem: minimize `P(X_1 + ... + X_n <= n)` over independent
//! nonnegative-integer random variables with mean one.
//!
//! The conjectured minimizer puts mass `1/(n+1)` on `n+1` and the rest on
//! zero for every machine, giving `(n/(n+1))^n`. This crate evaluates every
//! quantity involved exactly (or inside certified rational intervals) and
//! checks the conjecture and its supporting numeric lemmas.

pub mod binom;
pub mod dist;
pub mod error;
pub mod exactnum;
pub mod lemmas;
pub mod report;
pub mod search;
pub mod selftest;

pub use error::{Error, Result};

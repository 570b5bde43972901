//! Exact rational arithmetic and rigorous enclosures of the exponential.
//!
//! Every probability in the crate is a [`Rat`]. Transcendental constants
//! (e, e^x) only ever appear as a [`RatInterval`] whose endpoints are exact
//! rationals, so comparisons against them are certified.

mod exp;
mod interval;
mod rat;

pub use exp::{exp_enclosure, exp_terms_needed};
pub use interval::RatInterval;
pub use rat::{binom_coeff, pow_rat, Rat};

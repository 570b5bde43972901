use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Rat;
use crate::error::{domain, Result};

/// Closed interval `[lo, hi]` with exact rational endpoints.
///
/// Arithmetic is endpoint-exact, so every operation returns the tightest
/// enclosure of the pointwise result set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self> {
        if lo > hi {
            return domain(format!("empty interval [{lo}, {hi}]"));
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(x: Rat) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    /// `[center - radius, center + radius]`; `radius` must be nonnegative.
    pub fn around(center: &Rat, radius: &Rat) -> Result<Self> {
        if radius.is_negative() {
            return domain("negative radius");
        }
        Ok(RatInterval {
            lo: center - radius,
            hi: center + radius,
        })
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// True when `self` is contained in `outer`.
    pub fn is_subset_of(&self, outer: &RatInterval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn scale(&self, k: &Rat) -> RatInterval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn recip(&self) -> Result<RatInterval> {
        if self.contains_zero() {
            return domain(format!("reciprocal of interval {self} containing zero"));
        }
        Ok(RatInterval {
            lo: self.hi.recip()?,
            hi: self.lo.recip()?,
        })
    }

    pub fn checked_div(&self, rhs: &RatInterval) -> Result<RatInterval> {
        Ok(self * &rhs.recip()?)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, rhs: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Add for RatInterval {
    type Output = RatInterval;
    fn add(self, rhs: RatInterval) -> RatInterval {
        &self + &rhs
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, rhs: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Sub for RatInterval {
    type Output = RatInterval;
    fn sub(self, rhs: RatInterval) -> RatInterval {
        &self - &rhs
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, rhs: &RatInterval) -> RatInterval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().cloned().unwrap_or_default();
        let hi = products.iter().max().cloned().unwrap_or_default();
        RatInterval { lo, hi }
    }
}

impl Mul for RatInterval {
    type Output = RatInterval;
    fn mul(self, rhs: RatInterval) -> RatInterval {
        &self * &rhs
    }
}

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    /// Builds `numer / denom`, reducing to canonical form.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return domain("zero denominator");
        }
        Ok(Rat(BigRational::new(numer.into(), denom)))
    }

    /// `numer / denom` for callers that already know `denom != 0`.
    pub(crate) fn ratio(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rat(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always strictly positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return domain("reciprocal of zero");
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn pow(&self, exp: i64) -> Result<Self> {
        pow_rat(self, exp)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Lossy conversion for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal approximation with `digits` significant digits, rounded to
    /// nearest. Used only as an advisory rendering next to the exact value.
    pub fn to_decimal(&self, digits: u32) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let num = self.numer().magnitude().clone();
        let den = self.denom().magnitude().clone();
        // Initial guess for floor(log10(|x|)) from digit counts, corrected below.
        let mut exp10 = num.to_string().len() as i64 - den.to_string().len() as i64;
        let ten = BigUint::from(10u32);
        let scaled = |e: i64| -> BigUint {
            let shift = digits as i64 - 1 - e;
            let (n, d) = if shift >= 0 {
                (&num * Pow::pow(&ten, shift as u64), den.clone())
            } else {
                (num.clone(), &den * Pow::pow(&ten, (-shift) as u64))
            };
            // round half up
            (n * 2u32 + &d) / (d * 2u32)
        };
        let lower = Pow::pow(&ten, (digits - 1) as u64);
        let upper = Pow::pow(&ten, digits as u64);
        let mut mantissa = scaled(exp10);
        loop {
            if mantissa >= upper {
                exp10 += 1;
            } else if mantissa < lower {
                exp10 -= 1;
            } else {
                break;
            }
            mantissa = scaled(exp10);
            // rounding can carry to exactly 10^digits
            if mantissa == upper {
                exp10 += 1;
                mantissa = scaled(exp10);
                break;
            }
        }
        let sign = if self.is_negative() { "-" } else { "" };
        let text = mantissa.to_string();
        if (-5..digits as i64).contains(&exp10) {
            let body = if exp10 >= 0 {
                let split = exp10 as usize + 1;
                let (int, frac) = text.split_at(split);
                let frac = frac.trim_end_matches('0');
                if frac.is_empty() {
                    int.to_string()
                } else {
                    format!("{int}.{frac}")
                }
            } else {
                let zeros = "0".repeat((-exp10 - 1) as usize);
                format!("0.{zeros}{}", text.trim_end_matches('0'))
            };
            format!("{sign}{body}")
        } else {
            let (lead, rest) = text.split_at(1);
            let rest = rest.trim_end_matches('0');
            if rest.is_empty() {
                format!("{sign}{lead}e{exp10}")
            } else {
                format!("{sign}{lead}.{rest}e{exp10}")
            }
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Binomial coefficient C(n, k) by the multiplicative formula; each partial
/// product is itself a binomial coefficient so the division is exact.
pub fn binom_coeff(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return domain(format!("binomial coefficient C({n}, {k}) needs k <= n"));
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// Exact `x^e` by binary exponentiation. Negative exponents need `x != 0`.
pub fn pow_rat(x: &Rat, e: i64) -> Result<Rat> {
    if e < 0 {
        if x.is_zero() {
            return domain("zero raised to a negative power");
        }
        return Ok(Rat(Pow::pow(x.0.recip(), e.unsigned_abs())));
    }
    // numerator and denominator stay coprime under powers, so no gcd is needed
    let numer = Pow::pow(x.numer(), e as u64);
    let denom = Pow::pow(x.denom(), e as u64);
    Ok(Rat(BigRational::new_raw(numer, denom)))
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `a/b`, integers, plain decimals (`0.25`) and scientific
    /// notation (`1e-30`, `2.5E3`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let t = s.trim();
        if let Some((a, b)) = t.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            return Rat::new(a, b).map_err(|_| bad());
        }
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
        let scale = exponent - frac_part.len() as i64;
        let ten = Rat::from_integer(10);
        let mut value = Rat::from_integer(all) * pow_rat(&ten, scale)?;
        if negative {
            value = -value;
        }
        Ok(value)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<u64> for Rat {
    fn from(n: u64) -> Self {
        Rat::from_integer(n)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_integer(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_integer(n)
    }
}

impl From<BigUint> for Rat {
    fn from(n: BigUint) -> Self {
        Rat::from_integer(BigInt::from_biguint(Sign::Plus, n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

// Division by zero is a programming error in this crate; checked callers go
// through `recip`.
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

/// gcd of the parts of a canonical value; exposed for the canonical-form
/// property test.
#[cfg(test)]
pub(crate) fn parts_gcd(x: &Rat) -> BigInt {
    use num_integer::Integer;
    x.numer().gcd(x.denom())
}

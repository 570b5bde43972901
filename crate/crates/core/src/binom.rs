//! Exact binomial cumulative probabilities.
//!
//! All evaluations work on integer numerators over the common denominator
//! `q^n` (for success probability `p/q`) and only build a [`Rat`] at the end,
//! so the ~10^4-digit powers that appear at `n = 3200` are never reduced
//! term by term.

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};

use crate::error::{domain, Result};
use crate::exactnum::{binom_coeff, pow_rat, Rat};

/// `P(Bin(n, x) <= m)` request with validated arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomQuery {
    n: u64,
    x: Rat,
    m: u64,
}

impl BinomQuery {
    pub fn new(n: u64, x: Rat, m: u64) -> Result<Self> {
        if x.is_negative() || x > Rat::one() {
            return domain(format!("success probability {x} outside [0, 1]"));
        }
        if m > n {
            return domain(format!("cutoff m = {m} exceeds n = {n}"));
        }
        Ok(BinomQuery { n, x, m })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn x(&self) -> &Rat {
        &self.x
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn cdf(&self) -> Rat {
        let p = self.x.numer().magnitude();
        let q = self.x.denom().magnitude();
        let numer = cdf_numerator(self.n, p, q, self.m);
        Rat::ratio(numer, Pow::pow(q, self.n))
    }
}

/// `sum_{k <= m} C(n, k) p^k (q - p)^(n - k)` for `0 <= p <= q`.
///
/// Walks `k` downward so each power of `q - p` is one multiplication away
/// from the previous one.
pub fn cdf_numerator(n: u64, p: &BigUint, q: &BigUint, m: u64) -> BigUint {
    debug_assert!(p <= q && m <= n);
    let comp = q - p;
    let mut p_pows = Vec::with_capacity(m as usize + 1);
    p_pows.push(BigUint::one());
    for k in 1..=m as usize {
        let next = &p_pows[k - 1] * p;
        p_pows.push(next);
    }
    let mut comp_pow: BigUint = Pow::pow(&comp, n - m);
    let mut coeff = binom_coeff(n, m).expect("m <= n");
    let mut total = BigUint::zero();
    for k in (0..=m).rev() {
        total += &coeff * &p_pows[k as usize] * &comp_pow;
        if k > 0 {
            comp_pow *= &comp;
            // C(n, k-1) = C(n, k) * k / (n - k + 1)
            coeff = coeff * k / (n - k + 1);
        }
    }
    total
}

/// Exact `P(Bin(n, x) <= m)`.
pub fn binom_cdf(n: u64, x: &Rat, m: u64) -> Result<Rat> {
    Ok(BinomQuery::new(n, x.clone(), m)?.cdf())
}

/// Term-by-term rational summation of the same quantity as [`binom_cdf`].
/// Much slower; kept as an independent evaluation route.
pub fn binom_cdf_direct(n: u64, x: &Rat, m: u64) -> Result<Rat> {
    BinomQuery::new(n, x.clone(), m)?;
    let comp = Rat::one() - x;
    let mut total = Rat::zero();
    for k in 0..=m {
        let c = Rat::from(binom_coeff(n, k)?);
        total += c * pow_rat(x, k as i64)? * pow_rat(&comp, (n - k) as i64)?;
    }
    Ok(total)
}

fn check_f_args(n: u64, m: u64) -> Result<()> {
    if m == 0 || m > n {
        return domain(format!("f(n, m) needs 1 <= m <= n, got n = {n}, m = {m}"));
    }
    Ok(())
}

/// Numerator of `f(n, m)` over the common denominator `n^n`.
///
/// Comparisons of `f(n, m)` for fixed `n` reduce to comparing these
/// integers, which is what the monotonicity scan does.
pub fn f_numerator(n: u64, m: u64) -> Result<BigUint> {
    check_f_args(n, m)?;
    Ok(cdf_numerator(n, &BigUint::from(m), &BigUint::from(n), m - 1))
}

/// `f(n, m) = P(Bin(n, m/n) <= m - 1)`.
pub fn f(n: u64, m: u64) -> Result<Rat> {
    let numer = f_numerator(n, m)?;
    Ok(Rat::ratio(numer, Pow::pow(BigUint::from(n), n)))
}

/// [`f`] through [`binom_cdf_direct`].
pub fn f_direct(n: u64, m: u64) -> Result<Rat> {
    check_f_args(n, m)?;
    binom_cdf_direct(n, &Rat::new(m, n)?, m - 1)
}

/// `g(n, j)`: probability that `n` independent two-point(`j`) machines sum
/// to at most `n`, i.e. `P(Bin(n, 1/j) <= floor(n/j))`.
pub fn g(n: u64, j: u64) -> Result<Rat> {
    if j < 2 || j > n + 1 {
        return domain(format!("g(n, j) needs 2 <= j <= n + 1, got n = {n}, j = {j}"));
    }
    binom_cdf(n, &Rat::new(1, j)?, n / j)
}

/// Checks that `m` is a median of `Bin(n, m/n)`:
/// `P(X <= m) >= 1/2` and `P(X >= m) >= 1/2`.
pub fn median_check(n: u64, m: u64) -> Result<bool> {
    check_f_args(n, m)?;
    let x = Rat::new(m, n)?;
    let half = Rat::new(1, 2)?;
    let at_most = binom_cdf(n, &x, m)?;
    let at_least = Rat::one() - binom_cdf(n, &x, m - 1)?;
    Ok(at_most >= half && at_least >= half)
}

/// `binom_cdf(n, x1, m) >= binom_cdf(n, x2, m)` for `x1 <= x2`.
pub fn lemma5_check(n: u64, m: u64, x1: &Rat, x2: &Rat) -> Result<bool> {
    if x1 > x2 {
        return domain(format!("lemma 5 check needs x1 <= x2, got {x1} > {x2}"));
    }
    Ok(binom_cdf(n, x1, m)? >= binom_cdf(n, x2, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{convolve, pmf_of, MachineSpec, Pmf};
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> Rat {
        Rat::new(a, b).unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(binom_cdf(4, &r(1, 2), 1).unwrap(), r(5, 16));
        for n in 0..8 {
            assert_eq!(binom_cdf(n, &r(2, 7), n).unwrap(), Rat::one());
        }
        assert_eq!(binom_cdf(2, &r(1, 3), 0).unwrap(), r(4, 9));
        assert_eq!(binom_cdf(5, &Rat::zero(), 0).unwrap(), Rat::one());
        assert_eq!(binom_cdf(5, &Rat::one(), 4).unwrap(), Rat::zero());
        assert!(binom_cdf(3, &r(3, 2), 1).is_err());
        assert!(binom_cdf(3, &r(-1, 2), 1).is_err());
        assert!(binom_cdf(3, &r(1, 2), 4).is_err());
    }

    #[test]
    fn f_examples() {
        assert_eq!(f(4, 1).unwrap(), r(81, 256));
        assert_eq!(f(4, 2).unwrap(), r(5, 16));
        assert_eq!(f(4, 2).unwrap(), binom_cdf(4, &r(1, 2), 1).unwrap());
        let v = f(100, 12).unwrap();
        assert_eq!(v, f_direct(100, 12).unwrap());
        assert!(v >= r(3, 8));
        assert!(f(4, 0).is_err());
        assert!(f(4, 5).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g(2, 3).unwrap(), r(4, 9));
        assert_eq!(g(2, 2).unwrap(), r(3, 4));
        for n in 2..30u64 {
            let expected = pow_rat(&Rat::new(n, n + 1).unwrap(), n as i64).unwrap();
            assert_eq!(g(n, n + 1).unwrap(), expected);
        }
        assert!(g(5, 1).is_err());
        assert!(g(5, 7).is_err());
    }

    #[test]
    fn g_matches_convolution_for_small_n() {
        for n in 2..=12usize {
            for j in 2..=n as u32 + 1 {
                let law = pmf_of(MachineSpec::TwoPoint(j), n.max(j as usize)).unwrap();
                let mut sum = Pmf::point(0, n).unwrap();
                for _ in 0..n {
                    sum = convolve(&sum, &law, n);
                }
                assert_eq!(sum.prob_at_most(n).unwrap(), g(n as u64, j as u64).unwrap());
            }
        }
    }

    #[test]
    fn median_examples() {
        assert!(median_check(100, 12).unwrap());
        for n in 1..20 {
            assert!(median_check(n, n).unwrap());
        }
        assert!(median_check(4, 2).unwrap());
        assert_eq!(binom_cdf(4, &r(1, 2), 2).unwrap(), r(11, 16));
        assert!(median_check(4, 0).is_err());
    }

    #[test]
    fn lemma5_examples() {
        assert!(lemma5_check(4, 1, &r(1, 3), &r(1, 2)).unwrap());
        assert_eq!(binom_cdf(4, &r(1, 3), 1).unwrap(), r(16, 27));
        assert!(lemma5_check(7, 3, &r(2, 5), &r(2, 5)).unwrap());
        assert!(lemma5_check(7, 3, &Rat::zero(), &r(2, 5)).unwrap());
        assert!(lemma5_check(7, 3, &r(1, 2), &r(2, 5)).is_err());
    }

    #[test]
    fn bridge_between_g_and_shifted_cdf() {
        for n in 2..=40u64 {
            for j in 2..=n {
                let m = n / j;
                let shifted = Rat::new(m + 1, n).unwrap();
                if shifted > Rat::one() {
                    continue;
                }
                assert!(g(n, j).unwrap() >= binom_cdf(n, &shifted, m).unwrap());
            }
        }
    }

    fn prob() -> impl Strategy<Value = Rat> {
        (1i64..60).prop_flat_map(|d| (0i64..=d).prop_map(move |a| r(a, d)))
    }

    proptest! {
        #[test]
        fn cdf_and_upper_tail_sum_to_one(n in 0u64..25, x in prob(), m_frac in 0u64..=100) {
            let m = n * m_frac / 100;
            let lower = binom_cdf(n, &x, m).unwrap();
            let comp = Rat::one() - &x;
            let upper: Rat = (m + 1..=n)
                .map(|k| {
                    Rat::from(binom_coeff(n, k).unwrap())
                        * pow_rat(&x, k as i64).unwrap()
                        * pow_rat(&comp, (n - k) as i64).unwrap()
                })
                .sum();
            prop_assert_eq!(lower + upper, Rat::one());
        }

        #[test]
        fn fast_and_direct_routes_agree(n in 1u64..60, x in prob(), m_frac in 0u64..=100) {
            let m = n * m_frac / 100;
            prop_assert_eq!(binom_cdf(n, &x, m).unwrap(), binom_cdf_direct(n, &x, m).unwrap());
        }

        #[test]
        fn cdf_decreases_in_success_probability(n in 0u64..=30, x1 in prob(), x2 in prob(), m_frac in 0u64..=100) {
            let m = n * m_frac / 100;
            let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
            prop_assert!(lemma5_check(n, m, &lo, &hi).unwrap());
        }
    }
}

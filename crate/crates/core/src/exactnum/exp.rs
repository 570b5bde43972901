use super::{Rat, RatInterval};
use crate::error::{domain, Result};

/// Largest |x| accepted by [`exp_enclosure`].
pub const EXP_ARG_LIMIT: i64 = 4;

// The remainder bound below needs N + 1 > |x|; starting past 8 keeps the
// geometric ratio |x|/(N+1) under 1/2 on the whole supported range.
const MIN_TERMS: usize = 9;

/// Bound on the Taylor tail `sum_{i >= n} |x|^i / i!` given
/// `lead = |x|^n / n!`: the tail is dominated by a geometric series with
/// ratio `|x| / (n + 1)`.
fn tail_bound(lead: &Rat, abs_x: &Rat, n: usize) -> Rat {
    let ratio = abs_x / Rat::from(n as u64 + 1);
    lead / (Rat::one() - ratio)
}

fn check_args(x: &Rat, tol: &Rat) -> Result<()> {
    if x.abs() > Rat::from(EXP_ARG_LIMIT) {
        return domain(format!("exp argument {x} outside [-4, 4]"));
    }
    if !tol.is_positive() {
        return domain("exp tolerance must be positive");
    }
    Ok(())
}

/// Number of Taylor terms the enclosure of `exp(x)` uses for tolerance `tol`.
pub fn exp_terms_needed(x: &Rat, tol: &Rat) -> Result<usize> {
    check_args(x, tol)?;
    let abs_x = x.abs();
    let half_tol = tol / Rat::from(2u64);
    let mut lead = Rat::one();
    for i in 0..MIN_TERMS {
        lead = lead * &abs_x / Rat::from(i as u64 + 1);
    }
    let mut n = MIN_TERMS;
    while tail_bound(&lead, &abs_x, n) > half_tol {
        lead = lead * &abs_x / Rat::from(n as u64 + 1);
        n += 1;
    }
    Ok(n)
}

/// Rigorous enclosure of `exp(x)` for `|x| <= 4` with width at most `tol`.
///
/// The partial sum of the Taylor series is exact; only the Lagrange-style
/// tail bound widens the interval. Negative arguments are summed directly.
pub fn exp_enclosure(x: &Rat, tol: &Rat) -> Result<RatInterval> {
    check_args(x, tol)?;
    if x.is_zero() {
        return Ok(RatInterval::point(Rat::one()));
    }
    let terms = exp_terms_needed(x, tol)?;
    let mut sum = Rat::zero();
    let mut term = Rat::one();
    for i in 0..terms {
        sum += &term;
        term = term * x / Rat::from(i as u64 + 1);
    }
    // `term` is now x^N / N!
    let radius = tail_bound(&term.abs(), &x.abs(), terms);
    RatInterval::around(&sum, &radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> Rat {
        Rat::new(a, b).unwrap()
    }

    fn pow10(k: u32) -> Rat {
        Rat::from(10u64).pow(k as i64).unwrap()
    }

    /// 80-term partial sum with a crude doubled tail bound, written without
    /// reference to the enclosure code.
    fn oracle(x: &Rat) -> RatInterval {
        let mut sum = Rat::zero();
        let mut fact = Rat::one();
        for i in 0..80i64 {
            if i > 0 {
                fact = fact * Rat::from(i);
            }
            sum += x.pow(i).unwrap() / &fact;
        }
        let tail = x.abs().pow(80).unwrap() / (fact * Rat::from(80u64)) * Rat::from(2u64);
        RatInterval::around(&sum, &tail).unwrap()
    }

    // first 40 decimals, truncated
    const E_40: &str = "2.7182818284590452353602874713526624977572";
    const INV_E_40: &str = "0.3678794411714423215955237701614608674458";

    fn truncated_bracket(digits: &str) -> RatInterval {
        let lo: Rat = digits.parse().unwrap();
        RatInterval::new(lo.clone(), lo + pow10(40).recip().unwrap()).unwrap()
    }

    #[test]
    fn exp_zero_is_exact() {
        let iv = exp_enclosure(&Rat::zero(), &r(1, 10)).unwrap();
        assert_eq!(iv, RatInterval::point(Rat::one()));
    }

    #[test]
    fn e_and_inverse_e() {
        let tol = pow10(12).recip().unwrap();
        let e = exp_enclosure(&Rat::one(), &tol).unwrap();
        assert!(e.width() <= tol);
        let truth = truncated_bracket(E_40);
        assert!(e.lo() <= truth.hi() && truth.lo() <= e.hi());
        assert!(e.contains(truth.lo()));
        assert!(oracle(&Rat::one()).is_subset_of(&e));

        let tol = pow10(9).recip().unwrap();
        let inv = exp_enclosure(&-Rat::one(), &tol).unwrap();
        assert!(inv.width() <= tol);
        assert!(inv.contains(truncated_bracket(INV_E_40).lo()));
        assert!(oracle(&-Rat::one()).is_subset_of(&inv));
    }

    #[test]
    fn domain_errors() {
        assert!(exp_enclosure(&r(9, 2), &r(1, 10)).is_err());
        assert!(exp_enclosure(&r(1, 2), &Rat::zero()).is_err());
        assert!(exp_enclosure(&r(1, 2), &r(-1, 10)).is_err());
        assert!(exp_enclosure(&r(-4, 1), &r(1, 10)).is_ok());
    }

    #[test]
    fn endpoint_range_tight() {
        let tol = pow10(30).recip().unwrap();
        for x in [r(4, 1), r(-4, 1), r(7, 2)] {
            let iv = exp_enclosure(&x, &tol).unwrap();
            assert!(iv.width() <= tol);
            assert!(oracle(&x).is_subset_of(&iv));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn enclosures_nest_and_respect_tolerance(
            num in -400i64..=400,
            t1 in 1u32..15,
            extra in 0u32..15,
        ) {
            let x = r(num, 100);
            let tol1 = pow10(t1).recip().unwrap();
            let tol2 = pow10(t1 + extra).recip().unwrap();
            let wide = exp_enclosure(&x, &tol1).unwrap();
            let narrow = exp_enclosure(&x, &tol2).unwrap();
            prop_assert!(wide.width() <= tol1);
            prop_assert!(narrow.width() <= tol2);
            prop_assert!(narrow.is_subset_of(&wide));
            let reference = oracle(&x);
            prop_assert!(reference.is_subset_of(&narrow));
        }
    }
}

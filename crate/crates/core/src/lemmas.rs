//! Numeric claims checked by exact or interval-certified computation:
//! the `3/8` lower bound on `f`, monotonicity of `f(n, m)` in `m`, the
//! certified transcendental inequality that covers large `n`, the tail
//! inequality closing the identically distributed case, and the
//! identically distributed minimization itself.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Pow;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binom::{self, f_numerator, g};
use crate::error::{domain, Result};
use crate::exactnum::{exp_enclosure, pow_rat, Rat, RatInterval};
use crate::search::{Config, SearchReport};

/// Default working tolerance for exponential enclosures.
pub fn default_tolerance() -> Rat {
    Rat::new(1, BigUint::from(10u32).pow(30u32)).expect("nonzero")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Proven,
    Disproven,
    Inconclusive,
}

/// Outcome of comparing an enclosed left side with an exact right side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedVerdict {
    pub status: Status,
    pub lhs: RatInterval,
    pub rhs: Rat,
    pub detail: String,
}

impl CertifiedVerdict {
    /// Certifies `lhs <= rhs`.
    pub fn at_most(lhs: RatInterval, rhs: Rat, detail: String) -> Self {
        let status = if lhs.hi() <= &rhs {
            Status::Proven
        } else if lhs.lo() > &rhs {
            Status::Disproven
        } else {
            Status::Inconclusive
        };
        CertifiedVerdict {
            status,
            lhs,
            rhs,
            detail,
        }
    }

    /// Certifies `lhs < rhs`.
    pub fn less_than(lhs: RatInterval, rhs: Rat, detail: String) -> Self {
        let status = if lhs.hi() < &rhs {
            Status::Proven
        } else if lhs.lo() >= &rhs {
            Status::Disproven
        } else {
            Status::Inconclusive
        };
        CertifiedVerdict {
            status,
            lhs,
            rhs,
            detail,
        }
    }

    /// `rhs - lhs`, the certified slack (negative when disproven).
    pub fn margin(&self) -> RatInterval {
        RatInterval::point(self.rhs.clone()) - self.lhs.clone()
    }
}

/// `f(n, m) - 3/8` on the range where the `3/8` bound is claimed:
/// `n >= 100` and `12 <= m <= n/2 + 1`.
pub fn lemma3_margin(n: u64, m: u64) -> Result<Rat> {
    if n < 100 || m < 12 || 2 * m > n + 2 {
        return domain(format!(
            "the 3/8 bound covers n >= 100 and 12 <= m <= n/2 + 1, got n = {n}, m = {m}"
        ));
    }
    Ok(binom::f(n, m)? - Rat::new(3, 8)?)
}

/// A pair of consecutive cutoffs where `f(n, m) < f(n, m + 1)` fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub n: u64,
    pub m: u64,
    pub f_m: Rat,
    pub f_next: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n_lo: u64,
    pub n_hi: u64,
    pub m_max: u64,
    pub stride: u64,
    pub cells_checked: u64,
    /// Sorted by `(n, m)`.
    pub violations: Vec<Violation>,
    pub all_pass: bool,
    pub largest_failing_n: Option<u64>,
    /// Every violation was reproduced by term-by-term rational summation.
    pub violations_cross_checked: bool,
}

/// Checks `f(n, m) < f(n, m + 1)` for every `n` in `[n_lo, n_hi)` (every
/// `stride`-th value) and every `1 <= m < m_max` with `m + 1 <= n`.
///
/// For fixed `n` all values share the denominator `n^n`, so each comparison
/// is between two integers.
pub fn lemma4_scan(n_lo: u64, n_hi: u64, m_max: u64, stride: u64) -> Result<ScanReport> {
    if n_lo < 2 {
        return domain(format!("scan needs n_lo >= 2, got {n_lo}"));
    }
    if m_max < 2 {
        return domain(format!("scan needs m_max >= 2, got {m_max}"));
    }
    if stride == 0 {
        return domain("stride must be positive");
    }
    let ns: Vec<u64> = (n_lo..n_hi).step_by(stride as usize).collect();
    let per_n: Vec<(u64, Vec<u64>)> = ns
        .par_iter()
        .map(|&n| {
            let top = m_max.min(n);
            let numerators: Vec<BigUint> = (1..=top)
                .map(|m| f_numerator(n, m).expect("1 <= m <= n"))
                .collect();
            let failing = (1..top)
                .filter(|&m| numerators[m as usize - 1] >= numerators[m as usize])
                .collect();
            (top - 1, failing)
        })
        .collect();
    let cells_checked = per_n.iter().map(|(c, _)| c).sum();
    let mut violations = Vec::new();
    let mut cross_checked = true;
    for (&n, (_, failing)) in ns.iter().zip(&per_n) {
        for &m in failing {
            let f_m = binom::f(n, m)?;
            let f_next = binom::f(n, m + 1)?;
            cross_checked &= binom::f_direct(n, m)? == f_m && binom::f_direct(n, m + 1)? == f_next;
            violations.push(Violation { n, m, f_m, f_next });
        }
    }
    let largest_failing_n = violations.iter().map(|v| v.n).max();
    Ok(ScanReport {
        n_lo,
        n_hi,
        m_max,
        stride,
        cells_checked,
        all_pass: violations.is_empty(),
        violations,
        largest_failing_n,
        violations_cross_checked: cross_checked,
    })
}

/// Enclosure of `exp(x)` for any rational `x`: arguments beyond the direct
/// range are halved and the result squared back.
fn exp_any(x: &Rat, tol: &Rat) -> Result<RatInterval> {
    let limit = Rat::from(4u64);
    let mut halvings = 0u32;
    let mut arg = x.clone();
    while arg.abs() > limit {
        arg = arg / Rat::from(2u64);
        halvings += 1;
    }
    let mut iv = exp_enclosure(&arg, tol)?;
    for _ in 0..halvings {
        iv = &iv * &iv;
    }
    Ok(iv)
}

/// `exp(-(r(1 + r') + r') / (2(1 - r')))` with `r = m/n`, `r' = (m+1)/n`.
pub fn lambda_enclosure(n: u64, m: u64, tol: &Rat) -> Result<RatInterval> {
    if m == 0 || n <= m + 1 {
        return domain(format!("lambda needs m >= 1 and n > m + 1, got n = {n}, m = {m}"));
    }
    let r = Rat::new(m, n)?;
    let r_next = Rat::new(m + 1, n)?;
    let arg = -(&r * (Rat::one() + &r_next) + &r_next)
        / (Rat::from(2u64) * (Rat::one() - &r_next));
    exp_any(&arg, tol)
}

/// `(m + 1)^m / m!`.
fn final_rhs(m: u64) -> Rat {
    let mut fact = Rat::one();
    for i in 2..=m {
        fact = fact * Rat::from(i);
    }
    pow_rat(&Rat::from(m + 1), m as i64).expect("positive base") / fact
}

/// Certifies
/// `sum_{k=0}^{m-1} e^{kr} (e m^k/k! - lambda (m+1)^k/k!) <= (m+1)^m / m!`.
///
/// Holding at some `n` implies it holds for all larger `n` (see
/// [`lemma4_n_monotonicity_probe`] for the premises), which is what extends
/// the finite monotonicity scan to every large `n`.
pub fn lemma4_final_inequality(n: u64, m: u64, tol: &Rat) -> Result<CertifiedVerdict> {
    if !tol.is_positive() {
        return domain("tolerance must be positive");
    }
    let lambda = lambda_enclosure(n, m, tol)?;
    let e = exp_enclosure(&Rat::one(), tol)?;
    let r = Rat::new(m, n)?;
    let mut lhs = RatInterval::point(Rat::zero());
    let mut m_pow_over_fact = Rat::one();
    let mut next_pow_over_fact = Rat::one();
    for k in 0..m {
        if k > 0 {
            m_pow_over_fact = m_pow_over_fact * Rat::from(m) / Rat::from(k);
            next_pow_over_fact = next_pow_over_fact * Rat::from(m + 1) / Rat::from(k);
        }
        let growth = exp_any(&(Rat::from(k) * &r), tol)?;
        let bracket = e.scale(&m_pow_over_fact) - lambda.scale(&next_pow_over_fact);
        lhs = lhs + &growth * &bracket;
    }
    let rhs = final_rhs(m);
    let detail = format!("n = {n}, m = {m}, tol = {}", tol.to_decimal(3));
    Ok(CertifiedVerdict::at_most(lhs, rhs, detail))
}

/// Certifies the large-`n` limit of the final inequality,
/// `sum_{k=0}^{m-1} (e m^k/k! - (m+1)^k/k!) < (m+1)^m / m!`.
pub fn lemma4_limit_inequality(m: u64, tol: &Rat) -> Result<CertifiedVerdict> {
    if m == 0 {
        return domain("limit inequality needs m >= 1");
    }
    let e = exp_enclosure(&Rat::one(), tol)?;
    let mut m_part = Rat::zero();
    let mut next_part = Rat::zero();
    let mut a = Rat::one();
    let mut b = Rat::one();
    for k in 0..m {
        if k > 0 {
            a = a * Rat::from(m) / Rat::from(k);
            b = b * Rat::from(m + 1) / Rat::from(k);
        }
        m_part += &a;
        next_part += &b;
    }
    let lhs = e.scale(&m_part) - RatInterval::point(next_part);
    let detail = format!("m = {m}, tol = {}", tol.to_decimal(3));
    Ok(CertifiedVerdict::less_than(lhs, final_rhs(m), detail))
}

/// Smallest `n` in `(m + 1, n_max]` at which the final inequality is
/// certified, found by bisection on the monotone-in-`n` property and then
/// confirmed at the boundary. `None` when it is not certified at `n_max`.
pub fn lemma4_certifying_n(m: u64, n_max: u64, tol: &Rat) -> Result<Option<u64>> {
    let proven = |n: u64| -> Result<bool> {
        Ok(lemma4_final_inequality(n, m, tol)?.status == Status::Proven)
    };
    if !proven(n_max)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (m + 1, n_max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if proven(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityProbe {
    pub n1: u64,
    pub n2: u64,
    pub m: u64,
    pub r_decreases: bool,
    pub lambda1: RatInterval,
    pub lambda2: RatInterval,
    pub lambda_increases: bool,
    pub holds: bool,
    pub detail: String,
}

/// Checks the premises behind "holds at `n1` implies holds at `n2`": `r`
/// strictly decreases and the certified enclosure of `lambda(n2)` lies
/// strictly above that of `lambda(n1)`.
pub fn lemma4_n_monotonicity_probe(n1: u64, n2: u64, m: u64, tol: &Rat) -> Result<MonotonicityProbe> {
    if !(m + 1 < n1 && n1 < n2) {
        return domain(format!("probe needs m + 1 < n1 < n2, got m = {m}, n1 = {n1}, n2 = {n2}"));
    }
    let r_decreases = Rat::new(m, n2)? < Rat::new(m, n1)?;
    let lambda1 = lambda_enclosure(n1, m, tol)?;
    let lambda2 = lambda_enclosure(n2, m, tol)?;
    let lambda_increases = lambda2.lo() > lambda1.hi();
    let detail = if lambda_increases {
        "premises certified".to_string()
    } else if lambda1.hi() >= lambda2.lo() && lambda2.hi() > lambda1.lo() {
        "lambda enclosures overlap; tighten the tolerance".to_string()
    } else {
        "lambda does not increase".to_string()
    };
    Ok(MonotonicityProbe {
        n1,
        n2,
        m,
        r_decreases,
        lambda1,
        lambda2,
        lambda_increases,
        holds: r_decreases && lambda_increases,
        detail,
    })
}

/// Exact test of `(1 - 2/n)^(n-1) (3 - 2/n) > (1 - 1/(n+1))^n`, cleared
/// of denominators: `(n-2)^(n-1) (3n-2) (n+1)^n > n^(2n)`.
pub fn theorem_tail_check(n: u64) -> Result<bool> {
    if n < 3 {
        return domain(format!("tail check needs n >= 3, got {n}"));
    }
    let lhs = Pow::pow(BigUint::from(n - 2), n - 1)
        * BigUint::from(3 * n - 2)
        * Pow::pow(BigUint::from(n + 1), n);
    let rhs = Pow::pow(BigUint::from(n), 2 * n);
    Ok(lhs > rhs)
}

/// The same comparison in its unfactored form
/// `(1 - 2/n)^n + 2 (1 - 2/n)^(n-1)`, evaluated in rationals.
pub fn theorem_tail_check_expanded(n: u64) -> Result<bool> {
    if n < 3 {
        return domain(format!("tail check needs n >= 3, got {n}"));
    }
    let base = Rat::new(n - 2, n)?;
    let lhs = pow_rat(&base, n as i64)? + Rat::from(2u64) * pow_rat(&base, n as i64 - 1)?;
    let rhs = pow_rat(&Rat::new(n, n + 1)?, n as i64)?;
    Ok(lhs > rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSweep {
    pub n_lo: u64,
    pub n_hi: u64,
    /// Values of `n` in `[n_lo, n_hi]` where the inequality fails.
    pub failures: Vec<u64>,
    pub all_hold: bool,
}

/// [`theorem_tail_check`] over `n_lo..=n_hi`.
pub fn theorem_tail_sweep(n_lo: u64, n_hi: u64) -> Result<TailSweep> {
    if n_lo < 3 {
        return domain(format!("tail check needs n >= 3, got {n_lo}"));
    }
    let mut failures: Vec<u64> = (n_lo..=n_hi)
        .into_par_iter()
        .filter(|&n| !theorem_tail_check(n).expect("n >= 3"))
        .collect();
    failures.sort_unstable();
    Ok(TailSweep {
        n_lo,
        n_hi,
        all_hold: failures.is_empty(),
        failures,
    })
}

/// Smallest `n` in `3..=limit` where the tail inequality holds.
pub fn smallest_tail_n(limit: u64) -> Result<Option<u64>> {
    for n in 3..=limit {
        if theorem_tail_check(n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Exact identically distributed minimization: `g(n, j)` for every
/// `2 <= j <= n + 1`.
pub fn verify_iid(n: u64) -> Result<SearchReport> {
    if n < 2 {
        return domain(format!("verification needs n >= 2, got {n}"));
    }
    let started = Instant::now();
    let mut best: Option<Rat> = None;
    let mut argmin = Vec::new();
    for j in 2..=n + 1 {
        let value = g(n, j)?;
        let config = Config::all_equal(n as u32, j as u32)?;
        match &best {
            Some(b) if &value > b => {}
            Some(b) if &value == b => argmin.push(config),
            _ => {
                best = Some(value);
                argmin = vec![config];
            }
        }
    }
    let min_value = best.expect("at least one j");
    SearchReport::from_minimum(
        n as u32,
        min_value,
        argmin,
        true,
        (n, 0, n),
        started.elapsed(),
    )
}

/// Every `(n, m)` with `1 <= m <= n <= n_max` where `m` fails to be a
/// median of `Bin(n, m/n)`.
pub fn median_sweep(n_max: u64) -> Result<(u64, Vec<(u64, u64)>)> {
    let cells: Vec<(u64, u64)> = (1..=n_max).flat_map(|n| (1..=n).map(move |m| (n, m))).collect();
    let mut failures: Vec<(u64, u64)> = cells
        .par_iter()
        .filter(|&&(n, m)| !binom::median_check(n, m).expect("1 <= m <= n"))
        .copied()
        .collect();
    failures.sort_unstable();
    Ok((cells.len() as u64, failures))
}

//! Randomized and exhaustive property suites runnable outside `cargo test`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binom::{g, lemma5_check};
use crate::dist::{convolve, lemma1_transport, Pmf};
use crate::error::Result;
use crate::exactnum::{exp_enclosure, Rat, RatInterval};
use crate::lemmas::median_sweep;
use crate::search::{eval_config, Config};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    /// First few failing cases, human readable.
    pub examples: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        SuiteOutcome {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 5 {
                self.examples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    pub seed: u64,
    pub cdf_cases: u64,
    pub transport_cases: u64,
    pub median_n_max: u64,
    pub cross_n_max: u32,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: 2009,
            cdf_cases: 1000,
            transport_cases: 500,
            median_n_max: 200,
            cross_n_max: 12,
        }
    }
}

fn random_prob(rng: &mut impl Rng) -> Rat {
    let d: i64 = rng.gen_range(1..=60);
    let a: i64 = rng.gen_range(0..=d);
    Rat::new(a, d).expect("d > 0")
}

/// CDF of `Bin(n, x)` at `m` never increases as `x` grows.
pub fn lemma5_suite(seed: u64, cases: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome::new("cdf-monotone-in-p");
    for _ in 0..cases {
        let n = rng.gen_range(0..=30u64);
        let m = rng.gen_range(0..=n);
        let (a, b) = (random_prob(&mut rng), random_prob(&mut rng));
        let (x1, x2) = if a <= b { (a, b) } else { (b, a) };
        let ok = lemma5_check(n, m, &x1, &x2)?;
        out.check(ok, || format!("n={n} m={m} x1={x1} x2={x2}"));
    }
    Ok(out)
}

/// Random mean-one law on `{0, ..., cap}`: weights on `2..=cap` with the
/// remaining mass split between 0 and 1 to restore mean one. With `force`,
/// the atom at `force` is guaranteed positive.
pub fn random_mean_one_law(rng: &mut impl Rng, cap: usize, force: Option<usize>) -> Pmf {
    let mut weights: Vec<u64> = (2..=cap).map(|_| rng.gen_range(0..4)).collect();
    if let Some(k) = force {
        weights[k - 2] += 1;
    }
    let weighted: u64 = weights.iter().enumerate().map(|(i, w)| (i as u64 + 2) * w).sum();
    let denom = weighted + rng.gen_range(0..5u64);
    let denom = denom.max(1);
    let mut mass = vec![Rat::zero(); cap + 1];
    let mut at_zero = Rat::zero();
    for (i, &w) in weights.iter().enumerate() {
        let y = Rat::new(w, denom).expect("denom > 0");
        at_zero += Rat::from(i as u64 + 1) * &y;
        mass[i + 2] = y;
    }
    mass[1] = Rat::one() - Rat::new(weighted, denom).expect("denom > 0");
    mass[0] = at_zero;
    Pmf::new(mass, Rat::zero()).expect("mean-one law is valid")
}

/// Moving a machine's far atom to `n + 1` keeps it mean-one and never
/// raises `P(sum <= n)` of the whole ensemble.
pub fn transport_suite(seed: u64, cases: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome::new("far-atom-transport");
    for _ in 0..cases {
        let n = rng.gen_range(2..=6usize);
        let cap = n + 3;
        let k = rng.gen_range(n + 2..=cap);
        let target = random_mean_one_law(&mut rng, cap, Some(k));
        let moved = lemma1_transport(&target, n, k)?;
        let mut rest = Pmf::point(0, n)?;
        for _ in 1..n {
            rest = convolve(&rest, &random_mean_one_law(&mut rng, cap, None), n);
        }
        let before = convolve(&rest, &target, n).prob_at_most(n)?;
        let after = convolve(&rest, &moved, n).prob_at_most(n)?;
        let total: Rat = moved.masses().iter().sum();
        let ok = moved.mean()? == Rat::one()
            && total == Rat::one()
            && moved.mass(k).is_zero()
            && after <= before;
        out.check(ok, || format!("n={n} k={k} law={target} -> {moved}: {before} vs {after}"));
    }
    Ok(out)
}

/// `m` is a median of `Bin(n, m/n)` for every `1 <= m <= n <= n_max`.
pub fn median_suite(n_max: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("median-equals-mean");
    let (cells, failures) = median_sweep(n_max)?;
    out.cases = cells;
    out.failures = failures.len() as u64;
    out.examples = failures.iter().take(5).map(|(n, m)| format!("n={n} m={m}")).collect();
    Ok(out)
}

/// `g(n, j)` agrees with convolving `n` copies of the two-point law.
pub fn cross_module_suite(n_max: u32) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("iid-objective-vs-convolution");
    for n in 2..=n_max {
        for j in 2..=n + 1 {
            let via_binomial = g(n as u64, j as u64)?;
            let via_convolution = eval_config(&Config::all_equal(n, j)?);
            out.check(via_binomial == via_convolution, || {
                format!("n={n} j={j}: {via_binomial} vs {via_convolution}")
            });
        }
    }
    Ok(out)
}

// first 40 decimals, truncated
const E_40: &str = "2.7182818284590452353602874713526624977572";
const INV_E_40: &str = "0.3678794411714423215955237701614608674458";

/// Enclosures of `e` and `1/e` meet 40-digit reference brackets and honor
/// the requested width.
pub fn exp_suite() -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("exp-enclosure-reference");
    let ulp = Rat::from(10u64).pow(-40)?;
    for (x, digits) in [(Rat::one(), E_40), (-Rat::one(), INV_E_40)] {
        let lo: Rat = digits.parse()?;
        let reference = RatInterval::new(lo.clone(), lo + &ulp)?;
        for exp10 in [3i64, 9, 12, 20, 30, 35] {
            let tol = Rat::from(10u64).pow(-exp10)?;
            let iv = exp_enclosure(&x, &tol)?;
            let ok = iv.width() <= tol && iv.lo() <= reference.hi() && reference.lo() <= iv.hi();
            out.check(ok, || format!("exp({x}) tol=1e-{exp10}: {iv}"));
        }
    }
    Ok(out)
}

/// Every suite with the given options, in a fixed order.
pub fn run_all(options: &SelftestOptions) -> Result<Vec<SuiteOutcome>> {
    Ok(vec![
        lemma5_suite(options.seed, options.cdf_cases)?,
        transport_suite(options.seed.wrapping_add(1), options.transport_cases)?,
        median_suite(options.median_n_max)?,
        cross_module_suite(options.cross_n_max)?,
        exp_suite()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_laws_are_mean_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for cap in 2..10 {
            for _ in 0..20 {
                let force = (cap >= 3).then_some(cap);
                let p = random_mean_one_law(&mut rng, cap, force);
                assert_eq!(p.mean().unwrap(), Rat::one());
                if let Some(k) = force {
                    assert!(p.mass(k).is_positive());
                }
            }
        }
    }

    #[test]
    fn small_suites_pass() {
        let options = SelftestOptions {
            cdf_cases: 100,
            transport_cases: 40,
            median_n_max: 25,
            cross_n_max: 6,
            ..SelftestOptions::default()
        };
        for suite in run_all(&options).unwrap() {
            assert!(suite.passed(), "{suite:?}");
        }
    }
}

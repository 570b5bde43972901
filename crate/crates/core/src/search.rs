//! Exhaustive verifier for the general (not identically distributed) case.
//!
//! Every machine of a minimizer is either the point mass at 1 or a
//! two-point law on `{0, j}` with `2 <= j <= n + 1`, so the search space is
//! the set of size-`n` multisets over the symbols `1, 2, ..., n + 1` (1
//! standing for the point mass). The verifier walks those multisets
//! depth-first in canonical order, sharing prefix convolutions, and can skip
//! subtrees whose certified lower bound exceeds the incumbent.
//!
//! The walk is split into top-level units (number of point masses, first
//! two-point atom). Units run in parallel, and progress is reported after
//! each batch of units so a caller can checkpoint and resume.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{convolve, MachineSpec, Pmf};
use crate::error::{domain, Error, Result};
use crate::exactnum::{binom_coeff, pow_rat, Rat};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// One extreme point of the search space: `ones` point masses at 1 and a
/// nondecreasing list of two-point atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Config {
    n: u32,
    ones: u32,
    jays: Vec<u32>,
}

impl Config {
    pub fn new(n: u32, ones: u32, mut jays: Vec<u32>) -> Result<Self> {
        if n < 2 {
            return domain(format!("configurations need n >= 2, got {n}"));
        }
        if ones as usize + jays.len() != n as usize {
            return domain(format!(
                "{ones} point masses and {} two-point machines do not make {n}",
                jays.len()
            ));
        }
        if let Some(j) = jays.iter().find(|&&j| j < 2 || j > n + 1) {
            return domain(format!("atom {j} outside [2, {}]", n + 1));
        }
        jays.sort_unstable();
        Ok(Config { n, ones, jays })
    }

    /// Builds a configuration from machine symbols (1 = point mass at 1).
    pub fn from_symbols(n: u32, symbols: &[u32]) -> Result<Self> {
        let ones = symbols.iter().filter(|&&s| s == 1).count() as u32;
        let jays = symbols.iter().copied().filter(|&s| s != 1).collect();
        Config::new(n, ones, jays)
    }

    /// Every machine two-point with atom `j`.
    pub fn all_equal(n: u32, j: u32) -> Result<Self> {
        Config::new(n, 0, vec![j; n as usize])
    }

    /// The conjectured minimizer: every machine two-point with atom `n + 1`.
    pub fn conjectured(n: u32) -> Result<Self> {
        Config::all_equal(n, n + 1)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ones(&self) -> u32 {
        self.ones
    }

    pub fn jays(&self) -> &[u32] {
        &self.jays
    }

    /// Sorted machine symbols, the canonical multiset representative.
    pub fn symbols(&self) -> Vec<u32> {
        let mut out = vec![1; self.ones as usize];
        out.extend_from_slice(&self.jays);
        out
    }

    pub fn specs(&self) -> Vec<MachineSpec> {
        let mut out = vec![MachineSpec::PointAtOne; self.ones as usize];
        out.extend(self.jays.iter().map(|&j| MachineSpec::TwoPoint(j)));
        out
    }
}

impl Ord for Config {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.symbols().cmp(&other.symbols()))
    }
}

impl PartialOrd for Config {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols().iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Number of multisets of size `size` over `alphabet` symbols.
pub fn multiset_count(size: u64, alphabet: u64) -> u64 {
    if size == 0 {
        return 1;
    }
    if alphabet == 0 {
        return 0;
    }
    let c = binom_coeff(size + alphabet - 1, size).expect("k <= n");
    u64::try_from(c).unwrap_or(u64::MAX)
}

/// Canonical-order iterator over all configurations of size `n`.
pub struct ConfigIter {
    n: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for ConfigIter {
    type Item = Config;

    fn next(&mut self) -> Option<Config> {
        let symbols = self.current.take()?;
        let top = self.n + 1;
        if let Some(i) = symbols.iter().rposition(|&s| s < top) {
            let mut next = symbols.clone();
            let v = next[i] + 1;
            for s in &mut next[i..] {
                *s = v;
            }
            self.current = Some(next);
        }
        Some(Config::from_symbols(self.n, &symbols).expect("valid by construction"))
    }
}

/// Every configuration of `n` machines exactly once, in lexicographic order
/// of the sorted symbol list.
pub fn enumerate_configs(n: u32) -> Result<ConfigIter> {
    if n < 2 {
        return domain(format!("enumeration needs n >= 2, got {n}"));
    }
    Ok(ConfigIter {
        n,
        current: Some(vec![1; n as usize]),
    })
}

/// Two-point law on `{0, j}` truncated at `cap`; an atom above the cap goes
/// to the overflow bucket.
fn two_point_capped(j: u32, cap: usize) -> Pmf {
    let hit = Rat::new(1, j).expect("j >= 2");
    let mut mass = vec![Rat::zero(); cap + 1];
    mass[0] = Rat::one() - &hit;
    let overflow = if j as usize <= cap {
        mass[j as usize] = hit;
        Rat::zero()
    } else {
        hit
    };
    Pmf::new(mass, overflow).expect("two-point law is valid")
}

/// Exact `P(sum <= n)` for a configuration. Point masses at 1 shift the
/// threshold down instead of being convolved.
pub fn eval_config(c: &Config) -> Rat {
    let threshold = (c.n - c.ones) as usize;
    let mut acc = Pmf::point(0, threshold).expect("0 <= cap");
    for &j in &c.jays {
        acc = convolve(&acc, &two_point_capped(j, threshold), threshold);
    }
    acc.prob_at_most(threshold).expect("threshold == cap")
}

/// Certified lower bounds `LB(r, t, j0)` on `P(S <= t)` over every sum `S`
/// of `r` two-point machines whose atoms are all at least `j0`.
///
/// Conditioning on the machine with the smallest atom `j` gives
/// `(1 - 1/j) P(rest <= t) + (1/j) P(rest <= t - j)` with every atom of the
/// rest at least `j`; bounding both terms from below independently and
/// minimizing over `j` yields the recursion.
struct LowerBounds {
    top: u32,
    max_t: usize,
    // table[r][t][j0 - 2]
    table: Vec<Vec<Vec<Rat>>>,
}

impl LowerBounds {
    fn new(n: u32, max_r: usize, max_t: usize) -> Self {
        let top = n + 1;
        let width = (top - 1) as usize;
        let mut table: Vec<Vec<Vec<Rat>>> = vec![vec![vec![Rat::one(); width]; max_t + 1]];
        for r in 1..=max_r {
            let prev = &table[r - 1];
            let mut layer = vec![vec![Rat::zero(); width]; max_t + 1];
            for t in 0..=max_t {
                let mut best: Option<Rat> = None;
                for j in (2..=top).rev() {
                    let idx = (j - 2) as usize;
                    let hit = Rat::new(1, j).expect("j >= 2");
                    let mut value = (Rat::one() - &hit) * &prev[t][idx];
                    if j as usize <= t {
                        value += hit * &prev[t - j as usize][idx];
                    }
                    let current = match best.take() {
                        Some(b) => b.min(value),
                        None => value,
                    };
                    layer[t][idx] = current.clone();
                    best = Some(current);
                }
            }
            table.push(layer);
        }
        LowerBounds { top, max_t, table }
    }

    fn get(&self, r: usize, t: usize, j0: u32) -> &Rat {
        debug_assert!(j0 >= 2 && j0 <= self.top && t <= self.max_t);
        &self.table[r][t][(j0 - 2) as usize]
    }
}

/// Best value seen so far and every configuration attaining it.
#[derive(Clone, Debug, Default)]
struct Incumbent {
    value: Option<Rat>,
    configs: Vec<Config>,
}

impl Incumbent {
    fn offer(&mut self, value: &Rat, config: &Config) {
        match &self.value {
            Some(best) if value > best => {}
            Some(best) if value == best => self.configs.push(config.clone()),
            _ => {
                self.value = Some(value.clone());
                self.configs = vec![config.clone()];
            }
        }
    }

    /// Seeds the bound used for pruning without recording a configuration.
    fn seeded(value: Rat) -> Self {
        Incumbent {
            value: Some(value),
            configs: Vec::new(),
        }
    }
}

/// A top-level slice of the walk: configurations with exactly `ones` point
/// masses whose smallest two-point atom is `first` (`None` when every
/// machine is a point mass).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Unit {
    ones: u32,
    first: Option<u32>,
}

impl Unit {
    fn prefix(&self) -> Vec<u32> {
        let mut out = vec![1; self.ones as usize];
        out.extend(self.first);
        out
    }
}

/// Units in canonical order (more point masses first, then by first atom).
fn units(n: u32) -> Vec<Unit> {
    let mut out = vec![Unit {
        ones: n,
        first: None,
    }];
    for ones in (0..n).rev() {
        for j in 2..=n + 1 {
            out.push(Unit {
                ones,
                first: Some(j),
            });
        }
    }
    out
}

/// Resumable progress record of a general-case run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub n: u32,
    pub prune: bool,
    /// Canonical symbol prefix of the last fully explored unit.
    pub canonical_prefix: Vec<u32>,
    pub incumbent_value: Option<Rat>,
    pub incumbent_configs: Vec<Config>,
    pub configs_evaluated: u64,
    pub configs_pruned: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: u32,
    pub min_value: Rat,
    pub argmin: Vec<Config>,
    pub conjecture_value: Rat,
    pub conjecture_holds: bool,
    pub argmin_unique_at_conjecture: bool,
    /// False when a resource limit stopped the walk early; every other
    /// field then describes only the explored part.
    pub complete: bool,
    pub configs_evaluated: u64,
    /// Advisory: depends on when incumbents are published.
    pub configs_pruned: u64,
    pub total_configs: u64,
    #[serde(with = "duration_ms")]
    pub wall_time: Duration,
}

impl SearchReport {
    /// Builds the verdict fields from a finished minimization.
    pub fn from_minimum(
        n: u32,
        min_value: Rat,
        mut argmin: Vec<Config>,
        complete: bool,
        counts: (u64, u64, u64),
        wall_time: Duration,
    ) -> Result<Self> {
        argmin.sort();
        argmin.dedup();
        let conjecture_value = conjecture_value(n)?;
        let conjectured = Config::conjectured(n)?;
        let conjecture_holds = min_value == conjecture_value && argmin.contains(&conjectured);
        let argmin_unique_at_conjecture = conjecture_holds && argmin.len() == 1;
        let (configs_evaluated, configs_pruned, total_configs) = counts;
        Ok(SearchReport {
            n,
            min_value,
            argmin,
            conjecture_value,
            conjecture_holds,
            argmin_unique_at_conjecture,
            complete,
            configs_evaluated,
            configs_pruned,
            total_configs,
            wall_time,
        })
    }

    /// Fields that must not depend on scheduling, worker count or resumes.
    pub fn verdict_fields(&self) -> (Rat, Vec<Config>, bool, bool, bool) {
        (
            self.min_value.clone(),
            self.argmin.clone(),
            self.conjecture_holds,
            self.argmin_unique_at_conjecture,
            self.complete,
        )
    }
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

/// `(n / (n + 1))^n`, the value of the conjectured minimizer.
pub fn conjecture_value(n: u32) -> Result<Rat> {
    pow_rat(&Rat::new(n, n + 1)?, n as i64)
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub prune: bool,
    /// Stop after exploring this many units in this invocation.
    pub max_units: Option<usize>,
    /// Units explored in parallel between progress reports.
    pub batch_size: usize,
    pub resume: Option<Checkpoint>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune: true,
            max_units: None,
            batch_size: 16,
            resume: None,
        }
    }
}

struct Walker<'a> {
    n: u32,
    threshold: usize,
    bounds: Option<&'a LowerBounds>,
    laws: Vec<Pmf>,
    best: &'a Mutex<Incumbent>,
    evaluated: u64,
    pruned: u64,
}

enum Flow {
    Continue,
    SkipLarger,
}

impl Walker<'_> {
    fn law(&self, j: u32) -> &Pmf {
        &self.laws[(j - 2) as usize]
    }

    fn record(&mut self, value: Rat, ones: u32, jays: &[u32]) {
        self.evaluated += 1;
        let config = Config {
            n: self.n,
            ones,
            jays: jays.to_vec(),
        };
        self.best.lock().expect("incumbent lock").offer(&value, &config);
    }

    fn incumbent(&self) -> Option<Rat> {
        self.best.lock().expect("incumbent lock").value.clone()
    }

    /// Places atom `j` on the next machine (`remaining` machines still to
    /// place, including this one). With `covers_larger`, a prune also
    /// accounts for every larger choice at this position.
    fn choose(
        &mut self,
        prefix: &Pmf,
        ones: u32,
        jays: &mut Vec<u32>,
        j: u32,
        remaining: usize,
        covers_larger: bool,
    ) -> Flow {
        let alphabet = (self.n + 2 - j) as u64;
        let skipped = if covers_larger {
            multiset_count(remaining as u64, alphabet)
        } else {
            multiset_count(remaining as u64 - 1, alphabet)
        };
        if let Some(bounds) = self.bounds {
            if j as usize > self.threshold {
                // Only the zero outcome of every remaining machine survives,
                // and 1 - 1/j grows with j: all-j is the unique best completion.
                let mut acc = prefix.clone();
                for _ in 0..remaining {
                    acc = convolve(&acc, self.law(j), self.threshold);
                    jays.push(j);
                }
                let value = acc.prob_at_most(self.threshold).expect("cap");
                self.record(value, ones, jays);
                jays.truncate(jays.len() - remaining);
                self.pruned += skipped - 1;
                return Flow::SkipLarger;
            }
            if let Some(incumbent) = self.incumbent() {
                let lower: Rat = prefix
                    .masses()
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.is_positive())
                    .map(|(s, p)| p * bounds.get(remaining, self.threshold - s, j))
                    .sum();
                if lower > incumbent {
                    self.pruned += skipped;
                    return Flow::SkipLarger;
                }
            }
        }
        let next = convolve(prefix, self.law(j), self.threshold);
        jays.push(j);
        self.descend(&next, ones, jays, j, remaining - 1);
        jays.pop();
        Flow::Continue
    }

    fn descend(&mut self, prefix: &Pmf, ones: u32, jays: &mut Vec<u32>, min_j: u32, remaining: usize) {
        if remaining == 0 {
            let value = prefix.prob_at_most(self.threshold).expect("cap");
            self.record(value, ones, jays);
            return;
        }
        for j in min_j..=self.n + 1 {
            if let Flow::SkipLarger = self.choose(prefix, ones, jays, j, remaining, true) {
                break;
            }
        }
    }
}

fn explore_unit(
    n: u32,
    unit: Unit,
    bounds: Option<&LowerBounds>,
    best: &Mutex<Incumbent>,
) -> (u64, u64) {
    let threshold = (n - unit.ones) as usize;
    let laws = (2..=n + 1).map(|j| two_point_capped(j, threshold)).collect();
    let mut walker = Walker {
        n,
        threshold,
        bounds,
        laws,
        best,
        evaluated: 0,
        pruned: 0,
    };
    let start = Pmf::point(0, threshold).expect("0 <= cap");
    let mut jays = Vec::with_capacity(threshold);
    match unit.first {
        None => walker.descend(&start, unit.ones, &mut jays, 2, 0),
        Some(j) => {
            walker.choose(&start, unit.ones, &mut jays, j, threshold, false);
        }
    }
    (walker.evaluated, walker.pruned)
}

/// Minimizes `P(sum <= n)` over every extreme-point configuration.
///
/// `progress` is called after each batch of units with a checkpoint that a
/// later call can resume from through [`SearchOptions::resume`].
pub fn verify_general_with(
    n: u32,
    options: &SearchOptions,
    mut progress: impl FnMut(&Checkpoint) -> Result<()>,
) -> Result<SearchReport> {
    if n < 2 {
        return domain(format!("verification needs n >= 2, got {n}"));
    }
    let started = Instant::now();
    let all_units = units(n);
    let total_configs = multiset_count(n as u64, n as u64 + 1);

    let (mut skip, incumbent, mut evaluated, mut pruned) = match &options.resume {
        Some(cp) => {
            if cp.schema_version != CHECKPOINT_SCHEMA_VERSION {
                return Err(Error::Checkpoint(format!(
                    "unsupported schema version {}",
                    cp.schema_version
                )));
            }
            if cp.n != n || cp.prune != options.prune {
                return Err(Error::Checkpoint(format!(
                    "checkpoint is for n = {} prune = {}, run is n = {n} prune = {}",
                    cp.n, cp.prune, options.prune
                )));
            }
            let done = all_units
                .iter()
                .position(|u| u.prefix() == cp.canonical_prefix)
                .ok_or_else(|| Error::Checkpoint("unknown canonical prefix".into()))?;
            let incumbent = Incumbent {
                value: cp.incumbent_value.clone(),
                configs: cp.incumbent_configs.clone(),
            };
            (done + 1, incumbent, cp.configs_evaluated, cp.configs_pruned)
        }
        None => {
            let incumbent = if options.prune {
                Incumbent::seeded(eval_config(&Config::conjectured(n)?))
            } else {
                Incumbent::default()
            };
            (0, incumbent, 0, 0)
        }
    };

    let bounds = options
        .prune
        .then(|| LowerBounds::new(n, n as usize, n as usize));
    let best = Mutex::new(incumbent);
    let batch_size = options.batch_size.max(1);
    let mut budget = options.max_units.unwrap_or(usize::MAX);

    while skip < all_units.len() && budget > 0 {
        let take = batch_size.min(budget).min(all_units.len() - skip);
        let batch = &all_units[skip..skip + take];
        let batch_evaluated = AtomicU64::new(0);
        let batch_pruned = AtomicU64::new(0);
        batch.par_iter().for_each(|&unit| {
            let (e, p) = explore_unit(n, unit, bounds.as_ref(), &best);
            batch_evaluated.fetch_add(e, AtomicOrdering::Relaxed);
            batch_pruned.fetch_add(p, AtomicOrdering::Relaxed);
        });
        evaluated += batch_evaluated.into_inner();
        pruned += batch_pruned.into_inner();
        skip += take;
        budget -= take;

        let snapshot = best.lock().expect("incumbent lock").clone();
        let mut configs = snapshot.configs;
        configs.sort();
        progress(&Checkpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            n,
            prune: options.prune,
            canonical_prefix: all_units[skip - 1].prefix(),
            incumbent_value: snapshot.value,
            incumbent_configs: configs,
            configs_evaluated: evaluated,
            configs_pruned: pruned,
        })?;
    }

    let complete = skip == all_units.len();
    let best = best.into_inner().expect("incumbent lock");
    let min_value = match best.value {
        Some(v) if !best.configs.is_empty() => v,
        // nothing explored yet in a budget-limited run
        _ => Rat::one(),
    };
    SearchReport::from_minimum(
        n,
        min_value,
        best.configs,
        complete,
        (evaluated, pruned, total_configs),
        started.elapsed(),
    )
}

/// [`verify_general_with`] without checkpointing or limits.
pub fn verify_general(n: u32, prune: bool) -> Result<SearchReport> {
    let options = SearchOptions {
        prune,
        ..SearchOptions::default()
    };
    verify_general_with(n, &options, |_| Ok(()))
}

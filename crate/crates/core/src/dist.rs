//! Exact probability mass functions on `{0, ..., cap}` with an overflow
//! bucket, and the single-machine laws of the extreme-point search space.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exactnum::Rat;

/// Finite law on `{0, ..., cap}` plus the aggregated mass of every value
/// above `cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pmf {
    mass: Vec<Rat>,
    overflow: Rat,
}

impl Pmf {
    /// Validates nonnegativity and total mass exactly one.
    pub fn new(mass: Vec<Rat>, overflow: Rat) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(v) = mass.iter().position(Rat::is_negative) {
            return Err(Error::InvalidDistribution(format!("negative mass at {v}")));
        }
        if overflow.is_negative() {
            return Err(Error::InvalidDistribution("negative overflow".into()));
        }
        let total: Rat = mass.iter().sum::<Rat>() + &overflow;
        if total != Rat::one() {
            return Err(Error::InvalidDistribution(format!("total mass {total} != 1")));
        }
        Ok(Pmf { mass, overflow })
    }

    /// Builds a law from `(value, mass)` atoms on `{0, ..., cap}`.
    pub fn from_atoms(cap: usize, atoms: &[(usize, Rat)]) -> Result<Self> {
        let mut mass = vec![Rat::zero(); cap + 1];
        for (v, p) in atoms {
            if *v > cap {
                return domain(format!("atom at {v} above cap {cap}"));
            }
            mass[*v] += p;
        }
        Pmf::new(mass, Rat::zero())
    }

    /// Point mass at `value`, which must not exceed `cap`.
    pub fn point(value: usize, cap: usize) -> Result<Self> {
        Pmf::from_atoms(cap, &[(value, Rat::one())])
    }

    pub fn cap(&self) -> usize {
        self.mass.len() - 1
    }

    /// Mass at `v`; zero for `v > cap` (that mass lives in the overflow).
    pub fn mass(&self, v: usize) -> Rat {
        self.mass.get(v).cloned().unwrap_or_default()
    }

    pub fn masses(&self) -> &[Rat] {
        &self.mass
    }

    pub fn overflow(&self) -> &Rat {
        &self.overflow
    }

    /// Support points with positive mass, excluding the overflow.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.mass.iter().enumerate().filter(|(_, p)| p.is_positive())
    }

    pub fn convolve(&self, other: &Pmf, cap: usize) -> Pmf {
        convolve(self, other, cap)
    }

    pub fn prob_at_most(&self, t: usize) -> Result<Rat> {
        prob_at_most(self, t)
    }

    pub fn mean(&self) -> Result<Rat> {
        mean(self)
    }
}

impl fmt::Display for Pmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (v, p) in self.atoms() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{v}: {p}")?;
            first = false;
        }
        if self.overflow.is_positive() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "overflow: {}", self.overflow)?;
        }
        write!(f, "}}")
    }
}

/// Law of one machine at an extreme point: either the point mass at 1 or
/// mass `1 - 1/j` at 0 and `1/j` at `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MachineSpec {
    PointAtOne,
    TwoPoint(u32),
}

impl MachineSpec {
    /// Validated two-point law; `j >= 2` is required for a mean-one law with
    /// mass at 0.
    pub fn two_point(j: u32) -> Result<Self> {
        if j < 2 {
            return domain(format!("two-point atom j = {j} must be at least 2"));
        }
        Ok(MachineSpec::TwoPoint(j))
    }

    pub fn largest_support(&self) -> usize {
        match self {
            MachineSpec::PointAtOne => 1,
            MachineSpec::TwoPoint(j) => *j as usize,
        }
    }

    /// Symbol used when listing configurations: 1 for the point mass, `j`
    /// otherwise.
    pub fn symbol(&self) -> u32 {
        match self {
            MachineSpec::PointAtOne => 1,
            MachineSpec::TwoPoint(j) => *j,
        }
    }

    pub fn from_symbol(symbol: u32) -> Result<Self> {
        match symbol {
            0 => domain("machine symbol 0 is not a mean-one law"),
            1 => Ok(MachineSpec::PointAtOne),
            j => MachineSpec::two_point(j),
        }
    }
}

/// Exact law of a machine on `{0, ..., cap}`.
pub fn pmf_of(spec: MachineSpec, cap: usize) -> Result<Pmf> {
    if cap < spec.largest_support() {
        return domain(format!(
            "cap {cap} below largest support point {}",
            spec.largest_support()
        ));
    }
    match spec {
        MachineSpec::PointAtOne => Pmf::point(1, cap),
        MachineSpec::TwoPoint(j) => {
            if j < 2 {
                return domain(format!("two-point atom j = {j} must be at least 2"));
            }
            let hit = Rat::new(1, j)?;
            Pmf::from_atoms(cap, &[(0, Rat::one() - &hit), (j as usize, hit)])
        }
    }
}

/// Law of the independent sum, truncated at `cap`. Anything above `cap`,
/// including every pairing with either overflow bucket, lands in the
/// result's overflow.
pub fn convolve(a: &Pmf, b: &Pmf, cap: usize) -> Pmf {
    let mut mass = vec![Rat::zero(); cap + 1];
    for (u, pu) in a.atoms() {
        if u > cap {
            break;
        }
        for (v, pv) in b.atoms() {
            if u + v > cap {
                break;
            }
            mass[u + v] += pu * pv;
        }
    }
    let kept: Rat = mass.iter().sum();
    let overflow = Rat::one() - kept;
    Pmf { mass, overflow }
}

/// `P(X <= t)`, exact as long as `t` does not exceed the cap.
pub fn prob_at_most(p: &Pmf, t: usize) -> Result<Rat> {
    if t > p.cap() {
        return domain(format!("threshold {t} above cap {}", p.cap()));
    }
    Ok(p.mass[..=t].iter().sum())
}

/// Exact mean; refuses laws with overflow since their mean is unknown.
pub fn mean(p: &Pmf) -> Result<Rat> {
    if p.overflow.is_positive() {
        return domain("mean of a law with overflow mass is undefined");
    }
    Ok(p.atoms().map(|(v, m)| Rat::from(v as u64) * m).sum())
}

/// Moves the atom at `k > n + 1` of a mean-one law onto `{0, n + 1}`,
/// keeping mean one and leaving every atom in `1..=n` untouched.
pub fn lemma1_transport(p: &Pmf, n: usize, k: usize) -> Result<Pmf> {
    if k <= n + 1 {
        return domain(format!("transport needs k > n + 1, got k = {k}, n = {n}"));
    }
    if k > p.cap() {
        return domain(format!("atom {k} above cap {}", p.cap()));
    }
    let m = mean(p)?;
    if m != Rat::one() {
        return Err(Error::InvalidDistribution(format!("mean {m} != 1")));
    }
    let pk = p.mass(k);
    if pk.is_zero() {
        return Ok(p.clone());
    }
    let ratio = Rat::new(k as u64, n as u64 + 1)?;
    let moved_down = (&ratio - Rat::one()) * &pk;
    if p.mass(0) < moved_down {
        return Err(Error::InvalidDistribution(format!(
            "mass at 0 ({}) cannot absorb {moved_down}",
            p.mass(0)
        )));
    }
    let mut mass = p.mass.clone();
    mass[k] = Rat::zero();
    mass[n + 1] += &ratio * &pk;
    mass[0] -= &moved_down;
    Pmf::new(mass, p.overflow.clone())
}

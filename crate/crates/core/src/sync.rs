//! Joint-order frequencies of in-phase order series.
//!
//! A series `F_t` orders at `t, 2t, 3t, …` (phase 0). `UJR` is the long-run
//! number of epochs per period at which at least one series orders, `IJR` the
//! number at which every given family orders. Both are computed exactly by
//! inclusion–exclusion; [`ujr_enumerate`] and [`ijr_enumerate`] count epochs
//! explicitly over one hyperperiod and serve as oracles.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::model::rational::{format_rational, is_positive, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyncError {
    #[error("series period must be positive, got {0}")]
    NonPositivePeriod(String),
    #[error("series family `{0}` is empty")]
    EmptyFamily(String),
    #[error("no series given")]
    NoSeries,
    #[error(
        "{count} distinct series exceed the inclusion-exclusion cap of {cap}; use the enumeration oracle"
    )]
    SubsetCap { count: usize, cap: usize },
    #[error("{points} epochs in one hyperperiod exceed the enumeration cap of {cap}")]
    EnumerationCap { points: String, cap: u64 },
    #[error("seeds must satisfy 0 < beta_i <= beta_j, got {0} and {1}")]
    SeedOrder(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncConfig {
    /// Largest number of distinct minimal series handled by inclusion–exclusion.
    pub subset_cap: usize,
    /// Largest number of epochs the enumeration oracle may materialize.
    pub enumeration_cap: u64,
}

impl Default for SyncConfig {
    fn default() -> Self {
        SyncConfig {
            subset_cap: 20,
            enumeration_cap: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderSeries {
    period: Rational,
}

impl OrderSeries {
    pub fn new(period: Rational) -> Result<Self, SyncError> {
        if !is_positive(&period) {
            return Err(SyncError::NonPositivePeriod(format_rational(&period)));
        }
        Ok(OrderSeries { period })
    }

    pub fn period(&self) -> &Rational {
        &self.period
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesFamily {
    series: Vec<OrderSeries>,
    label: String,
}

impl SeriesFamily {
    pub fn new(label: impl Into<String>, series: Vec<OrderSeries>) -> Result<Self, SyncError> {
        let label = label.into();
        if series.is_empty() {
            return Err(SyncError::EmptyFamily(label));
        }
        Ok(SeriesFamily { series, label })
    }

    /// Family from raw periods.
    pub fn from_periods<I>(label: impl Into<String>, periods: I) -> Result<Self, SyncError>
    where
        I: IntoIterator<Item = Rational>,
    {
        let series = periods
            .into_iter()
            .map(OrderSeries::new)
            .collect::<Result<Vec<_>, _>>()?;
        SeriesFamily::new(label, series)
    }

    /// The family `(A, β) = ⋃_{k ∈ A} F_{β·k}`.
    pub fn seeded(
        label: impl Into<String>,
        multipliers: &[u64],
        seed: &Rational,
    ) -> Result<Self, SyncError> {
        SeriesFamily::from_periods(
            label,
            multipliers
                .iter()
                .map(|k| Rational::from_integer(BigInt::from(*k)) * seed),
        )
    }

    pub fn series(&self) -> &[OrderSeries] {
        &self.series
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn periods(&self) -> impl Iterator<Item = &Rational> {
        self.series.iter().map(|s| &s.period)
    }

    /// Union of two families as one family.
    pub fn union(&self, other: &SeriesFamily) -> SeriesFamily {
        SeriesFamily {
            series: self.series.iter().chain(&other.series).cloned().collect(),
            label: format!("{}+{}", self.label, other.label),
        }
    }
}

fn require_positive(x: &Rational) -> Result<(), SyncError> {
    if is_positive(x) {
        Ok(())
    } else {
        Err(SyncError::NonPositivePeriod(format_rational(x)))
    }
}

/// Smallest positive rational that is an integer multiple of both `a` and `b`.
pub fn lcm_rational(a: &Rational, b: &Rational) -> Result<Rational, SyncError> {
    require_positive(a)?;
    require_positive(b)?;
    Ok(lcm_unchecked(a, b))
}

fn lcm_unchecked(a: &Rational, b: &Rational) -> Rational {
    let num = (a.numer() * b.denom()).lcm(&(b.numer() * a.denom()));
    Rational::new(num, a.denom() * b.denom())
}

fn all_periods(families: &[SeriesFamily]) -> Vec<Rational> {
    families.iter().flat_map(|f| f.periods().cloned()).collect()
}

/// LCM of every period in every family.
pub fn hyperperiod(families: &[SeriesFamily]) -> Result<Rational, SyncError> {
    let periods = all_periods(families);
    let mut iter = periods.iter();
    let first = iter.next().ok_or(SyncError::NoSeries)?.clone();
    Ok(iter.fold(first, |acc, t| lcm_unchecked(&acc, t)))
}

/// Periods rescaled to coprime-free positive integers: `t_i = n_i / scale`.
struct Scaled {
    ints: Vec<BigUint>,
    scale: BigUint,
}

fn scale_to_integers(periods: &[Rational]) -> Scaled {
    let scale = periods
        .iter()
        .fold(BigInt::one(), |acc, t| acc.lcm(t.denom()));
    let ints = periods
        .iter()
        .map(|t| {
            (t.numer() * (&scale / t.denom()))
                .to_biguint()
                .expect("positive period")
        })
        .collect();
    Scaled {
        ints,
        scale: scale.to_biguint().expect("positive scale"),
    }
}

/// Sorted, deduplicated periods with every multiple of another period
/// removed (`F_{a·b} ⊆ F_b`, so it never changes the union).
fn minimal_periods<T: Clone + Ord>(mut ints: Vec<T>, divides: impl Fn(&T, &T) -> bool) -> Vec<T> {
    ints.sort();
    ints.dedup();
    let mut kept: Vec<T> = Vec::with_capacity(ints.len());
    for p in ints {
        if !kept.iter().any(|q| divides(q, &p)) {
            kept.push(p);
        }
    }
    kept
}

/// Inclusion–exclusion as a map `lcm → signed coefficient`: the union
/// density of integer series is `Σ c / l`. Merging equal lcms keeps the map
/// far below `2^k` entries for structured inputs.
fn lcm_coefficients(ints: &[BigUint]) -> BTreeMap<BigUint, BigInt> {
    let mut map: BTreeMap<BigUint, BigInt> = BTreeMap::new();
    for p in ints {
        let mut next = map.clone();
        for (l, c) in &map {
            let entry = next.entry(l.lcm(p)).or_insert_with(BigInt::zero);
            *entry -= c;
        }
        *next.entry(p.clone()).or_insert_with(BigInt::zero) += 1;
        next.retain(|_, c| !c.is_zero());
        map = next;
    }
    map
}

/// Exact union frequency of in-phase series with the given periods.
pub fn union_rate(periods: &[Rational], config: &SyncConfig) -> Result<Rational, SyncError> {
    if periods.is_empty() {
        return Err(SyncError::NoSeries);
    }
    for t in periods {
        require_positive(t)?;
    }
    let Scaled { ints, scale } = scale_to_integers(periods);
    let ints = minimal_periods(ints, |q, p| (p % q).is_zero());
    if ints.len() > config.subset_cap {
        return Err(SyncError::SubsetCap {
            count: ints.len(),
            cap: config.subset_cap,
        });
    }
    let scale = Rational::from_integer(BigInt::from(scale));
    let density = lcm_coefficients(&ints)
        .into_iter()
        .fold(Rational::zero(), |acc, (l, c)| {
            acc + Rational::new(c, BigInt::from(l))
        });
    Ok(density * scale)
}

/// Union of integer series in machine words: returns `(count, hyperperiod)`
/// with `UJR = count / hyperperiod`, or `None` on overflow.
///
/// This is the hot path of the profile searches.
pub fn union_count_u64(periods: &[u64]) -> Option<(u128, u128)> {
    let ints = minimal_periods(periods.to_vec(), |q, p| *q != 0 && p % q == 0);
    if ints.first() == Some(&0) || ints.is_empty() {
        return None;
    }
    let mut hyper: u128 = 1;
    for p in &ints {
        hyper = lcm_u128(hyper, *p as u128)?;
    }
    // Accumulate Σ c·(T/l) where T is the hyperperiod; each term is an integer.
    let mut map: BTreeMap<u128, i128> = BTreeMap::new();
    for p in &ints {
        let p = *p as u128;
        let mut next = map.clone();
        for (l, c) in &map {
            let e = next.entry(lcm_u128(*l, p)?).or_insert(0);
            *e -= c;
        }
        *next.entry(p).or_insert(0) += 1;
        next.retain(|_, c| *c != 0);
        map = next;
    }
    let mut count: i128 = 0;
    for (l, c) in map {
        let term = i128::try_from(hyper / l).ok()?.checked_mul(c)?;
        count = count.checked_add(term)?;
    }
    Some((u128::try_from(count).ok()?, hyper))
}

fn lcm_u128(a: u128, b: u128) -> Option<u128> {
    (a / a.gcd(&b)).checked_mul(b)
}

/// `UJR` of all series in all families.
pub fn ujr(families: &[SeriesFamily], config: &SyncConfig) -> Result<Rational, SyncError> {
    union_rate(&all_periods(families), config)
}

/// Epoch census over one common hyperperiod `T`: for every set of families
/// (bit `i` for family `i`), how many epochs in `(0, T]` are ordered by
/// exactly that set. Any union or intersection rate of the families, or of
/// a subset of them, follows by summing counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    pub hyperperiod: Rational,
    pub counts: BTreeMap<u32, u128>,
}

impl Occupancy {
    /// Rate of epochs where at least one family in `mask` orders.
    pub fn union_rate(&self, mask: u32) -> Rational {
        self.rate(|m| m & mask != 0)
    }

    /// Rate of epochs where every family in `mask` orders.
    pub fn intersection_rate(&self, mask: u32) -> Rational {
        self.rate(|m| m & mask == mask)
    }

    fn rate(&self, keep: impl Fn(u32) -> bool) -> Rational {
        let count: u128 = self
            .counts
            .iter()
            .filter(|(m, _)| keep(**m))
            .map(|(_, c)| c)
            .sum();
        Rational::from_integer(BigInt::from(count)) / &self.hyperperiod
    }
}

/// Walks every epoch in `(0, T]` in increasing order by merging the series'
/// progressions and records which families order at each one. At most 32
/// families.
pub fn epoch_occupancy(
    families: &[SeriesFamily],
    config: &SyncConfig,
) -> Result<Occupancy, SyncError> {
    let periods = all_periods(families);
    if periods.is_empty() {
        return Err(SyncError::NoSeries);
    }
    assert!(families.len() <= 32, "at most 32 families");
    let owners: Vec<u32> = families
        .iter()
        .enumerate()
        .flat_map(|(i, f)| std::iter::repeat_n(1u32 << i, f.series().len()))
        .collect();
    let Scaled { ints, scale } = scale_to_integers(&periods);
    let hyper = scaled_hyper(&ints);
    let cap = config.enumeration_cap;
    let mut points = BigUint::zero();
    for p in &ints {
        points += &hyper / p;
    }
    if points > BigUint::from(cap) {
        return Err(SyncError::EnumerationCap {
            points: points.to_string(),
            cap,
        });
    }
    let too_big = || SyncError::EnumerationCap {
        points: format!("hyperperiod {hyper}"),
        cap,
    };
    let end = hyper.to_u128().ok_or_else(too_big)?;
    let steps: Vec<u128> = ints
        .iter()
        .map(|p| p.to_u128().ok_or_else(too_big))
        .collect::<Result<_, _>>()?;
    let mut heap: BinaryHeap<Reverse<(u128, usize)>> = steps
        .iter()
        .enumerate()
        .map(|(i, p)| Reverse((*p, i)))
        .collect();
    let mut counts = BTreeMap::new();
    while let Some(Reverse((epoch, _))) = heap.peek().copied() {
        let mut mask = 0u32;
        while let Some(Reverse((e, i))) = heap.peek().copied() {
            if e != epoch {
                break;
            }
            heap.pop();
            mask |= owners[i];
            if e + steps[i] <= end {
                heap.push(Reverse((e + steps[i], i)));
            }
        }
        *counts.entry(mask).or_insert(0u128) += 1;
    }
    Ok(Occupancy {
        hyperperiod: Rational::new(BigInt::from(hyper), BigInt::from(scale)),
        counts,
    })
}

fn full_mask(families: &[SeriesFamily]) -> u32 {
    ((1u64 << families.len()) - 1) as u32
}

fn scaled_hyper(ints: &[BigUint]) -> BigUint {
    ints.iter().fold(BigUint::one(), |acc, p| acc.lcm(p))
}

/// Oracle for [`ujr`]: walks every epoch in `(0, T]` and divides the number
/// of distinct ones by `T`.
pub fn ujr_enumerate(
    families: &[SeriesFamily],
    config: &SyncConfig,
) -> Result<Rational, SyncError> {
    Ok(epoch_occupancy(families, config)?.union_rate(full_mask(families)))
}

/// `IJR` of several families: epochs at which every family orders.
///
/// An intersection of unions is the union, over one series picked from each
/// family, of `F_{lcm(picks)}`; that union goes through the same
/// inclusion–exclusion engine as [`ujr`].
pub fn ijr(families: &[SeriesFamily], config: &SyncConfig) -> Result<Rational, SyncError> {
    if families.is_empty() {
        return Err(SyncError::NoSeries);
    }
    let mut combos: Vec<Rational> = vec![];
    for (i, family) in families.iter().enumerate() {
        let minimal = minimal_rationals(family.periods().cloned().collect());
        if i == 0 {
            combos = minimal;
            continue;
        }
        let mut next = Vec::with_capacity(combos.len() * minimal.len());
        for c in &combos {
            for t in &minimal {
                next.push(lcm_unchecked(c, t));
            }
        }
        combos = minimal_rationals(next);
        if combos.len() > config.subset_cap {
            return Err(SyncError::SubsetCap {
                count: combos.len(),
                cap: config.subset_cap,
            });
        }
    }
    union_rate(&combos, config)
}

fn minimal_rationals(periods: Vec<Rational>) -> Vec<Rational> {
    // q divides p as rationals iff p/q is an integer.
    minimal_periods(periods, |q, p| (p / q).is_integer())
}

/// Oracle for [`ijr`]: counts the epochs at which some series of every
/// family orders.
pub fn ijr_enumerate(
    families: &[SeriesFamily],
    config: &SyncConfig,
) -> Result<Rational, SyncError> {
    Ok(epoch_occupancy(families, config)?.intersection_rate(full_mask(families)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossSeed {
    pub value: Rational,
    pub q: BigInt,
    pub r: BigInt,
}

/// `IJR(F_{β_i}, F_{β_j})` through the irreducible form `β_j/β_i = 1 + q/r`,
/// which gives `1/(β_i·(r+q))`.
pub fn ijr_cross_seed(beta_i: &Rational, beta_j: &Rational) -> Result<CrossSeed, SyncError> {
    if !is_positive(beta_i) || beta_i > beta_j {
        return Err(SyncError::SeedOrder(
            format_rational(beta_i),
            format_rational(beta_j),
        ));
    }
    let ratio = beta_j / beta_i;
    let r = ratio.denom().clone();
    let q = ratio.numer() - &r;
    let value = (beta_i * Rational::from_integer(&r + &q)).recip();
    Ok(CrossSeed { value, q, r })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `UJR(F₁,F₂) = UJR(F₁) + UJR(F₂) − IJR(F₁,F₂)`
    UnionSplit,
    /// `IJR(F₁,F₂,F₃) ≤ IJR(F₁,F₂)`
    IntersectionShrinks,
    /// `IJR(F₁, F₂∪F₃) = IJR(F₁,F₂) + IJR(F₁,F₃) − IJR(F₁,F₂,F₃)`
    IntersectionDistributes,
    /// `IJR(F₁,F₂) ≤ IJR(F₃,F₄)` when `F₁ ⊆ F₃` and `F₂ ⊆ F₄`
    Monotone,
}

impl Identity {
    pub const ALL: [Identity; 4] = [
        Identity::UnionSplit,
        Identity::IntersectionShrinks,
        Identity::IntersectionDistributes,
        Identity::Monotone,
    ];

    pub fn number(self) -> u8 {
        match self {
            Identity::UnionSplit => 1,
            Identity::IntersectionShrinks => 2,
            Identity::IntersectionDistributes => 3,
            Identity::Monotone => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Identity::ALL.into_iter().find(|i| i.number() == n)
    }

    /// Families the identity reads.
    pub fn arity(self) -> usize {
        match self {
            Identity::UnionSplit => 2,
            Identity::IntersectionShrinks | Identity::IntersectionDistributes => 3,
            Identity::Monotone => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub lhs: Rational,
    pub rhs: Rational,
    /// False when the premise of a conditional identity does not hold; the
    /// check is then vacuous.
    pub applicable: bool,
    pub holds: bool,
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.identity {
            Identity::UnionSplit | Identity::IntersectionDistributes => "=",
            _ => "<=",
        };
        write!(
            f,
            "identity {}: {} {rel} {} [{}]",
            self.identity.number(),
            format_rational(&self.lhs),
            format_rational(&self.rhs),
            if !self.applicable {
                "n/a"
            } else if self.holds {
                "ok"
            } else {
                "VIOLATED"
            }
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn violations(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| c.applicable && !c.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Evaluates the selected union/intersection identities on the leading
/// families of `families` (2, 3, 3 and 4 families respectively).
/// Identities needing more families than supplied are skipped.
pub fn check_cardinality_identities(
    families: &[SeriesFamily],
    which: &[Identity],
    config: &SyncConfig,
) -> Result<IdentityReport, SyncError> {
    let mut report = IdentityReport::default();
    for &identity in which {
        if families.len() < identity.arity() {
            continue;
        }
        let f = families;
        let (lhs, rhs, applicable) = match identity {
            Identity::UnionSplit => {
                let lhs = ujr(&f[..2], config)?;
                let rhs = ujr(&f[..1], config)? + ujr(&f[1..2], config)? - ijr(&f[..2], config)?;
                (lhs, rhs, true)
            }
            Identity::IntersectionShrinks => (ijr(&f[..3], config)?, ijr(&f[..2], config)?, true),
            Identity::IntersectionDistributes => {
                let lhs = ijr(&[f[0].clone(), f[1].union(&f[2])], config)?;
                let rhs = ijr(&f[..2], config)? + ijr(&[f[0].clone(), f[2].clone()], config)?
                    - ijr(&f[..3], config)?;
                (lhs, rhs, true)
            }
            Identity::Monotone => {
                let applicable =
                    is_subfamily(&f[0], &f[2], config)? && is_subfamily(&f[1], &f[3], config)?;
                let lhs = ijr(&f[..2], config)?;
                let rhs = ijr(&f[2..4], config)?;
                (lhs, rhs, applicable)
            }
        };
        let holds = match identity {
            Identity::UnionSplit | Identity::IntersectionDistributes => lhs == rhs,
            _ => lhs <= rhs,
        };
        report.checks.push(IdentityCheck {
            identity,
            lhs,
            rhs,
            applicable,
            holds,
        });
    }
    Ok(report)
}

/// Epoch-set inclusion `a ⊆ b`, decided by `UJR(a ∪ b) = UJR(b)`.
pub fn is_subfamily(
    a: &SeriesFamily,
    b: &SeriesFamily,
    config: &SyncConfig,
) -> Result<bool, SyncError> {
    Ok(ujr(&[a.union(b)], config)? == ujr(std::slice::from_ref(b), config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational::{int, ratio};
    use proptest::prelude::*;

    fn fam(label: &str, ps: &[Rational]) -> SeriesFamily {
        SeriesFamily::from_periods(label, ps.iter().cloned()).unwrap()
    }

    fn ints(label: &str, ps: &[i64]) -> SeriesFamily {
        fam(label, &ps.iter().map(|p| int(*p)).collect::<Vec<_>>())
    }

    fn cfg() -> SyncConfig {
        SyncConfig::default()
    }

    /// Brute-force lcm: smallest multiple of `a` that is a multiple of `b`.
    fn lcm_by_search(a: &Rational, b: &Rational) -> Rational {
        (1..10_000)
            .map(|k| a * int(k))
            .find(|m| (m / b).is_integer())
            .unwrap()
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_rational(&int(4), &int(6)).unwrap(), int(12));
        assert_eq!(
            lcm_rational(&ratio(3, 2), &ratio(5, 2)).unwrap(),
            ratio(15, 2)
        );
        assert_eq!(
            lcm_rational(&ratio(3, 2), &ratio(5, 2)).unwrap(),
            ratio(1, 2) * lcm_rational(&int(3), &int(5)).unwrap()
        );
        assert_eq!(
            lcm_rational(&ratio(7, 3), &ratio(7, 3)).unwrap(),
            ratio(7, 3)
        );
        assert!(lcm_rational(&int(0), &int(3)).is_err());
    }

    #[test]
    fn hyperperiods() {
        assert_eq!(hyperperiod(&[ints("a", &[2, 3])]).unwrap(), int(6));
        assert_eq!(
            hyperperiod(&[ints("a", &[4]), ints("b", &[6])]).unwrap(),
            int(12)
        );
        assert_eq!(
            hyperperiod(&[fam("a", &[ratio(3, 2), ratio(5, 2)])]).unwrap(),
            lcm_by_search(&ratio(3, 2), &ratio(5, 2))
        );
    }

    #[test]
    fn ujr_examples() {
        let f = ints("a", &[2, 3]);
        assert_eq!(ujr(std::slice::from_ref(&f), &cfg()).unwrap(), ratio(2, 3));
        assert_eq!(ujr_enumerate(&[f], &cfg()).unwrap(), ratio(2, 3));
        assert_eq!(ujr(&[ints("a", &[5])], &cfg()).unwrap(), ratio(1, 5));
        assert_eq!(ujr(&[ints("a", &[7, 7])], &cfg()).unwrap(), ratio(1, 7));
        let f = ints("a", &[4, 6]);
        assert_eq!(ujr(std::slice::from_ref(&f), &cfg()).unwrap(), ratio(1, 3));
        assert_eq!(ujr_enumerate(&[f], &cfg()).unwrap(), ratio(1, 3));
    }

    #[test]
    fn ijr_examples() {
        let (f4, f6) = (ints("a", &[4]), ints("b", &[6]));
        assert_eq!(
            ijr(&[f4.clone(), f6.clone()], &cfg()).unwrap(),
            ratio(1, 12)
        );
        assert_eq!(
            ijr(&[f4.clone(), f6.clone()], &cfg()).unwrap(),
            lcm_rational(&int(4), &int(6)).unwrap().recip()
        );
        assert_eq!(ijr(&[f4.clone(), f4], &cfg()).unwrap(), ratio(1, 4));
        let three = [ints("a", &[2]), ints("b", &[3]), ints("c", &[5])];
        assert_eq!(ijr(&three, &cfg()).unwrap(), ratio(1, 30));
        assert_eq!(ijr_enumerate(&three, &cfg()).unwrap(), ratio(1, 30));
    }

    #[test]
    fn caps_are_enforced() {
        let primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
        let small = SyncConfig {
            subset_cap: 4,
            enumeration_cap: 100,
        };
        let f = ints("p", &primes[..5]);
        assert!(matches!(
            ujr(std::slice::from_ref(&f), &small),
            Err(SyncError::SubsetCap { count: 5, cap: 4 })
        ));
        assert!(matches!(
            ujr_enumerate(&[f], &small),
            Err(SyncError::EnumerationCap { .. })
        ));
        // multiples of a kept period do not count against the cap
        let f = ints("p", &[2, 4, 6, 8, 10, 12]);
        assert_eq!(ujr(&[f], &small).unwrap(), ratio(1, 2));
    }

    #[test]
    fn cross_seed_examples() {
        let c = ijr_cross_seed(&int(1), &ratio(101, 100)).unwrap();
        assert_eq!(
            (c.q.clone(), c.r.clone()),
            (BigInt::from(1), BigInt::from(100))
        );
        assert_eq!(c.value, ratio(1, 101));
        let enumerated =
            ijr_enumerate(&[ints("a", &[1]), fam("b", &[ratio(101, 100)])], &cfg()).unwrap();
        assert_eq!(c.value, enumerated);

        let c = ijr_cross_seed(&int(1), &int(1)).unwrap();
        assert_eq!(
            (c.q, c.r, c.value),
            (BigInt::from(0), BigInt::from(1), int(1))
        );

        let c = ijr_cross_seed(&int(1), &ratio(8, 7)).unwrap();
        assert_eq!((c.q, c.r), (BigInt::from(1), BigInt::from(7)));
        assert_eq!(c.value, ratio(1, 8));
        assert_eq!(
            ijr_enumerate(&[ints("a", &[1]), fam("b", &[ratio(8, 7)])], &cfg()).unwrap(),
            ratio(1, 8)
        );
        assert!(ijr_cross_seed(&int(0), &int(1)).is_err());
        assert!(ijr_cross_seed(&int(2), &int(1)).is_err());
    }

    #[test]
    fn identity_examples() {
        let fs = [ints("a", &[2]), ints("b", &[3]), ints("c", &[5])];
        let r = check_cardinality_identities(&fs, &[Identity::UnionSplit], &cfg()).unwrap();
        assert_eq!(r.checks[0].lhs, ratio(2, 3));
        assert_eq!(r.checks[0].rhs, ratio(2, 3));
        let r =
            check_cardinality_identities(&fs, &[Identity::IntersectionShrinks], &cfg()).unwrap();
        assert_eq!(
            (r.checks[0].lhs.clone(), r.checks[0].rhs.clone()),
            (ratio(1, 30), ratio(1, 6))
        );
        assert!(r.all_hold());
        // F1 ⊆ F3 by adding a series, F2 = F4
        let fs = [
            ints("a", &[4]),
            ints("b", &[6]),
            ints("c", &[4, 5]),
            ints("d", &[6]),
        ];
        let r = check_cardinality_identities(&fs, &Identity::ALL, &cfg()).unwrap();
        let mono = r
            .checks
            .iter()
            .find(|c| c.identity == Identity::Monotone)
            .unwrap();
        assert!(mono.applicable && mono.holds);
        assert!(r.all_hold());
    }

    #[test]
    fn fast_path_agrees() {
        assert_eq!(union_count_u64(&[2, 3]), Some((4, 6)));
        assert_eq!(union_count_u64(&[4, 6, 8]), Some((4, 12)));
        assert_eq!(union_count_u64(&[]), None);
        assert_eq!(union_count_u64(&[0, 3]), None);
    }

    fn seeded_families() -> impl Strategy<Value = Vec<SeriesFamily>> {
        proptest::collection::vec(
            (
                proptest::collection::vec(1u64..=12, 1..3),
                1i64..=6,
                0i64..=6,
            ),
            1..4,
        )
        .prop_map(|fs| {
            fs.into_iter()
                .enumerate()
                .map(|(i, (ks, d, extra))| {
                    SeriesFamily::seeded(format!("f{i}"), &ks, &ratio(d + extra, d)).unwrap()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn inclusion_exclusion_matches_enumeration(fs in seeded_families()) {
            let c = cfg();
            prop_assert_eq!(ujr(&fs, &c).unwrap(), ujr_enumerate(&fs, &c).unwrap());
            prop_assert_eq!(ijr(&fs, &c).unwrap(), ijr_enumerate(&fs, &c).unwrap());
        }

        #[test]
        fn scaling_law(fs in seeded_families(), (n, d) in (1i64..40, 1i64..40)) {
            let a = ratio(n, d);
            let scaled: Vec<SeriesFamily> = fs
                .iter()
                .map(|f| SeriesFamily::from_periods(f.label(), f.periods().map(|t| t * &a)).unwrap())
                .collect();
            let c = cfg();
            prop_assert_eq!(ujr(&scaled, &c).unwrap(), ujr(&fs, &c).unwrap() / &a);
            prop_assert_eq!(ijr(&scaled, &c).unwrap(), ijr(&fs, &c).unwrap() / &a);
        }

        #[test]
        fn fast_path_matches_exact(ps in proptest::collection::vec(1u64..=60, 1..7)) {
            let (count, hyper) = union_count_u64(&ps).unwrap();
            let rats: Vec<Rational> = ps.iter().map(|p| int(*p as i64)).collect();
            prop_assert_eq!(
                union_rate(&rats, &cfg()).unwrap(),
                Rational::new(BigInt::from(count), BigInt::from(hyper))
            );
        }

        #[test]
        fn identities_hold(fs in proptest::collection::vec(
            proptest::collection::vec(1i64..=20, 1..3), 4..=4)
        ) {
            let fams: Vec<SeriesFamily> =
                fs.iter().enumerate().map(|(i, ps)| ints(&format!("f{i}"), ps)).collect();
            let report = check_cardinality_identities(&fams, &Identity::ALL, &cfg()).unwrap();
            prop_assert!(report.all_hold(), "{:?}", report);
        }
    }
}

//! Policy optimizers.
//!
//! Nothing here claims global optimality over all real cycle times. The
//! exhaustive search is exact over its family (integer multipliers in the
//! given bounds times one shared seed); the other methods are heuristics.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::cost::{seed_cost_of, total_cost, CostBreakdown, CostError, SeedCost};
use crate::eoq::{optimal_cycle, standalone_cost};
use crate::model::rational::{self, format_rational, int, Rational, Root};
use crate::model::{scale_multipliers, Instance, Policy};
use crate::sync::{union_count_u64, union_rate, SyncConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("instance has no commodities")]
    EmptyInstance,
    #[error("{profiles} profiles exceed the search cap of {cap}")]
    ProfileCap { profiles: String, cap: u64 },
    #[error("expected {expected} multiplier bounds, got {got}")]
    BoundsArity { expected: usize, got: usize },
    #[error("bad multiplier bounds {lo}..={hi} for `{id}`")]
    BadBounds { id: String, lo: u64, hi: u64 },
    #[error("seed interval [{lo}, {hi}] is empty or non-positive")]
    BadSeedInterval { lo: String, hi: String },
    #[error("base period must be positive, got {0}")]
    BadBase(String),
    #[error("degenerate seed cost: B = 0")]
    DegenerateSeed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveMethod {
    /// Best seed for a fixed integer profile.
    Seed,
    /// Exact minimum over integer profiles in bounds times a shared seed.
    Exhaustive,
    /// Per-commodity best responses plus a global rescale; a local optimum.
    CoordinateDescent,
    /// Every cycle a power of two times a base period.
    PowerOfTwo { base_optimized: bool },
}

impl SolveMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMethod::Seed => "seed",
            SolveMethod::Exhaustive => "exhaustive",
            SolveMethod::CoordinateDescent => "descent",
            SolveMethod::PowerOfTwo { .. } => "pot",
        }
    }

    /// What the returned policy is optimal over.
    pub fn scope(&self) -> &'static str {
        match self {
            SolveMethod::Seed => "optimal seed for the given integer profile",
            SolveMethod::Exhaustive => "optimal over integer profiles in bounds times one seed",
            SolveMethod::CoordinateDescent => "local optimum of single-commodity moves",
            SolveMethod::PowerOfTwo {
                base_optimized: false,
            } => "optimal power-of-two policy for the given base",
            SolveMethod::PowerOfTwo {
                base_optimized: true,
            } => "best power-of-two policy over a grid of bases",
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub policy: Policy,
    pub cost: CostBreakdown,
    pub method: SolveMethod,
    pub nodes_explored: u64,
    pub wall_time: Duration,
    /// Integer profile and seed when the policy has that form.
    pub profile: Option<BTreeMap<String, u64>>,
    pub seed: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveConfig {
    pub sync: SyncConfig,
    /// Largest number of integer profiles the exhaustive search visits.
    pub profile_cap: u64,
    /// Base grid points per octave for the power-of-two base scan.
    pub grid_per_octave: u32,
    /// Sweep limit for coordinate descent.
    pub max_rounds: u32,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            sync: SyncConfig::default(),
            profile_cap: 1_000_000,
            grid_per_octave: 64,
            max_rounds: 1_000,
        }
    }
}

/// Unconstrained and clamped minimizer of `A/β + Bβ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedOptimum {
    /// `sqrt(A/B)`.
    pub unconstrained: Root,
    /// The seed actually used: the exact optimum, its rational refinement,
    /// or the nearer end of the clamp interval.
    pub beta: Rational,
    pub clamped: bool,
    /// `2·sqrt(AB)` when unclamped, `A/β + Bβ` otherwise.
    pub ideal_cost: Root,
}

/// Minimizes `A/β + Bβ`, optionally over `[lo, hi]` (convexity puts the
/// constrained optimum at the nearer end).
pub fn seed_optimum(
    seed_cost: &SeedCost,
    interval: Option<(&Rational, Option<&Rational>)>,
) -> Result<SeedOptimum, SolveError> {
    let SeedCost { a, b } = seed_cost;
    if b.is_zero() {
        return Err(SolveError::DegenerateSeed);
    }
    let square = a / b;
    let unconstrained = rational::sqrt(&square);
    if let Some((lo, hi)) = interval {
        if square < lo * lo {
            return Ok(clamped_at(seed_cost, unconstrained, lo));
        }
        if let Some(hi) = hi {
            if square > hi * hi {
                return Ok(clamped_at(seed_cost, unconstrained, hi));
            }
        }
    }
    let beta = unconstrained.to_rational();
    let ideal_cost = rational::sqrt(&(int(4) * a * b));
    Ok(SeedOptimum {
        unconstrained,
        beta,
        clamped: false,
        ideal_cost,
    })
}

fn clamped_at(seed_cost: &SeedCost, unconstrained: Root, at: &Rational) -> SeedOptimum {
    SeedOptimum {
        unconstrained,
        beta: at.clone(),
        clamped: true,
        ideal_cost: Root::Exact(seed_cost.at(at)),
    }
}

/// Squared optimal cost, for exact comparisons between profiles.
fn squared_cost(seed_cost: &SeedCost, opt: &SeedOptimum) -> Rational {
    if opt.clamped {
        let c = seed_cost.at(&opt.beta);
        &c * &c
    } else {
        int(4) * &seed_cost.a * &seed_cost.b
    }
}

fn check_interval(interval: &(Rational, Option<Rational>)) -> Result<(), SolveError> {
    let (lo, hi) = interval;
    let bad = || SolveError::BadSeedInterval {
        lo: format_rational(lo),
        hi: hi.as_ref().map_or("inf".into(), format_rational),
    };
    if !rational::is_positive(lo) || hi.as_ref().is_some_and(|h| h < lo) {
        return Err(bad());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn result(
    instance: &Instance,
    policy: Policy,
    method: SolveMethod,
    nodes: u64,
    started: Instant,
    profile: Option<BTreeMap<String, u64>>,
    seed: Option<Rational>,
    config: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    let cost = total_cost(instance, &policy, &config.sync)?;
    Ok(SolveResult {
        policy,
        cost,
        method,
        nodes_explored: nodes,
        wall_time: started.elapsed(),
        profile,
        seed,
    })
}

/// Best seed for a fixed integer profile, optionally clamped to
/// `[lo, hi]` (`hi = None` for no upper limit).
pub fn optimize_seed(
    instance: &Instance,
    multipliers: &BTreeMap<String, u64>,
    interval: Option<(Rational, Option<Rational>)>,
    config: &SolveConfig,
) -> Result<(SolveResult, SeedOptimum), SolveError> {
    let started = Instant::now();
    if let Some(iv) = &interval {
        check_interval(iv)?;
    }
    let sc = seed_cost_of(instance, multipliers, &config.sync)?;
    let opt = seed_optimum(&sc, interval.as_ref().map(|(l, h)| (l, h.as_ref())))?;
    let policy = scale_multipliers(multipliers, &opt.beta);
    let res = result(
        instance,
        policy,
        SolveMethod::Seed,
        1,
        started,
        Some(multipliers.clone()),
        Some(opt.beta.clone()),
        config,
    )?;
    Ok((res, opt))
}

/// `A` and `B` of a profile in floating point, for ranking.
struct FastCoefficients {
    setup: Vec<f64>,
    rate: Vec<f64>,
    k0: f64,
}

impl FastCoefficients {
    fn new(instance: &Instance) -> Self {
        FastCoefficients {
            setup: instance
                .commodities
                .iter()
                .map(|c| rational::to_f64(&c.setup))
                .collect(),
            rate: instance
                .commodities
                .iter()
                .map(|c| rational::to_f64(&c.holding_rate()))
                .collect(),
            k0: rational::to_f64(&instance.joint_setup),
        }
    }

    fn cost(&self, ks: &[u64], lo: f64, hi: Option<f64>, sync: &SyncConfig) -> f64 {
        let mut a = 0.0;
        let mut b = 0.0;
        for (i, k) in ks.iter().enumerate() {
            a += self.setup[i] / *k as f64;
            b += self.rate[i] * *k as f64;
        }
        let u = match union_count_u64(ks) {
            Some((count, hyper)) => count as f64 / hyper as f64,
            None => {
                let periods: Vec<Rational> = ks.iter().map(|k| int(*k as i64)).collect();
                union_rate(&periods, sync).map_or(f64::INFINITY, |r| rational::to_f64(&r))
            }
        };
        a += self.k0 * u;
        let beta = (a / b).sqrt().max(lo).min(hi.unwrap_or(f64::INFINITY));
        a / beta + b * beta
    }
}

fn decode(mut index: u64, bounds: &[(u64, u64)], out: &mut [u64]) {
    for i in (0..bounds.len()).rev() {
        let (lo, hi) = bounds[i];
        let width = hi - lo + 1;
        out[i] = lo + index % width;
        index /= width;
    }
}

/// Exact minimum over every integer profile `k_c ∈ bounds[c]` (instance
/// order) with the seed optimized inside `seed_interval`
/// (default `[1, ∞)`). Ties go to the lexicographically smallest profile.
pub fn exhaustive_search(
    instance: &Instance,
    bounds: &[(u64, u64)],
    seed_interval: Option<(Rational, Option<Rational>)>,
    config: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let n = instance.len();
    if n == 0 {
        return Err(SolveError::EmptyInstance);
    }
    if bounds.len() != n {
        return Err(SolveError::BoundsArity {
            expected: n,
            got: bounds.len(),
        });
    }
    for (c, (lo, hi)) in instance.commodities.iter().zip(bounds) {
        if *lo == 0 || lo > hi {
            return Err(SolveError::BadBounds {
                id: c.id.clone(),
                lo: *lo,
                hi: *hi,
            });
        }
    }
    let interval = seed_interval.unwrap_or((Rational::one(), None));
    check_interval(&interval)?;
    let total = bounds.iter().fold(BigInt::one(), |acc, (lo, hi)| {
        acc * BigInt::from(hi - lo + 1)
    });
    if total > BigInt::from(config.profile_cap) {
        return Err(SolveError::ProfileCap {
            profiles: total.to_string(),
            cap: config.profile_cap,
        });
    }
    let total: u64 = total.try_into().expect("below the cap");

    // Rank every profile in floating point, then settle near-ties exactly.
    let fast = FastCoefficients::new(instance);
    let (lo_f, hi_f) = (
        rational::to_f64(&interval.0),
        interval.1.as_ref().map(rational::to_f64),
    );
    let costs: Vec<f64> = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0u64; n],
            |ks, index| {
                decode(index, bounds, ks);
                fast.cost(ks, lo_f, hi_f, &config.sync)
            },
        )
        .collect();
    let best_f = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let near: Vec<u64> = (0..total)
        .filter(|i| costs[*i as usize] <= best_f * (1.0 + 1e-9))
        .collect();

    let ids: Vec<String> = instance.commodities.iter().map(|c| c.id.clone()).collect();
    let to_profile = |index: u64| -> BTreeMap<String, u64> {
        let mut ks = vec![0u64; n];
        decode(index, bounds, &mut ks);
        ids.iter().cloned().zip(ks).collect()
    };
    let interval_ref = (&interval.0, interval.1.as_ref());
    let exact: Vec<(Rational, u64, SeedOptimum)> = near
        .par_iter()
        .map(|index| {
            let sc = seed_cost_of(instance, &to_profile(*index), &config.sync)?;
            let opt = seed_optimum(&sc, Some(interval_ref))?;
            Ok((squared_cost(&sc, &opt), *index, opt))
        })
        .collect::<Result<_, SolveError>>()?;
    let (_, index, opt) = exact
        .into_iter()
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least one profile");
    let profile = to_profile(index);
    let policy = scale_multipliers(&profile, &opt.beta);
    result(
        instance,
        policy,
        SolveMethod::Exhaustive,
        total,
        started,
        Some(profile),
        Some(opt.beta),
        config,
    )
}

/// Candidate cycles for commodity `index` given the current policy.
pub type CandidateFn = dyn Fn(&Instance, &Policy, usize) -> Vec<Rational> + Sync;

/// Integer multiples and divisors (up to 8) of every other cycle, plus
/// integers and halves around the commodity's own EOQ.
pub fn default_candidates(instance: &Instance, policy: &Policy, index: usize) -> Vec<Rational> {
    let me = &instance.commodities[index];
    let mut out = vec![];
    for c in &instance.commodities {
        if c.id == me.id {
            continue;
        }
        let t = &policy.cycles[&c.id];
        for m in 1..=8 {
            out.push(t * int(m));
            out.push(t / int(m));
        }
    }
    let t_star = optimal_cycle(me).optimal_cycle.to_f64();
    let center = t_star.round().max(1.0) as i64;
    for d in -2..=2 {
        if center + d >= 1 {
            out.push(int(center + d));
        }
        out.push(rational::ratio(2 * center + d, 2));
    }
    out.push(optimal_cycle(me).optimal_cycle.to_rational());
    out.retain(rational::is_positive);
    out.sort();
    out.dedup();
    out
}

/// Repeated single-commodity best responses over `candidates`, alternated
/// with rescaling the whole policy by its best common factor. Only strict
/// improvements are taken, so the cost never increases and the loop ends.
pub fn coordinate_descent(
    instance: &Instance,
    start: &Policy,
    candidates: Option<&CandidateFn>,
    config: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let candidates = candidates.unwrap_or(&default_candidates);
    let mut policy = start.clone();
    let mut current = total_cost(instance, &policy, &config.sync)?.total;
    let mut nodes = 1u64;
    for _ in 0..config.max_rounds {
        let mut improved = false;
        for index in 0..instance.len() {
            let id = &instance.commodities[index].id;
            let options = candidates(instance, &policy, index);
            let evaluated: Vec<(Rational, Rational)> = options
                .into_par_iter()
                .map(|t| {
                    let mut trial = policy.clone();
                    trial.set(id.clone(), t.clone());
                    Ok((total_cost(instance, &trial, &config.sync)?.total, t))
                })
                .collect::<Result<_, SolveError>>()?;
            nodes += evaluated.len() as u64;
            if let Some((cost, t)) = evaluated.into_iter().min() {
                if cost < current {
                    policy.set(id.clone(), t);
                    current = cost;
                    improved = true;
                }
            }
        }
        // global rescale: cost(s) = A/s + B·s for the current cycles
        let cost = total_cost(instance, &policy, &config.sync)?;
        let a = &cost.joint_cost
            + instance
                .commodities
                .iter()
                .map(|c| &c.setup / &policy.cycles[&c.id])
                .fold(Rational::zero(), |x, y| x + y);
        let b = &cost.standalone_total + &cost.joint_cost - &a;
        if !b.is_zero() {
            let s = rational::sqrt(&(&a / &b)).to_rational();
            let scaled = policy.scaled(&s);
            let c = total_cost(instance, &scaled, &config.sync)?.total;
            nodes += 1;
            if c < current {
                policy = scaled;
                current = c;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    result(
        instance,
        policy,
        SolveMethod::CoordinateDescent,
        nodes,
        started,
        None,
        None,
        config,
    )
}

/// Standalone-optimal exponent: `argmin_m g(2^m·base)`, ties to the smaller `m`.
fn standalone_exponent(instance: &Instance, index: usize, base: &Rational) -> i64 {
    let c = &instance.commodities[index];
    let t_star = optimal_cycle(c).optimal_cycle.to_f64();
    let guess = (t_star / rational::to_f64(base)).log2().floor() as i64;
    let g = |m: i64| standalone_cost(c, &(base * rational::pow2(m))).expect("positive");
    // g(2^m) is convex in m; settle the float guess exactly
    let mut m = guess;
    while g(m - 1) <= g(m) {
        m -= 1;
    }
    while g(m + 1) < g(m) {
        m += 1;
    }
    m
}

/// Optimal power-of-two policy for one base: with `L` the smallest exponent,
/// `UJR = 1/(2^L·base)`, each commodity takes `max(L, m_c*)`, and `L` is
/// scanned upward from `min m_c*` while the exact cost drops.
fn pot_for_base(instance: &Instance, base: &Rational) -> (Vec<i64>, Rational) {
    let stars: Vec<i64> = (0..instance.len())
        .map(|i| standalone_exponent(instance, i, base))
        .collect();
    let cost_at = |level: i64| -> (Vec<i64>, Rational) {
        let ms: Vec<i64> = stars.iter().map(|m| (*m).max(level)).collect();
        let mut total = &instance.joint_setup / (base * rational::pow2(level));
        for (c, m) in instance.commodities.iter().zip(&ms) {
            total += standalone_cost(c, &(base * rational::pow2(*m))).expect("positive");
        }
        (ms, total)
    };
    let mut level = *stars.iter().min().expect("non-empty");
    let mut best = cost_at(level);
    loop {
        let next = cost_at(level + 1);
        if next.1 >= best.1 {
            break;
        }
        best = next;
        level += 1;
    }
    best
}

fn pot_policy(instance: &Instance, base: &Rational, ms: &[i64]) -> Policy {
    Policy::from_pairs(
        instance
            .commodities
            .iter()
            .zip(ms)
            .map(|(c, m)| (c.id.clone(), base * rational::pow2(*m))),
    )
}

/// Power-of-two policy `t_c = 2^{m_c}·base`. With `optimize_base` the base is
/// scanned over one octave above `base` (`grid_per_octave` points) and the
/// winner's exponents get a closed-form common rescale.
pub fn power_of_two(
    instance: &Instance,
    base: &Rational,
    optimize_base: bool,
    config: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    if instance.is_empty() {
        return Err(SolveError::EmptyInstance);
    }
    if !rational::is_positive(base) {
        return Err(SolveError::BadBase(format_rational(base)));
    }
    let method = SolveMethod::PowerOfTwo {
        base_optimized: optimize_base,
    };
    if !optimize_base {
        let (ms, _) = pot_for_base(instance, base);
        let policy = pot_policy(instance, base, &ms);
        return result(instance, policy, method, 1, started, None, None, config);
    }
    let grid = config.grid_per_octave.max(1);
    let bases: Vec<Rational> = (0..grid)
        .map(|j| base * rational::approximate(2f64.powf(j as f64 / grid as f64), 1e-12))
        .collect();
    let scored: Vec<(Rational, usize, Vec<i64>)> = bases
        .par_iter()
        .enumerate()
        .map(|(j, b)| {
            let (ms, cost) = pot_for_base(instance, b);
            (cost, j, ms)
        })
        .collect();
    let (best_cost, j, ms) = scored
        .into_iter()
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("non-empty grid");
    let mut policy = pot_policy(instance, &bases[j], &ms);
    let mut best = best_cost;
    // Rescaling keeps the power-of-two structure; its optimum is closed form.
    let level = *ms.iter().min().expect("non-empty");
    let profile: BTreeMap<String, u64> = instance
        .commodities
        .iter()
        .zip(&ms)
        .map(|(c, m)| (c.id.clone(), 1u64 << (m - level)))
        .collect();
    let sc = seed_cost_of(instance, &profile, &config.sync)?;
    let opt = seed_optimum(&sc, None)?;
    let refined = scale_multipliers(&profile, &opt.beta);
    let refined_cost = total_cost(instance, &refined, &config.sync)?.total;
    if refined_cost < best {
        best = refined_cost;
        policy = refined;
    }
    let _ = best;
    result(
        instance,
        policy,
        method,
        grid as u64 + 1,
        started,
        None,
        None,
        config,
    )
}

/// Multiplier bounds around each commodity's EOQ: `[1, ceil(span·t*/t*_min)]`,
/// capped so the product stays within `cap`.
pub fn default_bounds(instance: &Instance, span: f64, cap: u64) -> Vec<(u64, u64)> {
    let stars: Vec<f64> = instance
        .commodities
        .iter()
        .map(|c| optimal_cycle(c).optimal_cycle.to_f64())
        .collect();
    let min = stars.iter().copied().fold(f64::INFINITY, f64::min);
    let mut his: Vec<u64> = stars
        .iter()
        .map(|t| ((span * t / min).ceil() as u64).max(1))
        .collect();
    let product = |hs: &[u64]| hs.iter().fold(1u128, |a, h| a.saturating_mul(*h as u128));
    while product(&his) > cap as u128 {
        let i = (0..his.len()).max_by_key(|i| his[*i]).expect("non-empty");
        if his[i] == 1 {
            break;
        }
        his[i] -= 1;
    }
    his.into_iter().map(|h| (1, h)).collect()
}

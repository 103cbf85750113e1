//! Total average periodic cost `Σ g_c(t_c) + K₀·UJR`, its split by commodity
//! class, marginal joint-order frequencies, and the seed-scaled closed form.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::eoq::{standalone_cost, EoqError};
use crate::model::rational::{self, format_rational, to_decimal, Rational};
use crate::model::{expand_profile, CommodityClass, Instance, Policy, PolicyError, SeedProfile};
use crate::reduce::ReductionConstants;
use crate::sync::{ijr, union_rate, SeriesFamily, SyncConfig, SyncError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Sync(#[from] SyncError),
    #[error(transparent)]
    Eoq(#[from] EoqError),
    #[error(
        "commodity `{0}` has no class; the per-class split needs constant/variable/clause tags"
    )]
    Unclassed(String),
    #[error("unknown commodity `{0}`")]
    UnknownCommodity(String),
    #[error("commodity `{0}` is not a variable commodity")]
    NotVariable(String),
    #[error("seed grid search needs at least one commodity and one grid point")]
    EmptySearch,
    #[error("marginal frequency of `{id}` disagrees between formulas: {via_union} vs {via_intersection}")]
    FormulaMismatch {
        id: String,
        via_union: String,
        via_intersection: String,
    },
}

/// Cost shares of the three reduction classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCosts {
    pub constants: Rational,
    pub variables: Rational,
    pub clauses: Rational,
}

impl ClassCosts {
    pub fn sum(&self) -> Rational {
        &self.constants + &self.variables + &self.clauses
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostBreakdown {
    pub standalone_total: Rational,
    /// Joint orders per period (`UJR` of every commodity's series).
    pub joint_frequency: Rational,
    pub joint_cost: Rational,
    pub total: Rational,
    /// Filled by [`decompose`] only.
    pub per_class: Option<ClassCosts>,
}

pub const CSV_HEADER: [&str; 9] = [
    "instance_id",
    "policy_id",
    "standalone",
    "joint_freq",
    "joint_cost",
    "total",
    "tc_const",
    "tc_var",
    "tc_clause",
];

impl CostBreakdown {
    /// One CSV record matching [`CSV_HEADER`] followed by a `_dec` column per
    /// numeric field (see [`csv_header_with_decimals`]).
    pub fn csv_record(&self, instance_id: &str, policy_id: &str, digits: usize) -> Vec<String> {
        let classes = self.per_class.as_ref();
        let values: Vec<Option<&Rational>> = vec![
            Some(&self.standalone_total),
            Some(&self.joint_frequency),
            Some(&self.joint_cost),
            Some(&self.total),
            classes.map(|c| &c.constants),
            classes.map(|c| &c.variables),
            classes.map(|c| &c.clauses),
        ];
        let mut row = vec![instance_id.to_string(), policy_id.to_string()];
        row.extend(
            values
                .iter()
                .map(|v| v.map(format_rational).unwrap_or_default()),
        );
        row.extend(
            values
                .iter()
                .map(|v| v.map(|x| to_decimal(x, digits)).unwrap_or_default()),
        );
        row
    }
}

pub fn csv_header_with_decimals() -> Vec<String> {
    let mut header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(CSV_HEADER[2..].iter().map(|s| format!("{s}_dec")));
    header
}

fn standalone_sum(
    instance: &Instance,
    policy: &Policy,
    keep: impl Fn(CommodityClass) -> bool,
) -> Result<Rational, CostError> {
    let mut sum = Rational::zero();
    for c in instance.commodities.iter().filter(|c| keep(c.class)) {
        let t = policy
            .cycle(&c.id)
            .ok_or_else(|| PolicyError::Missing(c.id.clone()))?;
        sum += standalone_cost(c, t)?;
    }
    Ok(sum)
}

fn cycles_of(
    instance: &Instance,
    policy: &Policy,
    keep: impl Fn(CommodityClass) -> bool,
) -> Vec<Rational> {
    instance
        .commodities
        .iter()
        .filter(|c| keep(c.class))
        .map(|c| policy.cycles[&c.id].clone())
        .collect()
}

/// `UJR` that treats an empty set of series as zero frequency.
fn union_or_zero(periods: &[Rational], config: &SyncConfig) -> Result<Rational, CostError> {
    if periods.is_empty() {
        Ok(Rational::zero())
    } else {
        Ok(union_rate(periods, config)?)
    }
}

pub fn total_cost(
    instance: &Instance,
    policy: &Policy,
    config: &SyncConfig,
) -> Result<CostBreakdown, CostError> {
    policy.check_covers(instance)?;
    let standalone_total = standalone_sum(instance, policy, |_| true)?;
    let joint_frequency = union_or_zero(&cycles_of(instance, policy, |_| true), config)?;
    let joint_cost = &instance.joint_setup * &joint_frequency;
    Ok(CostBreakdown {
        total: &standalone_total + &joint_cost,
        standalone_total,
        joint_frequency,
        joint_cost,
        per_class: None,
    })
}

/// Splits the total into Constants (all their joint cost), Variables
/// (joint cost on top of Constants) and Clauses (on top of both).
pub fn decompose(
    instance: &Instance,
    policy: &Policy,
    config: &SyncConfig,
) -> Result<CostBreakdown, CostError> {
    if let Some(c) = instance
        .commodities
        .iter()
        .find(|c| c.class == CommodityClass::Generic)
    {
        return Err(CostError::Unclassed(c.id.clone()));
    }
    let mut breakdown = total_cost(instance, policy, config)?;
    use CommodityClass::*;
    let k0 = &instance.joint_setup;
    let u_const = union_or_zero(&cycles_of(instance, policy, |c| c == Constant), config)?;
    let u_const_var = union_or_zero(
        &cycles_of(instance, policy, |c| c == Constant || c == Variable),
        config,
    )?;
    let u_all = &breakdown.joint_frequency;
    let constants = standalone_sum(instance, policy, |c| c == Constant)? + k0 * &u_const;
    let variables =
        standalone_sum(instance, policy, |c| c == Variable)? + k0 * (&u_const_var - &u_const);
    let clauses = standalone_sum(instance, policy, |c| c == Clause)? + k0 * (u_all - &u_const_var);
    breakdown.per_class = Some(ClassCosts {
        constants,
        variables,
        clauses,
    });
    Ok(breakdown)
}

/// Marginal joint frequency of a series `F_t` over the series `others`,
/// computed as `UJR(F_t ∪ O) − UJR(O)` and as `UJR(F_t) − IJR(F_t, O)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalJr {
    pub via_union: Rational,
    pub via_intersection: Rational,
}

impl MarginalJr {
    pub fn agree(&self) -> bool {
        self.via_union == self.via_intersection
    }
}

pub fn marginal_jr_of_series(
    t: &Rational,
    others: &[Rational],
    config: &SyncConfig,
) -> Result<MarginalJr, CostError> {
    let own = t.recip();
    if others.is_empty() {
        return Ok(MarginalJr {
            via_union: own.clone(),
            via_intersection: own,
        });
    }
    let mut with = others.to_vec();
    with.push(t.clone());
    let via_union = union_rate(&with, config)? - union_rate(others, config)?;
    let f_t = SeriesFamily::from_periods("t", [t.clone()])?;
    let f_o = SeriesFamily::from_periods("others", others.iter().cloned())?;
    let via_intersection = own - ijr(&[f_t, f_o], config)?;
    Ok(MarginalJr {
        via_union,
        via_intersection,
    })
}

fn checked_marginal(
    id: &str,
    t: &Rational,
    others: &[Rational],
    config: &SyncConfig,
) -> Result<Rational, CostError> {
    let m = marginal_jr_of_series(t, others, config)?;
    if !m.agree() {
        return Err(CostError::FormulaMismatch {
            id: id.to_string(),
            via_union: format_rational(&m.via_union),
            via_intersection: format_rational(&m.via_intersection),
        });
    }
    Ok(m.via_union)
}

/// Marginal joint frequency of one commodity over every other commodity.
pub fn marginal_jr(
    instance: &Instance,
    policy: &Policy,
    id: &str,
    config: &SyncConfig,
) -> Result<Rational, CostError> {
    marginal_jr_over(instance, policy, id, |_| true, config)
}

/// Marginal joint frequency of one commodity over the other commodities
/// whose class passes `over`.
pub fn marginal_jr_over(
    instance: &Instance,
    policy: &Policy,
    id: &str,
    over: impl Fn(CommodityClass) -> bool,
    config: &SyncConfig,
) -> Result<Rational, CostError> {
    policy.check_covers(instance)?;
    let me = instance
        .commodity(id)
        .ok_or_else(|| CostError::UnknownCommodity(id.to_string()))?;
    let others: Vec<Rational> = instance
        .commodities
        .iter()
        .filter(|c| c.id != id && over(c.class))
        .map(|c| policy.cycles[&c.id].clone())
        .collect();
    checked_marginal(&me.id, &policy.cycles[id], &others, config)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JrBounds {
    pub lower: Rational,
    pub upper: Rational,
}

/// `K₀·α_v·α_n / t` and `K₀·α_c / t` for a Variable ordering every `t`.
pub fn jr_bounds(
    instance: &Instance,
    policy: &Policy,
    id: &str,
    constants: &ReductionConstants,
) -> Result<JrBounds, CostError> {
    let c = instance
        .commodity(id)
        .ok_or_else(|| CostError::UnknownCommodity(id.to_string()))?;
    if c.class != CommodityClass::Variable {
        return Err(CostError::NotVariable(id.to_string()));
    }
    let t = policy
        .cycle(id)
        .ok_or_else(|| PolicyError::Missing(id.to_string()))?;
    let k0 = &instance.joint_setup;
    Ok(JrBounds {
        lower: k0 * &constants.alpha_v * &constants.alpha_n / t,
        upper: k0 * &constants.alpha_c / t,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub id: String,
    /// `K₀ · jr` over the Constants.
    pub value: Rational,
    pub bounds: JrBounds,
    /// `None` where the bound's premise does not apply to this cycle.
    pub lower_holds: Option<bool>,
    pub upper_holds: Option<bool>,
}

impl BoundCheck {
    /// Every applicable bound holds.
    pub fn holds(&self) -> bool {
        self.lower_holds != Some(false) && self.upper_holds != Some(false)
    }
}

/// Compares a Variable's joint-cost contribution over the Constants with its
/// bounds. The lower bound is checked off the low prime, the upper bound on
/// either prime; `low` and `high` are the Variable's two admissible cycles.
pub fn check_jr_bounds(
    instance: &Instance,
    policy: &Policy,
    id: &str,
    constants: &ReductionConstants,
    low: &Rational,
    high: &Rational,
    config: &SyncConfig,
) -> Result<BoundCheck, CostError> {
    let bounds = jr_bounds(instance, policy, id, constants)?;
    let jr = marginal_jr_over(
        instance,
        policy,
        id,
        |c| c == CommodityClass::Constant,
        config,
    )?;
    let value = &instance.joint_setup * jr;
    let t = &policy.cycles[id];
    let lower_holds = (t != low).then(|| bounds.lower <= value);
    let upper_holds = (t == low || t == high).then(|| value <= bounds.upper);
    Ok(BoundCheck {
        id: id.to_string(),
        value,
        bounds,
        lower_holds,
        upper_holds,
    })
}

/// Coefficients of `cost(β) = A/β + B·β` for an integer profile scaled by β.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedCost {
    pub a: Rational,
    pub b: Rational,
}

impl SeedCost {
    pub fn at(&self, beta: &Rational) -> Rational {
        &self.a / beta + &self.b * beta
    }
}

/// Seed-cost coefficients from integer multipliers alone.
pub fn seed_cost_of(
    instance: &Instance,
    multipliers: &BTreeMap<String, u64>,
    config: &SyncConfig,
) -> Result<SeedCost, CostError> {
    let unit = crate::model::scale_multipliers(multipliers, &rational::int(1));
    unit.check_covers(instance)?;
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for c in &instance.commodities {
        let k = &unit.cycles[&c.id];
        a += &c.setup / k;
        b += c.holding_rate() * k;
    }
    let u = union_or_zero(&cycles_of(instance, &unit, |_| true), config)?;
    a += &instance.joint_setup * u;
    Ok(SeedCost { a, b })
}

pub fn seed_cost(
    instance: &Instance,
    profile: &SeedProfile,
    config: &SyncConfig,
) -> Result<SeedCost, CostError> {
    seed_cost_of(instance, profile.multipliers(), config)
}

/// `total_cost(expand_profile(profile))`, for cross-checking [`seed_cost`].
pub fn profile_total(
    instance: &Instance,
    profile: &SeedProfile,
    config: &SyncConfig,
) -> Result<Rational, CostError> {
    Ok(total_cost(instance, &expand_profile(profile), config)?.total)
}

/// Cheapest way to give each commodity its own seed from `grid`, with
/// `t_c = β_c·anchor_c`. Ties go to the lexicographically first choice
/// (grid order, instance order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedGridMinimum {
    pub seeds: Vec<Rational>,
    pub cost: Rational,
    pub evaluated: usize,
}

impl SeedGridMinimum {
    pub fn common_seed(&self) -> bool {
        self.seeds.windows(2).all(|w| w[0] == w[1])
    }
}

pub fn seed_grid_minimum(
    instance: &Instance,
    anchors: &BTreeMap<String, Rational>,
    grid: &[Rational],
    config: &SyncConfig,
) -> Result<SeedGridMinimum, CostError> {
    let n = instance.len();
    if n == 0 || grid.is_empty() {
        return Err(CostError::EmptySearch);
    }
    let choices = grid.len().pow(n as u32);
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut pick = vec![0usize; n];
    for index in 0..choices {
        let mut rest = index;
        for slot in pick.iter_mut().rev() {
            *slot = rest % grid.len();
            rest /= grid.len();
        }
        let mut policy = Policy::default();
        for (c, j) in instance.commodities.iter().zip(&pick) {
            let anchor = anchors
                .get(&c.id)
                .ok_or_else(|| CostError::UnknownCommodity(c.id.clone()))?;
            policy.set(c.id.clone(), anchor * &grid[*j]);
        }
        let cost = total_cost(instance, &policy, config)?.total;
        if best.as_ref().is_none_or(|(b, _)| &cost < b) {
            best = Some((cost, pick.clone()));
        }
    }
    let (cost, pick) = best.expect("grid and instance are non-empty");
    Ok(SeedGridMinimum {
        seeds: pick.into_iter().map(|j| grid[j].clone()).collect(),
        cost,
        evaluated: choices,
    })
}

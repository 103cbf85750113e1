//! 3SAT → continuous periodic JRP.
//!
//! Variable `x_i` becomes a commodity whose cheap cycle times are the primes
//! `low_i` (false) and `high_i` (true). Clause `j` becomes a commodity whose
//! ideal cycle is the product of its three literal primes, so it shares
//! orders with a Variable exactly when that literal is true. Constants anchor
//! the common seed and even out the Variables' joint-order contributions.

mod primes;
mod scheme;
mod verify;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::model::rational::{self, format_rational, int, parse_rational, Rational};
use crate::model::{validate_instance, Commodity, CommodityClass, Instance, Policy};
use crate::sat::{validate_3sat, Assignment, Clause, CnfFormula, Literal, Sat3Error};

pub use primes::{is_prime, prime_factors, select_prime_pairs, PrimePair};
pub use scheme::{ConstantsPlan, ConstantsScheme};
pub use verify::{
    check_gap_inequality, lemma_delta, verify_roundtrip, GapReport, LemmaDelta, RoundtripReport,
    ROUNDTRIP_CLAUSE_CAP, ROUNDTRIP_VAR_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    NotThreeSat(#[from] Sat3Error),
    #[error("formula has no variables")]
    NoVariables,
    #[error("constants rejected for pair ({low}, {high}): {reason}")]
    Configuration { low: u64, high: u64, reason: String },
    #[error("clause target overflows 64 bits")]
    Overflow,
    #[error("seed {beta} outside [1, 1 + delta] = [1, {upper}]")]
    SeedOutOfRange { beta: String, upper: String },
    #[error("policy does not come from an assignment: {0}")]
    NotAnAssignmentPolicy(String),
    #[error("bad reduction metadata: {0}")]
    Meta(String),
    #[error("{what} = {value} exceeds the cap of {cap}")]
    Cap {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error(transparent)]
    Cost(#[from] crate::cost::CostError),
    #[error(transparent)]
    Sat(#[from] crate::sat::SatError),
}

/// The `α` constants of the Variable parameters and of the joint-frequency
/// bounds. Their values are configuration; see the README.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionConstants {
    pub alpha_c: Rational,
    pub alpha_v_bar: Rational,
    pub alpha_v: Rational,
    pub alpha_n: Rational,
}

impl Default for ReductionConstants {
    fn default() -> Self {
        ReductionConstants {
            alpha_c: int(1),
            alpha_v_bar: rational::ratio(1, 1000),
            alpha_v: rational::ratio(1, 10),
            alpha_n: rational::ratio(1, 10),
        }
    }
}

impl ReductionConstants {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "alpha_c": format_rational(&self.alpha_c),
            "alpha_v_bar": format_rational(&self.alpha_v_bar),
            "alpha_v": format_rational(&self.alpha_v),
            "alpha_n": format_rational(&self.alpha_n),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ReduceError> {
        let get = |k: &str| -> Result<Rational, ReduceError> {
            let text = v
                .get(k)
                .and_then(|x| x.as_str())
                .ok_or_else(|| ReduceError::Meta(format!("alpha.{k} missing")))?;
            parse_rational(text).map_err(|e| ReduceError::Meta(format!("alpha.{k}: {e}")))
        };
        Ok(ReductionConstants {
            alpha_c: get("alpha_c")?,
            alpha_v_bar: get("alpha_v_bar")?,
            alpha_v: get("alpha_v")?,
            alpha_n: get("alpha_n")?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionConfig {
    pub constants: ReductionConstants,
    pub scheme: ConstantsScheme,
}

/// `δ = 1 / (6·n·high_n⁶)`.
pub fn compute_delta(pairs: &[PrimePair]) -> Rational {
    let n = pairs.len() as u64;
    let top = pairs
        .iter()
        .map(|p| p.high())
        .max()
        .expect("pairs non-empty");
    Rational::new(
        BigInt::one(),
        BigInt::from(6 * n) * num_traits::pow(BigInt::from(top), 6),
    )
}

/// `(h, K)` with `sqrt(2K/(hλ)) = t*` and `sqrt(2(K+1)/(hλ)) = (1+δ)t*` at `λ = 2`.
fn anchored_parameters(t_star: u64, delta: &Rational) -> (Rational, Rational) {
    let s = delta * delta + delta * int(2);
    let t = Rational::from_integer(BigInt::from(t_star));
    let k = s.recip();
    let h = (&s * &t * &t).recip();
    (h, k)
}

pub fn build_constant_commodity(id: impl Into<String>, t_star: u64, delta: &Rational) -> Commodity {
    assert!(t_star >= 1 && delta.is_positive());
    let (h, k) = anchored_parameters(t_star, delta);
    Commodity::new(id, CommodityClass::Constant, int(2), h, k)
}

/// Literal prime: `high` for a positive literal, `low` for a negated one.
fn literal_prime(lit: Literal, pairs: &[PrimePair]) -> Option<u64> {
    pairs
        .get(lit.var().checked_sub(1)?)
        .map(|p| p.prime_for(lit.is_positive()))
}

pub fn clause_target(clause: &Clause, pairs: &[PrimePair]) -> Result<u64, ReduceError> {
    let mut t: u64 = 1;
    for lit in &clause.literals {
        let p = literal_prime(*lit, pairs).ok_or(Sat3Error::OutOfRange {
            index: 0,
            var: lit.var(),
            num_vars: pairs.len(),
        })?;
        t = t.checked_mul(p).ok_or(ReduceError::Overflow)?;
    }
    Ok(t)
}

pub fn build_clause_commodity(
    id: impl Into<String>,
    clause: &Clause,
    pairs: &[PrimePair],
    delta: &Rational,
) -> Result<Commodity, ReduceError> {
    let t = clause_target(clause, pairs)?;
    let (h, k) = anchored_parameters(t, delta);
    Ok(Commodity::new(id, CommodityClass::Clause, int(2), h, k))
}

pub fn build_variable_commodity(
    id: impl Into<String>,
    pair: &PrimePair,
    constants: &ReductionConstants,
) -> Result<Commodity, ReduceError> {
    let (low, gap) = (int(pair.low as i64), int(pair.gap as i64));
    let high = &low + &gap;
    let half = &gap / int(2);
    let h = &constants.alpha_c * (&low * &low - &gap * &gap) / (&low * (&low + &half) * &half);
    let k =
        &h * &low * &high - &high / (&high - int(1)) * &constants.alpha_c * &constants.alpha_v_bar;
    let reject = |reason: String| ReduceError::Configuration {
        low: pair.low,
        high: pair.high(),
        reason,
    };
    if !h.is_positive() {
        return Err(reject(format!("holding cost {} <= 0", format_rational(&h))));
    }
    if !k.is_positive() {
        return Err(reject(format!("setup cost {} <= 0", format_rational(&k))));
    }
    // t*² = 2K/(hλ) = K/h must lie strictly between low² and high²
    let t2 = &k / &h;
    if !(t2 > &low * &low && t2 < &high * &high) {
        return Err(reject(format!(
            "standalone optimum sqrt({}) outside ({}, {})",
            format_rational(&t2),
            pair.low,
            pair.high()
        )));
    }
    Ok(Commodity::new(id, CommodityClass::Variable, int(2), h, k))
}

/// Generated instance plus everything needed to map between truth
/// assignments and policies.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutput {
    pub instance: Instance,
    pub formula: CnfFormula,
    pub pairs: Vec<PrimePair>,
    pub delta: Rational,
    pub constant_targets: Vec<u64>,
    pub clause_targets: Vec<u64>,
    pub scheme: ConstantsScheme,
    pub constants: ReductionConstants,
}

pub fn constant_id(j: usize) -> String {
    format!("y{}", j + 1)
}

pub fn variable_id(i: usize) -> String {
    format!("x{}", i + 1)
}

pub fn clause_id(j: usize) -> String {
    format!("z{}", j + 1)
}

pub fn reduce(
    formula: &CnfFormula,
    config: &ReductionConfig,
) -> Result<ReductionOutput, ReduceError> {
    validate_3sat(formula)?;
    if formula.num_vars == 0 {
        return Err(ReduceError::NoVariables);
    }
    let plan = config.scheme.plan(formula.num_vars);
    let delta = compute_delta(&plan.pairs);
    let mut commodities = vec![];
    for (j, t) in plan.targets.iter().enumerate() {
        commodities.push(build_constant_commodity(constant_id(j), *t, &delta));
    }
    for (i, pair) in plan.pairs.iter().enumerate() {
        commodities.push(build_variable_commodity(
            variable_id(i),
            pair,
            &config.constants,
        )?);
    }
    let mut clause_targets = vec![];
    for (j, clause) in formula.clauses.iter().enumerate() {
        clause_targets.push(clause_target(clause, &plan.pairs)?);
        commodities.push(build_clause_commodity(
            clause_id(j),
            clause,
            &plan.pairs,
            &delta,
        )?);
    }
    let mut output = ReductionOutput {
        instance: Instance::new(commodities, int(1)),
        formula: formula.clone(),
        pairs: plan.pairs,
        delta,
        constant_targets: plan.targets,
        clause_targets,
        scheme: config.scheme,
        constants: config.constants.clone(),
    };
    output.instance.meta = Some(output.meta_json());
    debug_assert!(validate_instance(&output.instance).is_valid());
    Ok(output)
}

#[derive(Serialize, Deserialize)]
struct LiteralPrimes {
    #[serde(rename = "false")]
    when_false: u64,
    #[serde(rename = "true")]
    when_true: u64,
}

impl ReductionOutput {
    /// Largest high prime.
    pub fn top_prime(&self) -> u64 {
        self.pairs.iter().map(|p| p.high()).max().unwrap_or(1)
    }

    pub fn beta_upper(&self) -> Rational {
        Rational::one() + &self.delta
    }

    fn check_beta(&self, beta: &Rational) -> Result<(), ReduceError> {
        if beta < &Rational::one() || beta > &self.beta_upper() {
            return Err(ReduceError::SeedOutOfRange {
                beta: format_rational(beta),
                upper: format_rational(&self.beta_upper()),
            });
        }
        Ok(())
    }

    fn meta_json(&self) -> serde_json::Value {
        let literal_map: BTreeMap<String, LiteralPrimes> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                (
                    variable_id(i),
                    LiteralPrimes {
                        when_false: p.low,
                        when_true: p.high(),
                    },
                )
            })
            .collect();
        let targets = |ids: fn(usize) -> String, ts: &[u64]| -> BTreeMap<String, u64> {
            ts.iter().enumerate().map(|(j, t)| (ids(j), *t)).collect()
        };
        json!({
            "delta": format_rational(&self.delta),
            "pairs": self.pairs.iter().map(|p| [p.low, p.gap, p.high()]).collect::<Vec<_>>(),
            "literal_map": literal_map,
            "clause_targets": targets(clause_id, &self.clause_targets),
            "constant_targets": targets(constant_id, &self.constant_targets),
            "clauses": self.formula.clauses.iter()
                .map(|c| c.literals.iter().map(|l| l.value()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "constants_scheme": self.scheme.name(),
            "alpha": self.constants.to_json(),
        })
    }

    /// Rebuilds the output from an instance carrying reduction metadata.
    pub fn from_instance(instance: Instance) -> Result<Self, ReduceError> {
        let meta = instance
            .meta
            .clone()
            .ok_or_else(|| ReduceError::Meta("instance has no meta object".into()))?;
        let field = |k: &str| {
            meta.get(k)
                .ok_or_else(|| ReduceError::Meta(format!("`{k}` missing")))
        };
        let bad = |k: &str, e: &dyn std::fmt::Display| ReduceError::Meta(format!("`{k}`: {e}"));
        let delta_text = field("delta")?
            .as_str()
            .ok_or_else(|| ReduceError::Meta("`delta` is not a string".into()))?;
        let delta = parse_rational(delta_text).map_err(|e| bad("delta", &e))?;
        let raw_pairs: Vec<[u64; 3]> =
            serde_json::from_value(field("pairs")?.clone()).map_err(|e| bad("pairs", &e))?;
        let pairs: Vec<PrimePair> = raw_pairs
            .iter()
            .enumerate()
            .map(|(i, [low, gap, _])| PrimePair {
                index: i + 1,
                low: *low,
                gap: *gap,
            })
            .collect();
        let ordered = |k: &str, id: fn(usize) -> String| -> Result<Vec<u64>, ReduceError> {
            let map: BTreeMap<String, u64> =
                serde_json::from_value(field(k)?.clone()).map_err(|e| bad(k, &e))?;
            (0..map.len())
                .map(|j| {
                    map.get(&id(j))
                        .copied()
                        .ok_or_else(|| ReduceError::Meta(format!("`{k}` lacks {}", id(j))))
                })
                .collect()
        };
        let clause_targets = ordered("clause_targets", clause_id)?;
        let constant_targets = ordered("constant_targets", constant_id)?;
        let raw_clauses: Vec<Vec<i64>> =
            serde_json::from_value(field("clauses")?.clone()).map_err(|e| bad("clauses", &e))?;
        let mut clauses = vec![];
        for c in raw_clauses {
            let lits = c
                .iter()
                .map(|v| Literal::new(*v))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| ReduceError::Meta("zero literal in `clauses`".into()))?;
            clauses.push(Clause::new(lits));
        }
        let scheme: ConstantsScheme = field("constants_scheme")?
            .as_str()
            .unwrap_or_default()
            .parse()
            .map_err(|e: String| bad("constants_scheme", &e))?;
        let constants = ReductionConstants::from_json(field("alpha")?)?;
        Ok(ReductionOutput {
            formula: CnfFormula::new(pairs.len(), clauses),
            instance,
            pairs,
            delta,
            constant_targets,
            clause_targets,
            scheme,
            constants,
        })
    }

    /// Variables at `β·low` / `β·high` per truth value; Constants and Clauses
    /// at `β·t*`.
    pub fn assignment_to_policy(
        &self,
        a: &Assignment,
        beta: &Rational,
    ) -> Result<Policy, ReduceError> {
        self.check_beta(beta)?;
        if a.len() != self.pairs.len() {
            return Err(ReduceError::NotAnAssignmentPolicy(format!(
                "assignment has {} values for {} variables",
                a.len(),
                self.pairs.len()
            )));
        }
        let scaled = |t: u64| Rational::from_integer(BigInt::from(t)) * beta;
        let mut policy = Policy::new();
        for (j, t) in self.constant_targets.iter().enumerate() {
            policy.set(constant_id(j), scaled(*t));
        }
        for (i, pair) in self.pairs.iter().enumerate() {
            policy.set(variable_id(i), scaled(pair.prime_for(a.0[i])));
        }
        for (j, t) in self.clause_targets.iter().enumerate() {
            policy.set(clause_id(j), scaled(*t));
        }
        Ok(policy)
    }

    /// Seed of an assignment policy, read off the first Constant or Clause.
    pub fn policy_seed(&self, policy: &Policy) -> Result<Rational, ReduceError> {
        let (id, t) = if let Some(t) = self.constant_targets.first() {
            (constant_id(0), *t)
        } else if let Some(t) = self.clause_targets.first() {
            (clause_id(0), *t)
        } else {
            return Ok(Rational::one());
        };
        let cycle = policy
            .cycle(&id)
            .ok_or_else(|| ReduceError::NotAnAssignmentPolicy(format!("no cycle for {id}")))?;
        Ok(cycle / int(t as i64))
    }

    pub fn policy_to_assignment(&self, policy: &Policy) -> Result<Assignment, ReduceError> {
        let beta = self.policy_seed(policy)?;
        let mut values = vec![];
        for (i, pair) in self.pairs.iter().enumerate() {
            let id = variable_id(i);
            let t = policy
                .cycle(&id)
                .ok_or_else(|| ReduceError::NotAnAssignmentPolicy(format!("no cycle for {id}")))?
                / &beta;
            let is = |p: u64| t == int(p as i64);
            values.push(if is(pair.low) {
                false
            } else if is(pair.high()) {
                true
            } else {
                return Err(ReduceError::NotAnAssignmentPolicy(format!(
                    "{id} cycles at {} seeds, neither {} nor {}",
                    format_rational(&t),
                    pair.low,
                    pair.high()
                )));
            });
        }
        Ok(Assignment(values))
    }

    /// True iff some Variable of clause `j` orders at every epoch at which
    /// the Clause orders.
    pub fn clause_synchronized(&self, policy: &Policy, j: usize) -> Result<bool, ReduceError> {
        let clause_cycle = policy.cycle(&clause_id(j)).ok_or_else(|| {
            ReduceError::NotAnAssignmentPolicy(format!("no cycle for {}", clause_id(j)))
        })?;
        for lit in &self.formula.clauses[j].literals {
            let id = variable_id(lit.var() - 1);
            let t = policy
                .cycle(&id)
                .ok_or_else(|| ReduceError::NotAnAssignmentPolicy(format!("no cycle for {id}")))?;
            if (clause_cycle / t).is_integer() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn all_clauses_synchronized(&self, policy: &Policy) -> Result<bool, ReduceError> {
        for j in 0..self.formula.clauses.len() {
            if !self.clause_synchronized(policy, j)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

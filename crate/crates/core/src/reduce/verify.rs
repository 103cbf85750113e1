//! Desk-scale checks of the reduction: optimal assignment policies track
//! satisfiability, and the cost gap that makes them do so.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use super::{clause_id, variable_id, ReduceError, ReductionConfig, ReductionOutput};
use crate::cost::{decompose, marginal_jr_of_series, marginal_jr_over, total_cost};
use crate::eoq::standalone_cost;
use crate::model::rational::{format_rational, int, to_decimal, Rational, DEFAULT_DIGITS};
use crate::model::CommodityClass;
use crate::sat::{brute_force_sat, validate_3sat, Assignment, CnfFormula};
use crate::sync::SyncConfig;

pub const ROUNDTRIP_VAR_CAP: usize = 10;
pub const ROUNDTRIP_CLAUSE_CAP: usize = 15;

fn exact_json(x: &Rational) -> serde_json::Value {
    json!({ "exact": format_rational(x), "decimal": to_decimal(x, DEFAULT_DIGITS) })
}

fn opt_json(x: &Option<Rational>) -> serde_json::Value {
    x.as_ref().map_or(serde_json::Value::Null, exact_json)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub satisfiable: bool,
    pub witness: Option<Assignment>,
    pub argmin: Assignment,
    pub min_cost: Rational,
    pub argmin_synchronizes_all: bool,
    pub best_synchronized: Option<Rational>,
    pub best_unsynchronized: Option<Rational>,
}

impl RoundtripReport {
    /// The optimal assignment policy synchronizes every Clause exactly when
    /// the formula is satisfiable.
    pub fn sync_iff_sat(&self) -> bool {
        self.argmin_synchronizes_all == self.satisfiable
    }

    /// Best violating minus best fully synchronized cost.
    pub fn gap(&self) -> Option<Rational> {
        match (&self.best_synchronized, &self.best_unsynchronized) {
            (Some(s), Some(u)) => Some(u - s),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "scope": "all 2^n assignment policies at seed 1",
            "num_vars": self.num_vars,
            "num_clauses": self.num_clauses,
            "satisfiable": self.satisfiable,
            "witness": self.witness.as_ref().map(|a| a.to_string()),
            "argmin": self.argmin.to_string(),
            "min_cost": exact_json(&self.min_cost),
            "argmin_synchronizes_all": self.argmin_synchronizes_all,
            "sync_iff_sat": self.sync_iff_sat(),
            "best_synchronized": opt_json(&self.best_synchronized),
            "best_unsynchronized": opt_json(&self.best_unsynchronized),
            "gap": opt_json(&self.gap()),
        })
    }
}

struct Evaluated {
    index: u64,
    cost: Rational,
    synchronized: bool,
}

/// Reduces `formula`, prices every assignment policy at seed 1 exactly and
/// compares the cheapest one with the brute-force verdict.
pub fn verify_roundtrip(
    formula: &CnfFormula,
    config: &ReductionConfig,
    sync: &SyncConfig,
) -> Result<RoundtripReport, ReduceError> {
    validate_3sat(formula)?;
    if formula.num_vars > ROUNDTRIP_VAR_CAP {
        return Err(ReduceError::Cap {
            what: "variables",
            value: formula.num_vars,
            cap: ROUNDTRIP_VAR_CAP,
        });
    }
    if formula.clauses.len() > ROUNDTRIP_CLAUSE_CAP {
        return Err(ReduceError::Cap {
            what: "clauses",
            value: formula.clauses.len(),
            cap: ROUNDTRIP_CLAUSE_CAP,
        });
    }
    let output = super::reduce(formula, config)?;
    verify_output(&output, sync)
}

/// [`verify_roundtrip`] on an already reduced instance.
pub fn verify_output(
    output: &ReductionOutput,
    sync: &SyncConfig,
) -> Result<RoundtripReport, ReduceError> {
    let n = output.pairs.len();
    let witness = brute_force_sat(&output.formula)?;
    let evaluated: Vec<Evaluated> = (0..1u64 << n)
        .into_par_iter()
        .map(|index| {
            let a = Assignment::from_index(n, index);
            let policy = output.assignment_to_policy(&a, &Rational::one())?;
            Ok(Evaluated {
                index,
                cost: total_cost(&output.instance, &policy, sync)?.total,
                synchronized: output.all_clauses_synchronized(&policy)?,
            })
        })
        .collect::<Result<_, ReduceError>>()?;
    // deterministic: ties go to the lexicographically first assignment
    let best = evaluated
        .iter()
        .min_by(|a, b| a.cost.cmp(&b.cost).then(a.index.cmp(&b.index)))
        .expect("at least one assignment");
    let best_where = |flag: bool| {
        evaluated
            .iter()
            .filter(|e| e.synchronized == flag)
            .map(|e| e.cost.clone())
            .min()
    };
    Ok(RoundtripReport {
        num_vars: n,
        num_clauses: output.formula.clauses.len(),
        satisfiable: witness.is_some(),
        witness,
        argmin: Assignment::from_index(n, best.index),
        min_cost: best.cost.clone(),
        argmin_synchronizes_all: best.synchronized,
        best_synchronized: best_where(true),
        best_unsynchronized: best_where(false),
    })
}

/// Cost of Variable `i` at `low` and at `high` (both scaled by the seed)
/// on top of the Constants and of the other Variables held at `low`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaDelta {
    pub variable: String,
    pub at_low: Rational,
    pub at_high: Rational,
}

impl LemmaDelta {
    pub fn holds(&self) -> bool {
        self.at_low < self.at_high
    }
}

pub fn lemma_delta(
    output: &ReductionOutput,
    beta: &Rational,
    i: usize,
    sync: &SyncConfig,
) -> Result<LemmaDelta, ReduceError> {
    let n = output.pairs.len();
    let policy = output.assignment_to_policy(&Assignment::all_false(n), beta)?;
    let id = variable_id(i);
    let commodity = output
        .instance
        .commodity(&id)
        .expect("reduction has every variable");
    let others: Vec<Rational> = output
        .instance
        .commodities
        .iter()
        .filter(|c| {
            c.id != id && matches!(c.class, CommodityClass::Constant | CommodityClass::Variable)
        })
        .map(|c| policy.cycles[&c.id].clone())
        .collect();
    let k0 = &output.instance.joint_setup;
    let delta_at = |prime: u64| -> Result<Rational, ReduceError> {
        let t = int(prime as i64) * beta;
        let jr = marginal_jr_of_series(&t, &others, sync)?.via_union;
        Ok(standalone_cost(commodity, &t).map_err(crate::cost::CostError::from)? + k0 * jr)
    };
    let pair = output.pairs[i];
    Ok(LemmaDelta {
        variable: id,
        at_low: delta_at(pair.low)?,
        at_high: delta_at(pair.high())?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub beta: Rational,
    pub tc_variables_low: Rational,
    pub tc_variables_high: Rational,
    /// Smallest joint cost a single unsynchronized Clause adds.
    pub clause_penalty_lb: Rational,
    pub margin: Rational,
    pub target: Rational,
    pub lemma: Vec<LemmaDelta>,
}

impl GapReport {
    pub fn margin_positive(&self) -> bool {
        self.margin > Rational::zero()
    }

    pub fn meets_target(&self) -> bool {
        self.margin > self.target
    }

    pub fn lemma_holds(&self) -> bool {
        self.lemma.iter().all(LemmaDelta::holds)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "beta": exact_json(&self.beta),
            "tc_variables_low": exact_json(&self.tc_variables_low),
            "tc_variables_high": exact_json(&self.tc_variables_high),
            "clause_penalty_lb": exact_json(&self.clause_penalty_lb),
            "margin": exact_json(&self.margin),
            "target": exact_json(&self.target),
            "margin_positive": self.margin_positive(),
            "meets_target": self.meets_target(),
            "lemma_delta": self.lemma.iter().map(|l| json!({
                "variable": l.variable,
                "at_low": exact_json(&l.at_low),
                "at_high": exact_json(&l.at_high),
                "holds": l.holds(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Evaluates `TC_Var(β·low) − TC_Var(β·high) + LB(jr_clause)` against
/// `1/high_n⁶` (at β = 1) or `1/(4·high_n⁶)` (otherwise).
///
/// `LB(jr_clause)` is the exact minimum, over Clauses and over assignment
/// policies at β that leave that Clause unsynchronized, of `K₀` times the
/// Clause's joint frequency on top of the Constants and Variables.
pub fn check_gap_inequality(
    output: &ReductionOutput,
    beta: &Rational,
    sync: &SyncConfig,
) -> Result<GapReport, ReduceError> {
    let n = output.pairs.len();
    if output.formula.clauses.is_empty() {
        return Err(ReduceError::Meta(
            "gap inequality needs at least one clause".into(),
        ));
    }
    if n > ROUNDTRIP_VAR_CAP {
        return Err(ReduceError::Cap {
            what: "variables",
            value: n,
            cap: ROUNDTRIP_VAR_CAP,
        });
    }
    let tc_var = |value: bool| -> Result<Rational, ReduceError> {
        let policy = output.assignment_to_policy(&Assignment(vec![value; n]), beta)?;
        Ok(decompose(&output.instance, &policy, sync)?
            .per_class
            .expect("decompose fills the class split")
            .variables)
    };
    let tc_variables_low = tc_var(false)?;
    let tc_variables_high = tc_var(true)?;

    let penalties: Vec<Option<Rational>> = (0..1u64 << n)
        .into_par_iter()
        .map(|index| {
            let a = Assignment::from_index(n, index);
            let policy = output.assignment_to_policy(&a, beta)?;
            let mut best: Option<Rational> = None;
            for (j, clause) in output.formula.clauses.iter().enumerate() {
                if a.satisfies_clause(clause) {
                    continue;
                }
                let jr = marginal_jr_over(
                    &output.instance,
                    &policy,
                    &clause_id(j),
                    |c| matches!(c, CommodityClass::Constant | CommodityClass::Variable),
                    sync,
                )?;
                if best.as_ref().is_none_or(|b| &jr < b) {
                    best = Some(jr);
                }
            }
            Ok(best)
        })
        .collect::<Result<_, ReduceError>>()?;
    let lb_jr = penalties
        .into_iter()
        .flatten()
        .min()
        .expect("every clause is falsified by some assignment");
    let clause_penalty_lb = &output.instance.joint_setup * lb_jr;
    let margin = &tc_variables_low - &tc_variables_high + &clause_penalty_lb;
    let p6 = num_traits::pow(int(output.top_prime() as i64), 6);
    let target = if beta == &Rational::one() {
        p6.recip()
    } else {
        (int(4) * p6).recip()
    };
    let lemma = (0..n)
        .map(|i| lemma_delta(output, beta, i, sync))
        .collect::<Result<_, _>>()?;
    Ok(GapReport {
        beta: beta.clone(),
        tc_variables_low,
        tc_variables_high,
        clause_penalty_lb,
        margin,
        target,
        lemma,
    })
}

//! Seeded random instances, formulas and families for tests and the CLI.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::rational::{int, ratio, Rational};
use crate::model::{Commodity, CommodityClass, Instance};
use crate::sat::{Clause, CnfFormula, Literal};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer parameter ranges for [`random_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub n: usize,
    pub setup: RangeInclusive<i64>,
    pub holding: RangeInclusive<i64>,
    pub demand: RangeInclusive<i64>,
    pub joint_setup: RangeInclusive<i64>,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            n: 3,
            setup: 1..=100,
            holding: 1..=10,
            demand: 1..=10,
            joint_setup: 1..=100,
        }
    }
}

/// Generic commodities `c1..cn` with integer parameters drawn uniformly.
pub fn random_instance(rng: &mut impl Rng, spec: &InstanceSpec) -> Instance {
    let commodities = (1..=spec.n)
        .map(|i| {
            Commodity::new(
                format!("c{i}"),
                CommodityClass::Generic,
                int(rng.gen_range(spec.demand.clone())),
                int(rng.gen_range(spec.holding.clone())),
                int(rng.gen_range(spec.setup.clone())),
            )
        })
        .collect();
    Instance::new(commodities, int(rng.gen_range(spec.joint_setup.clone())))
}

/// `m·2^e` with a mantissa in `[1, 2)` (denominator up to `2^10`) and
/// `e ∈ exponents`.
pub fn random_scaled(rng: &mut impl Rng, exponents: RangeInclusive<i64>) -> Rational {
    let mantissa = ratio(rng.gen_range(1024..2048), 1024);
    mantissa * crate::model::rational::pow2(rng.gen_range(exponents))
}

/// Uniform `p/q` with `1 ≤ p ≤ max_num`, `1 ≤ q ≤ max_den`.
pub fn random_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    ratio(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

/// `m` clauses of three distinct variables out of `x1..xn` (`n ≥ 3`).
pub fn random_formula(rng: &mut impl Rng, n: usize, m: usize) -> CnfFormula {
    assert!(n >= 3, "3SAT clauses need three distinct variables");
    let vars: Vec<usize> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let mut picked: Vec<usize> = vars.choose_multiple(rng, 3).copied().collect();
            picked.sort_unstable();
            Clause::new(
                picked
                    .into_iter()
                    .map(|v| {
                        if rng.gen_bool(0.5) {
                            Literal::positive(v)
                        } else {
                            Literal::negative(v)
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    CnfFormula::new(n, clauses)
}

/// Every formula over `x1, x2, x3` built from at most `max_clauses`
/// distinct sign patterns of `(x1 ∨ x2 ∨ x3)`, in a fixed order.
pub fn three_variable_corpus(max_clauses: usize) -> Vec<CnfFormula> {
    let patterns: Vec<Clause> = (0..8i64)
        .map(|mask| {
            let s = |v: i64| if mask >> (v - 1) & 1 == 1 { v } else { -v };
            Clause::of(&[s(1), s(2), s(3)])
        })
        .collect();
    let mut out = vec![];
    for subset in 0u32..256 {
        if subset.count_ones() as usize > max_clauses {
            continue;
        }
        let clauses = (0..8)
            .filter(|j| subset >> j & 1 == 1)
            .map(|j| patterns[j].clone())
            .collect();
        out.push(CnfFormula::new(3, clauses));
    }
    out.sort_by_key(|f| f.clauses.len());
    out
}

/// The eight sign patterns over three variables: unsatisfiable.
pub fn all_sign_patterns() -> CnfFormula {
    let mut f = three_variable_corpus(8).pop().expect("full formula");
    f.clauses
        .sort_by_key(|c| c.literals.iter().map(|l| l.value()).collect::<Vec<_>>());
    f
}

//! Domain types shared by every other module: commodities, instances,
//! policies and seed profiles, plus their validation and JSON formats.

mod io;
pub mod rational;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

pub use io::{load_instance, load_policy, save_instance, save_policy, LoadError};
pub use rational::{parse_rational, Rational, Root};

use rational::{format_rational, is_positive};

/// Role a commodity plays in a generated reduction instance.
///
/// Purely descriptive: cost evaluation ignores it, only the per-class
/// decomposition and the reduction checks read it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommodityClass {
    Constant,
    Variable,
    Clause,
    Generic,
}

impl CommodityClass {
    pub fn tag(self) -> &'static str {
        match self {
            CommodityClass::Constant => "constant",
            CommodityClass::Variable => "variable",
            CommodityClass::Clause => "clause",
            CommodityClass::Generic => "generic",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "constant" => Some(CommodityClass::Constant),
            "variable" => Some(CommodityClass::Variable),
            "clause" => Some(CommodityClass::Clause),
            "generic" => Some(CommodityClass::Generic),
            _ => None,
        }
    }
}

impl fmt::Display for CommodityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commodity {
    pub id: String,
    pub class: CommodityClass,
    /// Demand rate λ (units per period).
    pub demand: Rational,
    /// Holding cost h ($ per unit per period).
    pub holding: Rational,
    /// Fixed ordering cost K ($ per order).
    pub setup: Rational,
}

impl Commodity {
    pub fn new(
        id: impl Into<String>,
        class: CommodityClass,
        demand: Rational,
        holding: Rational,
        setup: Rational,
    ) -> Self {
        Commodity {
            id: id.into(),
            class,
            demand,
            holding,
            setup,
        }
    }

    /// Generic commodity from small integer parameters; handy in tests.
    pub fn generic(id: impl Into<String>, setup: i64, holding: i64, demand: i64) -> Self {
        Commodity::new(
            id,
            CommodityClass::Generic,
            rational::int(demand),
            rational::int(holding),
            rational::int(setup),
        )
    }

    /// λ·h/2, the coefficient of t in the standalone cost.
    pub fn holding_rate(&self) -> Rational {
        &self.demand * &self.holding / rational::int(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub commodities: Vec<Commodity>,
    /// Joint ordering cost K₀, paid once per epoch with at least one order.
    pub joint_setup: Rational,
    /// Free-form metadata; reductions store their bookkeeping here.
    pub meta: Option<serde_json::Value>,
}

impl Instance {
    pub fn new(commodities: Vec<Commodity>, joint_setup: Rational) -> Self {
        Instance {
            commodities,
            joint_setup,
            meta: None,
        }
    }

    pub fn len(&self) -> usize {
        self.commodities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commodities.is_empty()
    }

    pub fn commodity(&self, id: &str) -> Option<&Commodity> {
        self.commodities.iter().find(|c| c.id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.commodities.iter().position(|c| c.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.commodities.iter().map(|c| c.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NonPositive {
        /// `None` for the instance-level joint setup cost.
        commodity: Option<String>,
        field: &'static str,
        value: Rational,
    },
    DuplicateId(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositive {
                commodity: Some(id),
                field,
                value,
            } => write!(
                f,
                "commodity `{id}`: {field} must be positive, got {}",
                format_rational(value)
            ),
            Violation::NonPositive {
                commodity: None,
                field,
                value,
            } => write!(
                f,
                "{field} must be positive, got {}",
                format_rational(value)
            ),
            Violation::DuplicateId(id) => write!(f, "duplicate commodity id `{id}`"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated instance invariant; an empty report means valid.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    if !is_positive(&instance.joint_setup) {
        violations.push(Violation::NonPositive {
            commodity: None,
            field: "k0",
            value: instance.joint_setup.clone(),
        });
    }
    let mut seen = HashSet::new();
    for c in &instance.commodities {
        if !seen.insert(c.id.as_str()) {
            violations.push(Violation::DuplicateId(c.id.clone()));
        }
        for (field, value) in [("lambda", &c.demand), ("h", &c.holding), ("k", &c.setup)] {
            if !is_positive(value) {
                violations.push(Violation::NonPositive {
                    commodity: Some(c.id.clone()),
                    field,
                    value: value.clone(),
                });
            }
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("policy has no cycle time for commodity `{0}`")]
    Missing(String),
    #[error("policy names unknown commodity `{0}`")]
    Unknown(String),
    #[error("cycle time of `{id}` must be positive, got {value}")]
    NonPositive { id: String, value: String },
}

/// Rational cycle time per commodity id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Policy {
    pub cycles: BTreeMap<String, Rational>,
}

impl Policy {
    pub fn new() -> Self {
        Policy::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Policy {
            cycles: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn cycle(&self, id: &str) -> Option<&Rational> {
        self.cycles.get(id)
    }

    pub fn set(&mut self, id: impl Into<String>, cycle: Rational) {
        self.cycles.insert(id.into(), cycle);
    }

    /// Multiplies every cycle time by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Policy {
        Policy {
            cycles: self
                .cycles
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
        }
    }

    /// Checks that the policy covers `instance` exactly once with positive cycles.
    pub fn check_covers(&self, instance: &Instance) -> Result<(), PolicyError> {
        for c in &instance.commodities {
            match self.cycles.get(&c.id) {
                None => return Err(PolicyError::Missing(c.id.clone())),
                Some(t) if !is_positive(t) => {
                    return Err(PolicyError::NonPositive {
                        id: c.id.clone(),
                        value: format_rational(t),
                    })
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = self
            .cycles
            .keys()
            .find(|id| instance.commodity(id).is_none())
        {
            return Err(PolicyError::Unknown(extra.clone()));
        }
        Ok(())
    }

    /// Cycle times in instance order. Assumes `check_covers` passed.
    pub fn ordered_cycles(&self, instance: &Instance) -> Result<Vec<Rational>, PolicyError> {
        self.check_covers(instance)?;
        Ok(instance
            .commodities
            .iter()
            .map(|c| self.cycles[&c.id].clone())
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("integer multiplier of `{0}` must be at least 1")]
    ZeroMultiplier(String),
    #[error("seed must be at least 1, got {0}")]
    SeedBelowOne(String),
}

/// Integer cycle multipliers `k_c` sharing one rational seed β.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedProfile {
    multipliers: BTreeMap<String, u64>,
    seed: Rational,
}

impl SeedProfile {
    pub fn new(multipliers: BTreeMap<String, u64>, seed: Rational) -> Result<Self, ProfileError> {
        if let Some((id, _)) = multipliers.iter().find(|(_, k)| **k == 0) {
            return Err(ProfileError::ZeroMultiplier(id.clone()));
        }
        if seed < Rational::one() {
            return Err(ProfileError::SeedBelowOne(format_rational(&seed)));
        }
        Ok(SeedProfile { multipliers, seed })
    }

    pub fn multipliers(&self) -> &BTreeMap<String, u64> {
        &self.multipliers
    }

    pub fn seed(&self) -> &Rational {
        &self.seed
    }
}

/// Scales an integer profile by any positive factor (no β ≥ 1 requirement).
pub fn scale_multipliers(multipliers: &BTreeMap<String, u64>, factor: &Rational) -> Policy {
    Policy {
        cycles: multipliers
            .iter()
            .map(|(id, k)| {
                (
                    id.clone(),
                    Rational::from_integer(BigInt::from(*k)) * factor,
                )
            })
            .collect(),
    }
}

/// `t_c = β·k_c` for every commodity of the profile.
pub fn expand_profile(profile: &SeedProfile) -> Policy {
    scale_multipliers(&profile.multipliers, &profile.seed)
}

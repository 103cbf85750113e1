//! Exact evaluation and optimization of periodic joint-replenishment
//! policies, plus a 3SAT reduction and the checks that go with it.
//!
//! All quantities are exact rationals; floating point only ranks candidates
//! and prints decimals.

pub mod cost;
pub mod eoq;
pub mod gen;
pub mod model;
pub mod oracle;
pub mod reduce;
pub mod sat;
pub mod solve;
pub mod sync;

pub use cost::{decompose, total_cost, CostBreakdown, CostError, SeedCost};
pub use model::{
    load_instance, load_policy, save_instance, save_policy, Commodity, CommodityClass, Instance,
    LoadError, Policy, Rational, Root, SeedProfile,
};
pub use reduce::{reduce, ConstantsScheme, ReductionConfig, ReductionConstants, ReductionOutput};
pub use sat::{parse_dimacs, serialize_dimacs, Assignment, CnfFormula};
pub use solve::{SolveConfig, SolveMethod, SolveResult};
pub use sync::{SeriesFamily, SyncConfig};

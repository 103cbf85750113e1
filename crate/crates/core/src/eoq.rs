//! Single-commodity EOQ: standalone cost `g(t) = K/t + λht/2`, its
//! minimizer, and the (K, K+K₀) bounding pair.

use num_traits::Signed;
use thiserror::Error;

use crate::model::rational::{self, format_rational, is_positive, Rational, Root};
use crate::model::Commodity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EoqError {
    #[error("cycle time must be positive, got {0}")]
    NonPositiveCycle(String),
    #[error("joint setup cost must be positive, got {0}")]
    NonPositiveJointSetup(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EoqResult {
    pub optimal_cycle: Root,
    pub optimal_cost: Root,
}

impl EoqResult {
    pub fn is_exact(&self) -> bool {
        self.optimal_cycle.is_exact()
    }
}

pub fn standalone_cost(c: &Commodity, t: &Rational) -> Result<Rational, EoqError> {
    if !is_positive(t) {
        return Err(EoqError::NonPositiveCycle(format_rational(t)));
    }
    Ok(&c.setup / t + c.holding_rate() * t)
}

/// `g` at a float cycle time; used by the optimizers' ranking passes.
pub fn standalone_cost_f64(c: &Commodity, t: f64) -> f64 {
    rational::to_f64(&c.setup) / t + rational::to_f64(&c.holding_rate()) * t
}

fn eoq_for(setup: &Rational, holding: &Rational, demand: &Rational) -> EoqResult {
    let square = rational::int(2) * setup / (holding * demand);
    let t = rational::sqrt(&square);
    let cost = match &t {
        Root::Exact(t) => Root::Exact(rational::int(2) * setup / t),
        // g(t*) = sqrt(2Kλh)
        Root::Inexact(_) => {
            let sq = rational::int(2) * setup * holding * demand;
            Root::Inexact(rational::sqrt(&sq).to_f64())
        }
    };
    EoqResult {
        optimal_cycle: t,
        optimal_cost: cost,
    }
}

/// `t* = sqrt(2K/(hλ))`, exact whenever the radicand is a rational square.
pub fn optimal_cycle(c: &Commodity) -> EoqResult {
    eoq_for(&c.setup, &c.holding, &c.demand)
}

/// EOQ optima of `(h, K)` and `(h, K + K₀)`.
pub fn theta_pair(c: &Commodity, k0: &Rational) -> Result<(EoqResult, EoqResult), EoqError> {
    if !k0.is_positive() {
        return Err(EoqError::NonPositiveJointSetup(format_rational(k0)));
    }
    let t1 = eoq_for(&c.setup, &c.holding, &c.demand);
    let t2 = eoq_for(&(&c.setup + k0), &c.holding, &c.demand);
    Ok((t1, t2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational::{int, ratio};
    use crate::model::CommodityClass;
    use proptest::prelude::*;

    fn constant(h: Rational, k: Rational) -> Commodity {
        Commodity::new("y", CommodityClass::Constant, int(2), h, k)
    }

    #[test]
    fn direct_evaluation() {
        let c = Commodity::generic("a", 25, 1, 2);
        assert_eq!(standalone_cost(&c, &int(5)).unwrap(), int(10));
        let c = Commodity::generic("b", 8, 1, 1);
        assert_eq!(standalone_cost(&c, &int(4)).unwrap(), int(4));
        assert!(standalone_cost(&c, &int(0)).is_err());
        assert!(standalone_cost(&c, &int(-1)).is_err());
    }

    #[test]
    fn exact_optima() {
        let r = optimal_cycle(&Commodity::generic("a", 25, 1, 2));
        assert_eq!(r.optimal_cycle, Root::Exact(int(5)));
        assert_eq!(r.optimal_cost, Root::Exact(int(10)));
        let r = optimal_cycle(&Commodity::generic("b", 8, 1, 1));
        assert_eq!(r.optimal_cycle, Root::Exact(int(4)));
    }

    #[test]
    fn inexact_flagged() {
        let c = Commodity::generic("a", 13, 1, 1);
        let r = optimal_cycle(&c);
        assert!(!r.is_exact());
        assert!((r.optimal_cycle.to_f64() - 26f64.sqrt()).abs() < 1e-12 * 26f64.sqrt());
        assert!((r.optimal_cost.to_f64() - 26f64.sqrt()).abs() < 1e-12 * 26f64.sqrt());
    }

    #[test]
    fn theta_pair_of_reduction_constant() {
        let c = constant(ratio(2500, 1809), ratio(10000, 201));
        let (t1, t2) = theta_pair(&c, &int(1)).unwrap();
        assert_eq!(t1.optimal_cycle, Root::Exact(int(6)));
        assert_eq!(t2.optimal_cycle, Root::Exact(ratio(303, 50)));
        assert!(theta_pair(&c, &int(0)).is_err());
    }

    #[test]
    fn theta_pair_shrinks_with_k0() {
        let c = Commodity::generic("a", 25, 1, 2);
        let (t1, t2) = theta_pair(&c, &ratio(1, 1_000_000_000)).unwrap();
        let gap = t2.optimal_cycle.to_f64() - t1.optimal_cycle.to_f64();
        assert!(gap > 0.0 && gap < 1e-9);
    }

    fn positive() -> impl Strategy<Value = Rational> {
        (1i64..10_000, 1i64..10_000).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn midpoint_convexity(k in positive(), h in positive(), l in positive(), a in positive(), b in positive()) {
            let c = Commodity::new("c", CommodityClass::Generic, l, h, k);
            let (t1, t3) = (a.clone(), &a + &b);
            let t2 = (&t1 + &t3) / int(2);
            let g = |t: &Rational| standalone_cost(&c, t).unwrap();
            prop_assert!(g(&t2) * int(2) <= g(&t1) + g(&t3));
        }

        #[test]
        fn symmetric_rescaling(k in positive(), h in positive(), l in positive(), a in positive()) {
            let c = Commodity::new("c", CommodityClass::Generic, l.clone(), h.clone(), k.clone());
            let d = Commodity::new("d", CommodityClass::Generic, l / &a, h * &a, k);
            prop_assert_eq!(optimal_cycle(&c).optimal_cycle, optimal_cycle(&d).optimal_cycle);
        }

        #[test]
        fn exact_optimum_substitution(t in 1i64..500, k in positive()) {
            // h chosen so that t* = t exactly
            let h = k.clone() / int(t * t);
            let c = Commodity::new("c", CommodityClass::Generic, int(2), h, k.clone());
            let r = optimal_cycle(&c);
            prop_assert_eq!(r.optimal_cycle, Root::Exact(int(t)));
            prop_assert_eq!(r.optimal_cost, Root::Exact(int(2) * k / int(t)));
        }
    }
}

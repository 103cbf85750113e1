use jrp_core::cost::{check_jr_bounds, decompose};
use jrp_core::gen;
use jrp_core::model::rational::{int, ratio};
use jrp_core::model::{load_instance, save_instance, validate_instance, CommodityClass};
use jrp_core::reduce::{reduce, variable_id, ReductionConfig, ReductionOutput};
use jrp_core::sat::{parse_dimacs, Assignment};
use jrp_core::sync::SyncConfig;
use num_traits::pow;

#[test]
fn reduction_file_round_trips() {
    let formula = parse_dimacs(b"p cnf 4 3\n1 -2 3 0\n-1 2 4 0\n2 3 -4 0\n").unwrap();
    let out = reduce(&formula, &ReductionConfig::default()).unwrap();
    assert!(validate_instance(&out.instance).is_valid());
    let bytes = save_instance(&out.instance);
    let reloaded = load_instance(&bytes).unwrap();
    assert_eq!(reloaded, out.instance);
    assert_eq!(save_instance(&reloaded), bytes);
    let rebuilt = ReductionOutput::from_instance(reloaded).unwrap();
    assert_eq!(rebuilt, out);
}

#[test]
fn three_variable_single_clause_shape() {
    let formula = parse_dimacs(b"p cnf 3 1\n1 2 3 0\n").unwrap();
    let out = reduce(&formula, &ReductionConfig::default()).unwrap();
    let count = |class| {
        out.instance
            .commodities
            .iter()
            .filter(|c| c.class == class)
            .count()
    };
    assert_eq!(count(CommodityClass::Variable), 3);
    assert_eq!(count(CommodityClass::Clause), 1);
    assert_eq!(count(CommodityClass::Constant), out.constant_targets.len());
    assert_eq!(out.delta, pow(int(31), 6).recip() / int(18));
    assert_eq!(out.instance.joint_setup, int(1));
    assert!(out.instance.commodities.iter().all(|c| c.demand == int(2)));
}

#[test]
fn literal_map_round_trips_at_every_seed() {
    let mut rng = gen::rng(21);
    let formula = gen::random_formula(&mut rng, 4, 5);
    let out = reduce(&formula, &ReductionConfig::default()).unwrap();
    let betas = [int(1), int(1) + &out.delta * ratio(1, 3), out.beta_upper()];
    for index in 0..16 {
        let a = Assignment::from_index(4, index);
        for beta in &betas {
            let policy = out.assignment_to_policy(&a, beta).unwrap();
            assert_eq!(out.policy_to_assignment(&policy).unwrap(), a);
            assert_eq!(&out.policy_seed(&policy).unwrap(), beta);
            assert_eq!(
                out.all_clauses_synchronized(&policy).unwrap(),
                a.satisfies(&formula)
            );
        }
    }
}

#[test]
fn variable_jr_bounds_hold_on_generated_instances() {
    let sync = SyncConfig::default();
    let mut rng = gen::rng(22);
    for _ in 0..3 {
        let formula = gen::random_formula(&mut rng, 3, 3);
        let out = reduce(&formula, &ReductionConfig::default()).unwrap();
        for index in 0..8 {
            let a = Assignment::from_index(3, index);
            for beta in [int(1), out.beta_upper()] {
                let policy = out.assignment_to_policy(&a, &beta).unwrap();
                for (i, pair) in out.pairs.iter().enumerate() {
                    let check = check_jr_bounds(
                        &out.instance,
                        &policy,
                        &variable_id(i),
                        &out.constants,
                        &(&beta * int(pair.low as i64)),
                        &(&beta * int(pair.high() as i64)),
                        &sync,
                    )
                    .unwrap();
                    assert!(check.holds(), "{check:?}");
                }
            }
        }
    }
}

#[test]
fn class_costs_add_up() {
    let sync = SyncConfig::default();
    let formula = gen::random_formula(&mut gen::rng(23), 3, 4);
    let out = reduce(&formula, &ReductionConfig::default()).unwrap();
    let policy = out
        .assignment_to_policy(&Assignment::all_false(3), &int(1))
        .unwrap();
    let cost = decompose(&out.instance, &policy, &sync).unwrap();
    assert_eq!(cost.per_class.unwrap().sum(), cost.total);
}

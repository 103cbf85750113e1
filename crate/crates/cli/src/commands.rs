use std::io::Write;
use std::path::Path;
use std::time::Instant;

use jrp_core::cost::{decompose, total_cost};
use jrp_core::gen::{self, InstanceSpec};
use jrp_core::model::rational::format_rational;
use jrp_core::model::{
    load_instance, load_policy, save_instance, save_policy, CommodityClass, Instance, Policy,
};
use jrp_core::reduce::ReductionConfig;
use jrp_core::sat::{brute_force_sat, parse_dimacs, CnfFormula};
use jrp_core::solve::{
    coordinate_descent, default_bounds, exhaustive_search, power_of_two, SolveConfig, SolveResult,
};
use serde_json::{json, Value};

use crate::error::{CliError, Exit};
use crate::report::{self, exact};
use crate::{Format, Global, Method, SolveArgs};

pub fn load_instance_file(path: &Path) -> Result<Instance, CliError> {
    load_instance(&report::read(path)?).map_err(|e| CliError::from(e).context(path.display()))
}

pub fn load_cnf(path: &Path) -> Result<CnfFormula, CliError> {
    parse_dimacs(&report::read(path)?).map_err(|e| CliError::from(e).context(path.display()))
}

fn classed(instance: &Instance) -> bool {
    instance
        .commodities
        .iter()
        .all(|c| c.class != CommodityClass::Generic)
}

pub fn eval(
    g: &Global,
    instance_path: &Path,
    policy_path: &Path,
    instance_id: Option<String>,
    policy_id: Option<String>,
) -> Result<(), CliError> {
    let instance = load_instance_file(instance_path)?;
    let policy = load_policy(&report::read(policy_path)?)
        .map_err(|e| CliError::from(e).context(policy_path.display()))?;
    let cost = if classed(&instance) {
        decompose(&instance, &policy, &g.sync())?
    } else {
        total_cost(&instance, &policy, &g.sync())?
    };
    let instance_id = instance_id.unwrap_or_else(|| report::stem(instance_path));
    let policy_id = policy_id.unwrap_or_else(|| report::stem(policy_path));
    match g.format {
        Format::Csv => report::print_breakdown_csv(&cost, &instance_id, &policy_id, g.digits),
        Format::Json => report::print_json(&json!({
            "instance_id": instance_id,
            "policy_id": policy_id,
            "cost": report::breakdown(&cost, g.digits),
        })),
    }
}

fn solve_config(g: &Global, args: &SolveArgs) -> SolveConfig {
    SolveConfig {
        sync: g.sync(),
        profile_cap: args.profile_cap,
        grid_per_octave: args.grid,
        max_rounds: args.max_rounds,
    }
}

fn run_solver(
    instance: &Instance,
    args: &SolveArgs,
    cfg: &SolveConfig,
) -> Result<SolveResult, CliError> {
    Ok(match args.method {
        Method::Exhaustive => {
            let bounds = match args.k_max {
                Some(k) => vec![(1, k); instance.len()],
                None => default_bounds(instance, args.span, cfg.profile_cap),
            };
            let interval = match (&args.seed_lo, &args.seed_hi) {
                (None, None) => None,
                (lo, hi) => Some((
                    lo.clone()
                        .unwrap_or_else(|| jrp_core::model::rational::int(1)),
                    hi.clone(),
                )),
            };
            exhaustive_search(instance, &bounds, interval, cfg)?
        }
        Method::Pot => power_of_two(instance, &args.base, args.optimize_base, cfg)?,
        Method::Descent => {
            let start: Policy = match &args.start {
                Some(path) => load_policy(&report::read(path)?)
                    .map_err(|e| CliError::from(e).context(path.display()))?,
                None => power_of_two(instance, &args.base, args.optimize_base, cfg)?.policy,
            };
            coordinate_descent(instance, &start, None, cfg)?
        }
    })
}

pub fn solve(g: &Global, args: &SolveArgs) -> Result<(), CliError> {
    let instance = load_instance_file(&args.instance)?;
    let cfg = solve_config(g, args);
    let started = Instant::now();
    let result = run_solver(&instance, args, &cfg)?;
    eprintln!(
        "solver: {} nodes in {:.3}s",
        result.nodes_explored,
        started.elapsed().as_secs_f64()
    );
    if let Some(out) = &args.out {
        report::write(out, &save_policy(&result.policy))?;
    }
    match g.format {
        Format::Csv => report::print_breakdown_csv(
            &result.cost,
            &report::stem(&args.instance),
            result.method.name(),
            g.digits,
        ),
        Format::Json => {
            let mut v = json!({
                "method": result.method.name(),
                "scope": result.method.scope(),
                "nodes_explored": result.nodes_explored,
                "policy": report::policy(&result.policy),
                "cost": report::breakdown(&result.cost, g.digits),
            });
            if let Some(profile) = &result.profile {
                v["profile"] = json!(profile);
            }
            if let Some(seed) = &result.seed {
                v["seed"] = exact(seed, g.digits);
            }
            report::print_json(&v)
        }
    }
}

pub fn reduce(
    g: &Global,
    cnf: &Path,
    out: &Path,
    config: &ReductionConfig,
) -> Result<(), CliError> {
    let formula = load_cnf(cnf)?;
    let output = jrp_core::reduce::reduce(&formula, config)?;
    report::write(out, &save_instance(&output.instance))?;
    let count = |class| {
        output
            .instance
            .commodities
            .iter()
            .filter(|c| c.class == class)
            .count()
    };
    let summary = json!({
        "n": formula.num_vars,
        "m": formula.clauses.len(),
        "delta": exact(&output.delta, g.digits),
        "commodities": {
            "constants": count(CommodityClass::Constant),
            "variables": count(CommodityClass::Variable),
            "clauses": count(CommodityClass::Clause),
        },
        "constants_scheme": output.scheme.name(),
        "alpha": output.constants.to_json(),
        "out": out.display().to_string(),
    });
    match g.format {
        Format::Json => report::print_json(&summary),
        Format::Csv => report::print_csv(
            &["n", "m", "delta", "constants", "variables", "clauses"].map(String::from),
            &[vec![
                formula.num_vars.to_string(),
                formula.clauses.len().to_string(),
                format_rational(&output.delta),
                count(CommodityClass::Constant).to_string(),
                count(CommodityClass::Variable).to_string(),
                count(CommodityClass::Clause).to_string(),
            ]],
        ),
    }
}

pub fn sat(g: &Global, cnf: &Path, n_cap: usize) -> Result<(), CliError> {
    let formula = load_cnf(cnf)?;
    if formula.num_vars > n_cap {
        return Err(CliError::new(
            Exit::Cap,
            format!("{} variables exceed --n-cap {n_cap}", formula.num_vars),
        ));
    }
    let witness = brute_force_sat(&formula)?;
    let assignment = witness.as_ref().map(|a| a.to_string());
    match g.format {
        Format::Json => report::print_json(&json!({
            "num_vars": formula.num_vars,
            "num_clauses": formula.clauses.len(),
            "satisfiable": witness.is_some(),
            "assignment": assignment.map_or(Value::Null, Value::String),
        })),
        Format::Csv => report::print_csv(
            &["num_vars", "num_clauses", "satisfiable", "assignment"].map(String::from),
            &[vec![
                formula.num_vars.to_string(),
                formula.clauses.len().to_string(),
                witness.is_some().to_string(),
                assignment.unwrap_or_default(),
            ]],
        ),
    }
}

pub fn gen(spec: &InstanceSpec, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    if spec.n == 0 {
        return Err(CliError::input("--n must be at least 1"));
    }
    let instance = gen::random_instance(&mut gen::rng(seed), spec);
    let bytes = save_instance(&instance);
    match out {
        Some(path) => report::write(path, &bytes),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| CliError::input(format!("stdout: {e}"))),
    }
}

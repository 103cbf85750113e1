//! `check` property suites. Every check reports both sides exactly; any
//! failure exits with status 1 after the full report is printed.

use jrp_core::cost::{check_jr_bounds, marginal_jr_of_series};
use jrp_core::eoq::theta_pair;
use jrp_core::gen::{self, InstanceSpec};
use jrp_core::model::rational::{format_rational, int, ratio, to_decimal, Rational};
use jrp_core::model::{load_instance, CommodityClass};
use jrp_core::reduce::{check_gap_inequality, reduce, verify_roundtrip, ReductionOutput};
use jrp_core::sat::{Assignment, CnfFormula};
use jrp_core::solve::{default_bounds, exhaustive_search, power_of_two, SolveConfig};
use serde_json::{json, Value};

use crate::commands::load_cnf;
use crate::error::{CliError, Exit};
use crate::report::{self, exact};
use crate::{CheckArgs, Format, Global, Suite};

struct Check {
    name: &'static str,
    subject: String,
    relation: &'static str,
    lhs: Rational,
    rhs: Rational,
    holds: bool,
}

impl Check {
    fn compare(
        name: &'static str,
        subject: impl Into<String>,
        relation: &'static str,
        lhs: Rational,
        rhs: Rational,
    ) -> Self {
        let holds = match relation {
            "<" => lhs < rhs,
            "<=" => lhs <= rhs,
            "=" => lhs == rhs,
            ">" => lhs > rhs,
            _ => unreachable!("known relations only"),
        };
        Check {
            name,
            subject: subject.into(),
            relation,
            lhs,
            rhs,
            holds,
        }
    }

    fn json(&self, digits: usize) -> Value {
        json!({
            "check": self.name,
            "subject": self.subject,
            "relation": self.relation,
            "lhs": exact(&self.lhs, digits),
            "rhs": exact(&self.rhs, digits),
            "holds": self.holds,
        })
    }

    fn csv(&self) -> Vec<String> {
        vec![
            self.name.to_string(),
            self.subject.clone(),
            self.relation.to_string(),
            format_rational(&self.lhs),
            format_rational(&self.rhs),
            self.holds.to_string(),
        ]
    }
}

fn flag(b: bool) -> Rational {
    int(i64::from(b))
}

pub fn check(g: &Global, args: &CheckArgs) -> Result<(), CliError> {
    match args.suite {
        Suite::Lemmas => lemmas(g, args),
        Suite::Roundtrip => roundtrip(g, args),
        Suite::PotRatio => pot_ratio(g, args),
    }
}

fn finish(passed: bool, what: &str) -> Result<(), CliError> {
    if passed {
        Ok(())
    } else {
        Err(CliError::new(
            Exit::Violation,
            format!("{what}: property violated"),
        ))
    }
}

fn lemma_input(args: &CheckArgs) -> Result<(ReductionOutput, String), CliError> {
    if let Some(path) = &args.reduction {
        let instance = load_instance(&report::read(path)?)
            .map_err(|e| CliError::from(e).context(path.display()))?;
        return Ok((
            ReductionOutput::from_instance(instance)?,
            path.display().to_string(),
        ));
    }
    let (formula, source): (CnfFormula, String) = match args.cnf.first() {
        Some(path) => (load_cnf(path)?, path.display().to_string()),
        None => {
            if args.n < 3 {
                return Err(CliError::input(
                    "--n must be at least 3: every clause needs three distinct variables",
                ));
            }
            let f = gen::random_formula(&mut gen::rng(args.rng_seed), args.n, args.m);
            (
                f,
                format!("generated n={} m={} seed={}", args.n, args.m, args.rng_seed),
            )
        }
    };
    Ok((reduce(&formula, &args.reduction_args.config())?, source))
}

fn lemmas(g: &Global, args: &CheckArgs) -> Result<(), CliError> {
    let sync = g.sync();
    let (out, source) = lemma_input(args)?;
    let inst = &out.instance;
    let n = out.pairs.len();
    if n > jrp_core::reduce::ROUNDTRIP_VAR_CAP {
        return Err(CliError::new(
            Exit::Cap,
            format!(
                "{n} variables exceed the suite cap of {}",
                jrp_core::reduce::ROUNDTRIP_VAR_CAP
            ),
        ));
    }
    let mut checks = vec![];

    checks.push(Check::compare(
        "delta_cap",
        "delta",
        "<=",
        out.delta.clone(),
        (int(6) * int(13).pow(6)).recip(),
    ));
    for c in &inst.commodities {
        match c.class {
            CommodityClass::Constant | CommodityClass::Clause => {
                let (first, second) = theta_pair(c, &inst.joint_setup)?;
                let t1 = first.optimal_cycle.to_rational();
                let t2 = second.optimal_cycle.to_rational();
                checks.push(Check::compare(
                    "theta_ratio",
                    &c.id,
                    "=",
                    &t2 / &t1,
                    out.beta_upper(),
                ));
                checks.push(Check::compare(
                    "theta_exact",
                    &c.id,
                    "=",
                    flag(first.optimal_cycle.is_exact() && second.optimal_cycle.is_exact()),
                    int(1),
                ));
                if c.class == CommodityClass::Clause {
                    checks.push(Check::compare(
                        "clause_period_cap",
                        &c.id,
                        "<",
                        t1,
                        int(out.top_prime() as i64).pow(3),
                    ));
                }
            }
            CommodityClass::Variable => {
                let i: usize = c.id[1..].parse::<usize>().expect("variable ids are x<i>") - 1;
                let pair = out.pairs[i];
                let t_sq = int(2) * &c.setup / (&c.holding * &c.demand);
                checks.push(Check::compare(
                    "variable_window_low",
                    &c.id,
                    "<",
                    int((pair.low * pair.low) as i64),
                    t_sq.clone(),
                ));
                checks.push(Check::compare(
                    "variable_window_high",
                    &c.id,
                    "<",
                    t_sq,
                    int((pair.high() * pair.high()) as i64),
                ));
            }
            CommodityClass::Generic => {}
        }
    }

    let betas = [int(1), int(1) + &out.delta / int(2), out.beta_upper()];
    for index in 0..1u64 << n {
        let a = Assignment::from_index(n, index);
        for beta in &betas {
            let policy = out.assignment_to_policy(&a, beta)?;
            for (j, clause) in out.formula.clauses.iter().enumerate() {
                checks.push(Check::compare(
                    "clause_sync_iff_true",
                    format!("z{} @ {a} beta={}", j + 1, format_rational(beta)),
                    "=",
                    flag(out.clause_synchronized(&policy, j)?),
                    flag(a.satisfies_clause(clause)),
                ));
            }
            for (i, pair) in out.pairs.iter().enumerate() {
                let id = jrp_core::reduce::variable_id(i);
                let low = beta * int(pair.low as i64);
                let high = beta * int(pair.high() as i64);
                let b = check_jr_bounds(inst, &policy, &id, &out.constants, &low, &high, &sync)?;
                let subject = format!("{id} @ {a} beta={}", format_rational(beta));
                if let Some(h) = b.lower_holds {
                    let mut c = Check::compare(
                        "jr_lower_bound",
                        &subject,
                        "<=",
                        b.bounds.lower.clone(),
                        b.value.clone(),
                    );
                    c.holds = h;
                    checks.push(c);
                }
                if let Some(h) = b.upper_holds {
                    let mut c = Check::compare(
                        "jr_upper_bound",
                        &subject,
                        "<=",
                        b.value.clone(),
                        b.bounds.upper.clone(),
                    );
                    c.holds = h;
                    checks.push(c);
                }
            }
        }
        // both marginal-frequency formulas, every commodity, seed 1
        let policy = out.assignment_to_policy(&a, &int(1))?;
        for c in &inst.commodities {
            let others: Vec<Rational> = inst
                .commodities
                .iter()
                .filter(|o| o.id != c.id)
                .map(|o| policy.cycles[&o.id].clone())
                .collect();
            let m = marginal_jr_of_series(&policy.cycles[&c.id], &others, &sync)?;
            checks.push(Check::compare(
                "marginal_jr_formulas",
                format!("{} @ {a}", c.id),
                "=",
                m.via_union,
                m.via_intersection,
            ));
        }
    }

    if !out.formula.clauses.is_empty() {
        for beta in &betas {
            let gap = check_gap_inequality(&out, beta, &sync)?;
            let subject = format!("beta={}", format_rational(beta));
            checks.push(Check::compare(
                "gap_margin",
                &subject,
                ">",
                gap.margin.clone(),
                gap.target.clone(),
            ));
            for l in &gap.lemma {
                checks.push(Check::compare(
                    "lemma_delta",
                    format!("{} {subject}", l.variable),
                    "<",
                    l.at_low.clone(),
                    l.at_high.clone(),
                ));
            }
        }
    }

    let passed = checks.iter().all(|c| c.holds);
    match g.format {
        Format::Json => report::print_json(&json!({
            "suite": "lemmas",
            "source": source,
            "n": n,
            "m": out.formula.clauses.len(),
            "alpha": out.constants.to_json(),
            "constants_scheme": out.scheme.name(),
            "checks": checks.iter().map(|c| c.json(g.digits)).collect::<Vec<_>>(),
            "total": checks.len(),
            "failed": checks.iter().filter(|c| !c.holds).count(),
            "passed": passed,
        }))?,
        Format::Csv => report::print_csv(
            &["check", "subject", "relation", "lhs", "rhs", "holds"].map(String::from),
            &checks.iter().map(Check::csv).collect::<Vec<_>>(),
        )?,
    }
    finish(passed, "lemmas")
}

fn roundtrip(g: &Global, args: &CheckArgs) -> Result<(), CliError> {
    let sync = g.sync();
    let config = args.reduction_args.config();
    let mut inputs: Vec<(String, CnfFormula)> = vec![];
    for path in &args.cnf {
        inputs.push((path.display().to_string(), load_cnf(path)?));
    }
    if args.corpus {
        let mut corpus = gen::three_variable_corpus(4);
        corpus.push(gen::all_sign_patterns());
        inputs.extend(
            corpus
                .into_iter()
                .enumerate()
                .map(|(i, f)| (format!("corpus#{i}"), f)),
        );
    }
    if inputs.is_empty() {
        return Err(CliError::input("roundtrip needs --cnf FILE or --corpus"));
    }
    let mut rows = vec![];
    let mut passed = true;
    for (source, formula) in &inputs {
        let r = verify_roundtrip(formula, &config, &sync)
            .map_err(|e| CliError::from(e).context(source))?;
        passed &= r.sync_iff_sat();
        rows.push((source.clone(), r));
    }
    match g.format {
        Format::Json => report::print_json(&json!({
            "suite": "roundtrip",
            "constants_scheme": config.scheme.name(),
            "reports": rows.iter().map(|(s, r)| {
                let mut v = r.to_json();
                v["source"] = json!(s);
                v
            }).collect::<Vec<_>>(),
            "passed": passed,
        }))?,
        Format::Csv => report::print_csv(
            &[
                "source",
                "satisfiable",
                "argmin",
                "argmin_synchronizes_all",
                "sync_iff_sat",
                "gap",
            ]
            .map(String::from),
            &rows
                .iter()
                .map(|(s, r)| {
                    vec![
                        s.clone(),
                        r.satisfiable.to_string(),
                        r.argmin.to_string(),
                        r.argmin_synchronizes_all.to_string(),
                        r.sync_iff_sat().to_string(),
                        r.gap().map(|x| format_rational(&x)).unwrap_or_default(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    }
    finish(passed, "roundtrip")
}

fn pot_ratio(g: &Global, args: &CheckArgs) -> Result<(), CliError> {
    let cfg = SolveConfig {
        sync: g.sync(),
        profile_cap: args.profile_cap,
        ..SolveConfig::default()
    };
    let mut rng = gen::rng(args.rng_seed);
    let mut rows = vec![];
    for case in 0..args.count {
        let n = 1 + case % args.max_n as usize;
        let instance = gen::random_instance(
            &mut rng,
            &InstanceSpec {
                n,
                ..Default::default()
            },
        );
        let bounds = default_bounds(&instance, 4.0, cfg.profile_cap);
        let best = exhaustive_search(&instance, &bounds, Some((ratio(1, 1000), None)), &cfg)?;
        let pot = power_of_two(&instance, &int(1), !args.fixed_base, &cfg)?;
        let r = &pot.cost.total / &best.cost.total;
        rows.push((case, n, pot.cost.total, best.cost.total, r));
    }
    let worst = rows.iter().max_by(|a, b| a.4.cmp(&b.4).then(b.0.cmp(&a.0)));
    let max_ratio = worst
        .map(|w| jrp_core::model::rational::to_f64(&w.4))
        .unwrap_or(1.0);
    let passed = max_ratio <= args.bound;
    match g.format {
        Format::Json => report::print_json(&json!({
            "suite": "pot-ratio",
            "rng_seed": args.rng_seed,
            "count": args.count,
            "base_optimized": !args.fixed_base,
            "bound": args.bound,
            "max_ratio": worst.map(|w| to_decimal(&w.4, g.digits)),
            "worst_case": worst.map(|w| w.0),
            "cases": rows.iter().map(|(case, n, pot, best, r)| json!({
                "case": case,
                "n": n,
                "pot": exact(pot, g.digits),
                "exhaustive": exact(best, g.digits),
                "ratio": exact(r, g.digits),
            })).collect::<Vec<_>>(),
            "passed": passed,
        }))?,
        Format::Csv => report::print_csv(
            &["case", "n", "pot", "exhaustive", "ratio", "ratio_dec"].map(String::from),
            &rows
                .iter()
                .map(|(case, n, pot, best, r)| {
                    vec![
                        case.to_string(),
                        n.to_string(),
                        format_rational(pot),
                        format_rational(best),
                        format_rational(r),
                        to_decimal(r, g.digits),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    }
    finish(passed, "pot-ratio")
}

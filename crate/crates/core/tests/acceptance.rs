//! Acceptance suite: one PASS/FAIL line per criterion, each at a pinned
//! tolerance and runtime budget. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use jrp_core::cost::seed_grid_minimum;
use jrp_core::eoq::{optimal_cycle, standalone_cost, theta_pair};
use jrp_core::gen::{self, InstanceSpec};
use jrp_core::model::rational::{int, ratio, to_f64, Rational, Root};
use jrp_core::model::Instance;
use jrp_core::oracle::{golden_section, power_of_two_bracket};
use jrp_core::reduce::{
    build_constant_commodity, check_gap_inequality, clause_id, compute_delta, reduce,
    select_prime_pairs, verify_roundtrip, ReductionConfig,
};
use jrp_core::sat::{parse_dimacs, serialize_dimacs, DimacsErrorKind};
use jrp_core::solve::{default_bounds, exhaustive_search, power_of_two, SolveConfig};
use jrp_core::sync::{
    check_cardinality_identities, epoch_occupancy, ijr, ijr_cross_seed, ujr, Identity,
    SeriesFamily, SyncConfig, SyncError,
};
use jrp_core::Commodity;
use num_integer::Integer;
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn run(number: u32, title: &str, budget: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let started = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(check));
    let elapsed = started.elapsed();
    let (passed, detail) = match result {
        Ok(o) => (o.passed && elapsed <= budget, o.detail),
        Err(_) => (false, "panicked".to_string()),
    };
    println!(
        "criterion {number} {} {title}: {detail} [{:.2}s of {}s]",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    passed
}

fn eoq_closed_form() -> Outcome {
    let mut rng = gen::rng(1);
    let mut worst = 0f64;
    for i in 0..1000 {
        let c = Commodity::new(
            format!("c{i}"),
            jrp_core::CommodityClass::Generic,
            gen::random_scaled(&mut rng, -10..=10),
            gen::random_scaled(&mut rng, -10..=10),
            gen::random_scaled(&mut rng, -10..=10),
        );
        let g = |t: &Rational| standalone_cost(&c, t).expect("positive cycle");
        // t* spans about 2^±16 for these magnitudes
        let (lo, hi) = power_of_two_bracket(&g, 18);
        let found = to_f64(&golden_section(g, &lo, &hi, 1e-10));
        let closed = optimal_cycle(&c).optimal_cycle.to_f64();
        worst = worst.max((found - closed).abs() / closed);
    }
    outcome(
        worst <= 1e-9,
        format!("1000 commodities, max relative error {worst:.2e} (tol 1e-9)"),
    )
}

fn theta_identity() -> Outcome {
    let mut rng = gen::rng(2);
    let mut checked = 0;
    let mut failures = 0;
    let check = |c: &Commodity, t_star: u64, delta: &Rational| -> usize {
        let (first, second) = theta_pair(c, &int(1)).expect("valid commodity");
        let t = int(t_star as i64);
        let ok = first.optimal_cycle == Root::Exact(t.clone())
            && second.optimal_cycle == Root::Exact(&t * (int(1) + delta));
        usize::from(!ok)
    };
    for i in 0..60 {
        let t_star = rng.gen_range(1..=10_000u64);
        let delta = if i % 2 == 0 {
            ratio(1, rng.gen_range(2..=1_000_000_000))
        } else {
            compute_delta(&select_prime_pairs(rng.gen_range(1..=6)))
        };
        failures += check(
            &build_constant_commodity(format!("y{i}"), t_star, &delta),
            t_star,
            &delta,
        );
        checked += 1;
    }
    while checked < 100 {
        let (n, m) = (rng.gen_range(3..=5), rng.gen_range(1..=6));
        let formula = gen::random_formula(&mut rng, n, m);
        let out = reduce(&formula, &ReductionConfig::default()).expect("valid formula");
        for (j, t_star) in out.clause_targets.iter().enumerate() {
            if checked < 100 {
                let c = out
                    .instance
                    .commodity(&clause_id(j))
                    .expect("clause commodity");
                failures += check(c, *t_star, &out.delta);
                checked += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{checked} constant/clause commodities, {failures} mismatches (exact)"),
    )
}

fn random_family(
    rng: &mut impl Rng,
    label: &str,
    multipliers: &[u64],
) -> (SeriesFamily, Rational, Vec<u64>) {
    let den = rng.gen_range(1..=50);
    let seed = ratio(rng.gen_range(den..=2 * den), den);
    let family = SeriesFamily::seeded(label, multipliers, &seed).expect("positive periods");
    (family, seed, multipliers.to_vec())
}

fn sync_oracles() -> Outcome {
    let cfg = SyncConfig::default();
    let mut rng = gen::rng(3);
    let (mut cases, mut resampled, mut mismatches, mut violations, mut monotone_live) =
        (0, 0, 0, 0, 0);
    while cases < 500 {
        let ks = |n: usize, rng: &mut gen::GenRng| -> Vec<u64> {
            (0..n).map(|_| rng.gen_range(1..=30)).collect()
        };
        let k1 = ks(rng.gen_range(1..=2), &mut rng);
        let k2 = ks(rng.gen_range(1..=2), &mut rng);
        let (f1, s1, _) = random_family(&mut rng, "F1", &k1);
        let (f2, s2, _) = random_family(&mut rng, "F2", &k2);
        // supersets of F1 and F2 so the monotone identity has a live premise
        let extra = ks(rng.gen_range(0..=1), &mut rng);
        let f3 = if extra.is_empty() {
            f1.clone()
        } else {
            f1.union(&SeriesFamily::seeded("X", &extra, &s1).expect("positive"))
        };
        let extra = ks(rng.gen_range(0..=1), &mut rng);
        let f4 = if extra.is_empty() {
            f2.clone()
        } else {
            f2.union(&SeriesFamily::seeded("Y", &extra, &s2).expect("positive"))
        };
        let families = [f1, f2, f3, f4];
        // one census over the common hyperperiod prices every subset
        let oracle = || -> Result<bool, SyncError> {
            let census = epoch_occupancy(&families, &cfg)?;
            let mut equal = true;
            for mask in 1u32..16 {
                let set: Vec<SeriesFamily> = (0..4)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| families[i].clone())
                    .collect();
                equal &= ujr(&set, &cfg)? == census.union_rate(mask);
                if set.len() >= 2 {
                    equal &= ijr(&set, &cfg)? == census.intersection_rate(mask);
                }
            }
            Ok(equal)
        };
        match oracle() {
            Err(SyncError::EnumerationCap { .. }) | Err(SyncError::SubsetCap { .. }) => {
                resampled += 1;
                continue;
            }
            Err(e) => return outcome(false, format!("unexpected error {e}")),
            Ok(equal) => mismatches += usize::from(!equal),
        }
        let report =
            check_cardinality_identities(&families, &Identity::ALL, &cfg).expect("within caps");
        violations += report.violations().count();
        monotone_live += report
            .checks
            .iter()
            .filter(|c| c.identity == Identity::Monotone && c.applicable)
            .count();
        cases += 1;
    }
    outcome(
        mismatches == 0 && violations == 0 && monotone_live == cases,
        format!(
            "{cases} family sets ({resampled} resampled over caps), {mismatches} oracle \
             mismatches, {violations} identity violations"
        ),
    )
}

fn ijr_lemma() -> Outcome {
    let cfg = SyncConfig::default();
    let (mut pairs, mut failures, mut cross_checked) = (0, 0, 0);
    for r in 1..=200i64 {
        for q in 1..r {
            if q.gcd(&r) != 1 {
                continue;
            }
            let step = ratio(q, r);
            // unit fraction 1/a just above q/r, and q/r plus a hair
            let a = (r - 1) / q;
            let deltas = [ratio(1, a), &step + ratio(1, 1000 * r * r)];
            for beta_i in [int(1), ratio(7, 5)] {
                let beta_j = &beta_i * (int(1) + &step);
                let cs = ijr_cross_seed(&beta_i, &beta_j).expect("ordered seeds");
                let irreducible = cs.q == q.into() && cs.r == r.into();
                let below = deltas.iter().all(|d| &step < d && &cs.value < d);
                if r <= 30 {
                    let fams = [
                        SeriesFamily::seeded("i", &[1], &beta_i).unwrap(),
                        SeriesFamily::seeded("j", &[1], &beta_j).unwrap(),
                    ];
                    failures += usize::from(ijr(&fams, &cfg).unwrap() != cs.value);
                    cross_checked += 1;
                }
                failures += usize::from(!(irreducible && below));
                pairs += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!(
            "{pairs} (q, r, seed) cases with r <= 200, {cross_checked} cross-checked by \
             inclusion-exclusion, {failures} failures"
        ),
    )
}

fn same_seed() -> Outcome {
    let cfg = SyncConfig::default();
    let mut rng = gen::rng(5);
    let mut mixed = 0;
    let mut evaluated = 0;
    for case in 0..20 {
        let delta = compute_delta(&select_prime_pairs(rng.gen_range(1..=3)));
        let count = 1 + case % 3;
        let mut stars = BTreeSet::new();
        while stars.len() < count {
            stars.insert(rng.gen_range(2..=40u64));
        }
        let commodities: Vec<Commodity> = stars
            .iter()
            .enumerate()
            .map(|(j, t)| build_constant_commodity(format!("y{}", j + 1), *t, &delta))
            .collect();
        let anchors: BTreeMap<String, Rational> = commodities
            .iter()
            .zip(&stars)
            .map(|(c, t)| (c.id.clone(), int(*t as i64)))
            .collect();
        let instance = Instance::new(commodities, int(1));
        let grid: Vec<Rational> = (0..5).map(|j| int(1) + &delta * ratio(j, 4)).collect();
        let best = seed_grid_minimum(&instance, &anchors, &grid, &cfg).expect("valid grid");
        evaluated += best.evaluated;
        mixed += usize::from(!best.common_seed());
    }
    outcome(
        mixed == 0,
        format!("20 instances, {evaluated} seed assignments, {mixed} with mixed optimal seeds"),
    )
}

fn pot_ratio() -> Outcome {
    let cfg = SolveConfig::default();
    let mut rng = gen::rng(6);
    let mut worst = 0f64;
    let mut worst_case = 0;
    for case in 0..100 {
        let spec = InstanceSpec {
            n: 1 + case % 5,
            ..InstanceSpec::default()
        };
        let instance = gen::random_instance(&mut rng, &spec);
        let bounds = default_bounds(&instance, 4.0, cfg.profile_cap);
        let seeds = Some((ratio(1, 1000), None));
        let best = exhaustive_search(&instance, &bounds, seeds, &cfg).expect("within cap");
        let pot = power_of_two(&instance, &int(1), true, &cfg).expect("positive base");
        let r = to_f64(&pot.cost.total) / to_f64(&best.cost.total);
        if r > worst {
            worst = r;
            worst_case = case;
        }
    }
    outcome(
        worst <= 1.06,
        format!(
            "100 instances, max PoT/exhaustive ratio {worst:.5} (case {worst_case}, bound 1.06)"
        ),
    )
}

fn roundtrip() -> Outcome {
    let cfg = SyncConfig::default();
    let mut corpus = gen::three_variable_corpus(4);
    corpus.push(gen::all_sign_patterns());
    let mut wrong = vec![];
    let mut unsat = 0;
    for (i, f) in corpus.iter().enumerate() {
        let report = verify_roundtrip(f, &ReductionConfig::default(), &cfg).expect("desk scale");
        unsat += usize::from(!report.satisfiable);
        if !report.sync_iff_sat() {
            wrong.push(i);
        }
    }
    outcome(
        wrong.is_empty() && unsat == 1,
        format!(
            "{} formulas ({unsat} unsatisfiable), {} verdict mismatches {:?}",
            corpus.len(),
            wrong.len(),
            wrong
        ),
    )
}

fn gap() -> Outcome {
    let cfg = SyncConfig::default();
    let mut rng = gen::rng(8);
    let mut lines = 0;
    let mut failures = 0;
    let mut tightest = f64::INFINITY;
    for m in 1..=5 {
        let formula = gen::random_formula(&mut rng, 3, m);
        let out = reduce(&formula, &ReductionConfig::default()).expect("valid formula");
        let betas = [int(1), int(1) + &out.delta / int(2), int(1) + &out.delta];
        for beta in betas {
            let g = check_gap_inequality(&out, &beta, &cfg).expect("within caps");
            let ok = g.margin_positive() && g.meets_target() && g.lemma_holds();
            tightest = tightest.min(to_f64(&(&g.margin / &g.target)));
            failures += usize::from(!ok);
            lines += 1;
        }
    }
    outcome(
        failures == 0,
        format!(
            "{lines} (formula, seed) probes at n = 3, {failures} failures, smallest \
             margin/target {tightest:.3e}"
        ),
    )
}

const TOKENS: &[&str] = &[
    "p cnf 3 2",
    "p cnf",
    "p dnf 3 1",
    "0",
    "-0",
    "-7",
    "99",
    "x",
    "%",
    "c ",
    "\n",
    " ",
    "-",
    "18446744073709551616",
    "p cnf 2 1\n1 2 3 0\n",
];

fn mutate(rng: &mut impl Rng, input: &[u8]) -> Vec<u8> {
    let mut out = input.to_vec();
    for _ in 0..rng.gen_range(1..=3) {
        let at = if out.is_empty() {
            0
        } else {
            rng.gen_range(0..out.len())
        };
        match rng.gen_range(0..8) {
            0 if !out.is_empty() => out[at] ^= 1 << rng.gen_range(0..8),
            1 if !out.is_empty() => out[at] = rng.gen(),
            2 if !out.is_empty() => {
                out.remove(at);
            }
            3 => {
                let t = TOKENS[rng.gen_range(0..TOKENS.len())].as_bytes();
                out.splice(at..at, t.iter().copied());
            }
            4 => out.truncate(at),
            _ => {
                let mut lines: Vec<Vec<u8>> =
                    out.split(|b| *b == b'\n').map(<[u8]>::to_vec).collect();
                let i = rng.gen_range(0..lines.len());
                match rng.gen_range(0..3) {
                    0 => lines.insert(i, lines[i].clone()),
                    1 => {
                        lines.remove(i);
                    }
                    _ => {
                        let j = rng.gen_range(0..lines.len());
                        lines.swap(i, j);
                    }
                }
                out = lines.join(&b'\n');
            }
        }
    }
    out
}

fn kind_name(kind: &DimacsErrorKind) -> &'static str {
    match kind {
        DimacsErrorKind::NotUtf8 => "not-utf8",
        DimacsErrorKind::MissingHeader => "missing-header",
        DimacsErrorKind::BadHeader(_) => "bad-header",
        DimacsErrorKind::DuplicateHeader => "duplicate-header",
        DimacsErrorKind::BadToken(_) => "bad-token",
        DimacsErrorKind::LiteralOutOfRange { .. } => "literal-out-of-range",
        DimacsErrorKind::Unterminated => "unterminated",
        DimacsErrorKind::CountMismatch { .. } => "count-mismatch",
    }
}

fn parser_fuzz() -> Outcome {
    let mut rng = gen::rng(9);
    let mut seeds: Vec<Vec<u8>> = (0..20)
        .map(|i| {
            let f = gen::random_formula(&mut rng, 3 + i % 5, 1 + i % 7);
            serialize_dimacs(&f).into_bytes()
        })
        .collect();
    seeds.push(b"c comment\np cnf 4 2\n1 -2\n 3 0\n-4 2 1 0\n%\n0\n".to_vec());
    seeds.push(b"p cnf 3 1\nc inside\n1 2 3 0".to_vec());
    let (mut crashes, mut undiagnosed, mut accepted, mut not_idempotent) = (0, 0, 0, 0);
    let mut kinds = BTreeSet::new();
    for i in 0..10_000 {
        let input = mutate(&mut rng, &seeds[i % seeds.len()]);
        let lines = input.iter().filter(|b| **b == b'\n').count() + 1;
        match catch_unwind(|| parse_dimacs(&input)) {
            Err(_) => crashes += 1,
            Ok(Err(e)) => {
                kinds.insert(kind_name(&e.kind));
                undiagnosed +=
                    usize::from(e.line == 0 || e.line > lines || e.to_string().is_empty());
            }
            Ok(Ok(f)) => {
                accepted += 1;
                let text = serialize_dimacs(&f);
                let again = parse_dimacs(text.as_bytes());
                not_idempotent += usize::from(
                    again.as_ref().ok() != Some(&f)
                        || again.map(|g| serialize_dimacs(&g)).ok().as_deref() != Some(&text),
                );
            }
        }
    }
    let all_kinds = 8;
    outcome(
        crashes == 0 && undiagnosed == 0 && not_idempotent == 0 && kinds.len() == all_kinds,
        format!(
            "10000 mutants: {crashes} crashes, {undiagnosed} errors without a located \
             diagnostic, {}/{all_kinds} error kinds hit, {accepted} accepted, \
             {not_idempotent} not idempotent",
            kinds.len()
        ),
    )
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(
            1,
            "EOQ closed form vs golden section",
            s(5),
            eoq_closed_form,
        ),
        run(2, "theta-pair exact identity", s(1), theta_identity),
        run(
            3,
            "UJR/IJR oracle equivalence and identities",
            s(30),
            sync_oracles,
        ),
        run(4, "cross-seed IJR bound", s(5), ijr_lemma),
        run(5, "same-seed dominance", s(60), same_seed),
        run(6, "power-of-two ratio", s(300), pot_ratio),
        run(7, "roundtrip equivalence", s(300), roundtrip),
        run(8, "gap inequality", s(60), gap),
        run(9, "DIMACS parser robustness", s(60), parser_fuzz),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

//! Where the Constants sit.
//!
//! `Balanced` (the default) gives pair `i` two Constants, `low·m₁` and
//! `high·m₂`, whose moduli satisfy `(high−1)/m₁ − (low−1)/m₂ = gap` and use
//! primes private to that pair. Under that condition a Variable adds the same
//! joint frequency over the Constants whether it sits on `low` or on `high`,
//! so the choice is decided by its standalone cost and by the Clauses alone.
//! `m₂ = ∞` (no second Constant) is allowed when `(high−1)/m₁ = gap`.
//!
//! `PairProducts` is the simpler layout `low_i·low_{i+1}`, `high_i·high_{i+1}`
//! plus a Constant at 1. Its unit Constant synchronizes every Clause for free,
//! so optimal policies no longer track satisfiability; it is kept for
//! comparison only.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::primes::{is_prime, next_twin, prime_factors, select_prime_pairs, PrimePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ConstantsScheme {
    #[default]
    Balanced,
    PairProducts,
}

impl ConstantsScheme {
    pub fn name(self) -> &'static str {
        match self {
            ConstantsScheme::Balanced => "balanced",
            ConstantsScheme::PairProducts => "pair-products",
        }
    }
}

impl fmt::Display for ConstantsScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstantsScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "balanced" => Ok(ConstantsScheme::Balanced),
            "pair-products" => Ok(ConstantsScheme::PairProducts),
            other => Err(format!(
                "unknown constants scheme `{other}` (expected balanced or pair-products)"
            )),
        }
    }
}

/// Prime pairs together with the integer cycle targets of the Constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantsPlan {
    pub pairs: Vec<PrimePair>,
    pub targets: Vec<u64>,
}

impl ConstantsScheme {
    pub fn plan(self, n: usize) -> ConstantsPlan {
        match self {
            ConstantsScheme::Balanced => balanced(n),
            ConstantsScheme::PairProducts => pair_products(n),
        }
    }
}

fn pair_products(n: usize) -> ConstantsPlan {
    let pairs = select_prime_pairs(n);
    let mut targets = vec![1];
    for (i, p) in pairs.iter().enumerate() {
        let next = &pairs[(i + 1) % n];
        targets.push(p.low * next.low);
        targets.push(p.high() * next.high());
    }
    let mut seen = BTreeSet::new();
    targets.retain(|t| seen.insert(*t));
    ConstantsPlan { pairs, targets }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Moduli {
    m1: u64,
    m2: Option<u64>,
    support: Vec<u64>,
}

impl Moduli {
    fn targets(&self, pair: &PrimePair) -> Vec<u64> {
        let mut t = vec![pair.low * self.m1];
        if let Some(m2) = self.m2 {
            t.push(pair.high() * m2);
        }
        t
    }
}

/// Every `(m₁, m₂)` balancing `pair`, smallest moduli first.
fn balancing_moduli(pair: &PrimePair, banned: &BTreeSet<u64>) -> Vec<Moduli> {
    let (low, high, gap) = (pair.low, pair.high(), pair.gap);
    let mut out = vec![];
    for m1 in 2..=(high - 1) / gap {
        // (high−1)/m₁ − gap = (low−1)/m₂, all over m₁
        let num = (high - 1) as i128 - (gap * m1) as i128;
        if num < 0 {
            continue;
        }
        let m2 = if num == 0 {
            None
        } else {
            let top = (low - 1) as i128 * m1 as i128;
            if top % num != 0 || top / num <= 1 {
                continue;
            }
            Some((top / num) as u64)
        };
        let mut support = prime_factors(m1);
        if let Some(m2) = m2 {
            support.extend(prime_factors(m2));
        }
        support.sort_unstable();
        support.dedup();
        if support.iter().any(|p| banned.contains(p)) {
            continue;
        }
        out.push(Moduli { m1, m2, support });
    }
    out.sort_by_key(|m| (m.m1.max(m.m2.unwrap_or(0)), m.m1));
    out
}

fn backtrack(
    pairs: &[PrimePair],
    options: &[Vec<Moduli>],
    used: &mut BTreeSet<u64>,
    chosen: &mut Vec<Moduli>,
) -> bool {
    let i = chosen.len();
    if i == pairs.len() {
        return true;
    }
    for m in &options[i] {
        if m.support.iter().any(|p| used.contains(p)) {
            continue;
        }
        used.extend(m.support.iter().copied());
        chosen.push(m.clone());
        if backtrack(pairs, options, used, chosen) {
            return true;
        }
        chosen.pop();
        for p in &m.support {
            used.remove(p);
        }
    }
    false
}

fn balanced(n: usize) -> ConstantsPlan {
    let pairs = select_prime_pairs(n);
    let banned: BTreeSet<u64> = pairs.iter().flat_map(|p| [p.low, p.high()]).collect();
    let options: Vec<Vec<Moduli>> = pairs.iter().map(|p| balancing_moduli(p, &banned)).collect();
    let mut chosen = vec![];
    if backtrack(&pairs, &options, &mut BTreeSet::new(), &mut chosen) {
        let targets = pairs
            .iter()
            .zip(&chosen)
            .flat_map(|(p, m)| m.targets(p))
            .collect();
        return ConstantsPlan { pairs, targets };
    }
    balanced_greedy(n)
}

/// Fallback when the first `n` twin pairs run out of private moduli: walk
/// the twins upward, skipping any pair that cannot be balanced with primes
/// below its low prime that no earlier pair uses.
fn balanced_greedy(n: usize) -> ConstantsPlan {
    let mut used = BTreeSet::new();
    let mut pairs = vec![];
    let mut targets = vec![];
    let mut p = 11;
    while pairs.len() < n {
        p = next_twin(p);
        let pair = PrimePair {
            index: pairs.len() + 1,
            low: p,
            gap: 2,
        };
        p += 1;
        if used.contains(&pair.low) || used.contains(&pair.high()) {
            continue;
        }
        let mut banned = used.clone();
        banned.extend([pair.low, pair.high()]);
        let pick = balancing_moduli(&pair, &banned)
            .into_iter()
            .find(|m| m.support.iter().all(|q| *q < pair.low));
        if let Some(m) = pick {
            debug_assert!(is_prime(pair.low) && is_prime(pair.high()));
            used.extend([pair.low, pair.high()]);
            used.extend(m.support.iter().copied());
            targets.extend(m.targets(&pair));
            pairs.push(pair);
            p = pair.high() + 1;
        }
    }
    ConstantsPlan { pairs, targets }
}

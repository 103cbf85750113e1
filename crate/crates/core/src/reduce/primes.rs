use serde::{Deserialize, Serialize};

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors in ascending order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The two admissible cycle times `low < high = low + gap` of one Variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePair {
    /// 1-based variable index.
    pub index: usize,
    pub low: u64,
    pub gap: u64,
}

impl PrimePair {
    pub fn high(&self) -> u64 {
        self.low + self.gap
    }

    /// `low` for false, `high` for true.
    pub fn prime_for(&self, value: bool) -> u64 {
        if value {
            self.high()
        } else {
            self.low
        }
    }
}

/// Next twin pair `(p, p + 2)` with `p >= from`.
pub(crate) fn next_twin(from: u64) -> u64 {
    let mut p = from;
    while !(is_prime(p) && is_prime(p + 2)) {
        p += 1;
    }
    p
}

/// Successive twin-prime pairs starting at (11, 13).
pub fn select_prime_pairs(n: usize) -> Vec<PrimePair> {
    let mut pairs = Vec::with_capacity(n);
    let mut p = 11;
    for index in 1..=n {
        p = next_twin(p);
        pairs.push(PrimePair {
            index,
            low: p,
            gap: 2,
        });
        // the next pair must start above this pair's high prime
        p += 3;
    }
    pairs
}

//! Derivative-free reference minimizer used to cross-check closed forms.
//!
//! Golden-section search in exact rationals. Probe points are rounded to a
//! dyadic grid finer than the current bracket so denominators stay bounded;
//! with exact function values there is no `sqrt(ε)` floor on the position
//! accuracy, unlike the `f64` version of the method.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::model::rational::{self, Rational};

fn dyadic(x: &Rational, bits: u64) -> Rational {
    // round(x·2^bits) / 2^bits, reduced by stripping shared factors of two
    let two_num = x.numer() << (bits + 1);
    let m = (two_num + x.denom()).div_floor(&(x.denom() << 1));
    let shift = m.trailing_zeros().unwrap_or(bits).min(bits);
    Rational::new_raw(m >> shift, BigInt::one() << (bits - shift))
}

/// Extra binary digits of probe resolution below the bracket width.
const GUARD_BITS: i64 = 32;

/// Minimizer of a unimodal `f` on `[lo, hi]`, returned once the bracket is
/// narrower than `rel_tol` times its midpoint.
pub fn golden_section<F>(f: F, lo: &Rational, hi: &Rational, rel_tol: f64) -> Rational
where
    F: Fn(&Rational) -> Rational,
{
    assert!(lo < hi, "empty bracket");
    // dyadic constants keep every gcd in the loop a power-of-two gcd
    let inv_phi = dyadic(&rational::approximate((5f64.sqrt() - 1.0) / 2.0, 1e-15), 52);
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let probe = |a: &Rational, b: &Rational, from_left: bool| -> Rational {
        let width = b - a;
        let bits = (GUARD_BITS - rational::to_f64(&width).log2().floor() as i64).max(0) as u64;
        let step = &width * &inv_phi;
        dyadic(&if from_left { a + step } else { b - step }, bits)
    };
    let mut c = probe(&a, &b, false);
    let mut d = probe(&a, &b, true);
    let mut fc = f(&c);
    let mut fd = f(&d);
    for _ in 0..400 {
        // only the stopping rule is approximate
        let (fa, fb) = (rational::to_f64(&a), rational::to_f64(&b));
        if fb - fa <= rel_tol * (fa + fb) / 2.0 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = probe(&a, &b, false);
            fc = f(&c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = probe(&a, &b, true);
            fd = f(&d);
        }
        // rounding can cross the probes over; restore the ordering
        if c > d {
            std::mem::swap(&mut c, &mut d);
            std::mem::swap(&mut fc, &mut fd);
        }
    }
    (a + b) / rational::int(2)
}

/// Brackets the minimizer of a convex `f` on `(0, ∞)` between powers of two
/// by scanning `2^m`, `m ∈ [-range, range]`.
pub fn power_of_two_bracket<F>(f: &F, range: i64) -> (Rational, Rational)
where
    F: Fn(&Rational) -> Rational,
{
    let best = (-range..=range)
        .map(|m| (f(&rational::pow2(m)), m))
        .min()
        .expect("non-empty scan")
        .1;
    (rational::pow2(best - 1), rational::pow2(best + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational::{int, ratio, to_f64};

    #[test]
    fn finds_square_root_minimizers() {
        // K/t + a·t is minimized at sqrt(K/a)
        let f = |t: &Rational| int(26) / t + t;
        let (lo, hi) = power_of_two_bracket(&f, 20);
        let t = to_f64(&golden_section(f, &lo, &hi, 1e-12));
        assert!((t - 26f64.sqrt()).abs() / 26f64.sqrt() < 1e-11);
    }

    #[test]
    fn tiny_and_huge_scales() {
        let f = |t: &Rational| ratio(1, 1 << 20) / t + t * int(1 << 20);
        let (lo, hi) = power_of_two_bracket(&f, 40);
        let t = to_f64(&golden_section(f, &lo, &hi, 1e-10));
        let expected = 2f64.powi(-20);
        assert!((t - expected).abs() / expected < 1e-9);
    }
}

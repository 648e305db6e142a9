//! Small exact-arithmetic helpers shared across modules: p-adic valuations of
//! integers and rationals, modular inverses, Legendre symbols, and primality
//! testing for the (small) primes appearing as U_p indices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Int, Rat};

/// Convenience constructor for a `BigInt` from a machine integer.
pub fn int(n: i64) -> Int {
    BigInt::from(n)
}

/// Convenience constructor for a `BigRational` from a machine integer.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(int(n))
}

/// `n/d` as an exact rational.
pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(int(n), int(d))
}

/// Deterministic trial-division primality test; sufficient for the word-sized
/// primes used as U_p indices and congruence moduli.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation of a nonzero integer.  Panics if `x` is zero (the caller
/// is expected to treat v_p(0) as +∞ separately).
pub fn valuation_int(x: &Int, p: u64) -> u64 {
    assert!(!x.is_zero(), "v_p(0) is +infinity, not an integer");
    let p = int(p as i64);
    let mut v = 0u64;
    let mut x = x.abs();
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        x = q;
    }
}

/// p-adic valuation of a nonzero rational: v_p(num) − v_p(den).
pub fn valuation_rat(x: &Rat, p: u64) -> i64 {
    valuation_int(x.numer(), p) as i64 - valuation_int(x.denom(), p) as i64
}

/// Inverse of `a` modulo `m` (m > 1), or `None` when gcd(a, m) ≠ 1.
pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Canonical residue of the rational `x` in `[0, m)`; `None` when the
/// denominator is not invertible mod `m`.
pub fn residue_mod(x: &Rat, m: &Int) -> Option<Int> {
    let inv = mod_inverse(x.denom(), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

/// Legendre symbol (a/p) for an odd prime p: 0, 1, or −1.
pub fn legendre(a: i64, p: u64) -> i64 {
    assert!(is_prime(p) && p > 2, "Legendre symbol needs an odd prime");
    let m = int(p as i64);
    let a = int(a).mod_floor(&m);
    if a.is_zero() {
        return 0;
    }
    // Euler's criterion: a^((p-1)/2) mod p.
    let r = a.modpow(&int(((p - 1) / 2) as i64), &m);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Exact integer square root: `Some(s)` with s² = n when n is a perfect
/// square, otherwise `None`.
pub fn exact_sqrt(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

/// Exact square root of a nonnegative rational, when both numerator and
/// denominator are perfect squares.
pub fn exact_sqrt_rat(x: &Rat) -> Option<Rat> {
    let n = exact_sqrt(x.numer())?;
    let d = exact_sqrt(x.denom())?;
    Some(BigRational::new(n, d))
}

/// `p^k` as a `BigInt` for word-sized `p`, `k`.
pub fn int_pow(p: u64, k: u32) -> Int {
    int(p as i64).pow(k)
}

/// gcd of two machine integers.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// True when `e` exactly divides `n`, i.e. e | n and gcd(e, n/e) = 1.
pub fn exactly_divides(e: u64, n: u64) -> bool {
    e != 0 && n % e == 0 && gcd_u64(e, n / e) == 1
}

/// The * operation on exact divisors: e₁*e₂ = e₁e₂/gcd(e₁,e₂)².
pub fn star(e1: u64, e2: u64) -> u64 {
    let g = gcd_u64(e1, e2);
    e1 / g * (e2 / g)
}

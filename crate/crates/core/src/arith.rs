//! Integer helpers shared by the enumeration, classifier and continued
//! fraction code. Everything here is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `s` with `s * s <= m`.
pub fn isqrt(m: &BigInt) -> Result<BigInt> {
    if m.is_negative() {
        return Err(Error::NegativeInput(m.clone()));
    }
    Ok(m.sqrt())
}

pub fn is_perfect_square(m: &BigInt) -> bool {
    if m.is_negative() {
        return false;
    }
    let s = m.sqrt();
    &s * &s == *m
}

/// All positive and negative divisors of `m`, sorted ascending.
pub fn divisors_signed(m: &BigInt) -> Result<Vec<BigInt>> {
    if m.is_zero() {
        return Err(Error::ZeroInput);
    }
    let positive = positive_divisors(&m.abs());
    let mut out: Vec<BigInt> = positive.iter().rev().map(|d| -d).collect();
    out.extend(positive);
    Ok(out)
}

/// Positive divisors of `m > 0`, ascending.
pub(crate) fn positive_divisors(m: &BigInt) -> Vec<BigInt> {
    if let Some(small) = m.to_u64() {
        return positive_divisors_u64(small)
            .into_iter()
            .map(BigInt::from)
            .collect();
    }
    let mut divisors = vec![BigInt::one()];
    for (p, e) in factorize(m) {
        let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
        for d in &divisors {
            let mut power = d.clone();
            next.push(power.clone());
            for _ in 0..e {
                power *= &p;
                next.push(power.clone());
            }
        }
        divisors = next;
    }
    divisors.sort();
    divisors
}

fn positive_divisors_u64(m: u64) -> Vec<u64> {
    let mut divisors = vec![1u64];
    for (p, e) in factorize_u64(m) {
        let len = divisors.len();
        let mut power = 1u64;
        for _ in 0..e {
            power *= p;
            for i in 0..len {
                divisors.push(divisors[i] * power);
            }
        }
    }
    divisors.sort_unstable();
    divisors
}

fn factorize_u64(mut m: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    factors
}

/// Prime factorization of `|m|` by trial division, primes ascending.
pub fn factorize(m: &BigInt) -> Vec<(BigInt, u32)> {
    let m = m.abs();
    if let Some(small) = m.to_u64() {
        return factorize_u64(small)
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect();
    }
    let mut rest = m;
    let mut factors = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        if rest.is_multiple_of(&p) {
            let mut e = 0;
            while rest.is_multiple_of(&p) {
                rest /= &p;
                e += 1;
            }
            factors.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        factors.push((rest, 1));
    }
    factors
}

pub fn is_odd_prime(p: &BigInt) -> bool {
    if *p < BigInt::from(3) || p.is_even() {
        return false;
    }
    let f = factorize(p);
    f.len() == 1 && f[0].1 == 1
}

/// Distinct odd primes dividing `n`, ascending.
pub fn odd_prime_divisors(n: &BigInt) -> Vec<BigInt> {
    factorize(n)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| p.is_odd())
        .collect()
}

pub(crate) fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

/// Floor division, rounding toward negative infinity.
pub(crate) fn floor_div(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den)
}

/// Approximates `num / den` as an `f64` without overflowing intermediate
/// conversions.
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let quotient = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let q = quotient.to_f64().unwrap_or(f64::NAN);
    q * (2f64).powi(-shift as i32)
}

//! Binary quadratic forms: class numbers by reduction and continued fractions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::isqrt;

/// Number of primitive reduced positive definite forms of discriminant `d < 0`.
///
/// `d` may be a non-fundamental discriminant; this is then the class number
/// of the order of discriminant `d`.
pub fn definite_class_number(d: i64) -> u64 {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "bad discriminant {d}");
    let n = -d;
    let mut count = 0;
    // reduced: |b| <= a <= c, b >= 0 if |b| = a or a = c; then 3a^2 <= |d|
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

/// Narrow class number of discriminant `d > 0` (non-square) by counting
/// cycles of reduced indefinite forms.
pub fn indefinite_narrow_class_number(d: i64) -> u64 {
    assert!(d > 0 && d.rem_euclid(4) <= 1);
    let s = isqrt(d as u64) as i64;
    assert!(s * s != d, "square discriminant {d}");
    let reduced = |a: i64, b: i64| {
        // 0 < b < sqrt d and sqrt d - b < 2|a| < sqrt d + b
        let aa = 2 * a.abs();
        b > 0 && b * b < d && (aa + b) * (aa + b) > d && (aa - b < 0 || (aa - b) * (aa - b) < d)
    };
    let mut forms = Vec::new();
    let mut b = if d % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let ac = (b * b - d) / 4;
        debug_assert!((b * b - d) % 4 == 0);
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let c = ac / sa;
                if reduced(sa, b) && sa.gcd(&b).gcd(&c) == 1 {
                    forms.push((sa, b, c));
                }
            }
        }
        b += 2;
    }
    forms.sort_unstable();
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0;
    for start in 0..forms.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut cur = forms[start];
        loop {
            let idx = forms.binary_search(&cur).expect("reduction leaves the reduced set");
            if seen[idx] {
                break;
            }
            seen[idx] = true;
            cur = rho(cur, d, s);
        }
    }
    cycles
}

/// One step of the reduction operator on indefinite forms.
fn rho((_, b, c): (i64, i64, i64), d: i64, s: i64) -> (i64, i64, i64) {
    let m = 2 * c.abs();
    // largest b' <= floor(sqrt d) with b' = -b mod 2|c|
    let target = (-b).rem_euclid(m);
    let b2 = s - (s - target).rem_euclid(m);
    let c2 = (b2 * b2 - d) / (4 * c);
    (c, b2, c2)
}

/// Fundamental unit `x + y*omega > 1` of the real quadratic field of
/// discriminant `d`, with `omega = (d mod 2 + sqrt d)/2`, and its norm.
pub fn fundamental_unit(d: i64) -> (BigInt, BigInt, i8) {
    let (t, m) = if d.rem_euclid(4) == 1 { (1i64, (d - 1) / 4) } else { (0, d / 4) };
    let s = isqrt(d as u64) as i64;
    // continued fraction of omega = (P + sqrt d)/Q with P = t, Q = 2
    let (mut pp, mut qq) = (t, 2i64);
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    let norm = |x: &BigInt, y: &BigInt| -> BigInt {
        x * x + BigInt::from(t) * x * y - BigInt::from(m) * y * y
    };
    loop {
        let a = Integer::div_floor(&(pp + s), &qq);
        let h = BigInt::from(a) * &h1 + &h2;
        let k = BigInt::from(a) * &k1 + &k2;
        h2 = std::mem::replace(&mut h1, h.clone());
        k2 = std::mem::replace(&mut k1, k.clone());
        let n = norm(&h, &(-&k));
        if n.abs().is_one() {
            // conjugate of p - q*omega is (p - q t) + q omega
            let x = &h - &k * t;
            let sign = if n.is_positive() { 1 } else { -1 };
            return (x, k, sign);
        }
        pp = a * qq - pp;
        qq = (d - pp * pp) / qq;
    }
}

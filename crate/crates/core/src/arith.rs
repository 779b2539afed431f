//! Integer and rational primitives: factorization, multiplicative
//! functions and the Kronecker symbol.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Builds a rational from machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// An integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInteger {
    pub sign: i8,
    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn value(&self) -> i128 {
        let mut v: i128 = self.sign as i128;
        for &(p, e) in &self.factors {
            v *= (p as i128).pow(e);
        }
        v
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factors `n >= 1` by trial division; `factor(1)` is the empty product.
pub fn factor(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factor expects a positive integer");
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if is_prime(m) {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        match factors.last_mut() {
            Some((q, e)) if *q == m => *e += 1,
            _ => factors.push((m, 1)),
        }
    }
    FactoredInteger { sign: 1, factors }
}

pub fn factor_signed(n: i64) -> FactoredInteger {
    let mut f = factor(n.unsigned_abs());
    f.sign = if n < 0 { -1 } else { 1 };
    f
}

/// Exponent of `p` in `n` (`n != 0`).
pub fn valuation(mut n: i128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = (&n / &p, &n % &p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Kronecker symbol `(a / n)`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (a / n) with n odd and positive.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn sigma1(n: u64) -> u64 {
    factor(n)
        .factors
        .iter()
        .map(|&(p, e)| (p.pow(e + 1) - 1) / (p - 1))
        .product()
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Sorted positive divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor(n).factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for &d in &divs {
            let mut pk = 1;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn isqrt(n: u64) -> u64 {
    num_integer::sqrt(n)
}

/// Squarefree kernel `m` with `n = m * k^2`, sign preserved.
pub fn squarefree_part(n: i64) -> i64 {
    let f = factor_signed(n);
    let mut m: i64 = f.sign as i64;
    for (p, e) in f.factors {
        if e % 2 == 1 {
            m *= p as i64;
        }
    }
    m
}

/// Fundamental discriminant of `Q(sqrt(m))` for squarefree `m != 1`.
pub fn fundamental_discriminant_of(m: i64) -> i64 {
    let m = squarefree_part(m);
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => factor_signed(d).is_squarefree(),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && factor_signed(m).is_squarefree()
        }
        _ => false,
    }
}

/// Integer square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn rational_is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division_oracle(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while n > 1 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        out
    }

    #[test]
    fn factor_examples() {
        assert!(factor(1).factors.is_empty());
        assert_eq!(factor(12).factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factor(849).factors, trial_division_oracle(849));
        assert_eq!(factor(849).factors, vec![(3, 1), (283, 1)]);
        assert_eq!(factor(999_983 * 2).factors, vec![(2, 1), (999_983, 1)]);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(5, 11), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -50i64..50 {
                let r = a.rem_euclid(p as i64) as u64;
                let expected = if r == 0 {
                    0
                } else if pow_mod(r, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p as i64), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn multiplicative_function_examples() {
        assert_eq!(sigma1(1), 1);
        assert_eq!(sigma1(2), 3);
        assert_eq!(sigma1(6), 12);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(4), 2);
        assert_eq!(euler_phi(12), (1..=12).filter(|&k| gcd(k, 12) == 1).count() as u64);
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [5, 8, 12, 13, 849, 853, -4, -3, -8, -20] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [1, 2, 3, 4, 9, 16, 20, 30, 45, 18] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
        assert_eq!(fundamental_discriminant_of(-1), -4);
        assert_eq!(fundamental_discriminant_of(-18), -8);
        assert_eq!(fundamental_discriminant_of(-15), -15);
    }

    proptest! {
        #[test]
        fn factor_round_trips(n in 1u64..1_000_000) {
            let f = factor(n);
            prop_assert_eq!(f.value(), n as i128);
            for (p, e) in &f.factors {
                prop_assert!(is_prime(*p));
                prop_assert!(*e >= 1);
            }
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
        }

        #[test]
        fn multiplicativity(m in 1u64..3000, n in 1u64..3000, a in -200i64..200) {
            if gcd(m, n) == 1 {
                prop_assert_eq!(sigma1(m * n), sigma1(m) * sigma1(n));
                prop_assert_eq!(euler_phi(m * n), euler_phi(m) * euler_phi(n));
            }
            prop_assert_eq!(
                kronecker(a, (m * n) as i64),
                kronecker(a, m as i64) * kronecker(a, n as i64)
            );
        }

        #[test]
        fn rational_addition_is_exact(a in -10_000i64..10_000, b in 1i64..10_000,
                                      c in -10_000i64..10_000, d in 1i64..10_000) {
            let x = ratio(a, b);
            let y = ratio(c, d);
            prop_assert_eq!((&x + &y) - &y, x);
        }
    }
}

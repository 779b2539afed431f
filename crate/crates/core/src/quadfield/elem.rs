//! Exact elements of `Q` or `Q(sqrt(d0))` and small integral elements
//! for residue-ring computations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{rational_is_integer, rational_sqrt, Rational};

/// `a + b*sqrt(d0)` with rational coordinates. For `Q` we use `d0 = 1`
/// and keep `b = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FElem {
    pub a: Rational,
    pub b: Rational,
    pub d0: i64,
}

impl fmt::Debug for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d0)
        }
    }
}

impl FElem {
    pub fn new(a: Rational, b: Rational, d0: i64) -> Self {
        debug_assert!(d0 != 1 || b.is_zero());
        FElem { a, b, d0 }
    }

    pub fn rational(a: Rational, d0: i64) -> Self {
        FElem { a, b: Rational::zero(), d0 }
    }

    pub fn int(n: i64, d0: i64) -> Self {
        Self::rational(Rational::from_integer(n.into()), d0)
    }

    pub fn sqrt_d0(d0: i64) -> Self {
        assert!(d0 != 1);
        FElem { a: Rational::zero(), b: Rational::one(), d0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        FElem { a: self.a.clone(), b: -&self.b, d0: self.d0 }
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(self.d0.into()) * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        if self.d0 == 1 {
            self.a.clone()
        } else {
            &self.a + &self.a
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FElem { a: &self.a * r, b: &self.b * r, d0: self.d0 }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        let c = self.conj();
        FElem { a: c.a / &n, b: c.b / n, d0: self.d0 }
    }

    pub fn div(&self, other: &FElem) -> Self {
        self * &other.inv()
    }

    /// Algebraic integrality in the ring of integers of the field.
    pub fn is_integral(&self) -> bool {
        if self.d0 == 1 {
            return rational_is_integer(&self.a);
        }
        rational_is_integer(&self.trace()) && rational_is_integer(&self.norm())
    }

    /// Coordinates `(x, y)` with `self = (x + y*omega) / den`, `den > 0` minimal,
    /// where `omega = sqrt(d0)` or `(1 + sqrt(d0))/2`.
    pub fn omega_coords(&self) -> (BigInt, BigInt, BigInt) {
        let (x, y) = if self.d0 != 1 && self.d0.rem_euclid(4) == 1 {
            // a + b sqrt = (a - b) + 2b * omega
            (&self.a - &self.b, &self.b + &self.b)
        } else {
            (self.a.clone(), self.b.clone())
        };
        let den = x.denom().lcm(y.denom());
        let xn = x.numer() * (&den / x.denom());
        let yn = y.numer() * (&den / y.denom());
        (xn, yn, den)
    }

    /// Real value under the embedding `sqrt(d0) > 0`.
    pub fn to_f64(&self) -> f64 {
        let a = rat_to_f64(&self.a);
        if self.b.is_zero() {
            return a;
        }
        a + rat_to_f64(&self.b) * (self.d0 as f64).sqrt()
    }

    /// Square root inside the field, if one exists.
    pub fn sqrt(&self) -> Option<FElem> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let d0 = self.d0;
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(FElem::rational(r, d0));
            }
            if d0 == 1 {
                return None;
            }
            // (y sqrt(d0))^2 = d0 y^2
            let y2 = &self.a / Rational::from_integer(d0.into());
            return rational_sqrt(&y2)
                .map(|y| FElem { a: Rational::zero(), b: y, d0 });
        }
        let n = self.norm();
        let s = rational_sqrt(&n)?;
        let two = Rational::from_integer(2.into());
        for cand in [(&self.a + &s) / &two, (&self.a - &s) / &two] {
            if let Some(x) = rational_sqrt(&cand) {
                if x.is_zero() {
                    continue;
                }
                let y = &self.b / (&two * &x);
                let r = FElem { a: x, b: y, d0 };
                if &(&r * &r) == self {
                    return Some(r);
                }
            }
        }
        None
    }

    pub fn is_totally_positive(&self) -> bool {
        if self.b.is_zero() {
            return self.a.is_positive();
        }
        // both a + b r and a - b r positive with r = sqrt(d0)
        self.norm().is_positive() && self.a.is_positive()
    }
}

pub(crate) fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Add for &FElem {
    type Output = FElem;
    fn add(self, o: &FElem) -> FElem {
        debug_assert_eq!(self.d0, o.d0);
        FElem { a: &self.a + &o.a, b: &self.b + &o.b, d0: self.d0 }
    }
}

impl Sub for &FElem {
    type Output = FElem;
    fn sub(self, o: &FElem) -> FElem {
        debug_assert_eq!(self.d0, o.d0);
        FElem { a: &self.a - &o.a, b: &self.b - &o.b, d0: self.d0 }
    }
}

impl Mul for &FElem {
    type Output = FElem;
    fn mul(self, o: &FElem) -> FElem {
        debug_assert_eq!(self.d0, o.d0);
        let d = Rational::from_integer(self.d0.into());
        if self.b.is_zero() && o.b.is_zero() {
            return FElem::rational(&self.a * &o.a, self.d0);
        }
        FElem {
            a: &self.a * &o.a + d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
            d0: self.d0,
        }
    }
}

impl Neg for &FElem {
    type Output = FElem;
    fn neg(self) -> FElem {
        FElem { a: -&self.a, b: -&self.b, d0: self.d0 }
    }
}

/// Multiplication rule `omega^2 = t*omega + m` for the integral basis `{1, omega}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZfRing {
    pub t: i128,
    pub m: i128,
    pub degree: u8,
}

/// Small element `x + y*omega` of the ring of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Zf {
    pub x: i128,
    pub y: i128,
}

impl Zf {
    pub const ZERO: Zf = Zf { x: 0, y: 0 };
    pub const ONE: Zf = Zf { x: 1, y: 0 };

    pub fn int(x: i128) -> Zf {
        Zf { x, y: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }
}

impl ZfRing {
    pub fn for_d0(d0: i64) -> ZfRing {
        if d0 == 1 {
            ZfRing { t: 0, m: 0, degree: 1 }
        } else if d0.rem_euclid(4) == 1 {
            ZfRing { t: 1, m: ((d0 - 1) / 4) as i128, degree: 2 }
        } else {
            ZfRing { t: 0, m: d0 as i128, degree: 2 }
        }
    }

    pub fn add(&self, a: Zf, b: Zf) -> Zf {
        Zf { x: a.x + b.x, y: a.y + b.y }
    }

    pub fn sub(&self, a: Zf, b: Zf) -> Zf {
        Zf { x: a.x - b.x, y: a.y - b.y }
    }

    pub fn mul(&self, a: Zf, b: Zf) -> Zf {
        // (x1 + y1 w)(x2 + y2 w) = x1x2 + m y1y2 + (x1y2 + x2y1 + t y1y2) w
        let yy = a.y * b.y;
        Zf { x: a.x * b.x + self.m * yy, y: a.x * b.y + a.y * b.x + self.t * yy }
    }

    pub fn pow(&self, a: Zf, k: u32) -> Zf {
        (0..k).fold(Zf::ONE, |acc, _| self.mul(acc, a))
    }

    pub fn norm(&self, a: Zf) -> i128 {
        // N(x + y w) = x^2 + t x y - m y^2
        a.x * a.x + self.t * a.x * a.y - self.m * a.y * a.y
    }

    pub fn trace(&self, a: Zf) -> i128 {
        2 * a.x + self.t * a.y
    }

    /// Converts an integral field element with small coordinates.
    pub fn from_felem(&self, e: &FElem) -> Option<Zf> {
        use num_traits::ToPrimitive;
        let (x, y, den) = e.omega_coords();
        if !den.is_one() {
            return None;
        }
        Some(Zf { x: x.to_i128()?, y: y.to_i128()? })
    }

    pub fn to_felem(&self, z: Zf, d0: i64) -> FElem {
        let x = Rational::from_integer(BigInt::from(z.x));
        let y = Rational::from_integer(BigInt::from(z.y));
        if self.degree == 1 {
            return FElem::rational(x, d0);
        }
        if self.t == 1 {
            let half = Rational::new(1.into(), 2.into());
            let yh = &y * &half;
            FElem { a: x + &yh, b: yh, d0 }
        } else {
            FElem { a: x, b: y, d0 }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        crate::arith::ratio(n, d)
    }

    #[test]
    fn sqrt_in_real_quadratic() {
        // 2 * (2 + sqrt 3) = (1 + sqrt 3)^2
        let e = FElem::new(r(4, 1), r(2, 1), 3);
        let s = e.sqrt().expect("square");
        assert_eq!(&s * &s, e);
        assert!(FElem::new(r(2, 1), r(1, 1), 3).sqrt().is_none());
        assert_eq!(FElem::int(5, 5).sqrt(), Some(FElem::sqrt_d0(5)));
        assert!(FElem::int(2, 1).sqrt().is_none());
    }

    #[test]
    fn omega_coordinates() {
        // (1 + sqrt5)/2 = omega
        let e = FElem::new(r(1, 2), r(1, 2), 5);
        let (x, y, d) = e.omega_coords();
        assert_eq!((x, y, d), (0.into(), 1.into(), 1.into()));
        let ring = ZfRing::for_d0(5);
        assert_eq!(ring.to_felem(Zf { x: 0, y: 1 }, 5), e);
        assert!(e.is_integral());
        assert!(!FElem::new(r(1, 2), r(1, 2), 3).is_integral());
    }

    proptest! {
        #[test]
        fn zf_ring_matches_field_arithmetic(x1 in -50i128..50, y1 in -50i128..50,
                                           x2 in -50i128..50, y2 in -50i128..50,
                                           d0 in prop::sample::select(vec![2i64, 3, 5, 13, 6, 21])) {
            let ring = ZfRing::for_d0(d0);
            let a = Zf { x: x1, y: y1 };
            let b = Zf { x: x2, y: y2 };
            let prod = ring.to_felem(ring.mul(a, b), d0);
            let expect = &ring.to_felem(a, d0) * &ring.to_felem(b, d0);
            prop_assert_eq!(prod, expect);
            prop_assert_eq!(Rational::from_integer(ring.norm(a).into()), ring.to_felem(a, d0).norm());
        }
    }
}

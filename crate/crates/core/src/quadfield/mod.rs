//! The totally real base field `F`: `Q` or a real quadratic field, with
//! factored ideals, class number, fundamental unit and `zeta_F(-1)`.

mod elem;
pub mod forms;
mod local;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{self, kronecker, ratio, sigma1, valuation_big, Rational};
use crate::{Error, Result};

pub use elem::{FElem, Zf, ZfRing};
pub use local::LocalRing;

/// A prime ideal of `Z_F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdealData {
    pub p: u64,
    /// Residue degree.
    pub f: u8,
    /// Ramification index.
    pub e: u8,
    /// For split primes, the root `r` of the minimal polynomial of `omega` mod `p`
    /// with `omega = r mod P`.
    pub label: Option<u64>,
}

impl PrimeIdealData {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn is_split(&self) -> bool {
        self.label.is_some()
    }

    pub fn is_ramified(&self) -> bool {
        self.e == 2
    }

    pub fn is_inert(&self) -> bool {
        self.f == 2
    }

    fn sort_key(&self) -> (u64, Option<u64>) {
        (self.norm(), self.label)
    }
}

impl Ord for PrimeIdealData {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for PrimeIdealData {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrimeIdealData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.label, self.f) {
            (Some(r), _) => write!(f, "P{}_{}", self.p, r),
            (None, 2) => write!(f, "({})", self.p),
            (None, _) if self.e == 2 => write!(f, "P{}", self.p),
            _ => write!(f, "{}", self.p),
        }
    }
}

/// An integral ideal of `Z_F` in factored form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealData {
    /// Sorted by `(norm, label)`, exponents at least one.
    pub factors: Vec<(PrimeIdealData, u32)>,
    pub norm: u64,
}

impl IdealData {
    pub fn unit() -> IdealData {
        IdealData { factors: Vec::new(), norm: 1 }
    }

    pub fn from_factors(mut factors: Vec<(PrimeIdealData, u32)>) -> IdealData {
        factors.retain(|&(_, k)| k > 0);
        factors.sort();
        let mut merged: Vec<(PrimeIdealData, u32)> = Vec::with_capacity(factors.len());
        for (p, k) in factors {
            match merged.last_mut() {
                Some((q, j)) if *q == p => *j += k,
                _ => merged.push((p, k)),
            }
        }
        let norm = merged.iter().map(|(p, k)| p.norm().pow(*k)).product();
        IdealData { factors: merged, norm }
    }

    pub fn prime(p: PrimeIdealData) -> IdealData {
        Self::from_factors(vec![(p, 1)])
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, k)| k == 1)
    }

    /// Number of distinct prime divisors.
    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn primes(&self) -> impl Iterator<Item = &PrimeIdealData> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn ord(&self, p: &PrimeIdealData) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map_or(0, |&(_, k)| k)
    }

    pub fn mul(&self, other: &IdealData) -> IdealData {
        let mut f = self.factors.clone();
        f.extend(other.factors.iter().cloned());
        Self::from_factors(f)
    }

    pub fn divides(&self, other: &IdealData) -> bool {
        self.factors.iter().all(|(p, k)| other.ord(p) >= *k)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &IdealData) -> IdealData {
        debug_assert!(other.divides(self));
        let f = self
            .factors
            .iter()
            .map(|(p, k)| (*p, k - other.ord(p)))
            .collect();
        Self::from_factors(f)
    }

    pub fn is_coprime(&self, other: &IdealData) -> bool {
        self.primes().all(|p| other.ord(p) == 0)
    }

    /// All integral divisors, sorted.
    pub fn divisors(&self) -> Vec<IdealData> {
        let mut out = vec![IdealData::unit()];
        for &(p, k) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (k as usize + 1));
            for d in &out {
                for j in 0..=k {
                    let mut f = d.factors.clone();
                    f.push((p, j));
                    next.push(Self::from_factors(f));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// `#(Z_F / a)^*`, defined here for any ideal.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|(p, k)| (p.norm() - 1) * p.norm().pow(k - 1))
            .product()
    }

    /// `N(a) * prod (1 + 1/Np)`.
    pub fn psi(&self) -> u64 {
        self.factors
            .iter()
            .map(|(p, k)| (p.norm() + 1) * p.norm().pow(k - 1))
            .product()
    }
}

impl fmt::Display for IdealData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "(1)");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, k)| if *k == 1 { p.to_string() } else { format!("{p}^{k}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// `Phi(D)` for a squarefree discriminant ideal.
pub fn phi_of(d: &IdealData) -> Result<u64> {
    if !d.is_squarefree() {
        return Err(Error::NotSquarefree(d.to_string()));
    }
    Ok(d.phi())
}

pub fn psi_of(n: &IdealData) -> u64 {
    n.psi()
}

/// The base field with its cached invariants.
#[derive(Clone, Debug)]
pub struct BaseField {
    pub degree: u8,
    /// `1` for `Q`.
    pub d_f: i64,
    /// Squarefree kernel of `d_F`; `1` for `Q`.
    pub d0: i64,
    pub ring: ZfRing,
    pub class_number: u64,
    pub narrow_class_number: u64,
    /// Fundamental unit `x + y*omega`, `> 1` (degree 2 only).
    pub unit: Option<(BigInt, BigInt)>,
    pub unit_norm: i8,
    pub zeta_minus1: Rational,
    pub aprim: Rational,
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.d_f == other.d_f
    }
}

impl Eq for BaseField {}

pub fn make_field(d: i64) -> Result<BaseField> {
    if d < 0 {
        return Err(Error::NotTotallyReal(d));
    }
    if d == 1 {
        let z = ratio(-1, 12);
        return Ok(BaseField {
            degree: 1,
            d_f: 1,
            d0: 1,
            ring: ZfRing::for_d0(1),
            class_number: 1,
            narrow_class_number: 1,
            unit: None,
            unit_norm: -1,
            aprim: aprim_from_zeta(1, &z),
            zeta_minus1: z,
        });
    }
    if !arith::is_fundamental_discriminant(d) {
        return Err(Error::NonFundamentalDiscriminant(d));
    }
    let d0 = if d % 4 == 0 { d / 4 } else { d };
    let narrow = forms::indefinite_narrow_class_number(d);
    let (x, y, n) = forms::fundamental_unit(d);
    let h = if n == 1 { narrow / 2 } else { narrow };
    let z = siegel_zeta_minus1(d);
    Ok(BaseField {
        degree: 2,
        d_f: d,
        d0,
        ring: ZfRing::for_d0(d0),
        class_number: h,
        narrow_class_number: narrow,
        unit: Some((x, y)),
        unit_norm: n,
        aprim: aprim_from_zeta(2, &z),
        zeta_minus1: z,
    })
}

/// `(1/60) * sum_{b = d mod 2, b^2 < d} sigma_1((d - b^2)/4)`.
fn siegel_zeta_minus1(d: i64) -> Rational {
    let mut total: i64 = 0;
    let mut b = -(arith::isqrt(d as u64) as i64);
    while b * b < d {
        if (b - d).rem_euclid(2) == 0 && b * b < d {
            total += sigma1(((d - b * b) / 4) as u64) as i64;
        }
        b += 1;
    }
    ratio(total, 60)
}

fn aprim_from_zeta(n: u8, z: &Rational) -> Rational {
    // (-1)^n 2^(2-n) zeta_F(-1)
    let sign = if n % 2 == 0 { 1 } else { -1 };
    z * ratio(sign * (1 << (2 - n as i64)), 1)
}

pub fn zeta_minus1(f: &BaseField) -> Rational {
    f.zeta_minus1.clone()
}

pub fn aprim(f: &BaseField) -> Rational {
    f.aprim.clone()
}

pub fn class_number(f: &BaseField) -> u64 {
    f.class_number
}

impl BaseField {
    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    /// `Tr(omega)` for the integral basis generator.
    pub fn omega_trace(&self) -> i64 {
        self.ring.t as i64
    }

    pub fn split_prime(&self, p: u64) -> Vec<PrimeIdealData> {
        debug_assert!(arith::is_prime(p));
        if self.degree == 1 {
            return vec![PrimeIdealData { p, f: 1, e: 1, label: None }];
        }
        match kronecker(self.d_f, p as i64) {
            0 => vec![PrimeIdealData { p, f: 1, e: 2, label: None }],
            -1 => vec![PrimeIdealData { p, f: 2, e: 1, label: None }],
            _ => {
                let (t, m) = (self.ring.t, self.ring.m);
                let pi = p as i128;
                let roots: Vec<u64> = (0..pi)
                    .filter(|&x| (x * x - t * x - m).rem_euclid(pi) == 0)
                    .map(|x| x as u64)
                    .collect();
                debug_assert_eq!(roots.len(), 2);
                roots
                    .into_iter()
                    .map(|r| PrimeIdealData { p, f: 1, e: 1, label: Some(r) })
                    .collect()
            }
        }
    }

    /// The nontrivial automorphism applied to a prime (identity over `Q`).
    pub fn conj_prime(&self, p: &PrimeIdealData) -> PrimeIdealData {
        match p.label {
            Some(r) => {
                let t = self.ring.t as u64;
                PrimeIdealData { label: Some((t + p.p - r) % p.p), ..*p }
            }
            None => *p,
        }
    }

    pub fn conj_ideal(&self, a: &IdealData) -> IdealData {
        IdealData::from_factors(a.factors.iter().map(|(p, k)| (self.conj_prime(p), *k)).collect())
    }

    /// All integral ideals of norm exactly `m`.
    pub fn ideals_of_norm(&self, m: u64) -> Vec<IdealData> {
        assert!(m >= 1);
        let mut out = vec![IdealData::unit()];
        for (p, k) in arith::factor(m).factors {
            let primes = self.split_prime(p);
            let mut local: Vec<Vec<(PrimeIdealData, u32)>> = Vec::new();
            match primes.as_slice() {
                [a, b] => {
                    for i in 0..=k {
                        local.push(vec![(*a, i), (*b, k - i)]);
                    }
                }
                [a] if a.f == 2 => {
                    if k % 2 == 1 {
                        return Vec::new();
                    }
                    local.push(vec![(*a, k / 2)]);
                }
                [a] => local.push(vec![(*a, k)]),
                _ => unreachable!(),
            }
            let mut next = Vec::with_capacity(out.len() * local.len());
            for base in &out {
                for l in &local {
                    let mut f = base.factors.clone();
                    f.extend(l.iter().cloned());
                    next.push(IdealData::from_factors(f));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// All ideals of norm at most `bound`, by increasing norm.
    pub fn ideals_up_to(&self, bound: u64) -> Vec<IdealData> {
        (1..=bound).flat_map(|m| self.ideals_of_norm(m)).collect()
    }

    /// Prime ideals of norm at most `bound`, sorted.
    pub fn primes_up_to(&self, bound: u64) -> Vec<PrimeIdealData> {
        let mut out: Vec<PrimeIdealData> = (2..=bound)
            .filter(|&p| arith::is_prime(p))
            .flat_map(|p| self.split_prime(p))
            .filter(|p| p.norm() <= bound)
            .collect();
        out.sort();
        out
    }

    pub fn elem(&self, a: Rational, b: Rational) -> FElem {
        FElem::new(a, b, self.d0)
    }

    pub fn int(&self, n: i64) -> FElem {
        FElem::int(n, self.d0)
    }

    /// `sqrt(d0)` as an element (degree 2 only).
    pub fn sqrt_d0(&self) -> FElem {
        FElem::sqrt_d0(self.d0)
    }

    pub fn unit_elem(&self) -> Option<FElem> {
        self.unit.as_ref().map(|(x, y)| {
            let xr = Rational::from_integer(x.clone());
            let yr = Rational::from_integer(y.clone());
            if self.ring.t == 1 {
                let half = ratio(1, 2);
                FElem::new(xr + &yr * &half, yr * half, self.d0)
            } else {
                FElem::new(xr, yr, self.d0)
            }
        })
    }

    /// `v_P(x)` for nonzero `x`.
    pub fn valuation(&self, p: &PrimeIdealData, x: &FElem) -> i64 {
        assert!(!x.is_zero(), "valuation of zero");
        let (xn, yn, den) = x.omega_coords();
        let vden = valuation_big(&den, p.p) as i64 * p.e as i64;
        self.valuation_int(p, &xn, &yn) - vden
    }

    /// `v_P(x + y*omega)` for integral coordinates, not both zero.
    pub fn valuation_int(&self, p: &PrimeIdealData, x: &BigInt, y: &BigInt) -> i64 {
        let pb = BigInt::from(p.p);
        if y.is_zero() {
            return valuation_big(x, p.p) as i64 * p.e as i64;
        }
        let t = BigInt::from(self.ring.t);
        let m = BigInt::from(self.ring.m);
        let norm = x * x + &t * x * y - &m * y * y;
        if p.e == 2 {
            return valuation_big(&norm, p.p) as i64;
        }
        if p.f == 2 {
            let vx = if x.is_zero() { u32::MAX } else { valuation_big(x, p.p) };
            return vx.min(valuation_big(y, p.p)) as i64;
        }
        // split: x + y*rho mod p^k with rho the p-adic root congruent to the label
        let k = valuation_big(&norm, p.p);
        if k == 0 {
            return 0;
        }
        let pk = num_traits::pow(pb.clone(), k as usize);
        let rho = local::padic_root(self.ring.t, self.ring.m, p.p, p.label.unwrap(), &pk);
        let z = ((x + y * rho) % &pk + &pk) % &pk;
        if z.is_zero() {
            k as i64
        } else {
            valuation_big(&z, p.p) as i64
        }
    }

    pub fn local(&self, p: &PrimeIdealData) -> LocalRing {
        LocalRing::new(self, *p)
    }

    /// Primes of `F` above `p` dividing the principal ideal `(x)`.
    pub fn factor_element(&self, x: &FElem) -> IdealData {
        let n = x.norm();
        let num = n.numer().clone();
        assert!(!num.is_zero() && n.denom().is_one(), "factor_element needs a nonzero integer");
        use num_traits::ToPrimitive;
        let nabs = num.magnitude().to_u64().expect("norm fits in u64");
        let mut f = Vec::new();
        for p in arith::factor(nabs).primes() {
            for pr in self.split_prime(p) {
                let v = self.valuation(&pr, x);
                if v > 0 {
                    f.push((pr, v as u32));
                }
            }
        }
        IdealData::from_factors(f)
    }
}

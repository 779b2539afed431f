//! Residue rings `Z_F / P^r` for small prime powers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{BaseField, PrimeIdealData, Zf, ZfRing};

/// The root of `x^2 - t x - m` modulo `pk` lifting `r` (a simple root mod `p`).
pub(crate) fn padic_root(t: i128, m: i128, p: u64, r: u64, pk: &BigInt) -> BigInt {
    let t = BigInt::from(t);
    let m = BigInt::from(m);
    let mut rho = BigInt::from(r);
    let mut modulus = BigInt::from(p);
    while &modulus < pk {
        modulus = (&modulus * &modulus).min(pk.clone());
        let g = &rho * &rho - &t * &rho - &m;
        let dg = BigInt::from(2) * &rho - &t;
        let inv = mod_inverse(&dg, &modulus);
        rho = (&rho - g * inv).mod_floor(&modulus);
    }
    rho.mod_floor(pk)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.mod_floor(m).extended_gcd(m);
    assert!(g.gcd == BigInt::from(1) || g.gcd == BigInt::from(-1), "not invertible");
    (g.x * g.gcd).mod_floor(m)
}

/// Arithmetic modulo powers of one prime of `Z_F`.
#[derive(Clone, Debug)]
pub struct LocalRing {
    pub prime: PrimeIdealData,
    pub ring: ZfRing,
    /// A uniformizer.
    pub pi: Zf,
    /// Root of the minimal polynomial of `omega` modulo `modulus` (split primes).
    rho: i128,
    modulus: i128,
    precision: u32,
}

impl LocalRing {
    pub fn new(field: &BaseField, prime: PrimeIdealData) -> LocalRing {
        let ring = field.ring;
        let p = prime.p as i128;
        let pi = if prime.e == 2 {
            let c = (0..p)
                .find(|&c| (c * c - ring.t * c - ring.m).rem_euclid(p) == 0)
                .expect("ramified prime has a root");
            Zf { x: -c, y: 1 }
        } else {
            Zf::int(p)
        };
        // largest power of p below 2^60
        let mut precision = 0;
        let mut modulus: i128 = 1;
        while modulus * p < (1i128 << 60) {
            modulus *= p;
            precision += 1;
        }
        let rho = match prime.label {
            Some(r) => padic_root(ring.t, ring.m, prime.p, r, &BigInt::from(modulus))
                .to_i128()
                .unwrap(),
            None => 0,
        };
        LocalRing { prime, ring, pi, rho, modulus, precision }
    }

    pub fn norm(&self) -> u64 {
        self.prime.norm()
    }

    /// Largest valuation `val` can certify.
    pub fn precision(&self) -> u32 {
        self.precision * self.prime.e as u32
    }

    /// `min(v_P(a), cap)`; zero has infinite valuation.
    pub fn val(&self, a: Zf, cap: u32) -> u32 {
        if a.is_zero() {
            return cap;
        }
        let p = self.prime.p as i128;
        let v = if self.ring.degree == 1 {
            vp(a.x, p, cap)
        } else if self.prime.e == 2 {
            vp(self.ring.norm(a), p, cap)
        } else if self.prime.f == 2 {
            vp(a.x, p, cap).min(vp(a.y, p, cap))
        } else {
            assert!(cap <= self.precision, "valuation cap beyond precision");
            let z = (a.x.rem_euclid(self.modulus)
                + a.y.rem_euclid(self.modulus) * self.rho % self.modulus)
                % self.modulus;
            vp(z, p, cap)
        };
        v.min(cap)
    }

    pub fn is_zero_mod(&self, a: Zf, r: u32) -> bool {
        self.val(a, r) >= r
    }

    /// An element congruent to `a` mod `P^r` with coordinates in `[0, p^k)`,
    /// `k = ceil(r/e)`.
    pub fn reduce(&self, a: Zf, r: u32) -> Zf {
        let e = self.prime.e as u32;
        let k = r.div_ceil(e);
        let pk = (self.prime.p as i128).pow(k);
        Zf { x: a.x.rem_euclid(pk), y: a.y.rem_euclid(pk) }
    }

    /// The representative of `a mod P^r` in the form used by `reps`.
    pub fn canon(&self, a: Zf, r: u32) -> Zf {
        let p = self.prime.p as i128;
        if self.ring.degree == 1 {
            return Zf::int(a.x.rem_euclid(p.pow(r)));
        }
        if self.prime.is_split() {
            let m = p.pow(r);
            let rho = self.rho.rem_euclid(m);
            return Zf::int((a.x.rem_euclid(m) + a.y.rem_euclid(m) * rho).rem_euclid(m));
        }
        if self.prime.f == 2 {
            let m = p.pow(r);
            return Zf { x: a.x.rem_euclid(m), y: a.y.rem_euclid(m) };
        }
        // a = X + Y omega = (X + Y c) + Y pi
        let c = -self.pi.x;
        let x = (a.x + a.y * c).rem_euclid(p.pow(r.div_ceil(2)));
        let y = a.y.rem_euclid(p.pow(r / 2));
        self.ring.add(Zf::int(x), self.ring.mul(Zf::int(y), self.pi))
    }

    /// Representatives of the residue field.
    pub fn residue_reps(&self) -> Vec<Zf> {
        let p = self.prime.p as i128;
        if self.prime.f == 2 {
            (0..p).flat_map(|y| (0..p).map(move |x| Zf { x, y })).collect()
        } else {
            (0..p).map(Zf::int).collect()
        }
    }

    /// A complete set of representatives of `Z_F / P^r`.
    pub fn reps(&self, r: u32) -> Vec<Zf> {
        let p = self.prime.p as i128;
        if self.ring.degree == 1 || self.prime.is_split() {
            return (0..p.pow(r)).map(Zf::int).collect();
        }
        if self.prime.f == 2 {
            let pr = p.pow(r);
            return (0..pr).flat_map(|y| (0..pr).map(move |x| Zf { x, y })).collect();
        }
        // ramified: x + y*pi with x mod p^ceil(r/2), y mod p^floor(r/2)
        let px = p.pow(r.div_ceil(2));
        let py = p.pow(r / 2);
        let mut out = Vec::with_capacity((px * py) as usize);
        for y in 0..py {
            for x in 0..px {
                let z = self.ring.add(Zf::int(x), self.ring.mul(Zf::int(y), self.pi));
                out.push(z);
            }
        }
        out
    }

    pub fn pi_pow(&self, j: u32) -> Zf {
        self.ring.pow(self.pi, j)
    }

    /// The `N(P)` lifts of `a mod P^r` to residues mod `P^(r+1)`.
    pub fn lifts(&self, a: Zf, r: u32) -> Vec<Zf> {
        let pij = self.pi_pow(r);
        self.residue_reps()
            .into_iter()
            .map(|c| self.ring.add(a, self.ring.mul(c, pij)))
            .collect()
    }

    /// Quadratic residue symbol of `a` in the residue field (`0` if `P | a`).
    pub fn legendre(&self, a: Zf) -> i8 {
        if self.is_zero_mod(a, 1) {
            return 0;
        }
        let found = self.residue_reps().into_iter().any(|x| {
            let d = self.ring.sub(self.ring.mul(x, x), a);
            self.is_zero_mod(d, 1)
        });
        if found {
            1
        } else {
            -1
        }
    }

    /// `v_P(2)`.
    pub fn v2(&self) -> u32 {
        if self.prime.p != 2 {
            return 0;
        }
        self.val(Zf::int(2), 8)
    }
}

fn vp(mut n: i128, p: i128, cap: u32) -> u32 {
    if n.is_zero() {
        return cap;
    }
    let mut v = 0;
    while v < cap && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;

    fn count_distinct(lr: &LocalRing, reps: &[Zf], r: u32) -> usize {
        let mut distinct = 0;
        for (i, a) in reps.iter().enumerate() {
            if reps[..i].iter().all(|b| !lr.is_zero_mod(lr.ring.sub(*a, *b), r)) {
                distinct += 1;
            }
        }
        distinct
    }

    #[test]
    fn reps_are_complete_and_distinct() {
        for d in [1i64, 5, 8, 12, 13, 17] {
            let f = make_field(d).unwrap();
            for p in [2u64, 3, 5, 7] {
                for pr in f.split_prime(p) {
                    let lr = f.local(&pr);
                    for r in 1..=3u32 {
                        if pr.norm().pow(r) > 400 {
                            continue;
                        }
                        let reps = lr.reps(r);
                        assert_eq!(reps.len() as u64, pr.norm().pow(r));
                        assert_eq!(count_distinct(&lr, &reps, r), reps.len(), "d={d} {pr} r={r}");
                    }
                    assert_eq!(lr.val(lr.pi, 5), 1);
                    assert_eq!(lr.v2(), if p == 2 { pr.e as u32 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn padic_root_is_a_root() {
        // d = 17: omega^2 = omega + 4; 13 and 2 split
        for (p, k) in [(13u64, 6u32), (2, 40)] {
            let pk = BigInt::from(p).pow(k);
            for r in (0..p).filter(|r| (r * r + 4 * p - r - 4) % p == 0) {
                let rho = padic_root(1, 4, p, r, &pk);
                let g = (&rho * &rho - &rho - BigInt::from(4)).mod_floor(&pk);
                assert!(g.is_zero());
                assert_eq!((&rho % BigInt::from(p)).to_u64(), Some(r));
            }
        }
    }
}

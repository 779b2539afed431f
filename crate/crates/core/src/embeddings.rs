//! Local optimal-embedding numbers, elliptic-cycle counts and cusps.

use std::fmt;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::arith::{self, Rational};
use crate::cmorders::{self, CMFieldData, CMOrderData, UnitOverrides};
use crate::quadfield::{BaseField, IdealData, LocalRing, PrimeIdealData, Zf};
use crate::{Error, Result};

/// How a prime of `F` relates to the datum `(D, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Unramified,
    Discriminant,
    Level,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalEmbedCount {
    pub prime: PrimeIdealData,
    pub role: Role,
    pub count: u64,
}

/// The constant in front of the sum over orders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Calibration {
    /// `1 / h(F)`, which reproduces the tables.
    #[default]
    OverH,
    /// `1 / (2 h(F))`, the constant as printed.
    OverTwoH,
}

impl Calibration {
    fn factor(&self, h: u64) -> Rational {
        let den = match self {
            Calibration::OverH => h,
            Calibration::OverTwoH => 2 * h,
        };
        Rational::new(1.into(), den.into())
    }
}

/// `f(x) = x^2 - t x + n` in `Z_F`.
fn eval(lr: &LocalRing, t: Zf, n: Zf, x: Zf) -> Zf {
    let r = lr.ring;
    r.add(r.sub(r.mul(x, x), r.mul(t, x)), n)
}

fn roots_mod(lr: &LocalRing, t: Zf, n: Zf, r: u32) -> Vec<Zf> {
    lr.reps(r).into_iter().filter(|&x| lr.val(eval(lr, t, n, x), r) >= r).collect()
}

/// Exhaustive count of `#E(e) + [v(d) > 0] * #img(E(e+1) -> mod P^e)`,
/// where `E(r)` is the set of roots of `f` mod `P^r`.
pub fn level_count_brute(lr: &LocalRing, t: Zf, n: Zf, e: u32) -> u64 {
    let ee = roots_mod(lr, t, n, e).len() as u64;
    let d = lr.ring.sub(lr.ring.mul(t, t), lr.ring.mul(Zf::int(4), n));
    if lr.val(d, 1) == 0 {
        return ee;
    }
    let img = lr
        .reps(e)
        .into_iter()
        .filter(|&x| lr.lifts(x, e).into_iter().any(|y| lr.val(eval(lr, t, n, y), e + 1) > e))
        .count() as u64;
    ee + img
}

/// Closed form at an odd prime in terms of `k = v(d)`.
pub fn level_count_odd(lr: &LocalRing, t: Zf, n: Zf, e: u32) -> u64 {
    assert!(lr.prime.p != 2, "closed form needs an odd prime");
    let ring = lr.ring;
    let q = lr.norm();
    let d = ring.sub(ring.mul(t, t), ring.mul(Zf::int(4), n));
    let k = lr.val(d, e + 1);
    // (d / pi^k | P) for the unit part of d
    let unit_symbol = |k: u32| -> i64 {
        let pk = lr.pi_pow(k);
        let square = lr.residue_reps().into_iter().any(|y| {
            !lr.is_zero_mod(y, 1) && lr.val(ring.sub(d, ring.mul(pk, ring.mul(y, y))), k + 1) > k
        });
        if square {
            1
        } else {
            -1
        }
    };
    if k == 0 {
        return (1 + lr.legendre(d) as i64) as u64;
    }
    if e < k {
        return q.pow(e / 2) + q.pow((e - 1) / 2);
    }
    if e == k {
        if e % 2 == 1 {
            return q.pow((e - 1) / 2);
        }
        return (q.pow(e / 2) as i64 + (1 + unit_symbol(k)) * q.pow(e / 2 - 1) as i64) as u64;
    }
    if k % 2 == 1 {
        0
    } else {
        ((1 + unit_symbol(k)) as u64) * (q.pow(k / 2) + q.pow(k / 2 - 1))
    }
}

/// Solutions of `f(x) = 0 mod P^r` for `r <= v(2)`, where `x -> x^2 - t x`
/// is additive; found by elimination over `F_2`.
fn linear_roots(lr: &LocalRing, t: Zf, n: Zf, r: u32) -> Vec<Zf> {
    let ring = lr.ring;
    // basis of Z_F / P^r over F_2: omega^a pi^i
    let mut basis = Vec::new();
    for i in 0..r {
        let pi = lr.pi_pow(i);
        basis.push(pi);
        if lr.prime.f == 2 {
            basis.push(ring.mul(Zf { x: 0, y: 1 }, pi));
        }
    }
    let dim = basis.len();
    let combine = |mask: u32| -> Zf {
        (0..dim).filter(|j| (mask >> j) & 1 == 1).fold(Zf::ZERO, |z, j| ring.add(z, basis[j]))
    };
    let to_bits = |a: Zf| -> Vec<u8> {
        let mask = (0..1u32 << dim)
            .find(|&m| lr.is_zero_mod(ring.sub(combine(m), a), r))
            .expect("basis spans the residue ring");
        (0..dim).map(|j| ((mask >> j) & 1) as u8).collect()
    };
    let cols: Vec<Vec<u8>> = basis
        .iter()
        .map(|&b| to_bits(ring.sub(ring.mul(b, b), ring.mul(t, b))))
        .collect();
    let target = to_bits(ring.sub(Zf::ZERO, n));
    // Gaussian elimination on [cols | target]
    let mut rows: Vec<(Vec<u8>, u8)> = (0..dim)
        .map(|i| ((0..dim).map(|j| cols[j][i]).collect(), target[i]))
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(pr) = (row..dim).find(|&i| rows[i].0[col] == 1) else { continue };
        rows.swap(row, pr);
        let (src, val) = rows[row].clone();
        for (i, rw) in rows.iter_mut().enumerate() {
            if i != row && rw.0[col] == 1 {
                for j in 0..dim {
                    rw.0[j] ^= src[j];
                }
                rw.1 ^= val;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|(_, v)| *v == 1) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for mask in 0..(1u32 << free.len()) {
        let mut x = 0u32;
        for (b, &c) in free.iter().enumerate() {
            x |= ((mask >> b) & 1) << c;
        }
        for (i, &pc) in pivots.iter().enumerate() {
            let mut v = rows[i].1;
            for &c in &free {
                v ^= rows[i].0[c] & ((x >> c) & 1) as u8;
            }
            x |= (v as u32) << pc;
        }
        out.push(lr.canon(combine(x), r));
    }
    out
}

/// Roots of `f` mod `P^(r+1)` above the roots mod `P^r`.
fn lift_roots(lr: &LocalRing, t: Zf, n: Zf, roots: &[Zf], r: u32) -> Vec<Zf> {
    let ring = lr.ring;
    let mut out = Vec::new();
    for &x in roots {
        let fx = eval(lr, t, n, x);
        let s = lr.val(ring.sub(ring.add(x, x), t), r + 1);
        if s >= 1 {
            // f(x + c pi^r) = f(x) mod P^(r+1) for every c
            if lr.val(fx, r + 1) > r {
                out.extend(lr.lifts(x, r).into_iter().map(|y| lr.canon(y, r + 1)));
            }
            continue;
        }
        for y in lr.lifts(x, r) {
            if lr.val(eval(lr, t, n, y), r + 1) > r {
                out.push(lr.canon(y, r + 1));
            }
        }
    }
    out
}

/// The count at an even prime: linear algebra up to `v(2)`, then lifting.
pub fn level_count_even(lr: &LocalRing, t: Zf, n: Zf, e: u32) -> u64 {
    let ring = lr.ring;
    let start = lr.v2().min(e);
    let mut level = linear_roots(lr, t, n, start);
    let mut levels = Vec::new();
    for r in start..=e {
        let next = lift_roots(lr, t, n, &level, r);
        levels.push((r, std::mem::replace(&mut level, next)));
    }
    levels.push((e + 1, level));
    let find = |r: u32| &levels.iter().find(|(j, _)| *j == r).unwrap().1;
    let ee = find(e).len() as u64;
    let d = ring.sub(ring.mul(t, t), ring.mul(Zf::int(4), n));
    if lr.val(d, 1) == 0 {
        return ee;
    }
    let mut img: Vec<Zf> = find(e + 1).iter().map(|&x| lr.canon(x, e)).collect();
    img.sort();
    img.dedup();
    ee + img.len() as u64
}

/// `m(R_P, O_P)`.
pub fn local_embed(r: &CMOrderData, p: &PrimeIdealData, role: Role, e: u32) -> Result<LocalEmbedCount> {
    let k = &r.parent;
    let count = match role {
        Role::Unramified => 1,
        Role::Discriminant => {
            if r.conductor.ord(p) > 0 {
                0
            } else {
                (1 - k.splitting(p) as i64) as u64
            }
        }
        Role::Level => {
            if e == 0 {
                return Err(Error::InvalidInput(format!("level prime {p} with exponent 0")));
            }
            let lr = k.field.local(p);
            let precision = e + 2 * lr.v2() + 2;
            let (t, n, _) = r.local_poly(p, precision);
            if p.p == 2 {
                level_count_even(&lr, t, n, e)
            } else {
                level_count_odd(&lr, t, n, e)
            }
        }
    };
    Ok(LocalEmbedCount { prime: *p, role, count })
}

/// Per-field arithmetic needed for signatures: the CM fields and their orders.
#[derive(Clone, Debug)]
pub struct FieldContext {
    pub field: BaseField,
    pub cm: Vec<(Arc<CMFieldData>, Vec<CMOrderData>)>,
    pub calibration: Calibration,
}

impl FieldContext {
    pub fn new(field: BaseField) -> Result<FieldContext> {
        Self::with_options(field, None, Calibration::default())
    }

    pub fn with_options(
        field: BaseField,
        overrides: Option<&UnitOverrides>,
        calibration: Calibration,
    ) -> Result<FieldContext> {
        let mut cm = Vec::new();
        for q in cmorders::admissible_q(&field) {
            let k = Arc::new(cmorders::cm_field(&field, q)?);
            let orders = cmorders::order_lattice(&k, overrides)?;
            cm.push((k, orders));
        }
        Ok(FieldContext { field, cm, calibration })
    }

    pub fn admissible_q(&self) -> Vec<u32> {
        self.cm.iter().map(|(k, _)| k.q).collect()
    }

    pub fn cm_for(&self, q: u32) -> Option<&(Arc<CMFieldData>, Vec<CMOrderData>)> {
        self.cm.iter().find(|(k, _)| k.q == q)
    }
}

/// One order's contribution to `e_q`.
#[derive(Clone, Debug)]
pub struct OrderTerm {
    pub order: String,
    pub h: u64,
    pub q_r: u8,
    pub locals: Vec<LocalEmbedCount>,
    pub product: u64,
}

#[derive(Clone, Debug)]
pub struct EllipticBreakdown {
    pub q: u32,
    pub value: u64,
    pub terms: Vec<OrderTerm>,
}

impl fmt::Display for EllipticBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "e_{} = {}", self.q, self.value)?;
        for t in &self.terms {
            let locals: Vec<String> = t
                .locals
                .iter()
                .map(|l| format!("m({}, {:?}) = {}", l.prime, l.role, l.count))
                .collect();
            writeln!(f, "  {} h(R)={} Q(R)={} prod={} [{}]", t.order, t.h, t.q_r, t.product, locals.join(", "))?;
        }
        Ok(())
    }
}

/// `e_q` with every intermediate.
pub fn elliptic_breakdown(ctx: &FieldContext, q: u32, disc: &IdealData, level: &IdealData) -> Result<EllipticBreakdown> {
    let (value, terms) = elliptic_terms(ctx, q, disc, level)?;
    if !value.is_integer() {
        return Err(Error::NonIntegralCount { q, value: value.to_string() });
    }
    Ok(EllipticBreakdown { q, value: value.to_integer().to_u64().unwrap(), terms })
}

/// The calibrated sum for `e_q` without the integrality check, so it also
/// makes sense for ideal pairs that are not valid discriminant/level data.
pub fn elliptic_rational(ctx: &FieldContext, q: u32, disc: &IdealData, level: &IdealData) -> Result<Rational> {
    elliptic_terms(ctx, q, disc, level).map(|(v, _)| v)
}

fn elliptic_terms(ctx: &FieldContext, q: u32, disc: &IdealData, level: &IdealData) -> Result<(Rational, Vec<OrderTerm>)> {
    let (_, orders) = ctx
        .cm_for(q)
        .ok_or(Error::NotAdmissible { d_f: ctx.field.d_f, q })?;
    let mut total = Rational::zero();
    let mut terms = Vec::new();
    for r in orders {
        let mut locals = Vec::new();
        let mut product: u64 = 1;
        for p in disc.primes() {
            let m = local_embed(r, p, Role::Discriminant, 0)?;
            product *= m.count;
            locals.push(m);
        }
        for &(p, e) in &level.factors {
            if product == 0 {
                break;
            }
            let m = local_embed(r, &p, Role::Level, e)?;
            product *= m.count;
            locals.push(m);
        }
        total += Rational::new((r.h * product).into(), (r.q_r as u64).into());
        terms.push(OrderTerm { order: r.to_string(), h: r.h, q_r: r.q_r, locals, product });
    }
    Ok((total * ctx.calibration.factor(ctx.field.class_number), terms))
}

pub fn elliptic_count(ctx: &FieldContext, q: u32, disc: &IdealData, level: &IdealData) -> Result<u64> {
    elliptic_breakdown(ctx, q, disc, level).map(|b| b.value)
}

/// Cusps of `X_0(N)`.
pub fn cusp_count(n: u64) -> u64 {
    arith::divisors(n)
        .into_iter()
        .map(|d| arith::euler_phi(arith::gcd(d, n / d)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;

    fn ctx(d: i64) -> FieldContext {
        FieldContext::new(make_field(d).unwrap()).unwrap()
    }

    fn ideal(f: &BaseField, norm: u64) -> IdealData {
        f.ideals_of_norm(norm)[0].clone()
    }

    #[test]
    fn local_embed_examples() {
        let c = ctx(1);
        let zi = &c.cm_for(2).unwrap().1[0];
        let p3 = c.field.split_prime(3)[0];
        assert_eq!(local_embed(zi, &p3, Role::Discriminant, 0).unwrap().count, 2);
        let p2 = c.field.split_prime(2)[0];
        assert_eq!(local_embed(zi, &p2, Role::Level, 2).unwrap().count, 0);
        let c5 = ctx(5);
        let zi5 = &c5.cm_for(2).unwrap().1[0];
        let three = c5.field.split_prime(3)[0];
        assert_eq!(local_embed(zi5, &three, Role::Level, 1).unwrap().count, 2);
        assert_eq!(local_embed(zi5, &three, Role::Unramified, 0).unwrap().count, 1);
    }

    #[test]
    fn elliptic_count_examples() {
        let c = ctx(1);
        let f = &c.field;
        let one = IdealData::unit();
        assert_eq!(elliptic_count(&c, 2, &ideal(f, 6), &one).unwrap(), 2);
        assert_eq!(elliptic_count(&c, 2, &ideal(f, 6), &ideal(f, 5)).unwrap(), 4);
        assert_eq!(elliptic_count(&c, 3, &ideal(f, 26), &one).unwrap(), 0);
        let c8 = ctx(8);
        let p2 = ideal(&c8.field, 2);
        assert_eq!(elliptic_count(&c8, 4, &p2, &one).unwrap(), 1);
    }

    #[test]
    fn calibration_toggle_halves() {
        let f = make_field(1).unwrap();
        let c = FieldContext::with_options(f.clone(), None, Calibration::OverTwoH).unwrap();
        let six = ideal(&f, 6);
        assert_eq!(elliptic_count(&c, 2, &six, &IdealData::unit()).unwrap(), 1);
    }

    #[test]
    fn cusp_examples() {
        assert_eq!(cusp_count(1), 1);
        assert_eq!(cusp_count(4), 3);
        assert_eq!(cusp_count(12), 6);
        assert_eq!(cusp_count(50), 12);
    }

    /// Classical counts for X_0(N): e_2 = prod (1 + (-4/p)) unless 4 | N, similarly for e_3.
    #[test]
    fn classical_modular_curves() {
        let c = ctx(1);
        let one = IdealData::unit();
        for n in 1..=200u64 {
            let level = ideal(&c.field, n);
            let e2 = elliptic_count(&c, 2, &one, &level).unwrap();
            let e3 = elliptic_count(&c, 3, &one, &level).unwrap();
            let fac = arith::factor(n).factors;
            let e2_classical: i64 = if n % 4 == 0 {
                0
            } else {
                fac.iter().map(|&(p, _)| 1 + arith::kronecker(-4, p as i64) as i64).product()
            };
            let e3_classical: i64 = if n % 9 == 0 {
                0
            } else {
                fac.iter().map(|&(p, _)| 1 + arith::kronecker(-3, p as i64) as i64).product()
            };
            assert_eq!(e2 as i64, e2_classical, "N = {n}");
            assert_eq!(e3 as i64, e3_classical, "N = {n}");
        }
    }

    #[test]
    fn odd_closed_form_matches_brute_force_over_q() {
        let f = make_field(1).unwrap();
        for p in [3u64, 5, 7, 11, 13, 17, 19] {
            let lr = f.local(&f.split_prime(p)[0]);
            let mut e = 1;
            while p.pow(e) <= 343 {
                let m = p.pow(e) as i128;
                for t in 0..m.min(60) {
                    for n in 0..m.min(60) {
                        let (t, n) = (Zf::int(t), Zf::int(n));
                        assert_eq!(
                            level_count_odd(&lr, t, n, e),
                            level_count_brute(&lr, t, n, e),
                            "p={p} e={e} t={t:?} n={n:?}"
                        );
                    }
                }
                e += 1;
            }
        }
    }

    #[test]
    fn even_procedure_matches_brute_force() {
        for d in [1i64, 5, 8, 12, 17] {
            let f = make_field(d).unwrap();
            for pr in f.split_prime(2) {
                let lr = f.local(&pr);
                let mut e = 1;
                while pr.norm().pow(e) <= 64 {
                    let reps = lr.reps(e + 2);
                    for &t in reps.iter().take(24) {
                        for &n in reps.iter().take(24) {
                            assert_eq!(
                                level_count_even(&lr, t, n, e),
                                level_count_brute(&lr, t, n, e),
                                "d={d} e={e} t={t:?} n={n:?}"
                            );
                        }
                    }
                    e += 1;
                }
            }
        }
    }
}

//! CM extensions `K_q = F(zeta_2q)` and their quadratic `Z_F`-orders.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};

use crate::arith::{self, ratio, Rational};
use crate::quadfield::forms::definite_class_number;
use crate::quadfield::{BaseField, FElem, IdealData, LocalRing, PrimeIdealData, Zf};
use crate::{Error, Result};

/// Element `u + v*sqrt(delta)` of `K = F(sqrt(delta))`.
#[derive(Clone, PartialEq, Eq)]
pub struct KElem {
    pub u: FElem,
    pub v: FElem,
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] + [{:?}]*sqrt(delta)", self.u, self.v)
    }
}

/// All `q >= 2` with `[F(zeta_2q) : F] = 2`.
pub fn admissible_q(field: &BaseField) -> Vec<u32> {
    let mut out = vec![2, 3];
    if field.degree == 2 {
        match field.d0 {
            2 => out.push(4),
            5 => out.push(5),
            3 => out.push(6),
            _ => {}
        }
    }
    out
}

/// `2 cos(2 pi / w)` when it lies in `F`.
fn cyclotomic_trace(field: &BaseField, w: u32) -> Option<FElem> {
    let d0 = field.d0;
    match w {
        4 => Some(field.int(0)),
        6 => Some(field.int(1)),
        8 if field.degree == 2 && d0 == 2 => Some(field.sqrt_d0()),
        10 if field.degree == 2 && d0 == 5 => Some(field.elem(ratio(1, 2), ratio(1, 2))),
        12 if field.degree == 2 && d0 == 3 => Some(field.sqrt_d0()),
        _ => None,
    }
}

/// The field `K_q` with its invariants.
#[derive(Clone, Debug)]
pub struct CMFieldData {
    pub field: BaseField,
    pub q: u32,
    /// Trace of `zeta_2q` over `F`.
    pub trace: FElem,
    /// `trace^2 - 4`, so that `K = F(sqrt(delta))`.
    pub delta: FElem,
    pub zeta: KElem,
    pub rel_disc: IdealData,
    /// Conductor of `Z_F[zeta_2q]` in `Z_K`.
    pub conductor: IdealData,
    pub w_k: u32,
    /// Primitive `w`-th roots of unity in `K`, by `w`.
    pub roots: Vec<(u32, KElem)>,
    /// Hasse unit index `[Z_K^* : mu_K Z_F^*]`.
    pub hasse_index: u8,
    /// A unit `u` with `u^2 = zeta * eps` when the Hasse index is 2.
    pub half_unit: Option<KElem>,
    pub h_k: u64,
    pub abs_degree: u8,
    pub abs_disc: i128,
    /// Local generators `alpha` of `Z_K` over `Z_F` at primes dividing the conductor,
    /// with the local conductor exponent.
    pub local_gens: Vec<(PrimeIdealData, KElem, u32)>,
}

impl CMFieldData {
    pub fn d_f(&self) -> i64 {
        self.field.d_f
    }

    pub fn k_add(&self, a: &KElem, b: &KElem) -> KElem {
        KElem { u: &a.u + &b.u, v: &a.v + &b.v }
    }

    pub fn k_mul(&self, a: &KElem, b: &KElem) -> KElem {
        KElem {
            u: &(&a.u * &b.u) + &(&(&a.v * &b.v) * &self.delta),
            v: &(&a.u * &b.v) + &(&a.v * &b.u),
        }
    }

    pub fn k_from_f(&self, a: &FElem) -> KElem {
        KElem { u: a.clone(), v: self.field.int(0) }
    }

    pub fn rel_trace(&self, a: &KElem) -> FElem {
        &a.u + &a.u
    }

    pub fn rel_norm(&self, a: &KElem) -> FElem {
        &(&a.u * &a.u) - &(&(&a.v * &a.v) * &self.delta)
    }

    pub fn is_integral(&self, a: &KElem) -> bool {
        self.rel_trace(a).is_integral() && self.rel_norm(a).is_integral()
    }

    /// Square root in `K`, if any.
    pub fn k_sqrt(&self, z: &KElem) -> Option<KElem> {
        let zero = self.field.int(0);
        if z.v.is_zero() {
            if let Some(a) = z.u.sqrt() {
                return Some(KElem { u: a, v: zero });
            }
            return z.u.div(&self.delta).sqrt().map(|b| KElem { u: zero, v: b });
        }
        let nu = self.rel_norm(z).sqrt()?;
        let half = ratio(1, 2);
        for cand in [(&z.u + &nu).scale(&half), (&z.u - &nu).scale(&half)] {
            if cand.is_zero() {
                continue;
            }
            if let Some(a) = cand.sqrt() {
                let b = z.v.div(&(&a + &a));
                let r = KElem { u: a, v: b };
                if &self.k_mul(&r, &r) == z {
                    return Some(r);
                }
            }
        }
        None
    }

    fn local_gen(&self, p: &PrimeIdealData) -> Option<&(PrimeIdealData, KElem, u32)> {
        self.local_gens.iter().find(|(q, _, _)| q == p)
    }

    /// Whether `z` lies in `Z_F + f Z_K`.
    pub fn in_order(&self, z: &KElem, conductor: &IdealData) -> bool {
        if !self.is_integral(z) {
            return false;
        }
        for &(p, c) in &conductor.factors {
            let (_, alpha, _) = self.local_gen(&p).expect("conductor divides the conductor of Z_F[zeta]");
            // z = a + b*alpha with b = v / v_alpha
            let b = z.v.div(&alpha.v);
            if !b.is_zero() && self.field.valuation(&p, &b) < c as i64 {
                return false;
            }
        }
        true
    }

    /// Number of roots of unity in the order of the given conductor.
    pub fn torsion_in_order(&self, conductor: &IdealData) -> u32 {
        let mut w = 2;
        for (wr, z) in &self.roots {
            if self.in_order(z, conductor) {
                w = num_integer::lcm(w, *wr);
            }
        }
        w
    }

    /// Trace and norm of a local generator of `Z_K` at `p`.
    fn local_generator_poly(&self, p: &PrimeIdealData) -> (FElem, FElem, u32) {
        match self.local_gen(p) {
            Some((_, alpha, c0)) => (self.rel_trace(alpha), self.rel_norm(alpha), *c0),
            None => (self.trace.clone(), self.field.int(1), 0),
        }
    }

    /// The symbol `(K/p)`.
    pub fn splitting(&self, p: &PrimeIdealData) -> i8 {
        if self.rel_disc.ord(p) > 0 {
            return 0;
        }
        let (t, n, _) = self.local_generator_poly(p);
        let lr = self.field.local(p);
        let ring = self.field.ring;
        let t = ring.from_felem(&t).expect("integral trace");
        let n = ring.from_felem(&n).expect("integral norm");
        let roots = lr
            .residue_reps()
            .into_iter()
            .filter(|&x| {
                let fx = ring.add(ring.sub(ring.mul(x, x), ring.mul(t, x)), n);
                lr.is_zero_mod(fx, 1)
            })
            .count();
        match roots {
            0 => -1,
            2 => 1,
            _ => panic!("unramified prime {p} with a repeated root"),
        }
    }
}

pub fn splitting_in_cm(k: &CMFieldData, p: &PrimeIdealData) -> i8 {
    k.splitting(p)
}

pub fn cm_field(field: &BaseField, q: u32) -> Result<CMFieldData> {
    if !admissible_q(field).contains(&q) {
        return Err(Error::NotAdmissible { d_f: field.d_f, q });
    }
    let trace = cyclotomic_trace(field, 2 * q).expect("admissible");
    let delta = &(&trace * &trace) - &field.int(4);
    let half = ratio(1, 2);
    let zeta = KElem { u: trace.scale(&half), v: field.int(1).scale(&half) };
    let mut k = CMFieldData {
        field: field.clone(),
        q,
        trace,
        delta,
        zeta,
        rel_disc: IdealData::unit(),
        conductor: IdealData::unit(),
        w_k: 2,
        roots: Vec::new(),
        hasse_index: 1,
        half_unit: None,
        h_k: 1,
        abs_degree: 2 * field.degree,
        abs_disc: 0,
        local_gens: Vec::new(),
    };
    local_conductors(&mut k);
    roots_of_unity(&mut k);
    unit_structure(&mut k);
    k.h_k = class_number_cm(&k);
    let nd = k.rel_disc.norm as i128;
    k.abs_disc = if field.degree == 1 { -nd } else { (field.d_f as i128).pow(2) * nd };
    Ok(k)
}

/// Decomposes `Z_F[zeta]` locally at the primes dividing `delta`.
fn local_conductors(k: &mut CMFieldData) {
    let field = &k.field;
    let ring = field.ring;
    let disc = field.factor_element(&k.delta);
    let t = ring.from_felem(&k.trace).unwrap();
    let mut rel = Vec::new();
    let mut cond = Vec::new();
    let mut gens = Vec::new();
    for &(p, v) in &disc.factors {
        let lr = field.local(&p);
        let mut c0 = 0;
        // (zeta - x)/pi^j integral for some x iff v(t - 2x) >= j and v(x^2 - t x + 1) >= 2j
        for j in 1..=v / 2 {
            let ok = lr.reps(2 * j).into_iter().any(|x| {
                let tr = ring.sub(t, ring.add(x, x));
                let g = ring.add(ring.sub(ring.mul(x, x), ring.mul(t, x)), Zf::ONE);
                lr.val(tr, j) >= j && lr.val(g, 2 * j) >= 2 * j
            });
            if ok {
                c0 = j;
            } else {
                break;
            }
        }
        if v > 2 * c0 {
            rel.push((p, v - 2 * c0));
        }
        if c0 > 0 {
            cond.push((p, c0));
            gens.push((p, find_local_generator(k, &lr, c0), c0));
        }
    }
    k.rel_disc = IdealData::from_factors(rel);
    k.conductor = IdealData::from_factors(cond);
    k.local_gens = gens;
}

/// An integral `alpha = (x + y zeta)/N` with `v_p(y/N) = -c0`.
fn find_local_generator(k: &CMFieldData, lr: &LocalRing, c0: u32) -> KElem {
    let p = lr.prime;
    let e = p.e as u32;
    let kk = c0.div_ceil(e);
    let n = (p.p as i128).pow(kk);
    let target = kk * e - c0;
    let ring = k.field.ring;
    let coords: Vec<Zf> = if ring.degree == 1 {
        (0..n).map(Zf::int).collect()
    } else {
        (0..n).flat_map(|y| (0..n).map(move |x| Zf { x, y })).collect()
    };
    let inv_n = Rational::new(1.into(), n.into());
    for &y in &coords {
        if y.is_zero() || lr.val(y, target + 1) != target {
            continue;
        }
        let yk = k.k_from_f(&ring.to_felem(y, k.field.d0));
        let yz = k.k_mul(&yk, &k.zeta);
        for &x in &coords {
            let xk = k.k_from_f(&ring.to_felem(x, k.field.d0));
            let s = k.k_add(&xk, &yz);
            let alpha = KElem { u: s.u.scale(&inv_n), v: s.v.scale(&inv_n) };
            if k.is_integral(&alpha) {
                return alpha;
            }
        }
    }
    panic!("no local generator at {p}");
}

fn roots_of_unity(k: &mut CMFieldData) {
    let mut roots = Vec::new();
    let half = ratio(1, 2);
    for w in [4u32, 6, 8, 10, 12] {
        let Some(c) = cyclotomic_trace(&k.field, w) else { continue };
        let s2 = (&(&c * &c) - &k.field.int(4)).div(&k.delta);
        if let Some(s) = s2.sqrt() {
            roots.push((w, KElem { u: c.scale(&half), v: s.scale(&half) }));
        }
    }
    k.w_k = roots.iter().fold(2, |acc, (w, _)| num_integer::lcm(acc, *w));
    k.roots = roots;
}

fn k_pow(k: &CMFieldData, a: &KElem, e: u32) -> KElem {
    let mut r = k.k_from_f(&k.field.int(1));
    for _ in 0..e {
        r = k.k_mul(&r, a);
    }
    r
}

/// Primitive `w_K`-th root of unity.
fn generator_root(k: &CMFieldData) -> KElem {
    let (_, z) = k.roots.iter().find(|(w, _)| *w == k.w_k).expect("w_K is attained");
    z.clone()
}

fn unit_structure(k: &mut CMFieldData) {
    let Some(eps) = k.field.unit_elem() else { return };
    if k.field.unit_norm != 1 {
        return;
    }
    let z = generator_root(k);
    let eps_k = k.k_from_f(&eps);
    for j in 0..2 {
        let cand = k.k_mul(&k_pow(k, &z, j), &eps_k);
        if let Some(u) = k.k_sqrt(&cand) {
            k.hasse_index = 2;
            k.half_unit = Some(u);
            return;
        }
    }
}

/// Class number of `K_q`.
///
/// For `F = Q` this counts reduced forms. For quartic `K` the field is either
/// `Q(zeta_5)` or biquadratic over `Q`; in the latter case Kuroda's formula
/// `h(K) = Q_K h(F) h(k1) h(k2) / 2` is used, with `Q(i, sqrt 2)` as the
/// one exception where the factor `1/2` is absent.
pub fn class_number_cm(k: &CMFieldData) -> u64 {
    let field = &k.field;
    if field.degree == 1 {
        let d = if k.q == 2 { -4 } else { -3 };
        return definite_class_number(d);
    }
    if !k.delta.is_rational() {
        // Q(zeta_5): Minkowski bound below 2
        return 1;
    }
    let delta = k.delta.a.to_integer().to_i64().expect("small delta");
    let d1 = arith::fundamental_discriminant_of(delta);
    let d2 = arith::fundamental_discriminant_of(delta * field.d0);
    let prod = k.hasse_index as u64
        * field.class_number
        * definite_class_number(d1)
        * definite_class_number(d2);
    let exceptional = field.d0 == 2 && (d1 == -4 || d2 == -4);
    if exceptional {
        prod
    } else {
        assert!(prod % 2 == 0, "Kuroda formula gave an odd numerator");
        prod / 2
    }
}

/// A quadratic `Z_F`-order `Z_F + f Z_K` in `K_q`.
#[derive(Clone, Debug)]
pub struct CMOrderData {
    pub parent: Arc<CMFieldData>,
    pub conductor: IdealData,
    pub w: u32,
    pub h: u64,
    /// `[N(R^*) : Z_F^{*2}]`.
    pub q_r: u8,
    /// `[Z_K^* : R^*]`.
    pub unit_index: u64,
}

impl CMOrderData {
    pub fn q(&self) -> u32 {
        self.parent.q
    }

    /// Trace, norm and discriminant of a local generator at `p`, reduced mod `p^r`.
    pub fn local_poly(&self, p: &PrimeIdealData, r: u32) -> (Zf, Zf, Zf) {
        let k = &self.parent;
        let ring = k.field.ring;
        let lr = k.field.local(p);
        let (t, n, _) = k.local_generator_poly(p);
        let mut t = ring.from_felem(&t).expect("integral");
        let mut n = ring.from_felem(&n).expect("integral");
        let c = self.conductor.ord(p);
        if c > 0 {
            let pc = lr.pi_pow(c);
            t = ring.mul(t, pc);
            n = ring.mul(n, ring.mul(pc, pc));
        }
        let d = ring.sub(ring.mul(t, t), ring.mul(Zf::int(4), n));
        (lr.reduce(t, r), lr.reduce(n, r), lr.reduce(d, r))
    }
}

pub fn local_poly(r: &CMOrderData, p: &PrimeIdealData, precision: u32) -> (Zf, Zf, Zf) {
    r.local_poly(p, precision)
}

/// Pinned unit indices, keyed by `(d_F, q, N(f), label of f)`.
#[derive(Clone, Debug, Default)]
pub struct UnitOverrides {
    entries: HashMap<(i64, u32, u64, String), (u8, u64)>,
}

impl UnitOverrides {
    pub fn parse(text: &str) -> Result<UnitOverrides> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |msg: &str| Error::ParseError { line: i + 1, msg: msg.to_string() };
            if cols.len() != 6 {
                return Err(bad("expected 6 comma-separated fields"));
            }
            let num = |s: &str| s.parse::<i64>().map_err(|_| bad("bad integer"));
            let key = (num(cols[0])?, num(cols[1])? as u32, num(cols[2])? as u64, cols[3].to_string());
            let q = num(cols[4])?;
            if q != 1 && q != 2 {
                return Err(bad("Q must be 1 or 2"));
            }
            entries.insert(key, (q as u8, num(cols[5])? as u64));
        }
        Ok(UnitOverrides { entries })
    }

    pub fn load(path: &Path) -> Result<UnitOverrides> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        Self::parse(&text)
    }

    fn get(&self, d_f: i64, q: u32, f: &IdealData) -> Option<(u8, u64)> {
        self.entries.get(&(d_f, q, f.norm, f.to_string())).copied()
    }
}

/// `h(K)/[Z_K^*:R^*] * N(f) * prod_{p | f} (1 - (K/p)/Np)`, which must be an integer.
pub fn suborder_class_number(k: &CMFieldData, conductor: &IdealData, unit_index: u64) -> Result<Rational> {
    let mut h = Rational::from_integer(k.h_k.into()) / Rational::from_integer(unit_index.into());
    h *= Rational::from_integer(conductor.norm.into());
    for p in conductor.primes() {
        let np = p.norm() as i64;
        h *= ratio(np - k.splitting(p) as i64, np);
    }
    Ok(h)
}

/// `(Q(R), [Z_K^*:R^*])` from the unit structure of `K`.
pub fn unit_indices(k: &CMFieldData, conductor: &IdealData, w_r: u32) -> (u8, u64) {
    let mut q_r = 1u8;
    if let Some(u) = &k.half_unit {
        let z = generator_root(k);
        let mut zu = u.clone();
        for _ in 0..k.w_k {
            if k.in_order(&zu, conductor) {
                q_r = 2;
                break;
            }
            zu = k.k_mul(&zu, &z);
        }
    }
    let index = (k.hasse_index as u64 * k.w_k as u64) / (w_r as u64 * q_r as u64);
    (q_r, index)
}

pub fn unit_index_q(r: &CMOrderData) -> u8 {
    r.q_r
}

pub fn unit_index_max(r: &CMOrderData) -> u64 {
    r.unit_index
}

/// Every order `Z_F + f Z_K` with `f | f_0` (no torsion filter).
pub fn all_orders(k: &Arc<CMFieldData>, overrides: Option<&UnitOverrides>) -> Result<Vec<CMOrderData>> {
    let mut out = Vec::new();
    for f in k.conductor.divisors() {
        let w = k.torsion_in_order(&f);
        let (mut q_r, mut index) = unit_indices(k, &f, w);
        let mut h = suborder_class_number(k, &f, index)?;
        if !h.is_integer() || !h.is_positive() {
            match overrides.and_then(|o| o.get(k.d_f(), k.q, &f)) {
                Some((q2, i2)) => {
                    q_r = q2;
                    index = i2;
                    h = suborder_class_number(k, &f, index)?;
                    if !h.is_integer() {
                        return Err(Error::NonIntegralClassNumber { value: h.to_string(), conductor: f.to_string() });
                    }
                }
                None => {
                    return Err(Error::UnitSearchInconclusive { d_f: k.d_f(), q: k.q, conductor: f.to_string() })
                }
            }
        }
        let h = h.to_integer().to_u64().expect("small class number");
        out.push(CMOrderData { parent: Arc::clone(k), conductor: f, w, h, q_r, unit_index: index });
    }
    Ok(out)
}

/// The orders with exactly `2q` roots of unity.
pub fn order_lattice(k: &Arc<CMFieldData>, overrides: Option<&UnitOverrides>) -> Result<Vec<CMOrderData>> {
    let all = all_orders(k, overrides)?;
    Ok(all.into_iter().filter(|r| r.w == 2 * k.q).collect())
}

impl fmt::Display for CMOrderData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={} f={} w={} h={} Q={} [Z_K*:R*]={}",
            self.parent.q, self.conductor, self.w, self.h, self.q_r, self.unit_index
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;

    fn cm(d: i64, q: u32) -> Arc<CMFieldData> {
        Arc::new(cm_field(&make_field(d).unwrap(), q).unwrap())
    }

    fn prime(d: i64, p: u64, idx: usize) -> PrimeIdealData {
        make_field(d).unwrap().split_prime(p)[idx]
    }

    #[test]
    fn admissible_examples() {
        assert_eq!(admissible_q(&make_field(1).unwrap()), vec![2, 3]);
        assert_eq!(admissible_q(&make_field(5).unwrap()), vec![2, 3, 5]);
        assert_eq!(admissible_q(&make_field(8).unwrap()), vec![2, 3, 4]);
        assert_eq!(admissible_q(&make_field(12).unwrap()), vec![2, 3, 6]);
        assert_eq!(admissible_q(&make_field(13).unwrap()), vec![2, 3]);
        assert!(cm_field(&make_field(13).unwrap(), 5).is_err());
    }

    #[test]
    fn cm_field_examples() {
        let k = cm(1, 2);
        assert_eq!((k.w_k, k.h_k, k.abs_disc), (4, 1, -4));
        let k = cm(1, 3);
        assert_eq!((k.w_k, k.h_k, k.abs_disc), (6, 1, -3));
        let k = cm(12, 2);
        assert_eq!((k.w_k, k.h_k, k.hasse_index), (12, 1, 2));
        let k = cm(5, 5);
        assert_eq!((k.w_k, k.h_k), (10, 1));
        // Q(zeta_5) has discriminant 125
        assert_eq!(k.abs_disc, 125);
        let k = cm(8, 4);
        assert_eq!((k.w_k, k.h_k, k.abs_disc), (8, 1, 256));
        // Q(sqrt 5, i): Q(sqrt -5) has class number 2
        assert_eq!(cm(5, 2).h_k, 1);
    }

    #[test]
    fn splitting_examples() {
        let k = cm(1, 2);
        assert_eq!(k.splitting(&prime(1, 13, 0)), 1);
        assert_eq!(k.splitting(&prime(1, 2, 0)), 0);
        assert_eq!(k.splitting(&prime(1, 3, 0)), -1);
        let k = cm(5, 2);
        assert_eq!(k.splitting(&prime(5, 11, 0)), -1);
        assert_eq!(k.splitting(&prime(5, 11, 1)), -1);
        assert_eq!(k.splitting(&prime(5, 2, 0)), 0);
        assert_eq!(k.splitting(&prime(5, 3, 0)), 1);
    }

    #[test]
    fn order_lattice_examples() {
        let orders = order_lattice(&cm(1, 2), None).unwrap();
        assert_eq!(orders.len(), 1);
        assert!(orders[0].conductor.is_unit());
        assert_eq!((orders[0].w, orders[0].h), (4, 1));
        assert_eq!(order_lattice(&cm(1, 3), None).unwrap().len(), 1);

        let k8 = cm(8, 2);
        let all = all_orders(&k8, None).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].w, 8);
        assert_eq!(all[1].w, 4);
        assert_eq!(all[1].conductor.norm, 2);
        let lattice = order_lattice(&k8, None).unwrap();
        assert_eq!(lattice.len(), 1);
        assert_eq!(lattice[0].conductor.norm, 2);

        let k = cm(5, 3);
        let orders = order_lattice(&k, None).unwrap();
        assert_eq!(orders.len(), 1);
        assert!(orders[0].conductor.is_unit());
        assert_eq!(orders[0].q_r, 1);
    }

    #[test]
    fn class_number_of_order_of_discriminant_minus_16() {
        let k = cm(1, 2);
        let two = IdealData::prime(prime(1, 2, 0));
        let h = suborder_class_number(&k, &two, 2).unwrap();
        assert_eq!(h, Rational::from_integer(definite_class_number(-16).into()));
    }

    #[test]
    fn unit_index_examples() {
        assert_eq!(order_lattice(&cm(1, 2), None).unwrap()[0].q_r, 1);
        assert_eq!(order_lattice(&cm(5, 5), None).unwrap()[0].q_r, 1);
    }

    #[test]
    fn local_poly_examples() {
        let r = &order_lattice(&cm(1, 2), None).unwrap()[0];
        let (t, n, d) = r.local_poly(&prime(1, 3, 0), 1);
        assert_eq!((t, n, d), (Zf::int(0), Zf::int(1), Zf::int(2)));
        let r = &order_lattice(&cm(1, 3), None).unwrap()[0];
        let (t, n, _) = r.local_poly(&prime(1, 2, 0), 3);
        assert_eq!((t, n), (Zf::int(1), Zf::int(1)));
        let k8 = cm(8, 2);
        let r = &order_lattice(&k8, None).unwrap()[0];
        let p2 = prime(8, 2, 0);
        let lr = k8.field.local(&p2);
        let (_, _, d) = r.local_poly(&p2, 8);
        assert_eq!(lr.val(d, 8), 4);
    }

    #[test]
    fn class_number_matches_forms_over_q() {
        for q in [2, 3] {
            let k = cm(1, q);
            assert_eq!(k.h_k, definite_class_number(k.abs_disc as i64));
        }
    }

    #[test]
    fn orders_consistent_for_all_fields() {
        for d in 1..=853i64 {
            if d != 1 && !arith::is_fundamental_discriminant(d) {
                continue;
            }
            let f = make_field(d).unwrap();
            for q in admissible_q(&f) {
                let k = Arc::new(cm_field(&f, q).unwrap());
                assert!(k.w_k % (2 * q) == 0, "d={d} q={q}");
                // disc(zeta) = f0^2 * rel_disc
                let dz = f.factor_element(&k.delta);
                assert_eq!(dz, k.conductor.mul(&k.conductor).mul(&k.rel_disc), "d={d} q={q}");
                let all = all_orders(&k, None).unwrap_or_else(|e| panic!("d={d} q={q}: {e}"));
                assert!(all.iter().all(|r| r.h >= 1 && r.w % (2 * q) == 0));
                assert_eq!(order_lattice(&k, None).unwrap().iter().all(|r| r.w == 2 * q), true);
                for p in f.primes_up_to(60) {
                    assert_eq!(k.splitting(&p), k.splitting(&f.conj_prime(&p)), "d={d} q={q} {p}");
                }
            }
        }
    }

    #[test]
    fn overrides_parse() {
        let o = UnitOverrides::parse("# comment\n12, 2, 4, (2), 1, 3\n").unwrap();
        assert_eq!(o.entries.len(), 1);
        assert!(UnitOverrides::parse("1,2,3").is_err());
    }
}

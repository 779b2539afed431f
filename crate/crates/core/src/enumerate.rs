//! Search for all Shimura curves of genus at most `g` over a fixed field.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, ratio, Rational};
use crate::curves::{self, ShimuraDatum, Signature};
use crate::embeddings::{self, FieldContext};
use crate::quadfield::{BaseField, IdealData, PrimeIdealData};
use crate::Result;

/// Upper bound for the root discriminant of a field carrying a genus `g`
/// arithmetic Fuchsian group of degree `n`.
pub fn sz_bound(n: u32, g: u32) -> f64 {
    assert!(n >= 1);
    (2.0 * PI).powf(4.0 / 3.0) * (16.0 * (g as f64 + 1.0) / 3.0).powf(2.0 / (3.0 * n as f64))
}

/// Unconditional Odlyzko lower bounds for totally real root discriminants.
pub const ODLYZKO: [(u32, f64); 9] = [
    (2, 2.223),
    (3, 3.610),
    (4, 5.067),
    (5, 6.523),
    (6, 7.941),
    (7, 9.301),
    (8, 10.596),
    (9, 11.823),
    (10, 12.985),
];

/// Real quadratic fundamental discriminants `d` with `sqrt(d) < sz_bound(2, g)`.
pub fn field_scan(g: u32) -> Vec<i64> {
    let cap = sz_bound(2, g).powi(2);
    (2..=cap.ceil() as i64)
        .filter(|&d| (d as f64) < cap && arith::is_fundamental_discriminant(d))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchBounds {
    pub genus: u32,
    /// `64 (g + 1) / (3 A_prim)`: every curve has `Phi(D) Psi(N) < m`.
    pub m: Rational,
    /// `64 (g + 1) / 3`, the area cap.
    pub area_cap: Rational,
    /// `(n, Selberg–Zograf cap, Odlyzko floor)` for `2 <= n <= 10`.
    pub root_disc_caps: Vec<(u32, f64, f64)>,
}

impl SearchBounds {
    pub fn new(field: &BaseField, genus: u32) -> SearchBounds {
        let area_cap = ratio(64 * (genus as i64 + 1), 3);
        let m = &area_cap / &field.aprim;
        let root_disc_caps = ODLYZKO.iter().map(|&(n, o)| (n, sz_bound(n, genus), o)).collect();
        SearchBounds { genus, m, area_cap, root_disc_caps }
    }

    /// Whether `x < m` for an integer `x`.
    pub fn below(&self, x: u64) -> bool {
        Rational::from_integer(x.into()) < self.m
    }

    /// Largest integer strictly below `m / c`.
    pub fn floor_below(&self, c: u64) -> u64 {
        let q = &self.m / Rational::from_integer(c.into());
        let f = q.floor();
        let f = if f == q { f - Rational::from_integer(1.into()) } else { f };
        f.to_integer().to_u64().unwrap_or(0)
    }
}

/// One Shimura curve, up to Galois conjugation of `(D, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRecord {
    pub degree: u8,
    pub d_f: i64,
    pub disc: IdealData,
    pub level: IdealData,
    /// Empty unless several curves share `(d_F, N(D), N(N))`.
    pub label: String,
    pub signature: Signature,
}

impl CurveRecord {
    pub fn key(&self) -> (u8, i64, u64, u64, String, String) {
        (self.degree, self.d_f, self.disc.norm, self.level.norm, self.label.clone(), self.signature.render())
    }

    fn sort_key(&self) -> (i64, u64, u64, IdealData, IdealData) {
        (self.d_f, self.disc.norm, self.level.norm, self.disc.clone(), self.level.clone())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    /// Solve for the odd prime of `D = p * (norm-2 primes)` instead of testing every prime.
    pub refine: bool,
    /// Over `Q`, include the modular curves `D = (1)`.
    pub include_modular: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { refine: false, include_modular: true }
    }
}

/// Squarefree products of `primes` coprime to `avoid` with `Phi < bound`.
fn squarefree_products(primes: &[PrimeIdealData], bound: u64, avoid: &IdealData) -> Vec<IdealData> {
    fn go(
        primes: &[PrimeIdealData],
        start: usize,
        phi: u64,
        bound: u64,
        cur: &mut Vec<(PrimeIdealData, u32)>,
        out: &mut Vec<IdealData>,
    ) {
        out.push(IdealData::from_factors(cur.clone()));
        for i in start..primes.len() {
            let p = primes[i];
            let next = phi * (p.norm() - 1);
            if next >= bound {
                // primes are sorted by norm; later ones are no smaller
                break;
            }
            cur.push((p, 1));
            go(primes, i + 1, next, bound, cur, out);
            cur.pop();
        }
    }
    let usable: Vec<PrimeIdealData> = primes.iter().filter(|p| avoid.ord(p) == 0).cloned().collect();
    let mut out = Vec::new();
    go(&usable, 0, 1, bound, &mut Vec::new(), &mut out);
    out
}

fn parity_ok(field: &BaseField, d: &IdealData) -> bool {
    (d.num_primes() + field.degree as usize) % 2 == 1
}

/// `A(d) * Phi(a) - 2^tau(a) * E(d) <= 2g - 2`, necessary for `g(d a) <= g`.
fn extension_allowed(a_d: &Rational, e_d: &Rational, ext: &IdealData, g: u32) -> bool {
    let lhs = a_d * Rational::from_integer(ext.phi().into())
        - e_d * Rational::from_integer((1u64 << ext.num_primes()).into());
    lhs <= Rational::from_integer((2 * g as i64 - 2).into())
}

/// Primes lying over a rational prime that divides some admissible `2q`.
fn bad_primes(ctx: &FieldContext) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for q in ctx.admissible_q() {
        for p in arith::factor(2 * q as u64).primes() {
            out.insert(p);
        }
    }
    out
}

/// A superset of the discriminants `D` with `g(X_0^D(1)) <= g`.
pub fn candidate_discriminants(ctx: &FieldContext, g: u32, refine: bool) -> Result<Vec<IdealData>> {
    let field = &ctx.field;
    let bounds = SearchBounds::new(field, g);
    let cap = bounds.floor_below(1) + 1;
    let primes = field.primes_up_to(cap + 1);
    let primes: Vec<PrimeIdealData> = primes.into_iter().filter(|p| bounds.below(p.norm() - 1)).collect();

    let seeds: Vec<IdealData> = if field.degree % 2 == 1 {
        vec![IdealData::unit()]
    } else {
        primes.iter().map(|p| IdealData::prime(*p)).collect()
    };

    let mut out = BTreeSet::new();
    let mut norm2_shapes_done = false;
    if refine {
        out.extend(refined_small_shapes(ctx, g, &bounds, &primes)?);
        norm2_shapes_done = true;
    }
    for seed in &seeds {
        let (a_d, e_d) = curves::elliptic_defect(ctx, seed, &IdealData::unit())?;
        let phi_seed = seed.phi();
        let room = bounds.floor_below(phi_seed) + 1;
        for ext in squarefree_products(&primes, room, seed) {
            let d = seed.mul(&ext);
            if !parity_ok(field, &d) || !bounds.below(d.phi()) {
                continue;
            }
            if norm2_shapes_done && odd_part_len(&d) <= 1 {
                continue;
            }
            // When g(seed) > g and ext has only primes of norm > 2, this test
            // already fails, since then g(seed * ext) >= g(seed).
            if extension_allowed(&a_d, &e_d, &ext, g) {
                out.insert(d);
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn odd_part_len(d: &IdealData) -> usize {
    d.primes().filter(|p| p.norm() > 2).count()
}

/// All `D = p * a` (with `a` a product of norm-2 primes and `p` prime of
/// norm > 2 or trivial) of genus at most `g`, found by solving for `Phi(p)`.
fn refined_small_shapes(
    ctx: &FieldContext,
    g: u32,
    bounds: &SearchBounds,
    primes: &[PrimeIdealData],
) -> Result<Vec<IdealData>> {
    let field = &ctx.field;
    let bad = bad_primes(ctx);
    let norm2: Vec<PrimeIdealData> = field.split_prime(2).into_iter().filter(|p| p.norm() == 2).collect();
    let mut out = Vec::new();
    for a in squarefree_products(&norm2, 2, &IdealData::unit()) {
        // primes over bad rational primes are checked directly
        let mut direct: Vec<IdealData> = vec![a.clone()];
        for p in primes.iter().filter(|p| p.norm() > 2 && bad.contains(&p.p) && a.ord(p) == 0) {
            direct.push(a.mul(&IdealData::prime(*p)));
        }
        for d in direct {
            if parity_ok(field, &d) && bounds.below(d.phi()) && genus_at_most(ctx, &d, g)? {
                out.push(d);
            }
        }
        if (a.num_primes() + 1 + field.degree as usize) % 2 == 0 {
            continue;
        }
        let mut eq = Vec::new();
        for q in ctx.admissible_q() {
            let e = embeddings::elliptic_rational(ctx, q, &a, &IdealData::unit())?;
            if !e.is_zero() {
                eq.push((q, e * ratio(q as i64 - 1, q as i64)));
            }
        }
        let a_prim = &field.aprim;
        for mask in 0u32..(1 << eq.len()) {
            let sum: Rational = eq
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, (_, v))| v * Rational::from_integer(2.into()))
                .sum();
            for gg in 0..=g {
                let phi = (Rational::from_integer((2 * gg as i64 - 2).into()) + &sum) / a_prim;
                if !phi.is_integer() || !phi.is_positive() {
                    continue;
                }
                let norm = phi.to_integer().to_u64().unwrap() + 1;
                for p in primes_of_norm(field, norm) {
                    if bad.contains(&p.p) || a.ord(&p) > 0 {
                        continue;
                    }
                    let matches = eq.iter().enumerate().all(|(i, (q, _))| {
                        let k = &ctx.cm_for(*q).unwrap().0;
                        let sigma = 1 - k.splitting(&p) as i32;
                        sigma == if mask & (1 << i) != 0 { 2 } else { 0 }
                    });
                    let d = a.mul(&IdealData::prime(p));
                    if matches && bounds.below(d.phi()) {
                        out.push(d);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn primes_of_norm(field: &BaseField, norm: u64) -> Vec<PrimeIdealData> {
    let f = arith::factor(norm);
    if f.factors.len() != 1 {
        return Vec::new();
    }
    let (p, k) = f.factors[0];
    if k > 2 {
        return Vec::new();
    }
    field.split_prime(p).into_iter().filter(|pr| pr.norm() == norm).collect()
}

fn genus_at_most(ctx: &FieldContext, d: &IdealData, g: u32) -> Result<bool> {
    let x = curves::validate(&ctx.field, d, &IdealData::unit())?;
    Ok(curves::signature(ctx, &x)?.genus <= g as u64)
}

/// Levels of a fixed discriminant, by increasing norm, cutting every
/// multiple of a level whose genus exceeds `g`.
pub fn enumerate_levels(ctx: &FieldContext, disc: &IdealData, g: u32) -> Result<Vec<CurveRecord>> {
    let field = &ctx.field;
    let bounds = SearchBounds::new(field, g);
    let max_norm = bounds.floor_below(disc.phi());
    let stable = field.conj_ideal(disc) == *disc;
    let mut out = Vec::new();
    let mut too_big: BTreeSet<IdealData> = BTreeSet::new();
    let mut seen: BTreeSet<IdealData> = BTreeSet::new();
    for n in field.ideals_up_to(max_norm) {
        if !disc.is_coprime(&n) || !bounds.below(disc.phi() * n.psi()) {
            continue;
        }
        let cut = n.primes().any(|p| {
            let m = n.div(&IdealData::prime(*p));
            too_big.contains(&m) || !seen.contains(&m)
        });
        if cut && !n.is_unit() {
            too_big.insert(n);
            continue;
        }
        let x = curves::validate(field, disc, &n)?;
        let sig = curves::signature(ctx, &x)?;
        seen.insert(n.clone());
        if sig.genus > g as u64 {
            too_big.insert(n);
            continue;
        }
        if stable && field.conj_ideal(&n) < n {
            continue;
        }
        out.push(record(field, disc, &n, sig));
    }
    Ok(out)
}

fn record(field: &BaseField, disc: &IdealData, level: &IdealData, signature: Signature) -> CurveRecord {
    CurveRecord {
        degree: field.degree,
        d_f: field.d_f,
        disc: disc.clone(),
        level: level.clone(),
        label: String::new(),
        signature,
    }
}

/// Whether `d` is the representative kept from its Galois orbit.
fn canonical_disc(field: &BaseField, d: &IdealData) -> bool {
    field.conj_ideal(d) >= *d
}

/// All curves of genus at most `g` over the field, canonically sorted and labelled.
pub fn enumerate_all(ctx: &FieldContext, g: u32, opts: EnumerateOptions) -> Result<Vec<CurveRecord>> {
    let field = &ctx.field;
    let mut out = Vec::new();
    for d in candidate_discriminants(ctx, g, opts.refine)? {
        if !canonical_disc(field, &d) {
            continue;
        }
        if d.is_unit() && field.degree == 1 && !opts.include_modular {
            continue;
        }
        if !genus_at_most(ctx, &d, g)? {
            continue;
        }
        out.extend(enumerate_levels(ctx, &d, g)?);
    }
    Ok(finish(field, out))
}

/// Every pair with `Phi(D) Psi(N) < M(F, g)`, tested one by one.
pub fn naive_enumerate(ctx: &FieldContext, g: u32, include_modular: bool) -> Result<Vec<CurveRecord>> {
    let mut out = Vec::new();
    for (x, sig) in all_pairs(ctx, g, include_modular)? {
        if sig.genus <= g as u64 && canonical_pair(&ctx.field, &x) {
            out.push(record(&ctx.field, &x.disc, &x.level, sig));
        }
    }
    Ok(finish(&ctx.field, out))
}

fn canonical_pair(field: &BaseField, x: &ShimuraDatum) -> bool {
    let c = curves::conjugate(field, x);
    (&c.disc, &c.level) >= (&x.disc, &x.level)
}

/// Every valid `(D, N)` with `Phi(D) Psi(N) < M(F, g)` and its signature.
pub fn all_pairs(ctx: &FieldContext, g: u32, include_modular: bool) -> Result<Vec<(ShimuraDatum, Signature)>> {
    let field = &ctx.field;
    let bounds = SearchBounds::new(field, g);
    let cap = bounds.floor_below(1) + 1;
    let primes: Vec<PrimeIdealData> = field
        .primes_up_to(cap + 1)
        .into_iter()
        .filter(|p| bounds.below(p.norm() - 1))
        .collect();
    let mut out = Vec::new();
    for d in squarefree_products(&primes, cap, &IdealData::unit()) {
        if !parity_ok(field, &d) || (d.is_unit() && !include_modular) {
            continue;
        }
        let max_norm = bounds.floor_below(d.phi());
        for n in field.ideals_up_to(max_norm) {
            if !d.is_coprime(&n) || !bounds.below(d.phi() * n.psi()) {
                continue;
            }
            let x = curves::validate(field, &d, &n)?;
            let sig = curves::signature(ctx, &x)?;
            out.push((x, sig));
        }
    }
    Ok(out)
}

/// Sorts canonically and labels curves sharing `(d_F, N(D), N(N))`.
fn finish(field: &BaseField, mut recs: Vec<CurveRecord>) -> Vec<CurveRecord> {
    recs.sort_by_key(|r| r.sort_key());
    let mut groups: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (i, r) in recs.iter().enumerate() {
        groups.entry((r.disc.norm, r.level.norm)).or_default().push(i);
    }
    let mut drop = vec![false; recs.len()];
    for idx in groups.values() {
        let sigs: BTreeSet<&Signature> = idx.iter().map(|&i| &recs[i].signature).collect();
        if sigs.len() < 2 {
            // orbits that share a signature are one table entry
            for &i in &idx[1..] {
                drop[i] = true;
            }
            continue;
        }
        let labels: Vec<String> = idx.iter().map(|&i| shape_label(field, &recs[i].level)).collect();
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() == labels.len() {
            for (&i, l) in idx.iter().zip(labels) {
                recs[i].label = l;
            }
        } else {
            let ranked: Vec<Signature> = sigs.into_iter().cloned().collect();
            for &i in idx {
                let k = ranked.iter().position(|s| *s == recs[i].signature).unwrap_or(0);
                recs[i].label = format!("variant-{}", k + 1);
            }
        }
    }
    let mut seen = BTreeSet::new();
    recs.into_iter()
        .zip(drop)
        .filter(|(r, d)| !d && seen.insert(r.key()))
        .map(|(r, _)| r)
        .collect()
}

/// `rational` if `N` is Galois-stable, `square` if `N` is the square of a
/// prime, otherwise `split`.
pub fn shape_label(field: &BaseField, level: &IdealData) -> String {
    if field.conj_ideal(level) == *level {
        "rational".into()
    } else if level.factors.len() == 1 && level.factors[0].1 == 2 {
        "square".into()
    } else {
        "split".into()
    }
}

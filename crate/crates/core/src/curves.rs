//! Shimura data `(F, D, N)`, their areas and signatures.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{ratio, Rational};
use crate::embeddings::{self, EllipticBreakdown, FieldContext};
use crate::quadfield::{BaseField, IdealData};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShimuraDatum {
    pub d_f: i64,
    pub degree: u8,
    pub disc: IdealData,
    pub level: IdealData,
}

/// Checks squarefreeness, coprimality and the parity condition.
pub fn validate(field: &BaseField, disc: &IdealData, level: &IdealData) -> Result<ShimuraDatum> {
    if !disc.is_squarefree() {
        return Err(Error::NotSquarefree(disc.to_string()));
    }
    if !disc.is_coprime(level) {
        return Err(Error::NotCoprime(disc.to_string(), level.to_string()));
    }
    if (disc.num_primes() + field.degree as usize) % 2 == 0 {
        return Err(Error::ParityViolation { disc: disc.to_string(), degree: field.degree });
    }
    Ok(ShimuraDatum { d_f: field.d_f, degree: field.degree, disc: disc.clone(), level: level.clone() })
}

impl fmt::Display for ShimuraDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d_F={} D={} N={}", self.d_f, self.disc, self.level)
    }
}

/// `(g; m_1^k_1, ...; s)` together with the exact area.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub genus: u64,
    /// Sorted `(order, multiplicity)` pairs with positive multiplicity.
    pub elliptic: Vec<(u32, u64)>,
    pub cusps: u64,
    pub area: Rational,
}

impl Signature {
    /// Builds a signature, taking the area from the Riemann–Hurwitz relation.
    pub fn from_parts(genus: u64, mut elliptic: Vec<(u32, u64)>, cusps: u64) -> Signature {
        elliptic.retain(|&(_, k)| k > 0);
        elliptic.sort();
        let area = rh_area(genus, &elliptic, cusps);
        Signature { genus, elliptic, cusps, area }
    }

    pub fn render(&self) -> String {
        let ell = if self.elliptic.is_empty() {
            "-".to_string()
        } else {
            self.elliptic
                .iter()
                .map(|&(m, k)| if k == 1 { m.to_string() } else { format!("{m}^{k}") })
                .collect::<Vec<_>>()
                .join(",")
        };
        if self.cusps == 0 {
            format!("({};{})", self.genus, ell)
        } else {
            format!("({};{};{})", self.genus, ell, self.cusps)
        }
    }

    pub fn count_of(&self, q: u32) -> u64 {
        self.elliptic.iter().find(|(m, _)| *m == q).map_or(0, |&(_, k)| k)
    }
}

/// `2g - 2 + sum k (1 - 1/m) + s`.
pub fn rh_area(genus: u64, elliptic: &[(u32, u64)], cusps: u64) -> Rational {
    let mut a = Rational::from_integer((2 * genus as i64 - 2 + cusps as i64).into());
    for &(m, k) in elliptic {
        a += ratio(k as i64 * (m as i64 - 1), m as i64);
    }
    a
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Signature {
    type Err = Error;

    /// Parses `(g; o1^k1,o2,...; s)`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Signature> {
        let bad = |msg: &str| Error::InvalidInput(format!("signature {s:?}: {msg}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("missing parentheses"))?;
        let parts: Vec<&str> = inner.split(';').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad("expected two or three ';'-separated parts"));
        }
        let genus = parts[0].parse::<u64>().map_err(|_| bad("bad genus"))?;
        let mut elliptic: Vec<(u32, u64)> = Vec::new();
        if parts[1] != "-" {
            for item in parts[1].split(',') {
                let (m, k) = match item.split_once('^') {
                    Some((m, k)) => (m, k.parse::<u64>().map_err(|_| bad("bad exponent"))?),
                    None => (item, 1),
                };
                let m = m.parse::<u32>().map_err(|_| bad("bad order"))?;
                if m < 2 || k == 0 {
                    return Err(bad("orders must be at least 2 with positive multiplicity"));
                }
                match elliptic.iter_mut().find(|(o, _)| *o == m) {
                    Some((_, c)) => *c += k,
                    None => elliptic.push((m, k)),
                }
            }
        }
        let cusps = match parts.get(2) {
            Some(c) => {
                let c = c.parse::<u64>().map_err(|_| bad("bad cusp count"))?;
                if c == 0 {
                    return Err(bad("a zero cusp count is written by omission"));
                }
                c
            }
            None => 0,
        };
        Ok(Signature::from_parts(genus, elliptic, cusps))
    }
}

/// `A_prim * Phi(D) * Psi(N)`.
pub fn area(field: &BaseField, x: &ShimuraDatum) -> Rational {
    &field.aprim * Rational::from_integer(x.disc.phi().into()) * Rational::from_integer(x.level.psi().into())
}

/// The signature along with the per-q breakdown of elliptic counts.
pub fn signature_detailed(ctx: &FieldContext, x: &ShimuraDatum) -> Result<(Signature, Vec<EllipticBreakdown>)> {
    let field = &ctx.field;
    let a = area(field, x);
    let mut elliptic = Vec::new();
    let mut breakdowns = Vec::new();
    let mut rest = a.clone();
    for q in ctx.admissible_q() {
        let b = embeddings::elliptic_breakdown(ctx, q, &x.disc, &x.level)?;
        rest -= ratio(b.value as i64 * (q as i64 - 1), q as i64);
        elliptic.push((q, b.value));
        breakdowns.push(b);
    }
    let cusps = if field.degree == 1 && x.disc.is_unit() {
        embeddings::cusp_count(x.level.norm)
    } else {
        0
    };
    rest -= Rational::from_integer(cusps.into());
    // rest = 2g - 2
    let g2 = rest + Rational::from_integer(2.into());
    let two = Rational::from_integer(2.into());
    let g = &g2 / &two;
    if !g.is_integer() || g.is_negative() {
        return Err(Error::InternalInconsistency(format!(
            "genus {g} is not a nonnegative integer for {x} (area {a}, counts {elliptic:?}, cusps {cusps})"
        )));
    }
    let genus = g.to_integer().to_u64().unwrap();
    elliptic.retain(|&(_, k)| k > 0);
    let sig = Signature { genus, elliptic, cusps, area: a };
    debug_assert!((rh_area(sig.genus, &sig.elliptic, sig.cusps) - &sig.area).is_zero());
    Ok((sig, breakdowns))
}

/// `A - sum_q e_q (1 - 1/q)` with rational `e_q`; defined for any ideal pair.
pub fn elliptic_defect(ctx: &FieldContext, disc: &IdealData, level: &IdealData) -> Result<(Rational, Rational)> {
    let a = &ctx.field.aprim
        * Rational::from_integer(disc.phi().into())
        * Rational::from_integer(level.psi().into());
    let mut e = Rational::zero();
    for q in ctx.admissible_q() {
        let v = embeddings::elliptic_rational(ctx, q, disc, level)?;
        e += v * ratio(q as i64 - 1, q as i64);
    }
    Ok((a, e))
}

/// The genus `(A - E + 2) / 2` of an ideal pair, ignoring cusps, as a rational.
pub fn formal_genus(ctx: &FieldContext, disc: &IdealData, level: &IdealData) -> Result<Rational> {
    let (a, e) = elliptic_defect(ctx, disc, level)?;
    Ok((a - e + Rational::from_integer(2.into())) / Rational::from_integer(2.into()))
}

/// The datum with both ideals replaced by their Galois conjugates.
pub fn conjugate(field: &BaseField, x: &ShimuraDatum) -> ShimuraDatum {
    ShimuraDatum {
        disc: field.conj_ideal(&x.disc),
        level: field.conj_ideal(&x.level),
        ..x.clone()
    }
}

/// One valid datum per Galois orbit with `N(D) = disc_norm` and `N(N) = level_norm`.
pub fn data_with_norms(field: &BaseField, disc_norm: u64, level_norm: u64) -> Vec<ShimuraDatum> {
    let mut out: Vec<ShimuraDatum> = Vec::new();
    for d in field.ideals_of_norm(disc_norm) {
        for n in field.ideals_of_norm(level_norm) {
            let Ok(x) = validate(field, &d, &n) else { continue };
            let c = conjugate(field, &x);
            if (&c.disc, &c.level) >= (&x.disc, &x.level) {
                out.push(x);
            }
        }
    }
    out
}

pub fn signature(ctx: &FieldContext, x: &ShimuraDatum) -> Result<Signature> {
    signature_detailed(ctx, x).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;
    use proptest::prelude::*;

    fn ctx(d: i64) -> FieldContext {
        FieldContext::new(make_field(d).unwrap()).unwrap()
    }

    fn ideal(f: &BaseField, norm: u64, idx: usize) -> IdealData {
        f.ideals_of_norm(norm)[idx].clone()
    }

    fn sig(c: &FieldContext, d: u64, n: u64) -> Signature {
        let x = validate(&c.field, &ideal(&c.field, d, 0), &ideal(&c.field, n, 0)).unwrap();
        signature(c, &x).unwrap()
    }

    #[test]
    fn area_examples() {
        let c = ctx(1);
        let f = &c.field;
        let one = IdealData::unit();
        let x = validate(f, &one, &one).unwrap();
        assert_eq!(area(f, &x), ratio(1, 6));
        let x = validate(f, &ideal(f, 6, 0), &one).unwrap();
        assert_eq!(area(f, &x), ratio(1, 3));
        let x = validate(f, &ideal(f, 26, 0), &one).unwrap();
        assert_eq!(area(f, &x), ratio(2, 1));
        let f13 = make_field(13).unwrap();
        let x = validate(&f13, &ideal(&f13, 4, 0), &one).unwrap();
        assert_eq!(area(&f13, &x), ratio(1, 2));
    }

    #[test]
    fn signature_examples() {
        let c = ctx(1);
        assert_eq!(sig(&c, 6, 5).render(), "(1;2^4)");
        assert_eq!(sig(&c, 1, 11).render(), "(1;-;2)");
        assert_eq!(sig(&c, 1, 1).render(), "(0;2,3;1)");
        assert_eq!(sig(&c, 26, 1).render(), "(2;-)");
        let c5 = ctx(5);
        assert_eq!(sig(&c5, 11, 1).render(), "(0;2^2,3^2)");
        assert_eq!(sig(&c5, 4, 1).render(), "(0;2,5^2)");
        let c8 = ctx(8);
        let f = &c8.field;
        let p2 = ideal(f, 2, 0);
        let levels = f.ideals_of_norm(49);
        let renders: Vec<String> = levels
            .iter()
            .map(|n| signature(&c8, &validate(f, &p2, n).unwrap()).unwrap().render())
            .collect();
        // P7^2, its conjugate, and (7)
        assert_eq!(renders.iter().filter(|s| *s == "(2;3^4)").count(), 2);
        assert_eq!(renders.iter().filter(|s| *s == "(1;3^8)").count(), 1);
    }

    #[test]
    fn orbits_by_norm() {
        let f8 = make_field(8).unwrap();
        assert_eq!(data_with_norms(&f8, 2, 49).len(), 2);
        let f5 = make_field(5).unwrap();
        assert_eq!(data_with_norms(&f5, 11, 1).len(), 1);
        assert_eq!(data_with_norms(&f5, 1, 1).len(), 0);
    }

    #[test]
    fn validate_errors() {
        let q = make_field(1).unwrap();
        let one = IdealData::unit();
        assert!(matches!(validate(&q, &ideal(&q, 4, 0), &one), Err(Error::NotSquarefree(_))));
        assert!(matches!(validate(&q, &ideal(&q, 6, 0), &ideal(&q, 2, 0)), Err(Error::NotCoprime(..))));
        let f5 = make_field(5).unwrap();
        assert!(matches!(validate(&f5, &one, &one), Err(Error::ParityViolation { .. })));
        assert!(matches!(validate(&q, &ideal(&q, 2, 0), &one), Err(Error::ParityViolation { .. })));
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["(0;2,3;1)", "(0;-;3)", "(2;-)", "(1;2^4)", "(0;2^9,18)", "(1;3^10,5)"] {
            assert_eq!(s.parse::<Signature>().unwrap().render(), s);
        }
        assert_eq!("( 0 ; 2 , 3 ; 1 )".parse::<Signature>().unwrap().render(), "(0;2,3;1)");
        assert!("(0;1;1)".parse::<Signature>().is_err());
        assert!("0;2".parse::<Signature>().is_err());
        assert_eq!("(0;2,3;1)".parse::<Signature>().unwrap().area, ratio(1, 6));
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(g in 0u64..5, ell in prop::collection::btree_map(2u32..20, 1u64..12, 0..4),
                                   s in 0u64..10) {
            let sig = Signature::from_parts(g, ell.into_iter().collect(), s);
            let back: Signature = sig.render().parse().unwrap();
            prop_assert_eq!(back, sig);
        }
    }
}

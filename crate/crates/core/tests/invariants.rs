use proptest::prelude::*;

use shimura_core::curves::{self, ShimuraDatum};
use shimura_core::embeddings::FieldContext;
use shimura_core::enumerate;
use shimura_core::quadfield::{make_field, IdealData};
use shimura_core::tables;

fn ctx(d: i64) -> FieldContext {
    FieldContext::new(make_field(d).unwrap()).unwrap()
}

fn valid_pairs(c: &FieldContext, bound: u64) -> Vec<ShimuraDatum> {
    let ideals = c.field.ideals_up_to(bound);
    let mut out = Vec::new();
    for d in &ideals {
        for n in &ideals {
            if let Ok(x) = curves::validate(&c.field, d, n) {
                out.push(x);
            }
        }
    }
    out
}

#[test]
fn bundled_rows_satisfy_riemann_hurwitz() {
    let rows = tables::parse_str(tables::BUNDLED).unwrap();
    let mut checked = 0;
    for r in rows.iter().filter(|r| r.degree <= 2) {
        let f = make_field(r.d_f).unwrap();
        assert!(tables::rh_consistent(&f, r).unwrap(), "{:?}", r.key());
        checked += 1;
    }
    assert_eq!(checked, 52 + 198);
}

#[test]
fn signature_is_galois_invariant() {
    for d in [5, 8, 12, 13, 17] {
        let c = ctx(d);
        for x in valid_pairs(&c, 60) {
            let y = curves::conjugate(&c.field, &x);
            assert_eq!(curves::signature(&c, &x).unwrap(), curves::signature(&c, &y).unwrap(), "{x}");
        }
    }
}

#[test]
fn genus_grows_along_levels() {
    // X_0(N') covers X_0(N) for N | N'
    for d in [1, 5, 8] {
        let c = ctx(d);
        for x in valid_pairs(&c, 40) {
            let g = curves::signature(&c, &x).unwrap().genus;
            for m in x.level.divisors() {
                let y = curves::validate(&c.field, &x.disc, &m).unwrap();
                assert!(curves::signature(&c, &y).unwrap().genus <= g, "{x} over {m:?}");
            }
        }
    }
}

#[test]
fn refined_search_matches_plain_search() {
    for d in [1, 5, 8, 12, 13, 17, 21, 24, 28, 29] {
        let c = ctx(d);
        let plain = enumerate::enumerate_all(&c, 2, enumerate::EnumerateOptions { refine: false, include_modular: true }).unwrap();
        let refined = enumerate::enumerate_all(&c, 2, enumerate::EnumerateOptions { refine: true, include_modular: true }).unwrap();
        assert_eq!(plain, refined, "d_F={d}");
    }
}

#[test]
fn unit_ideal_level_reads_back() {
    let c = ctx(1);
    let x = curves::validate(&c.field, &c.field.ideals_of_norm(6)[0], &IdealData::unit()).unwrap();
    let s = curves::signature(&c, &x).unwrap();
    assert_eq!(s.render().parse::<curves::Signature>().unwrap(), s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn area_matches_riemann_hurwitz(idx in 0usize..6, a in 0usize..400, b in 0usize..400) {
        let d = [1, 5, 8, 12, 13, 17][idx];
        let c = ctx(d);
        let ideals = c.field.ideals_up_to(120);
        let (dd, nn) = (&ideals[a % ideals.len()], &ideals[b % ideals.len()]);
        if let Ok(x) = curves::validate(&c.field, dd, nn) {
            let s = curves::signature(&c, &x).unwrap();
            prop_assert_eq!(curves::rh_area(s.genus, &s.elliptic, s.cusps), curves::area(&c.field, &x));
        }
    }
}

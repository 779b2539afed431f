//! The bundled golden table, CSV/JSON emission and set-difference verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::curves::Signature;
use crate::enumerate::CurveRecord;
use crate::quadfield::{BaseField, IdealData};
use crate::{Error, Result};

/// The transcription shipped with the crate.
pub const BUNDLED: &str = include_str!("../data/golden_tables.csv");

/// Environment variable naming an alternative golden file.
pub const GOLDEN_ENV: &str = "SHIMURA_GOLDEN_PATH";

/// Curve count and genus histogram stated for the complete table.
pub const EXPECTED_ROWS: usize = 858;
pub const EXPECTED_GENUS_HISTOGRAM: [(u64, usize); 3] = [(0, 258), (1, 334), (2, 266)];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GoldenRow {
    pub degree: u8,
    #[serde(rename = "d_F")]
    pub d_f: i64,
    pub field_index: u32,
    #[serde(rename = "D")]
    pub disc_norm: u64,
    #[serde(rename = "N")]
    pub level_norm: u64,
    #[serde(rename = "ideal_label")]
    pub label: String,
    pub signature: String,
    pub genus: u64,
}

/// `(d_F, D, N, label, signature)`, the identity of a row in a diff.
pub type RowKey = (i64, u64, u64, String, String);

impl GoldenRow {
    pub fn key(&self) -> RowKey {
        (self.d_f, self.disc_norm, self.level_norm, self.label.clone(), self.signature.clone())
    }

    pub fn parsed(&self) -> Result<Signature> {
        self.signature.parse()
    }

    pub fn from_record(r: &CurveRecord) -> GoldenRow {
        GoldenRow {
            degree: r.degree,
            d_f: r.d_f,
            field_index: 0,
            disc_norm: r.disc.norm,
            level_norm: r.level.norm,
            label: r.label.clone(),
            signature: r.signature.render(),
            genus: r.signature.genus,
        }
    }
}

/// Parses CSV text with the header `degree,d_F,field_index,D,N,ideal_label,signature,genus`.
pub fn parse_str(text: &str) -> Result<Vec<GoldenRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::ParseError { line: 1, msg: e.to_string() })?.clone();
    let expected = ["degree", "d_F", "field_index", "D", "N", "ideal_label", "signature", "genus"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::ParseError { line: 1, msg: format!("unexpected header {headers:?}") });
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<GoldenRow>() {
        let row = rec.map_err(|e| Error::ParseError {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rows.len() + 2;
        let sig = row
            .parsed()
            .map_err(|e| Error::ParseError { line, msg: e.to_string() })?;
        if sig.genus != row.genus {
            return Err(Error::ParseError {
                line,
                msg: format!("genus column {} disagrees with signature {}", row.genus, row.signature),
            });
        }
        if sig.render() != row.signature {
            return Err(Error::ParseError { line, msg: format!("signature {} is not in canonical form", row.signature) });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_tables(path: &Path) -> Result<Vec<GoldenRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

/// The golden file named by `SHIMURA_GOLDEN_PATH`, if set.
pub fn golden_override() -> Option<PathBuf> {
    std::env::var_os(GOLDEN_ENV).map(PathBuf::from)
}

/// The override file if set, otherwise the bundled table.
pub fn load_golden() -> Result<Vec<GoldenRow>> {
    match golden_override() {
        Some(p) => parse_tables(&p),
        None => parse_str(BUNDLED),
    }
}

pub fn genus_histogram(rows: &[GoldenRow]) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for r in rows {
        *h.entry(r.genus).or_insert(0) += 1;
    }
    h
}

/// Checks the total row count and the genus histogram against the stated values.
pub fn audit_counts(rows: &[GoldenRow]) -> Result<()> {
    if rows.len() != EXPECTED_ROWS {
        return Err(Error::CountMismatch { expected: EXPECTED_ROWS, found: rows.len() });
    }
    let h = genus_histogram(rows);
    for (g, n) in EXPECTED_GENUS_HISTOGRAM {
        let found = h.get(&g).copied().unwrap_or(0);
        if found != n {
            return Err(Error::CountMismatch { expected: n, found });
        }
    }
    Ok(())
}

/// Rows matching `(d_F, D, N)` and, if given, the label.
pub fn lookup<'a>(
    rows: &'a [GoldenRow],
    d_f: i64,
    disc_norm: u64,
    level_norm: u64,
    label: Option<&str>,
) -> Result<Vec<&'a GoldenRow>> {
    let hits: Vec<&GoldenRow> = rows
        .iter()
        .filter(|r| r.d_f == d_f && r.disc_norm == disc_norm && r.level_norm == level_norm)
        .filter(|r| label.is_none_or(|l| r.label == l))
        .collect();
    if hits.is_empty() {
        let l = label.map(|l| format!(" label {l}")).unwrap_or_default();
        return Err(Error::NotFound(format!("d_F={d_f} D={disc_norm} N={level_norm}{l}")));
    }
    Ok(hits)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub degree: u8,
    pub computed: usize,
    pub golden: usize,
    /// In the golden table but not computed.
    pub missing: Vec<RowKey>,
    /// Computed but not in the golden table.
    pub extra: Vec<RowKey>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diff report serializes")
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "degree {}: {} computed, {} golden, {} missing, {} extra",
            self.degree,
            self.computed,
            self.golden,
            self.missing.len(),
            self.extra.len()
        )?;
        for (tag, keys) in [("-", &self.missing), ("+", &self.extra)] {
            for (d, dn, n, l, s) in keys {
                let l = if l.is_empty() { String::new() } else { format!(" [{l}]") };
                writeln!(f, "{tag} d_F={d} D={dn} N={n}{l} {s}")?;
            }
        }
        Ok(())
    }
}

/// Symmetric difference of `(d_F, D, N, label, signature)` between the
/// computed curves and the golden rows of one degree. With `fields`, only
/// golden rows over those discriminants take part.
pub fn verify(computed: &[CurveRecord], golden: &[GoldenRow], degree: u8, fields: Option<&[i64]>) -> DiffReport {
    let rows: Vec<GoldenRow> = computed.iter().map(GoldenRow::from_record).collect();
    verify_rows(&rows, golden, degree, fields)
}

pub fn verify_rows(computed: &[GoldenRow], golden: &[GoldenRow], degree: u8, fields: Option<&[i64]>) -> DiffReport {
    let keep = |d: i64| fields.is_none_or(|fs| fs.contains(&d));
    let c: BTreeSet<RowKey> = computed.iter().filter(|r| r.degree == degree).map(|r| r.key()).collect();
    let g: BTreeSet<RowKey> = golden
        .iter()
        .filter(|r| r.degree == degree && keep(r.d_f))
        .map(|r| r.key())
        .collect();
    DiffReport {
        degree,
        computed: c.len(),
        golden: g.len(),
        missing: g.difference(&c).cloned().collect(),
        extra: c.difference(&g).cloned().collect(),
    }
}

/// Rows in the golden CSV format.
pub fn to_csv(rows: &[GoldenRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn to_json(rows: &[GoldenRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

/// Areas `A_prim * Phi(D) * Psi(N)` over all valid ideal pairs with the
/// given norms.
pub fn candidate_areas(field: &BaseField, disc_norm: u64, level_norm: u64) -> BTreeSet<Rational> {
    let mut out = BTreeSet::new();
    for d in field.ideals_of_norm(disc_norm) {
        if !d.is_squarefree() || (d.num_primes() + field.degree as usize) % 2 == 0 {
            continue;
        }
        for n in field.ideals_of_norm(level_norm) {
            if d.is_coprime(&n) {
                out.insert(area_of(field, &d, &n));
            }
        }
    }
    out
}

fn area_of(field: &BaseField, d: &IdealData, n: &IdealData) -> Rational {
    &field.aprim * Rational::from_integer(d.phi().into()) * Rational::from_integer(n.psi().into())
}

/// Whether the area implied by the row's signature is the area of some
/// ideal pair with the row's norms.
pub fn rh_consistent(field: &BaseField, row: &GoldenRow) -> Result<bool> {
    let sig = row.parsed()?;
    Ok(candidate_areas(field, row.disc_norm, row.level_norm).contains(&sig.area))
}

/// The row of least (or greatest) signature area among rows of a genus.
pub fn area_extreme(rows: &[GoldenRow], genus: u64, largest: bool) -> Option<(&GoldenRow, Rational)> {
    let mut best: Option<(&GoldenRow, Rational)> = None;
    for r in rows.iter().filter(|r| r.genus == genus) {
        let a = r.parsed().ok()?.area;
        let better = match &best {
            None => true,
            Some((_, b)) => (largest && a > *b) || (!largest && a < *b),
        };
        if better {
            best = Some((r, a));
        }
    }
    best
}

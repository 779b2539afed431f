use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use shimura_core::cmorders::UnitOverrides;
use shimura_core::curves::{self, ShimuraDatum};
use shimura_core::embeddings::{Calibration, FieldContext};
use shimura_core::enumerate::{self, CurveRecord, EnumerateOptions};
use shimura_core::quadfield::make_field;
use shimura_core::tables::{self, GoldenRow};
use shimura_core::Error;

#[derive(Parser, Debug)]
#[command(name = "shimura", version, about = "Signatures and enumeration of Shimura curves of small genus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Signature of one curve X_0^D(N), with the intermediate counts.
    Signature(SignatureArgs),
    /// All curves of genus at most g over one field or all fields of a degree.
    Enumerate(EnumerateArgs),
    /// Compare an enumeration against the golden table.
    Verify(VerifyArgs),
    /// Real quadratic fields allowed by the root discriminant bound.
    ScanFields(ScanArgs),
    /// Rows of the golden table, any degree.
    Lookup(LookupArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum CalibrationArg {
    /// 1 / h(F)
    OverH,
    /// 1 / (2 h(F))
    OverTwoH,
}

impl From<CalibrationArg> for Calibration {
    fn from(c: CalibrationArg) -> Self {
        match c {
            CalibrationArg::OverH => Calibration::OverH,
            CalibrationArg::OverTwoH => Calibration::OverTwoH,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Arith {
    /// Constant in front of the elliptic-count sum.
    #[arg(long, value_enum, default_value = "over-h")]
    calibration: CalibrationArg,
    /// File of unit-index overrides: d_F,q,conductor_norm,conductor,Q,index per line.
    #[arg(long)]
    overrides: Option<PathBuf>,
    /// Print every intermediate quantity.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args, Debug)]
struct SignatureArgs {
    /// Discriminant of the base field (1 for Q).
    #[arg(long = "dF", allow_hyphen_values = true)]
    d_f: i64,
    /// Norm of the quaternion discriminant.
    #[arg(long = "D")]
    disc: u64,
    /// Norm of the level.
    #[arg(long = "N")]
    level: u64,
    /// Disambiguates pairs sharing norms: rational, square, split, or an ideal such as P7_3^2.
    #[arg(long)]
    label: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    arith: Arith,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    degree: u8,
    #[arg(long = "dF", allow_hyphen_values = true)]
    d_f: Option<i64>,
    /// Every field of the degree (the default when no --dF is given).
    #[arg(long)]
    all_fields: bool,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=2))]
    genus: u32,
    /// Solve for primes in the discriminant search instead of testing each.
    #[arg(long)]
    refine: bool,
    /// Over Q, leave out the modular curves D = 1.
    #[arg(long)]
    no_modular: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the table here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    arith: Arith,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    degree: u8,
    #[arg(long = "dF", allow_hyphen_values = true)]
    d_f: Option<i64>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=2))]
    genus: u32,
    #[arg(long)]
    refine: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the diff report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Golden CSV to compare against (default: $SHIMURA_GOLDEN_PATH or the bundled table).
    #[arg(long)]
    golden: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    arith: Arith,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=2))]
    genus: u32,
    /// Print the root discriminant bound for degrees 2 to 10.
    #[arg(long)]
    show_bound: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct LookupArgs {
    #[arg(long = "dF", allow_hyphen_values = true)]
    d_f: i64,
    #[arg(long = "D")]
    disc: u64,
    #[arg(long = "N")]
    level: u64,
    #[arg(long)]
    label: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    golden: Option<PathBuf>,
}

enum Failure {
    Diff,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Signature(a) => cmd_signature(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::ScanFields(a) => cmd_scan(a),
        Command::Lookup(a) => cmd_lookup(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Diff) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn load_overrides(arith: &Arith) -> Result<Option<UnitOverrides>, Error> {
    arith.overrides.as_deref().map(UnitOverrides::load).transpose()
}

fn context(d_f: i64, arith: &Arith, overrides: Option<&UnitOverrides>) -> Result<FieldContext, Error> {
    FieldContext::with_options(make_field(d_f)?, overrides, arith.calibration.into())
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn matches_label(ctx: &FieldContext, x: &ShimuraDatum, label: &str) -> bool {
    let field = &ctx.field;
    let conj = curves::conjugate(field, x);
    enumerate::shape_label(field, &x.level) == label
        || [x, &conj].iter().any(|y| y.level.to_string() == label || y.disc.to_string() == label)
}

fn cmd_signature(a: SignatureArgs) -> CliResult {
    let overrides = load_overrides(&a.arith)?;
    let ctx = context(a.d_f, &a.arith, overrides.as_ref())?;
    let field = &ctx.field;
    if field.ideals_of_norm(a.disc).is_empty() || field.ideals_of_norm(a.level).is_empty() {
        return Err(Error::NotFound(format!("no ideals of norm D={} and N={} over d_F={}", a.disc, a.level, a.d_f)).into());
    }
    let mut data = curves::data_with_norms(field, a.disc, a.level);
    if data.is_empty() {
        // report why the obvious candidate is invalid
        let d = field.ideals_of_norm(a.disc)[0].clone();
        let n = field.ideals_of_norm(a.level)[0].clone();
        curves::validate(field, &d, &n)?;
        return Err(Error::NotFound(format!("no valid discriminant/level pair with D={} N={}", a.disc, a.level)).into());
    }
    if let Some(l) = &a.label {
        data.retain(|x| matches_label(&ctx, x, l));
        if data.is_empty() {
            return Err(Error::NotFound(format!("no pair with label {l}")).into());
        }
    }
    let mut results = Vec::new();
    for x in &data {
        results.push((x.clone(), curves::signature_detailed(&ctx, x)?));
    }
    let distinct: std::collections::BTreeSet<String> = results.iter().map(|(_, (s, _))| s.render()).collect();
    if distinct.len() > 1 {
        let cands = results
            .iter()
            .map(|(x, (s, _))| format!("{} (D={} N={}) {}", enumerate::shape_label(field, &x.level), x.disc, x.level, s))
            .collect();
        return Err(Error::AmbiguousIdeal(cands).into());
    }
    let (x, (sig, breakdown)) = &results[0];
    match a.format {
        Format::Json => {
            let counts: Vec<_> = breakdown.iter().map(|b| json!({"q": b.q, "e_q": b.value})).collect();
            let v = json!({
                "d_F": a.d_f,
                "D": x.disc.to_string(),
                "N": x.level.to_string(),
                "signature": sig.render(),
                "genus": sig.genus,
                "area": sig.area.to_string(),
                "cusps": sig.cusps,
                "elliptic": counts,
            });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Csv => {
            let row = GoldenRow {
                degree: field.degree,
                d_f: field.d_f,
                field_index: 0,
                disc_norm: a.disc,
                level_norm: a.level,
                label: a.label.clone().unwrap_or_default(),
                signature: sig.render(),
                genus: sig.genus,
            };
            print!("{}", tables::to_csv(&[row]));
        }
        Format::Text => {
            println!("{sig}");
            println!("d_F = {}  D = {}  N = {}", a.d_f, x.disc, x.level);
            println!("area = {}", sig.area);
            if results.len() > 1 {
                println!("{} Galois orbits of pairs with these norms share this signature", results.len());
            }
            for b in breakdown {
                if a.arith.verbose {
                    print!("{b}");
                } else {
                    println!("e_{} = {}", b.q, b.value);
                }
            }
            if sig.cusps > 0 {
                println!("cusps = {}", sig.cusps);
            }
            if a.arith.verbose {
                for (k, orders) in &ctx.cm {
                    println!("K_{}: h(K) = {}, w(K) = {}, conductor of Z_F[zeta] = {}", k.q, k.h_k, k.w_k, k.conductor);
                    for r in orders {
                        println!("  {r}");
                    }
                }
            }
        }
    }
    Ok(())
}

fn fields_for(degree: u8, d_f: Option<i64>) -> Result<Vec<i64>, Error> {
    match (degree, d_f) {
        (1, None) | (1, Some(1)) => Ok(vec![1]),
        (1, Some(d)) => Err(Error::InvalidInput(format!("degree 1 has only d_F = 1, not {d}"))),
        (_, Some(1)) => Err(Error::InvalidInput("d_F = 1 is the degree 1 field".into())),
        (_, Some(d)) => {
            make_field(d)?;
            Ok(vec![d])
        }
        (_, None) => Ok(enumerate::field_scan(2)),
    }
}

fn run_enumeration(
    fields: &[i64],
    genus: u32,
    opts: EnumerateOptions,
    arith: &Arith,
    jobs: usize,
) -> Result<Vec<CurveRecord>, Error> {
    let overrides = load_overrides(arith)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let per_field: Vec<Result<Vec<CurveRecord>, Error>> = pool.install(|| {
        fields
            .par_iter()
            .map(|&d| {
                let ctx = context(d, arith, overrides.as_ref())?;
                let recs = enumerate::enumerate_all(&ctx, genus, opts)?;
                if arith.verbose {
                    eprintln!("d_F = {d}: {} curves", recs.len());
                }
                Ok(recs)
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in per_field {
        out.extend(r?);
    }
    out.sort_by(|a, b| (a.d_f, a.disc.norm, a.level.norm, &a.label, &a.signature).cmp(&(b.d_f, b.disc.norm, b.level.norm, &b.label, &b.signature)));
    Ok(out)
}

fn render_rows(rows: &[GoldenRow], format: Format) -> String {
    match format {
        Format::Csv => tables::to_csv(rows),
        Format::Json => tables::to_json(rows) + "\n",
        Format::Text => {
            let mut s = String::new();
            for r in rows {
                let l = if r.label.is_empty() { String::new() } else { format!(" [{}]", r.label) };
                s += &format!("{:>8} {:>5} {:>5}{} {}\n", r.d_f, r.disc_norm, r.level_norm, l, r.signature);
            }
            s
        }
    }
}

fn cmd_enumerate(a: EnumerateArgs) -> CliResult {
    if a.all_fields && a.d_f.is_some() {
        return Err(Error::InvalidInput("--all-fields and --dF are exclusive".into()).into());
    }
    let fields = fields_for(a.degree, a.d_f)?;
    let opts = EnumerateOptions { refine: a.refine, include_modular: !a.no_modular };
    let recs = run_enumeration(&fields, a.genus, opts, &a.arith, a.jobs)?;
    let rows: Vec<GoldenRow> = recs.iter().map(GoldenRow::from_record).collect();
    emit(&render_rows(&rows, a.format), a.output.as_ref())?;
    let hist = tables::genus_histogram(&rows);
    let h: Vec<String> = hist.iter().map(|(g, n)| format!("g{g}: {n}")).collect();
    eprintln!("{} curves over {} field(s) ({})", rows.len(), fields.len(), h.join(", "));
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let fields = fields_for(a.degree, a.d_f)?;
    let golden = match &a.golden {
        Some(p) => tables::parse_tables(p)?,
        None => tables::load_golden()?,
    };
    let golden: Vec<GoldenRow> = golden.into_iter().filter(|r| r.genus <= a.genus as u64).collect();
    let opts = EnumerateOptions { refine: a.refine, include_modular: true };
    let recs = run_enumeration(&fields, a.genus, opts, &a.arith, a.jobs)?;
    let filter = a.d_f.map(|_| fields.as_slice());
    let diff = tables::verify(&recs, &golden, a.degree, filter);
    let text = match a.format {
        Format::Json => diff.to_json() + "\n",
        _ => diff.to_string(),
    };
    print!("{text}");
    if let Some(p) = &a.report {
        std::fs::write(p, &text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    if diff.is_empty() {
        Ok(())
    } else {
        if let Some(p) = &a.report {
            eprintln!("verification failed; report written to {}", p.display());
        }
        Err(Failure::Diff)
    }
}

fn cmd_scan(a: ScanArgs) -> CliResult {
    let fields = enumerate::field_scan(a.genus);
    let bound = enumerate::sz_bound(2, a.genus);
    match a.format {
        Format::Json => {
            let v = json!({
                "genus": a.genus,
                "bound": bound,
                "count": fields.len(),
                "min": fields.first(),
                "max": fields.last(),
                "fields": fields,
            });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Csv => {
            println!("d_F");
            for d in &fields {
                println!("{d}");
            }
        }
        Format::Text => {
            if a.show_bound {
                // rounded up, so the printed value is still an upper bound
                for n in 2..=10 {
                    let b = (enumerate::sz_bound(n, a.genus) * 1000.0).ceil() / 1000.0;
                    println!("n = {n:>2}: root discriminant < {b:.3}");
                }
            }
            match (fields.first(), fields.last()) {
                (Some(lo), Some(hi)) => println!("{} fields, min {lo}, max {hi} (sqrt(d_F) < {bound:.4})", fields.len()),
                _ => println!("0 fields (sqrt(d_F) < {bound:.4})"),
            }
        }
    }
    Ok(())
}

fn cmd_lookup(a: LookupArgs) -> CliResult {
    let golden = match &a.golden {
        Some(p) => tables::parse_tables(p)?,
        None => tables::load_golden()?,
    };
    let hits = tables::lookup(&golden, a.d_f, a.disc, a.level, a.label.as_deref())?;
    let rows: Vec<GoldenRow> = hits.into_iter().cloned().collect();
    print!("{}", render_rows(&rows, a.format));
    Ok(())
}

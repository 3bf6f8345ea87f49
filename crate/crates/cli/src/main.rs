mod error;
mod io;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use looptool::exactfield::serial::{parse_field, parse_standalone};
use looptool::exactfield::{ComplexBall, FieldElement, NumberField};
use looptool::feynman::{loop_invariant, DiagramSpec};
use looptool::fixtures::{by_name, KnotFixture, Unit};
use looptool::laurent::{LaurentPolynomial, RationalFunction};
use looptool::nz::TwistedNZData;
use looptool::powersum::{cover_unknowns, leading_asymptotic, reconstruct_p};
use looptool::rootsum::{av_exact, av_numeric};
use serde_json::Value;

use error::{CliError, CliResult};

/// Exact loop invariants of cyclic covers.
#[derive(Parser)]
#[command(name = "looptool", version)]
struct Cli {
    /// Working precision in decimal digits for numeric cross-checks.
    #[arg(long, global = true, env = "LOOPTOOL_PREC", default_value_t = 100)]
    prec: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact sum of a rational function over the n-th roots of unity.
    Avg {
        /// Rational function JSON, or a knot file whose phi is averaged.
        #[arg(long = "f")]
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Loop order when the file is a knot file.
        #[arg(long = "loop")]
        ell: Option<usize>,
        /// Also sum numerically at this many digits (default: --prec).
        #[arg(long, num_args = 0..=1)]
        numeric_check: Option<Option<u32>>,
    },
    /// Table of loop invariants of the n-fold covers, n = 1..nmax.
    Knot {
        /// Fixture name (4_1, 5_2), a knot JSON file, or an NZ data file.
        #[arg(long)]
        knot: String,
        #[arg(long = "loop", default_value_t = 2)]
        ell: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
        #[arg(long, value_enum, default_value_t = Mode::Average)]
        mode: Mode,
        /// Diagram file(s) for NZ input.
        #[arg(long)]
        diagrams: Option<PathBuf>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fits a cover polynomial to consecutive values.
    Reconstruct {
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        roots: PathBuf,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        r: usize,
        /// Number of further values used as held-out checks (default: all).
        #[arg(long)]
        holdout: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded self-checks of the library.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Writes a built-in knot as JSON.
    Fixture {
        #[arg(long)]
        knot: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Average,
    Closed,
    Series,
    Powersum,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Circulant,
    Feynman,
    Quadratic,
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verify) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Avg {
            file,
            n,
            ell,
            numeric_check,
        } => {
            let digits = numeric_check.map(|d| d.unwrap_or(cli.prec));
            cmd_avg(&file, n, ell, digits)
        }
        Command::Knot {
            knot,
            ell,
            nmax,
            mode,
            diagrams,
            out,
        } => cmd_knot(&knot, ell, nmax, mode, diagrams.as_deref(), out.as_deref()),
        Command::Reconstruct {
            values,
            roots,
            ell,
            r,
            holdout,
            out,
        } => cmd_reconstruct(&values, &roots, ell, r, holdout, out.as_deref(), cli.prec),
        Command::Verify { suite, seed } => cmd_verify(suite, seed, cli.prec),
        Command::Fixture { knot, out } => {
            let k = load_knot(&knot)?;
            emit(out.as_deref(), &format!("{:#}\n", k.to_json()))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => io::write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn is_builtin(spec: &str) -> bool {
    matches!(spec, "4_1" | "41" | "5_2" | "52")
}

fn load_knot(spec: &str) -> CliResult<KnotFixture> {
    let path = Path::new(spec);
    if is_builtin(spec) {
        return Ok(by_name(spec)?);
    }
    if !path.exists() {
        return Err(CliError::Parse(format!(
            "{spec:?} is neither a known knot nor a file"
        )));
    }
    Ok(KnotFixture::from_json(&io::read_json(path)?)?)
}

fn approx(b: &ComplexBall) -> String {
    let (re, im) = (b.re_decimal(20), b.im_decimal(20));
    format!("{re} + {im}*i")
}

fn cmd_avg(file: &Path, n: u64, ell: Option<usize>, digits: Option<u32>) -> CliResult<()> {
    let v = io::read_json(file)?;
    let (f, unit, root_index) = if v.get("phi").is_some() {
        let k = KnotFixture::from_json(&v)?;
        let loops = k.loops();
        let ell = match ell {
            Some(l) => l,
            None if loops.len() == 1 => loops[0],
            None => {
                return Err(CliError::Parse(format!(
                    "file has loops {loops:?}; pick one with --loop"
                )))
            }
        };
        (k.phi_function(ell, n)?, k.unit(ell)?, k.root_index())
    } else {
        let (field, root_index) = match v.get("field") {
            Some(fv) => parse_field(fv)?,
            None => (NumberField::rationals(), 0),
        };
        let num = v
            .get("numerator")
            .ok_or_else(|| CliError::Parse("missing \"numerator\"".into()))?;
        let den = v
            .get("denominator")
            .ok_or_else(|| CliError::Parse("missing \"denominator\"".into()))?;
        let f = RationalFunction::new(
            LaurentPolynomial::from_json(num, &field)?,
            LaurentPolynomial::from_json(den, &field)?,
        )?;
        let unit = match v.get("unit").and_then(Value::as_str) {
            Some(s) => Unit::parse(s)?,
            None => Unit::One,
        };
        (f, unit, root_index)
    };
    let value = av_exact(&f, n)?;
    println!("{}", io::show(&value, unit));
    if let Some(d) = digits {
        let numeric = av_numeric(&f, n, root_index, d)?;
        let exact = value.embed(root_index, d)?;
        println!("~ {}", approx(&numeric));
        if !numeric.overlaps(&exact) {
            return Err(CliError::CrossCheck(format!(
                "numeric sum {} vs exact {}",
                approx(&numeric),
                approx(&exact)
            )));
        }
    }
    Ok(())
}

/// Evaluates `f` on 1..=nmax using every available core.
fn par_values<F>(nmax: u64, f: F) -> CliResult<Vec<(u64, FieldElement)>>
where
    F: Fn(u64) -> looptool::Result<FieldElement> + Sync,
{
    let workers = std::thread::available_parallelism()
        .map_or(1, |p| p.get())
        .min(nmax as usize);
    let mut out: Vec<(u64, looptool::Result<FieldElement>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                let f = &f;
                s.spawn(move || {
                    (1..=nmax)
                        .filter(|n| n % workers as u64 == w)
                        .map(|n| (n, f(n)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    out.sort_by_key(|(n, _)| *n);
    out.into_iter().map(|(n, v)| Ok((n, v?))).collect()
}

fn cmd_knot(
    spec: &str,
    ell: usize,
    nmax: u64,
    mode: Mode,
    diagrams: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<()> {
    let path = Path::new(spec);
    if !is_builtin(spec) && path.exists() {
        let v = io::read_json(path)?;
        if v.get("A").is_some() {
            let Some(dpath) = diagrams else {
                return Err(CliError::Parse("NZ input needs --diagrams".into()));
            };
            return knot_from_nz(&v, dpath, ell, nmax, out);
        }
    }
    let k = load_knot(spec)?;
    let unit = k.unit(ell)?;
    let splitting_unit = Unit::One;
    let average = || par_values(nmax, |n| k.phi_via_average(ell, n));
    let closed = || {
        if !k.has_closed_form() {
            return Err(CliError::Parse(format!("{} has no closed form", k.name())));
        }
        par_values(nmax, |n| k.phi_closed_form(ell, n))
    };
    let series = || -> CliResult<Vec<(u64, FieldElement)>> {
        let coeffs = k.series_values(ell, nmax as usize + 1)?;
        (1..=nmax)
            .map(|n| {
                let nf = k.norm_factor(n).pow(ell as i64 - 1)?;
                Ok((n, coeffs[n as usize].checked_div(&nf)?))
            })
            .collect()
    };
    let power = || par_values(nmax, |n| k.phi_via_power_sums(ell, n));
    let mut w: Box<dyn std::io::Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?),
        None => Box::new(std::io::stdout().lock()),
    };
    match mode {
        Mode::Average => io::write_values(&mut w, &average()?, unit),
        Mode::Closed => io::write_values(&mut w, &closed()?, unit),
        Mode::Series => io::write_values(&mut w, &series()?, unit),
        Mode::Powersum => io::write_values(&mut w, &power()?, splitting_unit),
        Mode::All => {
            let base = average()?;
            let mut methods: Vec<(&str, Vec<(u64, FieldElement)>)> = Vec::new();
            if k.has_closed_form() {
                methods.push(("closed", closed()?));
            }
            if k.series(ell).is_some() {
                methods.push(("series", series()?));
            }
            let in_splitting = k.splitting().is_ok() && unit == Unit::One;
            if in_splitting {
                methods.push(("powersum", power()?));
            }
            for (name, vals) in &methods {
                for ((n, a), (_, b)) in base.iter().zip(vals) {
                    let a = if *name == "powersum" {
                        k.to_splitting(a)?
                    } else {
                        a.clone()
                    };
                    if &a != b {
                        return Err(CliError::CrossCheck(format!(
                            "n = {n}: average {a} but {name} {b}"
                        )));
                    }
                }
            }
            io::write_values(&mut w, &base, unit)?;
            let names: Vec<&str> = methods.iter().map(|(m, _)| *m).collect();
            eprintln!(
                "average agrees with {} for n = 1..{nmax}",
                if names.is_empty() {
                    "nothing else".into()
                } else {
                    names.join(", ")
                }
            );
            Ok(())
        }
    }
}

fn knot_from_nz(
    v: &Value,
    dpath: &Path,
    ell: usize,
    nmax: u64,
    out: Option<&Path>,
) -> CliResult<()> {
    let data = TwistedNZData::from_json(v)?;
    let dv = io::read_json(dpath)?;
    let specs = match &dv {
        Value::Array(items) => items
            .iter()
            .map(|d| DiagramSpec::from_json(d, data.field()))
            .collect::<Result<Vec<_>, _>>()?,
        one => vec![DiagramSpec::from_json(one, data.field())?],
    };
    let gamma0 = specs.iter().find_map(|s| s.gamma0.clone());
    let diagrams: Vec<_> = specs.into_iter().map(|s| (s.diagram, s.factors)).collect();
    let values = par_values(nmax, |n| {
        loop_invariant(&data, n, &diagrams, gamma0.as_ref(), ell as i32)
    })?;
    let mut w: Box<dyn std::io::Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?),
        None => Box::new(std::io::stdout().lock()),
    };
    io::write_values(&mut w, &values, Unit::One)
}

fn read_roots(path: &Path) -> CliResult<(Vec<FieldElement>, usize)> {
    let v = io::read_json(path)?;
    let items = match &v {
        Value::Array(items) => items.clone(),
        Value::Object(m) => m
            .get("roots")
            .and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| CliError::Parse("roots file needs a \"roots\" array".into()))?,
        _ => return Err(CliError::Parse("roots file must be a JSON array".into())),
    };
    if items.is_empty() {
        return Err(CliError::Parse("no roots given".into()));
    }
    let parsed = items
        .iter()
        .map(parse_standalone)
        .collect::<Result<Vec<_>, _>>()?;
    let root_index = parsed[0].1;
    let field = parsed[0].0.field().clone();
    if parsed
        .iter()
        .any(|(r, i)| r.field() != &field || *i != root_index)
    {
        return Err(CliError::Parse(
            "all roots must share one field and embedding".into(),
        ));
    }
    Ok((parsed.into_iter().map(|(r, _)| r).collect(), root_index))
}

fn cmd_reconstruct(
    values: &Path,
    roots: &Path,
    ell: usize,
    r: usize,
    holdout: Option<usize>,
    out: Option<&Path>,
    digits: u32,
) -> CliResult<()> {
    if ell < 2 {
        return Err(CliError::Parse("--ell must be at least 2".into()));
    }
    let (roots, root_index) = read_roots(roots)?;
    if roots.len() != r {
        return Err(CliError::Parse(format!(
            "--r {r} but the roots file lists {}",
            roots.len()
        )));
    }
    let field = roots[0].field().clone();
    let (mut vals, unit) = io::read_values(values, &field)?;
    let needed = cover_unknowns(r, ell);
    if let Some(h) = holdout {
        vals.truncate(needed + h);
    }
    let rec = reconstruct_p(&vals, &roots, ell)?;
    let mut doc = rec.poly.to_json(root_index);
    if unit != Unit::One {
        doc["unit"] = Value::String(unit.as_str().into());
    }
    emit(out, &format!("{doc:#}\n"))?;
    let held: Vec<u64> = rec.residuals.iter().map(|(n, _)| *n).collect();
    eprintln!(
        "fitted {needed} coefficients from n = {}..{}; {} held-out values",
        vals[0].0,
        vals[needed - 1].0,
        held.len()
    );
    if let Ok(psi) = leading_asymptotic(&rec.poly, root_index) {
        let scale = psi
            .embed(root_index, digits.min(30))
            .map(|b| approx(&b))
            .unwrap_or_default();
        eprintln!("leading asymptotic: {} ~ {scale}", io::show(&psi, unit));
    }
    let bad = rec.mismatches();
    if !bad.is_empty() {
        return Err(CliError::Holdout(bad));
    }
    Ok(())
}

fn cmd_verify(suite: Suite, seed: u64, digits: u32) -> CliResult<()> {
    let names: Vec<&str> = match suite {
        Suite::All => verify::SUITES.to_vec(),
        Suite::Identities => vec!["identities"],
        Suite::Circulant => vec!["circulant"],
        Suite::Feynman => vec!["feynman"],
        Suite::Quadratic => vec!["quadratic"],
    };
    let mut failed = false;
    for name in names {
        match verify::run(name, seed, digits) {
            Ok(checks) => println!("{name}: PASS ({checks} checks)"),
            Err(why) => {
                failed = true;
                println!("{name}: FAIL {why}");
                println!(
                    "  reproduce: looptool verify --suite {name} --seed {seed} --prec {digits}"
                );
            }
        }
    }
    if failed {
        Err(CliError::Verify)
    } else {
        Ok(())
    }
}

//! The `gerbecalc` command line.
//!
//! Exit codes: 0 success, 1 domain failure (validation, equivalence,
//! precondition), 2 usage or parse error. `GERBECALC_TOL` overrides the default
//! tolerance of `validate` and `equiv`; an explicit `--tol` wins over both.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bicomplex::{DbarSign, GaugePotential};
use crate::builders::{Example, ExampleSpec};
use crate::deligne::{charge, gauge_equivalent, validate_cocycle, GerbeDatum, EQUIVALENCE_TOL, VALIDATION_TOL};
use crate::error::Error;
use crate::io::{datum_from_str, datum_to_string, witness_to_string};
use crate::rng::Lcg64;
use crate::selfcheck;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const TOL_ENV: &str = "GERBECALC_TOL";

#[derive(Parser, Debug)]
#[command(name = "gerbecalc", version, about = "Discrete Čech–de Rham calculus for bundles and gerbes with connection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an example datum, print its summary and optionally write it.
    Demo {
        /// minus1, monopole or gerbopole
        name: Example,
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Winding of the transition function.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        winding: i32,
        /// Emit the zero datum on the same complex and cover.
        #[arg(long, conflicts_with = "perturb_gauge")]
        trivial: bool,
        /// Apply a seeded random gauge transformation D F.
        #[arg(long)]
        perturb_gauge: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Check D H = 0 and print residuals per bidegree.
    Validate {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the integer charge of a datum.
    Charge { file: PathBuf },
    /// Search for a gauge transformation relating two data.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the witness F with b - a = D F.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test the double-complex identities on seeded random data.
    Selfcheck {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, hide = true)]
        break_sign: bool,
    },
}

/// Failure carrying its exit code.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Parse(_)) { EXIT_USAGE } else { EXIT_FAILURE };
        Exit(code, e.to_string())
    }
}

impl From<std::io::Error> for Exit {
    fn from(e: std::io::Error) -> Self {
        Exit(EXIT_USAGE, e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Exit>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Demo { name, m, out: path, winding, trivial, perturb_gauge, seed } => {
            demo(out, name, m, path.as_deref(), winding, trivial, perturb_gauge.then_some(seed))
        }
        Command::Validate { file, tol } => tolerance(tol, VALIDATION_TOL).and_then(|tol| validate(out, &file, tol)),
        Command::Charge { file } => charge_cmd(out, &file),
        Command::Equiv { a, b, tol, out: path } => {
            tolerance(tol, EQUIVALENCE_TOL).and_then(|tol| equiv(out, &a, &b, tol, path.as_deref()))
        }
        Command::Selfcheck { seed, trials, break_sign } => selfcheck_cmd(out, err, seed, trials, break_sign),
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn tolerance(flag: Option<f64>, default: f64) -> std::result::Result<f64, Exit> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| Exit(EXIT_USAGE, format!("{TOL_ENV}={s:?} is not a number")))?,
            Err(_) => default,
        },
    };
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(Exit(EXIT_USAGE, format!("tolerance must be positive and finite, got {tol}")))
    }
}

fn read_datum(path: &Path) -> std::result::Result<GerbeDatum, Exit> {
    let text = std::fs::read_to_string(path).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    datum_from_str(&text).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Exit> {
    std::fs::write(path, text).map_err(|e| Exit(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

fn format_charge(q: f64) -> String {
    let q = if q.abs() < 5e-10 { 0.0 } else { q };
    format!("{q:.9}")
}

fn demo(
    out: &mut dyn Write,
    name: Example,
    m: usize,
    path: Option<&Path>,
    winding: i32,
    trivial: bool,
    perturb_seed: Option<u64>,
) -> CmdResult {
    let spec = ExampleSpec { which: name, resolution: m, winding };
    let mut h = spec.build()?;
    if trivial {
        h = h.trivial_like();
    }
    if let Some(seed) = perturb_seed {
        let mut rng = Lcg64::new(seed);
        let f = GaugePotential::random(h.degree() - 1, h.cover(), &mut rng, 0.5);
        h = h.gauge_transform(&f)?;
    }
    let cover = h.cover();
    let complex = cover.complex();
    writeln!(out, "example: {name} (m = {m}, winding = {winding})")?;
    writeln!(out, "level: {}", h.level())?;
    writeln!(
        out,
        "complex: {} vertices, {} top {}-simplices",
        complex.vertex_count(),
        complex.count(complex.top_dimension()),
        complex.top_dimension()
    )?;
    let max_len = cover.nerve().iter().map(Vec::len).max().unwrap_or(0);
    let counts: Vec<String> =
        (1..=max_len).map(|n| cover.nerve().iter().filter(|t| t.len() == n).count().to_string()).collect();
    writeln!(out, "nerve: {} (sets, pairs, ...)", counts.join(", "))?;
    for w in cover.check_good_cover().warnings() {
        writeln!(out, "cover: WARN overlap {:?} has Betti numbers {:?}", w.indices, w.betti)?;
    }
    writeln!(out, "charge: {}", format_charge(charge(&h)?))?;
    if let Some(path) = path {
        write_file(path, &datum_to_string(&h))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn validate(out: &mut dyn Write, file: &Path, tol: f64) -> CmdResult {
    let h = read_datum(file)?;
    let report = validate_cocycle(&h, tol)?;
    writeln!(out, "{report}")?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
}

fn charge_cmd(out: &mut dyn Write, file: &Path) -> CmdResult {
    let h = read_datum(file)?;
    writeln!(out, "{}", format_charge(charge(&h)?))?;
    Ok(EXIT_OK)
}

fn equiv(out: &mut dyn Write, a: &Path, b: &Path, tol: f64, path: Option<&Path>) -> CmdResult {
    let h1 = read_datum(a)?;
    let h2 = read_datum(b)?;
    let result = gauge_equivalent(&h1, &h2, tol)?;
    match &result.witness {
        Some(f) => {
            writeln!(out, "EQUIVALENT (residual {:.3e})", result.residual)?;
            if let Some(path) = path {
                write_file(path, &witness_to_string(f, h1.cover().complex()))?;
            }
            Ok(EXIT_OK)
        }
        None => {
            writeln!(out, "NOT-FOUND (residual {:.3e})", result.residual)?;
            Ok(EXIT_FAILURE)
        }
    }
}

fn selfcheck_cmd(out: &mut dyn Write, err: &mut dyn Write, seed: u64, trials: usize, break_sign: bool) -> CmdResult {
    let rule = if break_sign { DbarSign::Unsigned } else { DbarSign::Alternating };
    if trials == 0 {
        writeln!(err, "warning: 0 trials requested, nothing was checked")?;
    }
    let summary = selfcheck::run(seed, trials, rule)?;
    for (id, r) in selfcheck::Identity::ALL.iter().zip(summary.max_residuals) {
        writeln!(out, "max residual {id}: {r:.3e}")?;
    }
    writeln!(out, "{}/{} passed", summary.passed, summary.trials)?;
    for c in summary.failures.iter().take(5) {
        writeln!(out, "counterexample {c}")?;
    }
    Ok(if summary.all_passed() { EXIT_OK } else { EXIT_FAILURE })
}

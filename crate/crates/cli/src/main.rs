// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qpencil::jost::{jost, Side};
use qpencil::pencil::{apply_pencil, z_to_lambda, CoefficientTriple, IndexedSeq};
use qpencil::principal::principal_vectors;
use qpencil::resolvent::{apply_resolvent, default_m0, green_kernel, resolvent_norm_probe};
use qpencil::spectrum::{phi, spectrum_report, SpectralZero};
use qpencil::transforms::{
    from_klein_gordon, from_sturm_liouville, q_spectrum, q_to_discrete, to_sturm_liouville, KleinGordonForm, QPencil,
    SturmLiouvilleForm,
};
use qpencil::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

mod format;

#[derive(Parser, Debug)]
#[command(name = "qpencil", version, about = "Spectral analysis of quadratic difference pencils")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Worker threads for grid evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, default_value_t = 200)]
    grid_re: usize,
    #[arg(long, global = true, default_value_t = 100)]
    grid_im: usize,
    /// How to read the input file.
    #[arg(long, global = true, value_enum, default_value_t = Kind::Pencil)]
    kind: Kind,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Pencil,
    Sturm,
    Kg,
    Q,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues, spectral singularities and continuous spectrum.
    Analyze {
        /// Input JSON, `-` for stdin.
        input: String,
        /// Also write a CSV grid of log10|Phi| over [-pi, 3pi] x (0, im-max].
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = 3.0)]
        im_max: f64,
    },
    /// Jost solution samples on a window.
    Jost {
        input: String,
        /// Spectral point as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, value_enum, default_value_t = SideArg::Plus)]
        side: SideArg,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<i64>,
    },
    /// A Green kernel entry and the resolvent norm probe.
    Resolvent {
        input: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        /// Apply the resolvent to the vector `{"start": n, "values": [...]}` in this file.
        #[arg(long)]
        rhs_file: Option<String>,
    },
    /// Principal vectors at a zero of the characteristic function.
    Principal {
        input: String,
        /// Spectral parameter as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 1)]
        multiplicity: usize,
    },
    /// Convert between the pencil and its Sturm–Liouville, Klein–Gordon or
    /// q-difference forms.
    Transform {
        input: String,
        #[arg(long, value_enum)]
        mode: Mode,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sturm,
    Kg,
    Q,
}

enum Failure {
    Input(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Contract(msg) => Failure::Input(msg),
            other => Failure::Numeric(other),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_input(path: &str) -> Outcome<String> {
    let mut text = String::new();
    let res = if path == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))?;
    Ok(text)
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Outcome<T> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("invalid input: {e}")))
}

fn parse_complex(s: &str) -> Outcome<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| Failure::Input(format!("bad complex number {s:?}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Failure::Input(format!("expected re,im, got {s:?}"))),
    }
}

/// The pencil described by the input, plus the factor between its `λ` and
/// the input's own spectral parameter.
fn load_pencil(kind: Kind, text: &str) -> Outcome<(CoefficientTriple, f64)> {
    Ok(match kind {
        Kind::Pencil => (parse(text)?, 1.0),
        Kind::Sturm => (from_sturm_liouville(&parse::<SturmLiouvilleForm>(text)?)?, 1.0),
        Kind::Kg => (from_klein_gordon(&parse::<KleinGordonForm>(text)?)?, 1.0),
        Kind::Q => q_to_discrete(&parse::<QPencil>(text)?)?,
    })
}

fn sort_zeros(v: &mut [SpectralZero]) {
    v.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
}

fn analyze(cli: &Cli, input: &str, grid: Option<&PathBuf>, im_max: f64) -> Outcome<Value> {
    let text = read_input(input)?;
    let (coeffs, _) = load_pencil(cli.kind, &text)?;
    let mut report = if cli.kind == Kind::Q {
        serde_json::to_value(q_spectrum(&parse::<QPencil>(&text)?, cli.tol)?).unwrap()
    } else {
        serde_json::to_value(spectrum_report(&coeffs, cli.tol)?).unwrap()
    };
    for key in ["eigenvalues", "spectral_singularities", "boundary_indeterminate"] {
        let mut zeros: Vec<SpectralZero> = serde_json::from_value(report[key].take()).unwrap();
        sort_zeros(&mut zeros);
        report[key] = serde_json::to_value(zeros).unwrap();
    }
    if let Some(path) = grid {
        write_grid(cli, &coeffs, im_max, path)?;
    }
    Ok(json!({ "task": "analyze", "kind": kind_tag(cli.kind), "report": report }))
}

fn kind_tag(kind: Kind) -> &'static str {
    match kind {
        Kind::Pencil => "pencil",
        Kind::Sturm => "sturm",
        Kind::Kg => "kg",
        Kind::Q => "q",
    }
}

fn write_grid(cli: &Cli, coeffs: &CoefficientTriple, im_max: f64, path: &PathBuf) -> Outcome<()> {
    if cli.grid_re < 2 || cli.grid_im < 1 || !(im_max > 0.0) {
        return Err(Failure::Input("grid needs grid-re ≥ 2, grid-im ≥ 1 and im-max > 0".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))?;
    let (nr, ni) = (cli.grid_re, cli.grid_im);
    let rows: Vec<String> = pool.install(|| {
        (0..ni * nr)
            .into_par_iter()
            .map(|k| {
                let (j, i) = (k / nr, k % nr);
                let z = Complex64::new(-PI + 4.0 * PI * i as f64 / (nr - 1) as f64, im_max * (j + 1) as f64 / ni as f64);
                let v = phi(coeffs, z).norm().log10();
                format!("{},{},{}", format::sig(z.re), format::sig(z.im), format::sig(v))
            })
            .collect()
    });
    let mut csv = String::from("Re z,Im z,log10|Phi|\n");
    for r in rows {
        csv.push_str(&r);
        csv.push('\n');
    }
    fs::write(path, csv).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Outcome<Value> {
    match &cli.command {
        Command::Analyze { input, grid, im_max } => analyze(cli, input, grid.as_ref(), *im_max),
        Command::Jost { input, z, side, lo, hi } => {
            let (coeffs, _) = load_pencil(cli.kind, &read_input(input)?)?;
            let z = parse_complex(z)?;
            let side = match side {
                SideArg::Plus => Side::Plus,
                SideArg::Minus => Side::Minus,
            };
            let lo = lo.unwrap_or(coeffs.n_min() - 2);
            let hi = hi.unwrap_or(coeffs.n_max() + 2);
            let f = jost(&coeffs, z, side, lo, hi)?;
            let values: Vec<Value> = f.values().iter().map(|(n, v)| json!({ "n": n, "value": v })).collect();
            Ok(json!({
                "task": "jost",
                "z": z,
                "lambda": z_to_lambda(z),
                "side": side,
                "normalization": f.normalization().tag(),
                "values": values,
            }))
        }
        Command::Resolvent {
            input,
            z,
            n,
            m,
            rhs_file,
        } => {
            let (coeffs, _) = load_pencil(cli.kind, &read_input(input)?)?;
            let z = parse_complex(z)?;
            let g = green_kernel(&coeffs, z, *n, *m)?;
            let probe = if z.im > 0.0 {
                Some(resolvent_norm_probe(&coeffs, z, default_m0(&coeffs))?)
            } else {
                None
            };
            let mut out = json!({
                "task": "resolvent",
                "z": z,
                "lambda": z_to_lambda(z),
                "n": n,
                "m": m,
                "kernel": g,
                "norm_probe": probe,
            });
            if let Some(path) = rhs_file {
                let rhs: IndexedSeq = parse(&read_input(path)?)?;
                let y = apply_resolvent(&coeffs, z, &rhs)?;
                let back = apply_pencil(&coeffs, z_to_lambda(z), &y)?;
                let residual = back
                    .iter()
                    .map(|(k, v)| (v - rhs.get(k).unwrap_or_default()).norm())
                    .fold(0.0, f64::max);
                out["solution"] = json!(y);
                out["residual"] = json!(residual);
            }
            Ok(out)
        }
        Command::Principal {
            input,
            lambda,
            multiplicity,
        } => {
            let (coeffs, scale) = load_pencil(cli.kind, &read_input(input)?)?;
            let lambda = parse_complex(lambda)? / scale;
            let stack = principal_vectors(&coeffs, lambda, *multiplicity)?;
            let growth: Vec<String> = stack.growth.iter().map(|g| g.tag()).collect();
            Ok(json!({ "task": "principal", "growth_tags": growth, "stack": stack }))
        }
        Command::Transform { input, mode } => {
            let text = read_input(input)?;
            Ok(match mode {
                Mode::Sturm => {
                    let coeffs: CoefficientTriple = parse(&text)?;
                    json!({ "task": "transform", "mode": "sturm", "sturm_liouville": to_sturm_liouville(&coeffs)? })
                }
                Mode::Kg => {
                    let coeffs = from_klein_gordon(&parse(&text)?)?;
                    json!({ "task": "transform", "mode": "kg", "pencil": coeffs })
                }
                Mode::Q => {
                    let (coeffs, scale) = q_to_discrete(&parse(&text)?)?;
                    json!({ "task": "transform", "mode": "q", "pencil": coeffs, "lambda_scale": scale })
                }
            })
        }
    }
}

fn emit(cli: &Cli, value: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(&format::round(value)).unwrap();
    text.push('\n');
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            println!("{}", json!({ "error": { "kind": "input", "message": msg.trim() } }));
            return ExitCode::from(2);
        }
    };
    let (value, code) = match run(&cli) {
        Ok(v) => (v, 0),
        Err(Failure::Input(msg)) => (json!({ "error": { "kind": "input", "message": msg } }), 2),
        Err(Failure::Numeric(e)) => {
            let mut diag = json!({ "kind": "numeric", "message": e.to_string() });
            if let Error::SpectralPoint { z, phi_abs, nearest } = &e {
                diag["z"] = json!(z);
                diag["phi_abs"] = json!(phi_abs);
                diag["nearest_zero"] = json!(nearest);
            }
            (json!({ "error": diag }), 3)
        }
    };
    if let Err(e) = emit(&cli, &value) {
        eprintln!("qpencil: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

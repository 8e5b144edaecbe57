//! Command-line grammar and its resolution into a validated [`RunConfig`].

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use helstrom::measure::{projective_from_axis, Povm};
use helstrom::{BlochVector, PureFamily, QubitModel, Weight, WeightFamily};

use crate::error::CliError;
use crate::files;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Quantum information by closed form and Lyapunov solve.
    Qfi,
    /// Classical Fisher information of a measurement.
    Fisher,
    /// Audit whether a measurement attains the quantum information.
    Attain,
    /// Write an attaining measurement to a POVM file.
    Optimize,
    /// CSV of qfi, fisher and attainment over a theta range.
    Sweep,
    /// Monte Carlo maximum-likelihood experiment.
    Simulate,
    /// Test whether one measurement can attain at every theta.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodFlag {
    Closed,
    Lyapunov,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ParamFlag {
    Phi,
    Eta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PureFlag {
    Xz,
}

/// Fisher information of one-parameter qubit models.
///
/// Angles are in radians; VAL arguments accept `pi` expressions such as
/// `pi/2`, `-3*pi/4` or `0.25`.
#[derive(Debug, Parser)]
#[command(name = "helstrom", version)]
pub struct Args {
    pub command: Command,

    /// Model description file.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Built-in pure family.
    #[arg(long)]
    pub pure: Option<PureFlag>,
    /// Fixed colatitude; use with `--param phi`.
    #[arg(long, value_name = "VAL", allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Fixed longitude; use with `--param eta`.
    #[arg(long, value_name = "VAL", allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Which Bloch angle is the parameter.
    #[arg(long)]
    pub param: Option<ParamFlag>,
    /// Mixing weight: `const:V`, `affine:A,B` or `sin:A,B`.
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    pub w: Option<String>,

    #[arg(long, value_name = "VAL", allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Inclusive grid `A:B:N` with N >= 2 points.
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    pub theta_range: Option<String>,

    /// POVM description file.
    #[arg(long, value_name = "FILE")]
    pub povm: Option<PathBuf>,
    /// Projective measurement along a unit Bloch axis.
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub axis: Option<String>,

    #[arg(long, default_value = "both")]
    pub method: MethodFlag,
    /// Samples per Monte Carlo experiment.
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    #[arg(long, default_value_t = 400)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub enum Thetas {
    Single(f64),
    Range(Vec<f64>),
}

impl Thetas {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Thetas::Single(t) => vec![*t],
            Thetas::Range(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub model: QubitModel,
    pub thetas: Thetas,
    pub povm: Option<Povm>,
    pub method: MethodFlag,
    pub n_samples: u64,
    pub replications: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Parses a real number or a multiple of pi: `1.5`, `pi`, `-pi/2`, `3*pi/4`, `2pi`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    if body.is_empty() {
        return None;
    }
    let factor = |f: &str| -> Option<f64> {
        if f.eq_ignore_ascii_case("pi") {
            Some(PI)
        } else if let Some(n) = f.strip_suffix("pi").or_else(|| f.strip_suffix("PI")) {
            n.parse::<f64>().ok().map(|x| x * PI)
        } else {
            f.parse::<f64>().ok()
        }
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let mut value = 1.0;
    for f in num.split('*') {
        value *= factor(f)?;
    }
    if let Some(d) = den {
        let d = factor(d)?;
        if d == 0.0 {
            return None;
        }
        value /= d;
    }
    let value = sign * value;
    value.is_finite().then_some(value)
}

fn angle(text: &str, field: &str) -> Result<f64, CliError> {
    parse_angle(text).ok_or_else(|| CliError::config(field, format!("cannot parse `{text}` as an angle")))
}

/// `A:B:N`, inclusive of both ends.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let field = "--theta-range";
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(CliError::config(field, format!("expected A:B:N, got `{text}`")));
    };
    let (a, b) = (angle(a, field)?, angle(b, field)?);
    let n: usize = n
        .parse()
        .map_err(|_| CliError::config(field, format!("count `{n}` is not a positive integer")))?;
    if n < 2 {
        return Err(CliError::config(field, format!("count must be at least 2, got {n}")));
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { b } else { a + step * i as f64 }).collect())
}

fn numbers(text: &str, field: &str, count: usize) -> Result<Vec<f64>, CliError> {
    let vals = text
        .split(',')
        .map(|p| angle(p, field))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.len() != count {
        return Err(CliError::config(field, format!("expected {count} comma-separated values, got {}", vals.len())));
    }
    Ok(vals)
}

pub fn parse_weight(text: &str) -> Result<WeightFamily, CliError> {
    let field = "--w";
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| CliError::config(field, format!("expected KIND:COEFFS, got `{text}`")))?;
    match kind {
        "const" => Ok(WeightFamily::Const {
            value: numbers(rest, field, 1)?[0],
        }),
        "affine" => {
            let v = numbers(rest, field, 2)?;
            Ok(WeightFamily::Affine { a: v[0], b: v[1] })
        }
        "sin" => {
            let v = numbers(rest, field, 2)?;
            Ok(WeightFamily::Sinusoidal { a: v[0], b: v[1] })
        }
        other => Err(CliError::config(
            field,
            format!("unknown weight kind `{other}` (expected const, affine or sin)"),
        )),
    }
}

fn resolve_model(args: &Args) -> Result<QubitModel, CliError> {
    let inline = args.pure.is_some() || args.eta.is_some() || args.phi.is_some() || args.param.is_some();
    if args.model.is_some() && inline {
        return Err(CliError::config("--model", "give either a model file or an inline model, not both"));
    }
    let mut model = if let Some(path) = &args.model {
        files::read_model(path)?
    } else if args.pure.is_some() {
        if args.eta.is_some() || args.phi.is_some() || args.param.is_some() {
            return Err(CliError::config("--pure", "cannot be combined with --eta, --phi or --param"));
        }
        QubitModel::pure(PureFamily::xz_circle())
    } else {
        match (args.param, &args.eta, &args.phi) {
            (Some(ParamFlag::Phi), Some(eta), None) => QubitModel::pure(PureFamily::longitude(angle(eta, "--eta")?)),
            (Some(ParamFlag::Eta), None, Some(phi)) => QubitModel::pure(PureFamily::colatitude(angle(phi, "--phi")?)),
            (None, None, None) => {
                return Err(CliError::config(
                    "model",
                    "missing; use --model FILE, --pure xz, --eta VAL --param phi or --phi VAL --param eta",
                ))
            }
            _ => {
                return Err(CliError::config(
                    "--param",
                    "use --eta VAL --param phi or --phi VAL --param eta",
                ))
            }
        }
    };
    if let Some(spec) = &args.w {
        if args.model.is_some() {
            return Err(CliError::config("--w", "the model file already sets the weight"));
        }
        model = QubitModel::mixed(model.pure_part, parse_weight(spec)?);
    }
    Ok(model)
}

fn resolve_povm(args: &Args) -> Result<Option<Povm>, CliError> {
    match (&args.povm, &args.axis) {
        (Some(_), Some(_)) => Err(CliError::config("--povm", "give either --povm or --axis, not both")),
        (Some(path), None) => files::read_povm(path).map(Some),
        (None, Some(text)) => {
            let v = numbers(text, "--axis", 3)?;
            projective_from_axis(&BlochVector::new(v[0], v[1], v[2]))
                .map(Some)
                .map_err(|e| CliError::invalid("--axis", e))
        }
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    pub fn from_args(args: &Args) -> Result<Self, CliError> {
        let model = resolve_model(args)?;
        let thetas = match (&args.theta, &args.theta_range) {
            (Some(t), None) => Thetas::Single(angle(t, "--theta")?),
            (None, Some(r)) => Thetas::Range(parse_range(r)?),
            (Some(_), Some(_)) => {
                return Err(CliError::config("--theta", "give exactly one of --theta and --theta-range"))
            }
            (None, None) => return Err(CliError::config("--theta", "missing; give --theta or --theta-range")),
        };
        let povm = resolve_povm(args)?;

        let needs_povm = matches!(
            args.command,
            Command::Fisher | Command::Attain | Command::Sweep | Command::Simulate
        );
        if needs_povm && povm.is_none() {
            return Err(CliError::config("--povm", "this command needs --povm FILE or --axis X,Y,Z"));
        }
        let single = matches!(args.command, Command::Optimize | Command::Simulate);
        if single && !matches!(thetas, Thetas::Single(_)) {
            return Err(CliError::config("--theta", "this command takes a single --theta"));
        }
        let ranged = matches!(args.command, Command::Sweep | Command::Uniform);
        if ranged && !matches!(thetas, Thetas::Range(_)) {
            return Err(CliError::config("--theta-range", "this command needs --theta-range A:B:N"));
        }
        if let Weight::Mixed(w) = model.weight {
            for t in thetas.values() {
                w.eval(t).map_err(|e| CliError::invalid("weight", e))?;
            }
        }
        if args.command == Command::Simulate {
            if args.n == 0 {
                return Err(CliError::config("--n", "must be positive"));
            }
            if args.replications < 100 {
                return Err(CliError::config("--replications", "must be at least 100"));
            }
        }
        Ok(Self {
            command: args.command,
            model,
            thetas,
            povm,
            method: args.method,
            n_samples: args.n,
            replications: args.replications,
            seed: args.seed,
            out: args.out.clone(),
        })
    }
}

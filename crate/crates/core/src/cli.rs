//! Command-line front end: analytic values, Monte Carlo verification and
//! JSON/CSV/plain reports.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::absorption::{f_d2_closed, f_nd, p_nd, wendel};
use crate::cones::{intrinsic_volume, intrinsic_volumes, polar_parameter, solid_angle, EquicorrelatedCone};
use crate::error::{domain, Error, Result};
use crate::montecarlo::{
    estimate_absorption, estimate_faces, estimate_gp_transform, estimate_intrinsic_volumes, estimate_solid_angle,
    estimate_spherical_fraction, estimate_volume, AbsorptionMode, RngSpec, SimplexModel,
};
use crate::numerics::QuadratureConfig;
use crate::orthant::{g_asymptotic_fixed_r, g_nr, g_with_error, GnQuery};
use crate::polytope_stats::{
    expected_faces, expected_faces_asymptotic, expected_faces_both, expected_volume, expected_volume_asymptotic,
    expected_volume_both, ln_face_functional_factor, p_asymptotic, FaceQuery,
};
use crate::spherical::{spherical_simplex_volume, spherical_simplex_volume_fraction, SphericalSimplexQuery};

pub const SCHEMA_VERSION: u64 = 1;
/// Significant digits kept for every real number in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;
/// `verify` passes when `|z| < PASS_Z`.
pub const PASS_Z: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(name = "gpolytope", version, about = "Orthant probabilities, absorption and face statistics of Gaussian polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: u64,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true, env = "GPOLYTOPE_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orthant probability g_n(r).
    Gn(GnArgs),
    /// Solid angle, polar parameter and intrinsic volumes of C_n(r).
    Cone(ConeArgs),
    /// Volume of the regular spherical simplex with n vertices and side ell.
    Sphere(SphereArgs),
    /// P[σX ∉ conv(X_1..X_n)] for an independent Gaussian X.
    Absorb(AbsorbArgs),
    /// P[x ∉ conv(X_1..X_n)] for a fixed point x.
    Nonabsorb(NonabsorbArgs),
    /// Expected number of k-faces (or the k-volume functional with --b).
    Faces(FacesArgs),
    /// Expected volume of the Gaussian polytope.
    Volume(VolumeArgs),
    /// Large-n approximations next to the exact values.
    Asympt(AsymptArgs),
    /// Compare an analytic value with a Monte Carlo estimate.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GnArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ConeArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SphereArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub ell: f64,
}

#[derive(Debug, Clone, Args)]
pub struct AbsorbArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NonabsorbArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
    /// Half the squared radius.
    #[arg(long, required_unless_present = "radius", conflicts_with = "radius")]
    pub u: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
}

impl NonabsorbArgs {
    fn u(&self) -> f64 {
        self.u.unwrap_or_else(|| self.radius.map_or(0.0, |x| 0.5 * x * x))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FacesArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Exponent of the k-volume functional; 0 counts faces.
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Gn,
    Faces,
    Volume,
    Absorb,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub r: f64,
}

#[derive(Debug, Clone, Args)]
pub struct IntrinsicArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Regular,
    Standard,
}

#[derive(Debug, Clone, Args)]
pub struct GpArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, value_enum, default_value_t = Model::Regular)]
    pub model: Model,
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    Absorb(AbsorbArgs),
    Nonabsorb(NonabsorbArgs),
    Faces(FacesArgs),
    Volume(VolumeArgs),
    Sphere(SphereArgs),
    /// Solid angle of C_n(r).
    Cone(ConeArgs),
    /// Intrinsic volume υ_k of C_n(r).
    Intrinsic(IntrinsicArgs),
    /// Integral transform of Goodman–Pollack non-absorption.
    Gp(GpArgs),
}

/// What a finished run hands back to the process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => 3,
        Error::NumericalDegeneracy(_) => 4,
        Error::Domain(_) | Error::InvalidDecay(_) | Error::DimensionMismatch { .. } => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::NonConvergence { .. } => "non_convergence",
        Error::InvalidDecay(_) => "invalid_decay",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::NumericalDegeneracy(_) => "numerical_degeneracy",
    }
}

fn error_outcome(code: i32, kind: &str, message: String) -> Outcome {
    let body = json!({"schema": SCHEMA_VERSION, "error": {"kind": kind, "message": message, "exit_code": code}});
    Outcome {
        code,
        stdout: String::new(),
        stderr: format!("{body}\n"),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => error_outcome(2, "usage", e.to_string()),
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let started = Instant::now();
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => return error_outcome(exit_code(&e), error_kind(&e), e.to_string()),
    };
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    let text = render(&report, cli.format, runtime_ms);
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code: 0,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => error_outcome(2, "io", format!("cannot write {}: {e}", path.display())),
        },
        None => Outcome {
            code: 0,
            stdout: text,
            stderr: String::new(),
        },
    }
}

/// A command's result before serialization. Field order is kept for CSV and
/// plain output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: Vec<(&'static str, Value)>,
    pub fields: Vec<(&'static str, Value)>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
            fields: Vec::new(),
        }
    }

    fn param(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.params.push((key, v.into()));
        self
    }

    fn field(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.fields.push((key, v.into()));
        self
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return domain(format!("--tol must be positive, got {}", cli.tol));
    }
    if cli.samples == 0 {
        return domain("--samples must be positive");
    }
    let cfg = QuadratureConfig::with_tolerance(cli.tol, cli.tol);
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return domain("--threads must be positive");
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Domain(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Verify { target } => verify(target, cli, &cfg),
        cmd => analytic(cmd, &cfg).map(|r| r.param("tol", cli.tol)),
    })
}

/// Nominal error of a value when no second method is available.
fn tolerance_target(cfg: &QuadratureConfig, v: f64) -> f64 {
    cfg.abs_tol.max(cfg.rel_tol * v.abs())
}

fn analytic(cmd: &Command, cfg: &QuadratureConfig) -> Result<Report> {
    Ok(match cmd {
        Command::Gn(a) => {
            let q = g_with_error(GnQuery::new(a.n, a.r)?, cfg)?;
            Report::new("gn")
                .param("n", a.n)
                .param("r", a.r)
                .field("value", q.value)
                .field("stderr_est", q.err)
        }
        Command::Cone(a) => {
            let c = EquicorrelatedCone::new(a.n, a.r)?;
            let v = intrinsic_volumes(&c, cfg)?;
            let alpha = solid_angle(&c, cfg)?;
            Report::new("cone")
                .param("n", a.n)
                .param("r", a.r)
                .field("value", alpha)
                .field("stderr_est", tolerance_target(cfg, alpha))
                .field("polar_r", polar_parameter(a.n, a.r)?)
                .field("values", v.values.clone())
                .field("even_sum", v.even_sum())
                .field("odd_sum", v.odd_sum())
        }
        Command::Sphere(a) => {
            let q = SphericalSimplexQuery::new(a.n, a.ell)?;
            let frac = spherical_simplex_volume_fraction(&q, cfg)?;
            Report::new("sphere")
                .param("n", a.n)
                .param("ell", a.ell)
                .field("value", frac)
                .field("stderr_est", tolerance_target(cfg, frac))
                .field("volume", spherical_simplex_volume(&q, cfg)?)
        }
        Command::Absorb(a) => {
            let p = p_nd(a.n, a.d, a.sigma2, cfg)?;
            Report::new("absorb")
                .param("n", a.n)
                .param("d", a.d)
                .param("sigma2", a.sigma2)
                .field("value", p)
                .field("stderr_est", tolerance_target(cfg, p))
                .field("wendel", wendel(a.n, a.d))
        }
        Command::Nonabsorb(a) => {
            let u = a.u();
            let f = f_nd(a.n, a.d, u, cfg)?;
            let mut r = Report::new("nonabsorb")
                .param("n", a.n)
                .param("d", a.d)
                .param("u", u)
                .field("value", f);
            if a.d == 2 {
                let closed = f_d2_closed(a.n, u, cfg)?;
                r = r.field("stderr_est", (f - closed).abs()).field("closed_form", closed);
            } else {
                r = r.field("stderr_est", tolerance_target(cfg, f));
            }
            r
        }
        Command::Faces(a) => {
            let q = FaceQuery::with_exponent(a.n, a.d, a.k, a.b)?;
            let both = expected_faces_both(&FaceQuery::new(a.n, a.d, a.k)?, cfg)?;
            let factor = if a.b == 0.0 { 1.0 } else { ln_face_functional_factor(q.d, q.k, q.b).exp() };
            Report::new("faces")
                .param("n", a.n)
                .param("d", a.d)
                .param("k", a.k)
                .param("b", a.b)
                .field("value", both.angle_sum * factor)
                .field("stderr_est", (both.angle_sum - both.absorption_form).abs() * factor)
                .field("angle_sum", both.angle_sum)
                .field("absorption_form", both.absorption_form)
                .field("relative_gap", both.relative_gap())
                .field("agree", both.agree())
        }
        Command::Volume(a) => {
            let both = expected_volume_both(a.n, a.d, cfg)?;
            Report::new("volume")
                .param("n", a.n)
                .param("d", a.d)
                .field("value", both.orthant_form)
                .field("stderr_est", (both.orthant_form - both.integral_form).abs())
                .field("integral_form", both.integral_form)
                .field("relative_gap", both.relative_gap())
        }
        Command::Asympt(a) => asymptotic(a, cfg)?,
        Command::Verify { .. } => unreachable!("handled by verify"),
    })
}

fn asymptotic(a: &AsymptArgs, cfg: &QuadratureConfig) -> Result<Report> {
    let (name, exact, approx) = match a.quantity {
        Quantity::Gn => ("gn", g_nr(a.n, a.r, cfg)?, g_asymptotic_fixed_r(a.n, a.r)?),
        Quantity::Faces => {
            let q = FaceQuery::new(a.n, a.d, a.k)?;
            ("faces", expected_faces(&q, cfg)?, expected_faces_asymptotic(a.n, a.d, a.k, cfg)?)
        }
        Quantity::Volume => ("volume", expected_volume(a.n, a.d, cfg)?, expected_volume_asymptotic(a.n, a.d)?),
        Quantity::Absorb => (
            "absorb",
            p_nd(a.n, a.d, a.sigma2, cfg)?,
            p_asymptotic(a.n, a.d, a.sigma2, cfg)?,
        ),
    };
    let mut r = Report::new("asympt").param("quantity", name).param("n", a.n);
    r = match a.quantity {
        Quantity::Gn => r.param("r", a.r),
        Quantity::Faces => r.param("d", a.d).param("k", a.k),
        Quantity::Volume => r.param("d", a.d),
        Quantity::Absorb => r.param("d", a.d).param("sigma2", a.sigma2),
    };
    Ok(r.field("value", exact)
        .field("stderr_est", tolerance_target(cfg, exact))
        .field("asymptotic", approx)
        .field("ratio", exact / approx))
}

fn verify(target: &VerifyTarget, cli: &Cli, cfg: &QuadratureConfig) -> Result<Report> {
    let rng = RngSpec::new(cli.seed, 0);
    let s = cli.samples;
    let small = |x: u32| x as usize;
    let (r, analytic, est) = match target {
        VerifyTarget::Absorb(a) => {
            let mode = AbsorptionMode::ScaledGaussian { sigma2: a.sigma2 };
            (
                Report::new("verify absorb").param("n", a.n).param("d", a.d).param("sigma2", a.sigma2),
                p_nd(a.n, a.d, a.sigma2, cfg)?,
                estimate_absorption(small(a.n), small(a.d), mode, s, &rng)?,
            )
        }
        VerifyTarget::Nonabsorb(a) => {
            let u = a.u();
            let radius = (2.0 * u).sqrt();
            let mode = AbsorptionMode::FixedPoint { radius };
            (
                Report::new("verify nonabsorb").param("n", a.n).param("d", a.d).param("u", u),
                f_nd(a.n, a.d, u, cfg)?,
                estimate_absorption(small(a.n), small(a.d), mode, s, &rng)?,
            )
        }
        VerifyTarget::Faces(a) => {
            if a.b != 0.0 {
                return domain("verify faces supports b = 0 only");
            }
            let q = FaceQuery::new(a.n, a.d, a.k)?;
            let all = estimate_faces(small(a.n), small(a.d), s, &rng)?;
            (
                Report::new("verify faces").param("n", a.n).param("d", a.d).param("k", a.k),
                expected_faces(&q, cfg)?,
                all[a.k as usize],
            )
        }
        VerifyTarget::Volume(a) => (
            Report::new("verify volume").param("n", a.n).param("d", a.d),
            expected_volume(a.n, a.d, cfg)?,
            estimate_volume(small(a.n), small(a.d), s, &rng)?,
        ),
        VerifyTarget::Sphere(a) => {
            let q = SphericalSimplexQuery::new(a.n, a.ell)?;
            (
                Report::new("verify sphere").param("n", a.n).param("ell", a.ell),
                spherical_simplex_volume_fraction(&q, cfg)?,
                estimate_spherical_fraction(small(a.n), a.ell, s, &rng)?,
            )
        }
        VerifyTarget::Cone(a) => {
            let c = EquicorrelatedCone::new(a.n, a.r)?;
            (
                Report::new("verify cone").param("n", a.n).param("r", a.r),
                solid_angle(&c, cfg)?,
                estimate_solid_angle(small(a.n), a.r, s, &rng)?,
            )
        }
        VerifyTarget::Intrinsic(a) => {
            if a.k > a.n {
                return domain(format!("k must not exceed n, got k={}, n={}", a.k, a.n));
            }
            let all = estimate_intrinsic_volumes(small(a.n), a.r, s, &rng)?;
            (
                Report::new("verify intrinsic").param("n", a.n).param("r", a.r).param("k", a.k),
                intrinsic_volume(a.n, a.k as i64, a.r, cfg)?,
                all[a.k as usize],
            )
        }
        VerifyTarget::Gp(a) => {
            let model = match a.model {
                Model::Regular => SimplexModel::Regular,
                Model::Standard => SimplexModel::Standard,
            };
            let name = match a.model {
                Model::Regular => "regular",
                Model::Standard => "standard",
            };
            (
                Report::new("verify gp")
                    .param("n", a.n)
                    .param("d", a.d)
                    .param("sigma2", a.sigma2)
                    .param("model", name),
                // one-sided b-sum: half of the Gaussian non-absorption probability
                0.5 * p_nd(a.n, a.d, a.sigma2, cfg)?,
                estimate_gp_transform(small(a.n), small(a.d), a.sigma2, model, s, &rng)?,
            )
        }
    };
    let z = est.z_score(analytic);
    let status = if z.abs() < PASS_Z { "PASS" } else { "FAIL" };
    Ok(r.param("seed", cli.seed)
        .param("samples", cli.samples)
        .param("tol", cli.tol)
        .field("analytic", analytic)
        .field("value", est.mean)
        .field("ci", json!([est.ci_lo, est.ci_hi]))
        .field("stderr_est", est.stderr)
        .field("ci_level", est.ci_level)
        .field("discarded", est.discarded)
        .field("z_score", finite_or_sentinel(z))
        .field("status", status))
}

/// Infinite z-scores (zero spread, miss) are reported as ±1e308.
fn finite_or_sentinel(z: f64) -> f64 {
    if z.is_finite() {
        z
    } else {
        z.signum() * 1e308
    }
}

fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn rounded(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json!(round_significant(n.as_f64().unwrap_or(0.0))),
        Value::Array(a) => Value::Array(a.iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, v)| (k.clone(), rounded(v))).collect()),
        other => other.clone(),
    }
}

fn render(report: &Report, format: Format, runtime_ms: f64) -> String {
    match format {
        Format::Json => {
            let mut top = Map::new();
            top.insert("schema".into(), json!(SCHEMA_VERSION));
            top.insert("command".into(), json!(report.command));
            let params: Map<String, Value> = report.params.iter().map(|(k, v)| (k.to_string(), rounded(v))).collect();
            top.insert("params".into(), Value::Object(params));
            for (k, v) in &report.fields {
                top.insert(k.to_string(), rounded(v));
            }
            top.insert("runtime_ms".into(), json!(round_significant(runtime_ms)));
            top.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            format!("{}\n", serde_json::to_string_pretty(&Value::Object(top)).expect("serializable"))
        }
        Format::Csv => {
            let (header, row) = flat_row(report);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header.iter().chain(["runtime_ms".to_string()].iter())).expect("in-memory write");
            w.write_record(row.iter().chain([scalar_text(&json!(round_significant(runtime_ms)))].iter()))
                .expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        Format::Plain => {
            let (header, row) = flat_row(report);
            let mut out = format!("{}\n", report.command);
            for (k, v) in header.iter().zip(&row).skip(1) {
                out.push_str(&format!("  {k}: {v}\n"));
            }
            out.push_str(&format!("  runtime_ms: {}\n", round_significant(runtime_ms)));
            out
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Column names and values with arrays spread out as `key_0, key_1, …`.
fn flat_row(report: &Report) -> (Vec<String>, Vec<String>) {
    let mut header = vec!["command".to_string()];
    let mut row = vec![report.command.clone()];
    for (k, v) in report.params.iter().chain(&report.fields) {
        match rounded(v) {
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    header.push(format!("{k}_{i}"));
                    row.push(scalar_text(item));
                }
            }
            other => {
                header.push(k.to_string());
                row.push(scalar_text(&other));
            }
        }
    }
    (header, row)
}

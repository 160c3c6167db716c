//! Command-line front end. Every command writes one CSV or JSON document,
//! preceded by a provenance header listing the settings that produced it.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::entropy::{sigma_closed, sigma_solve_with, entropy_integral, GeneralizedLog};
use crate::error::Error;
use crate::geodesic::{integrate_geodesic, shoot_with, GeodesicPath, GeodesicState, ShootSettings, Surface};
use crate::ghsurface::{
    self, gh_field, intersection_curve, mean_curvatures, mean_curvatures_paper, nu_patch, principal_curvatures,
    rho_level_radius, LevelSetSpec, NuFunction,
};
use crate::monge::{curvature_report, CurvatureReport, Orientation, ScalarField, StatePoint};
use crate::numerics::{OdeSettings, QuadratureRule};

pub const THREADS_ENV: &str = "GHGEOM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ghgeom", version, about = "Geometry and entropy equivalence on the Gibbs-Helmholtz entropy surface")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file (stdout if omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Adaptive ODE tolerance (relative and absolute)
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub ode_tol: f64,
    /// Adaptive quadrature tolerance (absolute)
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Use an n-node Gauss-Hermite rule instead of adaptive quadrature
    #[arg(long, global = true)]
    pub quad_nodes: Option<usize>,
    /// Seed for randomized sweeps
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All curvature invariants at one point
    Curvature(CurvatureArgs),
    /// A scalar field sampled on an (x1, x3) grid
    Map(MapArgs),
    /// Integrate a geodesic from initial position and velocity
    Geodesic(GeodesicArgs),
    /// Geodesic joining two states
    Shoot(ShootArgs),
    /// Intersection of an entropy level set with a scalar-curvature cylinder
    Levelset(LevelsetArgs),
    /// Residual of the entropy equivalence equation
    Equiv(EquivArgs),
    /// Curvature of the nu-deformed entropy surface
    Nu(NuArgs),
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Use the generic engine with analytic derivatives instead of closed forms
    #[arg(long)]
    pub generic: bool,
    /// Use the generic engine with finite-difference derivatives
    #[arg(long)]
    pub fd: bool,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub point: [f64; 3],
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub field: Field,
    /// `x1=lo:hi:n,x3=lo:hi:n`
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "x1=-5:5:41,x3=-5:5:41")]
    pub grid: Grid,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x2: f64,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub nu: NuSelect,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub pos: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub vel: Option<[f64; 3]>,
    #[arg(long, default_value_t = 5.0)]
    pub tmax: f64,
    /// Initial data of the two published example geodesics
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Upper bound on the integrator step (controls output density)
    #[arg(long)]
    pub max_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ShootArgs {
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub from: [f64; 3],
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub to: [f64; 3],
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct LevelsetArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub entropy_level: f64,
    #[arg(long, conflicts_with = "rho", required_unless_present = "rho")]
    pub radius: Option<f64>,
    /// Scalar-curvature level −4/(R²+2) instead of the radius
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 181)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    #[command(flatten)]
    pub log: LogSelect,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, required_unless_present = "random")]
    pub point: Option<[f64; 3]>,
    /// Evaluate at this many random admissible points in [-3, 3]³
    #[arg(long, conflicts_with = "point")]
    pub random: Option<usize>,
    /// Mean of the Gaussian family (any value solves the equation)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Also recover σ numerically from the equation
    #[arg(long)]
    pub solve: bool,
}

#[derive(Debug, Args)]
pub struct NuArgs {
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub point: [f64; 3],
    #[command(flatten)]
    pub nu: NuSelect,
    #[arg(long)]
    pub fd: bool,
}

#[derive(Debug, Args)]
pub struct LogSelect {
    #[arg(long = "log", value_enum, default_value_t = LogKind::Natural)]
    pub kind: LogKind,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NuSelect {
    #[arg(long = "nu", value_enum)]
    pub kind: Option<NuSelectKind>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub base: Option<f64>,
    #[arg(long)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogKind {
    Natural,
    Tsallis,
    Kaniadakis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NuSelectKind {
    Identity,
    Power,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig6,
    Fig7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Entropy,
    #[value(name = "H1")]
    H1,
    #[value(name = "H2")]
    H2,
    #[value(name = "H3")]
    H3,
    Lambda1,
    Lambda2,
    Lambda3,
    Rho,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::Entropy => "entropy",
            Field::H1 => "H1",
            Field::H2 => "H2",
            Field::H3 => "H3",
            Field::Lambda1 => "lambda1",
            Field::Lambda2 => "lambda2",
            Field::Lambda3 => "lambda3",
            Field::Rho => "rho",
        }
    }

    fn is_mean(self) -> bool {
        matches!(self, Field::H1 | Field::H2 | Field::H3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    fn at(&self, i: usize) -> f64 {
        if self.n == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x1: Axis,
    pub x3: Axis,
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut p = [0.0_f64; 3];
    for (v, part) in p.iter_mut().zip(parts) {
        *v = part.trim().parse().map_err(|_| format!("`{part}` is not a number"))?;
        if !v.is_finite() {
            return Err(format!("`{part}` is not finite"));
        }
    }
    Ok(p)
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:n, got `{s}`"));
    }
    let num = |t: &str| -> Result<f64, String> {
        let v: f64 = t.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
        v.is_finite().then_some(v).ok_or_else(|| format!("`{t}` is not finite"))
    };
    let n: usize = parts[2].trim().parse().map_err(|_| format!("`{}` is not a count", parts[2]))?;
    if n == 0 {
        return Err("grid step counts must be positive".into());
    }
    Ok(Axis {
        lo: num(parts[0])?,
        hi: num(parts[1])?,
        n,
    })
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let mut x1 = None;
    let mut x3 = None;
    for part in s.split(',') {
        let (name, spec) = part
            .split_once('=')
            .ok_or_else(|| format!("expected name=lo:hi:n, got `{part}`"))?;
        let axis = parse_axis(spec)?;
        match name.trim() {
            "x1" => x1 = Some(axis),
            "x3" => x3 = Some(axis),
            other => return Err(format!("unknown grid axis `{other}` (use x1 and x3)")),
        }
    }
    match (x1, x3) {
        (Some(x1), Some(x3)) => Ok(Grid { x1, x3 }),
        _ => Err("grid needs both x1 and x3 axes".into()),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A document to emit: provenance, scalar results, and optionally a table.
#[derive(Debug, Default)]
struct Output {
    provenance: Vec<(String, String)>,
    summary: Vec<(String, f64)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Output {
    fn new(command: &str, common: &Common) -> Self {
        let quad = match common.quad_nodes {
            Some(n) => format!("gauss-hermite nodes={n}"),
            None => format!("adaptive-gk15 tol={:e}", common.quad_tol),
        };
        let mut out = Self::default();
        out.meta("tool", concat!("ghgeom ", env!("CARGO_PKG_VERSION")));
        out.meta("command", command);
        out.meta("ode", format!("dopri5 tol={:e}", common.ode_tol));
        out.meta("quadrature", quad);
        out.meta("seed", common.seed.to_string());
        out
    }

    fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.provenance.push((key.to_string(), value.into()));
    }

    fn value(&mut self, key: &str, v: f64) {
        self.summary.push((key.to_string(), v));
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(s, "# {k}: {v}");
        }
        if self.columns.is_empty() {
            s.push_str("key,value\n");
            for (k, v) in &self.summary {
                let _ = writeln!(s, "{k},{}", number(*v));
            }
            return s;
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "# {k} = {}", number(*v));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| number(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn render_json(&self) -> String {
        let mut doc = Map::new();
        let prov: Map<String, Value> = self
            .provenance
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        doc.insert("provenance".into(), Value::Object(prov));
        for (k, v) in &self.summary {
            doc.insert(k.clone(), json_number(*v));
        }
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.clone(), json_number(*v)))
                            .collect(),
                    )
                })
                .collect();
            doc.insert("rows".into(), Value::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

/// Shortest round-trip form, exponent notation for very large or small
/// magnitudes, no negative zero.
fn number(v: f64) -> String {
    format!("{:?}", v + 0.0)
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v + 0.0).map_or(Value::Null, Value::Number)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code: 0 success, 1 numerical failure, 2 usage.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {}: {e}", e.name());
            1
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: Io: {e}");
            1
        }
    }
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

fn execute(cli: &Cli) -> CliResult<()> {
    let c = &cli.common;
    if !(c.ode_tol > 0.0) {
        return Err(CliError::Usage("--ode-tol must be positive".into()));
    }
    if !(c.quad_tol > 0.0) {
        return Err(CliError::Usage("--quad-tol must be positive".into()));
    }
    let pool = thread_pool()?;
    let out = pool.install(|| match &cli.command {
        Command::Curvature(a) => curvature(a, c),
        Command::Map(a) => map(a, c),
        Command::Geodesic(a) => geodesic(a, c),
        Command::Shoot(a) => shoot(a, c),
        Command::Levelset(a) => levelset(a, c),
        Command::Equiv(a) => equiv(a, c),
        Command::Nu(a) => nu(a, c),
    })?;
    let text = out.render(c.format);
    match &c.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn quadrature(c: &Common) -> QuadratureRule {
    match c.quad_nodes {
        Some(n) => QuadratureRule::hermite(n),
        None => QuadratureRule::adaptive(c.quad_tol),
    }
}

fn engine_field(engine: &EngineArgs) -> Option<ScalarField> {
    if engine.fd {
        Some(gh_field().finite_differences())
    } else if engine.generic {
        Some(gh_field())
    } else {
        None
    }
}

fn engine_label(engine: &EngineArgs) -> &'static str {
    if engine.fd {
        "generic, finite-difference derivatives"
    } else if engine.generic {
        "generic, analytic derivatives"
    } else {
        "closed form"
    }
}

/// `(λ₁, λ₂, λ₃)` with λ₁ the largest, λ₂ the smallest.
fn labelled_principal(r: &CurvatureReport) -> [f64; 3] {
    let p = r.principal();
    [p[0], p[2], p[1]]
}

fn push_report(out: &mut Output, r: &CurvatureReport, principal: [f64; 3]) {
    let p = r.point;
    out.value("x1", p.x1);
    out.value("x2", p.x2);
    out.value("x3", p.x3);
    out.value("a", r.forms.a);
    for (i, l) in principal.iter().enumerate() {
        out.value(&format!("lambda{}", i + 1), *l);
    }
    for i in 0..3 {
        out.value(&format!("H{}", i + 1), r.mean()[i]);
        out.value(&format!("H{}_paper", i + 1), r.mean_paper()[i]);
    }
    out.value("rho", r.scalar);
    for i in 0..3 {
        for j in i..3 {
            out.value(&format!("g{}{}", i + 1, j + 1), r.forms.g.get(i, j));
        }
    }
    for i in 0..3 {
        for j in i..3 {
            out.value(&format!("h{}{}", i + 1, j + 1), r.forms.h.get(i, j));
        }
    }
    for (i, n) in r.forms.normal.iter().enumerate() {
        out.value(&format!("N{}", i + 1), *n);
    }
    for i in 0..3 {
        for j in i..3 {
            out.value(&format!("ric{}{}", i + 1, j + 1), r.ricci.get(i, j));
        }
    }
    out.value("R1313", r.riemann.get(0, 2, 0, 2));
}

fn curvature(a: &CurvatureArgs, c: &Common) -> CliResult<Output> {
    let x = StatePoint::from(a.point);
    let mut out = Output::new("curvature", c);
    out.meta("engine", engine_label(&a.engine));
    out.meta("orientation", "downward normal");
    let (report, principal) = match engine_field(&a.engine) {
        Some(field) => {
            let r = curvature_report(&field, &x, Orientation::Downward)?;
            let p = labelled_principal(&r);
            (r, p)
        }
        None => (ghsurface::closed_curvatures(&x), principal_curvatures(&x)),
    };
    out.value("entropy", ghsurface::entropy(&x));
    push_report(&mut out, &report, principal);
    Ok(out)
}

fn nu_function(sel: &NuSelect) -> CliResult<Option<NuFunction>> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--nu needs --{flag}")));
    Ok(match sel.kind {
        None => None,
        Some(NuSelectKind::Identity) => Some(NuFunction::identity()),
        Some(NuSelectKind::Power) => Some(NuFunction::power(need(sel.alpha, "alpha")?).map_err(usage)?),
        Some(NuSelectKind::Exp) => Some(
            NuFunction::exp_type(need(sel.base, "base")?, need(sel.exponent, "exponent")?).map_err(usage)?,
        ),
    })
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn field_value(field: Field, x: &StatePoint, generic: Option<&ScalarField>) -> crate::Result<(f64, f64)> {
    let Some(sf) = generic else {
        return Ok(match field {
            Field::Entropy => (ghsurface::entropy(x), f64::NAN),
            Field::H1 | Field::H2 | Field::H3 => {
                let i = field as usize - Field::H1 as usize;
                (mean_curvatures(x)[i], mean_curvatures_paper(x)[i])
            }
            Field::Lambda1 => (principal_curvatures(x)[0], f64::NAN),
            Field::Lambda2 => (principal_curvatures(x)[1], f64::NAN),
            Field::Lambda3 => (principal_curvatures(x)[2], f64::NAN),
            Field::Rho => (ghsurface::scalar_curvature(x), f64::NAN),
        });
    };
    if field == Field::Entropy {
        return Ok((sf.value(x)?, f64::NAN));
    }
    let r = curvature_report(sf, x, Orientation::Downward)?;
    let p = labelled_principal(&r);
    Ok(match field {
        Field::Entropy => unreachable!(),
        Field::H1 | Field::H2 | Field::H3 => {
            let i = field as usize - Field::H1 as usize;
            (r.mean()[i], r.mean_paper()[i])
        }
        Field::Lambda1 => (p[0], f64::NAN),
        Field::Lambda2 => (p[1], f64::NAN),
        Field::Lambda3 => (p[2], f64::NAN),
        Field::Rho => (r.scalar, f64::NAN),
    })
}

fn map(a: &MapArgs, c: &Common) -> CliResult<Output> {
    let nu = nu_function(&a.nu)?;
    let field: Option<ScalarField> = match &nu {
        Some(nu) if a.engine.fd => Some(nu_patch(nu).finite_differences()),
        Some(nu) => Some(nu_patch(nu)),
        None => engine_field(&a.engine),
    };
    let mut out = Output::new("map", c);
    out.meta("field", a.field.name());
    out.meta(
        "surface",
        match &nu {
            Some(n) => format!("nu-entropy, nu = {:?}", n.kind()),
            None => "gibbs-helmholtz entropy".into(),
        },
    );
    out.meta("engine", if nu.is_some() { "generic" } else { engine_label(&a.engine) });
    let g = a.grid;
    out.meta(
        "grid",
        format!(
            "x1={}:{}:{},x3={}:{}:{},x2={}",
            g.x1.lo, g.x1.hi, g.x1.n, g.x3.lo, g.x3.hi, g.x3.n, a.x2
        ),
    );
    let points: Vec<StatePoint> = (0..g.x1.n)
        .flat_map(|i| (0..g.x3.n).map(move |j| StatePoint::new(g.x1.at(i), a.x2, g.x3.at(j))))
        .collect();
    let values: Vec<crate::Result<(f64, f64)>> = points
        .par_iter()
        .map(|x| field_value(a.field, x, field.as_ref()))
        .collect();
    out.columns = ["x1", "x2", "x3", "value"].map(String::from).to_vec();
    if a.field.is_mean() {
        out.columns.push("value_paper".into());
    }
    for (x, v) in points.iter().zip(values) {
        let (v, vp) = v?;
        let mut row = vec![x.x1, x.x2, x.x3, v];
        if a.field.is_mean() {
            row.push(vp);
        }
        out.rows.push(row);
    }
    Ok(out)
}

fn path_table(out: &mut Output, path: &GeodesicPath) {
    out.columns = ["t", "x1", "x2", "x3", "v1", "v2", "v3", "energy", "arclen"]
        .map(String::from)
        .to_vec();
    for (i, s) in path.samples.iter().enumerate() {
        let p = s.position;
        let v = s.velocity;
        out.rows
            .push(vec![s.t, p.x1, p.x2, p.x3, v[0], v[1], v[2], path.energy[i], path.arc_length[i]]);
    }
}

fn geodesic(a: &GeodesicArgs, c: &Common) -> CliResult<Output> {
    let (pos, vel) = match a.preset {
        Some(Preset::Fig6) => ([1.0, 1.0, 1.0], [1.0, 10.0, 1.0]),
        Some(Preset::Fig7) => ([1.0, 1.0, 1.0], [10.0, 1.0, 10.0]),
        None => (
            a.pos.ok_or_else(|| CliError::Usage("geodesic needs --pos (or --preset)".into()))?,
            a.vel.ok_or_else(|| CliError::Usage("geodesic needs --vel (or --preset)".into()))?,
        ),
    };
    let pos = if a.preset.is_some() { a.pos.unwrap_or(pos) } else { pos };
    let vel = if a.preset.is_some() { a.vel.unwrap_or(vel) } else { vel };
    if !(a.tmax > 0.0) || !a.tmax.is_finite() {
        return Err(CliError::Usage("--tmax must be positive".into()));
    }
    let mut settings = OdeSettings::adaptive(c.ode_tol);
    if let Some(h) = a.max_step {
        if !(h > 0.0) {
            return Err(CliError::Usage("--max-step must be positive".into()));
        }
        settings = settings.with_max_step(h);
    }
    let init = GeodesicState::new(0.0, StatePoint::from(pos), vel);
    let path = integrate_geodesic(&init, a.tmax, &settings)?;
    let mut out = Output::new("geodesic", c);
    out.meta("initial", format!("pos={:?} vel={:?} tmax={}", pos, vel, a.tmax));
    if let Some(h) = a.max_step {
        out.meta("max_step", h.to_string());
    }
    out.value("energy_drift", path.max_energy_drift());
    path_table(&mut out, &path);
    Ok(out)
}

fn shoot(a: &ShootArgs, c: &Common) -> CliResult<Output> {
    if !(a.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let settings = ShootSettings {
        ode: OdeSettings::adaptive(c.ode_tol.min(1e-12)),
        ..ShootSettings::default()
    };
    let (from, to) = (StatePoint::from(a.from), StatePoint::from(a.to));
    let r = shoot_with(&Surface::Gh, &from, &to, a.tol, &settings)?.into_converged()?;
    let mut out = Output::new("shoot", c);
    out.meta(
        "shooting",
        format!(
            "damped newton, max_iterations={}, fd_step={:e}, restarts={}, ode tol={:e}",
            settings.max_iterations,
            settings.fd_step,
            settings.restarts,
            c.ode_tol.min(1e-12)
        ),
    );
    out.meta("endpoints", format!("from={:?} to={:?} tol={:e}", a.from, a.to, a.tol));
    for (i, v) in r.velocity.iter().enumerate() {
        out.value(&format!("v{}", i + 1), *v);
    }
    out.value("miss", r.miss);
    out.value("iterations", r.iterations as f64);
    out.value("length", crate::geodesic::arc_length(&r.path));
    path_table(&mut out, &r.path);
    Ok(out)
}

fn levelset(a: &LevelsetArgs, c: &Common) -> CliResult<Output> {
    let radius = match (a.radius, a.rho) {
        (Some(r), _) => r,
        (None, Some(rho)) => rho_level_radius(rho)?,
        (None, None) => return Err(CliError::Usage("levelset needs --radius or --rho".into())),
    };
    let spec = LevelSetSpec::new(a.entropy_level, radius, a.samples).map_err(usage)?;
    let mut out = Output::new("levelset", c);
    out.meta(
        "curve",
        format!("entropy level={} radius={} samples={}", spec.level, spec.radius, spec.samples),
    );
    out.value("rho_level", -4.0 / (radius * radius + 2.0));
    out.columns = ["theta", "x1", "x2", "x3", "mate"].map(String::from).to_vec();
    for s in intersection_curve(&spec) {
        out.rows.push(vec![s.theta, s.point.x1, s.point.x2, s.point.x3, s.mate]);
    }
    Ok(out)
}

fn generalized_log(sel: &LogSelect) -> CliResult<GeneralizedLog> {
    match sel.kind {
        LogKind::Natural => Ok(GeneralizedLog::Natural),
        LogKind::Tsallis => {
            let q = sel.q.ok_or_else(|| CliError::Usage("--log tsallis needs --q".into()))?;
            GeneralizedLog::tsallis(q).map_err(usage)
        }
        LogKind::Kaniadakis => {
            let k = sel.k.ok_or_else(|| CliError::Usage("--log kaniadakis needs --k".into()))?;
            GeneralizedLog::kaniadakis(k).map_err(usage)
        }
    }
}

fn equiv(a: &EquivArgs, c: &Common) -> CliResult<Output> {
    let phi = generalized_log(&a.log)?;
    let rule = quadrature(c);
    rule.validate().map_err(usage)?;
    let points: Vec<StatePoint> = match (a.point, a.random) {
        (Some(p), _) => vec![StatePoint::from(p)],
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let mut pts = Vec::with_capacity(n);
            let mut tries = 0usize;
            while pts.len() < n {
                tries += 1;
                if tries > 1000 * n.max(1) {
                    return Err(CliError::Numeric(Error::domain(format!(
                        "no admissible points for {} in [-3, 3]^3",
                        phi.label()
                    ))));
                }
                let x = StatePoint::new(
                    rng.random_range(-3.0..=3.0),
                    rng.random_range(-3.0..=3.0),
                    rng.random_range(-3.0..=3.0),
                );
                if sigma_closed(&phi, ghsurface::entropy(&x)).is_ok() {
                    pts.push(x);
                }
            }
            pts
        }
        (None, None) => return Err(CliError::Usage("equiv needs --point or --random".into())),
    };
    let rows: Vec<crate::Result<Vec<f64>>> = points
        .par_iter()
        .map(|x| {
            let s = ghsurface::entropy(x);
            let sigma = sigma_closed(&phi, s)?;
            let (integral, err) = entropy_integral(&phi, a.mu, sigma, &rule)?;
            let mut row = vec![x.x1, x.x2, x.x3, s, a.mu, sigma, integral, s + integral, err];
            if a.solve {
                row.push(sigma_solve_with(&phi, s, 1e-12, &rule)?);
            }
            Ok(row)
        })
        .collect();
    let mut out = Output::new("equiv", c);
    out.meta("logarithm", phi.label());
    out.meta("family", format!("gaussian, mean={}, closed-form dispersion", a.mu));
    out.columns = ["x1", "x2", "x3", "entropy", "mu", "sigma", "integral", "residual", "quad_error"]
        .map(String::from)
        .to_vec();
    if a.solve {
        out.columns.push("sigma_solved".into());
    }
    let mut worst: f64 = 0.0;
    for row in rows {
        let row = row?;
        worst = worst.max(row[7].abs());
        out.rows.push(row);
    }
    out.value("max_abs_residual", worst);
    Ok(out)
}

fn nu(a: &NuArgs, c: &Common) -> CliResult<Output> {
    let nu = nu_function(&a.nu)?.ok_or_else(|| CliError::Usage("nu needs --nu identity|power|exp".into()))?;
    let field = if a.fd { nu_patch(&nu).finite_differences() } else { nu_patch(&nu) };
    let x = StatePoint::from(a.point);
    let r = curvature_report(&field, &x, Orientation::Downward)?;
    let mut out = Output::new("nu", c);
    out.meta("surface", format!("nu-entropy, nu = {:?}", nu.kind()));
    out.meta("engine", if a.fd { "generic, finite-difference derivatives" } else { "generic, analytic derivatives" });
    out.value("entropy", field.value(&x)?);
    push_report(&mut out, &r, labelled_principal(&r));
    let e2 = 3.0 * r.mean()[1];
    out.value("gauss_defect", r.scalar - 2.0 * e2);
    Ok(out)
}

//! The `manproj` command line: `gen`, `project`, `rates` and `geodesic`.
//!
//! Exit codes: 0 on success, 1 for runtime or data errors, 2 for usage
//! errors. Every command is a pure function of its flags, so reruns with
//! the same seed produce byte-identical files.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::geom::random_orthonormal;
use crate::pointset::PointCloud;
use crate::polyfit::{monomial_count, PolyModel};
use crate::rates::{run_rates, RatesPlan};
use crate::refine::{project, project_batch, write_results_csv, EstimatorConfig, Mode};
use crate::synth::{geodesic_walk, seeded_rng, ManifoldSpec};

/// Environment variable capping the worker-thread count (0 = automatic).
pub const THREADS_ENV: &str = "MANPROJ_THREADS";

#[derive(Debug, Parser)]
#[command(name = "manproj", version, about = "Project points onto a manifold sampled with noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a synthetic manifold's tubular neighbourhood into a CSV file.
    Gen(GenArgs),
    /// Project query points onto the manifold sampled in a CSV file.
    Project(ProjectArgs),
    /// Measure convergence rates over a grid of sample sizes.
    Rates(RatesArgs),
    /// Walk along a geodesic of the sampled manifold.
    Geodesic(GeodesicArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ManifoldKind {
    Affine,
    Circle,
    Sphere,
    Poly,
}

#[derive(Debug, Clone, Args)]
pub struct ManifoldArgs {
    #[arg(long, value_enum)]
    pub manifold: ManifoldKind,
    /// Intrinsic dimension (affine, sphere, poly).
    #[arg(long = "dim", default_value_t = 1)]
    pub dim: usize,
    /// Ambient dimension (defaults to the smallest that fits).
    #[arg(long)]
    pub ambient: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Half side of the parameter box (affine, poly).
    #[arg(long, default_value_t = 1.0)]
    pub half_width: f64,
    /// Graph coefficients in graded-lex order, codimension one (poly).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    /// Reach of the graph (poly).
    #[arg(long)]
    pub reach: Option<f64>,
    /// Seed of the random basis of an affine manifold.
    #[arg(long, default_value_t = 0)]
    pub spec_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth_const: f64,
    #[arg(long, default_value_t = 1)]
    pub blocks: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Recenter)]
    pub mode: ModeArg,
    /// Defaults to 1e-3·σ.
    #[arg(long)]
    pub stop_tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    FixedOrigin,
    Recenter,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub manifold: ManifoldArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub manifold: ManifoldArgs,
    /// Sample sizes, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    /// Number of seeds per sample size (seeds 0..S).
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub sigma: f64,
    /// Defaults to the manifold's reach.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth_const: f64,
    #[arg(long, default_value_t = 1)]
    pub blocks: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::FixedOrigin)]
    pub mode: ModeArg,
    #[arg(long)]
    pub stop_tol: Option<f64>,
    #[arg(long, default_value_t = 25)]
    pub queries: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x0: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub v0: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 30)]
    pub steps: usize,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Runtime(e.into())
    }
}

impl ManifoldArgs {
    pub fn build(&self) -> Result<ManifoldSpec, CliError> {
        let usage = |m: &str| CliError::Usage(m.to_string());
        let spec = match self.manifold {
            ManifoldKind::Circle => ManifoldSpec::Circle {
                radius: self.radius,
                ambient: self.ambient.unwrap_or(2),
            },
            ManifoldKind::Sphere => ManifoldSpec::Sphere {
                d: self.dim,
                radius: self.radius,
                ambient: self.ambient.unwrap_or(self.dim + 1),
            },
            ManifoldKind::Affine => {
                let ambient = self.ambient.unwrap_or(self.dim + 1);
                if self.dim == 0 || self.dim >= ambient {
                    return Err(usage("affine manifold needs 1 <= dim < ambient"));
                }
                let mut rng = seeded_rng(self.spec_seed, u64::MAX);
                let basis = random_orthonormal(&mut rng, ambient, self.dim);
                ManifoldSpec::affine(basis, DVector::zeros(ambient), self.half_width)?
            }
            ManifoldKind::Poly => {
                let reach = self.reach.ok_or_else(|| usage("--reach is required for poly"))?;
                let m = self.coeffs.len();
                let degree = (0..=16)
                    .find(|&deg| monomial_count(self.dim, deg) == m)
                    .ok_or_else(|| usage("--coeffs length is not a monomial count"))?;
                let poly = PolyModel::new(
                    self.dim,
                    1,
                    degree,
                    DMatrix::from_column_slice(m, 1, &self.coeffs),
                )?;
                ManifoldSpec::PolyGraph {
                    poly,
                    half_width: self.half_width,
                    reach,
                }
            }
        };
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }
}

impl EstimatorArgs {
    pub fn config(&self) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::new(self.d, self.k, self.sigma, self.tau);
        cfg.bandwidth_const = self.bandwidth_const;
        cfg.blocks = self.blocks;
        cfg.mode = self.mode.into();
        if let Some(t) = self.stop_tol {
            cfg.stop_tol = t;
        }
        cfg.seed = self.seed;
        cfg
    }
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::FixedOrigin => Mode::FixedOrigin,
            ModeArg::Recenter => Mode::Recenter,
        }
    }
}

fn config_lines(cfg: &EstimatorConfig) -> Vec<String> {
    vec![
        format!("d={}", cfg.d),
        format!("k={}", cfg.k),
        format!("sigma={}", cfg.sigma),
        format!("tau={}", cfg.tau),
        format!("bandwidth_const={}", cfg.bandwidth_const),
        format!("blocks={}", cfg.blocks),
        format!("mode={:?}", cfg.mode),
        format!("stop_tol={}", cfg.stop_tol),
        format!("seed={}", cfg.seed),
    ]
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn read_cloud(path: &PathBuf) -> Result<PointCloud, CliError> {
    let file = File::open(path)?;
    PointCloud::read_csv(file).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
    .into())
}

fn check_config(cfg: &EstimatorConfig, ambient: usize) -> Result<(), CliError> {
    cfg.validate(ambient).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let spec = args.manifold.build()?;
    let cloud = spec.sample_tubular(args.n as usize, args.sigma, args.seed)?;
    let mut comments = spec.header_lines();
    comments.push(format!("n={}", args.n));
    comments.push(format!("sigma={}", args.sigma));
    comments.push(format!("seed={}", args.seed));
    let mut out = create(&args.out)?;
    cloud.write_csv(&mut out, &comments)?;
    out.flush()?;
    Ok(())
}

pub fn cmd_project(args: &ProjectArgs) -> Result<(), CliError> {
    let cloud = read_cloud(&args.data)?;
    let queries = read_cloud(&args.queries)?;
    if queries.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            found: queries.dim(),
        }
        .into());
    }
    let cfg = args.estimator.config();
    check_config(&cfg, cloud.dim())?;
    let qs: Vec<DVector<f64>> = (0..queries.len()).map(|i| queries.point(i)).collect();
    let results = project_batch(&cloud, &qs, &cfg);
    let mut out = create(&args.out)?;
    write_results_csv(&mut out, &results, cloud.dim(), cfg.d, &config_lines(&cfg))?;
    out.flush()?;
    Ok(())
}

pub fn cmd_rates(args: &RatesArgs) -> Result<(), CliError> {
    let spec = args.manifold.build()?;
    let tau = args.tau.unwrap_or_else(|| spec.reach());
    if !tau.is_finite() {
        return Err(CliError::Usage("--tau is required for manifolds with infinite reach".into()));
    }
    let mut cfg = EstimatorConfig::new(spec.dim(), args.k, args.sigma, tau);
    cfg.bandwidth_const = args.bandwidth_const;
    cfg.blocks = args.blocks;
    cfg.mode = args.mode.into();
    if let Some(t) = args.stop_tol {
        cfg.stop_tol = t;
    }
    check_config(&cfg, spec.ambient_dim())?;
    if args.ns.len() < 4 || args.ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(
            "--ns needs at least four strictly increasing sample sizes".into(),
        ));
    }
    let plan = RatesPlan {
        spec: spec.clone(),
        ns: args.ns.clone(),
        seeds: (0..args.seeds).collect(),
        sigma: args.sigma,
        queries: args.queries,
        cfg: cfg.clone(),
    };
    let report = run_rates(&plan)?;
    let mut comments = spec.header_lines();
    comments.extend(config_lines(&cfg));
    comments.push(format!("queries={}", args.queries));
    let mut out = create(&args.out)?;
    report.write_csv(&mut out, &comments)?;
    out.flush()?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    Ok(())
}

pub fn cmd_geodesic(args: &GeodesicArgs) -> Result<(), CliError> {
    let cloud = read_cloud(&args.data)?;
    let ambient = cloud.dim();
    if args.x0.len() != ambient || args.v0.len() != ambient {
        return Err(CliError::Usage(format!(
            "--x0 and --v0 need {ambient} components"
        )));
    }
    let v0 = DVector::from_vec(args.v0.clone());
    if v0.norm() == 0.0 {
        return Err(CliError::Usage("--v0 must be nonzero".into()));
    }
    if !(args.eps > 0.0) {
        return Err(CliError::Usage("--eps must be positive".into()));
    }
    let cfg = args.estimator.config();
    check_config(&cfg, ambient)?;
    let x0 = DVector::from_vec(args.x0.clone());
    let traj = geodesic_walk(
        |x| project(&cloud, x, &cfg).map(|r| (r.p_hat, r.tangent)),
        &x0,
        &v0,
        args.eps,
        args.steps,
    )?;

    let mut out = create(&args.out)?;
    let mut comments = config_lines(&cfg);
    comments.push(format!("eps={}", args.eps));
    comments.push(format!("steps={}", args.steps));
    for c in &comments {
        writeln!(out, "# {c}")?;
    }
    let d = cfg.d;
    let mut w = csv::Writer::from_writer(&mut out);
    let mut header = vec!["step".to_string()];
    header.extend((0..ambient).map(|i| format!("x{i}")));
    for i in 0..ambient {
        for j in 0..d {
            header.push(format!("t{i}_{j}"));
        }
    }
    w.write_record(&header).map_err(Error::from)?;
    for (step, (p, t)) in traj.points.iter().zip(&traj.tangents).enumerate() {
        let mut row = vec![step.to_string()];
        row.extend(p.iter().map(|v| v.to_string()));
        for i in 0..ambient {
            for j in 0..d {
                row.push(t[(i, j)].to_string());
            }
        }
        w.write_record(&row).map_err(Error::from)?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Project(a) => cmd_project(a),
        Command::Rates(a) => cmd_rates(a),
        Command::Geodesic(a) => cmd_geodesic(a),
    }
}

fn configure_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    // a second initialisation in the same process is harmless to ignore
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let kind = if matches!(e, CliError::Usage(_)) { "usage" } else { "error" };
            eprintln!("manproj: {kind}: {e}");
            e.exit_code()
        }
    }
}

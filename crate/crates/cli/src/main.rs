mod format;
mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orthocusp::classify::{classify_with, Agreement, Method, DEFAULT_BOUNDARY_EPS};
use orthocusp::features::{analyze_features, FeatureConfig};
use orthocusp::geometry::{CartesianPoint, Geometry, JointConfig};
use orthocusp::ik::{inverse_kinematics, residual};
use orthocusp::kinematics::forward_kinematics;
use orthocusp::poly::DEFAULT_ROOT_TOL;
use orthocusp::surfaces::{SurfaceAtlas, SurfaceId};
use orthocusp::sweep::{sweep, SweepConfig};
use orthocusp::trace::DEFAULT_TRACE_SAMPLES;
use orthocusp::verify::{run_all, VerifyConfig};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "orthocusp",
    version,
    about = "Cusps, nodes and workspace topology of 3R orthogonal manipulators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Domain and workspace topology of one geometry, as JSON.
    Classify(ClassifyArgs),
    /// End point of a joint configuration, as a JSON `[x, y, z]`.
    Fk(FkArgs),
    /// All joint configurations reaching a point, as JSON.
    Ik(IkArgs),
    /// Singular curves in the half cross-section, as CSV or SVG.
    Boundary(BoundaryArgs),
    /// Partition raster over (d3, d4) at fixed r2, as CSV and/or SVG.
    Sweep(SweepArgs),
    /// Runs the self-check suites; exits 1 if any fails.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Copy)]
struct GeometryArgs {
    #[arg(long, default_value_t = 1.0)]
    d2: f64,
    #[arg(long)]
    d3: f64,
    #[arg(long)]
    d4: f64,
    #[arg(long)]
    r2: f64,
}

impl GeometryArgs {
    fn geometry(&self) -> Result<Geometry, CliError> {
        Geometry::new(self.d2, self.d3, self.d4, self.r2)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Surfaces,
    Numeric,
    Both,
}

impl From<Mode> for Method {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Surfaces => Method::Surfaces,
            Mode::Numeric => Method::Numeric,
            Mode::Both => Method::Both,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    geom: GeometryArgs,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    /// Distance in normalized d4 under which a surface counts as hit.
    #[arg(long, default_value_t = DEFAULT_BOUNDARY_EPS)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Angles in radians; a unit suffix is refused rather than guessed.
fn parse_radians(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if t.ends_with("deg") || t.ends_with('°') || t.ends_with('d') {
        return Err("angles are in radians; drop the degree suffix".into());
    }
    let t = t.strip_suffix("rad").unwrap_or(t);
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("not a decimal number: {s:?}"))
}

#[derive(Args)]
struct FkArgs {
    #[command(flatten)]
    geom: GeometryArgs,
    #[arg(long, value_parser = parse_radians, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, value_parser = parse_radians, allow_hyphen_values = true)]
    t2: f64,
    #[arg(long, value_parser = parse_radians, allow_hyphen_values = true)]
    t3: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IkArgs {
    #[command(flatten)]
    geom: GeometryArgs,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
    /// Root-clustering tolerance of the quartic solver.
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundaryArgs {
    #[command(flatten)]
    geom: GeometryArgs,
    #[arg(long, value_enum, default_value = "svg")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_TRACE_SAMPLES)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    r2: f64,
    #[arg(long, default_value_t = 0.02)]
    d3_min: f64,
    #[arg(long, default_value_t = 3.0)]
    d3_max: f64,
    #[arg(long, default_value_t = 0.02)]
    d4_min: f64,
    #[arg(long, default_value_t = 3.0)]
    d4_max: f64,
    /// Cells per axis.
    #[arg(long, default_value_t = 300)]
    res: usize,
    #[arg(long, value_enum, default_value = "surfaces")]
    mode: Mode,
    /// Share of cells re-checked by the numerical oracle in surfaces mode.
    #[arg(long, default_value_t = 0.01)]
    spot_check: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Format written to --out (or standard output).
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the SVG raster here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per suite; the oracle suite uses half, the straddle suite at
    /// most 50 per surface.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Test hook: scales one surface by 1.01 before checking.
    #[arg(long, hide = true)]
    tamper: Option<SurfaceId>,
}

enum CliError {
    Usage(String),
    Io(PathBuf, io::Error),
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Io(..) => 2,
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            let mut stdout = io::stdout().lock();
            // a closed pipe is not worth an error
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ClassifyOutput {
    d2: f64,
    d3: f64,
    d4: f64,
    r2: f64,
    domain: u8,
    wt: String,
    n_cusps: usize,
    n_nodes: usize,
    method: &'static str,
    boundary: bool,
    agreement: &'static str,
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), CliError> {
    let g = args.geom.geometry()?;
    if args.eps.is_nan() || args.eps < 0.0 {
        return Err(CliError::Usage("--eps must be >= 0".into()));
    }
    let c = classify_with(&g, args.mode.into(), args.eps, &SurfaceAtlas::exact());
    if c.boundary || c.agreement == Agreement::Disagree {
        for d in &c.diagnostics {
            eprintln!("note: {d}");
        }
    }
    let out = ClassifyOutput {
        d2: g.d2,
        d3: g.d3,
        d4: g.d4,
        r2: g.r2,
        domain: c.domain,
        wt: c.wt.to_string(),
        n_cusps: c.n_cusps,
        n_nodes: c.n_nodes,
        method: c.method.as_str(),
        boundary: c.boundary,
        agreement: c.agreement.as_str(),
    };
    emit(&args.out, &json(&out))
}

fn cmd_fk(args: &FkArgs) -> Result<(), CliError> {
    let g = args.geom.geometry()?;
    // no wrapping: the caller's angles go in as given
    let q = JointConfig {
        theta1: args.t1,
        theta2: args.t2,
        theta3: args.t3,
    };
    // `+ 0.0` turns a negative zero into a plain one
    let p = forward_kinematics(&g, &q).as_array().map(|v| v + 0.0);
    emit(&args.out, &json(&p))
}

#[derive(Serialize)]
struct IkOutput {
    theta1: f64,
    theta2: f64,
    theta3: f64,
    residual: f64,
}

fn cmd_ik(args: &IkArgs) -> Result<(), CliError> {
    let g = args.geom.geometry()?;
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(CliError::Usage("--tol must lie in (0, 1)".into()));
    }
    let p = CartesianPoint::new(args.x, args.y, args.z);
    let sols = inverse_kinematics(&g, &p, args.tol);
    if sols.on_second_axis {
        eprintln!("note: target is an isolated singular point; theta2 is free there and those solutions are omitted");
    }
    if sols.continuum {
        eprintln!("note: every theta3 solves the quartic at this target");
    }
    let out: Vec<IkOutput> = sols
        .solutions
        .iter()
        .map(|q| IkOutput {
            theta1: q.theta1,
            theta2: q.theta2,
            theta3: q.theta3,
            residual: residual(&g, q, &p),
        })
        .collect();
    emit(&args.out, &json(&out))
}

fn cmd_boundary(args: &BoundaryArgs) -> Result<(), CliError> {
    let g = args.geom.geometry()?;
    let config = FeatureConfig {
        samples: args.samples,
        ..FeatureConfig::default()
    };
    let report = analyze_features(&g, &config).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match args.format {
        Format::Csv => format::boundary_csv(&report.curves),
        Format::Svg => svg::boundary_svg(&report),
        Format::Json => return Err(CliError::Usage("boundary writes csv or svg".into())),
    };
    emit(&args.out, &text)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let config = SweepConfig {
        r2: args.r2,
        d3_range: (args.d3_min, args.d3_max),
        d4_range: (args.d4_min, args.d4_max),
        n_d3: args.res,
        n_d4: args.res,
        mode: args.mode.into(),
        spot_check_fraction: args.spot_check,
        seed: args.seed,
        ..SweepConfig::default()
    };
    let raster = sweep(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    for s in raster.spot_checks.iter().filter(|s| !s.agree) {
        let cell = &raster.cells[s.index];
        eprintln!(
            "spot check: d3={} d4={} surfaces {} oracle {}",
            cell.d3, cell.d4, cell.wt, s.numeric
        );
    }
    let text = match args.format {
        Format::Csv => format::sweep_csv(&raster),
        Format::Svg => svg::sweep_svg(&raster),
        Format::Json => return Err(CliError::Usage("sweep writes csv or svg".into())),
    };
    emit(&args.out, &text)?;
    if let Some(path) = &args.svg {
        fs::write(path, svg::sweep_svg(&raster)).map_err(|e| CliError::Io(path.clone(), e))?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let mut config = VerifyConfig::with_samples(args.n, args.seed);
    if let Some(id) = args.tamper {
        config.atlas = SurfaceAtlas::perturbed(id, 1.01);
    }
    let report = run_all(&config);
    for s in &report.suites {
        println!(
            "{:<18} {}  {} checked, {} failed; {}",
            s.name,
            if s.passed { "PASS" } else { "FAIL" },
            s.checked,
            s.failures,
            s.detail
        );
        for d in s.diagnostics.iter().take(10) {
            println!("    {d}");
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Failed("verification failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Fk(a) => cmd_fk(a),
        Command::Ik(a) => cmd_ik(a),
        Command::Boundary(a) => cmd_boundary(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Io(path, err) => {
                    eprintln!("error: cannot write {}: {err}", path.display())
                }
                CliError::Failed(msg) => eprintln!("{msg}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

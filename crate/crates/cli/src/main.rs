//! `hamsplit`: uneven splittings of measures by hyperplanes.
//!
//! Exit codes: 0 success, 2 honest negative (no split / not separable /
//! scenario failed its expectation), 1 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hamsplit_core::auxiliary::{sample_central_sphere, turning_number, ConvexSet};
use hamsplit_core::geom::Vector;
use hamsplit_core::measure::{Measure, MeasureSpec};
use hamsplit_core::partition::two_line_partition;
use hamsplit_core::scenario;
use hamsplit_core::schema::{
    ConvexSetSpec, ScanReport, ScenarioFile, SeparabilityFile, SplitReport, TwoLineFile,
    SCHEMA_VERSION,
};
use hamsplit_core::separability::{check_separable, PointSet};
use hamsplit_core::solver::{find_split, verify_split, Method, SolveConfig, SplitOutcome};
use hamsplit_core::svg;

#[derive(Parser)]
#[command(
    name = "hamsplit",
    version,
    about = "Split n measures on R^n by a hyperplane into prescribed mass ratios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct CommonOpts {
    /// Mass tolerance (defaults: 1e-6 closed-form, 1e-3 quadrature).
    #[arg(long)]
    tol: Option<f64>,
    /// Grid resolution (normal-lattice scan; angle grid for curves).
    #[arg(long)]
    grid: Option<usize>,
    /// Multistart count for the polish stage.
    #[arg(long)]
    starts: Option<usize>,
    /// Seed for deterministic sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for emitted artifacts (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated artifact kinds to emit: json,csv,svg.
    #[arg(long, value_delimiter = ',')]
    emit: Option<Vec<String>>,
    /// Run box certification on accepted candidates.
    #[arg(long)]
    certify: bool,
    /// JSON config file; command-line flags win over its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Find an (alpha_1..alpha_n)-splitting hyperplane for a problem file.
    Split {
        problem_file: PathBuf,
        /// Override the ratios from the file, e.g. --alpha 0.3,0.7
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Decide strict hyperplane separability of the supports in a problem file.
    Separability {
        problem_file: PathBuf,
        /// Strictness margin (default: 1e-7 of the instance diameter).
        #[arg(long)]
        margin: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sample the central sphere of a single measure and report its turning number.
    CentralSphere {
        measure_file: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Partition one planar measure by two lines into four prescribed masses.
    TwoLines {
        measure_file: PathBuf,
        /// Four quadrant masses summing to one, e.g. --alpha 0.1,0.4,0.1,0.4
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        /// Normal of the first cut (default 0,1).
        #[arg(long, value_delimiter = ',')]
        normal: Option<Vec<f64>>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Find a splitting and require a box certificate around it.
    Certify {
        problem_file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a built-in scenario and grade it against its expectation.
    Scenario {
        /// One of: concentric_discs, collinear_balls, pentagon, three_caps,
        /// random_separated.
        name: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// On-disk config; any present field becomes the default for its flag.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct ConfigFile {
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    grid: Option<usize>,
    #[serde(default)]
    starts: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    emit: Option<Vec<String>>,
    #[serde(default)]
    certify: Option<bool>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure { code: 1, message: msg.into() }
    }

    fn negative(msg: impl Into<String>) -> Failure {
        Failure { code: 2, message: msg.into() }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Split { problem_file, alpha, common } => cmd_split(&problem_file, alpha, common, false),
        Command::Certify { problem_file, alpha, common } => cmd_split(&problem_file, alpha, common, true),
        Command::Separability { problem_file, margin, common } => {
            cmd_separability(&problem_file, margin, common)
        }
        Command::CentralSphere { measure_file, alpha, common } => {
            cmd_central_sphere(&measure_file, alpha, common)
        }
        Command::TwoLines { measure_file, alpha, normal, common } => {
            cmd_two_lines(&measure_file, alpha, normal, common)
        }
        Command::Scenario { name, alpha, dim, common } => cmd_scenario(&name, alpha, dim, common),
    }
}

fn merged(common: &CommonOpts) -> Result<(CommonOpts, SolveConfig), Failure> {
    let mut opts = common.clone();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
        let file: ConfigFile = serde_json::from_str(&text).map_err(|e| {
            Failure::input(format!(
                "config JSON invalid at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        opts.tol = opts.tol.or(file.tol);
        opts.grid = opts.grid.or(file.grid);
        opts.starts = opts.starts.or(file.starts);
        opts.seed = opts.seed.or(file.seed);
        opts.emit = opts.emit.or(file.emit);
        opts.certify = opts.certify || file.certify.unwrap_or(false);
    }
    if let Some(t) = opts.tol {
        if !(t > 0.0) {
            return Err(Failure::input("--tol must be positive"));
        }
    }
    let mut cfg = SolveConfig {
        mass_tol: opts.tol,
        certify: opts.certify,
        ..Default::default()
    };
    if let Some(g) = opts.grid {
        if g < 8 {
            return Err(Failure::input("--grid must be at least 8"));
        }
        cfg.scan_resolution = g;
    }
    if let Some(s) = opts.starts {
        if s == 0 {
            return Err(Failure::input("--starts must be at least 1"));
        }
        cfg.starts = s;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    Ok((opts, cfg))
}

fn wants(opts: &CommonOpts, kind: &str) -> bool {
    match &opts.emit {
        Some(kinds) => kinds.iter().any(|k| k == kind),
        None => kind == "json",
    }
}

fn emit_text(opts: &CommonOpts, filename: &str, content: &str, to_stdout: bool) -> CmdResult {
    match &opts.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(filename);
            fs::write(&path, content)
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            Ok(())
        }
        None => {
            if to_stdout {
                println!("{content}");
            }
            Ok(())
        }
    }
}

fn read_problem(path: &Path) -> Result<hamsplit_core::Problem, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    hamsplit_core::schema::parse_problem(&text).map_err(Failure::input)
}

/// A single-measure input file for curve and partition commands.
#[derive(Debug, Deserialize)]
struct MeasureFile {
    schema: u32,
    measure: MeasureSpec,
    #[serde(default)]
    container: Option<ConvexSetSpec>,
}

fn read_measure(path: &Path) -> Result<(Measure, Option<ConvexSet>), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let file: MeasureFile = serde_json::from_str(&text).map_err(|e| {
        Failure::input(format!(
            "measure JSON invalid at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if file.schema != SCHEMA_VERSION {
        return Err(Failure::input(format!("unsupported schema version {}", file.schema)));
    }
    let measure = Measure::from_spec(file.measure).map_err(|e| Failure::input(e.to_string()))?;
    Ok((measure, file.container.map(|c| c.to_set())))
}

fn cmd_split(
    path: &Path,
    alpha: Option<Vec<f64>>,
    common: CommonOpts,
    require_certificate: bool,
) -> CmdResult {
    let (opts, mut cfg) = merged(&common)?;
    if require_certificate {
        cfg.certify = true;
    }
    let mut problem = read_problem(path)?;
    if let Some(alpha) = alpha {
        problem = hamsplit_core::Problem::new(
            problem.measures().to_vec(),
            alpha,
            problem.separators().map(|s| s.to_vec()),
        )
        .map_err(|e| Failure::input(e.to_string()))?;
    }
    let tol = cfg.effective_mass_tol(&problem);
    match find_split(&problem, &cfg).map_err(|e| Failure::input(e.to_string()))? {
        SplitOutcome::Found(res) => {
            let verified = verify_split(&problem, &res.hyperplane, tol)
                .map_err(|e| Failure::input(e.to_string()))?
                .pass;
            let report = SplitReport::found(&res, verified);
            let json = serde_json::to_string_pretty(&report).unwrap();
            if wants(&opts, "json") {
                emit_text(&opts, "split.json", &json, true)?;
            }
            if wants(&opts, "svg") && problem.dim() == 2 {
                let fig = svg::render_figure(problem.measures(), &[&res.hyperplane], &[], 480.0);
                emit_text(&opts, "split.svg", &fig, false)?;
            }
            let certified = res.certificate.is_some();
            if !verified {
                return Err(Failure::negative("split found but failed verification"));
            }
            if require_certificate && !certified {
                return Err(Failure::negative("split found but no box certificate obtained"));
            }
            if certified && res.method != Method::Miranda {
                // unreachable; certification sets the method
            }
            Ok(())
        }
        SplitOutcome::NotFound(scan) => {
            let report = SplitReport::not_found(&scan);
            let json = serde_json::to_string_pretty(&report).unwrap();
            if wants(&opts, "json") {
                emit_text(&opts, "split.json", &json, true)?;
            }
            Err(Failure::negative(format!(
                "no splitting found (best scan residual {:.3e} at resolution {})",
                scan.best_norm, scan.resolution
            )))
        }
    }
}

fn cmd_separability(path: &Path, margin: Option<f64>, common: CommonOpts) -> CmdResult {
    let (opts, _) = merged(&common)?;
    let problem = read_problem(path)?;
    let sets: Vec<PointSet> = problem.measures().iter().map(PointSet::from_support).collect();
    let diameter = {
        let (_, r) = problem.bounding_ball();
        2.0 * r
    };
    let margin = margin.unwrap_or(1e-7 * diameter.max(1.0));
    if !(margin > 0.0) {
        return Err(Failure::input("--margin must be positive"));
    }
    let report = check_separable(&sets, margin).map_err(|e| Failure::input(e.to_string()))?;
    let file = SeparabilityFile::from_report(&report);
    let json = serde_json::to_string_pretty(&file).unwrap();
    if wants(&opts, "json") {
        emit_text(&opts, "separability.json", &json, true)?;
    }
    if report.separable {
        Ok(())
    } else {
        Err(Failure::negative("supports are not separable"))
    }
}

fn cmd_central_sphere(path: &Path, alpha: f64, common: CommonOpts) -> CmdResult {
    let (opts, _) = merged(&common)?;
    let (measure, container) = read_measure(path)?;
    if measure.dim() != 2 {
        return Err(Failure::input("central spheres require a planar measure"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Failure::input("--alpha must lie in [0, 1]"));
    }
    let container = container.unwrap_or_else(|| {
        let (c, r) = measure.bounding_ball();
        ConvexSet::Ball { center: c, radius: r }
    });
    let grid = opts.grid.unwrap_or(1440).max(16);
    let sample = sample_central_sphere(&measure, &container, alpha, grid, 1e-10)
        .map_err(|e| Failure::input(e.to_string()))?;
    let turning = turning_number(&sample.points).map_err(|e| Failure::input(e.to_string()))?;
    let json = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "alpha": alpha,
        "grid": grid,
        "turning_number": turning,
        "fallback_samples": sample.fallback.iter().filter(|f| **f).count(),
    });
    if wants(&opts, "json") {
        emit_text(&opts, "central_sphere.json", &serde_json::to_string_pretty(&json).unwrap(), true)?;
    }
    if wants(&opts, "csv") {
        emit_text(&opts, "central_sphere.csv", &svg::curve_to_csv(&sample), false)?;
    }
    if wants(&opts, "svg") {
        let fig = svg::render_figure(std::slice::from_ref(&measure), &[], &[&sample], 480.0);
        emit_text(&opts, "central_sphere.svg", &fig, false)?;
    }
    Ok(())
}

fn cmd_two_lines(
    path: &Path,
    alpha: Vec<f64>,
    normal: Option<Vec<f64>>,
    common: CommonOpts,
) -> CmdResult {
    let (opts, cfg) = merged(&common)?;
    let (measure, _) = read_measure(path)?;
    if alpha.len() != 4 {
        return Err(Failure::input("--alpha needs exactly four masses"));
    }
    let alphas = [alpha[0], alpha[1], alpha[2], alpha[3]];
    let v = Vector::new(normal.unwrap_or_else(|| vec![0.0, 1.0]));
    if v.dim() != 2 {
        return Err(Failure::input("--normal needs two components"));
    }
    let part = two_line_partition(&measure, alphas, &v, &cfg)
        .map_err(|e| Failure::input(e.to_string()))?;
    let max_error = part
        .quadrant_masses
        .iter()
        .zip(&alphas)
        .map(|(q, a)| (q - a).abs())
        .fold(0.0, f64::max);
    let file = TwoLineFile {
        schema: SCHEMA_VERSION,
        h1: part.h1.clone(),
        h2: part.h2.clone(),
        quadrant_masses: part.quadrant_masses,
        targets: alphas,
        max_error,
    };
    if wants(&opts, "json") {
        emit_text(&opts, "two_lines.json", &serde_json::to_string_pretty(&file).unwrap(), true)?;
    }
    if wants(&opts, "svg") {
        let fig =
            svg::render_figure(std::slice::from_ref(&measure), &[&part.h1, &part.h2], &[], 480.0);
        emit_text(&opts, "two_lines.svg", &fig, false)?;
    }
    Ok(())
}

fn cmd_scenario(name: &str, alpha: Option<f64>, dim: Option<usize>, common: CommonOpts) -> CmdResult {
    let (opts, cfg) = merged(&common)?;
    let desc = scenario::Descriptor {
        name: name.to_string(),
        alpha,
        seed: opts.seed,
        dim,
    };
    let built = scenario::build_with(&desc).map_err(|e| Failure::input(e.to_string()))?;
    let settings = scenario::RunSettings {
        solve: cfg,
        curve_grid: opts.grid.unwrap_or(1440),
    };
    let report = scenario::run(&built, &settings).map_err(|e| Failure::input(e.to_string()))?;
    let pass = report.pass;
    let file = ScenarioFile { schema: SCHEMA_VERSION, report };
    let json = serde_json::to_string_pretty(&file).unwrap();
    if wants(&opts, "json") {
        emit_text(&opts, &format!("scenario_{name}.json"), &json, true)?;
    }
    if wants(&opts, "svg") {
        if let Some(fig) = scenario_figure(&built, &settings) {
            emit_text(&opts, &format!("scenario_{name}.svg"), &fig, false)?;
        }
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::negative(format!("scenario {name} did not match its expectation")))
    }
}

fn scenario_figure(s: &scenario::Scenario, settings: &scenario::RunSettings) -> Option<String> {
    match &s.payload {
        scenario::Payload::Split(problem) if problem.dim() == 2 => {
            Some(svg::render_figure(problem.measures(), &[], &[], 480.0))
        }
        scenario::Payload::CentralSphere { measure, container, alpha } => {
            let sample = sample_central_sphere(
                measure,
                container,
                *alpha,
                settings.curve_grid.max(16),
                1e-10,
            )
            .ok()?;
            Some(svg::render_figure(std::slice::from_ref(measure), &[], &[&sample], 480.0))
        }
        scenario::Payload::Discontinuity { measure, .. } => {
            Some(svg::render_figure(std::slice::from_ref(measure), &[], &[], 480.0))
        }
        _ => None,
    }
}

/// Emits a scan report for CSV consumers; kept for parity with the JSON
/// scan payload.
#[allow(dead_code)]
fn scan_to_csv(scan: &ScanReport) -> String {
    let mut out = String::from("bin_upper,count\n");
    for (edge, count) in &scan.histogram {
        out.push_str(&format!("{edge},{count}\n"));
    }
    out
}

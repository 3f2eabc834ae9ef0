use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use barovort::solutions::{AnalyticSolution, SolutionSpec, VerticalCoord, FAMILIES};
use barovort::solver::{run_benchmark, SolverConfig};
use barovort::sphere::{fmt_f64, read_field_csv, write_field_csv, ScalarField, SphereGrid};
use barovort::symmetry::{
    adjoint, closure_check, decompose_in_span, describe_combination, discrete_symmetry, flow, normalize_params,
    parse_quasi, platzman, platzman_field, sample_points, standard_generators, structure_constants,
    subalgebra_catalog, transform_solution, ClassId, ClassParams, DiscreteSymmetry, PlatzmanDirection,
    PointTransformation, SymmetryGenerator,
};
use barovort::verify::{interior_points, vorticity_residual, ResidualMode};
use barovort::Frame;

const THREADS_ENV: &str = "BAROVORT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "barovort", version, about = "Exact solutions, symmetries and a spectral solver for the barotropic vorticity equation on the sphere")]
#[command(after_help = help_lists())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn help_lists() -> String {
    let classes: Vec<String> = ClassId::all().iter().map(|c| c.to_string()).collect();
    format!(
        "Solution families: {}\nSubalgebra classes: {}\nExit codes: 0 success, 1 check failed, 2 usage or input error.\nSet {THREADS_ENV} to limit worker threads.",
        FAMILIES.join(", "),
        classes.join(", ")
    )
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a solution on a Gauss grid and write the field CSV.
    Generate(GenerateArgs),
    /// Evaluate the vorticity-equation residual of a solution.
    Verify(VerifyArgs),
    /// Structure constants, subalgebra closure and adjoint actions.
    Algebra {
        #[command(subcommand)]
        action: AlgebraAction,
    },
    /// Apply a chain of point transformations to a solution or field.
    Transform(TransformArgs),
    /// Integrate an exact solution with the spectral solver and compare.
    Bench(BenchArgs),
}

/// Solution given inline by family and keys, or by a `key = value` file.
#[derive(Args, Debug, Default)]
struct SpecArgs {
    /// Text file with `key = value` lines; excludes the inline keys.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Wave mode `m:A:delta`; repeat for several modes.
    #[arg(long = "mode", value_name = "M:A:DELTA")]
    modes: Vec<String>,
    /// Zonal rate, or `rh-classic` for (n(n+1)−2)Ω/(n(n+1)).
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long = "W")]
    big_w: Option<String>,
    #[arg(long = "H")]
    big_h: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    global: Option<String>,
    #[arg(long)]
    c1: Option<String>,
    #[arg(long)]
    c2: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    r0: Option<String>,
}

impl SpecArgs {
    fn inline_pairs(&self) -> Vec<(&'static str, String)> {
        let mut pairs = Vec::new();
        let single = [
            ("family", &self.family),
            ("n", &self.n),
            ("m", &self.m),
            ("a", &self.a),
            ("amplitude", &self.amplitude),
            ("omega", &self.omega),
            ("g", &self.g),
            ("f", &self.f),
            ("h", &self.h),
            ("w", &self.w),
            ("W", &self.big_w),
            ("H", &self.big_h),
            ("delta", &self.delta),
            ("global", &self.global),
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("nu", &self.nu),
            ("r0", &self.r0),
        ];
        for (k, v) in single {
            if let Some(v) = v {
                pairs.push((k, v.clone()));
            }
        }
        pairs.extend(self.modes.iter().map(|m| ("mode", m.clone())));
        pairs
    }

    fn parse(&self) -> Result<SolutionSpec> {
        let inline = self.inline_pairs();
        match &self.spec {
            Some(path) => {
                if !inline.is_empty() {
                    bail!("--spec excludes inline solution keys (got --{})", inline[0].0);
                }
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(SolutionSpec::parse(&text)?)
            }
            None => {
                if self.family.is_none() {
                    bail!("give --family or --spec");
                }
                Ok(SolutionSpec::from_pairs(inline)?)
            }
        }
    }

    fn build(&self) -> Result<(SolutionSpec, AnalyticSolution)> {
        let spec = self.parse()?;
        let sol = spec.build()?;
        Ok((spec, sol))
    }
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 64)]
    nlat: usize,
    #[arg(long, default_value_t = 128)]
    nlon: usize,
    /// Time at which the field is sampled.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Analytic,
    Fd,
    Spectral,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Pass threshold on relative_max.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Method::Analytic)]
    method: Method,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Finite-difference step for `--method fd`.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Truncation for `--method spectral`.
    #[arg(long, default_value_t = 42)]
    truncation: usize,
    /// Per-point residual CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AlgebraAction {
    /// Structure constants of D, ∂t, J1, J2, J3, Z(1), Z(t), Z(t²).
    Table {
        /// Write `pair_i,pair_j,residual,pass` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Closure of a catalog subalgebra.
    Check {
        #[arg(long = "class")]
        class_id: String,
        /// Comma-separated `key=value`, lists separated by `;`.
        #[arg(long, default_value = "")]
        params: String,
        /// Apply the catalog normalizer to the parameters first.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Decompose Ad(exp(eps·X)) Y over D, ∂t, J1, J2, J3 and the Z terms given.
    Adjoint {
        #[arg(long)]
        x: String,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long)]
        y: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlatzmanArg {
    ToRest,
    ToRotating,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DiscreteArg {
    TimeReversal,
    Mirror,
}

/// Steps are applied in command-line order.
#[derive(Args, Debug)]
struct TransformArgs {
    /// Solution spec file.
    #[arg(long, conflicts_with = "input")]
    spec: Option<PathBuf>,
    /// Field CSV; only Platzman steps apply to grid values.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    platzman: Vec<PlatzmanArg>,
    /// Rotation rate used by Platzman steps; defaults to the input frame's.
    #[arg(long)]
    omega: Option<f64>,
    /// Flow `GEN:EPS` of D, Dt, J1, J2, J3 or Z(<function of t>).
    #[arg(long = "flow", visible_alias = "rotate", value_name = "GEN:EPS", allow_hyphen_values = true)]
    flows: Vec<String>,
    #[arg(long, value_enum)]
    discrete: Vec<DiscreteArg>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FrameArg {
    Rest,
    Rotating,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Triangular truncation.
    #[arg(long = "T", default_value_t = 42)]
    truncation: usize,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    steps: usize,
    /// Frame the equations are integrated in.
    #[arg(long, value_enum, default_value_t = FrameArg::Rest)]
    frame: FrameArg,
    #[arg(long, default_value_t = 0.0)]
    hyperdiffusion: f64,
    #[arg(long, default_value_t = 2)]
    hyper_order: u32,
    /// Rows every this many steps; default gives about 100 rows.
    #[arg(long)]
    stride: Option<usize>,
    /// Coefficient `n:m` whose phase is tracked.
    #[arg(long)]
    track: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Algebra { action } => cmd_algebra(&action),
        Command::Transform(a) => {
            let sub = matches.subcommand_matches("transform").expect("transform matches");
            cmd_transform(&a, sub)
        }
        Command::Bench(a) => cmd_bench(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().with_context(|| format!("{THREADS_ENV}={v}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn sample_field(sol: &AnalyticSolution, g: &GridArgs) -> Result<(ScalarField, ScalarField)> {
    let grid = SphereGrid::new(g.nlat, g.nlon)?;
    let y = |mu: f64| match sol.coord {
        VerticalCoord::Mu => mu,
        VerticalCoord::Theta => mu.acos(),
    };
    let mut failed_at = None;
    let psi = ScalarField::from_fn(grid.clone(), g.t, sol.frame, |l, mu| {
        sol.psi(g.t, l, y(mu)).inspect_err(|_| failed_at = Some(mu))
    })
    .map_err(|e| match failed_at {
        Some(mu) => anyhow!("ψ at μ = {}: {e}", fmt_f64(mu)),
        None => anyhow!("ψ: {e}"),
    })?;
    let zeta = ScalarField::from_fn(grid, g.t, sol.frame, |l, mu| sol.zeta(g.t, l, y(mu)))
        .map_err(|e| anyhow!("ζ: {e}"))?;
    Ok((psi, zeta))
}

fn cmd_generate(a: &GenerateArgs) -> Result<bool> {
    let (_, sol) = a.spec.build()?;
    let (psi, zeta) = sample_field(&sol, &a.grid)?;
    let mut out = open_out(&a.out)?;
    write_field_csv(&mut out, &psi, Some(&zeta))?;
    out.flush()?;
    Ok(true)
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    let (spec, sol) = a.spec.build()?;
    let mode = match a.method {
        Method::Analytic => ResidualMode::Analytic,
        Method::Fd => match a.fd_step {
            Some(step) => ResidualMode::FiniteDifference { step },
            None => ResidualMode::finite_difference(),
        },
        Method::Spectral => ResidualMode::Spectral { truncation: a.truncation },
    };
    if a.points == 0 {
        bail!("--points must be positive");
    }
    let pts = interior_points(&sol, a.points);
    let report = vorticity_residual(&sol, &pts, mode)?;
    let pass = report.passes(a.tol);
    print!("{spec}");
    println!("{report}");
    println!("tol           {}", fmt_f64(a.tol));
    println!("result        {}", if pass { "PASS" } else { "FAIL" });
    if let Some(p) = &a.out {
        write_text(p, &report.to_csv())?;
    }
    Ok(pass)
}

fn parse_generator(s: &str) -> Result<SymmetryGenerator> {
    let s = s.trim();
    Ok(match s {
        "D" => SymmetryGenerator::d(),
        "Dt" | "dt" | "∂t" => SymmetryGenerator::dt(),
        "J1" => SymmetryGenerator::j1(),
        "J2" => SymmetryGenerator::j2(),
        "J3" => SymmetryGenerator::j3(),
        _ => match s.strip_prefix("Z(").and_then(|r| r.strip_suffix(')')) {
            Some(inner) => SymmetryGenerator::z_poly(parse_quasi(inner)?),
            None => bail!("unknown generator `{s}` (expected D, Dt, J1, J2, J3 or Z(<function of t>))"),
        },
    })
}

fn algebra_basis() -> Vec<SymmetryGenerator> {
    let mut basis = standard_generators();
    basis.extend((0..3).map(SymmetryGenerator::z_power));
    basis
}

fn cmd_algebra(action: &AlgebraAction) -> Result<bool> {
    let pts = sample_points(40);
    match action {
        AlgebraAction::Table { csv } => {
            let table = structure_constants(&algebra_basis(), &pts, 1e-7)?;
            print!("{}", table.to_text());
            if let Some(p) = csv {
                write_text(p, &table.to_csv())?;
            }
            Ok(table.closed())
        }
        AlgebraAction::Check {
            class_id,
            params,
            normalize,
            csv,
        } => {
            let id: ClassId = class_id.parse()?;
            let mut params = ClassParams::parse(params)?;
            if *normalize {
                params = normalize_params(id, &params);
            }
            let sub = subalgebra_catalog(id, &params)?;
            let report = closure_check(&sub, &pts)?;
            println!("class {id}: {}", sub.labels().join(", "));
            print!("{}", report.table.to_text());
            println!("max residual {}", fmt_f64(report.max_residual));
            match &report.witness {
                None => println!("closed"),
                Some((bracket, decomposition)) => println!("NOT closed: {bracket} = {decomposition}"),
            }
            if let Some(p) = csv {
                write_text(p, &report.table.to_csv())?;
            }
            Ok(report.pass)
        }
        AlgebraAction::Adjoint { x, eps, y } => {
            let (gx, gy) = (parse_generator(x)?, parse_generator(y)?);
            let mut basis = standard_generators();
            for g in [&gx, &gy] {
                if g.z_function().is_some() {
                    basis.push(g.clone());
                }
            }
            let ad = adjoint(&gx, *eps, &gy);
            let d = decompose_in_span(&ad, &basis, &pts)?;
            // Headline at the precision of a typed ε; full coefficients follow.
            let shown: Vec<f64> = d.coefficients.iter().map(|c| (c * 1e6).round() / 1e6).collect();
            println!("{}", describe_combination(&shown, &basis));
            for (b, c) in basis.iter().zip(&d.coefficients) {
                println!("{:<8} {}", b.label, fmt_f64(*c));
            }
            println!("residual {}", fmt_f64(d.residual));
            Ok(d.residual <= 1e-8)
        }
    }
}

enum Step {
    Platzman(PlatzmanDirection),
    Flow(String),
    Discrete(DiscreteSymmetry),
}

/// Transformation steps in the order they appear on the command line.
fn ordered_steps(a: &TransformArgs, m: &ArgMatches) -> Vec<Step> {
    let mut steps: Vec<(usize, Step)> = Vec::new();
    let idx = |id: &str| m.indices_of(id).map(|i| i.collect::<Vec<_>>()).unwrap_or_default();
    for (i, p) in idx("platzman").into_iter().zip(&a.platzman) {
        let dir = match p {
            PlatzmanArg::ToRest => PlatzmanDirection::ToRest,
            PlatzmanArg::ToRotating => PlatzmanDirection::ToRotating,
        };
        steps.push((i, Step::Platzman(dir)));
    }
    for (i, f) in idx("flows").into_iter().zip(&a.flows) {
        steps.push((i, Step::Flow(f.clone())));
    }
    for (i, d) in idx("discrete").into_iter().zip(&a.discrete) {
        let which = match d {
            DiscreteArg::TimeReversal => DiscreteSymmetry::TimeReversal,
            DiscreteArg::Mirror => DiscreteSymmetry::Mirror,
        };
        steps.push((i, Step::Discrete(which)));
    }
    steps.sort_by_key(|(i, _)| *i);
    steps.into_iter().map(|(_, s)| s).collect()
}

fn platzman_omega(a: &TransformArgs, frame: Frame) -> Result<f64> {
    match (a.omega, frame) {
        (Some(w), _) => Ok(w),
        (None, Frame::Rotating { omega }) => Ok(omega),
        (None, Frame::Rest) => bail!("--omega is required to leave the rest frame"),
    }
}

fn parse_flow(s: &str) -> Result<PointTransformation> {
    let (gen, eps) = s
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("flow `{s}`: expected GEN:EPS"))?;
    let eps: f64 = eps.trim().parse().with_context(|| format!("flow `{s}`"))?;
    Ok(flow(&parse_generator(gen)?, eps))
}

fn cmd_transform(a: &TransformArgs, m: &ArgMatches) -> Result<bool> {
    let steps = ordered_steps(a, m);
    if steps.is_empty() {
        bail!("no transformation given (use --platzman, --flow or --discrete)");
    }
    let (psi, zeta) = match (&a.spec, &a.input) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut sol = SolutionSpec::parse(&text)?.build()?;
            for step in &steps {
                let t = match step {
                    Step::Platzman(dir) => platzman(*dir, platzman_omega(a, sol.frame)?),
                    Step::Flow(s) => parse_flow(s)?,
                    Step::Discrete(d) => discrete_symmetry(*d),
                };
                sol = transform_solution(&sol, &t)?;
            }
            let (psi, zeta) = sample_field(&sol, &a.grid)?;
            (psi, Some(zeta))
        }
        (None, Some(path)) => {
            let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let (mut psi, _) = read_field_csv(BufReader::new(file))?;
            for step in &steps {
                match step {
                    Step::Platzman(dir) => {
                        let omega = platzman_omega(a, psi.frame)?;
                        psi = platzman_field(&psi, *dir, omega);
                    }
                    _ => bail!("only --platzman applies to a field file; give a --spec to use flows"),
                }
            }
            (psi, None)
        }
        _ => bail!("give exactly one of --spec or --input"),
    };
    let mut out = open_out(&a.out)?;
    write_field_csv(&mut out, &psi, zeta.as_ref())?;
    out.flush()?;
    Ok(true)
}

fn parse_track(s: &str) -> Result<(usize, usize)> {
    let (n, m) = s.split_once(':').ok_or_else(|| anyhow!("track `{s}`: expected n:m"))?;
    Ok((n.trim().parse()?, m.trim().parse()?))
}

fn default_track(spec: &SolutionSpec) -> (usize, usize) {
    let get = |k: &str| spec.params.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    let n = get("n").and_then(|v| v.parse().ok());
    let m = get("m")
        .and_then(|v| v.parse().ok())
        .or_else(|| get("mode").and_then(|v| v.split(':').next()?.trim().parse().ok()));
    match (n, m) {
        (Some(n), Some(m)) => (n, m),
        _ => (1, 1),
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<bool> {
    let (spec, sol) = a.spec.build()?;
    let frame = match a.frame {
        FrameArg::Rest => Frame::Rest,
        FrameArg::Rotating => Frame::Rotating { omega: sol.omega() },
    };
    let mut cfg = SolverConfig::new(a.truncation, a.dt, a.steps, frame);
    cfg.hyperdiffusion = a.hyperdiffusion;
    cfg.hyper_order = a.hyper_order;
    cfg.output_stride = a.stride.unwrap_or((a.steps / 100).max(1));
    cfg.track = match &a.track {
        Some(t) => parse_track(t)?,
        None => default_track(&spec),
    };
    let report = run_benchmark(&sol, &cfg)?;
    let mut out = open_out(&a.out)?;
    out.write_all(report.to_csv().as_bytes())?;
    out.flush()?;
    if let Some(last) = report.last() {
        let (de, dz) = report.conservation_drift();
        eprintln!(
            "t {} linf {} phase {} drift E {} Z {}",
            fmt_f64(last.t),
            fmt_f64(report.final_linf()),
            fmt_f64(report.phase_speed()),
            fmt_f64(de),
            fmt_f64(dz)
        );
    }
    match &report.failure {
        Some(e) => {
            eprintln!("run stopped: {e}");
            Ok(false)
        }
        None => Ok(true),
    }
}

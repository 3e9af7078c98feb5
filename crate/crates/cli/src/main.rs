use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regpoly::io::{
    polygon_to_json, residuals_to_csv, svg_frame, trace_to_jsonl, vertices_from_json, write_polygon,
};
use regpoly::perturb;
use regpoly::variations::check_variations;
use regpoly::{
    compute_metrics, generate, residuals, run_flow, verify_theorem, Error, Exec, Family,
    FlowConfig, FlowOutcome, Kind, Move, Point, Polygon,
};
use serde_json::json;

/// Polygon perturbations, perimeter stationarity and flows to the regular polygon.
#[derive(Parser)]
#[command(name = "regpoly", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated polygon as JSON.
    Generate(GenerateArgs),
    /// Print side lengths, angles, diagonal angles, perimeter, area and Q.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Apply one slide, tilt or vertex move.
    Perturb {
        #[arg(long = "in")]
        input: PathBuf,
        /// slide, tilt or move
        #[arg(long)]
        family: Family,
        /// 1-based side or vertex index
        #[arg(long)]
        index: usize,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stationarity residuals and classification.
    Residuals {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = regpoly::variations::DEFAULT_STAT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compare analytic first variations with central differences.
    CheckVariations {
        #[arg(long = "in")]
        input: PathBuf,
        /// Relative step: times the diameter for slides and moves, radians for tilts.
        #[arg(long, default_value_t = 1e-6)]
        h: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Negate psi in the analytic formulas (exercises the failure path).
        #[arg(long, hide = true)]
        sabotage_psi: bool,
    },
    /// Descend Q over the selected families until stationary.
    Flow(FlowArgs),
    /// Flow a batch of random convex N-gons and look for non-regular stationary points.
    VerifyTheorem(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindName {
    Regular,
    Rectangle,
    Kite,
    RandomConvex,
    PerturbedRegular,
    RandomStar,
}

#[derive(Args)]
struct GenerateArgs {
    kind: KindName,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    h1: Option<f64>,
    #[arg(long)]
    h2: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated subset of s,t,m
    #[arg(long, value_delimiter = ',', default_values = ["s", "t"])]
    families: Vec<Family>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// JSON lines, one per recorded iterate
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Directory for one SVG per recorded iterate
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 3 unless the flow converged
    #[arg(long)]
    require_convergence: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    #[arg(long, value_delimiter = ',', default_values = ["s", "t"])]
    families: Vec<Family>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Include per-seed results
    #[arg(long)]
    runs: bool,
    #[arg(long)]
    sequential: bool,
}

enum Failure {
    Invalid(String),
    Io(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::Format(_) => Failure::Io(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Generate(a) => cmd_generate(a),
        Command::Inspect { input } => {
            let p = read_polygon(&input)?;
            emit_line(&json!(compute_metrics(&p)?).to_string());
            Ok(())
        }
        Command::Perturb {
            input,
            family,
            index,
            t,
            out,
        } => {
            let p = read_polygon(&input)?;
            let i = zero_based(index, p.n())?;
            let q = perturb::apply(&p, Move::new(family, i, t))?;
            emit_polygon(&q, out.as_deref())
        }
        Command::Residuals { input, tol, format } => {
            let p = read_polygon(&input)?;
            check_tol(tol)?;
            let report = residuals(&p, tol);
            match format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report).expect("report serializes");
                    v["classification"] = json!(report.classification());
                    emit_line(&v.to_string());
                }
                Format::Csv => emit(&residuals_to_csv(&report)),
            }
            Ok(())
        }
        Command::CheckVariations {
            input,
            h,
            tol,
            sabotage_psi,
        } => {
            let p = read_polygon(&input)?;
            check_tol(tol)?;
            if !(h > 0.0 && h.is_finite()) {
                return Err(Failure::Invalid(format!("step must be positive, got {h}")));
            }
            let rows = check_variations(&p, h, tol, sabotage_psi)?;
            let mut table = String::from("family index dQ_analytic dQ_fd max_rel_err result\n");
            for r in &rows {
                table += &format!(
                    "{} {} {:?} {:?} {:.1e} {}\n",
                    r.family,
                    r.index + 1,
                    r.analytic.d_quotient,
                    r.numeric.d_quotient,
                    r.max_rel_err,
                    if r.passed { "pass" } else { "FAIL" }
                );
            }
            emit(&table);
            let failed = rows.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Failure::Violation(format!(
                    "{failed} of {} derivatives disagree",
                    rows.len()
                )));
            }
            Ok(())
        }
        Command::Flow(a) => cmd_flow(a),
        Command::VerifyTheorem(a) => cmd_verify(a),
    }
}

fn cmd_generate(a: GenerateArgs) -> CmdResult {
    let need_n = || {
        a.n.ok_or_else(|| Failure::Invalid("--n is required".into()))
    };
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Failure::Invalid(format!("--{name} is required")))
    };
    let kind = match a.kind {
        KindName::Regular => Kind::Regular {
            n: need_n()?,
            radius: a.radius,
        },
        KindName::Rectangle => Kind::Rectangle {
            a: need(a.a, "a")?,
            b: need(a.b, "b")?,
        },
        KindName::Kite => Kind::Kite {
            w: need(a.w, "w")?,
            h1: need(a.h1, "h1")?,
            h2: need(a.h2, "h2")?,
        },
        KindName::RandomConvex => Kind::RandomConvex {
            n: need_n()?,
            seed: a.seed,
        },
        KindName::PerturbedRegular => Kind::PerturbedRegular {
            n: need_n()?,
            eps: a.eps,
            seed: a.seed,
        },
        KindName::RandomStar => Kind::RandomStar {
            n: need_n()?,
            seed: a.seed,
        },
    };
    emit_polygon(&generate(&kind)?, a.out.as_deref())
}

fn cmd_flow(a: FlowArgs) -> CmdResult {
    let p = read_polygon(&a.input)?;
    let cfg = FlowConfig {
        stat_tol: a.tol,
        max_iters: a.max_iters,
        record_every: a.record_every,
        record_polygons: a.svg.is_some(),
        ..FlowConfig::with_families(&a.families)
    };
    let res = run_flow(&p, &cfg)?;
    if let Some(path) = &a.trace {
        fs::write(path, trace_to_jsonl(&res.trace)).map_err(io_failure(path))?;
    }
    if let Some(dir) = &a.svg {
        fs::create_dir_all(dir).map_err(io_failure(dir))?;
        for rec in &res.trace.iterates {
            if let Some(v) = &rec.polygon {
                let pts: Vec<Point> = v.iter().copied().map(Point::from).collect();
                let path = dir.join(format!("frame_{:06}.svg", rec.iteration));
                fs::write(&path, svg_frame(&pts)).map_err(io_failure(&path))?;
            }
        }
    }
    if let Some(path) = &a.out {
        write_polygon(path, &res.polygon)?;
    }
    let summary = json!({
        "outcome": res.trace.outcome,
        "steps": res.trace.steps,
        "q_initial": p.quotient(),
        "q_final": res.q_final,
        "q_measured": res.polygon.quotient(),
        "vertices": res.polygon.vertices(),
    });
    emit_line(&summary.to_string());
    if a.require_convergence && !res.trace.outcome.is_converged() {
        let why = match &res.trace.outcome {
            FlowOutcome::Stalled { reason } => format!("flow stalled: {reason}"),
            _ => format!("flow hit {} iterations without converging", a.max_iters),
        };
        return Err(Failure::Violation(why));
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let cfg = FlowConfig {
        stat_tol: a.tol,
        max_iters: a.max_iters,
        ..FlowConfig::with_families(&a.families)
    };
    let exec = if a.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let summary = verify_theorem(a.n, a.seeds, &cfg, exec)?;
    let mut v = serde_json::to_value(&summary).expect("summary serializes");
    if !a.runs {
        v.as_object_mut()
            .expect("summary is an object")
            .remove("runs");
    }
    emit_line(&v.to_string());
    if !summary.counterexamples.is_empty() {
        return Err(Failure::Violation(format!(
            "{} stationary non-regular polygons found",
            summary.counterexamples.len()
        )));
    }
    Ok(())
}

fn read_polygon(path: &Path) -> Result<Polygon, Failure> {
    let text = fs::read_to_string(path).map_err(io_failure(path))?;
    let vertices =
        vertices_from_json(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(Polygon::new(vertices)?)
}

fn emit_polygon(p: &Polygon, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => Ok(write_polygon(path, p)?),
        None => {
            emit_line(&polygon_to_json(p).to_string());
            Ok(())
        }
    }
}

fn io_failure(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn zero_based(index: usize, n: usize) -> Result<usize, Failure> {
    if index == 0 || index > n {
        return Err(Failure::Invalid(format!(
            "index must be in 1..={n}, got {index}"
        )));
    }
    Ok(index - 1)
}

fn check_tol(tol: f64) -> CmdResult {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn emit_line(s: &str) {
    emit(&format!("{s}\n"));
}

//! `mibound`: mutual information, its lower bound under a variational-distance
//! budget, the underlying sweep curve, and confidence floors from counts.
//!
//! Exit codes: 0 success, 2 invalid input, 3 uncertified result, 4 I/O failure.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mibound::sweep::{format_sig, refine_from, write_curve_csv, PointStatus, RefineCheck, DEFAULT_POINTS};
use mibound::{
    empirical_joint, lower_bound, make_grid, mi_confidence_floor, mutual_information, sweep, BoundReport, CountsTable,
    InfoValue, JointDist, SolveStatus, SolverConfig, Unit, ValidationPolicy,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mibound", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutual information of a joint distribution.
    Mi {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smallest mutual information over all joints within L1 distance eps.
    Bound {
        #[command(flatten)]
        input: InputArgs,
        /// Radius of the L1 ball around the joint distribution, in [0, 2].
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also solve on twice as many grid points and report the change.
        #[arg(long)]
        refine: bool,
    },
    /// Inner minimum at every grid offset, written as CSV.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// Radius of the L1 ball around the joint distribution, in [0, 2].
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = UnitArg::Bits)]
        unit: UnitArg,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Confidence floor for mutual information estimated from a 2 x M_y
    /// table of counts.
    Ci {
        /// Counts file (two lines of whitespace-separated integers), or `-`
        /// for standard input.
        counts: String,
        /// Probability that the floor fails to hold.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also solve on twice as many grid points and report the change.
        #[arg(long)]
        refine: bool,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Joint distribution as `{"pxy": [[...], [...]]}`: a file path, inline
    /// JSON, or `-` for standard input.
    input: String,
    /// Treatment of inputs whose total mass is not one.
    #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
    policy: PolicyArg,
}

#[derive(Args)]
struct SolverArgs {
    /// Number of equidistant marginal offsets.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    /// Duality gap at which an inner solve counts as converged, in nats.
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Iteration cap per inner solve.
    #[arg(long)]
    max_iters: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(tol) = self.gap_tol {
            cfg.gap_tol = tol;
        }
        if let Some(n) = self.max_iters {
            cfg.max_iters = n;
        }
        cfg
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = UnitArg::Bits)]
    unit: UnitArg,
    /// Print a JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Bits,
    Nats,
}

impl From<UnitArg> for Unit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Bits => Unit::Bits,
            UnitArg::Nats => Unit::Nats,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Strict,
    Renormalize,
}

impl From<PolicyArg> for ValidationPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Strict => ValidationPolicy::Strict,
            PolicyArg::Renormalize => ValidationPolicy::Renormalize,
        }
    }
}

enum Failure {
    Input(String),
    Io(String),
}

impl From<mibound::Error> for Failure {
    fn from(e: mibound::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// What a command printed, and whether its result is certified.
struct Outcome {
    stdout: String,
    stderr: String,
    certified: bool,
}

impl Outcome {
    fn certified(stdout: String) -> Self {
        Self { stdout, stderr: String::new(), certified: true }
    }
}

fn read_source(src: &str) -> Result<String, Failure> {
    if src == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Io(format!("reading standard input: {e}")))?;
        Ok(buf)
    } else if src.trim_start().starts_with('{') {
        Ok(src.to_string())
    } else {
        fs::read_to_string(src).map_err(|e| Failure::Io(format!("reading {src}: {e}")))
    }
}

fn load_joint(input: &InputArgs) -> Result<JointDist, Failure> {
    let text = read_source(&input.input)?;
    Ok(JointDist::from_json_str(&text, input.policy.into())?)
}

fn show(v: InfoValue, unit: Unit) -> String {
    format!("{:.4}", v.in_unit(unit))
}

fn to_json(v: Value) -> String {
    serde_json::to_string(&v).expect("serializable") + "\n"
}

fn refine_json(r: &RefineCheck) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn refine_line(r: &RefineCheck) -> String {
    format!(
        "refine     {} bits change at {} points ({})\n",
        format_sig(r.change_bits, 3),
        2 * r.n_points,
        if r.sufficient { "grid sufficient" } else { "grid too coarse" }
    )
}

fn uncertified_note(report: &BoundReport) -> String {
    let capped = report.curve.iter().filter(|pt| pt.result.as_ref().is_ok_and(|r| r.status == SolveStatus::IterCap));
    let failed = report.curve.iter().filter(|pt| pt.result.is_err()).count();
    format!(
        "warning: bound is not certified ({} points hit the iteration cap, {failed} failed); \
         certified floor {} nats\n",
        capped.count(),
        report.certified_floor().map_or("n/a".into(), |f| format_sig(f, 6))
    )
}

fn bound_json(report: &BoundReport, unit: Unit) -> Value {
    json!({
        "eps": report.eps,
        "points": report.curve.len(),
        "unit": unit,
        "i_of_p": report.i_of_p.in_unit(unit),
        "bound": report.bound.in_unit(unit),
        "arg_gamma": report.arg_gamma,
        "certified": report.certified,
        "certified_floor_nats": report.certified_floor(),
        "argmin": report.argmin.to_json(),
    })
}

fn cmd_mi(input: &InputArgs, output: &OutputArgs) -> Result<Outcome, Failure> {
    let p = load_joint(input)?;
    let unit = output.unit.into();
    let mi = mutual_information(&p);
    let text = if output.json {
        to_json(json!({ "unit": unit, "mi": mi.in_unit(unit), "pxy": p.to_json().pxy }))
    } else {
        format!("{}\n", show(mi, unit))
    };
    Ok(Outcome::certified(text))
}

fn cmd_bound(
    input: &InputArgs,
    eps: f64,
    solver: &SolverArgs,
    output: &OutputArgs,
    refine: bool,
) -> Result<Outcome, Failure> {
    let p = load_joint(input)?;
    let cfg = solver.config();
    let unit = output.unit.into();
    let report = lower_bound(&p, eps, solver.points, &cfg)?;
    let check = if refine {
        let fine = lower_bound(&p, eps, 2 * solver.points, &cfg)?;
        Some(refine_from(&report, &fine, solver.points))
    } else {
        None
    };

    let stdout = if output.json {
        let mut v = bound_json(&report, unit);
        if let Some(c) = &check {
            v["refine"] = refine_json(c);
        }
        to_json(v)
    } else {
        let mut s = String::new();
        writeln!(s, "I(p)       {} {unit}", show(report.i_of_p, unit)).unwrap();
        writeln!(s, "bound      {} {unit}", show(report.bound, unit)).unwrap();
        writeln!(s, "gamma      {}", format_sig(report.arg_gamma, 6)).unwrap();
        writeln!(s, "certified  {}", if report.certified { "yes" } else { "no" }).unwrap();
        if let Some(c) = &check {
            s.push_str(&refine_line(c));
        }
        s
    };
    let stderr = if report.certified { String::new() } else { uncertified_note(&report) };
    Ok(Outcome { stdout, stderr, certified: report.certified })
}

fn cmd_sweep(
    input: &InputArgs,
    eps: f64,
    solver: &SolverArgs,
    unit: UnitArg,
    out: Option<&PathBuf>,
) -> Result<Outcome, Failure> {
    let p = load_joint(input)?;
    let cfg = solver.config();
    let unit: Unit = unit.into();
    let grid = make_grid(eps, solver.points)?;
    let curve = sweep(&p, eps, &grid, &cfg)?;

    let best = curve
        .iter()
        .filter_map(|pt| pt.value().map(|v| (pt.gamma, v)))
        .min_by(|a, b| a.1.nats().total_cmp(&b.1.nats()));
    let uncertified = curve.iter().filter(|pt| pt.status() != PointStatus::Converged).count();
    let summary = match best {
        Some((gamma, v)) => format!(
            "min {} {unit} at gamma = {} over {} points ({} not converged)\n",
            show(v, unit),
            format_sig(gamma, 6),
            curve.len(),
            uncertified
        ),
        None => format!("no point solved over {} points\n", curve.len()),
    };

    let mut csv = Vec::new();
    write_curve_csv(&curve, &mut csv).expect("writing to memory");
    let certified = uncertified == 0;
    match out {
        Some(path) => {
            let write = |path: &PathBuf| -> io::Result<()> {
                let mut w = BufWriter::new(File::create(path)?);
                w.write_all(&csv)?;
                w.flush()
            };
            write(path).map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
            Ok(Outcome { stdout: summary, stderr: String::new(), certified })
        }
        None => Ok(Outcome { stdout: String::from_utf8(csv).expect("CSV is ASCII"), stderr: summary, certified }),
    }
}

fn cmd_ci(
    counts: &str,
    delta: f64,
    solver: &SolverArgs,
    output: &OutputArgs,
    refine: bool,
) -> Result<Outcome, Failure> {
    let table = CountsTable::parse(&read_source_counts(counts)?)?;
    let cfg = solver.config();
    let unit = output.unit.into();
    let report = mi_confidence_floor(&table, delta, solver.points, &cfg)?;
    let check = if refine {
        let (p_hat, _) = empirical_joint(&table)?;
        let fine = lower_bound(&p_hat, report.eps, 2 * solver.points, &cfg)?;
        Some(refine_from(&report.bound, &fine, solver.points))
    } else {
        None
    };

    let stdout = if output.json {
        let mut v = json!({
            "n": report.spec.n,
            "k": report.spec.k,
            "delta": report.spec.delta,
            "eps": report.eps,
            "unit": unit,
            "i_hat": report.i_hat.in_unit(unit),
            "floor": report.floor().in_unit(unit),
            "arg_gamma": report.bound.arg_gamma,
            "certified": report.bound.certified,
            "argmin": report.bound.argmin.to_json(),
        });
        if let Some(c) = &check {
            v["refine"] = refine_json(c);
        }
        to_json(v)
    } else {
        let mut s = String::new();
        writeln!(s, "n          {}", report.spec.n).unwrap();
        writeln!(s, "I(p_hat)   {} {unit}", show(report.i_hat, unit)).unwrap();
        writeln!(s, "eps        {}", format_sig(report.eps, 6)).unwrap();
        writeln!(s, "floor      {} {unit}", show(report.floor(), unit)).unwrap();
        writeln!(s, "confidence {}", format_sig(1.0 - report.spec.delta, 6)).unwrap();
        writeln!(s, "certified  {}", if report.bound.certified { "yes" } else { "no" }).unwrap();
        if let Some(c) = &check {
            s.push_str(&refine_line(c));
        }
        s
    };
    let stderr = if report.bound.certified { String::new() } else { uncertified_note(&report.bound) };
    Ok(Outcome { stdout, stderr, certified: report.bound.certified })
}

fn read_source_counts(src: &str) -> Result<String, Failure> {
    if src == "-" {
        read_source(src)
    } else {
        fs::read_to_string(src).map_err(|e| Failure::Io(format!("reading {src}: {e}")))
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Mi { input, output } => cmd_mi(input, output),
        Command::Bound { input, eps, solver, output, refine } => cmd_bound(input, *eps, solver, output, *refine),
        Command::Sweep { input, eps, solver, unit, out } => cmd_sweep(input, *eps, solver, *unit, out.as_ref()),
        Command::Ci { counts, delta, solver, output, refine } => cmd_ci(counts, *delta, solver, output, *refine),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = io::stdout().lock();
            if let Err(e) = stdout.write_all(outcome.stdout.as_bytes()).and_then(|_| stdout.flush()) {
                eprintln!("error: writing output: {e}");
                return ExitCode::from(4);
            }
            eprint!("{}", outcome.stderr);
            if outcome.certified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

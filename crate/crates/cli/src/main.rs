use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value as Json};

use lcl_complexes::complex::{
    complex_to_json, connected_components, one_skeleton, skeleton_to_dot, Complex,
};
use lcl_complexes::reduction::{linial_bound, log_star, reduce_once, tower, ColorCode, Tower};
use lcl_complexes::search::{extract_algorithm, witness_from_json, SearchStats, DEFAULT_MAX_NODES};
use lcl_complexes::sim::{cross_validate, reference_linial_table, run, CrossConfig, RingInstance};
use lcl_complexes::task::{build_input_complex, build_output_complex, builtin, BUILTIN_NAMES};
use lcl_complexes::{
    build_protocol_complex, parse_task, solve, solve_skeleton, AlgorithmTable, IdMode, LclTask,
    SolveOptions, SolveResult, Verdict,
};

/// ID range from which a pigeonhole argument alone guarantees three IDs
/// with equal zero-round output. Informational: exact search already
/// reports UNSAT at R = 4.
const PIGEONHOLE_R: u32 = 24;

const EXIT_OK: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

macro_rules! outln {
    ($($arg:tt)*) => {
        emit(&(format!($($arg)*) + "\n"))?
    };
}

#[derive(Parser)]
#[command(name = "lclx", version)]
#[command(about = "Decide round complexity of LCL tasks on rings via local protocol complexes")]
#[command(after_help = after_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn after_help() -> String {
    format!(
        "Exit codes: 0 SAT/PASS, 1 UNSAT/FAIL, 2 error, 3 unknown (search limit reached).\n\
         Log verbosity is controlled by RUST_LOG; it never changes results.\n\
         Builtin tasks: mis[:d], coloring:k[:d], 3col-to-mis, 3col-no-xyzyx.\n\
         Zero-round lower bounds: with R >= {PIGEONHOLE_R} IDs a pigeonhole argument alone forces\n\
         three equal outputs; exact search (`solve --t 0 --ids arbitrary --R 4`) needs far fewer."
    )
}

#[derive(Subcommand)]
enum Command {
    /// Build a complex and print its size
    Build {
        #[command(flatten)]
        task: TaskArgs,
        #[command(flatten)]
        rounds: RoundArgs,
        /// Which complex to build
        #[arg(long, value_enum, default_value_t = SideArg::Protocol)]
        side: SideArg,
        /// Write the complex as JSON
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the 1-skeleton as DOT
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a t-round algorithm exists
    Solve(SolveArgs),
    /// Decide the 1-skeleton relaxation (edges to edges only)
    SolveSkeleton(SolveArgs),
    /// Turn a witness into an executable algorithm table
    Extract {
        #[command(flatten)]
        solve: SolveArgs,
        /// Read the witness from a solve result file instead of solving
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run an algorithm table on rings and check every output
    Simulate {
        /// Algorithm table JSON
        table: PathBuf,
        #[command(flatten)]
        task: TaskArgs,
        /// Ring sizes, e.g. 7, 5..12 or 5..=12 (both ends included)
        #[arg(long)]
        n: Option<String>,
        /// Run a single ring instance file instead of a range
        #[arg(long, conflicts_with = "n")]
        instance: Option<PathBuf>,
        /// Size of the ID pool (defaults to the table's R)
        #[arg(long)]
        id_pool: Option<u32>,
        /// Samples drawn when exhaustive enumeration is too large
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Remove one round from an increasing-ID coloring table
    Reduce {
        /// Algorithm table JSON (t rounds, increasing IDs in 1..=R)
        table: PathBuf,
        /// Rounds of the input table (defaults to the table's value)
        #[arg(long = "t")]
        t: Option<usize>,
        /// ID range of the input table (defaults to the table's value)
        #[arg(long = "R")]
        r: Option<u32>,
        /// Number of colors of the input table
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Write the reduced table
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Round lower bound for 3-coloring an n-node ring
    Bound {
        /// Ring size in decimal
        #[arg(required_unless_present = "tower")]
        n: Option<String>,
        /// Use n = 2^2^...^2 of this height (at most 5)
        #[arg(long, conflicts_with = "n")]
        tower: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Write a complex (or the reference two-round table) to stdout or a file
    Export {
        #[command(flatten)]
        task: TaskArgs,
        #[command(flatten)]
        rounds: RoundArgs,
        #[arg(long, value_enum, default_value_t = SideArg::Protocol)]
        side: SideArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Export the reference two-round 3-coloring to MIS table instead
        #[arg(long)]
        reference_table: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Same as --format dot
        #[arg(long)]
        dot: bool,
        /// Same as --format json
        #[arg(long, conflicts_with = "dot")]
        json: bool,
    },
}

#[derive(Args)]
struct TaskArgs {
    /// Builtin task name or path to a task file
    #[arg(value_name = "TASK")]
    target: Option<String>,
    /// Task file
    #[arg(long = "task", conflicts_with = "target")]
    file: Option<PathBuf>,
    /// Builtin task name
    #[arg(long, conflicts_with_all = ["target", "file"])]
    builtin: Option<String>,
}

#[derive(Args)]
struct RoundArgs {
    /// Number of rounds
    #[arg(long = "t", default_value_t = 0)]
    t: usize,
    #[arg(long, value_enum, default_value_t = IdsArg::None)]
    ids: IdsArg,
    /// ID range 1..=R (default 2t+3; a pigeonhole argument needs R >= 24 to
    /// force three equal zero-round outputs, exact search needs only 4)
    #[arg(long = "R")]
    r: Option<u32>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    task: TaskArgs,
    #[command(flatten)]
    rounds: RoundArgs,
    /// 0 = machine parallelism, 1 = sequential; results are identical
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Search nodes per component before giving up with UNKNOWN
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: u64,
    /// Write the result (with witness when SAT), or the table for extract
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdsArg {
    None,
    Arbitrary,
    Increasing,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Input,
    Output,
    Protocol,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

impl TaskArgs {
    fn load(&self) -> Result<LclTask> {
        let from_file = |p: &Path| -> Result<LclTask> {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read task file {}", p.display()))?;
            parse_task(&text).with_context(|| format!("in task file {}", p.display()))
        };
        match (&self.target, &self.file, &self.builtin) {
            (_, Some(p), _) => from_file(p),
            (_, _, Some(name)) => Ok(builtin(name)?),
            (Some(s), _, _) => {
                let p = Path::new(s);
                if p.exists() {
                    from_file(p)
                } else if s.ends_with(".json") || s.contains('/') {
                    bail!("task file {s} does not exist")
                } else {
                    builtin(s).with_context(|| {
                        format!(
                            "{s} is neither a file nor a builtin ({})",
                            BUILTIN_NAMES.join(", ")
                        )
                    })
                }
            }
            (None, None, None) => bail!("no task given: pass a builtin name, --builtin or --task"),
        }
    }
}

impl RoundArgs {
    fn mode(&self) -> Result<IdMode> {
        let r = self.r.unwrap_or_else(|| IdMode::default_range(self.t));
        Ok(match self.ids {
            IdsArg::None => {
                if self.r.is_some() {
                    bail!("--R needs --ids arbitrary or --ids increasing");
                }
                IdMode::None
            }
            IdsArg::Arbitrary => IdMode::Arbitrary(r),
            IdsArg::Increasing => IdMode::Increasing(r),
        })
    }
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            max_nodes: self.max_nodes,
            threads: self.threads,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Build {
            task,
            rounds,
            side,
            out,
            dot,
            json,
        } => cmd_build(&task, &rounds, side, out, dot, json),
        Command::Solve(a) => cmd_solve(&a, false),
        Command::SolveSkeleton(a) => cmd_solve(&a, true),
        Command::Extract { solve, witness } => cmd_extract(&solve, witness),
        Command::Simulate {
            table,
            task,
            n,
            instance,
            id_pool,
            trials,
            seed,
            out,
            json,
        } => {
            let task = task.load()?;
            let table = read_table(&table)?;
            match instance {
                Some(p) => cmd_run_instance(&table, &task, &p, out, json),
                None => {
                    let n_range = match n {
                        Some(s) => parse_range(&s)?,
                        None => (2 * table.rounds() + 1).max(3)..=12,
                    };
                    let cfg = CrossConfig {
                        n_range,
                        id_pool,
                        trials,
                        seed,
                    };
                    cmd_simulate(&table, &task, &cfg, out, json)
                }
            }
        }
        Command::Reduce {
            table,
            t,
            r,
            k,
            out,
            json,
        } => cmd_reduce(&table, t, r, k, out, json),
        Command::Bound { n, tower, json } => cmd_bound(n, tower, json),
        Command::Export {
            task,
            rounds,
            side,
            format,
            reference_table,
            out,
            dot,
            json,
        } => {
            let format = if dot {
                Format::Dot
            } else if json {
                Format::Json
            } else {
                format
            };
            cmd_export(&task, &rounds, side, format, reference_table, out)
        }
    }
}

fn build_side(task: &LclTask, rounds: &RoundArgs, side: SideArg) -> Result<Complex> {
    Ok(match side {
        SideArg::Input => build_input_complex(task)?,
        SideArg::Output => build_output_complex(task)?,
        SideArg::Protocol => build_protocol_complex(task, rounds.t, rounds.mode()?)?,
    })
}

fn write_json(path: &Path, j: &Json) -> Result<()> {
    let mut text = serde_json::to_string_pretty(j)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes to stdout. A closed pipe (as in `lclx ... | head`) is not an
/// error, so the exit code still reflects the result.
fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(j: &Json) -> Result<()> {
    outln!("{}", serde_json::to_string_pretty(j)?);
    Ok(())
}

fn read_json(path: &Path) -> Result<Json> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

fn read_table(path: &Path) -> Result<AlgorithmTable> {
    AlgorithmTable::from_json(&read_json(path)?)
        .with_context(|| format!("in table {}", path.display()))
}

/// `7`, `5..12` or `5..=12`; both forms of range include the upper end.
fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let num = |x: &str| {
        x.trim()
            .parse::<usize>()
            .with_context(|| format!("bad ring size {x:?} in --n {s}"))
    };
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let n = num(s)?;
            n..=n
        }
    };
    if r.is_empty() {
        bail!("empty ring size range {s}");
    }
    Ok(r)
}

fn cmd_build(
    task: &TaskArgs,
    rounds: &RoundArgs,
    side: SideArg,
    out: Option<PathBuf>,
    dot: Option<PathBuf>,
    json: bool,
) -> Result<u8> {
    let task = task.load()?;
    let k = build_side(&task, rounds, side)?;
    let components = connected_components(&k).len();
    if let Some(p) = out {
        write_json(&p, &complex_to_json(&k))?;
    }
    if let Some(p) = dot {
        fs::write(&p, skeleton_to_dot(&one_skeleton(&k)))
            .with_context(|| format!("cannot write {}", p.display()))?;
    }
    if json {
        print_json(&json!({
            "vertices": k.vertices().len(),
            "facets": k.facets().len(),
            "components": components,
        }))?;
    } else {
        outln!(
            "vertices={} facets={} components={}",
            k.vertices().len(),
            k.facets().len(),
            components
        );
    }
    Ok(EXIT_OK)
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Sat(_) => EXIT_OK,
        Verdict::Unsat => EXIT_NO,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn stats_line(s: &SearchStats) -> String {
    format!(
        "views={} facets={} constraints={} components={} nodes={}",
        s.views,
        s.facets,
        s.constraints,
        s.components.len(),
        s.nodes
    )
}

fn run_solver(a: &SolveArgs, task: &LclTask, skeleton: bool) -> Result<(IdMode, SolveResult)> {
    let mode = a.rounds.mode()?;
    let solver = if skeleton { solve_skeleton } else { solve };
    let result = solver(task, a.rounds.t, mode, a.options())?;
    log::info!(
        "{} t={} ids={mode}: {}",
        task.name(),
        a.rounds.t,
        result.verdict.name()
    );
    Ok((mode, result))
}

fn cmd_solve(a: &SolveArgs, skeleton: bool) -> Result<u8> {
    let task = a.task.load()?;
    let (_, result) = run_solver(a, &task, skeleton)?;
    let j = result.to_json();
    if let Some(p) = &a.out {
        write_json(p, &j)?;
    }
    if a.json {
        print_json(&json!({ "verdict": j["verdict"], "stats": j["stats"] }))?;
    } else {
        outln!("{}", result.verdict.name().to_uppercase());
        outln!("{}", stats_line(&result.stats));
    }
    Ok(verdict_code(&result.verdict))
}

fn cmd_extract(a: &SolveArgs, witness: Option<PathBuf>) -> Result<u8> {
    let task = a.task.load()?;
    let mode = a.rounds.mode()?;
    let result = match witness {
        Some(p) => {
            let j = read_json(&p)?;
            let w = j.get("witness").unwrap_or(&j);
            let map =
                witness_from_json(w).with_context(|| format!("in witness {}", p.display()))?;
            SolveResult {
                verdict: Verdict::Sat(map),
                stats: SearchStats::default(),
            }
        }
        None => run_solver(a, &task, false)?.1,
    };
    if !result.verdict.is_sat() {
        outln!("{}", result.verdict.name().to_uppercase());
        return Ok(verdict_code(&result.verdict));
    }
    let table = extract_algorithm(&result, &task, a.rounds.t, mode)?;
    let j = table.to_json();
    if let Some(p) = &a.out {
        write_json(p, &j)?;
    }
    if a.json {
        print_json(&j)?;
    } else {
        outln!(
            "rounds={} ids={} views={} order_invariant={}",
            table.rounds(),
            table.id_mode(),
            table.len(),
            table.canonical().is_some()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(
    table: &AlgorithmTable,
    task: &LclTask,
    cfg: &CrossConfig,
    out: Option<PathBuf>,
    json: bool,
) -> Result<u8> {
    let report = cross_validate(table, task, cfg)?;
    let j = report.to_json();
    if let Some(p) = out {
        write_json(&p, &j)?;
    }
    if json {
        print_json(&j)?;
    } else {
        outln!("{}", report.summary());
        for f in &report.failures {
            outln!(
                "violation n={} position={} star={}",
                f.instance.n(),
                f.violation.position,
                f.violation.star
            );
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_NO })
}

fn cmd_run_instance(
    table: &AlgorithmTable,
    task: &LclTask,
    path: &Path,
    out: Option<PathBuf>,
    json: bool,
) -> Result<u8> {
    let inst = RingInstance::from_json(task, &read_json(path)?, None)
        .with_context(|| format!("in instance {}", path.display()))?;
    let report = run(table, task, &inst)?;
    let violations: Vec<Json> = report
        .violations
        .iter()
        .map(|v| json!({"position": v.position, "star": v.star}))
        .collect();
    let outputs: Vec<&str> = report.outputs.iter().map(|l| l.as_str()).collect();
    let j = json!({
        "result": if report.legal { "pass" } else { "fail" },
        "instance": inst.to_json(),
        "outputs": outputs,
        "violations": violations,
    });
    if let Some(p) = out {
        write_json(&p, &j)?;
    }
    if json {
        print_json(&j)?;
    } else {
        outln!(
            "{} outputs={}",
            if report.legal { "PASS" } else { "FAIL" },
            outputs.join(",")
        );
        for v in &report.violations {
            outln!("violation position={} star={}", v.position, v.star);
        }
    }
    Ok(if report.legal { EXIT_OK } else { EXIT_NO })
}

fn cmd_reduce(
    path: &Path,
    t: Option<usize>,
    r: Option<u32>,
    k: u32,
    out: Option<PathBuf>,
    json: bool,
) -> Result<u8> {
    let table = read_table(path)?;
    let t = t.unwrap_or(table.rounds());
    let r = match (r, table.id_mode()) {
        (Some(r), _) => r,
        (None, IdMode::Increasing(r)) => r,
        (None, m) => bail!("table has ID mode {m}; reduction needs increasing IDs"),
    };
    let reduced = reduce_once(&table, t, r, k)?;
    let j = reduced.to_json();
    if let Some(p) = out {
        write_json(&p, &j)?;
    }
    let palette = ColorCode::palette(k);
    if json {
        print_json(&json!({
            "rounds": reduced.rounds(),
            "R": r - 1,
            "views": reduced.len(),
            "palette": palette.to_string(),
        }))?;
    } else {
        outln!(
            "rounds={} ids={} views={} palette={palette}",
            reduced.rounds(),
            reduced.id_mode(),
            reduced.len()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_bound(n: Option<String>, height: Option<u32>, json: bool) -> Result<u8> {
    let n: BigUint = match (n, height) {
        (Some(s), _) => s
            .trim()
            .parse()
            .with_context(|| format!("{s:?} is not a decimal integer"))?,
        (None, Some(h)) => match tower(h) {
            Tower::Exact(x) => x,
            Tower::Symbolic(h) => bail!("tower of height {h} is too large to write out"),
        },
        (None, None) => bail!("give n or --tower"),
    };
    let ls = log_star(&n);
    let b = linial_bound(&n);
    if json {
        print_json(&json!({ "n": n.to_string(), "log_star": ls, "bound": b }))?;
    } else {
        outln!("{b}");
        let shown = match height {
            Some(h) if n.bits() > 64 => format!("tower({h})"),
            _ => n.to_string(),
        };
        outln!("log*({shown}) = {ls}; ceil({ls}/2) - 1 = {b}");
    }
    Ok(EXIT_OK)
}

fn cmd_export(
    task: &TaskArgs,
    rounds: &RoundArgs,
    side: SideArg,
    format: Format,
    reference_table: bool,
    out: Option<PathBuf>,
) -> Result<u8> {
    let text = if reference_table {
        if format == Format::Dot {
            bail!("the reference table has no DOT form");
        }
        serde_json::to_string_pretty(&reference_linial_table().to_json())? + "\n"
    } else {
        let k = build_side(&task.load()?, rounds, side)?;
        match format {
            Format::Json => serde_json::to_string_pretty(&complex_to_json(&k))? + "\n",
            Format::Dot => skeleton_to_dot(&one_skeleton(&k)),
        }
    };
    match out {
        Some(p) => fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => emit(&text)?,
    }
    Ok(EXIT_OK)
}

//! Command-line front end for the orbit-finite LP solver.
//!
//! Exit codes form a stable contract: 0 means solvable (or plain success),
//! 1 means unsolvable, a failed cross-check, or a rejected assignment, and
//! 2 means a usage or input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use oflp::counter;
use oflp::instantiate::{instantiate_finite, oracle_supremum};
use oflp::numerics::Rational;
use oflp::orbit::{parse_system, OrbitSystem};
use oflp::paramlp::{evaluate_at, IterationRecord, MaxResult};
use oflp::pipeline::{self, Analysis};
use oflp::reduction::build_p1;
use oflp::simplex::{self, LpOutcome};
use oflp::transforms;

#[derive(Parser)]
#[command(
    name = "oflp",
    version,
    about = "Exact solver for orbit-finite linear programs",
    long_about = "Decides solvability and computes suprema of linear programs whose \
                  unknowns and constraints are indexed by tuples of atoms, with \
                  finitely many shapes up to atom permutation. All arithmetic is \
                  exact (arbitrary-precision rationals)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    /// Polynomial system straight from the row patterns
    P1,
    /// Degree-equalized (monotone) system, the solver input
    P2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    /// Equalities over nonnegative unknowns -> plain inequalities
    Ineq,
    /// Plain inequalities -> equalities over nonnegative unknowns
    NonnegEq,
    /// Append the row that forces finitely supported solutions finitary
    EmbedFin,
}

/// Inclusive parameter range, written `A..B`.
#[derive(Clone, Copy)]
struct RangeSpec {
    lo: u64,
    hi: u64,
}

fn parse_range(s: &str) -> Result<RangeSpec, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|e| format!("bad start: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("bad end: {e}"))?;
    if hi < lo {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(RangeSpec { lo, hi })
}

/// Counter configuration given on the command line, e.g. `2,0`.
#[derive(Clone)]
struct ConfigArg(Vec<u64>);

fn parse_config(s: &str) -> Result<ConfigArg, String> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|e| format!("bad counter value: {e}"))
        })
        .collect::<Result<_, _>>()
        .map(ConfigArg)
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the system has a finitary solution
    Solve {
        file: PathBuf,
        /// Print one line per iteration of the decision loop
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Supremum of the objective over all finitary solutions
    Max {
        file: PathBuf,
        /// Minimize instead (negates the objective; the reported bound is
        /// the infimum)
        #[arg(long)]
        minimize: bool,
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the reduced parametric system and its objective
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Stage::P2)]
        stage: Stage,
    },
    /// Expand the system over the concrete atoms 1..N
    Instantiate {
        file: PathBuf,
        #[arg(long)]
        atoms: u64,
        /// Also solve the expanded program and print a concrete assignment
        #[arg(long)]
        solve: bool,
    },
    /// Compare the reduced system against direct instantiation for each n
    /// in an inclusive range
    Crosscheck {
        file: PathBuf,
        #[arg(long, value_parser = parse_range)]
        range: RangeSpec,
    },
    /// Rewrite the system into another standard shape
    Transform {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Shape,
        /// Write the result here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Counter-machine reachability encodings
    Cm {
        #[command(subcommand)]
        command: CmCommand,
    },
}

#[derive(Subcommand)]
enum CmCommand {
    /// Print the reachability system between two configurations
    Encode {
        machine: PathBuf,
        /// Source configuration, comma-separated counter values
        #[arg(long, value_parser = parse_config)]
        source: ConfigArg,
        /// Target configuration, comma-separated counter values
        #[arg(long, value_parser = parse_config)]
        target: ConfigArg,
        #[arg(long)]
        atoms: u64,
    },
    /// Turn a run of the machine into a solution of its encoding
    Witness {
        machine: PathBuf,
        run: PathBuf,
        #[arg(long)]
        atoms: u64,
        /// Write the assignment here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check an assignment against the encoding
    Check {
        machine: PathBuf,
        assignment: PathBuf,
        #[arg(long, value_parser = parse_config)]
        source: ConfigArg,
        #[arg(long, value_parser = parse_config)]
        target: ConfigArg,
        #[arg(long)]
        atoms: u64,
    },
}

fn main() -> ExitCode {
    // Die quietly when the consumer of a pipe goes away (e.g. `| head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            file,
            trace,
            format,
        } => cmd_solve(&file, trace, format),
        Command::Max {
            file,
            minimize,
            trace,
            format,
        } => cmd_max(&file, minimize, trace, format),
        Command::Reduce { file, stage } => cmd_reduce(&file, stage),
        Command::Instantiate { file, atoms, solve } => cmd_instantiate(&file, atoms, solve),
        Command::Crosscheck { file, range } => cmd_crosscheck(&file, range),
        Command::Transform { file, to, output } => cmd_transform(&file, to, output.as_deref()),
        Command::Cm { command } => match command {
            CmCommand::Encode {
                machine,
                source,
                target,
                atoms,
            } => cmd_cm_encode(&machine, &source.0, &target.0, atoms),
            CmCommand::Witness {
                machine,
                run,
                atoms,
                output,
            } => cmd_cm_witness(&machine, &run, atoms, output.as_deref()),
            CmCommand::Check {
                machine,
                assignment,
                source,
                target,
                atoms,
            } => cmd_cm_check(&machine, &assignment, &source.0, &target.0, atoms),
        },
    }
}

fn load_system(file: &Path) -> Result<OrbitSystem> {
    let text =
        fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let sys = parse_system(&text).map_err(|e| anyhow!("{}: {e}", file.display()))?;
    Ok(sys)
}

fn analyze(sys: &OrbitSystem) -> Result<Analysis> {
    pipeline::solve_system(sys).map_err(|e| anyhow!("{e}"))
}

/// Orbit-sum witness as `x1 = v1, x2 = v2, ...`.
fn witness_text(witness: &[Rational]) -> String {
    witness
        .iter()
        .enumerate()
        .map(|(j, v)| format!("x{} = {v}", j + 1))
        .collect::<Vec<_>>()
        .join(", ")
}

fn trace_lines(trace: &[IterationRecord]) -> Vec<String> {
    trace
        .iter()
        .map(|r| {
            let mut line = format!(
                "iteration {}: inequalities {} -> {}, measure {} -> {}, equalities {}",
                r.iteration,
                r.ineqs_before,
                r.ineqs_after,
                r.measure_before,
                r.measure_after,
                r.gamma_after
            );
            if let Some(chosen) = &r.chosen {
                write!(line, "; degenerate head of: {chosen}").unwrap();
            }
            if let Some(verdict) = r.verdict {
                write!(
                    line,
                    "; verdict: {}",
                    if verdict { "solvable" } else { "unsolvable" }
                )
                .unwrap();
            }
            line
        })
        .collect()
}

fn trace_json(trace: &[IterationRecord]) -> serde_json::Value {
    trace
        .iter()
        .map(|r| {
            serde_json::json!({
                "iteration": r.iteration,
                "chosen": r.chosen,
                "verdict": r.verdict,
                "ineqs_before": r.ineqs_before,
                "ineqs_after": r.ineqs_after,
                "gamma_after": r.gamma_after,
                "measure_before": r.measure_before,
                "measure_after": r.measure_after,
            })
        })
        .collect()
}

fn witness_json(witness: Option<&[Rational]>) -> serde_json::Value {
    match witness {
        Some(w) => w.iter().map(|v| v.to_string()).collect(),
        None => serde_json::Value::Null,
    }
}

fn cmd_solve(file: &Path, trace: bool, format: Format) -> Result<u8> {
    let sys = load_system(file)?;
    let analysis = analyze(&sys)?;
    let solvable = analysis.is_solvable();
    match format {
        Format::Text => {
            for line in trace
                .then(|| trace_lines(&analysis.report.trace))
                .iter()
                .flatten()
            {
                println!("{line}");
            }
            if let Some(w) = analysis.witness() {
                println!("SOLVABLE");
                println!("witness (orbit sums): {}", witness_text(w));
                println!("threshold: n >= {}", analysis.threshold.unwrap());
            } else {
                println!("UNSOLVABLE");
            }
        }
        Format::Json => {
            let out = serde_json::json!({
                "verdict": if solvable { "SOLVABLE" } else { "UNSOLVABLE" },
                "sup": serde_json::Value::Null,
                "attained": serde_json::Value::Null,
                "witness": witness_json(analysis.witness()),
                "threshold": analysis.threshold,
                "trace": trace.then(|| trace_json(&analysis.report.trace)),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
    }
    Ok(if solvable { 0 } else { 1 })
}

fn cmd_max(file: &Path, minimize: bool, trace: bool, format: Format) -> Result<u8> {
    let mut sys = load_system(file)?;
    if minimize {
        for c in sys.cols.iter_mut() {
            c.objective = -c.objective.clone();
        }
    }
    let (max, analysis) = pipeline::maximize_system(&sys).map_err(|e| anyhow!("{e}"))?;
    // The solver always maximizes; under --minimize the objective was
    // negated above, so the reported infimum is the negated supremum.
    let (bound, attained, summary) = match &max {
        MaxResult::NegInfinity => (
            if minimize { "+inf" } else { "-inf" }.to_string(),
            None,
            if minimize { "+inf" } else { "-inf" }.to_string(),
        ),
        MaxResult::PosInfinity => (
            if minimize { "-inf" } else { "+inf" }.to_string(),
            None,
            if minimize { "-inf" } else { "+inf" }.to_string(),
        ),
        MaxResult::Finite { value, attained } => {
            let shown = if minimize {
                -value.clone()
            } else {
                value.clone()
            };
            let kind = if *attained {
                "attained"
            } else {
                "not attained"
            };
            let word = if minimize { "inf" } else { "sup" };
            (
                shown.to_string(),
                Some(*attained),
                format!("{word} = {shown} ({kind})"),
            )
        }
    };
    let solvable = analysis.is_solvable();
    match format {
        Format::Text => {
            for line in trace
                .then(|| trace_lines(&analysis.report.trace))
                .iter()
                .flatten()
            {
                println!("{line}");
            }
            println!("{summary}");
        }
        Format::Json => {
            let out = serde_json::json!({
                "verdict": if solvable { "SOLVABLE" } else { "UNSOLVABLE" },
                "sup": bound,
                "attained": attained,
                "witness": witness_json(analysis.witness()),
                "threshold": analysis.threshold,
                "trace": trace.then(|| trace_json(&analysis.report.trace)),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
    }
    Ok(if solvable { 0 } else { 1 })
}

fn cmd_reduce(file: &Path, stage: Stage) -> Result<u8> {
    let sys = load_system(file)?;
    let reduced = pipeline::reduce_system(&sys).map_err(|e| anyhow!("{e}"))?;
    match stage {
        Stage::P1 => {
            for e in &build_p1(&sys.canonicalize()).ineqs {
                println!("{e}");
            }
        }
        Stage::P2 => {
            for e in &reduced.system.ineqs {
                println!("{e}");
            }
        }
    }
    let objective = reduced
        .objective
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    println!("objective: {objective}");
    Ok(0)
}

fn cmd_instantiate(file: &Path, atoms: u64, solve: bool) -> Result<u8> {
    let sys = load_system(file)?;
    let violations = sys.validate();
    if !violations.is_empty() {
        return Err(anyhow!("invalid system: {}", violations[0]));
    }
    let inst = instantiate_finite(&sys, atoms);
    print!("{}", inst.to_text());
    if !solve {
        return Ok(0);
    }
    match simplex::feasible(&inst.lp) {
        LpOutcome::Feasible { witness } => {
            println!("feasible");
            for (label, value) in inst.column_labels.iter().zip(&witness) {
                println!("  {label} = {value}");
            }
            Ok(0)
        }
        LpOutcome::Infeasible => {
            println!("infeasible");
            Ok(1)
        }
        other => unreachable!("feasibility check returned {other:?}"),
    }
}

fn cmd_crosscheck(file: &Path, range: RangeSpec) -> Result<u8> {
    let sys = load_system(file)?;
    let reduced = pipeline::reduce_system(&sys).map_err(|e| anyhow!("{e}"))?;
    let objective: Vec<Rational> = reduced
        .objective
        .iter()
        .map(|v| Rational::from_integer(v.clone()))
        .collect();
    let show = |m: &MaxResult| match m {
        MaxResult::NegInfinity => "-inf".to_string(),
        MaxResult::PosInfinity => "+inf".to_string(),
        MaxResult::Finite { value, .. } => format!("sup = {value}"),
    };
    let mut mismatches = 0;
    for n in range.lo..=range.hi {
        let direct = oracle_supremum(&sys, n);
        let reduced_sup = match simplex::maximize(&evaluate_at(&reduced.system, n), &objective) {
            LpOutcome::Infeasible => MaxResult::NegInfinity,
            LpOutcome::Unbounded => MaxResult::PosInfinity,
            LpOutcome::Optimal { value, .. } => MaxResult::Finite {
                value,
                attained: true,
            },
            other => unreachable!("maximize returned {other:?}"),
        };
        if direct == reduced_sup {
            println!("n = {n}: match, {}", show(&direct));
        } else {
            mismatches += 1;
            println!(
                "n = {n}: MISMATCH, direct {}, reduced {}",
                show(&direct),
                show(&reduced_sup)
            );
        }
    }
    Ok(if mismatches == 0 { 0 } else { 1 })
}

fn cmd_transform(file: &Path, to: Shape, output: Option<&Path>) -> Result<u8> {
    let sys = load_system(file)?;
    let out = match to {
        Shape::Ineq => transforms::nonneg_eq_to_ineq(&sys),
        Shape::NonnegEq => transforms::ineq_to_nonneg_eq(&sys),
        Shape::EmbedFin => transforms::fin_to_general(&sys),
    }
    .map_err(|e| anyhow!("{e}"))?;
    let text = out.to_text();
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn load_machine(file: &Path) -> Result<counter::CounterMachine> {
    let text =
        fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    counter::parse_machine(&text).map_err(|e| anyhow!("{}: {e}", file.display()))
}

fn cmd_cm_encode(machine: &Path, source: &[u64], target: &[u64], atoms: u64) -> Result<u8> {
    let m = load_machine(machine)?;
    check_width(&m, source, "source")?;
    check_width(&m, target, "target")?;
    let inst = counter::encode(&m, source, target, atoms).map_err(|e| anyhow!("{e}"))?;
    println!("atoms: {atoms}");
    println!("variables: {}", inst.variables().len());
    println!("constraints: {}", inst.constraints.len());
    for c in &inst.constraints {
        println!("{}: {c}", c.family);
    }
    Ok(0)
}

fn check_width(m: &counter::CounterMachine, config: &[u64], what: &str) -> Result<()> {
    if config.len() != m.dim {
        return Err(anyhow!(
            "{what} configuration has {} counters but the machine has {}",
            config.len(),
            m.dim
        ));
    }
    Ok(())
}

fn cmd_cm_witness(machine: &Path, run: &Path, atoms: u64, output: Option<&Path>) -> Result<u8> {
    let m = load_machine(machine)?;
    let text = fs::read_to_string(run).with_context(|| format!("cannot read {}", run.display()))?;
    let (start, steps) =
        counter::parse_run(&text).map_err(|e| anyhow!("{}: {e}", run.display()))?;
    check_width(&m, &start, "starting")?;
    let run = counter::Run::from_steps(&m, start, &steps).map_err(|e| anyhow!("{e}"))?;
    let target = run
        .configs
        .last()
        .expect("a run has at least one configuration");
    let inst = counter::encode(&m, &run.configs[0], target, atoms).map_err(|e| anyhow!("{e}"))?;
    let witness = counter::run_to_witness(&run, &inst).map_err(|e| anyhow!("{e}"))?;
    let text = counter::assignment_to_text(&witness);
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_cm_check(
    machine: &Path,
    assignment: &Path,
    source: &[u64],
    target: &[u64],
    atoms: u64,
) -> Result<u8> {
    let m = load_machine(machine)?;
    check_width(&m, source, "source")?;
    check_width(&m, target, "target")?;
    let text = fs::read_to_string(assignment)
        .with_context(|| format!("cannot read {}", assignment.display()))?;
    let values =
        counter::parse_assignment(&text).map_err(|e| anyhow!("{}: {e}", assignment.display()))?;
    let inst = counter::encode(&m, source, target, atoms).map_err(|e| anyhow!("{e}"))?;
    let violated = counter::check_witness(&inst, &values);
    if violated.is_empty() {
        println!(
            "assignment satisfies all {} constraints",
            inst.constraints.len()
        );
        return Ok(0);
    }
    println!("{} violated constraints:", violated.len());
    for idx in violated {
        let c = &inst.constraints[idx];
        println!("{}: {c}", c.family);
    }
    Ok(1)
}

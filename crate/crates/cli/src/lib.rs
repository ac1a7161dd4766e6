//! Command-line front end for `knapagg`.
//!
//! [`run`] parses arguments, dispatches to the library and writes reports to
//! the given streams. Exit codes: 0 on success, 1 on validation errors and
//! failed checks, 2 when an enumeration budget is exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use knapagg::aggregation::{aggregate, power_terms, verify_equivalence};
use knapagg::format::{
    parse_bin_packing, parse_ilp, write_bin_packing, write_configurations, write_ilp,
    write_knapsack,
};
use knapagg::gadget::{
    build_equality_system, build_knapsack_equation, build_simplified_system,
    decimal_to_binary_trace, enumerate_gadget_solutions, enumerate_simplified_solutions,
    gadget_big_m, total_bound, EnumerationMode, GadgetAssignment, GadgetParams,
};
use knapagg::hard_instance::{build_bp_instance, point_set, target_vector};
use knapagg::model::check_solution;
use knapagg::verifier::{
    conic_combinations, min_support_packing, random_ilp, reject_random_nonsolutions, IlpFamily,
    SplitMix64,
};
use knapagg::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "knapagg",
    version,
    about = "Exact ILP aggregation, the binary-encoding gadget and bin packing instances with large support"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Aggregate an equality ILP into one knapsack equation.
    Aggregate(AggregateArgs),
    /// Build, trace or enumerate the binary-encoding gadget.
    Gadget(GadgetArgs),
    /// Build the bin packing instance for a given d'.
    Instance(InstanceArgs),
    /// Run a brute-force check.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Print worked examples.
    Demo {
        #[command(subcommand)]
        example: DemoCommand,
    },
}

#[derive(Debug, Args)]
struct AggregateArgs {
    /// ILP file.
    input: PathBuf,
    /// Write the knapsack equation here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write M, U and the extended system, as comment lines.
    #[arg(long)]
    emit_context: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Structural,
}

impl From<Mode> for EnumerationMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Exhaustive => EnumerationMode::Exhaustive,
            Mode::Structural => EnumerationMode::Structural,
        }
    }
}

#[derive(Debug, Args)]
struct GadgetArgs {
    /// Number of binary digits.
    #[arg(long)]
    d: usize,
    /// Base γ >= 2.
    #[arg(long)]
    gamma: BigInt,
    /// Print every variable for exponent I.
    #[arg(long, value_name = "I", conflicts_with_all = ["enumerate", "simplified"])]
    trace: Option<BigInt>,
    /// List all solutions.
    #[arg(long, value_name = "MODE", conflicts_with = "simplified")]
    enumerate: Option<Mode>,
    /// Work with the system that has the z constraints removed.
    #[arg(long)]
    simplified: bool,
    /// Write the single knapsack equation to this file.
    #[arg(long, value_name = "FILE")]
    emit_knapsack: Option<PathBuf>,
    /// Write the equality system (or the simplified one) to this file.
    #[arg(long, value_name = "FILE")]
    emit_ilp: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long, value_name = "K")]
    dprime: usize,
    /// Bin packing instance file.
    #[arg(long)]
    out: PathBuf,
    /// Write the configurations that fill a bin exactly, one per line.
    #[arg(long, value_name = "FILE")]
    emit_configs: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Compare the extended system with its aggregate over the whole box.
    Equivalence {
        /// Check this ILP instead of random ones.
        #[arg(long)]
        ilp: Option<PathBuf>,
        /// Number of random ILPs.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest box to enumerate.
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Exhaustive against structural enumeration, encodings, term
    /// decomposition and random rejection.
    Gadget {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        gamma: BigInt,
        /// Random in-box vectors tested against the knapsack equation.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Search all conic combinations of the point set reaching t.
    Conic {
        #[arg(long, value_name = "K")]
        dprime: usize,
        /// Per-point multiplicity cap.
        #[arg(long)]
        cap: Option<BigInt>,
    },
    /// Minimum number of distinct configurations in a packing of an
    /// instance file written by `instance`.
    Support {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = SupportMode::Auto)]
        mode: SupportMode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SupportMode {
    /// Both modes when d' <= 2, structural otherwise.
    Auto,
    Exhaustive,
    Structural,
}

#[derive(Debug, Subcommand)]
enum DemoCommand {
    /// Values of the structural variables for d = 3 and every i in 1..=7.
    Example1 {
        #[arg(long)]
        gamma: BigInt,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_INVALID,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    let budget = e.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<Error>(),
            Some(Error::BudgetExceeded { .. })
        )
    });
    if budget {
        EXIT_BUDGET
    } else {
        EXIT_INVALID
    }
}

/// `Ok(false)` means a check ran and failed.
fn dispatch(command: Command, out: &mut dyn Write) -> anyhow::Result<bool> {
    match command {
        Command::Aggregate(args) => cmd_aggregate(&args, out).map(|_| true),
        Command::Gadget(args) => cmd_gadget(&args, out).map(|_| true),
        Command::Instance(args) => cmd_instance(&args, out).map(|_| true),
        Command::Verify { check } => cmd_verify(check, out),
        Command::Demo {
            example: DemoCommand::Example1 { gamma },
        } => {
            out.write_all(example1_table(&gamma)?.as_bytes())?;
            Ok(true)
        }
    }
}

fn read_file(path: &Path) -> anyhow::Result<String> {
    if !path.exists() {
        bail!("file not found: {}", path.display());
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_aggregate(args: &AggregateArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let text = read_file(&args.input)?;
    let ilp = parse_ilp(&text).with_context(|| format!("in {}", args.input.display()))?;
    let ctx = aggregate(&ilp);
    let mut doc = write_knapsack(&ctx.aggregated);
    if args.emit_context {
        doc.push_str(&format!("# M {}\n# U {}\n", ctx.big_m, ctx.total_bound));
        for line in write_ilp(&ctx.extended).lines() {
            doc.push_str("# ");
            doc.push_str(line);
            doc.push('\n');
        }
    }
    match &args.out {
        Some(path) => write_file(path, &doc),
        None => Ok(out.write_all(doc.as_bytes())?),
    }
}

fn cmd_gadget(args: &GadgetArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let params = GadgetParams::new(args.d, args.gamma.clone())?;
    if let Some(path) = &args.emit_ilp {
        let system = if args.simplified {
            build_simplified_system(&params)
        } else {
            build_equality_system(&params)
        };
        write_file(path, &write_ilp(&system))?;
    }
    if let Some(path) = &args.emit_knapsack {
        write_file(path, &write_knapsack(&build_knapsack_equation(&params)?))?;
    }

    if let Some(i) = &args.trace {
        let a = decimal_to_binary_trace(&params, i)?;
        write_trace(&params, &a, out)?;
    } else if let Some(mode) = args.enumerate {
        let solutions = enumerate_gadget_solutions(&params, mode.into())?;
        let d = params.digits();
        for a in &solutions {
            writeln!(
                out,
                "i={} r({d})={} xbin={}",
                a.exponent(),
                a.r()[d],
                bits_high_to_low(a.xbin())
            )?;
        }
        writeln!(out, "solutions {}", solutions.len())?;
    } else if args.simplified {
        let system = build_simplified_system(&params);
        let d = params.digits();
        writeln!(
            out,
            "simplified system: {} rows, {} variables",
            system.num_constraints(),
            system.num_vars()
        )?;
        let solutions = enumerate_simplified_solutions(&params)?;
        let r_top = 3 * d;
        let accepted: Vec<String> = solutions.iter().map(|v| v[r_top].to_string()).collect();
        writeln!(out, "accepted r({d}): {}", accepted.join(" "))?;
        writeln!(out, "solutions {}", solutions.len())?;
    } else {
        let system = build_equality_system(&params);
        let u = total_bound(&params);
        let kp = build_knapsack_equation(&params)?;
        writeln!(out, "gadget d={} gamma={}", params.digits(), params.gamma())?;
        writeln!(out, "variables {}", system.num_vars())?;
        writeln!(out, "rows {}", system.num_constraints())?;
        writeln!(out, "U {u}")?;
        writeln!(out, "M {}", gadget_big_m(&params, &u))?;
        writeln!(out, "capacity digits {}", kp.rhs().to_string().len())?;
    }
    Ok(())
}

fn bits_high_to_low(xbin: &[BigInt]) -> String {
    xbin.iter().rev().map(|b| b.to_string()).collect()
}

/// Structural variables in the order `r(d), y, xbin, r(d-1..0), z`, highest
/// level first.
fn structural_rows(params: &GadgetParams, a: &GadgetAssignment) -> Vec<(String, BigInt)> {
    let d = params.digits();
    let mut rows = vec![(format!("r({d})"), a.r()[d].clone())];
    for (name, values) in [("y", a.y()), ("xbin", a.xbin())] {
        for l in (0..d).rev() {
            rows.push((format!("{name}({l})"), values[l].clone()));
        }
    }
    for l in (0..d).rev() {
        rows.push((format!("r({l})"), a.r()[l].clone()));
    }
    for l in (0..d).rev() {
        rows.push((format!("z({l})"), a.z()[l].clone()));
    }
    rows
}

fn write_trace(
    params: &GadgetParams,
    a: &GadgetAssignment,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let rows = structural_rows(params, a);
    let names = params.var_names();
    let structural = 4 * params.digits() + 1;
    let slacks: Vec<(String, BigInt)> = names[structural..]
        .iter()
        .cloned()
        .zip(a.values()[structural..].iter().cloned())
        .collect();
    let width = names.iter().map(String::len).max().unwrap_or(1);
    writeln!(out, "{:<width$} {}", "i", a.exponent())?;
    for (name, value) in rows.iter().chain(&slacks) {
        writeln!(out, "{name:<width$} {value}")?;
    }
    Ok(())
}

/// The seven traces for `d = 3`, one column per exponent.
pub fn example1_table(gamma: &BigInt) -> anyhow::Result<String> {
    let params = GadgetParams::new(3, gamma.clone())?;
    let columns: Vec<Vec<(String, BigInt)>> = (1..=7u32)
        .map(|i| {
            decimal_to_binary_trace(&params, &BigInt::from(i)).map(|a| structural_rows(&params, &a))
        })
        .collect::<Result<_, _>>()?;

    let mut grid: Vec<Vec<String>> = vec![std::iter::once("i".to_string())
        .chain((1..=7).map(|i: u32| i.to_string()))
        .collect()];
    for row in 0..columns[0].len() {
        let mut line = vec![columns[0][row].0.clone()];
        line.extend(columns.iter().map(|c| c[row].1.to_string()));
        grid.push(line);
    }
    let widths: Vec<usize> = (0..8)
        .map(|c| grid.iter().map(|line| line[c].len()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    for line in &grid {
        text.push_str(&format!("{:<w$}", line[0], w = widths[0]));
        for (cell, w) in line[1..].iter().zip(&widths[1..]) {
            text.push_str(&format!(" {cell:>w$}"));
        }
        text.push('\n');
    }
    Ok(text)
}

fn cmd_instance(args: &InstanceArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let hi = build_bp_instance(args.dprime)?;
    write_file(&args.out, &write_bin_packing(&hi.instance))?;
    if let Some(path) = &args.emit_configs {
        write_file(path, &write_configurations(&hi.equality_configs))?;
    }
    writeln!(
        out,
        "instance d'={} item types {} configurations {} bins {}",
        hi.dprime(),
        hi.instance.num_item_types(),
        hi.equality_configs.len(),
        hi.k()
    )?;
    Ok(())
}

fn report(out: &mut dyn Write, pass: bool, check: &str) -> anyhow::Result<bool> {
    writeln!(out, "RESULT {} {check}", if pass { "pass" } else { "fail" })?;
    Ok(pass)
}

fn cmd_verify(check: VerifyCommand, out: &mut dyn Write) -> anyhow::Result<bool> {
    match check {
        VerifyCommand::Equivalence {
            ilp,
            trials,
            seed,
            budget,
        } => {
            let instances = match ilp {
                Some(path) => vec![parse_ilp(&read_file(&path)?)
                    .with_context(|| format!("in {}", path.display()))?],
                None => {
                    if trials == 0 {
                        bail!("--trials must be at least 1");
                    }
                    let mut rng = SplitMix64::new(seed);
                    (0..trials)
                        .map(|_| random_ilp(&mut rng, &IlpFamily::default()))
                        .collect()
                }
            };
            let mut discrepancies = 0usize;
            let mut feasible = 0usize;
            for (n, ilp) in instances.iter().enumerate() {
                let ctx = aggregate(ilp);
                let rep = verify_equivalence(&ctx, budget)?;
                if !rep.extended_solutions.is_empty() {
                    feasible += 1;
                }
                if !rep.identical {
                    discrepancies += 1;
                    let witness = rep.witness.map(|w| w.to_string()).unwrap_or_default();
                    writeln!(out, "instance {n}: mismatch at ({witness})")?;
                }
            }
            writeln!(
                out,
                "instances {} feasible {feasible} discrepancies {discrepancies}",
                instances.len()
            )?;
            report(out, discrepancies == 0, "equivalence")
        }
        VerifyCommand::Gadget {
            d,
            gamma,
            trials,
            seed,
        } => verify_gadget(d, gamma, trials, seed, out),
        VerifyCommand::Conic { dprime, cap } => {
            let ps = point_set(dprime)?;
            let t = target_vector(&ps);
            let cap = cap.unwrap_or_else(|| t.iter().max().cloned().unwrap_or_default());
            let res = conic_combinations(&ps, &t, &cap)?;
            let ones = vec![BigInt::from(1); ps.nonzero_points().len()];
            for mu in &res.solutions {
                writeln!(out, "mu {}", join(mu))?;
            }
            writeln!(out, "solutions {}", res.solutions.len())?;
            report(out, res.solutions == [ones], "conic")
        }
        VerifyCommand::Support { instance, mode } => verify_support(&instance, mode, out),
    }
}

fn join(values: &[BigInt]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn verify_gadget(
    d: usize,
    gamma: BigInt,
    trials: u64,
    seed: u64,
    out: &mut dyn Write,
) -> anyhow::Result<bool> {
    let params = GadgetParams::new(d, gamma)?;
    let system = build_equality_system(&params);
    let kp = build_knapsack_equation(&params)?;
    let big_m = gadget_big_m(&params, &total_bound(&params));
    let structural = enumerate_gadget_solutions(&params, EnumerationMode::Structural)?;
    let exhaustive = enumerate_gadget_solutions(&params, EnumerationMode::Exhaustive)?;
    let expected = params.max_exponent() as usize;
    writeln!(
        out,
        "exhaustive {} structural {} expected {expected}",
        exhaustive.len(),
        structural.len()
    )?;
    let mut all = true;
    all &= report(
        out,
        exhaustive == structural && exhaustive.len() == expected,
        "gadget-count",
    )?;

    let mut encodings = true;
    let mut terms_zero = true;
    for (i, a) in structural.iter().enumerate() {
        let sv = a.to_solution_vector()?;
        encodings &= a.exponent() == BigInt::from(i + 1) && check_solution(&system, &sv)?;
        terms_zero &= power_terms(&system, &big_m, sv.values())?
            .iter()
            .all(|t| t == &BigInt::default())
            && kp.is_satisfied(sv.values())?;
    }
    all &= report(out, encodings, "gadget-encoding")?;
    all &= report(out, terms_zero, "gadget-terms")?;

    let sampled = reject_random_nonsolutions(&kp, system.upper(), trials.max(1), seed)?;
    let known: Vec<_> = structural
        .iter()
        .map(|a| a.to_solution_vector())
        .collect::<Result<_, _>>()?;
    let stray = sampled
        .satisfying
        .iter()
        .filter(|s| !known.contains(s))
        .count();
    writeln!(
        out,
        "sampled {} satisfying {} outside solution set {stray}",
        sampled.trials,
        sampled.count()
    )?;
    all &= report(out, stray == 0, "gadget-sampling")?;
    Ok(all)
}

fn verify_support(path: &Path, mode: SupportMode, out: &mut dyn Write) -> anyhow::Result<bool> {
    let bp =
        parse_bin_packing(&read_file(path)?).with_context(|| format!("in {}", path.display()))?;
    let types = bp.num_item_types();
    if types < 16 || (types - 4) % 12 != 0 {
        bail!("{types} item types is not of the form 12d' + 4");
    }
    let dprime = (types - 4) / 12;
    let hi = build_bp_instance(dprime)?;
    if hi.instance != bp {
        writeln!(
            out,
            "instance differs from the construction for d'={dprime}"
        )?;
        return report(out, false, "support");
    }
    let modes: Vec<EnumerationMode> = match mode {
        SupportMode::Structural => vec![EnumerationMode::Structural],
        SupportMode::Exhaustive => vec![EnumerationMode::Exhaustive],
        SupportMode::Auto if dprime <= 2 => {
            vec![EnumerationMode::Structural, EnumerationMode::Exhaustive]
        }
        SupportMode::Auto => vec![EnumerationMode::Structural],
    };
    let expected = hi.k() as usize;
    let mut supports = Vec::new();
    for m in modes {
        let rep = min_support_packing(&hi, m)?;
        let name = match m {
            EnumerationMode::Structural => "structural",
            EnumerationMode::Exhaustive => "exhaustive",
        };
        writeln!(
            out,
            "{name}: min_support {} optimal packings {}",
            rep.min_support, rep.optimal_packings
        )?;
        supports.push(rep.min_support);
    }
    let pass = supports.iter().all(|&s| s == expected);
    report(out, pass, "support")
}

/// Entry point for the binary.
pub fn main_with_stdio() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

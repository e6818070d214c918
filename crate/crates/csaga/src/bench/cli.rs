//! Command-line interface: single runs, stepsize grids, rate sweeps, a
//! built-in verification battery, and dataset inspection.

use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::data::{parse_libsvm, stats, subsample, Dataset, ParseOptions};
use crate::diagnostics::{
    check_contraction, check_corollary, fit_empirical_rate, lemma1_bound_check, rate_sweep,
    write_sweep_csv, TheoryConstants,
};
use crate::error::{Error, Result};
use crate::objectives::{FiniteSumProblem, LossKind, Reference};
use crate::rng::{stream_rng, STREAM_SYNTH};
use crate::solvers::{literal_csaga, run, MethodKind, RunSpec, SchedulerKind};
use crate::synth::{quadratic_family, sparse_glm_dataset};
use crate::vecmath::{sq_dist, DenseVec};

use super::cache::{get_or_solve, resolve_cache_dir};
use super::grid::{default_gamma_grid, grid_search};
use super::{format_float, write_trace_csv};

#[derive(Parser, Debug)]
#[command(
    name = "csaga",
    about = "Cyclic SAGA and related incremental gradient methods on finite sums",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one method at one stepsize and emit a trace CSV.
    Run(RunArgs),
    /// Run one method across a stepsize grid and emit the grid table.
    Grid(GridArgs),
    /// Empirical-vs-certified rate table across conditioning regimes.
    Sweep(SweepArgs),
    /// Built-in checks of the rate theory against live trajectories.
    Verify(VerifyArgs),
    /// Parse a dataset and report its shape.
    ParseCheck(ParseCheckArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Dataset path (LIBSVM format).
    #[arg(long)]
    data: PathBuf,
    /// Input format; only `libsvm` is recognized.
    #[arg(long, default_value = "libsvm")]
    format: String,
    /// Loss: `logistic` or `ridge`.
    #[arg(long, default_value = "logistic")]
    loss: String,
    /// L2 regularization weight.
    #[arg(long, default_value_t = 1e-2)]
    lambda: f64,
    /// Keep a random fraction of the rows (in `(0, 1]`).
    #[arg(long)]
    subsample: Option<f64>,
    /// Force the feature dimension (must cover every index present).
    #[arg(long)]
    dim: Option<usize>,
    /// Gradient-norm tolerance for the reference solve.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Reference-cache directory (default: $CSAGA_CACHE_DIR or .csaga_cache).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "csaga")]
    method: String,
    /// Override the method's defining scheduler (cyclic, random_permutation, iid).
    #[arg(long)]
    scheduler: Option<String>,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    /// Deferred sparse updates (saga/sag engines on GLM losses).
    #[arg(long)]
    jit: bool,
    /// Track the Lyapunov function per step (dense path; excludes --jit).
    #[arg(long)]
    diagnostics: bool,
    /// Trace CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "csaga")]
    method: String,
    #[arg(long)]
    scheduler: Option<String>,
    /// Comma-separated stepsizes (default: powers of two, 8192 down to 2^-14).
    #[arg(long)]
    gamma_grid: Option<String>,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long)]
    jit: bool,
    /// Grid table destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the best cell's trace CSV here.
    #[arg(long)]
    best_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated condition numbers.
    #[arg(long, default_value = "1,10,100")]
    kappas: String,
    /// Comma-separated component counts.
    #[arg(long, default_value = "2,10,50")]
    ns: String,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ParseCheckArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    dim: Option<usize>,
    /// Keep labels exactly as written instead of mapping to ±1.
    #[arg(long)]
    raw_labels: bool,
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Grid(args) => cmd_grid(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::ParseCheck(args) => cmd_parse_check(args),
    }
}

fn parse_loss(s: &str) -> Result<LossKind> {
    match s {
        "logistic" => Ok(LossKind::Logistic),
        "ridge" => Ok(LossKind::Ridge),
        other => Err(Error::InvalidArgument(format!(
            "unknown loss '{other}' (expected logistic or ridge)"
        ))),
    }
}

fn load_dataset(args: &DataArgs, loss: LossKind) -> Result<Dataset> {
    if args.format != "libsvm" {
        return Err(Error::Unsupported(format!(
            "unknown format '{}'",
            args.format
        )));
    }
    let file = fs::File::open(&args.data).map_err(|e| Error::io(&args.data, e))?;
    let opts = ParseOptions {
        normalize_binary_labels: loss == LossKind::Logistic,
        dim_override: args.dim,
    };
    let mut ds = parse_libsvm(BufReader::new(file), &opts)?;
    if let Some(fraction) = args.subsample {
        ds = subsample(&ds, fraction, args.seed)?;
    }
    Ok(ds)
}

fn load_problem(args: &DataArgs) -> Result<(FiniteSumProblem, Reference)> {
    let loss = parse_loss(&args.loss)?;
    let ds = load_dataset(args, loss)?;
    let p = FiniteSumProblem::glm(loss, ds, args.lambda)?;
    let dir = resolve_cache_dir(args.cache_dir.as_deref());
    let (reference, hit) = get_or_solve(&dir, &p, args.tol)?;
    eprintln!(
        "reference: n={} d={} f*={} ({})",
        p.n(),
        p.d(),
        format_float(reference.f_star),
        if hit { "cache hit" } else { "solved, cached" }
    );
    Ok((p, reference))
}

fn write_out(
    out: &Option<PathBuf>,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            body(&mut f).map_err(|e| Error::io(path, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<i32> {
    let (p, reference) = load_problem(&args.data)?;
    let method: MethodKind = args.method.parse()?;
    let scheduler = args
        .scheduler
        .as_deref()
        .map(str::parse::<SchedulerKind>)
        .transpose()?;
    let mut spec = RunSpec::new(
        &p,
        &reference,
        method,
        args.gamma,
        args.epochs,
        args.data.seed,
    );
    spec.scheduler = scheduler;
    spec.jit = args.jit;
    spec.diagnostics = args.diagnostics;
    let out = run(&spec)?;
    write_out(&args.out, |w| {
        write_trace_csv(w, &out.records, out.diverged_at)
    })?;
    if let Some(step) = out.diverged_at {
        eprintln!("run diverged at step {step}; trace truncated (divergence is data)");
    }
    Ok(0)
}

fn cmd_grid(args: GridArgs) -> Result<i32> {
    let (p, reference) = load_problem(&args.data)?;
    let method: MethodKind = args.method.parse()?;
    let scheduler = args
        .scheduler
        .as_deref()
        .map(str::parse::<SchedulerKind>)
        .transpose()?;
    let gammas = match &args.gamma_grid {
        None => default_gamma_grid(),
        Some(list) => {
            let mut out = Vec::new();
            for tok in list.split(',') {
                let g: f64 = tok.trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad stepsize '{tok}' in --gamma-grid"))
                })?;
                out.push(g);
            }
            out
        }
    };
    let mut template = RunSpec::new(
        &p,
        &reference,
        method,
        f64::NAN,
        args.epochs,
        args.data.seed,
    );
    template.scheduler = scheduler;
    template.jit = args.jit;
    let grid = grid_search(&template, &gammas)?;
    write_out(&args.out, |w| {
        writeln!(w, "gamma,final_suboptimality,converged")?;
        for cell in &grid.cells {
            writeln!(
                w,
                "{},{},{}",
                format_float(cell.gamma),
                cell.output
                    .final_suboptimality()
                    .map(format_float)
                    .unwrap_or_default(),
                !cell.output.diverged()
            )?;
        }
        Ok(())
    })?;
    let best = grid.best();
    eprintln!(
        "best gamma = {} (final suboptimality {})",
        format_float(best.gamma),
        format_float(best.output.final_suboptimality().unwrap_or(f64::NAN))
    );
    if let Some(path) = &args.best_out {
        let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_trace_csv(f, &best.output.records, best.output.diverged_at)
            .map_err(|e| Error::io(path, e))?;
    }
    Ok(0)
}

fn parse_list<T: std::str::FromStr>(list: &str, what: &str) -> Result<Vec<T>> {
    list.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} '{tok}'")))
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let kappas: Vec<f64> = parse_list(&args.kappas, "kappa")?;
    let ns: Vec<usize> = parse_list(&args.ns, "n")?;
    let rows = rate_sweep(&kappas, &ns, args.epochs, args.seed)?;
    write_out(&args.out, |w| write_sweep_csv(&rows, w))?;
    Ok(0)
}

fn cmd_parse_check(args: ParseCheckArgs) -> Result<i32> {
    let file = fs::File::open(&args.data).map_err(|e| Error::io(&args.data, e))?;
    let opts = ParseOptions {
        normalize_binary_labels: !args.raw_labels,
        dim_override: args.dim,
    };
    let ds = parse_libsvm(BufReader::new(file), &opts)?;
    let st = stats(&ds)?;
    let mut labels: Vec<f64> = ds.samples().iter().map(|s| s.label).collect();
    labels.sort_by(f64::total_cmp);
    labels.dedup();
    println!("n = {}", st.n);
    println!("d = {}", st.d);
    println!("max_row_sq_norm = {}", format_float(st.max_row_sq_norm));
    println!("mean_nnz = {}", format_float(st.mean_nnz));
    println!(
        "labels = {}{}",
        labels
            .iter()
            .take(8)
            .map(|l| format_float(*l))
            .collect::<Vec<_>>()
            .join(" "),
        if labels.len() > 8 { " …" } else { "" }
    );
    Ok(0)
}

struct Battery {
    failures: usize,
}

impl Battery {
    fn check(&mut self, name: &str, outcome: Result<std::result::Result<(), String>>) {
        match outcome {
            Ok(Ok(())) => println!("ok {name}"),
            Ok(Err(detail)) => {
                println!("FAIL {name}: {detail}");
                self.failures += 1;
            }
            Err(e) => {
                println!("FAIL {name}: error: {e}");
                self.failures += 1;
            }
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let seed = args.seed;
    let mut battery = Battery { failures: 0 };

    let p = quadratic_family(10, 4, 1.0, 10.0, seed)?;
    let theory = TheoryConstants::new(1.0, 10.0, 10)?;
    let reference = p.solve_reference(1e-12)?;
    let mut x0 = reference.x_star.clone();
    x0[0] += 1.0;

    let thm_run = {
        let mut spec = RunSpec::new(
            &p,
            &reference,
            MethodKind::Csaga,
            theory.gamma_thm,
            100,
            seed,
        );
        spec.diagnostics = true;
        spec.x0 = Some(&x0);
        run(&spec)?
    };
    let trace = thm_run.lyapunov.as_ref().expect("diagnostics ran");

    battery.check("theorem_contraction", {
        let rep = check_contraction(trace, theory.rho_thm, 1e-12);
        Ok(if rep.holds() {
            Ok(())
        } else {
            Err(format!(
                "{} of {} pairs violated",
                rep.violations.len(),
                rep.pairs_checked
            ))
        })
    });

    battery.check("corollary_function_values", {
        let subopts: Vec<f64> = thm_run.records.iter().map(|r| r.suboptimality).collect();
        let rep = check_corollary(&subopts, trace.values()[0], theory.l, theory.rho_thm, 1e-12);
        Ok(if rep.holds() {
            Ok(())
        } else {
            Err(format!(
                "{} of {} epochs violated",
                rep.violations.len(),
                rep.epochs_checked
            ))
        })
    });

    battery.check(
        "stepsize_range_contraction",
        (|| {
            for i in 0..5 {
                let gamma = theory.gamma_max * 100f64.powf(i as f64 / 4.0) / 100.0;
                let rho = theory.contraction_factor(gamma)?;
                let mut spec = RunSpec::new(&p, &reference, MethodKind::Csaga, gamma, 60, seed);
                spec.diagnostics = true;
                spec.x0 = Some(&x0);
                let out = run(&spec)?;
                let rep = check_contraction(out.lyapunov.as_ref().unwrap(), rho, 1e-12);
                if !rep.holds() {
                    return Ok(Err(format!(
                        "gamma {gamma}: {} violations",
                        rep.violations.len()
                    )));
                }
                let subopts: Vec<f64> = out.records.iter().map(|r| r.suboptimality).collect();
                match fit_empirical_rate(&subopts) {
                    Some(rate) if rate < 1.0 => {}
                    other => return Ok(Err(format!("gamma {gamma}: empirical rate {other:?}"))),
                }
            }
            Ok(Ok(()))
        })(),
    );

    battery.check(
        "lemma1_recurrence_bound",
        (|| {
            for (c1, c2) in [(3.0, 4.0), (0.0, 0.0), (5.0, 0.0)] {
                let rep = lemma1_bound_check(c1, c2, 60)?;
                if rep.max_rel_excess > 1e-9 {
                    return Ok(Err(format!(
                        "pinned ({c1},{c2}): excess {}",
                        rep.max_rel_excess
                    )));
                }
            }
            let mut rng = stream_rng(seed, STREAM_SYNTH);
            use rand::Rng;
            for _ in 0..200 {
                let c1: f64 = rng.gen_range(0.0..10.0);
                let c2: f64 = rng.gen_range(0.0..(1.0 + c1).min(10.0));
                let rep = lemma1_bound_check(c1, c2, 60)?;
                if rep.max_rel_excess > 1e-9 {
                    return Ok(Err(format!("({c1},{c2}): excess {}", rep.max_rel_excess)));
                }
            }
            Ok(Ok(()))
        })(),
    );

    battery.check(
        "table_engine_matches_recursion",
        (|| {
            use crate::solvers::{init, step_csaga, Scheduler};
            for trial in 0..5u64 {
                let n = 3 + (trial as usize % 4);
                let p = quadratic_family(n, 3, 0.5, 3.0, seed.wrapping_add(trial))?;
                let x0 = DenseVec::from_vec(vec![0.7, -0.4, 0.2]);
                let gamma = 0.03;
                let steps = 10 * n;
                let xs = literal_csaga(&p, &x0, gamma, steps)?;
                let mut state = init(&p, &x0, MethodKind::Csaga, gamma, false, false)?;
                let mut sched = Scheduler::new(SchedulerKind::Cyclic, n, seed)?;
                for (k, x_lit) in xs.iter().enumerate().skip(1) {
                    step_csaga(&mut state, &p, &mut sched)?;
                    let dev = sq_dist(&state.x, x_lit)?.sqrt();
                    if dev > 1e-12 {
                        return Ok(Err(format!("trial {trial} step {k}: deviation {dev}")));
                    }
                }
            }
            Ok(Ok(()))
        })(),
    );

    battery.check(
        "single_component_is_gd",
        (|| {
            let p = quadratic_family(1, 3, 1.0, 1.0, seed)?;
            let reference = p.solve_reference(1e-12)?;
            let gd = run(&RunSpec::new(
                &p,
                &reference,
                MethodKind::Gd,
                0.2,
                100,
                seed,
            ))?;
            for method in [MethodKind::Csaga, MethodKind::Sag, MethodKind::Finito] {
                let out = run(&RunSpec::new(&p, &reference, method, 0.2, 100, seed))?;
                if out.x_final != gd.x_final {
                    return Ok(Err(format!("{method} deviates from gd at n = 1")));
                }
            }
            Ok(Ok(()))
        })(),
    );

    battery.check(
        "jit_matches_dense",
        (|| {
            let ds = sparse_glm_dataset(40, 25, 4, seed.wrapping_add(9))?;
            let p = FiniteSumProblem::glm(LossKind::Logistic, ds, 0.05)?;
            let reference = p.solve_reference(1e-10)?;
            let gamma = 0.3 / p.smoothness();
            for method in [MethodKind::Csaga, MethodKind::Iag] {
                let dense = run(&RunSpec::new(&p, &reference, method, gamma, 10, seed))?;
                let mut spec = RunSpec::new(&p, &reference, method, gamma, 10, seed);
                spec.jit = true;
                let fast = run(&spec)?;
                for j in 0..p.d() {
                    let tol = 1e-9 * dense.x_final[j].abs().max(1.0);
                    if (dense.x_final[j] - fast.x_final[j]).abs() > tol {
                        return Ok(Err(format!("{method} coord {j} deviates")));
                    }
                }
                if fast.max_jit_touch_ratio.unwrap_or(f64::INFINITY) > 4.0 {
                    return Ok(Err(format!("{method}: touch ratio above 4x nnz")));
                }
            }
            Ok(Ok(()))
        })(),
    );

    battery.check(
        "divergence_is_reported_not_fatal",
        (|| {
            let (_, l, _) = p.constants()?;
            let out = run(&RunSpec::new(
                &p,
                &reference,
                MethodKind::Csaga,
                1e3 / l,
                30,
                seed,
            ))?;
            if !out.diverged() {
                return Ok(Err("run at gamma = 1000/L failed to diverge".into()));
            }
            let template = RunSpec::new(&p, &reference, MethodKind::Csaga, f64::NAN, 10, seed);
            let grid = grid_search(&template, &[1e3 / l, 0.01])?;
            if grid.best().output.diverged() {
                return Ok(Err("grid picked a divergent cell".into()));
            }
            Ok(Ok(()))
        })(),
    );

    if battery.failures == 0 {
        println!("all checks passed");
        Ok(0)
    } else {
        println!("{} check(s) failed", battery.failures);
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses_run_invocation() {
        let cli = Cli::try_parse_from([
            "csaga", "run", "--data", "x.libsvm", "--gamma", "0.1", "--method", "iag", "--lambda",
            "0.5", "--jit",
        ])
        .unwrap();
        match cli.cmd {
            Cmd::Run(args) => {
                assert_eq!(args.gamma, 0.1);
                assert_eq!(args.method, "iag");
                assert_eq!(args.data.lambda, 0.5);
                assert!(args.jit);
                assert_eq!(args.epochs, 20);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cli_requires_gamma_for_run() {
        assert!(Cli::try_parse_from(["csaga", "run", "--data", "x"]).is_err());
    }

    #[test]
    fn cli_parses_grid_and_sweep() {
        let cli = Cli::try_parse_from(["csaga", "grid", "--data", "x", "--gamma-grid", "0.5,0.25"])
            .unwrap();
        match cli.cmd {
            Cmd::Grid(args) => assert_eq!(args.gamma_grid.as_deref(), Some("0.5,0.25")),
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["csaga", "sweep", "--kappas", "1,10", "--ns", "2"]).unwrap();
        match cli.cmd {
            Cmd::Sweep(args) => {
                assert_eq!(
                    parse_list::<f64>(&args.kappas, "kappa").unwrap(),
                    vec![1.0, 10.0]
                );
                assert_eq!(parse_list::<usize>(&args.ns, "n").unwrap(), vec![2]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loss_names() {
        assert_eq!(parse_loss("logistic").unwrap(), LossKind::Logistic);
        assert_eq!(parse_loss("ridge").unwrap(), LossKind::Ridge);
        assert!(parse_loss("hinge").is_err());
    }
}

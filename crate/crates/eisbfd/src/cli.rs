//! Command-line front end: solve, convergence, symbols, stability-check,
//! dg-check, and filter subcommands over the library.
//!
//! Exit codes: `0` success, `1` numerical failure (divergence, a failed
//! certification or equivalence check), `2` usage or configuration error.
//! All file outputs are CSV (or plain text for check reports) under `--out`;
//! without `--out` results go to standard output. Identical invocations
//! produce bitwise-identical output: every reduction in the library runs in
//! a fixed order and floats are printed in shortest round-trip form.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dg_equiv::equivalence_report;
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::grid::{build_grid_1d, build_grid_2d, Grid};
use crate::harness::{
    convergence_study_multi, find_case, run_case_with, RunOptions, RunResult, TestCase,
};
use crate::operator::Field;
use crate::stability::{certify_boundary, certify_interior};
use crate::symbols::{compute_symbols, FrequencyPair};

/// Stencil parameter at the command line: a decimal, or the literal
/// `optimal` for the error-inhibiting value −4/13.
fn parse_c(s: &str) -> std::result::Result<f64, String> {
    if s == "optimal" {
        return Ok(crate::harness::OPTIMAL_C);
    }
    s.parse::<f64>()
        .map_err(|e| format!("expected a decimal or the literal `optimal`: {e}"))
}

/// Comma-separated cell counts, e.g. `24,36,48`.
fn parse_n_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad cell count {part:?}: {e}"))
        })
        .collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    /// Fourier truncation to the resolved band (periodic grids).
    Spectral,
    /// Block-wise degree-6 replacement fit.
    Interp1,
    /// Sliding-window degree-6 replacement fit.
    Interp2,
    /// Savitzky–Golay least-squares smoothing (control; no order gain).
    Sg,
}

impl FilterArg {
    fn spec(self) -> FilterSpec {
        match self {
            FilterArg::Spectral => FilterSpec::spectral(),
            FilterArg::Interp1 => FilterSpec::interp1(),
            FilterArg::Interp2 => FilterSpec::interp2(),
            FilterArg::Sg => FilterSpec::savitzky_golay(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            FilterArg::Spectral => "spectral",
            FilterArg::Interp1 => "interp1",
            FilterArg::Interp2 => "interp2",
            FilterArg::Sg => "sg",
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "eisbfd",
    version,
    about = "Error-inhibiting block finite-difference heat solver",
    max_term_width = 100
)]
pub struct Cli {
    /// key=value file mirroring the long flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a built-in 1D manufactured case and write the node profile.
    Solve1d(SolveArgs),
    /// Solve a built-in 2D manufactured case and write the node field.
    Solve2d(SolveArgs),
    /// Run a grid-refinement study and report observed convergence orders.
    Convergence(ConvergenceArgs),
    /// Tabulate the per-wavenumber symbol pair of the periodic operator.
    Symbols(SymbolsArgs),
    /// Certify the energy-stability face matrices over a parameter sweep.
    StabilityCheck(StabilityArgs),
    /// Verify the stencil blocks against the weak-form assembly.
    DgCheck(DgArgs),
    /// Post-process a stored solution file with one of the filters.
    Filter(FilterFileArgs),
}

#[derive(Args, Debug, Default)]
pub struct SolveArgs {
    /// Built-in case name (see `convergence --help` for the registry).
    #[arg(long)]
    pub case: Option<String>,
    /// Cells per axis.
    #[arg(long)]
    pub n: Option<usize>,
    /// Stencil parameter (decimal or `optimal`).
    #[arg(long, value_parser = parse_c, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Post-processing filter for the final solution.
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
    /// Explicit time step (default: well inside the stable bound).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Safety factor on the stable time step (default 0.5).
    #[arg(long)]
    pub safety: Option<f64>,
    /// Final time (default: the case's).
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Output directory for the solution CSV (default: print to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Lift the stability guards on `dt` and on the parameter range.
    #[arg(long)]
    pub allow_unstable: bool,
}

#[derive(Args, Debug, Default)]
pub struct ConvergenceArgs {
    /// Built-in case name: dirichlet1d, periodic2d, dirichlet2d, mode2, mode3.
    #[arg(long)]
    pub case: Option<String>,
    /// Resolution ladder override, comma-separated (default: the case's).
    #[arg(long, value_parser = parse_n_list)]
    pub n: Option<Vec<usize>>,
    /// Stencil parameter (decimal or `optimal`; default: the case's).
    #[arg(long, value_parser = parse_c, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Post-processing filter (default: report the unfiltered errors).
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
    /// Final time override.
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Output directory for the study CSV (default: print to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SymbolsArgs {
    /// Number of cells (the resolved band is |ω| ≤ N/2).
    #[arg(long)]
    pub n: Option<usize>,
    /// Stencil parameter (decimal or `optimal`).
    #[arg(long, value_parser = parse_c, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Output directory for the symbol CSV (default: print to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct StabilityArgs {
    /// Number of equispaced parameter samples on [−1, 1].
    #[arg(long)]
    pub c_samples: Option<usize>,
    /// Eigenvalue tolerance for the certificates.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory for the per-sample CSVs (default: table on stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct DgArgs {
    /// Number of parameter samples swept over [−1, 1].
    #[arg(long)]
    pub c_samples: Option<usize>,
    /// Entrywise tolerance for the block comparisons.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory for the check report (default: print to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct FilterFileArgs {
    /// Solution CSV produced by solve1d/solve2d.
    pub input: Option<PathBuf>,
    /// Which filter to apply.
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
    /// Output directory (default: print the filtered CSV to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse a `key=value` config file (one pair per line, `#` comments).
fn parse_config(path: &Path) -> Result<BTreeMap<String, String>> {
    const KNOWN: &[&str] = &[
        "case",
        "n",
        "c",
        "filter",
        "dt",
        "safety",
        "t-final",
        "out",
        "allow-unstable",
        "c-samples",
        "tol",
    ];
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Usage(format!(
                "config {}:{}: expected key=value, got {raw:?}",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Usage(format!(
                "config {}:{}: unknown key {key:?} (known: {})",
                path.display(),
                lineno + 1,
                KNOWN.join(", ")
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn config_value<T>(
    map: &BTreeMap<String, String>,
    key: &str,
    parse: impl Fn(&str) -> std::result::Result<T, String>,
) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => parse(raw)
            .map(Some)
            .map_err(|e| Error::Usage(format!("config key {key}: {e}"))),
    }
}

fn parse_filter_arg(s: &str) -> std::result::Result<FilterArg, String> {
    FilterArg::from_str(s, true)
}

/// Fill every unset flag from the config map (explicit flags win).
fn merge_config(command: &mut Command, map: &BTreeMap<String, String>) -> Result<()> {
    let numeric = |s: &str| s.parse::<f64>().map_err(|e| e.to_string());
    let integer = |s: &str| s.parse::<usize>().map_err(|e| e.to_string());
    let flag = |s: &str| match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("expected true/false, got {other:?}")),
    };
    let path = |s: &str| Ok::<PathBuf, String>(PathBuf::from(s));
    let string = |s: &str| Ok::<String, String>(s.to_string());

    match command {
        Command::Solve1d(a) | Command::Solve2d(a) => {
            a.case = a.case.take().or(config_value(map, "case", string)?);
            a.n = a.n.or(config_value(map, "n", integer)?);
            a.c = a.c.or(config_value(map, "c", parse_c)?);
            a.filter = a.filter.or(config_value(map, "filter", parse_filter_arg)?);
            a.dt = a.dt.or(config_value(map, "dt", numeric)?);
            a.safety = a.safety.or(config_value(map, "safety", numeric)?);
            a.t_final = a.t_final.or(config_value(map, "t-final", numeric)?);
            a.out = a.out.take().or(config_value(map, "out", path)?);
            a.allow_unstable =
                a.allow_unstable || config_value(map, "allow-unstable", flag)?.unwrap_or(false);
        }
        Command::Convergence(a) => {
            a.case = a.case.take().or(config_value(map, "case", string)?);
            a.n = a.n.take().or(config_value(map, "n", parse_n_list)?);
            a.c = a.c.or(config_value(map, "c", parse_c)?);
            a.filter = a.filter.or(config_value(map, "filter", parse_filter_arg)?);
            a.t_final = a.t_final.or(config_value(map, "t-final", numeric)?);
            a.out = a.out.take().or(config_value(map, "out", path)?);
        }
        Command::Symbols(a) => {
            a.n = a.n.or(config_value(map, "n", integer)?);
            a.c = a.c.or(config_value(map, "c", parse_c)?);
            a.out = a.out.take().or(config_value(map, "out", path)?);
        }
        Command::StabilityCheck(a) => {
            a.c_samples = a.c_samples.or(config_value(map, "c-samples", integer)?);
            a.tol = a.tol.or(config_value(map, "tol", numeric)?);
            a.out = a.out.take().or(config_value(map, "out", path)?);
        }
        Command::DgCheck(a) => {
            a.c_samples = a.c_samples.or(config_value(map, "c-samples", integer)?);
            a.tol = a.tol.or(config_value(map, "tol", numeric)?);
            a.out = a.out.take().or(config_value(map, "out", path)?);
        }
        Command::Filter(a) => {
            a.filter = a.filter.or(config_value(map, "filter", parse_filter_arg)?);
            a.out = a.out.take().or(config_value(map, "out", path)?);
        }
    }
    Ok(())
}

/// Entry point used by `main`: parse, dispatch, and translate errors into
/// the exit-code contract.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {e}");
        return 2;
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// `0` is returned by `dispatch` directly; errors map here.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergence { .. } | Error::Certification(_) | Error::UnstableDt { .. } => 1,
        _ => 2,
    }
}

/// Cap the worker pool when EISBFD_THREADS is set (orchestration itself is
/// single-threaded; the library parallelizes row sweeps and study ladders).
fn init_thread_pool() -> Result<()> {
    match std::env::var("EISBFD_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|e| {
                Error::Usage(format!("EISBFD_THREADS must be a positive integer: {e}"))
            })?;
            if n == 0 {
                return Err(Error::Usage(
                    "EISBFD_THREADS must be a positive integer, got 0".into(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Usage(format!("thread pool: {e}")))
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let mut command = cli.command;
    if let Some(path) = &cli.config {
        let map = parse_config(path)?;
        merge_config(&mut command, &map)?;
    }
    match command {
        Command::Solve1d(args) => cmd_solve(args, 1),
        Command::Solve2d(args) => cmd_solve(args, 2),
        Command::Convergence(args) => cmd_convergence(args),
        Command::Symbols(args) => cmd_symbols(args),
        Command::StabilityCheck(args) => cmd_stability(args),
        Command::DgCheck(args) => cmd_dg_check(args),
        Command::Filter(args) => cmd_filter_file(args),
    }
}

fn lookup_case(name: &str) -> Result<TestCase> {
    find_case(name).ok_or_else(|| {
        Error::Usage(format!(
            "unknown case {name:?}; built-in cases: dirichlet1d, periodic2d, dirichlet2d, mode2, mode3"
        ))
    })
}

fn emit(out: Option<&Path>, file_name: &str, contents: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(file_name), contents)?;
            println!("wrote {}", dir.join(file_name).display());
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- solve

fn cmd_solve(args: SolveArgs, dimension: usize) -> Result<i32> {
    let default_case = if dimension == 1 { "dirichlet1d" } else { "dirichlet2d" };
    let mut case = lookup_case(args.case.as_deref().unwrap_or(default_case))?;
    if case.dimension != dimension {
        return Err(Error::Usage(format!(
            "case {:?} is {}-dimensional; use solve{}d",
            case.name, case.dimension, case.dimension
        )));
    }
    if let Some(c) = args.c {
        case = case.with_c(c);
    }
    let n = args.n.ok_or_else(|| {
        Error::Usage("solve needs --n (cells per axis); try --n 48".into())
    })?;
    let filter_spec = args.filter.map(FilterArg::spec);
    let result = run_case_with(
        &case,
        n,
        filter_spec.as_ref(),
        RunOptions {
            dt: args.dt,
            safety: args.safety,
            allow_unstable: args.allow_unstable,
            t_final: args.t_final,
        },
    )?;

    let filter_name = args.filter.map(FilterArg::label).unwrap_or("none");
    let csv = solution_csv(&case, &result, filter_name)?;
    let file_name = format!("solution_{}_n{}_{}.csv", case.name, n, filter_name);
    emit(args.out.as_deref(), &file_name, &csv)?;
    eprintln!(
        "case {} N={} c={} filter={}: t={} dt={:e} L2={:e} Linf={:e}",
        case.name,
        n,
        case.c,
        filter_name,
        result.solution.time,
        result.dt,
        result.norms.l2_scaled,
        result.norms.linf
    );
    Ok(0)
}

/// Solution CSV: a `# key=value` metadata line (enough to rebuild the grid),
/// then node coordinates and values in storage order (x fastest).
fn solution_csv(case: &TestCase, result: &RunResult, filter_name: &str) -> Result<String> {
    let grid = case.build_grid(result.n_cells)?;
    let mut out = format!(
        "# eisbfd-solution case={} n={} dimension={} periodic={} length={} c={} t={} filter={}\n",
        case.name,
        result.n_cells,
        case.dimension,
        case.periodic,
        case.length,
        case.c,
        result.solution.time,
        filter_name,
    );
    let axis = grid.axis();
    match case.dimension {
        1 => {
            out.push_str("x,u\n");
            for (x, v) in axis.nodes.iter().zip(&result.solution.values) {
                let _ = writeln!(out, "{x},{v}");
            }
        }
        2 => {
            out.push_str("x,y,u\n");
            let m = axis.nodes.len();
            for iy in 0..m {
                for ix in 0..m {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        axis.nodes[ix],
                        axis.nodes[iy],
                        result.solution.values[iy * m + ix]
                    );
                }
            }
        }
        d => return Err(Error::Unsupported(format!("{d}-dimensional output"))),
    }
    Ok(out)
}

// ---------------------------------------------------------- convergence

fn cmd_convergence(args: ConvergenceArgs) -> Result<i32> {
    let mut case = lookup_case(args.case.as_deref().unwrap_or("dirichlet1d"))?;
    if let Some(c) = args.c {
        case = case.with_c(c);
    }
    if let Some(ladder) = args.n {
        case = case.with_resolutions(ladder);
    }
    if let Some(t) = args.t_final {
        case = case.with_t_final(t);
    }
    let filter_spec = args.filter.map(FilterArg::spec);
    let reports = convergence_study_multi(&case, &[filter_spec])?;
    let report = &reports[0];

    let file_name = format!("convergence_{}_{}.csv", case.name, report.filter_label);
    emit(args.out.as_deref(), &file_name, &report.to_csv())?;
    eprintln!(
        "case {} c={} filter={}: dt={:e} (halving control {:.2e}), slope fit over 3 finest = {:.3}",
        case.name,
        case.c,
        report.filter_label,
        report.dt,
        report.time_control_rel_change,
        report.slope_fit
    );
    for row in &report.rows {
        eprintln!(
            "  N={:>4} h={:<22} L2={:<22e} Linf={:<22e} slope={}",
            row.n_cells,
            row.h,
            row.err_l2,
            row.err_linf,
            row.slope_pairwise
                .map(|s| format!("{s:.3}"))
                .unwrap_or_else(|| "-".into())
        );
    }
    Ok(0)
}

// -------------------------------------------------------------- symbols

fn cmd_symbols(args: SymbolsArgs) -> Result<i32> {
    let n = args.n.unwrap_or(16);
    if n < 3 {
        return Err(Error::Usage(format!(
            "symbols need at least 3 cells, got {n}"
        )));
    }
    let c = args.c.unwrap_or(crate::harness::OPTIMAL_C);
    let mut csv = String::from("omega,nu,qhat1,qhat2,r1_abs,r2_abs\n");
    for omega in 0..=(n as i64 / 2) {
        let pair = FrequencyPair::new(omega, n);
        let s = compute_symbols(omega, n, c);
        let r1 = s.r1.map(|r| r.norm().to_string()).unwrap_or_default();
        let r2 = s.r2.map(|r| r.norm().to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{},{},{},{}", omega, pair.nu, s.q1, s.q2, r1, r2);
    }
    let file_name = format!("symbols_n{n}.csv");
    emit(args.out.as_deref(), &file_name, &csv)?;
    eprintln!("symbol table for N={n}, c={c}: low band |omega| <= {}", n / 2);
    Ok(0)
}

// ------------------------------------------------------ stability-check

fn cmd_stability(args: StabilityArgs) -> Result<i32> {
    let samples = args.c_samples.unwrap_or(201);
    if samples < 2 {
        return Err(Error::Usage(format!(
            "the sweep needs at least 2 parameter samples, got {samples}"
        )));
    }
    let tol = args.tol.unwrap_or(1e-10);
    let c_values: Vec<f64> = (0..samples)
        .map(|i| -1.0 + 2.0 * i as f64 / (samples - 1) as f64)
        .collect();

    let interior = certify_interior(&c_values, tol);
    let boundary = certify_boundary(&c_values, tol);

    let mut table = String::new();
    for (name, report) in [("interior", &interior), ("boundary", &boundary)] {
        let worst = report
            .records
            .iter()
            .map(|r| r.max_eigenvalue)
            .fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            table,
            "[{}] {name} face form: {} samples on [-1,1], max eigenvalue {worst:.3e} (tol {tol:.1e})",
            if report.all_certified { "PASS" } else { "FAIL" },
            report.records.len(),
        );
    }
    let d_ok = interior
        .records
        .iter()
        .filter_map(|r| r.d_factors)
        .all(|d| d.iter().all(|&v| v <= tol));
    let inertia_ok = interior
        .records
        .iter()
        .all(|r| r.inertia_matches.unwrap_or(true));
    let _ = writeln!(
        table,
        "[{}] closed-form sign factors non-positive at every sample",
        if d_ok { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(
        table,
        "[{}] matrix inertia matches the sign factors at every sample",
        if inertia_ok { "PASS" } else { "FAIL" }
    );
    print!("{table}");

    if let Some(dir) = args.out.as_deref() {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("stability_interior.csv"), interior.csv())?;
        fs::write(dir.join("stability_boundary.csv"), boundary.csv())?;
        println!(
            "wrote {} and {}",
            dir.join("stability_interior.csv").display(),
            dir.join("stability_boundary.csv").display()
        );
    }

    if interior.all_certified && boundary.all_certified && d_ok && inertia_ok {
        Ok(0)
    } else {
        Err(Error::Certification(
            "stability sweep found a violating sample; see the table above".into(),
        ))
    }
}

// -------------------------------------------------------------- dg-check

fn cmd_dg_check(args: DgArgs) -> Result<i32> {
    let samples = args.c_samples.unwrap_or(41);
    let tol = args.tol.unwrap_or(1e-12);
    let report = equivalence_report(samples, tol);
    emit(args.out.as_deref(), "dg_check.txt", &report.text)?;
    if report.passed {
        Ok(0)
    } else {
        Err(Error::Certification(
            "weak-form assembly deviates from the stencil blocks; see the report".into(),
        ))
    }
}

// ---------------------------------------------------------------- filter

fn cmd_filter_file(args: FilterFileArgs) -> Result<i32> {
    let input = args
        .input
        .ok_or_else(|| Error::Usage("filter needs an input solution CSV path".into()))?;
    let kind = args
        .filter
        .ok_or_else(|| Error::Usage("filter needs --filter <spectral|interp1|interp2|sg>".into()))?;
    let (meta, field, grid) = read_solution_csv(&input)?;
    let spec = kind.spec();
    let filtered = spec.apply(&field, &grid)?;

    let mut out = meta.header_with_filter(kind.label());
    let axis = grid.axis();
    match grid.dimension() {
        1 => {
            out.push_str("x,u\n");
            for (x, v) in axis.nodes.iter().zip(&filtered.values) {
                let _ = writeln!(out, "{x},{v}");
            }
        }
        _ => {
            out.push_str("x,y,u\n");
            let m = axis.nodes.len();
            for iy in 0..m {
                for ix in 0..m {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        axis.nodes[ix],
                        axis.nodes[iy],
                        filtered.values[iy * m + ix]
                    );
                }
            }
        }
    }

    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("solution");
    let file_name = format!("{stem}_{}.csv", kind.label());
    emit(args.out.as_deref(), &file_name, &out)?;
    Ok(0)
}

struct SolutionMeta {
    n: usize,
    dimension: usize,
    periodic: bool,
    length: f64,
    c: f64,
    t: f64,
    case: String,
}

impl SolutionMeta {
    fn header_with_filter(&self, filter: &str) -> String {
        format!(
            "# eisbfd-solution case={} n={} dimension={} periodic={} length={} c={} t={} filter={}\n",
            self.case, self.n, self.dimension, self.periodic, self.length, self.c, self.t, filter,
        )
    }
}

/// Read back a solution CSV written by the solve subcommands: the metadata
/// comment line carries everything needed to rebuild the grid.
fn read_solution_csv(path: &Path) -> Result<(SolutionMeta, Field, Grid)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Usage(format!("{}: empty file", path.display())))?;
    let tag = "# eisbfd-solution ";
    let meta_line = header.strip_prefix(tag).ok_or_else(|| {
        Error::Usage(format!(
            "{}: not a solution file (missing `{tag}` metadata line)",
            path.display()
        ))
    })?;
    let mut kv = BTreeMap::new();
    for pair in meta_line.split_whitespace() {
        if let Some((k, v)) = pair.split_once('=') {
            kv.insert(k.to_string(), v.to_string());
        }
    }
    let get = |key: &str| -> Result<&String> {
        kv.get(key)
            .ok_or_else(|| Error::Usage(format!("{}: metadata lacks {key}", path.display())))
    };
    let parse_err =
        |key: &str, e: String| Error::Usage(format!("{}: bad {key}: {e}", path.display()));
    let meta = SolutionMeta {
        n: get("n")?
            .parse()
            .map_err(|e: std::num::ParseIntError| parse_err("n", e.to_string()))?,
        dimension: get("dimension")?
            .parse()
            .map_err(|e: std::num::ParseIntError| parse_err("dimension", e.to_string()))?,
        periodic: get("periodic")?
            .parse()
            .map_err(|e: std::str::ParseBoolError| parse_err("periodic", e.to_string()))?,
        length: get("length")?
            .parse()
            .map_err(|e: std::num::ParseFloatError| parse_err("length", e.to_string()))?,
        c: get("c")?
            .parse()
            .map_err(|e: std::num::ParseFloatError| parse_err("c", e.to_string()))?,
        t: get("t")?
            .parse()
            .map_err(|e: std::num::ParseFloatError| parse_err("t", e.to_string()))?,
        case: get("case")?.clone(),
    };

    let grid = match meta.dimension {
        1 => Grid::One(build_grid_1d(meta.n, meta.length, meta.periodic)?),
        2 => Grid::Two(build_grid_2d(meta.n, meta.length, meta.periodic)?),
        d => return Err(Error::Unsupported(format!("{d}-dimensional input"))),
    };

    let mut values = Vec::with_capacity(grid.n_nodes());
    for (lineno, line) in lines.enumerate() {
        if lineno == 0 && line.starts_with(|ch: char| ch.is_ascii_alphabetic()) {
            continue; // column header
        }
        if line.trim().is_empty() {
            continue;
        }
        let value = line.rsplit(',').next().unwrap_or("").trim();
        values.push(value.parse::<f64>().map_err(|e| {
            Error::Usage(format!("{}:{}: bad value: {e}", path.display(), lineno + 2))
        })?);
    }
    if values.len() != grid.n_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "{}: {} values but the {}D N={} grid has {} nodes",
            path.display(),
            values.len(),
            meta.dimension,
            meta.n,
            grid.n_nodes()
        )));
    }
    let field = Field {
        values,
        time: meta.t,
    };
    Ok((meta, field, grid))
}

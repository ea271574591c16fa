//! Manufactured-solution convergence harness: exact solutions with forcing,
//! built-in study cases, error norms, observed-order estimation, and a
//! matrix-exponential reference solver for validating the time integration.

pub mod cases;
pub mod expm;
pub mod profile;

pub use cases::{builtin_cases, find_case, BoxedForcing, SolutionForm, TestCase, OPTIMAL_C};
pub use expm::{duhamel_reference, expm, gauss_legendre};
pub use profile::ExpCosProfile;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::{FilterKind, FilterSpec};
use crate::grid::Grid;
use crate::operator::{Field, SpatialOperator};
use crate::timestepper::{default_scheme, integrate, stable_dt, ForcingRef};

/// Error norms of a sampled error field.
#[derive(Clone, Copy, Debug)]
pub struct ErrorNorms {
    /// Cell-scaled discrete L2 norm: `‖E‖₂ · (h/2)^{d/2}` — the Riemann-sum
    /// scaling that makes the norm resolution-independent.
    pub l2_scaled: f64,
    /// Maximum absolute nodal error.
    pub linf: f64,
}

/// Norms of `diff` sampled on a `d`-dimensional block grid of cell width `h`
/// (node spacing `h/2`). Accumulation is sequential in index order, so the
/// result is bitwise deterministic.
pub fn error_norms(diff: &[f64], h: f64, dimension: usize) -> ErrorNorms {
    let mut sq = 0.0;
    let mut linf = 0.0f64;
    for &d in diff {
        sq += d * d;
        linf = linf.max(d.abs());
    }
    let half_h = 0.5 * h;
    let scale = match dimension {
        1 => half_h.sqrt(),
        2 => half_h,
        3 => half_h * half_h.sqrt(),
        d => panic!("unsupported dimension {d}"),
    };
    ErrorNorms {
        l2_scaled: sq.sqrt() * scale,
        linf,
    }
}

/// Overrides for a single run; the default is the standard policy.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Explicit time step (bypasses the default policy, still stability-gated
    /// unless `allow_unstable`).
    pub dt: Option<f64>,
    /// Stability safety factor for the default policy (default 0.5).
    pub safety: Option<f64>,
    /// Lift both stability guards: pass a time step beyond the stable bound
    /// through to the integrator, and accept a stencil parameter outside the
    /// energy-certified range `[−1, 1]`.
    pub allow_unstable: bool,
    /// Integrate to a different final time than the case's.
    pub t_final: Option<f64>,
}

/// Outcome of a single manufactured run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub n_cells: usize,
    /// Cell width.
    pub h: f64,
    /// Time step actually requested from the integrator.
    pub dt: f64,
    /// Final-time solution (post-processed if a filter was given).
    pub solution: Field,
    /// Norms of (exact − solution) at the final time.
    pub norms: ErrorNorms,
}

/// Default single-run time step: safely inside the stability bound and, at
/// practical resolutions, small enough that time error is far below spatial
/// error (`0.1·(h/2)²` matches the heat-equation scaling of the spatial
/// truncation terms).
pub fn default_dt(op: &SpatialOperator, safety: f64) -> f64 {
    let half_h = 0.5 * op.h();
    stable_dt(op, safety).min(0.1 * half_h * half_h)
}

/// Run one manufactured case at one resolution with the default time-step
/// policy, optionally post-processing the final solution with `filter`.
pub fn run_case(
    case: &TestCase,
    n_cells: usize,
    filter: Option<&FilterSpec>,
) -> Result<RunResult> {
    run_case_with(case, n_cells, filter, RunOptions::default())
}

/// [`run_case`] with explicit overrides.
pub fn run_case_with(
    case: &TestCase,
    n_cells: usize,
    filter: Option<&FilterSpec>,
    opts: RunOptions,
) -> Result<RunResult> {
    let grid = case.build_grid(n_cells)?;
    let op = if opts.allow_unstable {
        SpatialOperator::new_unrestricted(case.c, grid.clone(), case.boundary_data())?
    } else {
        SpatialOperator::new(case.c, grid.clone(), case.boundary_data())?
    };
    let t_final = opts.t_final.unwrap_or(case.t_final);
    let dt = opts
        .dt
        .unwrap_or_else(|| default_dt(&op, opts.safety.unwrap_or(0.5)));
    let solution = solve_on(case, &grid, &op, t_final, dt, opts.allow_unstable)?;
    let solution = match filter {
        Some(spec) => spec.apply(&solution, &grid)?,
        None => solution,
    };
    let norms = norms_against_exact(case, &grid, &solution);
    Ok(RunResult {
        n_cells,
        h: grid.axis().h,
        dt,
        solution,
        norms,
    })
}

fn solve_on(
    case: &TestCase,
    grid: &Grid,
    op: &SpatialOperator,
    t_final: f64,
    dt: f64,
    allow_unstable: bool,
) -> Result<Field> {
    let forcing = case.volume_forcing(grid);
    let initial = case.exact_field(grid, 0.0);
    integrate(
        default_scheme(),
        op,
        &initial,
        forcing.as_deref().map(|f| f as ForcingRef<'_>),
        t_final,
        dt,
        allow_unstable,
    )
}

fn norms_against_exact(case: &TestCase, grid: &Grid, solution: &Field) -> ErrorNorms {
    let exact = case.exact_field(grid, solution.time);
    let diff: Vec<f64> = exact
        .values
        .iter()
        .zip(&solution.values)
        .map(|(e, v)| e - v)
        .collect();
    error_norms(&diff, grid.axis().h, case.dimension)
}

/// One resolution's worth of a convergence report.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub h: f64,
    pub err_l2: f64,
    pub err_linf: f64,
    /// Observed order between this row and the next-coarser one (`None` on
    /// the coarsest row).
    pub slope_pairwise: Option<f64>,
}

/// A full convergence study for one case and one filter.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub case_name: String,
    pub c: f64,
    /// `"none"`, `"spectral"`, `"interp1"`, `"interp2"`, or `"sg"`.
    pub filter_label: String,
    /// Common time step used for every resolution.
    pub dt: f64,
    /// Relative change of the finest-grid unfiltered L2 error under a
    /// dt-halving — the time-resolution control (small means the reported
    /// errors are spatial).
    pub time_control_rel_change: f64,
    /// Coarse-to-fine rows.
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log error against log h over the three finest
    /// resolutions.
    pub slope_fit: f64,
}

impl ConvergenceReport {
    /// CSV rendering (full-precision shortest-round-trip floats, one row per
    /// resolution).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let pairwise = row
                .slope_pairwise
                .map(|v| v.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.case_name,
                row.n_cells,
                row.h,
                self.c,
                self.filter_label,
                row.err_l2,
                row.err_linf,
                pairwise,
                self.slope_fit,
            ));
        }
        out
    }
}

/// Column header shared by all convergence CSV output.
pub const CSV_HEADER: &str = "case,N,h,c,filter,err_l2,err_linf,slope_pairwise,slope_fit";

/// Stable display name for a filter selection.
pub fn filter_label(filter: Option<&FilterSpec>) -> &'static str {
    match filter.map(|f| f.kind) {
        None => "none",
        Some(FilterKind::Spectral) => "spectral",
        Some(FilterKind::Interp1) => "interp1",
        Some(FilterKind::Interp2) => "interp2",
        Some(FilterKind::SavitzkyGolay) => "sg",
    }
}

/// Observed orders between consecutive ladder points: entry `i` compares
/// resolutions `i` and `i+1`.
pub fn pairwise_slopes(hs: &[f64], errs: &[f64]) -> Vec<f64> {
    assert_eq!(hs.len(), errs.len());
    hs.windows(2)
        .zip(errs.windows(2))
        .map(|(h, e)| {
            let e0 = e[0].max(f64::MIN_POSITIVE);
            let e1 = e[1].max(f64::MIN_POSITIVE);
            (e0 / e1).ln() / (h[0] / h[1]).ln()
        })
        .collect()
}

/// Least-squares slope of `ln err` against `ln h` over the `k` finest
/// (last) ladder points.
pub fn fit_slope(hs: &[f64], errs: &[f64], k: usize) -> f64 {
    assert_eq!(hs.len(), errs.len());
    assert!(hs.len() >= 2, "slope fit needs at least two points");
    let k = k.clamp(2, hs.len());
    let xs: Vec<f64> = hs[hs.len() - k..].iter().map(|&h| h.ln()).collect();
    let ys: Vec<f64> = errs[errs.len() - k..]
        .iter()
        .map(|&e| e.max(f64::MIN_POSITIVE).ln())
        .collect();
    let xbar = xs.iter().sum::<f64>() / k as f64;
    let ybar = ys.iter().sum::<f64>() / k as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    num / den
}

/// Convergence study for one filter — see [`convergence_study_multi`].
pub fn convergence_study(
    case: &TestCase,
    filter: Option<&FilterSpec>,
) -> Result<ConvergenceReport> {
    let mut reports = convergence_study_multi(case, &[filter.copied()])?;
    Ok(reports.pop().expect("one filter in, one report out"))
}

/// Run the case's full resolution ladder once and evaluate every requested
/// post-processing variant on the shared solutions (`None` = unfiltered).
///
/// Time-step policy: one common `dt` for every resolution — the minimum over
/// the ladder of the stable step at safety 0.5 — verified by a control run
/// of the finest grid at `dt/2`; if the finest unfiltered error moves by
/// ≥ 1% and more than a roundoff floor, `dt` is halved and the control
/// repeats (at most three halvings). This makes the reported errors spatial
/// by construction.
pub fn convergence_study_multi(
    case: &TestCase,
    filters: &[Option<FilterSpec>],
) -> Result<Vec<ConvergenceReport>> {
    if case.resolutions.len() < 3 {
        return Err(Error::Usage(format!(
            "a convergence study needs at least 3 resolutions, case '{}' has {}",
            case.name,
            case.resolutions.len()
        )));
    }
    let mut ladder = case.resolutions.clone();
    ladder.sort_unstable();
    ladder.dedup();
    let finest = *ladder.last().expect("non-empty ladder");

    // Common time step over the ladder.
    let mut dt = f64::INFINITY;
    for &n in &ladder {
        let grid = case.build_grid(n)?;
        let op = SpatialOperator::new(case.c, grid, case.boundary_data())?;
        dt = dt.min(stable_dt(&op, 0.5));
    }

    // Time-resolution control on the finest grid.
    let control = tune_dt(case, finest, dt)?;
    let dt = control.dt;

    // Remaining resolutions at the common dt, concurrently.
    let mut solutions: Vec<(usize, Grid, Field)> = ladder[..ladder.len() - 1]
        .par_iter()
        .map(|&n| {
            let grid = case.build_grid(n)?;
            let op = SpatialOperator::new(case.c, grid.clone(), case.boundary_data())?;
            let solution = solve_on(case, &grid, &op, case.t_final, dt, false)?;
            Ok((n, grid, solution))
        })
        .collect::<Result<Vec<_>>>()?;
    solutions.push((finest, control.grid, control.solution));

    let exacts: Vec<Field> = solutions
        .iter()
        .map(|(_, grid, _)| case.exact_field(grid, case.t_final))
        .collect();

    let mut reports = Vec::with_capacity(filters.len());
    for filter in filters {
        let mut rows = Vec::with_capacity(solutions.len());
        let mut hs = Vec::with_capacity(solutions.len());
        let mut errs = Vec::with_capacity(solutions.len());
        for ((n, grid, solution), exact) in solutions.iter().zip(&exacts) {
            let processed = match filter {
                Some(spec) => spec.apply(solution, grid)?,
                None => solution.clone(),
            };
            let diff: Vec<f64> = exact
                .values
                .iter()
                .zip(&processed.values)
                .map(|(e, v)| e - v)
                .collect();
            let norms = error_norms(&diff, grid.axis().h, case.dimension);
            hs.push(grid.axis().h);
            errs.push(norms.l2_scaled);
            rows.push(ConvergenceRow {
                n_cells: *n,
                h: grid.axis().h,
                err_l2: norms.l2_scaled,
                err_linf: norms.linf,
                slope_pairwise: None,
            });
        }
        for (i, slope) in pairwise_slopes(&hs, &errs).into_iter().enumerate() {
            rows[i + 1].slope_pairwise = Some(slope);
        }
        let slope_fit = fit_slope(&hs, &errs, 3);
        reports.push(ConvergenceReport {
            case_name: case.name.clone(),
            c: case.c,
            filter_label: filter_label(filter.as_ref()).to_string(),
            dt,
            time_control_rel_change: control.rel_change,
            rows,
            slope_fit,
        });
    }
    Ok(reports)
}

struct DtControl {
    dt: f64,
    rel_change: f64,
    grid: Grid,
    solution: Field,
}

/// Verify (and if needed refine) the common time step on the finest grid:
/// halve `dt` until doing so moves the unfiltered L2 error by less than 1%
/// or less than a roundoff floor (100·ε·‖u‖ — meaningful once the spatial
/// error sits near the rounding plateau). At most three halvings.
fn tune_dt(case: &TestCase, finest: usize, dt0: f64) -> Result<DtControl> {
    let grid = case.build_grid(finest)?;
    let op = SpatialOperator::new(case.c, grid.clone(), case.boundary_data())?;
    let exact = case.exact_field(&grid, case.t_final);
    let h = grid.axis().h;
    let err_of = |solution: &Field| -> f64 {
        let diff: Vec<f64> = exact
            .values
            .iter()
            .zip(&solution.values)
            .map(|(e, v)| e - v)
            .collect();
        error_norms(&diff, h, case.dimension).l2_scaled
    };
    let exact_scale = error_norms(&exact.values, h, case.dimension).l2_scaled;
    let floor = 100.0 * f64::EPSILON * exact_scale.max(1.0);

    let mut dt = dt0;
    let mut solution = solve_on(case, &grid, &op, case.t_final, dt, false)?;
    let mut err = err_of(&solution);
    let mut rel_change = f64::INFINITY;
    for _ in 0..3 {
        let half = solve_on(case, &grid, &op, case.t_final, 0.5 * dt, false)?;
        let err_half = err_of(&half);
        let delta = (err - err_half).abs();
        rel_change = delta / err_half.max(f64::MIN_POSITIVE);
        if rel_change < 0.01 || delta < floor {
            break;
        }
        dt *= 0.5;
        solution = half;
        err = err_half;
    }
    Ok(DtControl {
        dt,
        rel_change,
        grid,
        solution,
    })
}

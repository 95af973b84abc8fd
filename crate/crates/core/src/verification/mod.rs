//! Manufactured-solution runs, convergence studies and the interface-offset
//! conditioning sweep.

mod cases;
mod errors;

pub use cases::{CaseId, ExactSolution, ManufacturedCase};
pub use errors::{compute_errors, pressure_shift, ErrorNorms, ERROR_QUADRATURE_DEGREE};

use rayon::prelude::*;

use crate::assembly::{assemble_norm_matrices, assemble_system, AssembledSystem, Discretization};
use crate::error::{Error, Result};
use crate::solver::{estimate_infsup, solve_direct, system_condition, ConditionMethod, ConditionReport, Solution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Velocity mesh size.
    pub h_x: f64,
    pub err_p_l2: f64,
    pub err_u_l2: f64,
    pub err_u_h1: f64,
    pub err_u_inf: f64,
    pub err_p_inf: f64,
    /// Deflated condition number, when computed.
    pub cond: Option<f64>,
    pub infsup: Option<f64>,
}

/// What to compute besides the errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub condition: bool,
    /// Also the condition number of the full bordered matrix.
    pub bordered: bool,
    pub infsup: bool,
    pub method: ConditionMethod,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            condition: true,
            bordered: false,
            infsup: false,
            method: ConditionMethod::Auto,
        }
    }
}

impl RunOptions {
    /// Errors only.
    pub fn errors_only() -> Self {
        RunOptions {
            condition: false,
            ..Default::default()
        }
    }
}

/// Everything produced by one run.
#[derive(Debug, Clone)]
pub struct CaseRun {
    pub disc: Discretization,
    pub system: AssembledSystem,
    pub solution: Solution,
    pub report: ErrorReport,
    pub condition: Option<ConditionReport>,
}

/// Solve `case` on a velocity mesh with `nx` columns.
pub fn run_case(case: &ManufacturedCase, nx: usize) -> Result<ErrorReport> {
    Ok(run_case_with(case, nx, RunOptions::default())?.report)
}

pub fn run_case_with(case: &ManufacturedCase, nx: usize, opts: RunOptions) -> Result<CaseRun> {
    let disc = case.discretize(nx)?;
    let system = assemble_system(&disc, &case.cfg)?;
    let solution = solve_direct(&system, &disc)?;
    let e = compute_errors(&disc, &solution.u, &solution.p, &case.exact, case.cfg.mu)?;
    let condition = if opts.condition {
        Some(system_condition(&system, opts.method, opts.bordered)?)
    } else {
        None
    };
    let infsup = if opts.infsup {
        let (nu, np) = assemble_norm_matrices(&disc, &case.cfg)?;
        Some(estimate_infsup(&system, &nu, &np)?)
    } else {
        None
    };
    let report = ErrorReport {
        h_x: case.h_x(nx),
        err_p_l2: e.p_l2,
        err_u_l2: e.u_l2,
        err_u_h1: e.u_h1,
        err_u_inf: e.u_inf,
        err_p_inf: e.p_inf,
        cond: condition.map(|c| c.deflated),
        infsup,
    };
    Ok(CaseRun {
        disc,
        system,
        solution,
        report,
        condition,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_rate(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 || pts.len() != x.len() {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fitted log-log slopes; `None` where a column cannot be fitted.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rates {
    pub err_p_l2: Option<f64>,
    pub err_u_l2: Option<f64>,
    pub err_u_h1: Option<f64>,
    pub err_u_inf: Option<f64>,
    pub err_p_inf: Option<f64>,
    pub cond: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    /// Sorted by decreasing `h_x`.
    pub rows: Vec<ErrorReport>,
    pub rates: Rates,
}

impl ConvergenceTable {
    pub fn from_rows(mut rows: Vec<ErrorReport>) -> Self {
        rows.sort_by(|a, b| b.h_x.total_cmp(&a.h_x));
        let h: Vec<f64> = rows.iter().map(|r| r.h_x).collect();
        let col = |f: &dyn Fn(&ErrorReport) -> f64| {
            let y: Vec<f64> = rows.iter().map(f).collect();
            if rows.len() >= 3 {
                fit_rate(&h, &y)
            } else {
                None
            }
        };
        let rates = Rates {
            err_p_l2: col(&|r| r.err_p_l2),
            err_u_l2: col(&|r| r.err_u_l2),
            err_u_h1: col(&|r| r.err_u_h1),
            err_u_inf: col(&|r| r.err_u_inf),
            err_p_inf: col(&|r| r.err_p_inf),
            cond: col(&|r| r.cond.unwrap_or(f64::NAN)),
        };
        ConvergenceTable { rows, rates }
    }
}

/// Run every level and fit rates.
pub fn convergence_study(case: &ManufacturedCase, levels: &[usize]) -> Result<ConvergenceTable> {
    convergence_study_with(case, levels, RunOptions::default(), 1)
}

/// As [`convergence_study`]; `jobs > 1` runs levels in parallel.
pub fn convergence_study_with(
    case: &ManufacturedCase,
    levels: &[usize],
    opts: RunOptions,
    jobs: usize,
) -> Result<ConvergenceTable> {
    if levels.len() < 3 {
        return Err(Error::invalid(format!(
            "a convergence study needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    let run = |nx: &usize| run_case_with(case, *nx, opts).map(|r| r.report);
    let rows: Result<Vec<ErrorReport>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Solver(format!("thread pool: {e}")))?;
        pool.install(|| levels.par_iter().map(run).collect())
    } else {
        levels.iter().map(run).collect()
    };
    Ok(ConvergenceTable::from_rows(rows?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    /// Interface position.
    pub position: f64,
    pub eps_u: f64,
    pub eps_p: f64,
    pub cond: f64,
}

/// Condition numbers with the interface at relative distance `delta` from a
/// mesh line, for each velocity stabilization scaling.
pub fn sweep_interface_offset(
    base: &ManufacturedCase,
    nx: usize,
    deltas: &[f64],
    eps_u_values: &[f64],
    eps_p: f64,
    method: ConditionMethod,
) -> Result<Vec<SweepRow>> {
    let mut out = Vec::with_capacity(deltas.len() * eps_u_values.len());
    for &eps_u in eps_u_values {
        for &delta in deltas {
            let mut case = base.with_interface_offset(nx, delta)?;
            case.cfg.eps_u = eps_u;
            case.cfg.eps_p = eps_p;
            let position = match case.levelset {
                crate::geometry::LevelSet::VerticalLine { x } => x,
                crate::geometry::LevelSet::HorizontalLine { y } => y,
                crate::geometry::LevelSet::Circle { radius, .. } => radius,
            };
            let disc = case.discretize(nx)?;
            let system = assemble_system(&disc, &case.cfg)?;
            let cond = system_condition(&system, method, false)?.deflated;
            out.push(SweepRow {
                delta,
                position,
                eps_u,
                eps_p,
                cond,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x| x * x).collect();
        assert!((fit_rate(&h, &e).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_values_are_not_fitted() {
        assert_eq!(fit_rate(&[0.1, 0.05, 0.02], &[1.0, 0.0, 1.0]), None);
    }

    #[test]
    fn case_names_round_trip() {
        for id in CaseId::ALL {
            assert_eq!(id.short().parse::<CaseId>().unwrap(), id);
            assert_eq!(id.name().parse::<CaseId>().unwrap(), id);
        }
        assert!("4".parse::<CaseId>().is_err());
    }
}

//! Solver backend abstraction and the fixed-binary LP re-solve used to
//! recover marginal prices from a MILP incumbent.

mod highs_backend;

pub use highs_backend::HighsBackend;

use crate::error::{Error, Result};
use crate::model::{ModelInstance, RowId, SolveResult, SolveStatus};

/// Options passed to every solve call.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative MIP gap at which the branch-and-bound may stop.
    pub mip_gap: f64,
    /// Wall-clock limit in seconds.
    pub time_limit_s: Option<f64>,
    pub seed: u64,
    pub threads: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mip_gap: 1e-4,
            time_limit_s: None,
            seed: 0,
            threads: 1,
        }
    }
}

impl SolveOptions {
    /// Tight tolerances for exact comparisons in tests.
    pub fn exact() -> Self {
        SolveOptions {
            mip_gap: 1e-9,
            ..Default::default()
        }
    }
}

/// A MILP/LP solver. Implementations must return duals for pure LPs.
pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &ModelInstance, opts: &SolveOptions) -> Result<SolveResult>;
}

/// Environment variable naming the default backend.
pub const BACKEND_ENV: &str = "GATEPLAN_SOLVER";

/// Look a backend up by name; `highs` is the built-in default.
pub fn backend_by_name(name: &str) -> Result<Box<dyn SolverBackend>> {
    match name.to_ascii_lowercase().as_str() {
        "highs" | "default" => Ok(Box::new(HighsBackend::default())),
        other => Err(Error::UnknownBackend(other.to_string())),
    }
}

/// Default backend, overridable through [`BACKEND_ENV`].
pub fn default_backend() -> Box<dyn SolverBackend> {
    let name = std::env::var(BACKEND_ENV).unwrap_or_else(|_| "highs".to_string());
    backend_by_name(&name).unwrap_or_else(|_| Box::new(HighsBackend::default()))
}

/// Fix all binaries to their incumbent values, re-solve as an LP and
/// return the dual-bearing result.
///
/// The primal objective must be unchanged (the incumbent's continuous
/// part is already LP-optimal for its binary assignment); a relative
/// drift above 1e-6 signals a backend tolerance mismatch.
pub fn fix_integers_and_resolve(
    backend: &dyn SolverBackend,
    model: &ModelInstance,
    incumbent: &SolveResult,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let fixed = model.with_fixed_binaries(&incumbent.primal);
    let result = backend.solve(&fixed, opts)?;
    if result.status != SolveStatus::Optimal {
        return Err(Error::Solver(format!(
            "fixed-binary re-solve ended {:?}; incumbent infeasible after fixing",
            result.status
        )));
    }
    if result.duals.is_none() {
        return Err(Error::Solver("backend returned no duals for a pure LP".into()));
    }
    Ok(result)
}

/// Dual objective of an LP solve, for strong-duality checks.
///
/// For a maximisation with rows `a x {<=,=,>=} b` and bounds
/// `l <= x <= u`: `sum_i y_i b_i + sum_j d_j^+ u_j + d_j^- l_j` with `d`
/// the reduced costs split by sign (finite-bound terms only).
pub fn dual_objective(model: &ModelInstance, result: &SolveResult) -> Option<f64> {
    let duals = result.duals.as_ref()?;
    let reduced = result.reduced_costs.as_ref()?;
    let mut total = 0.0;
    for (row, y) in model.rows().iter().zip(duals) {
        total += y * row.rhs;
    }
    for (var, d) in model.vars().iter().zip(reduced) {
        if *d > 0.0 && var.upper.is_finite() {
            total += d * var.upper;
        } else if *d < 0.0 && var.lower.is_finite() {
            total += d * var.lower;
        }
    }
    Some(total)
}

/// Convenience wrapper asserting a feasible outcome.
pub fn solve_expecting_feasible(
    backend: &dyn SolverBackend,
    model: &ModelInstance,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let result = backend.solve(model, opts)?;
    match result.status {
        SolveStatus::Infeasible => Err(Error::Infeasible(model.name.clone())),
        SolveStatus::Unbounded => Err(Error::Solver(format!("model {} unbounded", model.name))),
        _ => Ok(result),
    }
}

/// Marginal prices read off tagged balance rows of an LP result.
pub fn duals_for(result: &SolveResult, rows: &[RowId]) -> Option<Vec<f64>> {
    let duals = result.duals.as_ref()?;
    Some(rows.iter().map(|r| duals[r.0 as usize]).collect())
}

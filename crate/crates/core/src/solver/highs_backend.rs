//! HiGHS-backed implementation of [`SolverBackend`].

use std::time::Instant;

use highs::{HighsModelStatus, RowProblem, Sense};

use crate::error::{Error, Result};
use crate::model::{ModelInstance, RowSense, SolveResult, SolveStatus, VarKind};
use crate::solver::{SolveOptions, SolverBackend};

/// The bundled open-source MILP/LP backend.
#[derive(Debug, Default)]
pub struct HighsBackend;

impl SolverBackend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &ModelInstance, opts: &SolveOptions) -> Result<SolveResult> {
        let start = Instant::now();
        let mut pb = RowProblem::default();

        let mut cols = Vec::with_capacity(model.num_vars());
        for var in model.vars() {
            let col = pb.add_column_with_integrality(
                var.obj,
                var.lower..=var.upper,
                var.kind == VarKind::Binary,
            );
            cols.push(col);
        }
        for row in model.rows() {
            let coeffs: Vec<_> = row
                .coeffs
                .iter()
                .map(|(v, c)| (cols[v.0 as usize], *c))
                .collect();
            match row.sense {
                RowSense::LessEq => pb.add_row(..=row.rhs, coeffs),
                RowSense::GreaterEq => pb.add_row(row.rhs.., coeffs),
                RowSense::Eq => pb.add_row(row.rhs..=row.rhs, coeffs),
            };
        }

        let is_lp = model.is_lp();
        let mut solver = pb
            .try_optimise(Sense::Maximise)
            .map_err(|s| Error::Solver(format!("model rejected: {s:?}")))?;
        solver.set_option("random_seed", opts.seed.min(i32::MAX as u64) as i32);
        solver.set_option("threads", opts.threads.max(1) as i32);
        solver.set_option("parallel", if opts.threads > 1 { "on" } else { "off" });
        solver.set_option("mip_rel_gap", opts.mip_gap);
        if let Some(limit) = opts.time_limit_s {
            solver.set_option("time_limit", limit);
        }

        let solved = solver
            .try_solve()
            .map_err(|s| Error::Solver(format!("solve failed: {s:?}")))?;
        let wall_time_s = start.elapsed().as_secs_f64();

        let status = match solved.status() {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
                SolveStatus::Unbounded
            }
            HighsModelStatus::ReachedTimeLimit | HighsModelStatus::ReachedIterationLimit => {
                // Usable only if an incumbent exists.
                if solved.int_info_value(c"primal_solution_status").unwrap_or(0) == 2 {
                    SolveStatus::FeasibleWithGap
                } else {
                    return Err(Error::Solver(
                        "hit the time limit without a feasible incumbent".into(),
                    ));
                }
            }
            other => return Err(Error::Solver(format!("unexpected solver status {other:?}"))),
        };

        if status == SolveStatus::Infeasible || status == SolveStatus::Unbounded {
            return Ok(SolveResult {
                status,
                objective: f64::NAN,
                primal: vec![],
                duals: None,
                reduced_costs: None,
                mip_gap: f64::NAN,
                wall_time_s,
            });
        }

        let solution = solved.get_solution();
        let mip_gap = if is_lp {
            0.0
        } else {
            match solved.double_info_value(c"mip_gap") {
                Ok(g) if g.is_finite() => g,
                _ => 0.0,
            }
        };
        let status = if status == SolveStatus::Optimal && !is_lp && mip_gap > 1e-9 {
            SolveStatus::FeasibleWithGap
        } else {
            status
        };

        Ok(SolveResult {
            status,
            objective: solved.objective_value(),
            primal: solution.columns().to_vec(),
            duals: is_lp.then(|| solution.dual_rows().to_vec()),
            reduced_costs: is_lp.then(|| solution.dual_columns().to_vec()),
            mip_gap,
            wall_time_s,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarId;
    use crate::solver::dual_objective;

    fn solve(m: &ModelInstance) -> SolveResult {
        HighsBackend.solve(m, &SolveOptions::exact()).unwrap()
    }

    #[test]
    fn lp_with_duals() {
        // max 3x + 2y  s.t.  x <= 4, y <= 3, x + y <= 5.
        let mut m = ModelInstance::new("lp");
        let x = m.add_var("x".into(), VarKind::Continuous, 0.0, f64::INFINITY);
        let y = m.add_var("y".into(), VarKind::Continuous, 0.0, f64::INFINITY);
        m.add_obj(x, 3.0);
        m.add_obj(y, 2.0);
        m.add_row("cx".into(), RowSense::LessEq, 4.0, vec![(x, 1.0)]);
        m.add_row("cy".into(), RowSense::LessEq, 3.0, vec![(y, 1.0)]);
        let joint = m.add_row("joint".into(), RowSense::LessEq, 5.0, vec![(x, 1.0), (y, 1.0)]);
        let r = solve(&m);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 14.0).abs() < 1e-9);
        assert!((r.dual(joint).unwrap() - 2.0).abs() < 1e-9);
        let dual_obj = dual_objective(&m, &r).unwrap();
        assert!((dual_obj - r.objective).abs() < 1e-9);
    }

    #[test]
    fn milp_fix_and_resolve_preserves_objective() {
        // max 5a + x  s.t.  x <= 2 + 3a, a binary.
        let mut m = ModelInstance::new("milp");
        let a = m.add_var("a".into(), VarKind::Binary, 0.0, 1.0);
        let x = m.add_var("x".into(), VarKind::Continuous, 0.0, 10.0);
        m.add_obj(a, 5.0);
        m.add_obj(x, 1.0);
        m.add_row("link".into(), RowSense::LessEq, 2.0, vec![(x, 1.0), (a, -3.0)]);
        let r = solve(&m);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.duals.is_none());
        assert_eq!(r.value(VarId(0)), 1.0);

        let lp = crate::solver::fix_integers_and_resolve(&HighsBackend, &m, &r, &SolveOptions::exact())
            .unwrap();
        assert!((lp.objective - r.objective).abs() <= 1e-6 * r.objective.abs().max(1.0));
        assert!(lp.duals.is_some());
    }

    #[test]
    fn infeasible_is_reported() {
        let mut m = ModelInstance::new("inf");
        let x = m.add_var("x".into(), VarKind::Continuous, 0.0, 1.0);
        m.add_row("low".into(), RowSense::GreaterEq, 2.0, vec![(x, 1.0)]);
        let r = solve(&m);
        assert_eq!(r.status, SolveStatus::Infeasible);
    }
}

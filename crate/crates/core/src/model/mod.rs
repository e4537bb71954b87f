//! Solver-agnostic MILP instance: variable and constraint tables with
//! machine-readable tags, plus the solve-result contract.

pub mod export;

use serde::Serialize;

/// Index of a variable (column) in a [`ModelInstance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(pub u32);

/// Index of a constraint (row) in a [`ModelInstance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RowId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    LessEq,
    Eq,
    GreaterEq,
}

#[derive(Debug, Clone)]
pub struct Variable {
    /// Unique machine-readable name, e.g. `pg(w1,s0,y0,t3)`.
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    /// Objective coefficient (maximisation).
    pub obj: f64,
}

#[derive(Debug, Clone)]
pub struct Row {
    /// Unique machine-readable tag naming the constraint family and the
    /// index tuple, e.g. `ac_balance(BE,s0,y0,t3)`.
    pub tag: String,
    pub sense: RowSense,
    pub rhs: f64,
    pub coeffs: Vec<(VarId, f64)>,
}

/// A concrete optimisation problem with a maximisation objective.
///
/// Construction order is deterministic, which fixes the column and row
/// ordering used by the exporters.
#[derive(Debug, Clone, Default)]
pub struct ModelInstance {
    pub name: String,
    vars: Vec<Variable>,
    rows: Vec<Row>,
}

impl ModelInstance {
    pub fn new(name: &str) -> Self {
        ModelInstance {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> VarId {
        debug_assert!(lower <= upper, "bad bounds for {name}");
        let id = VarId(self.vars.len() as u32);
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
            obj: 0.0,
        });
        id
    }

    /// Add to a variable's objective coefficient.
    pub fn add_obj(&mut self, var: VarId, delta: f64) {
        self.vars[var.0 as usize].obj += delta;
    }

    pub fn add_row(
        &mut self,
        tag: String,
        sense: RowSense,
        rhs: f64,
        coeffs: Vec<(VarId, f64)>,
    ) -> RowId {
        let id = RowId(self.rows.len() as u32);
        self.rows.push(Row {
            tag,
            sense,
            rhs,
            coeffs,
        });
        id
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0 as usize]
    }

    pub fn row(&self, id: RowId) -> &Row {
        &self.rows[id.0 as usize]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn binary_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i as u32))
    }

    pub fn is_lp(&self) -> bool {
        self.vars.iter().all(|v| v.kind == VarKind::Continuous)
    }

    /// Number of rows whose tag starts with `prefix`.
    pub fn count_rows_tagged(&self, prefix: &str) -> usize {
        self.rows.iter().filter(|r| r.tag.starts_with(prefix)).count()
    }

    /// Copy of the model with every binary fixed to its (rounded) value
    /// in `incumbent` and relaxed to a continuous column, so an LP
    /// re-solve yields duals.
    pub fn with_fixed_binaries(&self, incumbent: &[f64]) -> ModelInstance {
        assert_eq!(incumbent.len(), self.vars.len(), "incumbent size mismatch");
        let mut fixed = self.clone();
        for (i, v) in fixed.vars.iter_mut().enumerate() {
            if v.kind == VarKind::Binary {
                let val = incumbent[i].round().clamp(0.0, 1.0);
                v.kind = VarKind::Continuous;
                v.lower = val;
                v.upper = val;
            }
        }
        fixed.name = format!("{}+fixed", self.name);
        fixed
    }

    /// Objective value of a point.
    pub fn objective_of(&self, primal: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(primal)
            .map(|(v, x)| v.obj * x)
            .sum()
    }

    /// Activity of one row at a point.
    pub fn row_activity(&self, row: RowId, primal: &[f64]) -> f64 {
        self.rows[row.0 as usize]
            .coeffs
            .iter()
            .map(|(v, c)| c * primal[v.0 as usize])
            .sum()
    }

    /// Largest scaled constraint violation of a point, over rows and
    /// variable bounds. The scale of a row is `max(1, |rhs|)`.
    pub fn max_residual(&self, primal: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for row in &self.rows {
            let act: f64 = row
                .coeffs
                .iter()
                .map(|(v, c)| c * primal[v.0 as usize])
                .sum();
            let viol = match row.sense {
                RowSense::LessEq => (act - row.rhs).max(0.0),
                RowSense::GreaterEq => (row.rhs - act).max(0.0),
                RowSense::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(viol / row.rhs.abs().max(1.0));
        }
        for (v, x) in self.vars.iter().zip(primal) {
            let viol = (v.lower - x).max(0.0).max(x - v.upper);
            worst = worst.max(viol / v.upper.abs().max(1.0));
        }
        worst
    }
}

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Optimal,
    FeasibleWithGap,
    Infeasible,
    Unbounded,
}

/// Result of one backend call.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    /// Primal values by column index.
    pub primal: Vec<f64>,
    /// Row duals, present only for pure LPs (or after fixing integers).
    pub duals: Option<Vec<f64>>,
    /// Reduced costs, present only for pure LPs.
    pub reduced_costs: Option<Vec<f64>>,
    /// Relative MIP gap of the incumbent; 0 for LPs.
    pub mip_gap: f64,
    pub wall_time_s: f64,
}

impl SolveResult {
    pub fn value(&self, var: VarId) -> f64 {
        self.primal[var.0 as usize]
    }

    pub fn dual(&self, row: RowId) -> Option<f64> {
        self.duals.as_ref().map(|d| d[row.0 as usize])
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::FeasibleWithGap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residuals_and_objective() {
        let mut m = ModelInstance::new("t");
        let x = m.add_var("x".into(), VarKind::Continuous, 0.0, 10.0);
        let y = m.add_var("y".into(), VarKind::Continuous, 0.0, 10.0);
        m.add_obj(x, 2.0);
        m.add_obj(y, 1.0);
        let r = m.add_row("cap".into(), RowSense::LessEq, 5.0, vec![(x, 1.0), (y, 1.0)]);
        assert_eq!(m.objective_of(&[3.0, 1.0]), 7.0);
        assert_eq!(m.row_activity(r, &[3.0, 1.0]), 4.0);
        assert!(m.max_residual(&[3.0, 1.0]) == 0.0);
        assert!(m.max_residual(&[6.0, 0.0]) > 0.0);
    }

    #[test]
    fn fixing_binaries_clamps_bounds() {
        let mut m = ModelInstance::new("t");
        let a = m.add_var("a".into(), VarKind::Binary, 0.0, 1.0);
        let x = m.add_var("x".into(), VarKind::Continuous, 0.0, 1.0);
        let fixed = m.with_fixed_binaries(&[0.9999999, 0.5]);
        assert!(fixed.is_lp());
        assert_eq!(fixed.var(a).lower, 1.0);
        assert_eq!(fixed.var(a).upper, 1.0);
        assert_eq!(fixed.var(x).upper, 1.0);
    }
}

//! Deterministic MPS and LP-text export of a [`ModelInstance`], plus a
//! constraint-tag dump for debugging.
//!
//! Columns and rows are written in construction order, which the builder
//! fixes by index tuple, so repeated exports are byte-identical.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ModelInstance, RowSense, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Mps,
    LpText,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mps" => Ok(ExportFormat::Mps),
            "lp" | "lp-text" | "lptext" => Ok(ExportFormat::LpText),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn export_model(model: &ModelInstance, format: ExportFormat) -> String {
    match format {
        ExportFormat::Mps => to_mps(model),
        ExportFormat::LpText => to_lp_text(model),
    }
}

fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.12}")
    }
}

/// Free-format MPS with an OBJSENSE MAX section.
pub fn to_mps(model: &ModelInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", sanitize(&model.name));
    out.push_str("OBJSENSE\n    MAX\nROWS\n N  OBJ\n");
    for row in model.rows() {
        let kind = match row.sense {
            RowSense::LessEq => 'L',
            RowSense::Eq => 'E',
            RowSense::GreaterEq => 'G',
        };
        let _ = writeln!(out, " {}  {}", kind, row.tag);
    }

    // Column-major coefficient lists in column order.
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (r, row) in model.rows().iter().enumerate() {
        for (v, c) in &row.coeffs {
            by_col[v.0 as usize].push((r, *c));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for (j, var) in model.vars().iter().enumerate() {
        let is_int = var.kind == VarKind::Binary;
        if is_int && !in_int {
            out.push_str("    MARKER    'MARKER'    'INTORG'\n");
            in_int = true;
        } else if !is_int && in_int {
            out.push_str("    MARKER    'MARKER'    'INTEND'\n");
            in_int = false;
        }
        if var.obj != 0.0 {
            let _ = writeln!(out, "    {}  OBJ  {}", var.name, fmt_num(var.obj));
        }
        for (r, c) in &by_col[j] {
            let _ = writeln!(out, "    {}  {}  {}", var.name, model.rows()[*r].tag, fmt_num(*c));
        }
        if var.obj == 0.0 && by_col[j].is_empty() {
            // Keep unused columns visible to the reader.
            let _ = writeln!(out, "    {}  OBJ  0", var.name);
        }
    }
    if in_int {
        out.push_str("    MARKER    'MARKER'    'INTEND'\n");
    }

    out.push_str("RHS\n");
    for row in model.rows() {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", row.tag, fmt_num(row.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for var in model.vars() {
        let (lo, up) = (var.lower, var.upper);
        if var.kind == VarKind::Binary && lo == 0.0 && up == 1.0 {
            let _ = writeln!(out, " BV BND  {}", var.name);
            continue;
        }
        if lo == up {
            let _ = writeln!(out, " FX BND  {}  {}", var.name, fmt_num(lo));
            continue;
        }
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(out, " FR BND  {}", var.name);
            continue;
        }
        if lo != 0.0 {
            if lo == f64::NEG_INFINITY {
                let _ = writeln!(out, " MI BND  {}", var.name);
            } else {
                let _ = writeln!(out, " LO BND  {}  {}", var.name, fmt_num(lo));
            }
        }
        if up != f64::INFINITY {
            let _ = writeln!(out, " UP BND  {}  {}", var.name, fmt_num(up));
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// CPLEX-style LP text.
pub fn to_lp_text(model: &ModelInstance) -> String {
    let mut out = String::from("Maximize\n obj:");
    let mut first = true;
    for var in model.vars() {
        if var.obj == 0.0 {
            continue;
        }
        push_term(&mut out, var.obj, &var.name, first);
        first = false;
    }
    if first {
        out.push_str(" 0 dummy_zero");
    }
    out.push_str("\nSubject To\n");
    for row in model.rows() {
        let _ = write!(out, " {}:", row.tag);
        let mut first = true;
        for (v, c) in &row.coeffs {
            push_term(&mut out, *c, &model.var(*v).name, first);
            first = false;
        }
        if first {
            out.push_str(" 0 dummy_zero");
        }
        let op = match row.sense {
            RowSense::LessEq => "<=",
            RowSense::Eq => "=",
            RowSense::GreaterEq => ">=",
        };
        let _ = writeln!(out, " {} {}", op, fmt_num(row.rhs));
    }
    out.push_str("Bounds\n");
    for var in model.vars() {
        if var.lower == f64::NEG_INFINITY && var.upper == f64::INFINITY {
            let _ = writeln!(out, " {} free", var.name);
        } else if var.lower == var.upper {
            let _ = writeln!(out, " {} = {}", var.name, fmt_num(var.lower));
        } else {
            let lo = if var.lower == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                fmt_num(var.lower)
            };
            let up = if var.upper == f64::INFINITY {
                "+inf".to_string()
            } else {
                fmt_num(var.upper)
            };
            let _ = writeln!(out, " {} <= {} <= {}", lo, var.name, up);
        }
    }
    let binaries: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, coeff: f64, name: &str, first: bool) {
    if first {
        if coeff < 0.0 {
            let _ = write!(out, " - {} {}", fmt_num(-coeff), name);
        } else {
            let _ = write!(out, " {} {}", fmt_num(coeff), name);
        }
    } else if coeff < 0.0 {
        let _ = write!(out, " - {} {}", fmt_num(-coeff), name);
    } else {
        let _ = write!(out, " + {} {}", fmt_num(coeff), name);
    }
}

fn sanitize(name: &str) -> String {
    name.replace(char::is_whitespace, "_")
}

/// Row and column counts recovered from an MPS document; used to check
/// that exports round-trip against the in-memory tables.
pub fn mps_counts(mps: &str) -> (usize, usize) {
    let mut section = "";
    let mut rows = 0usize;
    let mut cols: std::collections::BTreeSet<&str> = Default::default();
    for line in mps.lines() {
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        if !trimmed.starts_with(' ') {
            section = trimmed.split_whitespace().next().unwrap_or("");
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        match section {
            "ROWS" => {
                if let (Some(kind), Some(_name)) = (fields.next(), fields.next()) {
                    if kind != "N" {
                        rows += 1;
                    }
                }
            }
            "COLUMNS" => {
                if let Some(name) = fields.next() {
                    if name != "MARKER" {
                        cols.insert(name);
                    }
                }
            }
            _ => {}
        }
    }
    (rows, cols.len())
}

/// CSV dump of the constraint tags: `tag,sense,rhs,nonzeros`.
pub fn tag_dump_csv(model: &ModelInstance) -> String {
    let mut out = String::from("tag,sense,rhs,nonzeros\n");
    for row in model.rows() {
        let sense = match row.sense {
            RowSense::LessEq => "<=",
            RowSense::Eq => "=",
            RowSense::GreaterEq => ">=",
        };
        let _ = writeln!(out, "{},{},{},{}", row.tag, sense, row.rhs, row.coeffs.len());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelInstance, VarKind};

    fn small_model() -> ModelInstance {
        let mut m = ModelInstance::new("small");
        let x = m.add_var("x".into(), VarKind::Continuous, 0.0, 4.0);
        let a = m.add_var("build(l1,y0)".into(), VarKind::Binary, 0.0, 1.0);
        m.add_obj(x, 3.0);
        m.add_obj(a, -1.5);
        m.add_row("cap(l1)".into(), RowSense::LessEq, 0.0, vec![(x, 1.0), (a, -4.0)]);
        m.add_row("bal(n1)".into(), RowSense::Eq, 2.0, vec![(x, 1.0)]);
        m
    }

    #[test]
    fn mps_roundtrip_counts() {
        let m = small_model();
        let mps = to_mps(&m);
        let (rows, cols) = mps_counts(&mps);
        assert_eq!(rows, m.num_rows());
        assert_eq!(cols, m.num_vars());
    }

    #[test]
    fn exports_are_deterministic() {
        let m = small_model();
        assert_eq!(to_mps(&m), to_mps(&m));
        assert_eq!(to_lp_text(&m), to_lp_text(&m));
    }

    #[test]
    fn lp_text_mentions_binary_section() {
        let lp = to_lp_text(&small_model());
        assert!(lp.contains("Binaries"));
        assert!(lp.contains("build(l1,y0)"));
    }

    #[test]
    fn unknown_format_is_an_error() {
        assert!("xlsx".parse::<ExportFormat>().is_err());
        assert!("mps".parse::<ExportFormat>().is_ok());
    }
}

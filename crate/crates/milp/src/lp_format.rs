//! CPLEX LP text format writer.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{MilpError, Result};
use crate::model::{MilpModel, Sense, VarId};

const CONSTANT_NAME: &str = "obj_constant";

fn valid_name(name: &str) -> bool {
    const EXTRA: &str = "!\"#$%&()/,.;?@_`'{}|~";
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if first.is_ascii_digit() || first == '.' || name.len() > 255 {
        return false;
    }
    // A leading `e`/`E` followed by a digit reads as an exponent.
    if matches!(first, 'e' | 'E') && name[1..].chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return false;
    }
    name.chars().all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

/// Checks that every variable and constraint name is unique and writable.
pub fn check_names(model: &MilpModel) -> Result<()> {
    let mut seen = HashSet::new();
    for v in model.variables() {
        if !valid_name(&v.name) {
            return Err(MilpError::InvalidName(v.name.clone()));
        }
        if !seen.insert(v.name.as_str()) {
            return Err(MilpError::DuplicateName(v.name.clone()));
        }
    }
    if model.objective_constant() != 0.0 && seen.contains(CONSTANT_NAME) {
        return Err(MilpError::DuplicateName(CONSTANT_NAME.to_string()));
    }
    let mut rows = HashSet::new();
    for c in model.constraints() {
        if !valid_name(&c.name) {
            return Err(MilpError::InvalidName(c.name.clone()));
        }
        if !rows.insert(c.name.as_str()) {
            return Err(MilpError::DuplicateName(c.name.clone()));
        }
    }
    Ok(())
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn write_terms(out: &mut String, model: &MilpModel, terms: &[(VarId, f64)]) {
    let mut width = 0;
    for (k, &(v, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { " -" } else if k == 0 { "" } else { " +" };
        let piece = format!("{sign} {} {}", fmt_num(a.abs()), model.variable(v).name);
        width += piece.len();
        out.push_str(&piece);
        if width > 200 {
            out.push_str("\n  ");
            width = 0;
        }
    }
}

/// Renders `model` as LP text.
pub fn to_lp_string(model: &MilpModel) -> Result<String> {
    check_names(model)?;
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", model.name);
    out.push_str("Minimize\n obj:");
    let obj = model.objective_terms();
    write_terms(&mut out, model, &obj);
    let c = model.objective_constant();
    if c != 0.0 {
        let sign = if c < 0.0 { "-" } else if obj.is_empty() { "" } else { "+" };
        let _ = write!(out, " {sign} {} {CONSTANT_NAME}", fmt_num(c.abs()));
    }
    if obj.is_empty() && c == 0.0 {
        // An empty objective still needs a term.
        if let Some(v) = model.variables().first() {
            let _ = write!(out, " 0 {}", v.name);
        }
    }
    out.push_str("\nSubject To\n");
    for row in model.constraints() {
        let _ = write!(out, " {}:", row.name);
        if row.terms.is_empty() {
            if let Some(v) = model.variables().first() {
                let _ = write!(out, " 0 {}", v.name);
            }
        }
        write_terms(&mut out, model, &row.terms);
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {}", fmt_num(row.rhs));
    }
    out.push_str("Bounds\n");
    for v in model.variables() {
        let (l, u) = (v.lower, v.upper);
        if l == u {
            let _ = writeln!(out, " {} = {}", v.name, fmt_num(l));
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else {
            let lo = if l == f64::NEG_INFINITY { "-inf".to_string() } else { fmt_num(l) };
            let hi = if u == f64::INFINITY { "+inf".to_string() } else { fmt_num(u) };
            let _ = writeln!(out, " {lo} <= {} <= {hi}", v.name);
        }
    }
    if c != 0.0 {
        let _ = writeln!(out, " {CONSTANT_NAME} = 1");
    }
    let binaries: Vec<_> = model.variables().iter().filter(|v| v.is_binary()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for v in binaries {
            let _ = writeln!(out, " {}", v.name);
        }
    }
    out.push_str("End\n");
    Ok(out)
}

/// Writes `model` to `path` in LP format. Nothing is written if a name is
/// invalid or duplicated.
pub fn export_lp_text(model: &MilpModel, path: &Path) -> Result<()> {
    let text = to_lp_string(model)?;
    std::fs::write(path, text).map_err(|source| MilpError::Io { path: path.to_path_buf(), source })
}

//! Reading and writing MPS files.
//!
//! Supports the fixed and free format subset made of `NAME`, `ROWS` (N/L/G/E),
//! `COLUMNS`, `RHS`, `RANGES`, `BOUNDS` (LO/UP/FX/FR/MI/PL) and `ENDATA`.
//! Names may not contain whitespace. Integer markers and SOS sections are
//! rejected. Bound values with magnitude `≥ 1e30` are read as infinite.
//!
//! Only the first `N` row is the objective; further `N` rows are read as free
//! constraint rows, which is also how the writer stores them.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::lp::{LpError, LpProblem};

/// Bound magnitudes at or above this are treated as infinite.
pub const MPS_INFINITY: f64 = 1e30;

/// Upper limit on problem size accepted by the reader.
const MAX_ENTITIES: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown row `{name}`")]
    UnknownRow { line: usize, name: String },
    #[error("line {line}: unknown column `{name}`")]
    UnknownColumn { line: usize, name: String },
    #[error("line {line}: unsupported: {what}")]
    Unsupported { line: usize, what: String },
    #[error("missing ENDATA")]
    MissingEnd,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Name,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Objective,
    Free,
    Le,
    Ge,
    Eq,
}

struct RowDef {
    name: String,
    kind: RowKind,
    rhs: f64,
    range: Option<f64>,
}

struct ColDef {
    name: String,
    cost: f64,
    lower: f64,
    upper: f64,
    lower_set: bool,
    entries: Vec<(usize, f64)>,
}

fn syntax(line: usize, msg: impl Into<String>) -> MpsError {
    MpsError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn number(line: usize, tok: &str) -> Result<f64, MpsError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| syntax(line, format!("expected a number, found `{tok}`")))?;
    if v.is_nan() {
        return Err(syntax(line, "NaN is not a valid value"));
    }
    Ok(v)
}

fn finite_number(line: usize, tok: &str) -> Result<f64, MpsError> {
    let v = number(line, tok)?;
    if !v.is_finite() || v.abs() >= MPS_INFINITY {
        return Err(syntax(line, format!("value `{tok}` must be finite")));
    }
    Ok(v)
}

fn bound_value(line: usize, tok: &str) -> Result<f64, MpsError> {
    let v = number(line, tok)?;
    if v >= MPS_INFINITY {
        Ok(f64::INFINITY)
    } else if v <= -MPS_INFINITY {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok(v)
    }
}

/// Parses MPS text into an [`LpProblem`].
pub fn read_str(text: &str) -> Result<LpProblem, MpsError> {
    let mut section = Section::None;
    let mut name = String::from("LP");
    let mut rows: Vec<RowDef> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut cols: Vec<ColDef> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut objective: Option<usize> = None;
    let mut obj_constant = 0.0;
    let mut nentries = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let header = !raw.starts_with(' ') && !raw.starts_with('\t');
        if header {
            section = match tokens[0] {
                "NAME" => {
                    if tokens.len() > 1 {
                        name = tokens[1..].join(" ");
                    }
                    Section::Name
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                "OBJSENSE" | "OBJSENCE" | "SOS" | "QUADOBJ" | "QMATRIX" | "QSECTION" => {
                    return Err(MpsError::Unsupported {
                        line,
                        what: format!("section {}", tokens[0]),
                    })
                }
                other => return Err(syntax(line, format!("unknown section `{other}`"))),
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::None | Section::Name | Section::End => {
                return Err(syntax(line, "data line outside of a section"))
            }
            Section::Rows => {
                if tokens.len() != 2 {
                    return Err(syntax(line, "ROWS entry needs a type and a name"));
                }
                let kind = match tokens[0] {
                    "N" | "n" => {
                        if objective.is_none() {
                            RowKind::Objective
                        } else {
                            RowKind::Free
                        }
                    }
                    "L" | "l" => RowKind::Le,
                    "G" | "g" => RowKind::Ge,
                    "E" | "e" => RowKind::Eq,
                    other => return Err(syntax(line, format!("unknown row type `{other}`"))),
                };
                let rname = tokens[1].to_string();
                if row_index.contains_key(&rname) {
                    return Err(syntax(line, format!("duplicate row `{rname}`")));
                }
                if rows.len() >= MAX_ENTITIES {
                    return Err(syntax(line, "too many rows"));
                }
                if kind == RowKind::Objective {
                    objective = Some(rows.len());
                }
                row_index.insert(rname.clone(), rows.len());
                rows.push(RowDef {
                    name: rname,
                    kind,
                    rhs: 0.0,
                    range: None,
                });
            }
            Section::Columns => {
                if tokens.iter().any(|t| t.contains("MARKER")) {
                    return Err(MpsError::Unsupported {
                        line,
                        what: "integer markers".into(),
                    });
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(syntax(line, "COLUMNS entry needs 3 or 5 fields"));
                }
                let cname = tokens[0];
                let j = match col_index.get(cname) {
                    Some(&j) => j,
                    None => {
                        if cols.len() >= MAX_ENTITIES {
                            return Err(syntax(line, "too many columns"));
                        }
                        col_index.insert(cname.to_string(), cols.len());
                        cols.push(ColDef {
                            name: cname.to_string(),
                            cost: 0.0,
                            lower: 0.0,
                            upper: f64::INFINITY,
                            lower_set: false,
                            entries: Vec::new(),
                        });
                        cols.len() - 1
                    }
                };
                for pair in tokens[1..].chunks(2) {
                    let i = *row_index.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                        line,
                        name: pair[0].to_string(),
                    })?;
                    let v = finite_number(line, pair[1])?;
                    if Some(i) == objective {
                        cols[j].cost += v;
                    } else {
                        nentries += 1;
                        if nentries > MAX_ENTITIES {
                            return Err(syntax(line, "too many coefficients"));
                        }
                        cols[j].entries.push((i, v));
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                // Optional set name: odd field count means it is present.
                let fields: &[&str] = match tokens.len() {
                    2 | 4 => &tokens[..],
                    3 | 5 => &tokens[1..],
                    _ => return Err(syntax(line, "RHS/RANGES entry has wrong field count")),
                };
                for pair in fields.chunks(2) {
                    let i = *row_index.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                        line,
                        name: pair[0].to_string(),
                    })?;
                    let v = finite_number(line, pair[1])?;
                    if section == Section::Rhs {
                        if Some(i) == objective {
                            obj_constant = -v;
                        } else {
                            rows[i].rhs = v;
                        }
                    } else {
                        if matches!(rows[i].kind, RowKind::Objective | RowKind::Free) {
                            return Err(syntax(line, "RANGES on an N row"));
                        }
                        rows[i].range = Some(v);
                    }
                }
            }
            Section::Bounds => {
                let kind = tokens[0];
                let needs_value = matches!(kind, "LO" | "UP" | "FX");
                let (cname, value) = if needs_value {
                    match tokens.len() {
                        3 => (tokens[1], Some(tokens[2])),
                        4 => (tokens[2], Some(tokens[3])),
                        _ => return Err(syntax(line, "BOUNDS entry has wrong field count")),
                    }
                } else {
                    match tokens.len() {
                        2 => (tokens[1], None),
                        3 if col_index.contains_key(tokens[2]) => (tokens[2], None),
                        3 => (tokens[1], None),
                        4 => (tokens[2], None),
                        _ => return Err(syntax(line, "BOUNDS entry has wrong field count")),
                    }
                };
                let j = *col_index.get(cname).ok_or_else(|| MpsError::UnknownColumn {
                    line,
                    name: cname.to_string(),
                })?;
                let col = &mut cols[j];
                match kind {
                    "LO" => {
                        col.lower = bound_value(line, value.unwrap())?;
                        col.lower_set = true;
                    }
                    "UP" => {
                        let v = bound_value(line, value.unwrap())?;
                        if v < 0.0 && !col.lower_set && col.lower == 0.0 {
                            col.lower = f64::NEG_INFINITY;
                        }
                        col.upper = v;
                    }
                    "FX" => {
                        let v = finite_number(line, value.unwrap())?;
                        col.lower = v;
                        col.upper = v;
                        col.lower_set = true;
                    }
                    "FR" => {
                        col.lower = f64::NEG_INFINITY;
                        col.upper = f64::INFINITY;
                        col.lower_set = true;
                    }
                    "MI" => {
                        col.lower = f64::NEG_INFINITY;
                        col.lower_set = true;
                    }
                    "PL" => col.upper = f64::INFINITY,
                    "BV" | "LI" | "UI" | "SC" => {
                        return Err(MpsError::Unsupported {
                            line,
                            what: format!("bound type {kind}"),
                        })
                    }
                    other => return Err(syntax(line, format!("unknown bound type `{other}`"))),
                }
            }
        }
    }
    if section != Section::End {
        return Err(MpsError::MissingEnd);
    }

    let mut lp = LpProblem::new(name);
    lp.add_obj_offset(obj_constant);
    for c in &cols {
        lp.add_col(c.name.clone(), c.cost, c.lower, c.upper)?;
    }
    let mut new_row = vec![usize::MAX; rows.len()];
    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows.len()];
    for (j, c) in cols.iter().enumerate() {
        for &(i, v) in &c.entries {
            per_row[i].push((j, v));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        let (lo, up) = match (r.kind, r.range) {
            (RowKind::Objective, _) => continue,
            (RowKind::Free, _) => (f64::NEG_INFINITY, f64::INFINITY),
            (RowKind::Le, None) => (f64::NEG_INFINITY, r.rhs),
            (RowKind::Ge, None) => (r.rhs, f64::INFINITY),
            (RowKind::Eq, None) => (r.rhs, r.rhs),
            (RowKind::Le, Some(rg)) => (r.rhs - rg.abs(), r.rhs),
            (RowKind::Ge, Some(rg)) => (r.rhs, r.rhs + rg.abs()),
            (RowKind::Eq, Some(rg)) if rg >= 0.0 => (r.rhs, r.rhs + rg),
            (RowKind::Eq, Some(rg)) => (r.rhs + rg, r.rhs),
        };
        new_row[i] = lp.add_row(r.name.clone(), lo, up, &per_row[i])?;
    }
    Ok(lp)
}

/// Reads an MPS file from disk.
pub fn read_file(path: impl AsRef<std::path::Path>) -> Result<LpProblem, MpsError> {
    let text = std::fs::read_to_string(path)?;
    read_str(&text)
}

fn fmt_num(v: f64) -> String {
    // `{}` prints the shortest representation that parses back to the same bits.
    format!("{v}")
}

/// Serializes the live part of `lp` as free-format MPS.
pub fn write_string(lp: &LpProblem) -> String {
    let (lp, _) = lp.compact();
    let mut out = String::new();
    let obj_name = unique_objective_name(&lp);
    let _ = writeln!(out, "NAME {}", sanitize(&lp.name));
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N {obj_name}");
    let mut kinds = Vec::with_capacity(lp.num_rows());
    for i in 0..lp.num_rows() {
        let (lo, up) = (lp.row_lower(i), lp.row_upper(i));
        let (kind, rhs, range) = if lo == up {
            ('E', lo, None)
        } else if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            ('N', 0.0, None)
        } else if lo == f64::NEG_INFINITY {
            ('L', up, None)
        } else if up == f64::INFINITY {
            ('G', lo, None)
        } else if up - (up - lo) == lo {
            ('L', up, Some(up - lo))
        } else {
            ('G', lo, Some(up - lo))
        };
        kinds.push((kind, rhs, range));
        let _ = writeln!(out, " {kind} {}", lp.row_name(i));
    }
    out.push_str("COLUMNS\n");
    for j in 0..lp.num_cols() {
        let name = lp.col_name(j);
        if lp.cost(j) != 0.0 {
            let _ = writeln!(out, "    {name} {obj_name} {}", fmt_num(lp.cost(j)));
        }
        for e in lp.col(j) {
            let _ = writeln!(out, "    {name} {} {}", lp.row_name(e.index), fmt_num(e.value));
        }
        if lp.cost(j) == 0.0 && lp.col(j).is_empty() {
            // Keep empty columns visible to the reader.
            let _ = writeln!(out, "    {name} {obj_name} 0");
        }
    }
    out.push_str("RHS\n");
    if lp.obj_offset() != 0.0 {
        let _ = writeln!(out, "    RHS {obj_name} {}", fmt_num(-lp.obj_offset()));
    }
    for (i, &(kind, rhs, _)) in kinds.iter().enumerate() {
        if kind != 'N' && rhs != 0.0 {
            let _ = writeln!(out, "    RHS {} {}", lp.row_name(i), fmt_num(rhs));
        }
    }
    if kinds.iter().any(|k| k.2.is_some()) {
        out.push_str("RANGES\n");
        for (i, &(_, _, range)) in kinds.iter().enumerate() {
            if let Some(r) = range {
                let _ = writeln!(out, "    RNG {} {}", lp.row_name(i), fmt_num(r));
            }
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..lp.num_cols() {
        let (lo, up) = (lp.col_lower(j), lp.col_upper(j));
        let name = lp.col_name(j);
        if lo == up {
            let _ = writeln!(out, " FX BND {name} {}", fmt_num(lo));
            continue;
        }
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(out, " FR BND {name}");
            continue;
        }
        if lo == f64::NEG_INFINITY {
            let _ = writeln!(out, " MI BND {name}");
        } else if lo != 0.0 {
            let _ = writeln!(out, " LO BND {name} {}", fmt_num(lo));
        }
        if up != f64::INFINITY {
            if lo == 0.0 && up < 0.0 {
                unreachable!("bounds invariant violated");
            }
            let _ = writeln!(out, " UP BND {name} {}", fmt_num(up));
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// Writes `lp` to disk as free-format MPS.
pub fn write_file(lp: &LpProblem, path: impl AsRef<std::path::Path>) -> Result<(), MpsError> {
    std::fs::write(path, write_string(lp))?;
    Ok(())
}

fn sanitize(name: &str) -> String {
    let s: String = name.split_whitespace().collect::<Vec<_>>().join("_");
    if s.is_empty() {
        "LP".into()
    } else {
        s
    }
}

fn unique_objective_name(lp: &LpProblem) -> String {
    let mut name = String::from("OBJ");
    while (0..lp.num_rows()).any(|i| lp.row_name(i) == name) {
        name.push('_');
    }
    name
}

//! Free-format MPS export and import.
//!
//! Labels are written verbatim and must not contain whitespace; [`write_mps`] rejects any that
//! do. The objective offset is stored as the negated RHS of the objective row, which is the
//! convention most solvers follow.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{LpProblem, RowSense};
use crate::error::{Error, Result};

const OBJ_ROW: &str = "COST";

fn check_label(label: &str) -> Result<()> {
    if label.is_empty() || label.chars().any(char::is_whitespace) {
        return Err(Error::InvalidArgument(format!("label '{label}' cannot be written to MPS")));
    }
    Ok(())
}

fn fmt_num(v: f64) -> String {
    // Round-trip exact representation.
    format!("{v:?}")
}

pub fn write_mps(problem: &LpProblem, name: &str) -> Result<String> {
    problem.check_dimensions()?;
    problem.col_labels.iter().chain(&problem.row_labels).try_for_each(|l| check_label(l))?;
    check_label(name)?;

    let mut out = String::new();
    writeln!(out, "NAME {name}").unwrap();
    writeln!(out, "ROWS").unwrap();
    writeln!(out, " N {OBJ_ROW}").unwrap();
    for (label, sense) in problem.row_labels.iter().zip(&problem.row_senses) {
        let code = match sense {
            RowSense::Le => 'L',
            RowSense::Eq => 'E',
            RowSense::Ge => 'G',
        };
        writeln!(out, " {code} {label}").unwrap();
    }
    writeln!(out, "COLUMNS").unwrap();
    let columns = problem.columns();
    for (j, col) in columns.iter().enumerate() {
        let label = &problem.col_labels[j];
        if problem.objective[j] != 0.0 {
            writeln!(out, " {label} {OBJ_ROW} {}", fmt_num(problem.objective[j])).unwrap();
        }
        for &(i, v) in col {
            writeln!(out, " {label} {} {}", problem.row_labels[i], fmt_num(v)).unwrap();
        }
        if problem.objective[j] == 0.0 && col.is_empty() {
            // Keep the column declared.
            writeln!(out, " {label} {OBJ_ROW} 0.0").unwrap();
        }
    }
    writeln!(out, "RHS").unwrap();
    if problem.objective_offset != 0.0 {
        writeln!(out, " RHS {OBJ_ROW} {}", fmt_num(-problem.objective_offset)).unwrap();
    }
    for (label, &b) in problem.row_labels.iter().zip(&problem.rhs) {
        if b != 0.0 {
            writeln!(out, " RHS {label} {}", fmt_num(b)).unwrap();
        }
    }
    writeln!(out, "BOUNDS").unwrap();
    for (j, label) in problem.col_labels.iter().enumerate() {
        let (l, u) = (problem.col_lower[j], problem.col_upper[j]);
        match (l.is_finite(), u.is_finite()) {
            (true, true) if l == u => writeln!(out, " FX BND {label} {}", fmt_num(l)).unwrap(),
            (false, false) => writeln!(out, " FR BND {label}").unwrap(),
            (lf, uf) => {
                if !lf {
                    writeln!(out, " MI BND {label}").unwrap();
                } else if l != 0.0 {
                    writeln!(out, " LO BND {label} {}", fmt_num(l)).unwrap();
                }
                if uf {
                    writeln!(out, " UP BND {label} {}", fmt_num(u)).unwrap();
                }
            }
        }
    }
    writeln!(out, "ENDATA").unwrap();
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::Parse(format!("line {line}: '{tok}' is not a number")))
}

/// Parse free-format MPS. Only minimisation problems with a single `N` row are accepted.
pub fn read_mps(text: &str) -> Result<LpProblem> {
    let mut lp = LpProblem::new();
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut coefs: Vec<Vec<(usize, f64)>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            section = match toks[0] {
                "NAME" => Section::None,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => break,
                other => return Err(Error::Parse(format!("line {lineno}: unknown section {other}"))),
            };
            continue;
        }
        match section {
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(Error::Parse(format!("line {lineno}: malformed ROWS entry")));
                }
                let sense = match toks[0] {
                    "N" => {
                        if obj_row.is_some() {
                            return Err(Error::Parse(format!("line {lineno}: second N row")));
                        }
                        obj_row = Some(toks[1].to_string());
                        continue;
                    }
                    "L" => RowSense::Le,
                    "E" => RowSense::Eq,
                    "G" => RowSense::Ge,
                    s => return Err(Error::Parse(format!("line {lineno}: row type {s}"))),
                };
                row_index.insert(toks[1].to_string(), lp.rhs.len());
                lp.row_labels.push(toks[1].to_string());
                lp.row_senses.push(sense);
                lp.rhs.push(0.0);
                coefs.push(Vec::new());
            }
            Section::Columns => {
                if toks.len() < 3 || toks.len() % 2 == 0 {
                    return Err(Error::Parse(format!("line {lineno}: malformed COLUMNS entry")));
                }
                if toks.get(1) == Some(&"'MARKER'") {
                    return Err(Error::Parse(format!("line {lineno}: integer markers unsupported")));
                }
                let col = *col_index
                    .entry(toks[0].to_string())
                    .or_insert_with(|| lp.add_column(toks[0], 0.0, 0.0, f64::INFINITY));
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], lineno)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        lp.objective[col] += v;
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| Error::Parse(format!("line {lineno}: unknown row {}", pair[0])))?;
                        coefs[r].push((col, v));
                    }
                }
            }
            Section::Rhs => {
                let start = if toks.len() % 2 == 1 { 1 } else { 0 };
                for pair in toks[start..].chunks(2) {
                    if pair.len() != 2 {
                        return Err(Error::Parse(format!("line {lineno}: malformed RHS entry")));
                    }
                    let v = parse_num(pair[1], lineno)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        lp.objective_offset = -v;
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| Error::Parse(format!("line {lineno}: unknown row {}", pair[0])))?;
                        lp.rhs[r] = v;
                    }
                }
            }
            Section::Ranges => {
                return Err(Error::Parse(format!("line {lineno}: RANGES unsupported")));
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(Error::Parse(format!("line {lineno}: malformed BOUNDS entry")));
                }
                let col = *col_index
                    .get(toks[2])
                    .ok_or_else(|| Error::Parse(format!("line {lineno}: unknown column {}", toks[2])))?;
                let value = || -> Result<f64> {
                    toks.get(3)
                        .ok_or_else(|| Error::Parse(format!("line {lineno}: bound value missing")))
                        .and_then(|t| parse_num(t, lineno))
                };
                match toks[0] {
                    "LO" => lp.col_lower[col] = value()?,
                    "UP" => lp.col_upper[col] = value()?,
                    "FX" => {
                        let v = value()?;
                        lp.col_lower[col] = v;
                        lp.col_upper[col] = v;
                    }
                    "FR" => {
                        lp.col_lower[col] = f64::NEG_INFINITY;
                        lp.col_upper[col] = f64::INFINITY;
                    }
                    "MI" => lp.col_lower[col] = f64::NEG_INFINITY,
                    "PL" => lp.col_upper[col] = f64::INFINITY,
                    b => return Err(Error::Parse(format!("line {lineno}: bound type {b}"))),
                }
            }
            Section::None => {}
        }
    }

    let mut entries = Vec::new();
    for (r, row) in coefs.into_iter().enumerate() {
        let mut scratch = LpProblem::new();
        scratch.objective = vec![0.0; lp.num_cols()];
        scratch.add_row("", RowSense::Eq, 0.0, &row);
        entries.extend(scratch.entries.into_iter().map(|mut t| {
            t.row = r;
            t
        }));
    }
    lp.entries = entries;
    lp.check_dimensions()?;
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LpProblem {
        let mut lp = LpProblem::new();
        let x = lp.add_column("x", 1.0, 0.0, f64::INFINITY);
        let y = lp.add_column("y", 2.0, f64::NEG_INFINITY, 4.0);
        let z = lp.add_column("z", 0.0, f64::NEG_INFINITY, f64::INFINITY);
        let w = lp.add_column("w", -1.0, 1.5, 1.5);
        lp.objective_offset = 7.25;
        lp.add_row("r1", RowSense::Ge, 2.0, &[(x, 1.0), (y, 1.0)]);
        lp.add_row("r2", RowSense::Le, 1.5, &[(x, 1.0), (z, 1e-7)]);
        lp.add_row("r3", RowSense::Eq, -0.1, &[(z, 3.0), (w, 1.0 / 3.0)]);
        lp
    }

    #[test]
    fn round_trip_is_exact() {
        let lp = sample();
        let text = write_mps(&lp, "sample").unwrap();
        let back = read_mps(&text).unwrap();
        assert_eq!(back, lp);
    }

    #[test]
    fn whitespace_in_labels_rejected() {
        let mut lp = LpProblem::new();
        lp.add_column("bad label", 1.0, 0.0, 1.0);
        assert!(write_mps(&lp, "p").is_err());
    }

    #[test]
    fn unknown_row_is_a_parse_error() {
        let text = "NAME p\nROWS\n N COST\nCOLUMNS\n x nope 1\nENDATA\n";
        assert!(matches!(read_mps(text), Err(Error::Parse(_))));
    }
}

//! DIMACS CNF text format.

use std::fmt::Write;

use thiserror::Error;

use super::{Cnf, Lit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Serializes with LF line endings. Each entry of `comments` becomes a
/// `c <comment>` line ahead of the header.
pub fn write_dimacs(cnf: &Cnf, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "c {c}").unwrap();
    }
    writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len()).unwrap();
    for clause in &cnf.clauses {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

pub fn to_dimacs(cnf: &Cnf) -> String {
    write_dimacs(cnf, &[])
}

/// Parses DIMACS CNF. Clauses may span lines; `c` and `%` lines are skipped.
pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| DimacsError::Malformed {
                line: line_no,
                reason: format!("bad header `{line}`"),
            })?);
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let v: i32 = tok.parse().map_err(|_| DimacsError::Malformed {
                line: line_no,
                reason: format!("bad literal `{tok}`"),
            })?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if v.unsigned_abs() > num_vars {
                return Err(DimacsError::Malformed {
                    line: line_no,
                    reason: format!("literal {v} exceeds declared {num_vars} variables"),
                });
            } else {
                current.push(Lit::from_dimacs(v));
            }
        }
    }
    let (num_vars, num_clauses) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != num_clauses {
        return Err(DimacsError::Malformed {
            line: 0,
            reason: format!("header declares {num_clauses} clauses, found {}", clauses.len()),
        });
    }
    Ok(Cnf { num_vars, clauses })
}

//! Runs a competition-style solver as a child process: the CNF is written to a
//! temporary file whose path is appended to the command line, and the answer
//! is read from `s` / `v` lines on stdout.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::dimacs::to_dimacs;
use super::{Cnf, SatStatus, SolverError};

pub(crate) fn run(
    cnf: &Cnf,
    cmd: &str,
    timeout: Option<Duration>,
) -> Result<(SatStatus, Option<Vec<bool>>), SolverError> {
    let mut parts = cmd.split_whitespace();
    let program = parts.next().ok_or(SolverError::EmptyCommand)?;
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    file.write_all(to_dimacs(cnf).as_bytes())?;
    file.flush()?;

    let mut child = Command::new(program)
        .args(parts)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SolverError::SolverCrashed(format!("cannot start `{program}`: {e}")))?;

    // Drain pipes on helper threads so a chatty solver cannot block on a full pipe.
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });
    let err_reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr.read_to_string(&mut buf);
        buf
    });

    let deadline = timeout.map(|t| Instant::now() + t);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        thread::sleep(Duration::from_millis(5));
    };
    let out = out_reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();

    let Some(status) = status else {
        return Ok((
            SatStatus::Unknown {
                reason: "timeout".into(),
            },
            None,
        ));
    };
    match parse_competition_output(&out, status.code(), cnf.num_vars) {
        Err(SolverError::OutputUnparseable(msg)) if !status.success() && status.code() != Some(10) && status.code() != Some(20) => {
            Err(SolverError::SolverCrashed(format!(
                "exit status {status}: {msg}; stderr: {}",
                err.trim()
            )))
        }
        other => other,
    }
}

/// Interprets solver stdout. `s` lines take precedence over the exit code;
/// the conventional codes 10 and 20 are used when no `s` line is present.
/// Unlisted variables in a model default to false.
pub fn parse_competition_output(
    stdout: &str,
    exit_code: Option<i32>,
    num_vars: u32,
) -> Result<(SatStatus, Option<Vec<bool>>), SolverError> {
    let mut status: Option<SatStatus> = None;
    let mut model = vec![false; num_vars as usize + 1];
    let mut saw_values = false;
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => SatStatus::Sat,
                "UNSATISFIABLE" => SatStatus::Unsat,
                "UNKNOWN" => SatStatus::Unknown {
                    reason: "solver reported UNKNOWN".into(),
                },
                other => {
                    return Err(SolverError::OutputUnparseable(format!(
                        "unrecognised status `{other}`"
                    )))
                }
            });
        } else if let Some(rest) = line.strip_prefix('v') {
            saw_values = true;
            for tok in rest.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| {
                    SolverError::OutputUnparseable(format!("bad value token `{tok}`"))
                })?;
                if v == 0 {
                    continue;
                }
                let idx = v.unsigned_abs() as usize;
                if idx > num_vars as usize {
                    return Err(SolverError::OutputUnparseable(format!(
                        "value for unknown variable {idx}"
                    )));
                }
                model[idx] = v > 0;
            }
        }
    }
    let status = match (status, exit_code) {
        (Some(s), _) => s,
        (None, Some(10)) => SatStatus::Sat,
        (None, Some(20)) => SatStatus::Unsat,
        (None, code) => {
            return Err(SolverError::OutputUnparseable(format!(
                "no status line (exit code {code:?})"
            )))
        }
    };
    match status {
        SatStatus::Sat if !saw_values && num_vars > 0 => Err(SolverError::OutputUnparseable(
            "satisfiable answer without a model".into(),
        )),
        SatStatus::Sat => Ok((SatStatus::Sat, Some(model))),
        other => Ok((other, None)),
    }
}

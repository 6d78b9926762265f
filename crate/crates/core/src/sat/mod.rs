//! CNF formulas, DIMACS I/O and SAT decision procedures (a built-in CDCL
//! solver and an adapter for external competition-style solvers).

mod cdcl;
pub mod dimacs;
mod external;

use std::fmt;
use std::ops::Not;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use cdcl::Cdcl;
pub use external::parse_competition_output;

/// A propositional variable, numbered from 1 as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(id: u32) -> Var {
        assert!(id > 0, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }
}

/// A literal in DIMACS convention: `v` or `-v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(value: i32) -> Lit {
        assert!(value != 0, "0 is not a literal");
        Lit(value)
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    /// Truth value under a total assignment indexed by variable id.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var().index()] == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A clause set over variables `1..=num_vars`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Cnf {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        debug_assert!(clause.iter().all(|l| l.var().id() <= self.num_vars));
        self.clauses.push(clause);
    }

    /// Index of the first clause falsified by `assignment`, if any.
    /// `assignment[0]` is unused.
    pub fn first_falsified(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|l| l.eval(assignment)))
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() > self.num_vars as usize && self.first_falsified(assignment).is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown { reason: String },
}

impl SatStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SatStatus::Sat => "sat",
            SatStatus::Unsat => "unsat",
            SatStatus::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStats {
    pub solve_time_ms: u128,
    pub solver_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    /// Present iff `status` is `Sat`; indexed by variable id, slot 0 unused.
    pub assignment: Option<Vec<bool>>,
    pub stats: SolveStats,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::Sat
    }

    pub fn value(&self, var: Var) -> Option<bool> {
        self.assignment.as_ref().map(|a| a[var.index()])
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("external solver requires a non-empty command")]
    EmptyCommand,
    #[error("solver crashed: {0}")]
    SolverCrashed(String),
    #[error("could not parse solver output: {0}")]
    OutputUnparseable(String),
    #[error("solver returned an assignment that falsifies clause {clause}")]
    InvalidModel { clause: usize },
    #[error("i/o error talking to solver: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverMode {
    Builtin,
    /// Command line of an external solver; the CNF path is appended.
    External(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub timeout: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolverMode::Builtin,
            timeout: None,
        }
    }
}

impl SolverConfig {
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn external(command: impl Into<String>) -> Self {
        SolverConfig {
            mode: SolverMode::External(command.into()),
            timeout: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }

    /// `builtin` selects the built-in solver; anything else is taken as an
    /// external command line.
    pub fn from_spec(spec: &str) -> Result<Self, SolverError> {
        match spec.trim() {
            "" => Err(SolverError::EmptyCommand),
            "builtin" => Ok(Self::builtin()),
            cmd => Ok(Self::external(cmd)),
        }
    }
}

/// Decides `cnf`. A `Sat` answer always carries a model that has been checked
/// against every clause.
pub fn solve(cnf: &Cnf, cfg: &SolverConfig) -> Result<SatResult, SolverError> {
    let start = Instant::now();
    let (status, assignment, solver_name) = match &cfg.mode {
        SolverMode::Builtin => {
            let deadline = cfg.timeout.map(|t| start + t);
            let (status, model) = Cdcl::new(cnf).solve(deadline);
            (status, model, "builtin-cdcl".to_string())
        }
        SolverMode::External(cmd) => {
            let (status, model) = external::run(cnf, cmd, cfg.timeout)?;
            (status, model, cmd.clone())
        }
    };
    if let Some(model) = &assignment {
        if let Some(clause) = cnf.first_falsified(model) {
            return Err(SolverError::InvalidModel { clause });
        }
    }
    Ok(SatResult {
        status,
        assignment,
        stats: SolveStats {
            solve_time_ms: start.elapsed().as_millis(),
            solver_name,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(v: &[i32]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    #[test]
    fn unit_sat() {
        let mut cnf = Cnf::new(1);
        cnf.add_clause(lits(&[1]));
        let r = solve(&cnf, &SolverConfig::builtin()).unwrap();
        assert!(r.is_sat());
        assert_eq!(r.value(Var::new(1)), Some(true));
    }

    #[test]
    fn contradiction_unsat() {
        let mut cnf = Cnf::new(1);
        cnf.add_clause(lits(&[1]));
        cnf.add_clause(lits(&[-1]));
        let r = solve(&cnf, &SolverConfig::builtin()).unwrap();
        assert_eq!(r.status, SatStatus::Unsat);
        assert!(r.assignment.is_none());
    }

    #[test]
    fn empty_formula_is_sat() {
        let r = solve(&Cnf::new(0), &SolverConfig::builtin()).unwrap();
        assert!(r.is_sat());
        assert_eq!(r.assignment.unwrap().len(), 1);
    }

    #[test]
    fn solver_spec() {
        assert_eq!(SolverConfig::from_spec("builtin").unwrap().mode, SolverMode::Builtin);
        assert_eq!(
            SolverConfig::from_spec("kissat -q").unwrap().mode,
            SolverMode::External("kissat -q".into())
        );
        assert!(matches!(SolverConfig::from_spec("  "), Err(SolverError::EmptyCommand)));
    }
}

//! End-to-end runs through an external MAX-SAT solver process.
//!
//! The solver command receives the WCNF path as its last argument and must
//! print a model (`v` lines) on standard output; `s` and `o` lines are
//! read when present.

use std::process::Command;

use thiserror::Error;

use crate::decode::{certify_assignment, parse_model, Certificate, DecodeError};
use crate::encode::{encode, write_wcnf, CatalogError, WcnfFormat};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Encode(#[from] CatalogError),
    #[error("solver command is empty")]
    EmptyCommand,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver `{command}` exited with {status}: {stderr}")]
    SolverFailed { command: String, status: String, stderr: String },
    #[error("solver reported status `{0}`")]
    Status(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("solver reported cost {reported} but its model falsifies {model} soft clauses")]
    CostMismatch { reported: u64, model: usize },
}

/// What the solver printed besides the model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverReport {
    pub status: Option<String>,
    pub cost: Option<u64>,
}

impl SolverReport {
    pub fn parse(stdout: &str) -> Self {
        let mut r = SolverReport::default();
        for line in stdout.lines() {
            let line = line.trim();
            if let Some(s) = line.strip_prefix("s ") {
                r.status = Some(s.trim().to_string());
            } else if let Some(o) = line.strip_prefix("o ") {
                if let Ok(c) = o.trim().parse() {
                    r.cost = Some(c);
                }
            }
        }
        r
    }

    pub fn optimal(&self) -> bool {
        self.status.as_deref() == Some("OPTIMUM FOUND")
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub certificate: Certificate,
    pub optimal: bool,
    /// Falsified soft clauses in the model: `(h - 1) + m_tr`.
    pub cost: usize,
}

/// Encodes `text`, runs `command` (split on whitespace) on the WCNF file,
/// and certifies the model it prints.
pub fn solve(text: &str, command: &str, format: WcnfFormat) -> Result<SolveOutcome, SolveError> {
    let inst = encode(text)?;
    let mut words = command.split_whitespace();
    let program = words.next().ok_or(SolveError::EmptyCommand)?;
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("instance.wcnf");
    std::fs::write(&path, write_wcnf(&inst, format))?;
    let out = Command::new(program).args(words).arg(&path).output()?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let report = SolverReport::parse(&stdout);
    // Many MAX-SAT solvers use non-zero exit codes (e.g. 30) for success.
    if !stdout.lines().any(|l| l.trim_start().starts_with('v')) {
        if let Some(status) = report.status.filter(|s| s != "OPTIMUM FOUND" && s != "SATISFIABLE") {
            if status == "UNSATISFIABLE" {
                return Err(DecodeError::Unsatisfiable.into());
            }
            return Err(SolveError::Status(status));
        }
        return Err(SolveError::SolverFailed {
            command: command.to_string(),
            status: out.status.to_string(),
            stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
        });
    }
    let a = parse_model(&stdout, &inst.catalog)?;
    let mut values = a.values().to_vec();
    values.resize(inst.num_vars() as usize + 1, false);
    let cost = inst.formula.cost(&values);
    if let Some(reported) = report.cost.filter(|&c| c != cost as u64) {
        return Err(SolveError::CostMismatch { reported, model: cost });
    }
    let certificate = certify_assignment(&a, &inst.catalog)?;
    debug_assert_eq!(certificate.size, cost + certificate.sigma);
    Ok(SolveOutcome { certificate, optimal: report.optimal(), cost })
}

use serde::Serialize;
use std::collections::BTreeMap;

/// What a fatal error was about; decides the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Missing file, unreadable input or malformed spec/data.
    Input,
    /// An expression could not be evaluated somewhere on the grid.
    Eval,
    /// Reconstruction data that cannot be integrated.
    NotIntegrable,
    /// Anything else the pipeline rejected.
    Pipeline,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunError {
    pub kind: ErrorKind,
    pub stage: String,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Residual,
    Membership,
    Classification,
    Alignment,
    Frobenius,
}

/// One enabled check and its outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub tol: f64,
    pub at: Option<[f64; 2]>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Machine-readable record of one command run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub name: String,
    pub grid: String,
    pub expect_violation: bool,
    pub checks: Vec<Check>,
    /// Suites that could not be evaluated; only non-fatal when a violation
    /// is expected.
    pub suite_errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<BTreeMap<String, usize>>,
    /// Other numbers worth reporting that are not checks.
    pub metrics: BTreeMap<String, f64>,
    pub files: Vec<String>,
    pub error: Option<RunError>,
    pub exit_status: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_NOT_INTEGRABLE: i32 = 4;

impl RunSummary {
    pub fn new(command: &str) -> Self {
        RunSummary { command: command.to_string(), ..Default::default() }
    }

    pub fn failed(command: &str, kind: ErrorKind, stage: &str, message: impl Into<String>) -> Self {
        let mut s = RunSummary::new(command);
        s.fail(kind, stage, message);
        s
    }

    pub fn fail(&mut self, kind: ErrorKind, stage: &str, message: impl Into<String>) {
        self.error = Some(RunError { kind, stage: stage.to_string(), message: message.into() });
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn violation_found(&self) -> bool {
        self.checks.iter().any(|c| !c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if let Some(e) = &self.error {
            return match e.kind {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Pipeline => EXIT_CHECK_FAILED,
                ErrorKind::Eval => EXIT_EVAL,
                ErrorKind::NotIntegrable => EXIT_NOT_INTEGRABLE,
            };
        }
        if self.checks.iter().any(|c| c.kind == CheckKind::Frobenius && !c.passed) {
            return EXIT_NOT_INTEGRABLE;
        }
        if self.expect_violation {
            return if self.violation_found() { EXIT_OK } else { EXIT_CHECK_FAILED };
        }
        if !self.suite_errors.is_empty() {
            return EXIT_EVAL;
        }
        if self.violation_found() {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        }
    }

    /// Sets `exit_status` and returns it.
    pub fn finish(&mut self) -> i32 {
        self.exit_status = self.exit_code();
        self.exit_status
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

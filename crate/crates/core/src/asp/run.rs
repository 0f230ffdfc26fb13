use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

use super::answer::{parse_answer_set, AnswerSet, Classification, ParseAnswerError};
use super::AspProgram;

/// Which exit codes mean what. The defaults follow clingo.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExitCodes {
    pub satisfiable: Vec<i32>,
    pub unsatisfiable: Vec<i32>,
    /// Neither answer, but not a failure either (e.g. interrupted).
    pub unknown: Vec<i32>,
}

impl Default for ExitCodes {
    fn default() -> Self {
        ExitCodes {
            satisfiable: vec![10, 11, 30, 31],
            unsatisfiable: vec![20],
            unknown: vec![0, 1],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub args: Vec<String>,
    pub time_limit: Option<Duration>,
    pub exit_codes: ExitCodes,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl SolverConfig {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        SolverConfig {
            path: path.into(),
            args: Vec::new(),
            time_limit: None,
            exit_codes: ExitCodes::default(),
            cancel: None,
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new("clingo")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutcome {
    Satisfiable(AnswerSet),
    Unsatisfiable,
    Unknown(String),
}

#[derive(Debug, Clone)]
pub struct SolverRun {
    pub status: Option<i32>,
    pub wall: Duration,
    pub stdout: String,
    pub stderr: String,
    pub outcome: SolverOutcome,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("solver binary `{0}` not found")]
    NotFound(PathBuf),
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver exited with code {code:?}: {stderr}")]
    UnexpectedExit { code: Option<i32>, stderr: String },
    #[error("unreadable solver output: {0}")]
    Output(#[from] ParseAnswerError),
}

const GRACE: Duration = Duration::from_secs(2);
const POLL: Duration = Duration::from_millis(50);

/// Raw process run: program on stdin, both streams captured. `None` status
/// means the process was killed on timeout or cancellation.
pub(crate) fn run_raw(program: &str, config: &SolverConfig) -> Result<(Option<i32>, String, String, Duration), RunError> {
    let start = Instant::now();
    let mut child = match Command::new(&config.path)
        .args(&config.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(RunError::NotFound(config.path.clone()))
        }
        Err(e) => return Err(e.into()),
    };
    let mut stdin = child.stdin.take().expect("piped stdin");
    let text = program.to_string();
    let writer = thread::spawn(move || {
        // the solver may exit before reading everything
        let _ = stdin.write_all(text.as_bytes());
    });
    let mut out = child.stdout.take().expect("piped stdout");
    let mut err = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = out.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = err.read_to_string(&mut s);
        s
    });
    let deadline = config.time_limit.map(|t| start + t + GRACE);
    let status = loop {
        if let Some(s) = child.wait_timeout(POLL)? {
            break s.code();
        }
        let cancelled = config.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed));
        if cancelled || deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
    };
    let _ = writer.join();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok((status, stdout, stderr, start.elapsed()))
}

/// Runs the solver on `program` and classifies the result by exit code.
pub fn run_external(program: &AspProgram, config: &SolverConfig) -> Result<SolverRun, RunError> {
    let mut config = config.clone();
    if let Some(t) = config.time_limit {
        config.args.push(format!("--time-limit={}", t.as_secs().max(1)));
    }
    let (status, stdout, stderr, wall) = run_raw(&program.text, &config)?;
    let codes = &config.exit_codes;
    let outcome = match status {
        None => SolverOutcome::Unknown("time limit reached".into()),
        Some(c) if codes.satisfiable.contains(&c) => SolverOutcome::Satisfiable(parse_answer_set(&stdout)?),
        Some(c) if codes.unsatisfiable.contains(&c) => SolverOutcome::Unsatisfiable,
        Some(c) if codes.unknown.contains(&c) => match parse_answer_set(&stdout) {
            Err(ParseAnswerError::NoAnswerSet(Classification::Unsatisfiable)) => SolverOutcome::Unsatisfiable,
            _ => SolverOutcome::Unknown(format!("solver gave no answer (exit code {c})")),
        },
        code => return Err(RunError::UnexpectedExit { code, stderr }),
    };
    Ok(SolverRun {
        status,
        wall,
        stdout,
        stderr,
        outcome,
    })
}

/// Number of answer sets, `exact` false when the solver stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelCount {
    pub count: u64,
    pub exact: bool,
}

impl std::fmt::Display for ModelCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.count, if self.exact { "" } else { "+" })
    }
}

/// Parses the `Models : N` summary line, `N+` meaning a lower bound.
pub fn parse_model_count(stdout: &str) -> Option<ModelCount> {
    stdout.lines().find_map(|l| {
        let rest = l.strip_prefix("Models")?.trim_start().strip_prefix(':')?.trim();
        let (digits, exact) = match rest.strip_suffix('+') {
            Some(d) => (d, false),
            None => (rest, true),
        };
        Some(ModelCount {
            count: digits.trim().parse().ok()?,
            exact,
        })
    })
}

/// Counts all answer sets of `program` (clingo's `0 -q` mode). On timeout
/// the solver reports how many it had found so far.
pub fn count_models(program: &AspProgram, config: &SolverConfig) -> Result<ModelCount, RunError> {
    let mut config = config.clone();
    config.args.extend(["0".to_string(), "-q".to_string()]);
    if let Some(t) = config.time_limit {
        config.args.push(format!("--time-limit={}", t.as_secs().max(1)));
    }
    let (status, stdout, stderr, _) = run_raw(&program.text, &config)?;
    let codes = &config.exit_codes;
    let known = status.is_some_and(|c| {
        codes.satisfiable.contains(&c) || codes.unsatisfiable.contains(&c) || codes.unknown.contains(&c)
    });
    match parse_model_count(&stdout) {
        Some(mut n) if known => {
            // 30: search space exhausted with models, 20: without
            n.exact = n.exact && matches!(status, Some(20) | Some(30));
            Ok(n)
        }
        _ => Err(RunError::UnexpectedExit { code: status, stderr }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_count_lines() {
        assert_eq!(
            parse_model_count("Solving...\nModels       : 8\nCalls : 1\n"),
            Some(ModelCount { count: 8, exact: true })
        );
        assert_eq!(
            parse_model_count("Models       : 700+\n"),
            Some(ModelCount { count: 700, exact: false })
        );
        assert_eq!(parse_model_count("UNKNOWN\n"), None);
        assert_eq!(ModelCount { count: 3, exact: false }.to_string(), "3+");
    }

    #[test]
    fn missing_binary() {
        let program = AspProgram {
            text: "a.".into(),
            kind: super::super::ProgramKind::CounterexampleSearch { depth: 0 },
        };
        let cfg = SolverConfig::new("/nonexistent/solver-binary");
        assert!(matches!(run_external(&program, &cfg), Err(RunError::NotFound(_))));
    }
}

//! SMT-LIB 2 style problem files.
//!
//! The accepted subset is small: `declare-datatypes` (non-parametric),
//! `declare-fun` with a `Bool` range, `assert` of a (universally quantified)
//! Horn clause or fact, and `check-sat`, which ends the file. `set-logic`,
//! `set-info` and `set-option` are skipped.
//!
//! ```
//! use regmod::frontend::{parse_problem, print_problem};
//!
//! let text = "
//!     (declare-datatypes ((nat 0)) (((z) (s (p nat)))))
//!     (declare-fun even (nat) Bool)
//!     (assert (even z))
//!     (assert (forall ((x nat)) (=> (even x) (even (s (s x))))))
//!     (assert (forall ((x nat)) (=> (and (even x) (= x (s z))) false)))
//!     (check-sat)
//! ";
//! let problem = parse_problem(text).unwrap();
//! assert_eq!(problem.clauses.len(), 3);
//! assert_eq!(parse_problem(&print_problem(&problem)).unwrap(), problem);
//! ```

mod parse;
mod print;
pub mod sexpr;

use std::fmt;

pub use parse::parse_problem;
pub use print::print_problem;

/// A region of the input text. Offsets are in bytes, line and column are 1-based
/// (columns count characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Sort,
    Duplicate,
    /// Well-formed SMT-LIB outside the supported subset.
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ErrorKind,
    pub message: String,
    pub span: SourceSpan,
    /// What would have been accepted at `span`, when that is a short list.
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

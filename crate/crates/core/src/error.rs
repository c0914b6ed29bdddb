use crate::formula::Violation;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("assignment has {got} bits, formula has {expected} variables")]
    Dimension { expected: usize, got: usize },

    #[error("formula has no variables")]
    EmptyFormula,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid formula: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("clause {clause} has width {width}, expected 3")]
    Width { clause: usize, width: usize },

    #[error("clause {clause} contains a negated literal; eliminate negations before encoding")]
    Encoding { clause: usize },

    #[error("clause {clause} has no variable to solve for")]
    DegenerateClause { clause: usize },

    #[error("{what} needs {needed}, cap is {cap}{hint}")]
    Capacity {
        what: &'static str,
        needed: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("bad generator spec: {0}")]
    Spec(String),

    #[error("substitution did not reach a fixpoint")]
    NotFixpoint,
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

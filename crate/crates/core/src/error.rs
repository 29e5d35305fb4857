use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite float value")]
    NonFinite,
    #[error("all coordinates are zero")]
    ZeroVector,
    #[error("points are equal up to scale")]
    EqualPoints,
    #[error("lines are equal up to scale")]
    EqualLines,
    #[error("field mismatch: {0}")]
    FieldMismatch(&'static str),
    #[error("point lies in the kernel of a singular map")]
    KernelHit,
    #[error("frame has three collinear points")]
    DegenerateFrame,
    #[error("singular map")]
    Singular,
    #[error("eigen-solver residual {0:e} above tolerance")]
    IllConditioned(f64),
    #[error("normalized powers do not reach a singular limit (sv ratio {0:e})")]
    NotEscaping(f64),
    #[error("sequence too short")]
    TooShort,
    #[error("degenerate box{}", word_suffix(.0))]
    DegenerateBox(Option<String>),
    #[error("degenerate seed: {0}")]
    DegenerateSeed(String),
    #[error("bad letter {0:?}")]
    BadLetter(char),
    #[error("mark mismatch for word {word:?}: residual {residual:e}")]
    MarkMismatch { word: String, residual: f64 },
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("approximation has no line samples")]
    EmptyApprox,
    #[error("probe within {0:e} of the limit set approximation")]
    ProbeTooClose(f64),
    #[error("need at least {0} inputs")]
    TooFew(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

fn word_suffix(w: &Option<String>) -> String {
    match w {
        Some(w) => format!(" at word {w:?}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    #[error("geometry error: disks {first} and {second} are not strictly disjoint ({detail})")]
    Geometry {
        first: usize,
        second: usize,
        detail: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("approximation failure: best error ratio {best_ratio:.3e} at degree {best_degree} ({reason})")]
    ApproximationFailure {
        best_ratio: f64,
        best_degree: usize,
        best_errors: Vec<f64>,
        reason: String,
    },

    #[error("ill-conditioned least-squares system at degree {degree} (diagonal ratio {ratio:.3e})")]
    Conditioning { degree: usize, ratio: f64 },

    #[error("least-squares problem too large: {rows} rows x {cols} columns")]
    ProblemTooLarge { rows: usize, cols: usize },

    #[error("stage failure at (l={l}, k={k}): {source}")]
    StageFailure {
        l: usize,
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("window selection failure: {0}")]
    WindowSelection(String),

    #[error("construction failure: {0}")]
    Construction(String),
}

impl Error {
    pub fn stage(l: usize, k: usize, source: Error) -> Self {
        Error::StageFailure {
            l,
            k,
            source: Box::new(source),
        }
    }
}

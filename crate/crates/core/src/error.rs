use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: meaning id {id} outside catalog range 1..={m_catalog}")]
    MeaningOutOfRange { line: usize, id: u64, m_catalog: u32 },

    #[error("line {line}: duplicate entry for language `{language}`, meaning {meaning}")]
    Duplicate {
        line: usize,
        language: String,
        meaning: u32,
    },

    #[error("empty word")]
    EmptyWord,

    #[error("disallowed character {ch:?} (U+{:04X}) in word `{word}`", *.ch as u32)]
    DisallowedChar { ch: char, word: String },

    #[error("languages `{a}` and `{b}` share {shared} meanings, at least {required} required")]
    InsufficientOverlap {
        a: String,
        b: String,
        shared: usize,
        required: usize,
    },

    #[error("unknown language label `{0}`")]
    UnknownLabel(String),

    #[error("distance {distance} between `{a}` and `{b}` is at or beyond saturation d_max = {d_max}")]
    Saturation {
        a: String,
        b: String,
        distance: f64,
        d_max: f64,
    },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("ambiguous cut into {count} clades: merge heights {heights:?} are tied")]
    AmbiguousCut { count: usize, heights: Vec<f64> },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e}, target {target:e})")]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        target: f64,
    },

    #[error("degenerate matrix: {0}")]
    Degenerate(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Numerical failures are internal; everything else traces back to the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

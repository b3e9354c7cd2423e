use std::path::PathBuf;

/// Everything that can go wrong in the crate.
///
/// Variants are split into two broad families, reflected by
/// [`Error::is_numerical`]: configuration/IO problems and numerical failures.
/// The command line maps these to distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("inductance matrix is singular (|det L| = {det:e})")]
    SingularInductance { det: f64 },

    #[error("non-finite value produced in {context}")]
    NonFinite { context: &'static str },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("point is not an equilibrium (residual {residual:e})")]
    NotAnEquilibrium { residual: f64 },

    #[error("ill-conditioned system pencil (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("series of length {len} is too short (need more than {needed})")]
    InsufficientLength { len: usize, needed: usize },

    #[error("split of {len} records with fraction {fraction} leaves an empty part")]
    DegenerateSplit { len: usize, fraction: f64 },

    #[error("normal-equation solve failed (mu = {mu:e}, condition estimate {condition:e})")]
    NormalEquations { mu: f64, condition: f64 },

    #[error("invalid pole set: {0}")]
    InvalidPoles(String),

    #[error("output history holds {have} values, {needed} required")]
    InsufficientHistory { needed: usize, have: usize },

    #[error("simulation diverged at sample {sample}")]
    DivergedAtSample { sample: usize },

    #[error("loss of synchronism at sample {sample} (|delta| = {delta:.3} rad)")]
    LossOfSynchronism { sample: usize, delta: f64 },

    #[error("simulation diverged at t = {time:.4} s")]
    DivergedAtTime { time: f64 },

    #[error("damping metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("{path}:{line}: {msg}")]
    Config {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid configuration: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// `true` for failures of the mathematics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Config { .. } | Error::Invalid(_) | Error::Io { .. } | Error::InvalidPoles(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

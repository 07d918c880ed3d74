use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-conforming mesh: {0}")]
    NonConforming(String),

    #[error("element {element} has non-positive area {area:e}")]
    InvertedElement { element: usize, area: f64 },

    #[error("crease segment {index} from {from:?} to {to:?} is not resolved by the mesh")]
    UnresolvedCrease {
        index: usize,
        from: [f64; 2],
        to: [f64; 2],
    },

    #[error("director evaluated at the singular point {0:?}")]
    SingularPoint([f64; 2]),

    #[error("barycenter of element {element} lies in no material region")]
    NoRegion { element: usize },

    #[error("degenerate deformation gradient on element {element:?}: det I = {det:e}, m.Im = {cm:e}")]
    Degenerate {
        element: Option<usize>,
        det: f64,
        cm: f64,
    },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("flow step {step}: no admissible iterate down to tau = {tau:e}")]
    NoAdmissibleIterate { step: usize, tau: f64 },

    #[error("config{}: {message}", .line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }

    /// Wraps the error with the pipeline stage that produced it.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The outermost pipeline stage tagged on the error, if any.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// The innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

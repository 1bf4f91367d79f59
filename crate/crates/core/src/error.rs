use thiserror::Error;

use crate::token::VertexToken;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed token {token:?} for family {family}")]
    MalformedToken { token: String, family: String },

    #[error("window exhausted: {0}")]
    WindowExhausted(String),

    #[error("graph has no rotation system")]
    NoRotation,

    #[error("face trace from {start} exceeded cap {cap}")]
    UnboundedFace { start: VertexToken, cap: usize },

    /// Search exhaustion. `achieved` is the best value reached and `separator`
    /// carries a Menger witness when one was computed.
    #[error("not found: {what} (achieved {achieved})")]
    NotFound {
        what: String,
        achieved: usize,
        separator: Option<Vec<VertexToken>>,
    },

    #[error("insufficient rungs between pattern rows {row} and {}: need {needed}, have {available}", row + 1)]
    InsufficientRungs {
        row: usize,
        needed: usize,
        available: usize,
    },

    #[error("degenerate map: {0}")]
    Degenerate(String),

    #[error("fragment too small: dilation {factor} needs {needed_rows}x{needed_cols}, have {rows}x{cols}")]
    FragmentTooSmall {
        factor: usize,
        needed_rows: usize,
        needed_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("branch sets of {a} and {b} share {token}")]
    DisjointnessViolation {
        a: String,
        b: String,
        token: VertexToken,
    },

    #[error("internal path clash inside branch set of {0}")]
    InternalPathClash(String),

    #[error("not refuted: family size {family} does not exceed capacity {bound} (threshold {threshold})")]
    NotRefuted {
        family: usize,
        bound: usize,
        threshold: usize,
    },

    #[error("quasi-isometry bounds fail for {u} and {v}: d_G = {dg}, d_T = {dt}")]
    QiViolation {
        u: VertexToken,
        v: VertexToken,
        dg: usize,
        dt: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("import: {0}")]
    Import(String),

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn not_found(what: impl Into<String>, achieved: usize) -> Self {
        Error::NotFound {
            what: what.into(),
            achieved,
            separator: None,
        }
    }

    /// Innermost error, skipping stage wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root_cause(),
            other => other,
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        })
    }
}

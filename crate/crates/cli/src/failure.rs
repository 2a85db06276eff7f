use std::fmt::Display;
use std::path::Path;

use trackforge_core::annotate::ModelError;
use trackforge_core::camera::CameraError;
use trackforge_core::metrics::MetricError;
use trackforge_core::scenario::ScenarioError;

/// Process exit codes for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Parse = 3,
    Validation = 4,
    Undefined = 5,
    Io = 6,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(kind: Kind, error: impl Into<anyhow::Error>) -> Self {
        Self { kind, error: error.into() }
    }

    pub fn msg(kind: Kind, message: impl Display) -> Self {
        Self { kind, error: anyhow::anyhow!("{message}") }
    }

    pub fn context(self, ctx: impl Display + Send + Sync + 'static) -> Self {
        Self { kind: self.kind, error: self.error.context(ctx) }
    }
}

pub type CmdResult<T> = Result<T, Failure>;

pub trait OrFail<T> {
    fn or_fail(self, kind: Kind, ctx: impl Display + Send + Sync + 'static) -> CmdResult<T>;
}

impl<T, E> OrFail<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn or_fail(self, kind: Kind, ctx: impl Display + Send + Sync + 'static) -> CmdResult<T> {
        self.map_err(|e| Failure::new(kind, anyhow::Error::new(e).context(ctx)))
    }
}

pub fn metric(e: MetricError) -> Failure {
    let kind = match e {
        MetricError::Undefined(_) => Kind::Undefined,
        MetricError::InvalidThreshold(_) => Kind::Validation,
    };
    Failure::new(kind, e)
}

pub fn model(e: ModelError, path: &Path) -> Failure {
    let kind = if matches!(e, ModelError::Json(_)) { Kind::Parse } else { Kind::Validation };
    Failure::new(kind, e).context(format!("reading models {}", path.display()))
}

pub fn camera(e: CameraError, path: &Path) -> Failure {
    let kind = if matches!(e, CameraError::Json(_)) { Kind::Parse } else { Kind::Validation };
    Failure::new(kind, e).context(format!("reading rig {}", path.display()))
}

pub fn scenario(e: ScenarioError) -> Failure {
    let kind = if matches!(e, ScenarioError::Json(_)) { Kind::Parse } else { Kind::Validation };
    Failure::new(kind, e)
}

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid bounding box: x={x} y={y} w={w} h={h}")]
    InvalidBox { x: i64, y: i64, w: i64, h: i64 },

    #[error("box (x={x} y={y} w={w} h={h}) does not intersect a {fw}x{fh} frame")]
    BoxOutsideFrame {
        x: i64,
        y: i64,
        w: i64,
        h: i64,
        fw: u32,
        fh: u32,
    },

    #[error("empty object mask")]
    EmptyMask,

    #[error("search region {sw}x{sh} smaller than template {tw}x{th}")]
    SearchTooSmall { sw: u32, sh: u32, tw: u32, th: u32 },

    #[error("object yields only {got} parts, below the configured minimum {min}")]
    TooFewParts { got: usize, min: usize },

    #[error("all parts dead, tracking lost")]
    TrackingLost,

    #[error("no alive part contributed to the aggregate")]
    NoAliveParts,

    #[error("segmenter training diverged (loss became non-finite; last finite loss {last_loss})")]
    TrainingDiverged { last_loss: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error("synthetic sequence error: {0}")]
    Synth(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    ImageDecode { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

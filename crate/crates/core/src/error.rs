use thiserror::Error;

/// Errors produced by the exploration library.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("element does not belong to group {spec}")]
    Mismatch { spec: String },

    #[error("malformed element {text:?}: {message}")]
    MalformedElement { text: String, message: String },

    #[error("element cap of {cap} exceeded while building radius {radius} (completed radius {reached})")]
    ResourceCap { cap: usize, radius: u32, reached: u32 },

    #[error("element {0} lies outside the window")]
    OutOfWindow(String),

    #[error("radius {radius} out of range for window of radius {window}")]
    RadiusOutOfRange { radius: u32, window: u32 },

    #[error("window of radius {window} too small: need radius {needed}")]
    WindowTooSmall { window: u32, needed: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("empty shell: the group is exhausted before radius {0}")]
    EmptyShell(u32),

    #[error("verification failed at probe center {center}: {message}")]
    Verification { center: String, message: String },

    #[error("hyperbolicity diagnostic failed: thinness estimate grew from {small} (radius {small_radius}) to {large} (radius {large_radius})")]
    NonHyperbolic {
        small: u32,
        small_radius: u32,
        large: u32,
        large_radius: u32,
    },

    #[error("cache error: {0}")]
    Cache(String),
}

impl Error {
    /// Process exit status for command-line use: 1 usage, 2 resource cap,
    /// 4 refusal. (3 is reserved for undetermined verdicts.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::Mismatch { .. }
            | Error::MalformedElement { .. }
            | Error::OutOfWindow(_)
            | Error::Cache(_) => 1,
            Error::ResourceCap { .. } => 2,
            Error::RadiusOutOfRange { .. }
            | Error::WindowTooSmall { .. }
            | Error::Precondition(_)
            | Error::EmptyShell(_)
            | Error::Verification { .. }
            | Error::NonHyperbolic { .. } => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

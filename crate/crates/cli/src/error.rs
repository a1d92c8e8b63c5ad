use std::fmt;

/// Exit status for bad input: unreadable media, bad selectors, mismatched
/// geometry.
pub const EXIT_INPUT: i32 = 2;
/// Exit status when a result is numerically undefined, e.g. correlations of
/// a constant predictor.
pub const EXIT_DEGENERATE: i32 = 3;

/// An error with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn degenerate(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DEGENERATE,
            message: message.into(),
        }
    }

    /// Prefixes the message with where it happened.
    pub fn context(mut self, ctx: impl fmt::Display) -> Self {
        self.message = format!("{ctx}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn is_degenerate(e: &ssimkit::Error) -> bool {
    use ssimkit::Error::*;
    matches!(e, DegenerateData(_) | ZeroMeanCoV | DegenerateWeights)
}

impl From<ssimkit::Error> for CliError {
    fn from(e: ssimkit::Error) -> Self {
        let code = if is_degenerate(&e) { EXIT_DEGENERATE } else { EXIT_INPUT };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches context to any error convertible to [`CliError`].
pub trait Context<T> {
    fn context(self, ctx: impl fmt::Display) -> CliResult<T>;
}

impl<T, E: Into<CliError>> Context<T> for Result<T, E> {
    fn context(self, ctx: impl fmt::Display) -> CliResult<T> {
        self.map_err(|e| e.into().context(ctx))
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource cap exceeded: {what} needs {needed} cells, cap is {cap}")]
    Resource { what: String, needed: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn check_cap(what: &str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::Resource { what: what.to_string(), needed, cap })
    } else {
        Ok(())
    }
}

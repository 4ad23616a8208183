use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A group, representation or scenario description is malformed or
    /// describes an unsupported combination.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The conjugate transpose of some basis element leaves the span, so the
    /// algebra has no Cartan decomposition compatible with the standard
    /// involution. Conjugate the group first.
    #[error("algebra is not stable under conjugate transpose (relative residual {residual:.3e})")]
    NotThetaStable { residual: f64 },

    #[error("basis is not closed under the bracket (relative residual {residual:.3e})")]
    NotBracketClosed { residual: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

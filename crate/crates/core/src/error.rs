use thiserror::Error;

use crate::exactalg::AlgebraError;
use crate::geom::GeomError;
use crate::ktheory::KernelError;
use crate::picard::PicardError;
use crate::strata::StrataError;

/// Any failure raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Strata(#[from] StrataError),
}

impl Error {
    /// Whether the failure is a violated precondition rather than an internal fault.
    pub fn is_precondition(&self) -> bool {
        match self {
            Error::Kernel(KernelError::Algebra(e)) | Error::Algebra(e) => {
                matches!(e, AlgebraError::InvalidPrime(_) | AlgebraError::ZeroTrials)
            }
            Error::Kernel(KernelError::InvalidParameters(_)) => true,
            Error::Kernel(KernelError::Geom(e)) | Error::Geom(e) => !matches!(e, GeomError::InternalInconsistency(_)),
            Error::Picard(_) => true,
            Error::Strata(StrataError::InvalidParameters(_)) => true,
            _ => false,
        }
    }
}

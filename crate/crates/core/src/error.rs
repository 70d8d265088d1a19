use thiserror::Error;

/// Errors raised while scoring or preparing cases.
///
/// Validation problems in a case base are reported as data (see
/// [`crate::case_model::Violation`]) rather than through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "value {value} of descriptor `{descriptor_id}` is outside its domain [{lower}, {upper}]"
    )]
    OutOfDomain {
        descriptor_id: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("label `{0}` is not a node of the taxonomy")]
    UnknownLabel(String),

    #[error("numeric descriptor `{0}` has no fuzzy profile")]
    MissingProfile(String),

    #[error("invalid fuzzy profile for `{descriptor_id}`: {reason}")]
    InvalidProfile {
        descriptor_id: String,
        reason: String,
    },

    #[error("invalid taxonomy: {0}")]
    InvalidTaxonomy(String),
}

impl Error {
    /// Configuration errors are problems with the supplied knowledge
    /// (profiles) rather than with the case data itself.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::MissingProfile(_) | Error::InvalidProfile { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

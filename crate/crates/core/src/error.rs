use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} lies outside its allowed domain ({allowed})")]
    Domain {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },
    #[error("matrix is not Hermitian (max asymmetry {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("negative radicand {value:e} in {term}")]
    NegativeRadicand { term: &'static str, value: f64 },
    #[error("singular point: {0}")]
    SingularPoint(&'static str),
    #[error(
        "eigenvalue ordering changed between theta - h and theta + h (theta = {theta}, h = {h:e})"
    )]
    DegenerateCrossing { theta: f64, h: f64 },
    #[error("state family produced a non-finite entry at theta = {theta}")]
    FamilyEval { theta: f64 },
    #[error("non-finite input")]
    NonFinite,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

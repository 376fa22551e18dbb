use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("acceptance probability {p_acc:e} too small to define sifted statistics")]
    DegenerateSifting { p_acc: f64 },

    #[error("constraint functionals are linearly dependent (singular values {sigma_max:e}, {sigma_min:e})")]
    DegenerateConstraints { sigma_max: f64, sigma_min: f64 },

    #[error("feasible set too thin to sample: {accepted} of {requested} accepted after {attempts} draws")]
    ThinFeasibleSet { accepted: usize, requested: usize, attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

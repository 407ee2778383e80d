use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("branch points r{first} and r{second} coincide")]
    CollidingBranchPoints { first: usize, second: usize },

    #[error("base point lies on branch point r{0}")]
    BasePointOnBranchPoint(usize),

    #[error("continuation step too coarse: |arg| = {arg:.3} around r{branch}")]
    StepTooCoarse { branch: usize, arg: f64 },

    #[error("no detour toward r{0} keeps the required clearance")]
    ClearanceUnachievable(usize),

    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),

    #[error("lattice has rank {rank}, expected {expected}")]
    NotFullRank { rank: usize, expected: usize },

    #[error("rational reconstruction failed: {0}")]
    ReconstructionFailed(String),

    #[error("operation requires n = 2, got n = {0}")]
    InvalidArity(usize),

    #[error("lambda must differ from 0 and 1")]
    DegenerateLambda,
}

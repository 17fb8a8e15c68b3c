//! Error type shared by all tensor operations and solvers.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by tensor algebra, decompositions and equation solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes are not conformal for the requested operation.
    ShapeMismatch(String),
    /// A multi-index or block index lies outside the valid range.
    IndexOutOfRange(String),
    /// The unfolding is numerically rank deficient.
    SingularTensor,
    /// A Hermitian input was required but the argument is not Hermitian.
    NotHermitian,
    /// Block tensors G, K of a Hamiltonian assembly are not Hermitian.
    NotHermitianBlocks,
    /// The argument is not (unitary) symplectic in the required block form.
    NotSymplectic,
    /// The argument does not satisfy the Hamiltonian structure equation.
    NotHamiltonian,
    /// An iteration failed to converge.
    ConvergenceFailure {
        what: &'static str,
        iterations: usize,
    },
    /// Newton iteration exhausted its budget before meeting the tolerance.
    MaxIterationsExceeded { iterations: usize, residual: f64 },
    /// The Sylvester operator is singular: A and -B share a U-eigenvalue.
    NoUniqueSolution,
    /// A coefficient tensor required to be stable is not.
    UnstableCoefficient,
    /// The system tensor A has a U-eigenvalue with nonnegative real part.
    UnstableSystem,
    /// The pair (A, B) fails the stabilizability test.
    NotStabilizable,
    /// The pair (C, A) fails the detectability test.
    NotDetectable,
    /// The closed-loop tensor A - G*E is not stable.
    UnstableClosedLoop,
    /// A Hamiltonian tensor has a U-eigenvalue on the imaginary axis.
    ImaginaryAxisEigenvalue,
    /// The Q1 block of a Schur-Hamiltonian decomposition is not invertible.
    SingularQ1,
    /// gamma does not exceed the largest singular value of D.
    GammaTooSmall { gamma: f64, sigma_max_d: f64 },
    /// s I - A is singular at the requested evaluation point.
    SingularResolvent,
    /// An operation restricted to rank-one representations got rank > 1.
    NotRankOne { rank: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::IndexOutOfRange(msg) => write!(f, "index out of range: {msg}"),
            Error::SingularTensor => write!(f, "tensor unfolding is singular"),
            Error::NotHermitian => write!(f, "tensor is not Hermitian"),
            Error::NotHermitianBlocks => {
                write!(f, "Hamiltonian blocks G, K must be Hermitian")
            }
            Error::NotSymplectic => write!(f, "tensor is not unitary symplectic"),
            Error::NotHamiltonian => write!(f, "tensor is not Hamiltonian"),
            Error::ConvergenceFailure { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::MaxIterationsExceeded {
                iterations,
                residual,
            } => write!(
                f,
                "iteration limit {iterations} reached with residual {residual:e}"
            ),
            Error::NoUniqueSolution => {
                write!(f, "no unique solution: A and -B share a U-eigenvalue")
            }
            Error::UnstableCoefficient => write!(f, "coefficient tensor is not stable"),
            Error::UnstableSystem => write!(f, "system tensor A is not stable"),
            Error::NotStabilizable => write!(f, "the pair (A, B) is not stabilizable"),
            Error::NotDetectable => write!(f, "the pair (C, A) is not detectable"),
            Error::UnstableClosedLoop => write!(f, "closed-loop tensor is not stable"),
            Error::ImaginaryAxisEigenvalue => {
                write!(
                    f,
                    "Hamiltonian tensor has a U-eigenvalue on the imaginary axis"
                )
            }
            Error::SingularQ1 => write!(f, "Q1 block is singular (preconditions violated)"),
            Error::GammaTooSmall { gamma, sigma_max_d } => write!(
                f,
                "gamma = {gamma} must exceed sigma_max(D) = {sigma_max_d}"
            ),
            Error::SingularResolvent => write!(f, "s I - A is singular"),
            Error::NotRankOne { rank } => {
                write!(
                    f,
                    "operation requires a rank-one representation, got rank {rank}"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

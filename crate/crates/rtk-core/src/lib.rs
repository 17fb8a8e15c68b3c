//! Even-order paired tensor algebra under the Einstein product.
//!
//! A paired tensor of order 2N carries interleaved row/column modes
//! `(i_1, j_1, ..., i_N, j_N)` and behaves like a matrix: the unfolding map
//! sends it to an `|I| x |J|` complex matrix and turns the Einstein product
//! into matrix multiplication. On top of that substrate this crate provides
//!
//! * structured (generalized CPD) arithmetic, tensor Kronecker products and
//!   the Vec operation ([`structured`]),
//! * eigenstructure, tensor Schur/SVD and Hamiltonian/symplectic
//!   decompositions ([`spectral`]),
//! * Sylvester, Lyapunov and algebraic Riccati tensor-equation solvers
//!   ([`equations`]),
//! * continuous-time multilinear system analysis: transfer functions,
//!   H-infinity norms, the bounded real lemma and LQR gains ([`control`]),
//! * first-order perturbation bounds and condition numbers for the Riccati
//!   tensor equation ([`perturb`]).
//!
//! The crate is `no_std` (with `alloc`); all scalars are `Complex<f64>`.
//!
//! ```
//! use rtk_core::dense::Mat;
//! use rtk_core::equations::{arte_schur_solve, ArteProblem};
//! use rtk_core::tensor::PairedTensor;
//!
//! let a = PairedTensor::from_rank_one(&[
//!     Mat::from_rows_real(&[&[0.0, 1.0], &[0.5, 0.0]]),
//!     Mat::from_rows_real(&[&[0.0, 1.0], &[1.0, 0.0]]),
//! ])?;
//! let b = PairedTensor::identity(&[2, 2]);
//! let c = PairedTensor::identity(&[2, 2]);
//! let report = arte_schur_solve(&ArteProblem::from_system(a, b, c)?)?;
//! assert!(report.closed_loop_eigenvalues.iter().all(|z| z.re < 0.0));
//! assert!(report.psd_certificate >= 0.0);
//! # Ok::<(), rtk_core::Error>(())
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod control;
pub mod dense;
pub mod equations;
pub mod error;
pub mod perturb;
pub mod rng;
pub mod shape;
pub mod spectral;
pub mod structured;
pub mod tensor;

pub use error::{Error, Result};
pub use shape::{ivec, Blocking, Shape};
pub use tensor::{PairedTensor, PlainTensor};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Default relative tolerance for exact-identity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

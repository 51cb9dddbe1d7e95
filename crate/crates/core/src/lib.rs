//! Radial Dirac eigenproblem for an electron in a power-law magnetic field
//! `B = B0 ρⁿ ẑ`, and the quantum-speed-limit quantities built on top of it.
//!
//! Internally everything is dimensionless: lengths in the reduced Compton
//! wavelength λe, energies in mₑc², fields in the critical field B_c and
//! times in the Compton time τ_C. Conversions to laboratory units live in
//! [`physconst`] and [`field`].
//!
//! The pipeline is
//!
//! * [`eigensolver`]: finite-volume discretisation of the radial operator,
//!   Richardson-extrapolated eigenvalues α_ν and normalised radial functions;
//! * [`spectrum`]: energies ε = √(1+α), closed forms and the analytic ansatz;
//! * [`qsl`]: radial displacement, Mandelstam–Tamm time and the speed limit;
//! * [`bounds`]: Bremermann–Bekenstein bound and the spin-crossing field;
//! * [`cli`]: sweep driver, result cache and CSV/JSON tables.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod eigensolver;
mod error;
pub mod field;
pub mod par;
pub mod physconst;
pub mod qsl;
pub mod spectrum;
pub mod tridiag;

pub use error::{Error, Result};
pub use field::PowerLawField;
pub use eigensolver::{EigenRequest, EigenSolution, Spin};

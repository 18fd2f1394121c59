//! Real and complex factorization hierarchies of the Scarf II Hamiltonian.
//!
//! The crate builds the ladder operators of both hierarchies, their
//! closed-form and ladder-built eigenfunctions, and checks every operator
//! identity, spectrum formula and algebra relation numerically. Exact
//! derivatives are carried through operator chains as Taylor jets, so the
//! identity residuals sit at rounding level rather than finite-difference
//! level.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod jet;
pub mod model;
pub mod numerics;
pub mod operators;
pub mod spectra;
pub mod states;
pub mod testfn;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Hard-edge gap probabilities for products of complex Ginibre matrices.
//!
//! The crate computes `E_M(0;(0,s))` three ways: Nyström discretisation of
//! the Fredholm determinant (Bessel, hyper-Bessel and Wright–Bessel kernels),
//! integration of the Hamiltonian ODE systems for `M = 1, 2`, and, in the
//! companion `hardedge-cli` crate, Monte Carlo sampling. Residual checks for
//! first integrals, σ-forms and structural identities live alongside.
//!
//! `no_std` with `alloc`; floating point goes through `libm`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod error;
pub mod flow;
pub mod fredholm;
pub mod jet;
pub mod kernels;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod residual;
pub mod sigma;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Weighted random Motzkin paths and their boundary limits.
//!
//! The crate is organised bottom-up:
//!
//! - [`qspecial`]: q-numbers, q-Pochhammer symbols, q-Gamma, Jacobi theta
//!   functions, `|Γ(iu)|²` and the Macdonald function `K_{iu}(x)`.
//! - [`quad`]: composite Gauss–Legendre rules with panel doubling.
//! - [`ascpoly`]: Al-Salam–Chihara polynomials, their orthogonality density,
//!   the path polynomials `p_n` of the q-model and the boundary values `s_n`, `π_n`.
//! - [`motzkin`]: paths, weight models, transfer-matrix expectations, the
//!   integral representation and an exact sampler.
//! - [`chains`]: the boundary birth–death chains and k-step laws.
//! - [`kernels`]: continuum kernels and local-limit error drivers.
//! - [`io`]: text formats for paths, models, distributions and error tables.

pub mod ascpoly;
pub mod chains;
pub mod error;
pub mod io;
pub mod kernels;
pub mod motzkin;
pub mod qspecial;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;

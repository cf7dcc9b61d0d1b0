//! Sparse multivariate polynomial factorization over the integers.
//!
//! The driver reconstructs the multivariate factors of a sparse polynomial
//! from a small number of bivariate factorizations of its substitution
//! images, one base image plus one probe image per variable in the lucky
//! case. Supporting algebra (sparse arithmetic, heuristic GCD, univariate
//! and bivariate factorization over the integers) lives in the submodules.

pub mod bifactor;
pub mod bipoly;
pub mod heugcd;
pub mod multipoly;
pub mod sparselift;
pub mod text;
pub mod unifactor;
pub mod unipoly;

pub use bifactor::{factor_bivariate, BiFactorization};
pub use bipoly::{weighted_substitute, BiPoly, SubstitutionWeights};
pub use multipoly::{DilationScales, Exp, MultiPoly};
pub use sparselift::{factor_any, sparse_factor, Config, SparseFactorReport};
pub use unifactor::{factor_univariate, UniFactorization};
pub use unipoly::UniPoly;

//! Two-parameter z-measures on the Young graph and the parallel
//! Poisson-Dirichlet theory: exact weights and coherence checks,
//! controlling-measure moments, the density function of the associated
//! point process, and cross-validated Monte Carlo samplers.
//!
//! The crate has two evaluation modes sharing one code path (see
//! [`scalar::Scalar`]): exact arbitrary-precision rationals for the
//! complementary series with rational parameters, and complex doubles for
//! the principal series and all analytic formulas.
//!
//! A guided tour lives in the `book/` directory of the repository
//! (`mdbook serve book`).

pub mod characters;
pub mod density;
pub mod ewens_pd;
pub mod partitions;
pub mod sampling;
pub mod scalar;
pub mod special;
pub mod zmeasure;

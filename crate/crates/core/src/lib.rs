//! Bayesian copula inference: Gaussian copulas, Archimedean pair-copulas and
//! D-vine pair-copula constructions, fitted by Markov chain Monte Carlo with
//! spike-and-slab selection priors and data augmentation for discrete margins.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`] — scalar special functions (normal CDF/quantile pair shared by
//!   all copula code, bivariate and small-dimension multivariate normal CDFs,
//!   the first Debye function).
//! * [`linalg`] — small dense symmetric matrix kernels (Cholesky, triangular
//!   solves, Jacobi eigenvalues). Dimensions here are copula dimensions, so
//!   everything is O(m^3) with tiny m.
//! * [`margins`] — univariate margin families, their CDF/quantile/density
//!   surface and the unconstrained parameterisations used by the samplers.
//! * [`pair_copulas`] — bivariate copula families (independence, Gaussian,
//!   Frank, Clayton, Gumbel): CDF, log density, h-function, inverse
//!   h-function, closed-form dependence measures, simulation.
//! * [`corr_param`] — correlation matrices and their two unconstrained
//!   parameterisations (unit-diagonal Cholesky factors of the inverse, and
//!   semi-partial correlations with selection indicators).
//! * [`gaussian_copula`] — the m-dimensional Gaussian copula density,
//!   likelihood, simulation and bivariate margins.
//! * [`dvine_copula`] — D-vine pair-copula constructions: the conditioned
//!   argument recursion, log density and simulation.
//! * [`mcmc`] — scheme-agnostic MCMC building blocks: t proposals built from
//!   a numeric mode/Hessian, independence MH steps, bounded random walks and
//!   the joint indicator/coefficient spike-and-slab step.
//! * [`samplers`] — the fit schemes: continuous-margin Gaussian copula fits
//!   (either correlation parameterisation), Bayesian selection fits, D-vine
//!   selection fits, and the latent-variable scheme for discrete margins.
//! * [`inference`] — posterior summaries over sweep records: means, ranked
//!   probability intervals, inclusion probabilities, and simulation-based
//!   dependence measures with Monte Carlo standard errors.
//! * [`config`], [`data`], [`chain`], [`report`], [`cli`] — the declarative
//!   run configuration, CSV ingestion, chain-file persistence and the
//!   `fit` / `simulate` / `summarize` command implementations.

pub mod chain;
pub mod cli;
pub mod config;
pub mod corr_param;
pub mod data;
pub mod dvine_copula;
pub mod error;
pub mod gaussian_copula;
pub mod inference;
pub mod linalg;
pub mod margins;
pub mod mcmc;
pub mod pair_copulas;
pub mod report;
pub mod samplers;
pub mod special;

pub use error::{CopulaError, Result};

//! Numerical toolkit for the Ramanujan integral
//!
//! ```text
//! I_R(x) = ∫_0^∞ e^{-xt} dt / (t (π² + log² t)),   x > 0
//! ```
//!
//! The crate evaluates `I_R` and its derivatives from their own integral
//! representations, generates the coefficients of the large-`x` asymptotic
//! expansion, and checks the monotonicity, convexity and Turán-type
//! inequalities satisfied by the derivatives on configurable grids.
//!
//! Module map:
//!
//! - [`quadrature`]: adaptive Gauss–Kronrod (G10/K21) integration on finite,
//!   semi-infinite and doubly-infinite intervals, plus a tanh-sinh rule used
//!   as an independent second route.
//! - [`special`]: gamma, digamma, polygamma at integers, integer zeta values,
//!   truncated power series and the Taylor coefficients of `Γ(n+x)`.
//! - [`ramanujan`]: densities `φ_n`, derivatives `(-1)^n I_R^{(n)}`, the
//!   Bernstein antiderivative and its convergence certificate.
//! - [`asymptotics`]: coefficients `Φ_k(a, n)` and the truncated expansion.
//! - [`turan`]: `H_n(x; α)`, its Laplace density `h_n`, the lemma functions
//!   `g` and `p`, and the α-interval scanner.
//! - [`verify`]: declarative inequality checks aggregated into a [`verify::Report`].
//! - [`cli`]: the `ramint` command-line front end.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod quadrature;
pub mod ramanujan;
pub mod special;
pub mod turan;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::{QuadratureConfig, QuadratureResult};

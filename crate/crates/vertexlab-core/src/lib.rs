//! Numerical laboratory for the critical six-vertex / random-cluster system.
//!
//! Purpose
//! - Provide every computational object needed to cross-verify the exact
//!   solution of the antiferroelectric six-vertex model (weights a=b=1, c>2)
//!   and its random-cluster counterpart at the self-dual point q>4:
//!   the scattering kernel Θ and parameter maps, the continuum root density
//!   ρ and offset density τ, the discrete Bethe system and its eigenvalues,
//!   exact transfer-matrix blocks, brute-force enumeration oracles, loop /
//!   cluster correspondences on the diagonal torus, the Edwards–Sokal
//!   coupling, and the closed-form free energy / correlation length.
//!
//! Why this design
//! - Every quantity is computed along at least two independent routes
//!   (series vs. quadrature, Bethe ansatz vs. exact diagonalization,
//!   transfer traces vs. raw enumeration, percolation weights vs. loop
//!   weights) so that each module certifies the others. The dual routes are
//!   deliberately kept separate; nothing collapses them into one code path.
//! - Everything is deterministic: fixed summation orders, no RNG (sample
//!   grids use a golden-ratio low-discrepancy sequence), so results are
//!   bit-reproducible across runs.
//!
//! Module map
//! - [`params`]: model parameterizations (q, p_c, c, Δ, λ) and invariants.
//! - [`kernel`]: the scattering phase Θ, its partial derivatives, the angle
//!   change-of-variables k and the Poisson-kernel-like weight Ξ.
//! - [`quad`]: periodic trapezoid rule, Fourier coefficients, tanh-sinh
//!   quadrature for endpoint-singular integrands, golden-ratio sample sets.
//! - [`continuum`]: ρ, τ, residuals of the two continuum integral equations,
//!   Fourier-coefficient identities, Parseval cross-checks.
//! - [`bethe`]: the discrete Bethe system in the symmetric sector, root
//!   solver with Δ-continuation, eigenvalues/eigenvectors, step-density and
//!   offset diagnostics, the Δ→−∞ eigenvalue limit.
//! - [`xfermat`]: sparse transfer-matrix blocks, Perron–Frobenius
//!   eigenvalues, traces, and the Δ→−∞ limit block.
//! - [`icelab`]: brute-force six-vertex enumeration oracle on tiny tori.
//! - [`fkloop`]: random-cluster configurations on the diagonal torus, loop
//!   decomposition, homology/winding statistics, correspondence identities,
//!   and the Edwards–Sokal coupling on small graphs.
//! - [`closedform`]: free energy and inverse correlation length series in
//!   both evaluation regimes, with explicit tail bounds.
//!
//! Notes
//! - Shared value types are re-exported at the crate root; functions are
//!   addressed through their module paths.
//! - All floating-point work is IEEE-754 double precision; quantities that
//!   underflow a double (the correlation-length series extremely close to
//!   q=4) are exposed in log space instead of through extended precision.

pub mod bethe;
pub mod closedform;
pub mod continuum;
pub mod error;
pub mod fkloop;
pub mod icelab;
pub mod kernel;
pub mod params;
pub mod quad;
pub mod xfermat;

pub use bethe::{BetheRoots, OffsetFunction, StepDensity};
pub use closedform::{SeriesMethod, SeriesValue};
pub use continuum::{DensityEval, FourierName};
pub use error::{Error, Result};
pub use fkloop::{DiamondTorus, LoopDecomposition, RcTorusConfig, SmallGraph};
pub use icelab::IceEnumeration;
pub use kernel::Angle;
pub use params::ModelParams;
pub use xfermat::{ArrowState, TransferBlock};

//! Finite-time ruin probabilities for the Cramér–Lundberg model with
//! exponential claims and for Brownian motion with drift.
//!
//! Cumulative Parisian ruin happens once the total time spent below zero
//! exceeds an allowance `r`. Closed forms live in [`cl`] and [`brownian`];
//! [`mc`] simulates paths to check them.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(v > 0.0)` also rejects NaN

pub mod brownian;
pub mod cl;
pub mod curve;
pub mod error;
pub mod laplace;
pub mod mc;
pub mod models;
pub mod occupation;
pub mod quadrature;
pub mod special;
pub mod validate;

pub use brownian::{
    cum_parisian_prob_bm, exp_parisian_prob_bm, occ_cdf_bm, occ_density_bm, occ_distribution_bm,
    ruin_prob_bm, BrownianLaw,
};
pub use cl::{
    classical_ruin_prob_cl, cum_parisian_prob_cl, exp_parisian_prob_cl, k_correction,
    occ_distribution_x, survival_x, survival_zero, ClKernel,
};
pub use error::{Error, Result};
pub use models::{
    lundberg_roots, phi_bm, psi, BrownianParams, CramerLundbergParams, LundbergRoots, ModelParams,
};
pub use occupation::{OccupationDistribution, OccupationLaw};
